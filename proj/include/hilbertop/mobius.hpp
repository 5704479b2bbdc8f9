#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "series.hpp"
#include "summation.hpp"

namespace hilbertop {

namespace detail {

inline void require_parameter(cplx a, const char* what) {
  if (!(std::abs(a) < 1.0)) {
    throw DomainError(std::string(what) + ": parameter " + format_point(a) +
                      " is not inside the unit disc");
  }
}

// 1 - |z|^2 without cancellation for |z| near 1.
inline double gap(cplx z) {
  const double m = std::abs(z);
  return (1.0 - m) * (1.0 + m);
}

}  // namespace detail

/// sigma_a(z) = (a - z) / (1 - conj(a) z).
inline cplx sigma(cplx a, cplx z) {
  detail::require_parameter(a, "sigma");
  const cplx d = 1.0 - std::conj(a) * z;
  if (d == cplx{}) throw DomainError("sigma: z is the pole 1/conj(a)");
  return (a - z) / d;
}

/// |sigma_a'(z)|^2 = (1-|a|^2)^2 / |1 - conj(a) z|^4.
inline double jacobian_modulus_sq(cplx a, cplx z) {
  detail::require_parameter(a, "jacobian_modulus_sq");
  const double g = detail::gap(a);
  const double d = std::norm(1.0 - std::conj(a) * z);
  return g * g / (d * d);
}

/// P_zeta(e^{i theta}) = (1-|zeta|^2) / |e^{i theta} - zeta|^2.
inline double poisson_kernel(cplx zeta, double theta) {
  detail::require_inside_disc(zeta, "poisson_kernel");
  return detail::gap(zeta) / std::norm(std::polar(1.0, theta) - zeta);
}

/// 1 - |sigma_a(z)|^2 = (1-|a|^2)(1-|z|^2) / |1 - conj(a) z|^2.
inline double hyperbolic_gap(cplx a, cplx z) {
  return detail::gap(a) * detail::gap(z) / std::norm(1.0 - std::conj(a) * z);
}

/// log |(1 - conj(a) z) / (a - z)|^2 = -log |sigma_a(z)|^2.
inline double log_weight(cplx a, cplx z) {
  detail::require_parameter(a, "log_weight");
  if (z == a) throw DomainError("log_weight: singular at z = a");
  const double x = hyperbolic_gap(a, z);
  if (x < 0.5) return -std::log1p(-x);
  return -2.0 * std::log(std::abs(a - z) / std::abs(1.0 - std::conj(a) * z));
}

/// phi(z) = lambda * sigma_a(z), |lambda| = 1.
class DiscAutomorphism {
 public:
  DiscAutomorphism() : lambda_(-1.0), a_(0.0) {}

  DiscAutomorphism(cplx lambda, cplx a) : a_(a) {
    detail::require_parameter(a, "DiscAutomorphism");
    const double m = std::abs(lambda);
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("DiscAutomorphism: lambda must be nonzero");
    lambda_ = lambda / m;
  }

  static DiscAutomorphism identity() { return {}; }

  cplx lambda() const { return lambda_; }
  cplx a() const { return a_; }

  cplx operator()(cplx z) const { return lambda_ * sigma(a_, z); }

  cplx derivative(cplx z) const {
    const cplx d = 1.0 - std::conj(a_) * z;
    return -lambda_ * detail::gap(a_) / (d * d);
  }

  /// 1 - phi(z) without cancellation near phi(z) = 1.
  cplx complement(cplx z) const {
    return ((1.0 - lambda_ * a_) + z * (lambda_ - std::conj(a_))) / (1.0 - std::conj(a_) * z);
  }

  DiscAutomorphism inverse() const { return {std::conj(lambda_), lambda_ * a_}; }

  /// (*this) o inner.
  DiscAutomorphism after(const DiscAutomorphism& inner) const {
    const cplx zero = inner.inverse()(inverse()(0.0));
    const cplx d = derivative(inner(0.0)) * inner.derivative(0.0);
    // derivative of lambda sigma_b at 0 is -lambda (1-|b|^2)
    return {-d / detail::gap(zero), zero};
  }

 private:
  cplx lambda_;
  cplx a_;
};

inline DiscAutomorphism compose(const DiscAutomorphism& outer, const DiscAutomorphism& inner) {
  return outer.after(inner);
}

/// Taylor coefficients of lambda sigma_a up to the given degree:
/// lambda a - lambda (1-|a|^2) sum conj(a)^{n-1} z^n.
inline TaylorPolynomial automorphism_series(const DiscAutomorphism& phi, std::size_t degree) {
  std::vector<cplx> c(degree + 1);
  c[0] = phi.lambda() * phi.a();
  const cplx ab = std::conj(phi.a());
  cplx pw = -phi.lambda() * detail::gap(phi.a());
  for (std::size_t n = 1; n <= degree; ++n) {
    c[n] = pw;
    pw *= ab;
  }
  return TaylorPolynomial(std::move(c));
}

/// Taylor coefficients of f o phi up to the given degree, from samples on the
/// unit circle (f o phi is analytic on |z| < 1/|a|).
inline TaylorPolynomial compose(const TaylorPolynomial& f, const DiscAutomorphism& phi,
                                std::size_t degree) {
  const double ra = std::abs(phi.a());
  std::size_t need = std::max<std::size_t>(2 * (degree + 1), 64);
  if (ra > 0.0) {
    const double decay = -std::log(ra);
    const double n_alias = (40.0 + 2.0 * static_cast<double>(f.degree())) / decay;
    need = std::max(need, static_cast<std::size_t>(std::min(n_alias, 4.0e6)));
  }
  std::size_t m = 64;
  while (m < need) m *= 2;
  std::vector<cplx> vals(m);
  for (std::size_t j = 0; j < m; ++j) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
    vals[j] = detail::horner(f.coeffs(), phi(w));
  }
  auto c = detail::dft(std::move(vals), FFTW_FORWARD);
  c.resize(degree + 1);
  for (auto& x : c) x /= static_cast<double>(m);
  return TaylorPolynomial(std::move(c));
}

}  // namespace hilbertop
