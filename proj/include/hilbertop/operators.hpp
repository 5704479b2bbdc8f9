#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "quadrature.hpp"
#include "series.hpp"
#include "summation.hpp"

namespace hilbertop {

inline constexpr std::size_t kOperatorRuleNodes = 128;

inline const IntervalRule& default_operator_rule() {
  static const IntervalRule rule = interval_rule(kOperatorRuleNodes);
  return rule;
}

/// s -> psi_s(w) = s / ((s-1) w + 1), a circular arc from 0 to 1 inside the disc.
class ArcPath {
 public:
  explicit ArcPath(cplx w) : w_(w) { detail::require_inside_disc(w, "ArcPath"); }

  cplx target() const { return w_; }

  cplx operator()(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("ArcPath: s must lie in [0,1]");
    return s / ((s - 1.0) * w_ + 1.0);
  }

 private:
  cplx w_;
};

/// Coefficients of H(f): sum_k a_k / (k + n + 1), n = 0..n_out.
inline TaylorPolynomial hilbert_coeff(const TaylorPolynomial& f, std::size_t n_out) {
  const auto a = f.coeffs();
  std::vector<cplx> out(n_out + 1);
  for (std::size_t n = 0; n <= n_out; ++n) {
    CompensatedComplexSum s;
    for (std::size_t k = 0; k < a.size(); ++k) s.add(a[k] / static_cast<double>(k + n + 1));
    out[n] = s.value();
  }
  return TaylorPolynomial(std::move(out));
}

/// int_0^1 f(t) / (1 - t z) dt.
inline cplx hilbert_integral(const TaylorPolynomial& f, cplx z, const IntervalRule& rule = default_operator_rule()) {
  detail::require_inside_disc(z, "hilbert_integral");
  return rule.integrate([&](double t) { return detail::horner(f.coeffs(), cplx(t)) / (1.0 - t * z); });
}

/// b(z) = int_0^1 psi_s(z) f(psi_s(z)) ds.
inline cplx bounded_factor(const TaylorPolynomial& f, cplx z, const IntervalRule& rule = default_operator_rule()) {
  const ArcPath path(z);
  return rule.integrate([&](double s) {
    const cplx p = path(s);
    return p * detail::horner(f.coeffs(), p);
  });
}

/// H(f)'(w) = b(w) / (1 - w).
inline cplx hilbert_derivative(const TaylorPolynomial& f, cplx w, const IntervalRule& rule = default_operator_rule()) {
  detail::require_inside_disc(w, "hilbert_derivative");
  return bounded_factor(f, w, rule) / (1.0 - w);
}

/// Coefficients of C(f): (a_0 + ... + a_n) / (n + 1), n = 0..n_out.
inline TaylorPolynomial cesaro_coeff(const TaylorPolynomial& f, std::size_t n_out) {
  std::vector<cplx> out(n_out + 1);
  CompensatedComplexSum partial;
  for (std::size_t n = 0; n <= n_out; ++n) {
    partial.add(f[n]);
    out[n] = partial.value() / static_cast<double>(n + 1);
  }
  return TaylorPolynomial(std::move(out));
}

/// max_k |C(e_n)_k - (S^n H(e_n))_k| for k = 0..n_out.
inline double shift_relation_residual(std::size_t n, std::size_t n_out) {
  const auto e = TaylorPolynomial::monomial(n);
  const auto c = cesaro_coeff(e, n_out);
  const auto h = shift(hilbert_coeff(e, n_out), n);
  double r = 0.0;
  for (std::size_t k = 0; k <= n_out; ++k) r = std::max(r, std::abs(c[k] - h[k]));
  return r;
}

}  // namespace hilbertop
