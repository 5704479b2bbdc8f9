#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/special_functions/trigamma.hpp>

#include "summation.hpp"

namespace hilbertop {

inline constexpr std::size_t kDefaultDegree = 512;

/// Closed-form coefficient tail a_n = scale / (n + offset) for n > degree.
/// Used to correct functionals of truncated series whose coefficients decay
/// like 1/n (log(1/(1-z)), H(1), C(1), ...).
struct CoefficientTail {
  cplx scale{1.0, 0.0};
  double offset = 0.0;
};

/// Truncated Taylor series sum_{n<=degree} a_n z^n, optionally annotated with
/// the analytic tail of the function it truncates.
class TaylorPolynomial {
 public:
  TaylorPolynomial() : coeffs_{cplx{0.0, 0.0}} {}

  explicit TaylorPolynomial(std::vector<cplx> coeffs,
                            std::optional<CoefficientTail> tail = std::nullopt)
      : coeffs_(std::move(coeffs)), tail_(tail) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  TaylorPolynomial(std::initializer_list<cplx> coeffs)
      : TaylorPolynomial(std::vector<cplx>(coeffs)) {}

  static TaylorPolynomial monomial(std::size_t n, cplx c = 1.0) {
    std::vector<cplx> a(n + 1, 0.0);
    a[n] = c;
    return TaylorPolynomial(std::move(a));
  }

  static TaylorPolynomial constant(cplx c) { return TaylorPolynomial({c}); }

  std::size_t degree() const { return coeffs_.size() - 1; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx operator[](std::size_t n) const { return n < coeffs_.size() ? coeffs_[n] : cplx{}; }
  const std::optional<CoefficientTail>& tail() const { return tail_; }

  TaylorPolynomial without_tail() const { return TaylorPolynomial(coeffs_); }

  bool is_constant() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(),
                       [](cplx c) { return c == cplx{}; });
  }

  friend TaylorPolynomial operator+(const TaylorPolynomial& p, const TaylorPolynomial& q) {
    return combine(1.0, p, 1.0, q);
  }
  friend TaylorPolynomial operator-(const TaylorPolynomial& p, const TaylorPolynomial& q) {
    return combine(1.0, p, -1.0, q);
  }
  friend TaylorPolynomial operator*(cplx s, const TaylorPolynomial& p) {
    std::vector<cplx> a(p.coeffs_);
    for (auto& c : a) c *= s;
    std::optional<CoefficientTail> t = p.tail_;
    if (t) t->scale *= s;
    return TaylorPolynomial(std::move(a), t);
  }

  /// alpha*p + beta*q. The tail survives only when both tails have the same
  /// offset and the degrees agree.
  static TaylorPolynomial combine(cplx alpha, const TaylorPolynomial& p, cplx beta,
                                  const TaylorPolynomial& q) {
    const std::size_t n = std::max(p.coeffs_.size(), q.coeffs_.size());
    std::vector<cplx> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = alpha * p[i] + beta * q[i];
    std::optional<CoefficientTail> t;
    if (p.tail_ && q.tail_ && p.tail_->offset == q.tail_->offset && p.degree() == q.degree()) {
      t = CoefficientTail{alpha * p.tail_->scale + beta * q.tail_->scale, p.tail_->offset};
    }
    return TaylorPolynomial(std::move(a), t);
  }

 private:
  std::vector<cplx> coeffs_;
  std::optional<CoefficientTail> tail_;
};

namespace detail {

inline cplx horner(std::span<const cplx> a, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) acc = acc * z + a[i];
  return acc;
}

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Unnormalised DFT: out_j = sum_k in_k exp(sign * 2 pi i jk / M).
inline std::vector<cplx> dft(std::vector<cplx> data, int sign) {
  const int m = static_cast<int>(data.size());
  std::vector<cplx> out(data.size());
  auto* in_ptr = reinterpret_cast<fftw_complex*>(data.data());
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(m, in_ptr, out_ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace detail

/// Values p(r e^{2 pi i j / M}), j = 0..M-1. Coefficients are folded mod M, so
/// the samples are exact for any M.
inline std::vector<cplx> circle_samples(const TaylorPolynomial& p, double r, std::size_t m) {
  if (m == 0) throw std::invalid_argument("circle_samples: need at least one node");
  std::vector<cplx> folded(m, 0.0);
  double rn = 1.0;
  for (std::size_t n = 0; n <= p.degree(); ++n) {
    folded[n % m] += p[n] * rn;
    rn *= r;
  }
  return detail::dft(std::move(folded), FFTW_BACKWARD);
}

inline cplx eval(const TaylorPolynomial& p, cplx z) {
  detail::require_inside_disc(z, "eval");
  return detail::horner(p.coeffs(), z);
}

inline TaylorPolynomial differentiate(const TaylorPolynomial& p) {
  if (p.degree() == 0) return TaylorPolynomial();
  std::vector<cplx> d(p.degree());
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = static_cast<double>(n + 1) * p[n + 1];
  return TaylorPolynomial(std::move(d));
}

/// Multiplication by z^k.
inline TaylorPolynomial shift(const TaylorPolynomial& p, std::size_t k) {
  std::vector<cplx> a(k, 0.0);
  a.insert(a.end(), p.coeffs().begin(), p.coeffs().end());
  std::optional<CoefficientTail> t = p.tail();
  if (t) t->offset -= static_cast<double>(k);
  return TaylorPolynomial(std::move(a), t);
}

/// M_q(r, p) with the d(theta)/2pi normalisation.
inline double hardy_mean(const TaylorPolynomial& p, double r, double q) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("hardy_mean: radius must lie in [0,1)");
  if (!(q >= 1.0)) throw DomainError("hardy_mean: exponent q must be >= 1");
  if (r == 0.0) return std::abs(p[0]);
  if (q == 2.0) {
    CompensatedSum s;
    double r2n = 1.0;
    for (std::size_t n = 0; n <= p.degree(); ++n) {
      s.add(std::norm(p[n]) * r2n);
      r2n *= r * r;
    }
    return std::sqrt(s.value());
  }
  const std::size_t m = std::max<std::size_t>(4 * p.degree(), 256);
  const auto vals = circle_samples(p, r, m);
  CompensatedSum s;
  for (const auto& v : vals) s.add(std::pow(std::abs(v), q));
  return std::pow(s.value() / static_cast<double>(m), 1.0 / q);
}

/// Harmonic extension of |p|^2 from the circle. The autocorrelation
/// c_k = sum_m a_{m+k} conj(a_m) is computed once; each evaluation is then
/// c_0 + 2 Re sum_k c_k zeta^k.
class BoundaryModulusExtension {
 public:
  explicit BoundaryModulusExtension(const TaylorPolynomial& p) : corr_(p.degree() + 1) {
    const auto a = p.coeffs();
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
      CompensatedComplexSum s;
      for (std::size_t m = 0; m + k < n; ++m) s.add(a[m + k] * std::conj(a[m]));
      corr_[k] = s.value();
    }
  }

  double operator()(cplx zeta) const {
    detail::require_inside_disc(zeta, "poisson_extension_mod_sq");
    cplx acc = 0.0;
    for (std::size_t k = corr_.size(); k-- > 1;) acc = (acc + corr_[k]) * zeta;
    return corr_[0].real() + 2.0 * acc.real();
  }

  std::span<const cplx> autocorrelation() const { return corr_; }

 private:
  std::vector<cplx> corr_;
};

inline double poisson_extension_mod_sq(const TaylorPolynomial& p, cplx zeta) {
  detail::require_inside_disc(zeta, "poisson_extension_mod_sq");
  return BoundaryModulusExtension(p)(zeta);
}

/// sum_{n > degree} |a_n|^2 for the declared tail, i.e. |c|^2 trigamma(N+1+s).
inline double tail_l2_norm_sq(const TaylorPolynomial& p) {
  if (!p.tail()) return 0.0;
  const auto& t = *p.tail();
  return std::norm(t.scale) *
         boost::math::trigamma(static_cast<double>(p.degree()) + 1.0 + t.offset);
}

enum class GridPurpose { sup_estimation, plotting };

class EvaluationDiskGrid {
 public:
  EvaluationDiskGrid(std::vector<double> radii, std::vector<double> angles,
                     GridPurpose purpose = GridPurpose::sup_estimation)
      : radii_(std::move(radii)), angles_(std::move(angles)), purpose_(purpose) {
    if (radii_.empty() || angles_.empty()) throw std::invalid_argument("EvaluationDiskGrid: empty grid");
    for (std::size_t i = 0; i < radii_.size(); ++i) {
      if (!(radii_[i] >= 0.0 && radii_[i] < 1.0)) throw DomainError("EvaluationDiskGrid: radius outside [0,1)");
      if (i > 0 && !(radii_[i] > radii_[i - 1])) throw std::invalid_argument("EvaluationDiskGrid: radii must increase");
    }
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      if (!(angles_[i] >= 0.0 && angles_[i] < 2.0 * std::numbers::pi)) {
        throw DomainError("EvaluationDiskGrid: angle outside [0,2pi)");
      }
      if (i > 0 && !(angles_[i] > angles_[i - 1])) throw std::invalid_argument("EvaluationDiskGrid: angles must increase");
    }
  }

  /// n_r radii equally spaced on [r_max/n_r, r_max], n_theta equally spaced angles.
  static EvaluationDiskGrid uniform(std::size_t n_r, std::size_t n_theta, double r_max,
                                    GridPurpose purpose = GridPurpose::sup_estimation) {
    std::vector<double> r(n_r), t(n_theta);
    for (std::size_t i = 0; i < n_r; ++i) r[i] = r_max * static_cast<double>(i + 1) / static_cast<double>(n_r);
    for (std::size_t j = 0; j < n_theta; ++j) {
      t[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_theta);
    }
    return EvaluationDiskGrid(std::move(r), std::move(t), purpose);
  }

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& angles() const { return angles_; }
  GridPurpose purpose() const { return purpose_; }
  std::size_t size() const { return radii_.size() * angles_.size(); }

  template <typename F>
  void for_each(F&& f) const {
    for (double r : radii_) {
      for (double t : angles_) f(std::polar(r, t));
    }
  }

 private:
  std::vector<double> radii_;
  std::vector<double> angles_;
  GridPurpose purpose_;
};

/// max |p| over the grid: a lower bound for the sup norm on the disc.
inline double sup_modulus_estimate(const TaylorPolynomial& p, const EvaluationDiskGrid& grid) {
  double best = 0.0;
  grid.for_each([&](cplx z) { best = std::max(best, std::abs(detail::horner(p.coeffs(), z))); });
  return best;
}

/// f = head + c log(1/(1-z)). A declared tail c/(n+s) is absorbed into the
/// logarithm, so head_n = a_n - c/n for 1 <= n <= N; the part of head beyond N,
/// -c s/(n(n+s)), is dropped (O(1/N) in the norms used here). Without a tail,
/// head is the polynomial itself and c = 0.
class LogSplitSeries {
 public:
  explicit LogSplitSeries(const TaylorPolynomial& p) {
    std::vector<cplx> h(p.coeffs().begin(), p.coeffs().end());
    if (p.tail()) {
      c_ = p.tail()->scale;
      for (std::size_t n = 1; n < h.size(); ++n) h[n] -= c_ / static_cast<double>(n);
    }
    while (h.size() > 1 && h.back() == cplx{}) h.pop_back();
    head_ = TaylorPolynomial(std::move(h));
    dhead_ = differentiate(head_);
  }

  const TaylorPolynomial& head() const { return head_; }
  cplx log_scale() const { return c_; }
  bool has_log() const { return c_ != cplx{}; }

  cplx value(cplx z) const {
    detail::require_inside_disc(z, "LogSplitSeries::value");
    cplx v = detail::horner(head_.coeffs(), z);
    if (has_log()) v -= c_ * std::log(1.0 - z);
    return v;
  }

  /// f'(z); one_minus_z = 1 - z supplied by callers that know it more accurately.
  cplx derivative(cplx z, cplx one_minus_z) const {
    cplx v = detail::horner(dhead_.coeffs(), z);
    if (has_log()) v += c_ / one_minus_z;
    return v;
  }
  cplx derivative(cplx z) const { return derivative(z, 1.0 - z); }

  /// M_q(r, f').
  double derivative_hardy_mean(double r, double q) const {
    if (!has_log()) return hardy_mean(dhead_, r, q);
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("hardy_mean: radius must lie in [0,1)");
    if (!(q >= 1.0)) throw DomainError("hardy_mean: exponent q must be >= 1");
    if (r == 0.0) return std::abs(dhead_[0] + c_);
    const double t = (1.0 - r) * (1.0 + r);
    if (q == 2.0) {
      // coefficients dhead_n + c, then c alone beyond the head
      CompensatedSum s;
      double r2n = 1.0;
      for (std::size_t n = 0; n <= dhead_.degree(); ++n) {
        s.add(std::norm(dhead_[n] + c_) * r2n);
        r2n *= r * r;
      }
      s.add(std::norm(c_) * r2n / t);
      return std::sqrt(s.value());
    }
    std::size_t m = 256;
    const double need = std::max(4.0 * static_cast<double>(dhead_.degree()), 64.0 / (1.0 - r));
    while (static_cast<double>(m) < need) m *= 2;
    const auto vals = circle_samples(dhead_, r, m);
    CompensatedSum s;
    for (std::size_t j = 0; j < m; ++j) {
      const cplx z = std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
      s.add(std::pow(std::abs(vals[j] + c_ / (1.0 - z)), q));
    }
    return std::pow(s.value() / static_cast<double>(m), 1.0 / q);
  }

 private:
  TaylorPolynomial head_;
  TaylorPolynomial dhead_;
  cplx c_{0.0, 0.0};
};

// Named series.

/// log(1/(1-z)) = sum_{n>=1} z^n / n.
inline TaylorPolynomial log_series(std::size_t degree = kDefaultDegree) {
  std::vector<cplx> a(degree + 1, 0.0);
  for (std::size_t n = 1; n <= degree; ++n) a[n] = 1.0 / static_cast<double>(n);
  return TaylorPolynomial(std::move(a), CoefficientTail{1.0, 0.0});
}

/// H(1)(z) = (1/z) log(1/(1-z)) = sum z^n / (n+1). Also equals C(1).
inline TaylorPolynomial hilbert_one_series(std::size_t degree = kDefaultDegree) {
  std::vector<cplx> a(degree + 1);
  for (std::size_t n = 0; n <= degree; ++n) a[n] = 1.0 / static_cast<double>(n + 1);
  return TaylorPolynomial(std::move(a), CoefficientTail{1.0, 1.0});
}

/// 1/(1-z).
inline TaylorPolynomial geometric_series(std::size_t degree = kDefaultDegree) {
  return TaylorPolynomial(std::vector<cplx>(degree + 1, 1.0));
}

}  // namespace hilbertop
