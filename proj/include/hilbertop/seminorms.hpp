#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_dilog.h>

#include "measures.hpp"
#include "mobius.hpp"
#include "quadrature.hpp"
#include "series.hpp"
#include "summation.hpp"

namespace hilbertop {

enum class NormMethod { garsia, area, u_form, v_form, formula };

inline const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::garsia: return "garsia";
    case NormMethod::area: return "area";
    case NormMethod::u_form: return "u-form";
    case NormMethod::v_form: return "v-form";
    case NormMethod::formula: return "formula";
  }
  return "?";
}

/// norm_value = point_evaluation_part + sqrt(sup_part.value).
struct SeminormReport {
  double norm_value = 0.0;
  double point_evaluation_part = 0.0;
  SupResult sup_part;
  NormMethod method = NormMethod::garsia;
};

namespace detail {

inline SeminormReport make_report(double f0, SupResult sup, NormMethod m) {
  sup.value = std::max(sup.value, 0.0);
  SeminormReport r;
  r.point_evaluation_part = f0;
  r.norm_value = f0 + std::sqrt(sup.value);
  r.sup_part = std::move(sup);
  r.method = m;
  return r;
}

inline SeminormReport constant_report(const TaylorPolynomial& f, NormMethod m) {
  SupResult s;
  s.converged = true;
  return make_report(std::abs(f[0]), s, m);
}

inline cplx dilog(cplx w) {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
  gsl_sf_result re, im;
  if (gsl_sf_complex_dilog_xy_e(w.real(), w.imag(), &re, &im) != GSL_SUCCESS) {
    throw NonFiniteError("dilogarithm failed at " + format_point(w));
  }
  return {re.val, im.val};
}

// 1 - |a|^{2n} for n >= 1, accurate when |a| is near 0 or 1.
class OneMinusPower {
 public:
  explicit OneMinusPower(cplx a) : lx_(std::log1p(-gap(a))) {}
  double operator()(std::size_t n) const { return -std::expm1(static_cast<double>(n) * lx_); }

 private:
  double lx_;
};

// psi[n] = sum_{j>=1} b^j / (n + j), n = 0..d. Forward recurrence from
// psi[0] = -log(1-b) while |b|^{-d} stays small, otherwise backward from far
// out where the start value no longer matters.
inline std::vector<cplx> lerch_tail(cplx b, std::size_t d) {
  std::vector<cplx> psi(d + 1, 0.0);
  const double rb = std::abs(b);
  if (rb == 0.0) return psi;
  const double decay = -std::log(rb);
  if (static_cast<double>(d) * decay <= 5.0) {
    psi[0] = -std::log(1.0 - b);
    for (std::size_t n = 1; n <= d; ++n) psi[n] = psi[n - 1] / b - 1.0 / static_cast<double>(n);
    return psi;
  }
  const std::size_t far = d + static_cast<std::size_t>(std::ceil(40.0 / decay));
  cplx v = b / ((static_cast<double>(far) + 1.0) * (1.0 - b));
  for (std::size_t n = far; n > d; --n) v = b * (1.0 / static_cast<double>(n) + v);
  psi[d] = v;
  for (std::size_t n = d; n >= 1; --n) psi[n - 1] = b * (1.0 / static_cast<double>(n) + psi[n]);
  return psi;
}

// Garsia functional of a polynomial as sum_m (1 - |a|^{2m}) conj(h_m) (2 S_m - h_m)
// with S_m = sum_{n>=m} h_n a^{n-m}; every term carries its own 1 - |a|^{2m}.
inline double garsia_polynomial(std::span<const cplx> h, cplx a) {
  const OneMinusPower om(a);
  CompensatedSum g;
  cplx tail_sum = 0.0;
  for (std::size_t m = h.size(); m-- > 1;) {
    tail_sum = h[m] + a * tail_sum;
    g.add(om(m) * (std::conj(h[m]) * (2.0 * tail_sum - h[m])).real());
  }
  return g.value();
}

// P[h conj(l)](a) - h(a) conj(l(a)) for l = log(1/(1-z)).
inline cplx garsia_cross_log(std::span<const cplx> h, cplx a) {
  if (h.size() < 2) return 0.0;
  const std::size_t d = h.size() - 1;
  const OneMinusPower om(a);
  const auto psi = lerch_tail(std::conj(a), d);
  CompensatedComplexSum s;
  cplx q = 0.0;
  for (std::size_t n = 1; n <= d; ++n) {
    const double w = om(n);
    q = a * q + w / static_cast<double>(n);
    s.add(h[n] * (q + w * psi[n]));
  }
  return s.value();
}

// Garsia functional of log(1/(1-z)): |log(1 - conj(a) z) - log(1 + u z)|^2 in H^2
// with u = (1 - conj(a))/(1 - a), i.e. pi^2/6 + Li2(|a|^2) - 2 Re Li2(-u a).
inline double garsia_log(cplx a) {
  const double x = std::norm(a);
  const cplx u = (1.0 - std::conj(a)) / (1.0 - a);
  return std::numbers::pi * std::numbers::pi / 6.0 + gsl_sf_dilog(x) - 2.0 * dilog(-u * a).real();
}

}  // namespace detail

/// Garsia functional P[|f|^2](a) - |f(a)|^2. A series with a declared tail is
/// evaluated as head + c log(1/(1-z)), the logarithm and the cross term in
/// closed form.
class GarsiaFunctional {
 public:
  explicit GarsiaFunctional(const TaylorPolynomial& f) : split_(f) {}

  double operator()(cplx a) const {
    detail::require_inside_disc(a, "garsia_functional");
    const auto h = split_.head().coeffs();
    double v = detail::garsia_polynomial(h, a);
    if (split_.has_log()) {
      const cplx c = split_.log_scale();
      v += std::norm(c) * detail::garsia_log(a);
      v += 2.0 * (std::conj(c) * detail::garsia_cross_log(h, a)).real();
    }
    return v;
  }

 private:
  LogSplitSeries split_;
};

inline double garsia_functional(const TaylorPolynomial& f, cplx a) {
  detail::require_inside_disc(a, "garsia_functional");
  return GarsiaFunctional(f)(a);
}

namespace detail {

inline bool is_constant_function(const TaylorPolynomial& f) { return f.is_constant() && !f.tail(); }

// |(f o psi)'(zeta)|^2 for an automorphism psi.
inline double pulled_back_energy(const LogSplitSeries& f, const DiscAutomorphism& psi, cplx zeta) {
  return std::norm(f.derivative(psi(zeta), psi.complement(zeta)) * psi.derivative(zeta));
}

// Rule for int |(f o sigma_b)'(w)|^2 rho(|w|) dA(w): peaks at arg b (where
// |sigma_b'| is largest), at the antipode, and where sigma_b sends 1 if f
// carries a logarithm.
inline DiscRule pulled_back_rule(DiscRule rule, cplx b, bool log_peak) {
  rule.wedge_angles.clear();
  if (std::abs(b) > 1e-12) {
    rule.wedge_angles = {std::arg(b), std::arg(b) + std::numbers::pi};
  }
  if (log_peak) rule.wedge_angles.push_back(std::arg(sigma(b, 1.0)));
  return rule;
}

inline DiscRule default_area_rule() {
  DiscRule r;
  r.radial = interval_rule(128);
  r.angular_count = 256;
  r.shell_nodes = 12;
  return r;
}

}  // namespace detail

/// int |f'(z)|^2 log |(1 - conj(a) z)/(a - z)|^2 dA, computed after z = sigma_a(w)
/// so the logarithmic singularity sits at the origin.
inline double bmoa_area_functional(const TaylorPolynomial& f, cplx a, DiscRule rule = detail::default_area_rule()) {
  detail::require_inside_disc(a, "bmoa_area_functional");
  if (detail::is_constant_function(f)) return 0.0;
  const LogSplitSeries df(f);
  const DiscAutomorphism s(1.0, a);
  rule = detail::pulled_back_rule(std::move(rule), a, df.has_log());
  rule.origin = SingularityHint::log_at(Endpoint::left);
  return integrate_disc_rings([](double r) { return -2.0 * std::log(r); },
                              [&](cplx w) { return detail::pulled_back_energy(df, s, w); }, rule);
}

/// int |f'(z)|^2 (1 - |sigma_a(z)|^2)^p dA.
inline double qp_functional(const TaylorPolynomial& f, cplx a, double p, DiscRule rule = detail::default_area_rule()) {
  detail::require_inside_disc(a, "qp_functional");
  if (!(p > 0.0)) throw DomainError("qp_functional: p must be positive");
  if (detail::is_constant_function(f)) return 0.0;
  const LogSplitSeries df(f);
  const DiscAutomorphism s(1.0, a);
  rule = detail::pulled_back_rule(std::move(rule), a, df.has_log());
  if (p < 1.0) rule.rim = SingularityHint::power_at(Endpoint::right, p);
  return integrate_disc_rings([p](double r, double g1) { return std::pow(g1 * (1.0 + r), p); },
                              [&](cplx w) { return detail::pulled_back_energy(df, s, w); }, rule);
}

/// |f(0)| + sqrt(sup_a Garsia(f, a)).
inline SeminormReport bmoa_norm(const TaylorPolynomial& f, const SupSearchConfig& config = {}) {
  if (detail::is_constant_function(f)) return detail::constant_report(f, NormMethod::garsia);
  const GarsiaFunctional g(f);
  return detail::make_report(std::abs(f[0]), sup_over_disc(g, config, false), NormMethod::garsia);
}

/// |f(0)| + sqrt(sup_a qp_functional(f, a, p)).
inline SeminormReport qp_norm(const TaylorPolynomial& f, double p, const SupSearchConfig& config = {},
                              const DiscRule& rule = detail::default_area_rule()) {
  if (!(p > 0.0)) throw DomainError("qp_norm: p must be positive");
  if (detail::is_constant_function(f)) return detail::constant_report(f, NormMethod::area);
  const auto sup = sup_over_disc([&](cplx a) { return qp_functional(f, a, p, rule); }, config, false);
  return detail::make_report(std::abs(f[0]), sup, NormMethod::area);
}

enum class PotentialForm { u, v };

namespace detail {

inline SingularityHint potential_origin_hint(const RadialMeasure& m, PotentialForm form) {
  if (form == PotentialForm::v) return {};
  const bool atom_at_origin =
      std::any_of(m.atoms.begin(), m.atoms.end(), [](const CircleAtom& c) { return c.radius == 0.0; });
  return atom_at_origin ? SingularityHint::log_at(Endpoint::left) : SingularityHint{};
}

// U ~ t^{beta+2} at the rim for a density ~ t^beta, against a kernel whose
// circular mean grows like 1/t.
inline SingularityHint potential_rim_hint(const RadialMeasure& m) {
  if (!m.density) return SingularityHint::log_at(Endpoint::right);
  const double e = m.boundary_exponent + 1.0;
  if (e >= 0.0) return SingularityHint::log_at(Endpoint::right);
  return SingularityHint::power_at(Endpoint::right, std::max(e, -0.9));
}

inline void require_nontrivial(const MeasureDescriptor& mu, const char* what) {
  const auto tm = total_moment(mu);
  if (!tm.finite) throw DomainError(std::string(what) + ": the measure has infinite total moment (trivial space)");
  if (tm.value == 0.0) throw DomainError(std::string(what) + ": zero measure");
}

// Radial potential sampled once per radial node of the rule.
struct RingPotential {
  std::vector<WeightedNode> nodes;
  std::vector<double> values;
};

inline RingPotential ring_potential(const RadialMeasure& m, const DiscRule& rule, PotentialForm form) {
  RingPotential rp;
  rp.nodes = rule.radial_nodes();
  rp.values = parallel_map<double>(rp.nodes.size(), [&](std::size_t i) {
    const auto& nd = rp.nodes[i];
    return form == PotentialForm::u ? potential_u_radial(m, nd.x, nd.gap) : potential_v_radial(m, nd.x, nd.gap);
  });
  return rp;
}

inline DiscRule radial_potential_rule(const RadialMeasure& m, DiscRule rule, PotentialForm form) {
  rule.origin = potential_origin_hint(m, form);
  rule.rim = potential_rim_hint(m);
  rule.breakpoints.clear();
  for (const auto& a : m.atoms) {
    if (a.radius > 0.0) rule.breakpoints.push_back(a.radius);
  }
  return rule;
}

// int |(f o psi)'(zeta)|^2 P(|zeta|) dA(zeta) with P cached on the rule's rings.
inline double ring_functional(const LogSplitSeries& df, const DiscAutomorphism& psi, const RingPotential& rp,
                              DiscRule rule) {
  const auto rings = parallel_map<double>(rp.nodes.size(), [&](std::size_t i) {
    const auto& rn = rp.nodes[i];
    if (rp.values[i] == 0.0) return 0.0;
    CompensatedSum ring;
    for (const auto& an : rule.angular_nodes(rn.x)) {
      const cplx z = std::polar(rn.x, an.x);
      const double v = pulled_back_energy(df, psi, z);
      if (!std::isfinite(v)) report_non_finite(z);
      ring.add(an.w * v);
    }
    return rn.w * rp.values[i] * ring.value();
  });
  CompensatedSum total;
  for (double v : rings) total.add(v);
  return total.value();
}

inline std::vector<double> ring_wedges(const DiscAutomorphism& phi) {
  const cplx b = phi.inverse().a();
  std::vector<double> w;
  if (std::abs(b) > 1e-12) w = {std::arg(b), std::arg(b) + std::numbers::pi};
  w.push_back(std::arg(phi(1.0 - 1e-15)));
  return w;
}

}  // namespace detail

/// Integral of |f'(w)|^2 U_mu(phi(w)) dA(w) (or V_mu with the v form).
/// Radial measures are integrated in zeta = phi(w); for atoms p_j the integral
/// splits into area functionals at phi^{-1}(p_j).
inline double mdmu_functional(const TaylorPolynomial& f, const DiscAutomorphism& phi, const MeasureDescriptor& mu,
                              DiscRule rule = detail::default_area_rule(), PotentialForm form = PotentialForm::u) {
  detail::require_nontrivial(mu, "mdmu_functional");
  if (detail::is_constant_function(f)) return 0.0;
  const auto psi = phi.inverse();
  if (auto m = mu.radial_view()) {
    const LogSplitSeries df(f);
    rule = detail::radial_potential_rule(*m, std::move(rule), form);
    rule.wedge_angles = detail::ring_wedges(phi);
    const auto rp = detail::ring_potential(*m, rule, form);
    return detail::ring_functional(df, psi, rp, rule);
  }
  const auto& at = mu.atoms();
  CompensatedSum s;
  for (std::size_t j = 0; j < at.points.size(); ++j) {
    const cplx b = psi(at.points[j]);
    s.add(at.masses[j] * (form == PotentialForm::u ? bmoa_area_functional(f, b, rule) : qp_functional(f, b, 1.0, rule)));
  }
  return s.value();
}

/// |f(0)| + sqrt(sup over automorphisms of the U-form functional). Radial
/// measures drop the rotation and search a in the disc (real axis when the
/// configuration leaves the choice open); atomic measures sample eight
/// rotations and evaluate each atom term through the Garsia functional.
inline SeminormReport mdmu_norm(const TaylorPolynomial& f, const MeasureDescriptor& mu,
                                const SupSearchConfig& config = {}, DiscRule rule = detail::default_area_rule()) {
  detail::require_nontrivial(mu, "mdmu_norm");
  if (detail::is_constant_function(f)) return detail::constant_report(f, NormMethod::u_form);
  if (auto m = mu.radial_view()) {
    const LogSplitSeries df(f);
    rule = detail::radial_potential_rule(*m, std::move(rule), PotentialForm::u);
    const auto rp = detail::ring_potential(*m, rule, PotentialForm::u);
    auto fn = [&](cplx a) {
      const DiscAutomorphism phi(1.0, a);
      DiscRule r = rule;
      r.wedge_angles = detail::ring_wedges(phi);
      return detail::ring_functional(df, phi.inverse(), rp, r);
    };
    return detail::make_report(std::abs(f[0]), sup_over_disc(fn, config, true), NormMethod::u_form);
  }
  const GarsiaFunctional g(f);
  const auto& at = mu.atoms();
  SupResult best;
  best.value = -std::numeric_limits<double>::infinity();
  bool all_converged = true;
  for (int k = 0; k < 8; ++k) {
    const cplx lambda = std::polar(1.0, 2.0 * std::numbers::pi * k / 8.0);
    auto fn = [&](cplx a) {
      const auto psi = DiscAutomorphism(lambda, a).inverse();
      CompensatedSum s;
      for (std::size_t j = 0; j < at.points.size(); ++j) s.add(at.masses[j] * g(psi(at.points[j])));
      return s.value();
    };
    auto r = sup_over_disc(fn, config, false);
    all_converged = all_converged && r.converged;
    const std::size_t evals = best.evaluations + r.evaluations;
    if (r.value > best.value) best = r;
    best.evaluations = evals;
  }
  best.converged = all_converged;
  return detail::make_report(std::abs(f[0]), best, NormMethod::u_form);
}

struct LadderPoint {
  double radius;
  double value;
};

struct LogNormResult {
  double value = 0.0;              // integral over the disc; +inf when divergent
  std::vector<LadderPoint> ladder;  // truncated integrals over |z| < R
  bool divergent = false;
  double last_growth = 0.0;
};

/// int 4 / |1 - z^2|^2 U_mu(z) dA for radial mu, refined toward z = +-1. An
/// R-ladder checks convergence with the same 10% growth rule as the
/// boundedness test.
inline LogNormResult log_norm_sq_formula(const MeasureDescriptor& mu, DiscRule rule = {},
                                         std::vector<int> ladder_exponents = {2, 3, 4, 5, 6}) {
  const auto m = mu.radial_view();
  if (!m) throw std::invalid_argument("log_norm_sq_formula: the measure must be radial");
  if (ladder_exponents.size() < 3) throw std::invalid_argument("log_norm_sq_formula: need at least three rungs");
  rule = detail::radial_potential_rule(*m, std::move(rule), PotentialForm::u);
  rule.wedge_angles = {0.0, std::numbers::pi};
  // |1 - z^2|^2 = G^2 cos^2 t + (2 - G)^2 sin^2 t with G = 1 - r^2; the wedges
  // sit at 0 and pi, so sin^2 t = sin^2 of the offset.
  const auto kernel = [](const RingPoint& pt) {
    const double g = pt.gap * (1.0 + pt.r);
    const double s = std::sin(pt.offset), c = std::cos(pt.offset);
    return 4.0 / (g * g * c * c + (2.0 - g) * (2.0 - g) * s * s);
  };
  const auto ring = [&](double r, double g1) { return potential_u_radial(*m, r, g1); };
  LogNormResult out;
  for (int k : ladder_exponents) {
    DiscRule r = rule;
    r.radius = 1.0 - std::pow(10.0, -k);
    r.grade_toward_rim = true;
    out.ladder.push_back({r.radius, integrate_disc_rings(ring, kernel, r)});
  }
  const std::size_t n = out.ladder.size();
  const double v1 = out.ladder[n - 1].value, v0 = out.ladder[n - 2].value, vm = out.ladder[n - 3].value;
  out.last_growth = (v1 - v0) / v0;
  const bool contracting = (v1 - v0) < (v0 - vm);
  const bool rim_integrable = !m->density || m->boundary_exponent + 1.0 > -1.0;
  if (!std::isfinite(v1) || out.last_growth >= 0.10 || !contracting || !rim_integrable) {
    out.divergent = out.last_growth >= 0.10 || !contracting || !std::isfinite(v1);
    out.value = out.divergent ? std::numeric_limits<double>::infinity() : v1;
    return out;
  }
  out.value = integrate_disc_rings(ring, kernel, rule);
  return out;
}

/// 1 + sqrt(int 4/|1-z^2|^2 U_mu dA), the common norm of the Hilbert and
/// Cesaro operators from H^infinity into M(D_mu).
inline double hilbert_norm_hinf_mdmu(const MeasureDescriptor& mu, const BoundednessConfig& cfg = {}) {
  const auto check = boundedness_check(mu, cfg);
  if (check.verdict == Verdict::divergent) {
    throw DomainError("hilbert_norm_hinf_mdmu: the condition integral diverges (growth " +
                      std::to_string(check.max_growth) + "), so the operator is unbounded for this measure");
  }
  const auto r = log_norm_sq_formula(mu);
  if (r.divergent) throw DomainError("hilbert_norm_hinf_mdmu: the norm integral diverges");
  return 1.0 + std::sqrt(r.value);
}

/// Radii 1 - 10^{-k/5}, k = 1..20, reaching 1 - 1e-4.
inline std::vector<double> default_lambda_radii() {
  std::vector<double> r;
  for (int k = 1; k <= 20; ++k) r.push_back(1.0 - std::pow(10.0, -k / 5.0));
  return r;
}

struct LambdaProfile {
  double value;
  std::vector<double> radii;
  std::vector<double> profile;  // M_p(r, f') (1 - r^2)^{1 - 1/p}
};

inline LambdaProfile lambda_profile(const TaylorPolynomial& f, double p,
                                    const std::vector<double>& r_grid = default_lambda_radii()) {
  if (!(p > 1.0)) throw DomainError("lambda_norm: p must exceed 1");
  if (r_grid.empty()) throw std::invalid_argument("lambda_norm: empty radius grid");
  const LogSplitSeries split(f);
  LambdaProfile out{std::abs(f[0]), r_grid, {}};
  double best = 0.0;
  for (double r : r_grid) {
    const double t = (1.0 - r) * (1.0 + r);
    const double v = split.derivative_hardy_mean(r, p) * std::pow(t, 1.0 - 1.0 / p);
    out.profile.push_back(v);
    best = std::max(best, v);
  }
  out.value += best;
  return out;
}

/// |f(0)| + max over the grid of M_p(r, f') (1 - r^2)^{1 - 1/p}.
inline double lambda_norm(const TaylorPolynomial& f, double p,
                          const std::vector<double>& r_grid = default_lambda_radii()) {
  return lambda_profile(f, p, r_grid).value;
}

/// |sum_j m_j Garsia(f, p_j) - int |f'|^2 U_mu dA| for an atomic measure, the
/// right side by quadrature atom by atom.
inline double lp_identity_residual(const TaylorPolynomial& f, const AtomicMeasure& mu,
                                   const DiscRule& rule = detail::default_area_rule()) {
  mu.validate();
  const GarsiaFunctional g(f);
  CompensatedSum lhs, rhs;
  for (std::size_t j = 0; j < mu.points.size(); ++j) {
    lhs.add(mu.masses[j] * g(mu.points[j]));
    rhs.add(mu.masses[j] * bmoa_area_functional(f, mu.points[j], rule));
  }
  return std::abs(lhs.value() - rhs.value());
}

}  // namespace hilbertop
