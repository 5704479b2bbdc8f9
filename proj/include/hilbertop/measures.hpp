#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mobius.hpp"
#include "quadrature.hpp"
#include "summation.hpp"

namespace hilbertop {

/// Radial function f(r, t) with t = 1 - r^2 passed separately for accuracy.
using RadialFunction = std::function<double(double r, double t)>;

struct CircleAtom {
  double radius;
  double mass;
};

/// mu = -Laplace(g) dA with g(1) = 0; g and g' are used for closed-form
/// boundary tails of radial integrals (Green's identity on an annulus).
struct LaplacianProfile {
  RadialFunction g;
  RadialFunction dg;
};

/// d mu = density(|z|) dA(z) plus uniform circle atoms.
struct RadialMeasure {
  RadialFunction density;
  double boundary_exponent = 0.0;  // density ~ (1-r)^boundary_exponent
  std::vector<CircleAtom> atoms;
  std::optional<LaplacianProfile> profile;

  bool has_density() const { return static_cast<bool>(density); }

  double density_at(double r) const {
    if (!density) return 0.0;
    return density(r, (1.0 - r) * (1.0 + r));
  }

  void validate() const {
    for (const auto& a : atoms) {
      if (!(a.radius >= 0.0 && a.radius < 1.0)) throw DomainError("RadialMeasure: atom radius outside [0,1)");
      if (!(a.mass > 0.0)) throw DomainError("RadialMeasure: atom mass must be positive");
    }
  }

  bool trivially_zero() const { return !density && atoms.empty(); }

  RadialMeasure scaled(double c) const {
    if (!(c > 0.0)) throw DomainError("RadialMeasure: scale must be positive");
    RadialMeasure m = *this;
    if (density) {
      auto d = density;
      m.density = [d, c](double r, double t) { return c * d(r, t); };
    }
    for (auto& a : m.atoms) a.mass *= c;
    if (profile) {
      auto g = profile->g;
      auto dg = profile->dg;
      m.profile = LaplacianProfile{[g, c](double r, double t) { return c * g(r, t); },
                                   [dg, c](double r, double t) { return c * dg(r, t); }};
    }
    return m;
  }
};

struct AtomicMeasure {
  std::vector<cplx> points;
  std::vector<double> masses;

  void validate() const {
    if (points.size() != masses.size()) throw std::invalid_argument("AtomicMeasure: points and masses differ in length");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(std::abs(points[i]) < 1.0)) throw DomainError("AtomicMeasure: point outside the unit disc");
      if (!(masses[i] > 0.0)) throw DomainError("AtomicMeasure: masses must be positive");
    }
  }

  AtomicMeasure scaled(double c) const {
    AtomicMeasure m = *this;
    for (auto& x : m.masses) x *= c;
    return m;
  }
};

enum class MeasureKind { radial, atomic, qp, remark };

inline const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::radial: return "radial";
    case MeasureKind::atomic: return "atomic";
    case MeasureKind::qp: return "qp";
    case MeasureKind::remark: return "remark";
  }
  return "?";
}

/// Registry entry for user-facing radial densities.
struct ProfileSpec {
  std::string name;            // constant | power | log-power
  std::vector<double> params;  // see make_profile_density
};

// Named families.

/// mu_p = -Laplace[(1-|z|^2)^p] dA, 0 < p < 1.
inline RadialMeasure qp_measure(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("qp_measure: p must lie in (0,1)");
  RadialMeasure m;
  m.density = [p](double r, double t) { return 4.0 * p * (1.0 - p * r * r) * std::pow(t, p - 2.0); };
  m.boundary_exponent = p - 2.0;
  m.profile = LaplacianProfile{[p](double, double t) { return std::pow(t, p); },
                               [p](double r, double t) { return -2.0 * p * r * std::pow(t, p - 1.0); }};
  return m;
}

/// f(r) = (log(e^{1+a} / (1-r^2)))^{-a}.
inline double remark_profile(double a, double r) {
  const double t = (1.0 - r) * (1.0 + r);
  return std::pow(1.0 + a - std::log(t), -a);
}

/// Measure -Laplace(f) dA for the profile above, a > 0. The density is
/// 4a L^{-a-2} (L - (a+1) r^2) / (1-r^2)^2 with L = 1 + a + log(1/(1-r^2)).
inline RadialMeasure remark_measure(double a) {
  if (!(a > 0.0)) throw DomainError("remark_measure: a must be positive");
  RadialMeasure m;
  m.density = [a](double r, double t) {
    const double L = 1.0 + a - std::log(t);
    return 4.0 * a * std::pow(L, -a - 2.0) * (L - (a + 1.0) * r * r) / (t * t);
  };
  m.boundary_exponent = -2.0;
  m.profile = LaplacianProfile{[a](double, double t) { return std::pow(1.0 + a - std::log(t), -a); },
                               [a](double r, double t) {
                                 const double L = 1.0 + a - std::log(t);
                                 return -2.0 * a * r * std::pow(L, -a - 1.0) / t;
                               }};
  for (int k = 0; k <= 400; ++k) {
    const double r = k < 200 ? k / 200.0 : 1.0 - std::pow(10.0, -1.0 - 14.0 * (k - 200) / 200.0);
    const double d = m.density_at(r);
    if (!(d >= -1e-10)) {
      throw std::logic_error("remark_measure: negative density at r = " + std::to_string(r));
    }
  }
  return m;
}

/// constant {c}: c; power {c, beta}: c (1-r^2)^beta;
/// log-power {c, beta, gamma}: c (1-r^2)^beta (1 + log(1/(1-r^2)))^gamma.
inline RadialMeasure make_profile_measure(const ProfileSpec& spec) {
  auto need = [&](std::size_t n) {
    if (spec.params.size() != n) {
      throw std::invalid_argument("profile '" + spec.name + "' expects " + std::to_string(n) + " parameters");
    }
  };
  RadialMeasure m;
  if (spec.name == "constant") {
    need(1);
    const double c = spec.params[0];
    m.density = [c](double, double) { return c; };
    m.boundary_exponent = 0.0;
  } else if (spec.name == "power") {
    need(2);
    const double c = spec.params[0], beta = spec.params[1];
    m.density = [c, beta](double, double t) { return c * std::pow(t, beta); };
    m.boundary_exponent = beta;
  } else if (spec.name == "log-power") {
    need(3);
    const double c = spec.params[0], beta = spec.params[1], gamma = spec.params[2];
    m.density = [c, beta, gamma](double, double t) {
      return c * std::pow(t, beta) * std::pow(1.0 - std::log(t), gamma);
    };
    m.boundary_exponent = beta;
  } else {
    throw std::invalid_argument("unknown density profile '" + spec.name + "'");
  }
  if (!(spec.params[0] >= 0.0)) throw DomainError("profile scale must be nonnegative");
  return m;
}

/// A positive measure on the disc: radial, atomic, or a named family.
class MeasureDescriptor {
 public:
  static MeasureDescriptor radial(RadialMeasure m, std::optional<ProfileSpec> spec = std::nullopt) {
    m.validate();
    MeasureDescriptor d(MeasureKind::radial, std::move(m));
    d.spec_ = std::move(spec);
    return d;
  }
  static MeasureDescriptor atomic(AtomicMeasure m) {
    m.validate();
    return MeasureDescriptor(MeasureKind::atomic, std::move(m));
  }
  static MeasureDescriptor unit_atom(cplx at = 0.0) { return atomic(AtomicMeasure{{at}, {1.0}}); }
  static MeasureDescriptor qp(double p) {
    MeasureDescriptor d(MeasureKind::qp, qp_measure(p));
    d.parameter_ = p;
    return d;
  }
  static MeasureDescriptor remark(double a) {
    MeasureDescriptor d(MeasureKind::remark, remark_measure(a));
    d.parameter_ = a;
    return d;
  }

  MeasureKind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  double scale() const { return scale_; }
  const std::optional<ProfileSpec>& profile_spec() const { return spec_; }

  bool is_atomic() const { return std::holds_alternative<AtomicMeasure>(body_); }
  const AtomicMeasure& atoms() const { return std::get<AtomicMeasure>(body_); }

  /// Radial form when one exists (atomic measures supported at the origin
  /// become a circle atom of radius 0).
  std::optional<RadialMeasure> radial_view() const {
    if (auto* r = std::get_if<RadialMeasure>(&body_)) return *r;
    const auto& a = atoms();
    double mass = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      if (a.points[i] != cplx{}) return std::nullopt;
      mass += a.masses[i];
    }
    RadialMeasure m;
    if (mass > 0.0) m.atoms.push_back({0.0, mass});
    return m;
  }

  bool is_radial() const { return radial_view().has_value(); }

  MeasureDescriptor scaled(double c) const {
    if (!(c > 0.0)) throw DomainError("MeasureDescriptor: scale must be positive");
    MeasureDescriptor d = *this;
    d.scale_ *= c;
    if (auto* r = std::get_if<RadialMeasure>(&d.body_)) {
      *r = r->scaled(c);
    } else {
      d.body_ = std::get<AtomicMeasure>(d.body_).scaled(c);
    }
    return d;
  }

 private:
  MeasureDescriptor(MeasureKind k, std::variant<RadialMeasure, AtomicMeasure> body)
      : kind_(k), body_(std::move(body)) {}

  MeasureKind kind_;
  std::variant<RadialMeasure, AtomicMeasure> body_;
  double parameter_ = 0.0;
  double scale_ = 1.0;
  std::optional<ProfileSpec> spec_;
};

namespace detail {

inline constexpr std::size_t kRadialNodes = 64;

inline double one_minus_sq(double r, double gap1) { return gap1 * (1.0 + r); }

inline double log_inverse(double r, double gap1) {
  return gap1 < 0.5 ? -std::log1p(-gap1) : -std::log(r);
}

// sum w f(s, 1 - s) over [lo, hi], hi_gap = 1 - hi > 0; graded toward 1 above 1/2.
template <typename F>
double integrate_below(F&& f, double lo, double hi, double hi_gap, std::size_t n = kRadialNodes) {
  CompensatedSum s;
  if (!(hi > lo)) return 0.0;
  const double mid = std::clamp(0.5, lo, hi);
  if (mid > lo) {
    for (const auto& nd : mapped_nodes(interval_rule(n), lo, mid)) s.add(nd.w * f(nd.x, nd.gap));
  }
  if (hi > mid) {
    for (const auto& nd : graded_toward_one_gap(n, mid, hi_gap)) s.add(nd.w * f(nd.x, nd.gap));
  }
  return s.value();
}

template <typename F>
double integrate_below(F&& f, double lo, double hi, std::size_t n = kRadialNodes) {
  return integrate_below(std::forward<F>(f), lo, hi, 1.0 - hi, n);
}

// sum w f(s, 1 - s) over [lo, 1] with the given behaviour at s = 1; lo_gap = 1 - lo.
template <typename F>
double integrate_to_rim(F&& f, double lo, double lo_gap, SingularityHint rim, std::size_t n = kRadialNodes) {
  CompensatedSum s;
  const double mid = std::max(lo, 0.5);
  const double mid_gap = mid > lo ? 0.5 : lo_gap;
  if (mid > lo) {
    for (const auto& nd : mapped_nodes(interval_rule(n), lo, mid)) s.add(nd.w * f(nd.x, nd.gap));
  }
  rim.side = Endpoint::right;
  const auto rule = interval_rule(n, rim);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = mid + mid_gap * rule.nodes[i];
    s.add(mid_gap * rule.weights[i] * f(std::min(x, 1.0), mid_gap * rule.complements[i]));
  }
  return s.value();
}

template <typename F>
double integrate_to_rim(F&& f, double lo, SingularityHint rim, std::size_t n = kRadialNodes) {
  return integrate_to_rim(std::forward<F>(f), lo, 1.0 - lo, rim, n);
}

inline SingularityHint density_rim_hint(const RadialMeasure& m, double extra) {
  const double e = m.boundary_exponent + extra;
  if (!(e > -1.0)) throw DomainError("radial integral diverges at the boundary (exponent <= -1)");
  return SingularityHint::power_at(Endpoint::right, e);
}

}  // namespace detail

/// U_mu(r) = int 2 log(1/max(r,s)) d mu_rad(s), r in (0,1); gap1 = 1 - r.
inline double potential_u_radial(const RadialMeasure& m, double r, double gap1) {
  if (!(r > 0.0 && r <= 1.0 && gap1 > 0.0)) throw DomainError("potential_u_radial: r must lie in (0,1)");
  const double lr = detail::log_inverse(r, gap1);
  CompensatedSum u;
  for (const auto& a : m.atoms) {
    u.add(a.radius <= r ? 2.0 * a.mass * lr
                        : 2.0 * a.mass * detail::log_inverse(a.radius, 1.0 - a.radius));
  }
  if (!m.density) return u.value();
  const auto dens = [&](double s, double g1) { return m.density(s, detail::one_minus_sq(s, g1)) * 2.0 * s; };
  const double inner = detail::integrate_below(dens, 0.0, r, gap1);
  u.add(2.0 * lr * inner);
  if (m.profile) {
    const double t = detail::one_minus_sq(r, gap1);
    u.add(4.0 * r * lr * m.profile->dg(r, t));
    u.add(4.0 * m.profile->g(r, t));
  } else {
    u.add(detail::integrate_to_rim(
        [&](double s, double g1) { return 2.0 * detail::log_inverse(s, g1) * dens(s, g1); }, r, gap1,
        detail::density_rim_hint(m, 1.0)));
  }
  return u.value();
}

inline double potential_u_radial(const RadialMeasure& m, double r) {
  return potential_u_radial(m, r, 1.0 - r);
}

/// V_mu(r) = (1-r^2) int (1-s^2)/(1-r^2 s^2) d mu_rad(s), the circular mean of
/// 1 - |sigma_z(w)|^2 over |w| = s being (1-r^2)(1-s^2)/(1-r^2 s^2).
inline double potential_v_radial(const RadialMeasure& m, double r, double gap1) {
  if (!(r >= 0.0 && r <= 1.0 && gap1 > 0.0)) throw DomainError("potential_v_radial: r must lie in [0,1)");
  const double tr = detail::one_minus_sq(r, gap1);
  const double r2 = r * r;
  const auto kt = [&](double, double ts) { return ts / (tr + r2 * ts); };
  CompensatedSum v;
  for (const auto& a : m.atoms) v.add(a.mass * kt(a.radius, (1.0 - a.radius) * (1.0 + a.radius)));
  if (m.density) {
    const auto f = [&](double s, double g1) {
      const double ts = detail::one_minus_sq(s, g1);
      return kt(s, ts) * m.density(s, ts) * 2.0 * s;
    };
    v.add(detail::integrate_below(f, 0.0, r, gap1));
    if (m.profile) {
      const auto lap = [&](double s, double g1) {
        const double ts = detail::one_minus_sq(s, g1);
        const double den = tr + r2 * ts;
        return m.profile->g(s, ts) * 4.0 * tr * (1.0 + r2 * s * s) / (den * den * den) * 2.0 * s;
      };
      v.add(detail::integrate_to_rim(lap, r, gap1, SingularityHint::log_at(Endpoint::right)));
      const double den_r = tr * (1.0 + r2);
      const double k_r = 1.0 / (1.0 + r2);
      const double dk_r = -2.0 * r * tr / (den_r * den_r);
      v.add(2.0 * r * (k_r * m.profile->dg(r, tr) - m.profile->g(r, tr) * dk_r));
    } else {
      v.add(detail::integrate_to_rim(f, r, gap1, detail::density_rim_hint(m, 1.0)));
    }
  }
  return tr * v.value();
}

inline double potential_v_radial(const RadialMeasure& m, double r) {
  return potential_v_radial(m, r, 1.0 - r);
}

struct MomentResult {
  double value;
  bool finite;
};

/// int (1 - |z|^2) d mu.
inline MomentResult total_moment(const MeasureDescriptor& mu, double cap = 1e12) {
  if (mu.is_atomic()) {
    CompensatedSum s;
    const auto& a = mu.atoms();
    for (std::size_t i = 0; i < a.points.size(); ++i) s.add(a.masses[i] * detail::gap(a.points[i]));
    return {s.value(), true};
  }
  const auto m = *mu.radial_view();
  CompensatedSum s;
  for (const auto& a : m.atoms) s.add(a.mass * (1.0 - a.radius) * (1.0 + a.radius));
  if (m.density) {
    const auto f = [&](double x, double g1) {
      const double t = detail::one_minus_sq(x, g1);
      return t * m.density(x, t) * 2.0 * x;
    };
    if (m.profile) {
      const double sc = 0.5, tc = 0.75;
      s.add(detail::integrate_below(f, 0.0, sc));
      s.add(detail::integrate_to_rim(
          [&](double x, double g1) { return 4.0 * m.profile->g(x, detail::one_minus_sq(x, g1)) * 2.0 * x; }, sc,
          SingularityHint::log_at(Endpoint::right)));
      s.add(2.0 * sc * (tc * m.profile->dg(sc, tc) + 2.0 * sc * m.profile->g(sc, tc)));
    } else {
      // truncation ladder: a non-Cauchy tail or runaway value means divergence
      std::vector<double> j;
      for (int k = 2; k <= 12; k += 2) j.push_back(detail::integrate_below(f, 0.0, 1.0 - std::pow(10.0, -k)));
      const double d1 = j[j.size() - 1] - j[j.size() - 2];
      const double d0 = j[j.size() - 2] - j[j.size() - 3];
      if (!(m.boundary_exponent > -2.0) || !(j.back() < cap) || (d0 > 0.0 && d1 >= 0.9 * d0)) {
        return {std::numeric_limits<double>::infinity(), false};
      }
      s.add(detail::integrate_to_rim(f, 0.0, detail::density_rim_hint(m, 1.0)));
    }
  }
  const double v = s.value();
  if (!std::isfinite(v) || v > cap) return {std::numeric_limits<double>::infinity(), false};
  return {v, true};
}

/// Options for the two-dimensional evaluation of the defining integral.
struct PotentialQuadrature {
  std::size_t radial_nodes = 48;    // per half of each ray
  std::size_t angular_nodes = 1024;
};

namespace detail {

// 1 - |sigma_z(w)|^2 given t_z = 1-|z|^2, t_w = 1-|w|^2; log kernel from it.
inline double log_kernel(double tz, double tw, cplx z, cplx w, double rho) {
  const double d = std::norm(1.0 - std::conj(z) * w);
  const double x = tz * tw / d;
  if (x < 0.5) return -std::log1p(-x);
  return std::log(d) - 2.0 * std::log(rho);
}

// Density part of U at z, integrating in polar coordinates centred at z.
inline double potential_u_density_2d(const RadialMeasure& m, cplx z, const PotentialQuadrature& q) {
  const double tz = gap(z);
  const auto left = interval_rule(q.radial_nodes, SingularityHint::log_at(Endpoint::left));
  const auto right = interval_rule(
      q.radial_nodes, SingularityHint::power_at(Endpoint::right, std::max(m.boundary_exponent + 1.0, -0.9)));
  CompensatedSum total;
  const std::size_t na = q.angular_nodes;
  for (std::size_t j = 0; j < na; ++j) {
    const double alpha = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(na);
    const cplx e = std::polar(1.0, alpha);
    const double b = (std::conj(z) * e).real();
    const double disc = std::sqrt(b * b + tz);
    const double rho_max = b > 0.0 ? tz / (b + disc) : disc - b;
    const double rho_minus = -tz / rho_max;
    const double half = 0.5 * rho_max;
    CompensatedSum ray;
    auto add = [&](double rho, double dist_to_rim, double w) {
      const cplx pt = z + rho * e;
      const double tw = dist_to_rim * (rho - rho_minus);
      const double rw = std::abs(pt);
      const double val = m.density(rw, tw) * log_kernel(tz, tw, z, pt, rho) * 2.0 * rho;
      if (!std::isfinite(val)) report_non_finite(pt);
      ray.add(w * val);
    };
    for (std::size_t i = 0; i < left.size(); ++i) {
      add(half * left.nodes[i], rho_max - half * left.nodes[i], half * left.weights[i]);
    }
    for (std::size_t i = 0; i < right.size(); ++i) {
      add(half + half * right.nodes[i], half * right.complements[i], half * right.weights[i]);
    }
    total.add(ray.value());
  }
  return total.value() / static_cast<double>(na);
}

// Mean over |w| = s of log_weight(w, z).
inline double circle_mean_log_weight(double s, cplx z, std::size_t shell_nodes = 16) {
  if (s == 0.0) return log_weight(0.0, z);
  DiscRule rule;
  rule.wedge_angles = {std::arg(z)};
  rule.shell_nodes = shell_nodes;
  const double delta = std::max(std::abs(std::abs(z) - s), 1e-15);
  CompensatedSum acc;
  for (const auto& nd : rule.angular_nodes_with_width(delta)) acc.add(nd.w * log_weight(std::polar(s, nd.x), z));
  return acc.value();
}

}  // namespace detail

/// U_mu(z) from its definition: an exact sum for atoms, two-dimensional
/// quadrature for radial densities.
inline double potential_u(const MeasureDescriptor& mu, cplx z, const PotentialQuadrature& q = {}) {
  detail::require_inside_disc(z, "potential_u");
  if (mu.is_atomic()) {
    const auto& a = mu.atoms();
    CompensatedSum s;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      if (a.points[i] == z) throw DomainError("potential_u: evaluation at an atom");
      s.add(a.masses[i] * log_weight(a.points[i], z));
    }
    return s.value();
  }
  const auto m = *mu.radial_view();
  CompensatedSum s;
  for (const auto& a : m.atoms) {
    if (a.radius == std::abs(z)) throw DomainError("potential_u: evaluation on an atom circle");
    s.add(a.mass * detail::circle_mean_log_weight(a.radius, z));
  }
  if (m.density) s.add(detail::potential_u_density_2d(m, z, q));
  return s.value();
}

/// V_mu(z) = int (1 - |sigma_z(w)|^2) d mu(w).
inline double potential_v(const MeasureDescriptor& mu, cplx z) {
  detail::require_inside_disc(z, "potential_v");
  if (mu.is_atomic()) {
    const auto& a = mu.atoms();
    CompensatedSum s;
    for (std::size_t i = 0; i < a.points.size(); ++i) s.add(a.masses[i] * hyperbolic_gap(a.points[i], z));
    return s.value();
  }
  const double r = std::abs(z);
  return potential_v_radial(*mu.radial_view(), r, 1.0 - r);
}

struct MomentTable {
  std::vector<double> moments;       // moments[n-1] = int_0^1 r^{2n+1} U(r) dr
  std::vector<double> partial_sums;  // running sums of the moments
};

/// Odd moments of the radial potential for n = 1..n_max.
inline MomentTable u_moments(const RadialMeasure& m, std::size_t n_max) {
  std::vector<double> cuts{0.0};
  std::vector<double> radii;
  for (const auto& a : m.atoms) radii.push_back(a.radius);
  std::sort(radii.begin(), radii.end());
  for (double r : radii) {
    if (r > cuts.back() + 1e-12) cuts.push_back(r);
  }
  cuts.push_back(1.0);
  const bool atom_at_origin = std::any_of(m.atoms.begin(), m.atoms.end(), [](const CircleAtom& a) { return a.radius == 0.0; });
  SingularityHint rim_hint = SingularityHint::power_at(Endpoint::right, 1.0);
  if (m.density) {
    const double e = std::min(m.boundary_exponent + 2.0, 1.0);
    rim_hint = e > 0.0 ? SingularityHint::power_at(Endpoint::right, e) : SingularityHint::log_at(Endpoint::right);
  }
  std::vector<WeightedNode> nodes;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    SingularityHint h;
    if (p == 0 && atom_at_origin) h = SingularityHint::log_at(Endpoint::left);
    if (p + 2 == cuts.size()) h = rim_hint;
    if (p == 0 && atom_at_origin && p + 2 == cuts.size()) {
      const double mid = 0.5;
      for (auto nd : mapped_nodes(interval_rule(detail::kRadialNodes, SingularityHint::log_at(Endpoint::left)), 0.0, mid)) nodes.push_back(nd);
      for (auto nd : mapped_nodes(interval_rule(detail::kRadialNodes, rim_hint), mid, 1.0)) nodes.push_back(nd);
      continue;
    }
    for (auto nd : mapped_nodes(interval_rule(detail::kRadialNodes, h), cuts[p], cuts[p + 1])) nodes.push_back(nd);
  }
  std::vector<double> u(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) u[i] = potential_u_radial(m, nodes[i].x, nodes[i].gap);
  MomentTable out;
  double running = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    CompensatedSum s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s.add(nodes[i].w * std::pow(nodes[i].x, 2.0 * static_cast<double>(n) + 1.0) * u[i]);
    }
    out.moments.push_back(s.value());
    running += s.value();
    out.partial_sums.push_back(running);
  }
  return out;
}

/// int_{|z|<R} V_mu(z) / |1 - conj(a) z|^2 dA(z), |a| <= 1.
inline double condition_integral(const MeasureDescriptor& mu, cplx a, double R, DiscRule rule = {}) {
  if (!(std::abs(a) <= 1.0)) throw DomainError("condition_integral: |a| must not exceed 1");
  if (!(R > 0.0 && R < 1.0)) throw DomainError("condition_integral: R must lie in (0,1)");
  rule.radius = R;
  rule.grade_toward_rim = true;
  rule.wedge_angles.clear();
  if (std::abs(a) > 1e-12) rule.wedge_angles.push_back(std::arg(a));
  const auto kernel = [a](cplx z) { return 1.0 / std::norm(1.0 - std::conj(a) * z); };
  if (auto m = mu.radial_view()) {
    for (const auto& at : m->atoms) {
      if (at.radius > 0.0) rule.breakpoints.push_back(at.radius);
    }
    return integrate_disc_rings([&](double r, double g1) { return potential_v_radial(*m, r, g1); }, kernel, rule);
  }
  return integrate_disc_rings([](double) { return 1.0; },
                              [&](cplx z) { return potential_v(mu, z) * kernel(z); }, rule);
}

enum class Verdict { bounded, divergent, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "BOUNDED";
    case Verdict::divergent: return "DIVERGENT";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct BoundednessConfig {
  std::vector<cplx> points{0.0, 1.0, -1.0, cplx(0, 1), cplx(0, -1)};
  std::vector<int> ladder_exponents{1, 2, 3, 4, 5};  // R = 1 - 10^{-k}
  double growth_threshold = 0.10;
  DiscRule rule{};
};

struct LadderRow {
  cplx a;
  std::vector<double> radii;
  std::vector<double> values;
  double last_growth = 0.0;  // (I_K - I_{K-1}) / I_{K-1}
  bool contracting = false;  // last increment smaller than the one before
};

struct BoundednessReport {
  Verdict verdict = Verdict::inconclusive;
  std::vector<LadderRow> rows;
  double max_growth = 0.0;
  std::string note;
};

/// Condition integrals along an R-ladder at interior and boundary points:
/// growth of at least the threshold on the last rung means DIVERGENT;
/// smaller, contracting increments everywhere mean BOUNDED.
inline BoundednessReport boundedness_check(const MeasureDescriptor& mu, const BoundednessConfig& cfg = {}) {
  BoundednessReport rep;
  const auto tm = total_moment(mu);
  if (!tm.finite) {
    rep.note = "total moment is infinite (trivial space)";
    return rep;
  }
  if (tm.value == 0.0) {
    rep.note = "zero measure";
    return rep;
  }
  if (cfg.ladder_exponents.size() < 3) throw std::invalid_argument("boundedness_check: need at least three rungs");
  bool all_contracting = true;
  bool all_finite = true;
  for (cplx a : cfg.points) {
    LadderRow row;
    row.a = a;
    for (int k : cfg.ladder_exponents) {
      const double R = 1.0 - std::pow(10.0, -k);
      row.radii.push_back(R);
      row.values.push_back(condition_integral(mu, a, R, cfg.rule));
    }
    const auto& v = row.values;
    const std::size_t n = v.size();
    const double inc1 = v[n - 1] - v[n - 2];
    const double inc0 = v[n - 2] - v[n - 3];
    row.last_growth = inc1 / v[n - 2];
    row.contracting = inc1 < inc0 || inc1 <= 1e-12 * std::abs(v[n - 1]);
    if (!std::isfinite(row.last_growth)) all_finite = false;
    all_contracting = all_contracting && row.contracting;
    rep.max_growth = std::max(rep.max_growth, row.last_growth);
    rep.rows.push_back(std::move(row));
  }
  if (!all_finite) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "non-finite ladder value";
  } else if (rep.max_growth >= cfg.growth_threshold) {
    rep.verdict = Verdict::divergent;
  } else if (all_contracting) {
    rep.verdict = Verdict::bounded;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.note = "increments below threshold but not contracting";
  }
  return rep;
}

/// Radial samples of U_mu on Chebyshev-spaced nodes per segment (segments end
/// at atom radii), with local cubic interpolation.
class PotentialCache {
 public:
  explicit PotentialCache(const MeasureDescriptor& mu, std::size_t nodes = 512, double r_min = 1e-3,
                          double r_max = 1.0 - 1e-3)
      : mu_(mu) {
    auto m = mu.radial_view();
    if (!m) throw std::invalid_argument("PotentialCache: measure is not radial");
    radial_ = *m;
    std::vector<double> cuts{r_min};
    std::vector<double> radii;
    for (const auto& a : radial_.atoms) radii.push_back(a.radius);
    std::sort(radii.begin(), radii.end());
    for (double r : radii) {
      if (r > cuts.back() + 1e-9 && r < r_max - 1e-9) cuts.push_back(r);
    }
    cuts.push_back(r_max);
    const double span = r_max - r_min;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double lo = cuts[s], hi = cuts[s + 1];
      const std::size_t k = std::max<std::size_t>(8, static_cast<std::size_t>(nodes * (hi - lo) / span));
      Segment seg{lo, hi, {}, {}};
      for (std::size_t i = 0; i < k; ++i) {
        const double c = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(k - 1)));
        double r = lo + (hi - lo) * c;
        // keep off atom circles, where U has a kink but stays finite
        if (i == 0 && s > 0) r += 1e-12;
        if (i + 1 == k && s + 2 < cuts.size()) r -= 1e-12;
        seg.r.push_back(r);
        seg.u.push_back(potential_u_radial(radial_, r, 1.0 - r));
      }
      segments_.push_back(std::move(seg));
    }
    valid_ = std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) {
      return std::all_of(s.u.begin(), s.u.end(), [](double v) { return std::isfinite(v); });
    });
  }

  bool valid() const { return valid_; }
  const MeasureDescriptor& measure() const { return mu_; }

  std::vector<std::pair<double, double>> samples() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& s : segments_) {
      for (std::size_t i = 0; i < s.r.size(); ++i) out.emplace_back(s.r[i], s.u[i]);
    }
    return out;
  }

  /// Interpolated U(r); outside the cached range a fresh evaluation.
  double operator()(double r) const {
    for (const auto& s : segments_) {
      if (r >= s.lo && r <= s.hi) return interpolate(s, r);
    }
    return potential_u_radial(radial_, r, 1.0 - r);
  }

 private:
  struct Segment {
    double lo, hi;
    std::vector<double> r, u;
  };

  static double interpolate(const Segment& s, double r) {
    const auto it = std::lower_bound(s.r.begin(), s.r.end(), r);
    std::size_t j = static_cast<std::size_t>(it - s.r.begin());
    if (j < s.r.size() && s.r[j] == r) return s.u[j];
    std::size_t start = j >= 2 ? j - 2 : 0;
    start = std::min(start, s.r.size() - 4);
    double acc = 0.0;
    for (std::size_t a = start; a < start + 4; ++a) {
      double l = 1.0;
      for (std::size_t b = start; b < start + 4; ++b) {
        if (b != a) l *= (r - s.r[b]) / (s.r[a] - s.r[b]);
      }
      acc += l * s.u[a];
    }
    return acc;
  }

  MeasureDescriptor mu_;
  RadialMeasure radial_;
  std::vector<Segment> segments_;
  bool valid_ = false;
};

}  // namespace hilbertop
