#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "summation.hpp"

namespace hilbertop {

/// x with weight w; gap = 1 - x carried separately so that nodes graded
/// toward 1 keep their distance to the rim after x itself rounds to 1.
struct WeightedNode {
  double x;
  double w;
  double gap;
};

enum class HintKind { none, log_endpoint, power_endpoint };
enum class Endpoint { left, right };

/// Integrand behaviour at one endpoint of [0,1]: |log t| or t^exponent.
struct SingularityHint {
  HintKind kind = HintKind::none;
  Endpoint side = Endpoint::left;
  double exponent = 0.0;

  static SingularityHint none() { return {}; }
  static SingularityHint log_at(Endpoint side) { return {HintKind::log_endpoint, side, 0.0}; }
  static SingularityHint power_at(Endpoint side, double exponent) {
    return {HintKind::power_endpoint, side, exponent};
  }
};

/// Rule on (0,1) integrating the constant 1 to 1. complements[i] = 1 - nodes[i]
/// to full relative precision (nodes graded toward 1 may round to 1).
struct IntervalRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> complements;
  SingularityHint hint;

  std::size_t size() const { return nodes.size(); }

  /// Integral of f over [lo, hi]; f may take (t) or (t, hi - t).
  template <typename F>
  auto integrate(F&& f, double lo = 0.0, double hi = 1.0) const {
    const double len = hi - lo;
    auto at = [&](std::size_t i) {
      if constexpr (std::is_invocable_v<F, double, double>) {
        return f(lo + len * nodes[i], len * complements[i]);
      } else {
        return f(lo + len * nodes[i]);
      }
    };
    using R = decltype(at(0));
    if constexpr (std::is_same_v<R, double>) {
      CompensatedSum s;
      for (std::size_t i = 0; i < nodes.size(); ++i) s.add(weights[i] * at(i));
      return s.value() * len;
    } else {
      CompensatedComplexSum s;
      for (std::size_t i = 0; i < nodes.size(); ++i) s.add(weights[i] * at(i));
      return s.value() * len;
    }
  }
};

namespace detail {

struct GaussLegendre {
  std::vector<double> x;  // on (-1, 1), increasing
  std::vector<double> w;
};

inline GaussLegendre compute_gauss_legendre(std::size_t n) {
  GaussLegendre g{std::vector<double>(n), std::vector<double>(n)};
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[n - 1 - i] = x;
    g.w[n - 1 - i] = w;
    g.x[i] = -x;
    g.w[i] = w;
  }
  if (n % 2 == 1) g.x[n / 2] = 0.0;
  return g;
}

inline const GaussLegendre& gauss_legendre(std::size_t n) {
  static std::mutex m;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(n));
  return *slot;
}

inline int grading_power(const SingularityHint& h, std::size_t n) {
  int q = 1;
  if (h.kind == HintKind::log_endpoint) q = 4;
  if (h.kind == HintKind::power_endpoint) {
    q = static_cast<int>(std::ceil(4.0 / (h.exponent + 1.0)));
    q = std::clamp(q, 1, 24);
  }
  return std::min(q, static_cast<int>(2 * n - 1));
}

}  // namespace detail

/// n-point Gauss-Legendre on (0,1). A singular endpoint is graded with
/// t = u^q (left) or t = 1 - (1-u)^q (right), q chosen from the hint.
inline IntervalRule interval_rule(std::size_t n, SingularityHint hint = {}) {
  if (n < 2) throw std::invalid_argument("interval_rule: need n >= 2");
  if (hint.kind == HintKind::power_endpoint && !(hint.exponent > -1.0)) {
    throw DomainError("interval_rule: power exponent must exceed -1 (integrability)");
  }
  const auto& g = detail::gauss_legendre(n);
  const int q = detail::grading_power(hint, n);
  IntervalRule r{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), hint};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 0.5 * (g.x[i] + 1.0);
    const double v = 0.5 * (1.0 - g.x[i]);
    const double wu = 0.5 * g.w[i];
    if (q == 1) {
      r.nodes[i] = u;
      r.complements[i] = v;
      r.weights[i] = wu;
    } else if (hint.side == Endpoint::left) {
      r.nodes[i] = std::pow(u, q);
      r.complements[i] = -std::expm1(q * std::log(u));
      r.weights[i] = wu * q * std::pow(u, q - 1);
    } else {
      r.complements[i] = std::pow(v, q);
      r.nodes[i] = 1.0 - r.complements[i];
      r.weights[i] = wu * q * std::pow(v, q - 1);
    }
  }
  return r;
}

/// Nodes on [lo, hi] graded geometrically toward 1 (lo < hi < 1):
/// 1 - s = (1-lo) * ((1-hi)/(1-lo))^u.
inline std::vector<WeightedNode> graded_toward_one_gap(std::size_t n, double lo, double hi_gap);

inline std::vector<WeightedNode> graded_toward_one(std::size_t n, double lo, double hi) {
  return graded_toward_one_gap(n, lo, 1.0 - hi);
}

/// Same, with the upper end given by its distance to 1 (for ends that round to 1).
inline std::vector<WeightedNode> graded_toward_one_gap(std::size_t n, double lo, double hi_gap) {
  const auto& g = detail::gauss_legendre(n);
  const double a = 1.0 - lo;
  const double log_ratio = std::log(hi_gap / a);
  std::vector<WeightedNode> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 0.5 * (g.x[i] + 1.0);
    const double t = a * std::exp(u * log_ratio);
    out[i] = {1.0 - t, -0.5 * g.w[i] * t * log_ratio, t};
  }
  return out;
}

inline std::vector<WeightedNode> mapped_nodes(const IntervalRule& r, double lo, double hi) {
  std::vector<WeightedNode> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[i] = {lo + (hi - lo) * r.nodes[i], (hi - lo) * r.weights[i], (1.0 - hi) + (hi - lo) * r.complements[i]};
  }
  return out;
}

/// Width-graded nodes on [c, c+len] (toward_left) or [c-len, c] concentrated at
/// c: dyadic shells c + len 2^{-k}, down to scale delta. gap holds |x - c|.
inline std::vector<WeightedNode> dyadic_shells(double c, double len, double delta, bool toward_left,
                                               std::size_t nodes_per_shell) {
  int depth = 0;
  if (delta > 0.0 && len > delta) depth = static_cast<int>(std::ceil(std::log2(len / delta))) + 3;
  depth = std::clamp(depth, 1, 1100);
  const auto rule = interval_rule(std::max<std::size_t>(nodes_per_shell, 2));
  std::vector<WeightedNode> out;
  out.reserve(static_cast<std::size_t>(depth + 1) * rule.size());
  auto push_panel = [&](double a, double b) {
    for (auto nd : mapped_nodes(rule, a, b)) {
      nd.gap = nd.x;
      out.push_back(nd);
    }
  };
  const double sign = toward_left ? 1.0 : -1.0;
  push_panel(0.0, std::ldexp(len, -depth));
  for (int k = depth; k >= 1; --k) push_panel(std::ldexp(len, -k), std::ldexp(len, -k + 1));
  for (auto& nd : out) nd.x = c + sign * nd.x;
  if (!toward_left) std::reverse(out.begin(), out.end());
  return out;
}

/// Product rule for the unit disc (or a centred sub-disc) with dA = dx dy / pi.
struct DiscRule {
  IntervalRule radial = interval_rule(48);
  std::size_t angular_count = 128;
  double radius = 1.0;
  SingularityHint origin;                  // radial integrand behaviour at r = 0
  SingularityHint rim;                     // behaviour at r = radius (radius == 1)
  bool grade_toward_rim = false;           // radius < 1 with a near-singularity at |z| = 1
  std::vector<double> breakpoints;         // radii where the ring integrand has kinks
  std::vector<double> wedge_angles;        // boundary peaks refined with dyadic shells
  std::size_t shell_nodes = 10;

  static constexpr double normalization = 1.0 / std::numbers::pi;

  /// Radial nodes on [0, radius]; weights include the Jacobian 2r of dA.
  std::vector<WeightedNode> radial_nodes() const {
    std::vector<double> cuts{0.0};
    std::vector<double> bp = breakpoints;
    std::sort(bp.begin(), bp.end());
    for (double b : bp) {
      if (b > cuts.back() + 1e-14 && b < radius - 1e-14) cuts.push_back(b);
    }
    const bool rim_singular = (radius >= 1.0 && rim.kind != HintKind::none) || grade_toward_rim;
    if (cuts.size() == 1 && origin.kind != HintKind::none && rim_singular) cuts.push_back(0.5 * radius);
    cuts.push_back(radius);
    const std::size_t n = radial.size();
    std::vector<WeightedNode> out;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double lo = cuts[p], hi = cuts[p + 1];
      const bool first = (p == 0), last = (p + 2 == cuts.size());
      std::vector<WeightedNode> panel;
      if (first && origin.kind != HintKind::none) {
        SingularityHint h = origin;
        h.side = Endpoint::left;
        panel = mapped_nodes(interval_rule(n, h), lo, hi);
      } else if (last && radius >= 1.0 && rim.kind != HintKind::none) {
        SingularityHint h = rim;
        h.side = Endpoint::right;
        panel = mapped_nodes(interval_rule(n, h), lo, hi);
      } else if (last && grade_toward_rim && radius < 1.0) {
        panel = graded_toward_one(n, lo, hi);
      } else {
        panel = mapped_nodes(radial, lo, hi);
      }
      for (auto nd : panel) out.push_back({nd.x, nd.w * 2.0 * nd.x, nd.gap});
    }
    return out;
  }

  /// Angular nodes with weights summing to 1 (d theta / 2 pi).
  std::vector<WeightedNode> angular_nodes(double r) const {
    return angular_nodes_with_width(std::max(1.0 - r, 1e-15));
  }

  // gap of each node is its distance to the nearest wedge angle (to 0 without wedges).

  std::vector<WeightedNode> angular_nodes_with_width(double delta) const {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<WeightedNode> out;
    if (wedge_angles.empty()) {
      const std::size_t m = std::max<std::size_t>(angular_count, 1);
      out.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        const double t = two_pi * static_cast<double>(j) / static_cast<double>(m);
        out[j] = {t, 1.0 / static_cast<double>(m), std::min(t, two_pi - t)};
      }
      return out;
    }
    std::vector<double> peaks;
    for (double t : wedge_angles) {
      double u = std::fmod(t, two_pi);
      if (u < 0.0) u += two_pi;
      peaks.push_back(u);
    }
    std::sort(peaks.begin(), peaks.end());
    std::vector<double> uniq;
    for (double p : peaks) {
      if (uniq.empty() || p - uniq.back() > 1e-12) uniq.push_back(p);
    }
    if (uniq.size() > 1 && uniq.front() + two_pi - uniq.back() <= 1e-12) uniq.pop_back();
    for (std::size_t i = 0; i < uniq.size(); ++i) {
      const double p = uniq[i];
      const double next = (i + 1 < uniq.size()) ? uniq[i + 1] : uniq[0] + two_pi;
      const double half = 0.5 * (next - p);
      for (const auto& nd : dyadic_shells(p, half, delta, true, shell_nodes)) out.push_back(nd);
      for (const auto& nd : dyadic_shells(next, half, delta, false, shell_nodes)) out.push_back(nd);
    }
    for (auto& nd : out) nd.w /= two_pi;
    return out;
  }
};

namespace detail {

[[noreturn]] inline void report_non_finite(cplx z) {
  throw NonFiniteError("integrand is not finite at node " + format_point(z));
}

}  // namespace detail

/// sum over rule nodes of w f(z), under dA = dx dy / pi.
template <typename F>
cplx integrate_disc(F&& f, const DiscRule& rule) {
  CompensatedComplexSum total;
  for (const auto& rn : rule.radial_nodes()) {
    CompensatedComplexSum ring;
    for (const auto& an : rule.angular_nodes(rn.x)) {
      const cplx z = std::polar(rn.x, an.x);
      const cplx v = f(z);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) detail::report_non_finite(z);
      ring.add(an.w * v);
    }
    total.add(rn.w * ring.value());
  }
  return total.value();
}

namespace detail {

// out[i] = f(i) on up to hardware_concurrency threads; the first exception in
// index order is rethrown, so results and errors do not depend on scheduling.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> err(n);
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        out[i] = f(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace detail

/// A ring node with its exact distance to the rim and to the nearest wedge peak,
/// for kernels that lose accuracy when rebuilt from z alone.
struct RingPoint {
  double r;
  double gap;     // 1 - r
  double theta;
  double offset;  // |theta - nearest wedge angle|
};

/// Integral of ring(r, 1-r) * kernel(z) dA: the radial factor is evaluated once
/// per ring and skipped when it vanishes. Angular shells follow the exact gap.
/// Rings run concurrently; the reduction is sequential in ring order.
template <typename R, typename K>
double integrate_disc_rings(R&& ring_factor, K&& kernel, const DiscRule& rule) {
  const auto radial = rule.radial_nodes();
  const auto rings = detail::parallel_map<double>(radial.size(), [&](std::size_t i) {
    const auto& rn = radial[i];
    double rf;
    if constexpr (std::is_invocable_v<R, double, double>) {
      rf = ring_factor(rn.x, rn.gap);
    } else {
      rf = ring_factor(rn.x);
    }
    if (!std::isfinite(rf)) detail::report_non_finite(rn.x);
    if (rf == 0.0) return 0.0;
    CompensatedSum ring;
    for (const auto& an : rule.angular_nodes_with_width(std::max(rn.gap, 1e-300))) {
      const cplx z = std::polar(rn.x, an.x);
      double v;
      if constexpr (std::is_invocable_v<K, const RingPoint&>) {
        v = kernel(RingPoint{rn.x, rn.gap, an.x, an.gap});
      } else {
        v = kernel(z);
      }
      if (!std::isfinite(v)) detail::report_non_finite(z);
      ring.add(an.w * v);
    }
    return rn.w * rf * ring.value();
  });
  CompensatedSum total;
  for (double v : rings) total.add(v);
  return total.value();
}

// Sup search.

struct SupSearchConfig {
  std::size_t coarse_radial = 8;
  std::size_t coarse_angular = 16;
  double coarse_max_radius = 0.9;
  std::vector<double> boundary_radii{1 - 1e-1, 1 - 1e-2, 1 - 1e-3, 1 - 1e-4, 1 - 1e-5, 1 - 1e-6};
  std::size_t refinement_iterations = 40;
  std::optional<bool> restrict_to_real_axis;  // unset: the calling functional decides
  double tolerance = 1e-3;                    // relative

  void validate() const {
    if (boundary_radii.empty()) throw std::invalid_argument("SupSearchConfig: empty boundary sequence");
    for (std::size_t i = 0; i < boundary_radii.size(); ++i) {
      const double r = boundary_radii[i];
      if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("SupSearchConfig: boundary radii must lie in (0,1)");
      if (i > 0 && !(r > boundary_radii[i - 1])) {
        throw std::invalid_argument("SupSearchConfig: boundary radii must increase toward 1");
      }
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("SupSearchConfig: tolerance must be positive");
    if (coarse_radial == 0 || coarse_angular == 0) throw std::invalid_argument("SupSearchConfig: empty coarse grid");
    if (!(coarse_max_radius > 0.0 && coarse_max_radius < 1.0)) {
      throw std::invalid_argument("SupSearchConfig: coarse radius must lie in (0,1)");
    }
  }
};

struct SupResult {
  double value = 0.0;
  cplx argmax{};
  double error_estimate = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
  std::vector<double> boundary_values;  // F along the boundary sequence
};

/// Maximise F over the open disc: coarse scan, pattern search, boundary
/// ladder along the argmax direction, then a search in
/// (s = -log10(1-|a|), angle) near the best ladder point.
template <typename F>
SupResult sup_over_disc(F&& f, const SupSearchConfig& config, bool real_axis = false) {
  config.validate();
  if (config.restrict_to_real_axis) real_axis = *config.restrict_to_real_axis;
  SupResult res;
  res.value = -std::numeric_limits<double>::infinity();
  const double r_last = config.boundary_radii.back();
  auto probe = [&](cplx a) {
    const double v = f(a);
    ++res.evaluations;
    if (!std::isfinite(v)) throw NonFiniteError("sup_over_disc: functional not finite at " + detail::format_point(a));
    if (v > res.value) {
      res.value = v;
      res.argmax = a;
    }
    return v;
  };

  // coarse scan
  const double rmax = config.coarse_max_radius;
  if (real_axis) {
    const std::size_t n = 2 * config.coarse_radial;
    for (std::size_t i = 0; i <= n; ++i) probe(-rmax + 2.0 * rmax * static_cast<double>(i) / static_cast<double>(n));
  } else {
    probe(0.0);
    for (std::size_t i = 1; i <= config.coarse_radial; ++i) {
      const double r = rmax * static_cast<double>(i) / static_cast<double>(config.coarse_radial);
      for (std::size_t j = 0; j < config.coarse_angular; ++j) {
        probe(std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(config.coarse_angular)));
      }
    }
  }

  // interior pattern search
  {
    double h = rmax / static_cast<double>(config.coarse_radial);
    cplx x = res.argmax;
    double fx = res.value;
    for (std::size_t it = 0; it < config.refinement_iterations && h > 1e-9; ++it) {
      bool moved = false;
      const cplx dirs[4] = {1.0, -1.0, cplx(0, 1), cplx(0, -1)};
      for (int d = 0; d < (real_axis ? 2 : 4); ++d) {
        const cplx y = x + h * dirs[d];
        if (!(std::abs(y) <= r_last)) continue;
        const double fy = probe(y);
        if (fy > fx) {
          x = y;
          fx = fy;
          moved = true;
          break;
        }
      }
      if (!moved) h *= 0.5;
    }
  }

  // boundary ladder
  cplx dir = res.argmax;
  if (std::abs(dir) < 1e-12) dir = 1.0;
  dir /= std::abs(dir);
  if (real_axis) dir = dir.real() < 0.0 ? -1.0 : 1.0;
  std::vector<double> running;
  std::size_t best_rung = 0;
  double best_rung_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < config.boundary_radii.size(); ++k) {
    const double v = probe(config.boundary_radii[k] * dir);
    res.boundary_values.push_back(v);
    running.push_back(res.value);
    if (v > best_rung_value) {
      best_rung_value = v;
      best_rung = k;
    }
  }

  // refinement near the best rung
  const double before_refine = res.value;
  {
    auto to_s = [](double r) { return -std::log10(1.0 - r); };
    const double s_hi = to_s(r_last);
    double s = to_s(config.boundary_radii[best_rung]);
    double theta = std::arg(dir);
    double fx = best_rung_value;
    double hs = 0.5;
    double ht = real_axis ? 0.0 : 2.0 * (1.0 - config.boundary_radii[best_rung]);
    auto at = [&](double ss, double tt) { return std::polar(1.0 - std::pow(10.0, -ss), tt); };
    for (std::size_t it = 0; it < config.refinement_iterations && (hs > 1e-3 || ht > 1e-12); ++it) {
      bool moved = false;
      const double cand[4][2] = {{hs, 0}, {-hs, 0}, {0, ht}, {0, -ht}};
      for (int d = 0; d < (real_axis ? 2 : 4); ++d) {
        const double ss = std::min(s + cand[d][0], s_hi);
        if (ss <= 0.0 || (ss == s && cand[d][1] == 0.0)) continue;
        const double fy = probe(at(ss, theta + cand[d][1]));
        if (fy > fx) {
          s = ss;
          theta += cand[d][1];
          fx = fy;
          moved = true;
          break;
        }
      }
      if (!moved) {
        hs *= 0.5;
        ht *= 0.5;
      }
    }
  }

  const std::size_t n = running.size();
  const double scale = std::max(std::abs(res.value), 1e-300);
  double inc1 = n >= 2 ? running[n - 1] - running[n - 2] : 0.0;
  double inc2 = n >= 3 ? running[n - 2] - running[n - 3] : 0.0;
  const double refine_gain = res.value - before_refine;
  res.converged = inc1 <= config.tolerance * scale && inc2 <= config.tolerance * scale &&
                  refine_gain <= config.tolerance * scale;
  res.error_estimate = std::max({inc1, inc2, refine_gain, 0.0});
  return res;
}

}  // namespace hilbertop
