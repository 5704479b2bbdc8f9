#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "mobius.hpp"
#include "operators.hpp"
#include "seminorms.hpp"

namespace hilbertop {

enum class EmitFormat { json, csv };

inline const char* to_string(EmitFormat f) { return f == EmitFormat::json ? "json" : "csv"; }

inline EmitFormat parse_emit_format(const std::string& s) {
  if (s == "json") return EmitFormat::json;
  if (s == "csv") return EmitFormat::csv;
  throw InputError("emit: expected json or csv, got '" + s + "'");
}

struct RunConfig {
  std::string command;
  std::optional<double> tol_quad;  // overrides the tolerance of quadrature rows
  std::optional<double> tol_sup;   // overrides the tolerance of sup-search rows
  std::size_t nodes = 0;           // radial nodes of disc rules; 0 keeps the defaults
  std::size_t degree = 2048;       // truncation degree of named series
  EmitFormat emit = EmitFormat::json;
  std::string out;                 // empty: standard output
  std::uint64_t seed = 1;
  bool timing = false;             // wall times make reports run-dependent

  void validate() const {
    if (tol_quad && !(*tol_quad > 0.0)) throw InputError("config: tol-quad must be positive");
    if (tol_sup && !(*tol_sup > 0.0)) throw InputError("config: tol-sup must be positive");
    if (degree < 16) throw InputError("config: degree must be at least 16");
  }

  DiscRule area_rule() const {
    auto r = detail::default_area_rule();
    if (nodes > 0) r.radial = interval_rule(nodes);
    return r;
  }

  DiscRule plain_rule() const {
    DiscRule r;
    if (nodes > 0) r.radial = interval_rule(nodes);
    return r;
  }

  json to_json() const {
    json j{{"degree", degree}, {"nodes", nodes}, {"emit", to_string(emit)}, {"seed", seed}};
    if (tol_quad) j["tol_quad"] = *tol_quad;
    if (tol_sup) j["tol_sup"] = *tol_sup;
    return j;
  }
};

/// Fields of a JSON config document override the defaults in cfg.
inline void apply_config_json(RunConfig& cfg, const json& j, const std::string& where = "config") {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  detail::reject_unknown(j, {"tol_quad", "tol_sup", "nodes", "degree", "emit", "out", "seed", "timing"}, where);
  auto natural = [&](const char* key) {
    const auto& v = j[key];
    if (!v.is_number_unsigned()) throw InputError(where + "/" + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  };
  if (j.contains("tol_quad")) cfg.tol_quad = detail::number_field(j, "tol_quad", where);
  if (j.contains("tol_sup")) cfg.tol_sup = detail::number_field(j, "tol_sup", where);
  if (j.contains("nodes")) cfg.nodes = natural("nodes");
  if (j.contains("degree")) cfg.degree = natural("degree");
  if (j.contains("seed")) cfg.seed = natural("seed");
  if (j.contains("emit")) {
    if (!j["emit"].is_string()) throw InputError(where + "/emit: expected a string");
    cfg.emit = parse_emit_format(j["emit"].get<std::string>());
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw InputError(where + "/out: expected a string");
    cfg.out = j["out"].get<std::string>();
  }
  if (j.contains("timing")) {
    if (!j["timing"].is_boolean()) throw InputError(where + "/timing: expected true or false");
    cfg.timing = j["timing"].get<bool>();
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  apply_config_json(cfg, detail::parse_json_text(detail::read_text_file(path, "config"), "config " + path),
                    "config " + path);
}

enum class RowClass { sup, quadrature, exact };

inline const char* to_string(RowClass c) {
  switch (c) {
    case RowClass::sup: return "sup";
    case RowClass::quadrature: return "quadrature";
    case RowClass::exact: return "exact";
  }
  return "?";
}

struct ReportRow {
  std::string name;
  double computed = std::numeric_limits<double>::quiet_NaN();
  double reference = 0.0;
  std::string reference_expr;  // how the reference is obtained
  std::string reference_kind;  // published | closed-form | bound
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  bool pass = false;
  RowClass row_class = RowClass::quadrature;
  std::string anchor;
  std::string note;
  std::optional<double> wall_time;
};

struct ConstantsReport {
  std::string command;
  std::vector<ReportRow> rows;

  bool all_pass() const {
    for (const auto& r : rows) {
      if (!r.pass) return false;
    }
    return true;
  }
};

struct RowSpec {
  std::string name;
  std::string anchor;
  RowClass row_class;
  double tolerance;
  std::string reference_expr;
  std::string reference_kind;
  std::function<double()> reference;
  std::function<double()> compute;
  bool relative_tolerance = false;
};

/// Runs one row; numerical failures become failed rows.
inline ReportRow run_row(const RowSpec& spec, const RunConfig& cfg) {
  ReportRow row;
  row.name = spec.name;
  row.anchor = spec.anchor;
  row.row_class = spec.row_class;
  row.reference_expr = spec.reference_expr;
  row.reference_kind = spec.reference_kind;
  const auto start = std::chrono::steady_clock::now();
  try {
    row.reference = spec.reference();
    row.tolerance = spec.relative_tolerance ? spec.tolerance * std::abs(row.reference) : spec.tolerance;
    if (spec.row_class == RowClass::sup && cfg.tol_sup) row.tolerance = *cfg.tol_sup;
    if (spec.row_class == RowClass::quadrature && cfg.tol_quad) row.tolerance = *cfg.tol_quad;
    row.computed = spec.compute();
    row.abs_error = std::abs(row.computed - row.reference);
    row.pass = row.abs_error <= row.tolerance;
  } catch (const std::exception& e) {
    row.note = e.what();
    row.pass = false;
  }
  if (cfg.timing) row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

namespace detail {

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline json report_to_json(const ConstantsReport& rep, const RunConfig& cfg) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json j{{"name", r.name},
           {"computed", detail::finite_or_null(r.computed)},
           {"reference", detail::finite_or_null(r.reference)},
           {"reference_expr", r.reference_expr},
           {"reference_kind", r.reference_kind},
           {"abs_error", detail::finite_or_null(r.abs_error)},
           {"tolerance", r.tolerance},
           {"pass", r.pass},
           {"class", to_string(r.row_class)},
           {"anchor", r.anchor}};
    if (!r.note.empty()) j["note"] = r.note;
    if (r.wall_time) j["wall_time"] = *r.wall_time;
    rows.push_back(j);
  }
  return {{"command", rep.command}, {"config", cfg.to_json()}, {"rows", rows}, {"pass", rep.all_pass()}};
}

inline std::string report_to_csv(const ConstantsReport& rep, const RunConfig& cfg) {
  std::string s = "name,computed,reference,abs_error,tolerance,pass,class,reference_kind,anchor,note";
  if (cfg.timing) s += ",wall_time";
  s += "\n";
  for (const auto& r : rep.rows) {
    s += detail::csv_field(r.name) + "," + detail::csv_number(r.computed) + "," + detail::csv_number(r.reference) +
         "," + detail::csv_number(r.abs_error) + "," + detail::csv_number(r.tolerance) + "," +
         (r.pass ? "true" : "false") + "," + to_string(r.row_class) + "," + r.reference_kind + "," +
         detail::csv_field(r.anchor) + "," + detail::csv_field(r.note);
    if (cfg.timing) s += "," + detail::csv_number(r.wall_time.value_or(0.0));
    s += "\n";
  }
  return s;
}

inline std::string render_report(const ConstantsReport& rep, const RunConfig& cfg) {
  return cfg.emit == EmitFormat::json ? report_to_json(rep, cfg).dump(2) + "\n" : report_to_csv(rep, cfg);
}

namespace detail {

inline double pi_over_sqrt2() { return std::numbers::pi / std::numbers::sqrt2; }

// 16 sqrt(2) asinh(1): int 4/|1-z^2|^2 U dA for U = 4 (1-|z|^2)^{1/2}.
inline double qp_half_log_norm_sq() { return 16.0 * std::numbers::sqrt2 * std::asinh(1.0); }

}  // namespace detail

/// Published constants and their cross-checks.
inline ConstantsReport cmd_constants(const RunConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.degree;
  const auto delta0 = MeasureDescriptor::unit_atom();
  const auto qp_half = MeasureDescriptor::qp(0.5);
  std::vector<RowSpec> specs{
      {"bmoa_norm(H(1))", "the norm of H(1) in BMOA is 1 + pi/sqrt(2)", RowClass::sup, 2e-2, "1 + pi/sqrt(2)",
       "published", [] { return 1.0 + detail::pi_over_sqrt2(); },
       [n] { return bmoa_norm(hilbert_one_series(n)).norm_value; }},
      {"bmoa_norm(log)", "the BMOA norm of log(1/(1-z)) is pi/sqrt(2)", RowClass::sup, 2e-2, "pi/sqrt(2)",
       "published", [] { return detail::pi_over_sqrt2(); }, [n] { return bmoa_norm(log_series(n)).norm_value; }},
      {"garsia(log, 0)", "Garsia functional of log(1/(1-z)) at the origin", RowClass::quadrature, 1e-6, "pi^2/6",
       "closed-form", [] { return std::numbers::pi * std::numbers::pi / 6.0; }, [n] { return garsia_functional(log_series(n), 0.0); }},
      {"lambda_norm(log, 2)", "log(1/(1-z)) has norm 1 in Lambda(2,1/2)", RowClass::sup, 1e-6, "1", "published",
       [] { return 1.0; }, [n] { return lambda_norm(log_series(n), 2.0); }},
      {"lambda_norm(H(1), 2)", "H(1) has norm 1 + ||log(1-z)|| = 2 in Lambda(2,1/2)", RowClass::sup, 2e-2, "2",
       "published", [] { return 2.0; }, [n] { return lambda_norm(hilbert_one_series(n), 2.0); }},
      {"log_norm_sq(delta_0)", "norm formula at the unit point mass, 4 sum_{odd n} 1/n^2", RowClass::quadrature, 1e-2,
       "pi^2/2", "closed-form", [] { return std::numbers::pi * std::numbers::pi / 2.0; },
       [&cfg, &delta0] { return log_norm_sq_formula(delta0, cfg.plain_rule()).value; }},
      {"hilbert_norm_hinf_mdmu(delta_0)", "norm of H and C from H^inf into M(D_mu) is 1 + ||log(1-z)||",
       RowClass::quadrature, 1e-2, "1 + pi/sqrt(2)", "published", [] { return 1.0 + detail::pi_over_sqrt2(); },
       [&delta0] { return hilbert_norm_hinf_mdmu(delta0); }},
      {"log_norm_sq(qp 1/2)", "norm formula for Q_{1/2}", RowClass::quadrature, 1e-4, "16 sqrt(2) asinh(1)",
       "closed-form", [] { return detail::qp_half_log_norm_sq(); },
       [&cfg, &qp_half] { return log_norm_sq_formula(qp_half, cfg.plain_rule()).value; }},
      {"1 + mdmu_norm(log, qp 1/2)", "norm of H and C from H^inf into Q_p", RowClass::sup, 2e-2,
       "1 + sqrt(16 sqrt(2) asinh(1))", "closed-form", [] { return 1.0 + std::sqrt(detail::qp_half_log_norm_sq()); },
       // log(1/(1-z)) is carried entirely by its tail, so a short head suffices
       [&cfg, &qp_half] { return 1.0 + mdmu_norm(log_series(64), qp_half, {}, cfg.area_rule()).norm_value; },
       true},
  };
  ConstantsReport rep{"constants", {}};
  for (const auto& s : specs) rep.rows.push_back(run_row(s, cfg));
  return rep;
}

namespace detail {

inline TaylorPolynomial random_polynomial(std::mt19937_64& rng, std::size_t max_degree) {
  std::uniform_int_distribution<std::size_t> deg(0, max_degree);
  std::normal_distribution<double> g;
  std::vector<cplx> a(deg(rng) + 1);
  for (auto& c : a) c = {g(rng), g(rng)};
  return TaylorPolynomial(std::move(a));
}

inline cplx random_disc_point(std::mt19937_64& rng, double r_max) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = r_max * std::sqrt(u(rng));
  return std::polar(r, 2.0 * std::numbers::pi * u(rng));
}

inline AtomicMeasure random_atomic_measure(std::mt19937_64& rng, std::size_t max_atoms, double r_max) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_real_distribution<double> mass(0.1, 2.0);
  AtomicMeasure mu;
  const std::size_t k = count(rng);
  for (std::size_t j = 0; j < k; ++j) {
    mu.points.push_back(random_disc_point(rng, r_max));
    mu.masses.push_back(mass(rng));
  }
  return mu;
}

}  // namespace detail

struct IdentityBattery {
  std::size_t dual_polynomials = 50;
  std::size_t dual_points = 20;
  std::size_t lp_pairs = 20;
};

/// Residual table for the algebraic, integral and potential identities.
inline ConstantsReport cmd_identities(const RunConfig& cfg, const IdentityBattery& battery = {}) {
  cfg.validate();
  ConstantsReport rep{"identities", {}};
  const auto zero = [] { return 0.0; };
  for (std::size_t n : {0u, 1u, 5u, 25u}) {
    rep.rows.push_back(run_row({"shift_relation(n=" + std::to_string(n) + ")", "C(e_n) = S^n H(e_n)",
                                RowClass::exact, 1e-15, "0", "closed-form", zero,
                                [n] { return shift_relation_residual(n, 200); }},
                               cfg));
  }
  const auto rule = cfg.nodes > 0 ? interval_rule(cfg.nodes) : default_operator_rule();
  const auto dual = [&](bool derivative) {
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < battery.dual_polynomials; ++t) {
      const auto f = detail::random_polynomial(rng, 30);
      const auto h = derivative ? differentiate(hilbert_coeff(f, 600)) : hilbert_coeff(f, 400);
      for (std::size_t k = 0; k < battery.dual_points; ++k) {
        const cplx z = detail::random_disc_point(rng, 0.9);
        const cplx direct = derivative ? hilbert_derivative(f, z, rule) : hilbert_integral(f, z, rule);
        worst = std::max(worst, std::abs(eval(h, z) - direct));
      }
    }
    return worst;
  };
  rep.rows.push_back(run_row({"dual_representation", "H(f)(z) = int_0^1 f(t)/(1 - t z) dt", RowClass::quadrature,
                              1e-10, "0", "closed-form", zero, [&] { return dual(false); }},
                             cfg));
  rep.rows.push_back(run_row({"derivative_identity", "H(f)'(z) = b(z)/(1 - z)", RowClass::quadrature, 1e-9, "0",
                              "closed-form", zero, [&] { return dual(true); }},
                             cfg));
  const auto grid = EvaluationDiskGrid::uniform(20, 20, 0.99);
  const std::vector<std::pair<std::string, cplx>> factors{{"1", 0.0}, {"sigma_0.3", 0.3}, {"sigma_0.7i", {0.0, 0.7}}};
  for (const auto& [label, a] : factors) {
    const auto f = a == cplx{} ? TaylorPolynomial::monomial(0)
                               : automorphism_series(DiscAutomorphism(1.0, a), cfg.degree);
    rep.rows.push_back(run_row({"bounded_factor_excess(" + label + ")", "||b||_inf <= ||f||_inf",
                                RowClass::quadrature, 1e-6, "max(0, sup|b| - 1)", "bound", zero,
                                [&, f] {
                                  double sup = 0.0;
                                  grid.for_each([&](cplx z) { sup = std::max(sup, std::abs(bounded_factor(f, z, rule))); });
                                  return std::max(0.0, sup - 1.0);
                                }},
                               cfg));
  }
  rep.rows.push_back(run_row({"lp_identity", "sum_j m_j Garsia(f, p_j) = int |f'|^2 U_mu dA",
                              RowClass::quadrature, 1e-5, "0", "closed-form", zero,
                              [&] {
                                std::mt19937_64 rng(cfg.seed + 1);
                                double worst = 0.0;
                                for (std::size_t t = 0; t < battery.lp_pairs; ++t) {
                                  const auto f = detail::random_polynomial(rng, 8);
                                  const auto mu = detail::random_atomic_measure(rng, 5, 0.9);
                                  worst = std::max(worst, lp_identity_residual(f, mu, cfg.area_rule()));
                                }
                                return worst;
                              }},
                             cfg));
  return rep;
}

// Single-result commands.

inline json sup_to_json(const SupResult& s) {
  json b = json::array();
  for (double v : s.boundary_values) b.push_back(detail::finite_or_null(v));
  return {{"value", detail::finite_or_null(s.value)},
          {"argmax", complex_to_json(s.argmax)},
          {"error_estimate", detail::finite_or_null(s.error_estimate)},
          {"converged", s.converged},
          {"evaluations", s.evaluations},
          {"boundary_values", b}};
}

inline json seminorm_to_json(const SeminormReport& r) {
  return {{"norm_value", detail::finite_or_null(r.norm_value)},
          {"point_evaluation_part", r.point_evaluation_part},
          {"sup_part", sup_to_json(r.sup_part)},
          {"method", to_string(r.method)}};
}

inline json boundedness_to_json(const MeasureDescriptor& mu, const BoundednessReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json vals = json::array();
    for (double v : r.values) vals.push_back(detail::finite_or_null(v));
    rows.push_back({{"a", complex_to_json(r.a)},
                    {"radii", r.radii},
                    {"values", vals},
                    {"last_growth", detail::finite_or_null(r.last_growth)},
                    {"contracting", r.contracting}});
  }
  json j{{"command", "boundedness"},
         {"measure", measure_to_json(mu)},
         {"verdict", to_string(rep.verdict)},
         {"max_growth", detail::finite_or_null(rep.max_growth)},
         {"ladder", rows}};
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

inline std::string boundedness_to_csv(const BoundednessReport& rep) {
  std::string s = "a_re,a_im,radius,value,last_growth,contracting,verdict\n";
  for (const auto& r : rep.rows) {
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      s += detail::csv_number(r.a.real()) + "," + detail::csv_number(r.a.imag()) + "," +
           detail::csv_number(r.radii[i]) + "," + detail::csv_number(r.values[i]) + "," +
           detail::csv_number(r.last_growth) + "," + (r.contracting ? "true" : "false") + "," +
           to_string(rep.verdict) + "\n";
    }
  }
  return s;
}

/// Ladder diagnostics and verdict for one measure.
inline BoundednessReport cmd_boundedness(const MeasureDescriptor& mu, const RunConfig& cfg) {
  cfg.validate();
  BoundednessConfig bc;
  bc.rule = cfg.plain_rule();
  return boundedness_check(mu, bc);
}

}  // namespace hilbertop
