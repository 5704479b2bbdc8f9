#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hilbertop/report.hpp"

using namespace hilbertop;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::optional<double> tol_quad, tol_sup;
  std::optional<std::size_t> nodes, degree;
  std::optional<std::string> emit, out, config;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

RunConfig resolve_config(const Flags& f, const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  if (f.config) load_config_file(cfg, *f.config);
  if (f.tol_quad) cfg.tol_quad = *f.tol_quad;
  if (f.tol_sup) cfg.tol_sup = *f.tol_sup;
  if (f.nodes) cfg.nodes = *f.nodes;
  if (f.degree) cfg.degree = *f.degree;
  if (f.emit) cfg.emit = parse_emit_format(*f.emit);
  if (f.out) cfg.out = *f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(cfg.out);
  if (!os) throw InputError("out: cannot write '" + cfg.out + "'");
  os << text;
}

std::string emit_json(const json& j) { return j.dump(2) + "\n"; }

std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + detail::csv_field(fields[i]);
  return s + "\n";
}

int run_norm(const RunConfig& cfg, const std::string& space, const std::string& function,
             const std::optional<std::string>& measure, std::optional<double> p) {
  const auto f = parse_function_arg(function, cfg.degree);
  SupSearchConfig sc;
  if (cfg.tol_sup) sc.tolerance = *cfg.tol_sup;
  json j{{"command", "norm"}, {"space", space}, {"function", function}, {"config", cfg.to_json()}};
  if (space == "bmoa") {
    j["result"] = seminorm_to_json(bmoa_norm(f, sc));
  } else if (space == "qp") {
    if (!p) throw InputError("norm: --space qp needs --p");
    j["p"] = *p;
    j["result"] = seminorm_to_json(qp_norm(f, *p, sc, cfg.area_rule()));
  } else if (space == "mdmu") {
    if (!measure) throw InputError("norm: --space mdmu needs --measure");
    const auto mu = parse_measure_arg(*measure);
    j["measure"] = measure_to_json(mu);
    j["result"] = seminorm_to_json(mdmu_norm(f, mu, sc, cfg.area_rule()));
  } else {
    const double q = p.value_or(2.0);
    if (!(q > 1.0)) throw InputError("norm: --space lambda needs p > 1");
    const auto prof = lambda_profile(f, q);
    j["p"] = q;
    j["result"] = {{"norm_value", prof.value}, {"radii", prof.radii}, {"profile", prof.profile}};
  }
  if (cfg.emit == EmitFormat::json) {
    write_output(cfg, emit_json(j));
  } else {
    const auto& r = j["result"];
    std::string s = csv_line({"space", "norm_value"});
    s += csv_line({space, detail::csv_number(r["norm_value"].is_null() ? std::nan("") : r["norm_value"].get<double>())});
    write_output(cfg, s);
  }
  return kExitPass;
}

int run_apply(const RunConfig& cfg, const std::string& op, const std::string& function, std::size_t n_out) {
  const auto f = parse_function_arg(function, cfg.degree);
  const auto g = op == "hilbert" ? hilbert_coeff(f, n_out) : cesaro_coeff(f, n_out);
  if (cfg.emit == EmitFormat::json) {
    write_output(cfg, emit_json({{"command", "apply"}, {"operator", op}, {"function", function},
                                 {"n_out", n_out}, {"result", function_to_json(g)}}));
  } else {
    std::string s = csv_line({"n", "re", "im"});
    for (std::size_t n = 0; n <= g.degree(); ++n) {
      s += csv_line({std::to_string(n), detail::csv_number(g[n].real()), detail::csv_number(g[n].imag())});
    }
    write_output(cfg, s);
  }
  return kExitPass;
}

int run_potential(const RunConfig& cfg, const std::string& measure, const std::vector<double>& radii, double angle) {
  const auto mu = parse_measure_arg(measure);
  const auto radial = mu.radial_view();
  json rows = json::array();
  std::string csv = csv_line({"r", "theta", "U", "V"});
  for (double r : radii) {
    if (!(r >= 0.0 && r < 1.0)) throw InputError("potential: radii must lie in [0,1)");
    const cplx z = std::polar(r, angle);
    double u, v;
    try {
      u = radial && r > 0.0 ? potential_u_radial(*radial, r) : potential_u(mu, z);
      v = radial ? potential_v_radial(*radial, r) : potential_v(mu, z);
    } catch (const DomainError& e) {
      throw InputError(std::string("potential: ") + e.what());
    }
    rows.push_back({{"r", r}, {"theta", angle}, {"U", detail::finite_or_null(u)}, {"V", detail::finite_or_null(v)}});
    csv += csv_line({detail::csv_number(r), detail::csv_number(angle), detail::csv_number(u), detail::csv_number(v)});
  }
  if (cfg.emit == EmitFormat::json) {
    write_output(cfg, emit_json({{"command", "potential"}, {"measure", measure_to_json(mu)},
                                 {"radial", radial.has_value()}, {"values", rows}}));
  } else {
    write_output(cfg, csv);
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert and Cesaro operators on BMOA-type spaces: constants, norms, verdicts"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--tol-quad", flags.tol_quad, "tolerance of quadrature rows")->check(CLI::PositiveNumber);
  app.add_option("--tol-sup", flags.tol_sup, "tolerance of sup-search rows (norm: sup-search tolerance)")
      ->check(CLI::PositiveNumber);
  app.add_option("--nodes", flags.nodes, "radial nodes of disc rules");
  app.add_option("--degree", flags.degree, "truncation degree of named series (>= 16)");
  app.add_option("--emit", flags.emit, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", flags.out, "output file (default: standard output)");
  app.add_option("--seed", flags.seed, "seed for random probe batteries");
  app.add_option("--config", flags.config, "JSON config file; flags take precedence")->check(CLI::ExistingFile);
  app.add_flag("--timing", flags.timing, "include wall times in reports");

  auto* constants = app.add_subcommand("constants", "check the published constants");
  auto* identities = app.add_subcommand("identities", "residuals of the operator and potential identities");

  auto* norm = app.add_subcommand("norm", "norm of a function in BMOA, Q_p, M(D_mu) or Lambda(p,1/p)");
  std::string space = "bmoa", function = "hilbert-one";
  std::optional<std::string> norm_measure;
  std::optional<double> norm_p;
  norm->add_option("--space", space, "bmoa | qp | mdmu | lambda")
      ->check(CLI::IsMember({"bmoa", "qp", "mdmu", "lambda"}));
  norm->add_option("--function", function, "JSON, @file, log, hilbert-one, cesaro-one or monomial:<n>");
  norm->add_option("--measure", norm_measure, "JSON, @file, atom, qp:<p> or remark:<a>");
  norm->add_option("--p", norm_p, "exponent for qp and lambda");

  auto* apply = app.add_subcommand("apply", "coefficients of H(f) or C(f)");
  std::string op = "hilbert", apply_function = "monomial:0";
  std::size_t n_out = 32;
  apply->add_option("--operator", op, "hilbert | cesaro")->check(CLI::IsMember({"hilbert", "cesaro"}));
  apply->add_option("--function", apply_function, "input function");
  apply->add_option("--n-out", n_out, "last output coefficient");

  auto* boundedness = app.add_subcommand("boundedness", "ladder test of the boundedness condition");
  std::string bmeasure;
  boundedness->add_option("--measure", bmeasure, "JSON, @file, atom, qp:<p> or remark:<a>")->required();

  auto* potential = app.add_subcommand("potential", "potentials U and V of a measure along a ray");
  std::string pmeasure;
  std::vector<double> radii{0.1, 0.25, 0.5, 0.75, 0.9, 0.99};
  double angle = 0.0;
  potential->add_option("--measure", pmeasure, "measure")->required();
  potential->add_option("--radii", radii, "radii in [0,1)");
  potential->add_option("--angle", angle, "ray angle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const RunConfig cfg = resolve_config(flags, command);
    if (*constants || *identities) {
      const auto rep = *constants ? cmd_constants(cfg) : cmd_identities(cfg);
      write_output(cfg, render_report(rep, cfg));
      return rep.all_pass() ? kExitPass : kExitNumerical;
    }
    if (*norm) return run_norm(cfg, space, function, norm_measure, norm_p);
    if (*apply) return run_apply(cfg, op, apply_function, n_out);
    if (*boundedness) {
      const auto mu = parse_measure_arg(bmeasure);
      const auto rep = cmd_boundedness(mu, cfg);
      write_output(cfg, cfg.emit == EmitFormat::json ? emit_json(boundedness_to_json(mu, rep)) : boundedness_to_csv(rep));
      return kExitPass;
    }
    if (*potential) return run_potential(cfg, pmeasure, radii, angle);
  } catch (const InputError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
