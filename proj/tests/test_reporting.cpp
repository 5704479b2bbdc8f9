#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hilbertop/report.hpp"

using namespace hilbertop;

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    rows.push_back(fields);
  }
  return rows;
}

RowSpec fixed_row(std::string name, RowClass cls, double tol, double computed, double reference) {
  return {std::move(name), "anchor", cls, tol, "ref", "closed-form", [reference] { return reference; },
          [computed] { return computed; }};
}

}  // namespace

TEST(MeasureJson, RoundTripEachKind) {
  const std::vector<std::string> docs{
      R"({"kind":"qp","p":0.5})",
      R"({"kind":"remark","a":1.0,"scale":2.0})",
      R"({"kind":"atomic","points":[[0.1,-0.2],0.5],"masses":[1.0,0.25]})",
      R"({"kind":"radial","profile":{"name":"power","params":[1.0,-0.5]},"atoms":[{"radius":0.5,"mass":2.0}],"scale":3.0})",
  };
  for (const auto& d : docs) {
    const auto mu = parse_measure_arg(d);
    const auto back = measure_from_json(measure_to_json(mu));
    EXPECT_EQ(measure_to_json(back), measure_to_json(mu)) << d;
    EXPECT_NEAR(total_moment(back).value, total_moment(mu).value, 1e-12 * total_moment(mu).value) << d;
  }
}

TEST(MeasureJson, ScaleApplies) {
  const auto a = parse_measure_arg(R"({"kind":"qp","p":0.5})");
  const auto b = parse_measure_arg(R"({"kind":"qp","p":0.5,"scale":3})");
  EXPECT_NEAR(potential_u_radial(*b.radial_view(), 0.4), 3.0 * potential_u_radial(*a.radial_view(), 0.4), 1e-12);
}

TEST(MeasureJson, Shorthands) {
  EXPECT_EQ(parse_measure_arg("atom").kind(), MeasureKind::atomic);
  EXPECT_EQ(parse_measure_arg("qp:0.25").parameter(), 0.25);
  EXPECT_EQ(parse_measure_arg("remark:2").kind(), MeasureKind::remark);
  EXPECT_THROW(parse_measure_arg("qp:x"), InputError);
  EXPECT_THROW(parse_measure_arg("ball"), InputError);
}

TEST(MeasureJson, ErrorsCarryPosition) {
  try {
    parse_measure_arg(R"({"kind":"qp","p":})");
    FAIL() << "expected a parse error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("byte 18"), std::string::npos) << e.what();
  }
  try {
    parse_measure_arg(R"({"kind":"atomic","points":[[0.1,0.2],[2,"x"]],"masses":[1,1]})");
    FAIL() << "expected a field error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("measure/points/1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_measure_arg(R"({"kind":"qp"})"), InputError);
  EXPECT_THROW(parse_measure_arg(R"({"kind":"qp","p":0.5,"q":1})"), InputError);
  EXPECT_THROW(parse_measure_arg(R"({"kind":"qp","p":1.5})"), InputError);
  EXPECT_THROW(parse_measure_arg(R"({"kind":"atomic","points":[[0.9,0.9]],"masses":[1]})"), InputError);
  EXPECT_THROW(parse_measure_arg(R"({"kind":"radial"})"), InputError);
  EXPECT_THROW(parse_measure_arg(R"({"kind":"torus"})"), InputError);
  EXPECT_THROW(parse_measure_arg(R"({"kind":"qp","p":0.5,"scale":-1})"), InputError);
}

TEST(FunctionJson, RoundTripAndNames) {
  const auto f = parse_function_arg(R"({"coeffs":[1,[0,2],-0.5],"tail":{"scale":[1,0],"offset":1}})", 16);
  EXPECT_EQ(f.degree(), 2u);
  EXPECT_EQ(f[1], cplx(0, 2));
  ASSERT_TRUE(f.tail());
  EXPECT_EQ(f.tail()->offset, 1.0);
  const auto back = function_from_json(function_to_json(f));
  EXPECT_EQ(function_to_json(back), function_to_json(f));
  EXPECT_EQ(parse_function_arg("log", 64).degree(), 64u);
  EXPECT_EQ(parse_function_arg("hilbert-one", 32)[3], cplx(0.25));
  EXPECT_EQ(parse_function_arg("cesaro-one", 32)[3], cplx(0.25));
  EXPECT_EQ(parse_function_arg("monomial:3", 16)[3], cplx(1.0));
  EXPECT_THROW(parse_function_arg("sine", 16), InputError);
  EXPECT_THROW(parse_function_arg(R"({"coeffs":[]})", 16), InputError);
}

TEST(RunConfigTest, JsonOverridesAndValidation) {
  RunConfig cfg;
  apply_config_json(cfg, json::parse(R"({"tol_sup":1e-6,"degree":64,"emit":"csv","seed":9})"));
  EXPECT_EQ(*cfg.tol_sup, 1e-6);
  EXPECT_EQ(cfg.degree, 64u);
  EXPECT_EQ(cfg.emit, EmitFormat::csv);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_FALSE(cfg.tol_quad);
  EXPECT_THROW(apply_config_json(cfg, json::parse(R"({"colour":1})")), InputError);
  EXPECT_THROW(apply_config_json(cfg, json::parse(R"({"degree":-3})")), InputError);
  RunConfig small;
  small.degree = 8;
  EXPECT_THROW(small.validate(), InputError);
  RunConfig zero;
  zero.tol_quad = 0.0;
  EXPECT_THROW(zero.validate(), InputError);
}

TEST(ReportRows, PassIffErrorWithinTolerance) {
  const RunConfig cfg;
  const auto ok = run_row(fixed_row("a", RowClass::quadrature, 1e-3, 1.0005, 1.0), cfg);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.abs_error, 5e-4, 1e-15);
  EXPECT_FALSE(run_row(fixed_row("b", RowClass::quadrature, 1e-4, 1.0005, 1.0), cfg).pass);
  EXPECT_FALSE(run_row(fixed_row("c", RowClass::exact, 1.0, std::nan(""), 1.0), cfg).pass);
}

TEST(ReportRows, OverridesByClass) {
  RunConfig cfg;
  cfg.tol_sup = 1e-6;
  EXPECT_FALSE(run_row(fixed_row("s", RowClass::sup, 2e-2, 1.001, 1.0), cfg).pass);
  EXPECT_TRUE(run_row(fixed_row("q", RowClass::quadrature, 2e-2, 1.001, 1.0), cfg).pass);
  cfg.tol_quad = 1e-9;
  EXPECT_FALSE(run_row(fixed_row("q", RowClass::quadrature, 2e-2, 1.001, 1.0), cfg).pass);
  EXPECT_TRUE(run_row(fixed_row("e", RowClass::exact, 2e-2, 1.001, 1.0), cfg).pass);
}

TEST(ReportRows, ExceptionsBecomeFailedRows) {
  const RunConfig cfg;
  RowSpec spec = fixed_row("x", RowClass::sup, 1.0, 0.0, 0.0);
  spec.compute = []() -> double { throw NonFiniteError("integrand is not finite"); };
  const auto row = run_row(spec, cfg);
  EXPECT_FALSE(row.pass);
  EXPECT_EQ(row.note, "integrand is not finite");
}

TEST(ReportRender, CsvMatchesJson) {
  RunConfig cfg;
  ConstantsReport rep{"demo", {}};
  rep.rows.push_back(run_row(fixed_row("one, two", RowClass::sup, 1e-3, std::numbers::pi, 3.14159), cfg));
  rep.rows.push_back(run_row(fixed_row("e", RowClass::quadrature, 1e-20, std::numbers::e, 2.7), cfg));
  const json j = report_to_json(rep, cfg);
  const auto csv = split_csv(report_to_csv(rep, cfg));
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[0][0], "name");
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(csv[i + 1][0], j["rows"][i]["name"].get<std::string>());
    EXPECT_EQ(std::stod(csv[i + 1][1]), j["rows"][i]["computed"].get<double>());
    EXPECT_EQ(std::stod(csv[i + 1][2]), j["rows"][i]["reference"].get<double>());
    EXPECT_EQ(csv[i + 1][5], j["rows"][i]["pass"].get<bool>() ? "true" : "false");
  }
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_FALSE(j["rows"][0].contains("wall_time"));
  cfg.timing = true;
  EXPECT_TRUE(report_to_json(ConstantsReport{"t", {run_row(fixed_row("t", RowClass::sup, 1, 0, 0), cfg)}}, cfg)["rows"][0]
                  .contains("wall_time"));
}

TEST(Commands, IdentitiesDeterministicAndPassing) {
  RunConfig cfg;
  cfg.seed = 5;
  const IdentityBattery small{10, 5, 4};
  const auto a = render_report(cmd_identities(cfg, small), cfg);
  const auto rep = cmd_identities(cfg, small);
  EXPECT_EQ(a, render_report(rep, cfg));
  EXPECT_TRUE(rep.all_pass()) << a;
  for (const auto& r : rep.rows) EXPECT_FALSE(r.anchor.empty());
}

TEST(Commands, ConstantsDefaultPassTightenedFail) {
  RunConfig cfg;
  const auto rep = cmd_constants(cfg);
  EXPECT_TRUE(rep.all_pass()) << render_report(rep, cfg);
  cfg.tol_sup = 1e-6;
  const auto tight = cmd_constants(cfg);
  EXPECT_FALSE(tight.all_pass());
  for (const auto& r : tight.rows) {
    if (r.row_class != RowClass::sup) {
      EXPECT_TRUE(r.pass) << r.name;
    }
    EXPECT_EQ(r.pass, r.abs_error <= r.tolerance) << r.name;
  }
}

TEST(Commands, BoundednessVerdicts) {
  const RunConfig cfg;
  EXPECT_EQ(cmd_boundedness(parse_measure_arg("atom"), cfg).verdict, Verdict::bounded);
  EXPECT_EQ(cmd_boundedness(parse_measure_arg("qp:0.5"), cfg).verdict, Verdict::bounded);
  const auto mu = parse_measure_arg("remark:0.5");
  const auto rep = cmd_boundedness(mu, cfg);
  EXPECT_EQ(rep.verdict, Verdict::divergent);
  const auto j = boundedness_to_json(mu, rep);
  EXPECT_EQ(j["verdict"], "DIVERGENT");
  EXPECT_EQ(j["ladder"].size(), rep.rows.size());
  EXPECT_EQ(split_csv(boundedness_to_csv(rep)).size(), 1 + rep.rows.size() * rep.rows[0].values.size());
}
