#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "measures.hpp"
#include "series.hpp"

namespace hilbertop {

using json = nlohmann::json;

/// Malformed user input (command line, config or JSON documents).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw InputError(what + ": cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline double number_field(const json& j, const std::string& key, const std::string& where) {
  return number_at(field(j, key, where), where + "/" + key);
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InputError(where + ": unknown field '" + k + "'");
  }
}

template <typename F>
auto with_input_context(const std::string& where, F&& build) {
  try {
    return build();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

}  // namespace detail

/// A number or [re, im].
inline cplx complex_from_json(const json& j, const std::string& where = "") {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InputError(where + ": expected a number or [re, im]");
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

// Measures: {"kind": "qp", "p": ..} | {"kind": "remark", "a": ..}
// | {"kind": "atomic", "points": [..], "masses": [..]}
// | {"kind": "radial", "profile": {"name": .., "params": [..]}, "atoms": [{"radius": .., "mass": ..}]}
// each with an optional positive "scale".

inline MeasureDescriptor measure_from_json(const json& j, const std::string& where = "measure") {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  const auto& kind_j = detail::field(j, "kind", where);
  if (!kind_j.is_string()) throw InputError(where + "/kind: expected a string");
  const std::string kind = kind_j.get<std::string>();
  MeasureDescriptor mu = detail::with_input_context(where, [&]() -> MeasureDescriptor {
    if (kind == "qp") {
      detail::reject_unknown(j, {"kind", "p", "scale"}, where);
      return MeasureDescriptor::qp(detail::number_field(j, "p", where));
    }
    if (kind == "remark") {
      detail::reject_unknown(j, {"kind", "a", "scale"}, where);
      return MeasureDescriptor::remark(detail::number_field(j, "a", where));
    }
    if (kind == "atomic") {
      detail::reject_unknown(j, {"kind", "points", "masses", "scale"}, where);
      const auto& pts = detail::field(j, "points", where);
      const auto& ms = detail::field(j, "masses", where);
      if (!pts.is_array() || !ms.is_array()) throw InputError(where + ": points and masses must be arrays");
      AtomicMeasure m;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        m.points.push_back(complex_from_json(pts[i], where + "/points/" + std::to_string(i)));
      }
      for (std::size_t i = 0; i < ms.size(); ++i) {
        m.masses.push_back(detail::number_at(ms[i], where + "/masses/" + std::to_string(i)));
      }
      m.validate();
      return MeasureDescriptor::atomic(std::move(m));
    }
    if (kind == "radial") {
      detail::reject_unknown(j, {"kind", "profile", "atoms", "scale"}, where);
      RadialMeasure m;
      std::optional<ProfileSpec> spec;
      if (j.contains("profile")) {
        const auto& pj = j["profile"];
        const std::string pw = where + "/profile";
        const auto& name = detail::field(pj, "name", pw);
        if (!name.is_string()) throw InputError(pw + "/name: expected a string");
        ProfileSpec s{name.get<std::string>(), {}};
        const auto& params = detail::field(pj, "params", pw);
        if (!params.is_array()) throw InputError(pw + "/params: expected an array");
        for (std::size_t i = 0; i < params.size(); ++i) {
          s.params.push_back(detail::number_at(params[i], pw + "/params/" + std::to_string(i)));
        }
        m = make_profile_measure(s);
        spec = s;
      }
      if (j.contains("atoms")) {
        const auto& aj = j["atoms"];
        if (!aj.is_array()) throw InputError(where + "/atoms: expected an array");
        for (std::size_t i = 0; i < aj.size(); ++i) {
          const std::string aw = where + "/atoms/" + std::to_string(i);
          m.atoms.push_back({detail::number_field(aj[i], "radius", aw), detail::number_field(aj[i], "mass", aw)});
        }
      }
      if (m.trivially_zero()) throw InputError(where + ": a radial measure needs a profile or atoms");
      return MeasureDescriptor::radial(std::move(m), spec);
    }
    throw InputError(where + "/kind: unknown kind '" + kind + "'");
  });
  if (j.contains("scale")) {
    const double c = detail::number_field(j, "scale", where);
    mu = detail::with_input_context(where + "/scale", [&] { return mu.scaled(c); });
  }
  return mu;
}

inline json measure_to_json(const MeasureDescriptor& mu) {
  json j;
  j["kind"] = to_string(mu.kind());
  switch (mu.kind()) {
    case MeasureKind::qp: j["p"] = mu.parameter(); break;
    case MeasureKind::remark: j["a"] = mu.parameter(); break;
    case MeasureKind::atomic: {
      json pts = json::array(), ms = json::array();
      for (std::size_t i = 0; i < mu.atoms().points.size(); ++i) {
        pts.push_back(complex_to_json(mu.atoms().points[i]));
        ms.push_back(mu.atoms().masses[i]);
      }
      j["points"] = pts;
      j["masses"] = ms;
      break;
    }
    case MeasureKind::radial: {
      const auto m = *mu.radial_view();
      if (const auto& s = mu.profile_spec()) {
        j["profile"] = {{"name", s->name}, {"params", s->params}};
      } else if (m.density) {
        j["profile"] = "custom";
      }
      if (!m.atoms.empty()) {
        json aj = json::array();
        for (const auto& a : m.atoms) aj.push_back({{"radius", a.radius}, {"mass", a.mass / mu.scale()}});
        j["atoms"] = aj;
      }
      break;
    }
  }
  if (mu.kind() != MeasureKind::atomic && mu.scale() != 1.0) j["scale"] = mu.scale();
  return j;
}

/// JSON text, @file, or a shorthand: atom | qp:<p> | remark:<a>.
inline MeasureDescriptor parse_measure_arg(const std::string& arg) {
  if (arg.empty()) throw InputError("measure: empty argument");
  if (arg.front() == '{') return measure_from_json(detail::parse_json_text(arg, "measure"));
  if (arg.front() == '@') {
    const auto path = arg.substr(1);
    return measure_from_json(detail::parse_json_text(detail::read_text_file(path, "measure"), "measure " + path));
  }
  if (arg == "atom") return MeasureDescriptor::unit_atom();
  const auto colon = arg.find(':');
  if (colon != std::string::npos) {
    const std::string name = arg.substr(0, colon), value = arg.substr(colon + 1);
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') throw InputError("measure: '" + value + "' is not a number");
    if (name == "qp") return measure_from_json({{"kind", "qp"}, {"p", x}});
    if (name == "remark") return measure_from_json({{"kind", "remark"}, {"a", x}});
  }
  throw InputError("measure: unrecognised '" + arg + "' (use JSON, @file, atom, qp:<p> or remark:<a>)");
}

// Functions: {"coeffs": [..], "tail": {"scale": .., "offset": ..}}.

inline TaylorPolynomial function_from_json(const json& j, const std::string& where = "function") {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  detail::reject_unknown(j, {"coeffs", "tail"}, where);
  const auto& cj = detail::field(j, "coeffs", where);
  if (!cj.is_array() || cj.empty()) throw InputError(where + "/coeffs: expected a non-empty array");
  std::vector<cplx> a;
  for (std::size_t i = 0; i < cj.size(); ++i) a.push_back(complex_from_json(cj[i], where + "/coeffs/" + std::to_string(i)));
  std::optional<CoefficientTail> tail;
  if (j.contains("tail")) {
    const std::string tw = where + "/tail";
    detail::reject_unknown(j["tail"], {"scale", "offset"}, tw);
    CoefficientTail t;
    t.scale = complex_from_json(detail::field(j["tail"], "scale", tw), tw + "/scale");
    t.offset = j["tail"].contains("offset") ? detail::number_field(j["tail"], "offset", tw) : 0.0;
    if (!(static_cast<double>(a.size()) + t.offset > 0.0)) throw InputError(tw + "/offset: tail denominator vanishes");
    tail = t;
  }
  return TaylorPolynomial(std::move(a), tail);
}

inline json function_to_json(const TaylorPolynomial& f) {
  json c = json::array();
  for (cplx a : f.coeffs()) c.push_back(complex_to_json(a));
  json j{{"coeffs", c}};
  if (f.tail()) j["tail"] = {{"scale", complex_to_json(f.tail()->scale)}, {"offset", f.tail()->offset}};
  return j;
}

/// JSON text, @file, or a name: log | hilbert-one | cesaro-one | monomial:<n>.
inline TaylorPolynomial parse_function_arg(const std::string& arg, std::size_t degree) {
  if (arg.empty()) throw InputError("function: empty argument");
  if (arg.front() == '{') return function_from_json(detail::parse_json_text(arg, "function"));
  if (arg.front() == '@') {
    const auto path = arg.substr(1);
    return function_from_json(detail::parse_json_text(detail::read_text_file(path, "function"), "function " + path));
  }
  if (arg == "log") return log_series(degree);
  if (arg == "hilbert-one" || arg == "cesaro-one") return hilbert_one_series(degree);
  if (arg.rfind("monomial:", 0) == 0) {
    const std::string v = arg.substr(9);
    char* end = nullptr;
    const long n = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || n < 0) throw InputError("function: bad monomial degree '" + v + "'");
    return TaylorPolynomial::monomial(static_cast<std::size_t>(n));
  }
  throw InputError("function: unrecognised '" + arg + "' (use JSON, @file, log, hilbert-one, cesaro-one or monomial:<n>)");
}

}  // namespace hilbertop
