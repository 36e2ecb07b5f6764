#include "scatlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "scatlab/errors.hpp"

namespace scatlab {

using nlohmann::ordered_json;

std::string to_string(ConfigErrorKind k) {
  switch (k) {
    case ConfigErrorKind::Parse: return "parse error";
    case ConfigErrorKind::UnknownOp: return "unknown op";
    case ConfigErrorKind::MissingParameter: return "missing parameter";
    case ConfigErrorKind::BadValue: return "bad value";
  }
  return "config error";
}

// ---- Params ---------------------------------------------------------------

const ParamValue* Params::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

namespace {
[[noreturn]] void bad(const std::string& path, const std::string& key, const std::string& what) {
  throw ConfigError(ConfigErrorKind::BadValue, path + "." + key, what);
}
}  // namespace

double Params::number(const std::string& key) const {
  const ParamValue* v = find(key);
  if (!v) throw ConfigError(ConfigErrorKind::MissingParameter, path_ + "." + key, "required");
  if (const double* d = std::get_if<double>(v)) return *d;
  bad(path_, key, "expected a number");
}

double Params::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::size_t Params::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const double d = number(key);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e9) bad(path_, key, "expected a nonnegative integer");
  return static_cast<std::size_t>(d);
}

bool Params::flag(const std::string& key, bool fallback) const {
  const ParamValue* v = find(key);
  if (!v) return fallback;
  if (const bool* b = std::get_if<bool>(v)) return *b;
  bad(path_, key, "expected true or false");
}

std::string Params::text(const std::string& key) const {
  const ParamValue* v = find(key);
  if (!v) throw ConfigError(ConfigErrorKind::MissingParameter, path_ + "." + key, "required");
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  bad(path_, key, "expected a string");
}

std::string Params::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::vector<double> Params::list(const std::string& key, std::vector<double> fallback) const {
  const ParamValue* v = find(key);
  if (!v) return fallback;
  if (const auto* l = std::get_if<std::vector<double>>(v)) return *l;
  if (const double* d = std::get_if<double>(v)) return {*d};
  bad(path_, key, "expected a list of numbers");
}

// ---- potentials -------------------------------------------------------------

Potential parse_potential(const std::string& spec, const std::string& where) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':' && parts.empty() == false && parts.front() == "table") {
      cur += c;  // paths may contain ':'
      continue;
    }
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  auto num = [&](std::size_t i, double fallback) {
    if (i >= parts.size()) return fallback;
    try {
      std::size_t used = 0;
      const double d = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ConfigError(ConfigErrorKind::BadValue, where, "not a number in '" + spec + "'");
    }
  };
  const std::string& kind = parts.front();
  try {
    if (kind == "zero" && parts.size() == 1) return Potential::zero();
    if (kind == "gaussian" && parts.size() >= 2 && parts.size() <= 3)
      return Potential::gaussian(num(1, 0.0), num(2, 1.0));
    if (kind == "yukawa" && parts.size() >= 2 && parts.size() <= 3)
      return Potential::yukawa(num(1, 0.0), num(2, 1.0));
    if (kind == "aubin_talenti" && parts.size() <= 2) return Potential::aubin_talenti(num(1, 1.0));
    if (kind == "table" && parts.size() == 2) return Potential::load_csv_file(parts[1]);
  } catch (const InvalidArgument& e) {
    throw ConfigError(ConfigErrorKind::BadValue, where, e.what());
  }
  throw ConfigError(ConfigErrorKind::BadValue, where,
                    "unrecognised potential '" + spec +
                        "' (gaussian:A[:s], yukawa:A[:s], aubin_talenti[:lambda], zero, table:path)");
}

// ---- parsing ------------------------------------------------------------------

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string potential_from_json(const ordered_json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (!j.is_object()) throw ConfigError(ConfigErrorKind::BadValue, where, "expected a string or object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ConfigError(ConfigErrorKind::MissingParameter, where + ".kind", "required");
  const std::string kind = j["kind"].get<std::string>();
  auto field = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
      throw ConfigError(ConfigErrorKind::BadValue, where + "." + key, "expected a number");
    return j[key].get<double>();
  };
  std::ostringstream os;
  os.precision(17);
  if (kind == "gaussian" || kind == "yukawa") {
    if (!j.contains("amplitude"))
      throw ConfigError(ConfigErrorKind::MissingParameter, where + ".amplitude", "required");
    os << kind << ':' << field("amplitude", 0.0) << ':' << field("scale", 1.0);
  } else if (kind == "aubin_talenti") {
    os << kind << ':' << field("lambda", 1.0);
  } else if (kind == "zero") {
    os << "zero";
  } else if (kind == "table") {
    if (!j.contains("file") || !j["file"].is_string())
      throw ConfigError(ConfigErrorKind::MissingParameter, where + ".file", "required");
    os << "table:" << j["file"].get<std::string>();
  } else {
    throw ConfigError(ConfigErrorKind::BadValue, where + ".kind", "unknown potential kind '" + kind + "'");
  }
  return os.str();
}

Params params_from_json(const ordered_json& j, const std::string& where) {
  Params p(where);
  if (j.is_null()) return p;
  if (!j.is_object()) throw ConfigError(ConfigErrorKind::BadValue, where, "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string at = where + "." + key;
    if (v.is_boolean()) {
      p.set(key, v.get<bool>());
    } else if (v.is_number()) {
      p.set(key, v.get<double>());
    } else if (v.is_string()) {
      p.set(key, v.get<std::string>());
    } else if (v.is_array()) {
      std::vector<double> xs;
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(ConfigErrorKind::BadValue, at, "arrays must hold numbers");
        xs.push_back(e.get<double>());
      }
      p.set(key, std::move(xs));
    } else if (v.is_object()) {
      p.set(key, potential_from_json(v, at));  // objects are potential specs
    } else {
      throw ConfigError(ConfigErrorKind::BadValue, at, "unsupported value");
    }
  }
  return p;
}

template <class T>
T get_field(const ordered_json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(ConfigErrorKind::BadValue, where + "." + key, "wrong type");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigErrorKind::Parse, origin + " " + line_column(text, e.byte), e.what());
  }
  if (!j.is_object()) throw ConfigError(ConfigErrorKind::Parse, origin, "top level must be an object");
  Scenario s;
  if (!j.contains("name") || !j["name"].is_string())
    throw ConfigError(ConfigErrorKind::MissingParameter, "name", "required string");
  s.name = j["name"].get<std::string>();
  s.description = get_field<std::string>(j, "description", "", "");
  s.expected_runtime = get_field<double>(j, "expected_runtime", "", 0.0);
  const double seed = get_field<double>(j, "seed", "", 7.0);
  if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 4294967295.0)
    throw ConfigError(ConfigErrorKind::BadValue, "seed", "expected a 32-bit unsigned integer");
  s.seed = static_cast<unsigned>(seed);
  s.output = get_field<std::string>(j, "output", "", "");
  if (j.contains("potential")) s.potential = potential_from_json(j["potential"], "potential");
  parse_potential(s.potential, "potential");
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object()) throw ConfigError(ConfigErrorKind::BadValue, "grid", "expected an object");
    s.r_max = get_field<double>(g, "r_max", "grid", 0.0);
    const double pts = get_field<double>(g, "points", "grid", 0.0);
    if (!(s.r_max >= 0.0)) throw ConfigError(ConfigErrorKind::BadValue, "grid.r_max", "must be >= 0");
    if (!(pts >= 0.0) || pts != std::floor(pts))
      throw ConfigError(ConfigErrorKind::BadValue, "grid.points", "expected a nonnegative integer");
    s.points = static_cast<std::size_t>(pts);
  }
  if (j.contains("pipeline")) {
    if (!j["pipeline"].is_array()) throw ConfigError(ConfigErrorKind::BadValue, "pipeline", "expected an array");
    std::size_t k = 0;
    for (const auto& st : j["pipeline"]) {
      const std::string at = "pipeline[" + std::to_string(k++) + "]";
      if (!st.is_object()) throw ConfigError(ConfigErrorKind::BadValue, at, "expected an object");
      if (!st.contains("op") || !st["op"].is_string())
        throw ConfigError(ConfigErrorKind::MissingParameter, at + ".op", "required string");
      Step step;
      step.op = st["op"].get<std::string>();
      step.params = params_from_json(st.contains("params") ? st["params"] : ordered_json(), at + ".params");
      if (st.contains("expect")) {
        const auto& ex = st["expect"];
        if (!ex.is_object()) throw ConfigError(ConfigErrorKind::BadValue, at + ".expect", "expected an object");
        for (const auto& [metric, range] : ex.items()) {
          const std::string er = at + ".expect." + metric;
          Expectation e;
          e.metric = metric;
          if (range.is_number()) {
            e.min = e.max = range.get<double>();
          } else if (range.is_boolean()) {
            e.min = e.max = range.get<bool>() ? 1.0 : 0.0;
          } else if (range.is_object()) {
            if (range.contains("min")) e.min = get_field<double>(range, "min", er, 0.0);
            if (range.contains("max")) e.max = get_field<double>(range, "max", er, 0.0);
            if (!e.min && !e.max) throw ConfigError(ConfigErrorKind::BadValue, er, "needs min and/or max");
          } else {
            throw ConfigError(ConfigErrorKind::BadValue, er, "expected a number, boolean or {min,max}");
          }
          step.expect.push_back(std::move(e));
        }
      }
      s.pipeline.push_back(std::move(step));
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorKind::Parse, path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

void validate_scenario(const Scenario& s) {
  for (std::size_t k = 0; k < s.pipeline.size(); ++k) {
    const Step& st = s.pipeline[k];
    const auto& cat = op_catalog();
    auto it = std::find_if(cat.begin(), cat.end(), [&](const OpInfo& o) { return o.name == st.op; });
    const std::string at = "pipeline[" + std::to_string(k) + "]";
    if (it == cat.end()) throw ConfigError(ConfigErrorKind::UnknownOp, at + ".op", "no op named '" + st.op + "'");
    for (const auto& req : it->required)
      if (!st.params.has(req))
        throw ConfigError(ConfigErrorKind::MissingParameter, at + ".params." + req, "required by " + st.op);
    for (const auto& [key, v] : st.params.values())
      if (const auto* spec = std::get_if<std::string>(&v))
        if (key == "potential" || key == "regular" || key == "resonant")
          parse_potential(*spec, at + ".params." + key);
  }
}

double OpOutcome::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw InvalidArgument("no metric '" + name + "'");
}

// ---- runner -----------------------------------------------------------------------

namespace {

std::filesystem::path resolve_out_dir(const Scenario& s, const RunOptions& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (!s.output.empty()) return s.output;
  const char* env = std::getenv("SCATLAB_OUT");
  const std::filesystem::path base = env && *env ? env : "scatlab-out";
  return base / s.name;
}

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  validate_scenario(s);
  RunResult res;
  res.out_dir = resolve_out_dir(s, opts);
  OpContext ctx;
  ctx.seed = opts.seed.value_or(s.seed);
  ctx.potential = s.potential;
  ctx.r_max = s.r_max;
  ctx.points = s.points;

  std::map<std::string, int> uses;
  for (const auto& st : s.pipeline) ++uses[st.op];

  ordered_json summary;
  summary["scenario"] = s.name;
  summary["seed"] = ctx.seed;
  summary["steps"] = ordered_json::array();
  auto worsen = [&](ExitCode c) {
    if (static_cast<int>(c) > static_cast<int>(res.code)) res.code = c;
  };

  for (std::size_t k = 0; k < s.pipeline.size(); ++k) {
    const Step& st = s.pipeline[k];
    StepResult sr;
    sr.op = st.op;
    const std::string prefix = uses[st.op] > 1 ? st.op + std::to_string(k + 1) : st.op;
    OpOutcome out;
    try {
      out = run_op(st.op, st.params, ctx);
    } catch (const NumericError& e) {
      sr.error = e.what();
    } catch (const InvalidArgument& e) {
      sr.error = e.what();
    }
    ordered_json js;
    js["op"] = st.op;
    if (!sr.error.empty()) {
      worsen(ExitCode::NumericFailure);
      js["error"] = sr.error;
    } else {
      sr.metrics = out.metrics;
      for (const auto& e : st.expect) {
        auto it = std::find_if(out.metrics.begin(), out.metrics.end(),
                               [&](const auto& m) { return m.first == e.metric; });
        if (it == out.metrics.end()) {
          sr.failures.push_back(e.metric + ": not produced by " + st.op);
          worsen(ExitCode::ConfigError);
          continue;
        }
        const double v = it->second;
        if ((e.min && !(v >= *e.min)) || (e.max && !(v <= *e.max))) {
          std::ostringstream os;
          os.precision(6);
          os << e.metric << " = " << v << " outside [" << (e.min ? std::to_string(*e.min) : "-inf") << ", "
             << (e.max ? std::to_string(*e.max) : "inf") << "]";
          sr.failures.push_back(os.str());
          worsen(ExitCode::AssertionFailed);
        }
      }
      ordered_json m = ordered_json::object();
      for (const auto& [name, v] : out.metrics) m[name] = v;
      js["metrics"] = m;
      js["failures"] = sr.failures;
      if (opts.write_artifacts) {
        for (const auto& [stem, table] : out.tables) {
          const auto path = res.out_dir / (prefix + "_" + stem + ".csv");
          write_atomic(path, table.to_string());
          sr.artifacts.push_back(path);
        }
        for (auto [stem, plot] : out.plots) {
          plot.data_file = prefix + "_" + stem + ".csv";
          const auto path = res.out_dir / (prefix + "_" + stem + ".gp");
          write_atomic(path, gnuplot_script(plot, prefix + "_" + stem + ".png"));
          sr.artifacts.push_back(path);
        }
        const auto rp = res.out_dir / (prefix + "_report.json");
        write_atomic(rp, out.report + "\n");
        sr.artifacts.push_back(rp);
      }
    }
    summary["steps"].push_back(js);
    res.steps.push_back(std::move(sr));
  }
  if (opts.write_artifacts && !s.pipeline.empty()) {
    summary["exit_code"] = static_cast<int>(res.code);
    write_atomic(res.out_dir / "summary.json", summary.dump(2) + "\n");
  }
  switch (res.code) {
    case ExitCode::Success: res.message = "ok"; break;
    case ExitCode::AssertionFailed: res.message = "expectation failed"; break;
    case ExitCode::NumericFailure: res.message = "numeric error"; break;
    case ExitCode::ConfigError: res.message = "configuration error"; break;
  }
  return res;
}

// ---- built-in catalogue ----------------------------------------------------------------

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> list{
      {"free_decay", "free radial flow: sup norm decays like t^-3/2 on [5, 50]", 1, R"({
  "name": "free_decay", "expected_runtime": 1,
  "pipeline": [{"op": "free_decay", "params": {"t_min": 5, "t_max": 50},
                "expect": {"exponent": {"min": 1.45, "max": 1.55}}}]})"},
      {"wave_operator", "Cook W_+ for the A = 0.5 Gaussian: defects at T = 50 and their decrease at T = 100", 200, R"({
  "name": "wave_operator", "expected_runtime": 200, "potential": "gaussian:0.5",
  "pipeline": [{"op": "wave_operator", "params": {"horizon": 50, "doubling": true},
                "expect": {"relative_defect": {"max": 0.01}, "isometry_ratio": {"max": 0.65},
                           "intertwining_ratio": {"max": 0.65}}}]})"},
      {"w1_cross_check", "structure-formula W1 vs Dyson W1 on 3 held-out (V, f) pairs", 40, R"({
  "name": "w1_cross_check", "expected_runtime": 40,
  "pipeline": [{"op": "w1_cross_check", "params": {"horizon": 60, "r_eval": 15},
                "expect": {"heldout_max_rel_l2": {"max": 0.05}, "heldout_pairs": {"min": 3}}}]})"},
      {"born_series", "Born series vs direct inversion; divergence for -5W^4 at lambda = 0.1", 6, R"({
  "name": "born_series", "expected_runtime": 6, "potential": "gaussian:0.5",
  "pipeline": [{"op": "born_series", "params": {"lambdas": [0.5, 1, 2]},
                "expect": {"max_disagreement": {"max": 1e-6}, "all_convergent": true,
                           "resonant_divergent": true}}]})"},
      {"zero_energy", "zero-energy resonance of -5W^4 and regularity of the A = 0.5 Gaussian", 8, R"({
  "name": "zero_energy", "expected_runtime": 8,
  "pipeline": [{"op": "zero_energy", "params": {"levels": [256, 512, 1024, 2048]},
                "expect": {"resonant_nonregular": true, "null_residual": {"max": 1e-3},
                           "sigma_decreasing": true, "negative_eigenvalues": 1,
                           "regular_regular": true, "regular_m00": {"max": 1.4666666666666666}}}]})"},
      {"resonant_decay", "sup-norm decay: regular t^-3/2 against resonant t^-1/2", 75, R"({
  "name": "resonant_decay", "expected_runtime": 75,
  "pipeline": [{"op": "resonant_decay",
                "params": {"regular": "gaussian:0.5", "resonant": "aubin_talenti:2",
                           "reference": "aubin_talenti:1", "spacing": 0.05},
                "expect": {"regular_exponent": {"min": 1.35, "max": 1.65},
                           "resonant_exponent": {"min": 0.35, "max": 0.65},
                           "gap": {"min": 0.7, "max": 1.3}}}]})"},
      {"wiener", "Wiener inversion of 1 + T^- and the symbol failure for -5W^4", 40, R"({
  "name": "wiener", "expected_runtime": 40, "potential": "gaussian:0.5",
  "pipeline": [{"op": "wiener",
                "expect": {"left_residual": {"max": 1e-6}, "right_residual": {"max": 1e-6},
                           "neumann_difference": {"max": 1e-5}, "symbol_error": {"max": 1e-6},
                           "resonant_noninvertible": true,
                           "resonant_lambda": {"min": -0.1, "max": 0.1},
                           "scalar_residual": {"max": 1e-8}, "scalar_zero_detected": true}}]})"},
      {"kato", "Kato norm of exp(-r^2) and the T^- algebra-norm bound", 1, R"({
  "name": "kato", "expected_runtime": 1, "potential": "gaussian:0.5",
  "pipeline": [{"op": "kato",
                "expect": {"kato_error": {"max": 1e-4}, "bound_ratio": {"min": 0.95, "max": 1.05}}}]})"},
      {"tomas", "sphere Fourier decay, dyadic Tomas slopes and the Knapp cap", 5, R"({
  "name": "tomas", "expected_runtime": 5,
  "pipeline": [{"op": "tomas",
                "expect": {"sigma_decay_exponent": {"min": 0.95, "max": 1.05},
                           "slope_1_inf": {"min": -1.1, "max": -0.9},
                           "slope_2_2": {"min": 0.9, "max": 1.1},
                           "critical_index": {"min": 1.2833333333333332, "max": 1.3833333333333333},
                           "knapp_variation": {"max": 2},
                           "long_exponent": {"min": 1.8, "max": 2.2},
                           "short_exponent": {"min": 0.8, "max": 1.2},
                           "peak_exponent": {"min": -2.2, "max": -1.8}}}]})"},
      {"strichartz_nls", "1D L^6 Strichartz ratio and the small-data quintic NLS", 1, R"({
  "name": "strichartz_nls", "expected_runtime": 1, "seed": 7,
  "pipeline": [{"op": "strichartz_nls",
                "expect": {"strichartz_relative_change": {"max": 0.1},
                           "strichartz_scaling_defect": {"max": 1e-3},
                           "nls_contraction": {"max": 0.5}, "nls_converged": true,
                           "nls_direct_difference": {"max": 1e-4},
                           "nls_scaling_defect": {"max": 1e-3}}}]})"},
      {"algebra_axioms", "convolution algebra axioms on 10 seeded random families", 1, R"({
  "name": "algebra_axioms", "expected_runtime": 1, "seed": 7,
  "pipeline": [{"op": "algebra_axioms", "params": {"instances": 10},
                "expect": {"associativity_error": {"max": 1e-8}, "homomorphism_error": {"max": 1e-8},
                           "submultiplicativity_slack": {"min": 0}, "norm_bound_slack": {"min": 0},
                           "unit_error": {"max": 1e-10}}}]})"},
  };
  return list;
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
  for (const auto& b : builtin_scenarios()) {
    if (b.name != name) continue;
    Scenario s = parse_scenario(b.json, "builtin:" + name);
    s.description = b.description;
    return s;
  }
  return std::nullopt;
}

}  // namespace scatlab
