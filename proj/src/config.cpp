#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "monge/cli.hpp"
#include "monge/io.hpp"

namespace monge {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidSpec:
    case ErrorCode::NonPositiveDensity:
    case ErrorCode::NotADensity:
      return kExitConfig;
    case ErrorCode::CapacityError:
      return kExitCapacity;
    default:
      return kExitSolver;
  }
}

ApproxParams RunConfig::params(double epsilon) const {
  ApproxParams p;
  p.epsilon = epsilon;
  p.grid_n = grid_n;
  p.root_tol = root_tol;
  p.quad_tol = quad_tol;
  return p;
}

std::string epsilon_dir(double epsilon) { return "eps_" + format_double(epsilon); }

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ConfigError, what); }

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) bad("unknown key '" + k + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing key '") + key + "' in " + where);
  return *it;
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) bad(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(what + " must be finite");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& what) {
  if (!v.is_array()) bad(what + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval(const json& v, const std::string& what) {
  const auto xs = numbers(v, what);
  if (xs.size() != 2) bad(what + " must have exactly two entries");
  return {xs[0], xs[1]};
}

bool boolean(const json& v, const std::string& what) {
  if (!v.is_boolean()) bad(what + " must be true or false");
  return v.get<bool>();
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) bad(what + " must be an integer");
  return v.get<int>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to 1-based line and column.
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + at, '\n'));
    const std::size_t nl = text.rfind('\n', at == 0 ? 0 : at - 1);
    const std::size_t col = nl == std::string::npos || at == 0 ? at + 1 : at - nl;
    std::ostringstream os;
    os << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
    bad(os.str());
  }
}

SourceDensity density_from(const json& d, Interval support) {
  if (!d.is_object()) bad("source.density must be an object");
  const std::string kind = [&] {
    const json& k = require(d, "kind", "source.density");
    if (!k.is_string()) bad("source.density.kind must be a string");
    return k.get<std::string>();
  }();
  if (kind == "uniform") {
    only_keys(d, {"kind"}, "source.density");
    return SourceDensity::uniform(support);
  }
  if (kind == "piecewise_linear" || kind == "tabulated") {
    only_keys(d, {"kind", "nodes", "values"}, "source.density");
    auto nodes = numbers(require(d, "nodes", "source.density"), "source.density.nodes");
    auto values = numbers(require(d, "values", "source.density"), "source.density.values");
    if (nodes.size() < 2 || nodes.size() != values.size()) {
      bad("source.density needs >= 2 nodes and as many values");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (!(nodes[i] > nodes[i - 1])) bad("source.density.nodes must be strictly increasing");
    }
    return kind == "tabulated" ? SourceDensity::tabulated(std::move(nodes), std::move(values))
                               : SourceDensity::piecewise_linear(std::move(nodes), std::move(values));
  }
  bad("source.density.kind must be uniform, piecewise_linear or tabulated (got '" + kind + "')");
}

MongeProblemSpec problem_from(const json& doc, bool renormalize) {
  MongeProblemSpec spec;
  const json& as = require(doc, "assumption", "config");
  if (!as.is_string() || (as != "I" && as != "II")) bad("assumption must be \"I\" or \"II\"");
  spec.assumption = as == "I" ? Assumption::I : Assumption::II;

  const json& src = require(doc, "source", "config");
  if (!src.is_object()) bad("source must be an object");
  only_keys(src, {"interval", "density"}, "source");
  spec.source = interval(require(src, "interval", "source"), "source.interval");
  spec.target = interval(require(doc, "target", "config"), "target");
  spec.alpha = number(require(doc, "alpha", "config"), "alpha");
  if (!(spec.source.hi > spec.source.lo)) fail(ErrorCode::InvalidSpec, "a < b violated");
  spec.density = src.contains("density") ? density_from(src["density"], spec.source) : SourceDensity::uniform(spec.source);
  if (renormalize) spec.density = normalize_density(spec.density);
  return spec;
}

json density_json(const SourceDensity& d) {
  json j;
  j["kind"] = to_string(d.kind());
  if (d.kind() != SourceDensity::Kind::Uniform) {
    j["nodes"] = d.nodes();
    j["values"] = d.values();
  }
  return j;
}

}  // namespace

MongeProblemSpec parse_problem(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) bad("problem document must be a JSON object");
  only_keys(doc, {"assumption", "source", "target", "alpha"}, "problem");
  return problem_from(doc, false);
}

std::string problem_to_json(const MongeProblemSpec& spec) {
  nlohmann::ordered_json j;
  j["assumption"] = std::string(to_string(spec.assumption));
  j["source"]["interval"] = {spec.source.lo, spec.source.hi};
  j["source"]["density"] = density_json(spec.density);
  j["target"] = {spec.target.lo, spec.target.hi};
  j["alpha"] = spec.alpha;
  return j.dump();
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text);
  if (!doc.is_object()) bad("config must be a JSON object");
  only_keys(doc,
            {"assumption", "source", "target", "alpha", "epsilons", "grid_n", "tolerances", "output",
             "renormalize", "map_samples", "fixtures"},
            "config");
  RunConfig cfg;
  if (doc.contains("renormalize")) cfg.renormalize = boolean(doc["renormalize"], "renormalize");
  cfg.problem = problem_from(doc, cfg.renormalize);
  if (doc.contains("epsilons")) cfg.epsilons = numbers(doc["epsilons"], "epsilons");
  if (doc.contains("grid_n")) cfg.grid_n = integer(doc["grid_n"], "grid_n");
  if (doc.contains("map_samples")) cfg.map_samples = integer(doc["map_samples"], "map_samples");
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) bad("tolerances must be an object");
    only_keys(t, {"root", "quad"}, "tolerances");
    if (t.contains("root")) cfg.root_tol = number(t["root"], "tolerances.root");
    if (t.contains("quad")) cfg.quad_tol = number(t["quad"], "tolerances.quad");
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) bad("output must be a string");
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("fixtures")) {
    const json& f = doc["fixtures"];
    if (!f.is_object()) bad("fixtures must be an object");
    only_keys(f, {"expectation", "primal"}, "fixtures");
    auto stem = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (!f.contains(key)) return std::nullopt;
      if (!f[key].is_string()) bad(std::string("fixtures.") + key + " must be a string");
      std::filesystem::path p = f[key].get<std::string>();
      return p.is_absolute() ? p : base_dir / p;
    };
    cfg.expectation_fixture = stem("expectation");
    cfg.primal_fixture = stem("primal");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path), path.parent_path());
}

}  // namespace monge
