#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace fkpde::cli {

using nlohmann::json;

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::ScvFixed:
      return "scv-fixed";
    case SolverKind::AdaptiveExact:
      return "adaptive-exact";
    case SolverKind::AdaptivePerturbed:
      return "adaptive-perturbed";
    case SolverKind::ScvAdaptive:
      return "scv-adaptive";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "scv-fixed") return SolverKind::ScvFixed;
  if (name == "adaptive-exact") return SolverKind::AdaptiveExact;
  if (name == "adaptive-perturbed") return SolverKind::AdaptivePerturbed;
  if (name == "scv-adaptive") return SolverKind::ScvAdaptive;
  throw ConfigError("unknown solver '" + name + "'");
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

// Integers in JSON may be written as 1e7; accept integral doubles.
void read_int(const json& obj, const char* key, std::int64_t& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (v.is_number_integer()) {
    out = v.get<std::int64_t>();
  } else if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>() &&
             std::abs(v.get<double>()) < 9.2e18) {
    out = static_cast<std::int64_t>(v.get<double>());
  } else {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " must be an integer");
  }
}

void read_int(const json& obj, const char* key, int& out, const std::string& where) {
  std::int64_t v = out;
  read_int(obj, key, v, where);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " is out of range");
  }
  out = static_cast<int>(v);
}

const std::map<std::string, json>& presets() {
  static const std::map<std::string, json> table = {
      {"tc1-desk",
       {{"problem", "tc1"},
        {"solver", "adaptive-perturbed"},
        {"scv", {{"dt", 1e-3}, {"M", 1000}}},
        {"adaptive", {{"theta", 0.5}, {"eps", 1e-15}, {"N", 12}}}}},
      {"tc2-desk",
       {{"problem", "tc2"},
        {"solver", "adaptive-perturbed"},
        {"scv", {{"dt", 2.5e-3}, {"M", 500}}},
        {"adaptive", {{"theta", 0.5}, {"eps", 1e-15}, {"N", 25}}}}},
      {"tc3-desk",
       {{"problem", "tc3"},
        {"solver", "adaptive-perturbed"},
        {"scv", {{"dt", 2.5e-3}, {"M", 500}}},
        {"adaptive", {{"theta", 0.5}, {"eps", 1e-15}, {"N", 14}}}}},
      {"tc1-paper",
       {{"problem", "tc1"},
        {"solver", "adaptive-perturbed"},
        {"scv", {{"dt", 1e-4}, {"M", 1000}}},
        {"adaptive", {{"theta", 0.5}, {"eps", 1e-15}, {"N", 60}}}}},
      {"tc2-paper",
       {{"problem", "tc2"},
        {"solver", "adaptive-perturbed"},
        {"scv", {{"dt", 1e-4}, {"M", 1000}}},
        {"adaptive", {{"theta", 0.5}, {"eps", 1e-15}, {"N", 60}}}}},
      {"tc3-paper",
       {{"problem", "tc3"},
        {"solver", "adaptive-perturbed"},
        {"scv", {{"dt", 1e-4}, {"M", 1000}}},
        {"adaptive", {{"theta", 0.5}, {"eps", 1e-15}, {"N", 60}}}}},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, value] : presets()) names.push_back(name);
  return names;
}

json preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

void RunConfig::validate() const {
  if (problem.empty()) throw ConfigError("problem must be set");
  if (error_samples < 1) throw ConfigError("error_samples must be at least 1");
  if (output.empty()) throw ConfigError("output must be a directory name");
  if (family == PointFamily::Magic) throw ConfigError("magic point sequences are not implemented");
  const std::set<std::string> kinds = {"adaptive", "total-degree", "tensor", "file"};
  if (!kinds.contains(index_set.kind)) throw ConfigError("unknown index_set kind '" + index_set.kind + "'");
  if (index_set.degree < 0) throw ConfigError("index_set degree must be non-negative");
  if (index_set.card < 1) throw ConfigError("index_set card must be at least 1");
  if (index_set.kind == "file" && index_set.path.empty()) throw ConfigError("index_set of kind file needs a path");
  if (!initial.empty() && solver != SolverKind::ScvFixed) throw ConfigError("initial is only used by scv-fixed");
  try {
    scv.validate();
    adaptive.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const json& input) {
  if (!input.is_object()) throw ConfigError("config must be a JSON object");
  json doc = input;
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("preset must be a string");
    json merged = preset(doc["preset"].get<std::string>());
    doc.erase("preset");
    merged.merge_patch(doc);
    doc = std::move(merged);
  }
  reject_unknown(doc,
                 {"problem", "solver", "seed", "point_family", "error_samples", "timing", "output", "scv", "adaptive",
                  "index_set", "initial"},
                 "config");

  RunConfig c;
  read(doc, "problem", c.problem, "config");
  if (doc.contains("solver")) {
    std::string s;
    read(doc, "solver", s, "config");
    c.solver = solver_kind_from_string(s);
  }
  if (doc.contains("seed")) {
    const auto& v = doc["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("point_family")) {
    std::string s;
    read(doc, "point_family", s, "config");
    try {
      c.family = point_family_from_string(s);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  read_int(doc, "error_samples", c.error_samples, "config");
  read(doc, "timing", c.timing, "config");
  read(doc, "output", c.output, "config");
  read(doc, "initial", c.initial, "config");

  if (doc.contains("scv")) {
    const auto& s = doc["scv"];
    reject_unknown(s, {"K", "eps_tol", "n_s", "dt", "M", "max_steps"}, "scv");
    read_int(s, "K", c.scv.K, "scv");
    read(s, "eps_tol", c.scv.eps_tol, "scv");
    read_int(s, "n_s", c.scv.n_s, "scv");
    read(s, "dt", c.scv.euler.dt, "scv");
    read_int(s, "M", c.scv.M, "scv");
    read_int(s, "max_steps", c.scv.euler.max_steps, "scv");
  }
  if (doc.contains("adaptive")) {
    const auto& a = doc["adaptive"];
    reject_unknown(a, {"theta", "eps", "N", "degree_cap", "n_inner"}, "adaptive");
    read(a, "theta", c.adaptive.theta, "adaptive");
    read(a, "eps", c.adaptive.eps, "adaptive");
    read_int(a, "N", c.adaptive.N, "adaptive");
    read_int(a, "degree_cap", c.adaptive.degree_cap, "adaptive");
    read_int(a, "n_inner", c.adaptive.n_inner, "adaptive");
  }
  if (doc.contains("index_set")) {
    const auto& s = doc["index_set"];
    reject_unknown(s, {"kind", "degree", "card", "path"}, "index_set");
    read(s, "kind", c.index_set.kind, "index_set");
    read_int(s, "degree", c.index_set.degree, "index_set");
    std::int64_t card = static_cast<std::int64_t>(c.index_set.card);
    read_int(s, "card", card, "index_set");
    if (card < 1) throw ConfigError("index_set card must be at least 1");
    c.index_set.card = static_cast<std::size_t>(card);
    read(s, "path", c.index_set.path, "index_set");
  }
  c.scv.euler.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse config '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["solver"] = to_string(c.solver);
  j["seed"] = c.seed;
  j["point_family"] = to_string(c.family);
  j["error_samples"] = c.error_samples;
  j["timing"] = c.timing;
  j["output"] = c.output;
  j["scv"] = {{"K", c.scv.K},   {"eps_tol", c.scv.eps_tol},     {"n_s", c.scv.n_s},
              {"dt", c.scv.euler.dt}, {"M", c.scv.M}, {"max_steps", c.scv.euler.max_steps}};
  j["adaptive"] = {{"theta", c.adaptive.theta},
                   {"eps", c.adaptive.eps},
                   {"N", c.adaptive.N},
                   {"degree_cap", c.adaptive.degree_cap},
                   {"n_inner", c.adaptive.n_inner}};
  j["index_set"] = {{"kind", c.index_set.kind},
                    {"degree", c.index_set.degree},
                    {"card", c.index_set.card},
                    {"path", c.index_set.path}};
  if (!c.initial.empty()) j["initial"] = c.initial;
  return j;
}

void apply_seed_overrides(RunConfig& config, std::optional<std::uint64_t> cli_seed) {
  if (const char* env = std::getenv("FKPDE_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || env[0] == '-') {
      throw ConfigError("FKPDE_SEED must be a non-negative integer");
    }
    config.seed = v;
  }
  if (cli_seed) config.seed = *cli_seed;
  config.scv.euler.seed = config.seed;
}

}  // namespace fkpde::cli
