#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "fkpde/errors.hpp"
#include "fkpde/problems.hpp"

namespace fkpde::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_trace(std::ostream& out, const SolverReport& report, bool timing) {
  out << kTraceHeader << '\n';
  for (const auto& r : report.records) {
    out << r.step << ',' << r.card_lambda << ',' << format_double(r.epsilon_n) << ',' << format_double(r.stagnation)
        << ',' << format_double(r.l2_error) << ',' << format_double(r.linf_error) << ',' << r.path_steps << ','
        << format_double(timing ? r.wall_ms : 0.0) << '\n';
  }
}

MultiIndexSet resolve_index_set(const RunConfig& config, const DiffusionProblem& problem) {
  const std::size_t d = problem.dimension();
  const auto& spec = config.index_set;
  if (spec.kind == "total-degree") return MultiIndexSet::total_degree(d, spec.degree);
  if (spec.kind == "tensor") return MultiIndexSet::tensor(d, spec.degree);
  if (spec.kind == "file") {
    std::ifstream in(spec.path);
    if (!in) throw InvalidArgument("cannot open index set '" + spec.path + "'");
    auto set = read_text(in, d);
    if (!is_downward_closed(set)) throw InvalidArgument("index set '" + spec.path + "' is not downward closed");
    return set;
  }
  // Largest set of an exact adaptive run with at most `card` indices.
  if (!problem.has_exact()) throw InvalidArgument("an adaptive index set needs a problem with a known solution");
  AdaptiveConfig cfg = config.adaptive;
  cfg.eps = 0.0;
  cfg.N = static_cast<int>(spec.card);
  SolverOptions options;
  options.family = config.family;
  const auto report = adaptive_exact(problem.exact, problem.domain, cfg, options);
  MultiIndexSet best = MultiIndexSet::root(d);
  for (const auto& set : report.lambdas) {
    if (set.size() <= spec.card) best = set;
  }
  return best;
}

SolverReport run(const RunConfig& config) {
  config.validate();
  const DiffusionProblem problem = make_problem(config.problem);
  validate(problem);

  SolverOptions options;
  options.family = config.family;
  options.exact = problem.exact;
  options.error_samples = config.error_samples;
  options.error_seed = config.seed;
  SCVConfig scv = config.scv;
  scv.euler.seed = config.seed;

  SolverReport report;
  switch (config.solver) {
    case SolverKind::ScvFixed: {
      std::optional<PolynomialExpansion> initial;
      if (!config.initial.empty()) {
        std::ifstream in(config.initial);
        if (!in) throw InvalidArgument("cannot open initial expansion '" + config.initial + "'");
        initial = read_expansion(in, problem.domain);
      }
      report = scv_fixed(resolve_index_set(config, problem), problem, scv, options, initial);
      break;
    }
    case SolverKind::AdaptiveExact:
      if (!problem.has_exact()) throw InvalidArgument("adaptive-exact needs a problem with a known solution");
      report = adaptive_exact(problem.exact, problem.domain, config.adaptive, options);
      break;
    case SolverKind::AdaptivePerturbed:
      report = adaptive_perturbed(problem, config.adaptive, scv, options);
      break;
    case SolverKind::ScvAdaptive:
      report = scv_adaptive(problem, scv, config.adaptive, options);
      break;
  }

  const std::filesystem::path dir(config.output);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "trace.csv", std::ios::binary);
    write_trace(out, report, config.timing);
    if (!out) throw std::runtime_error("cannot write trace.csv");
  }
  {
    std::ofstream out(dir / "solution.expansion", std::ios::binary);
    if (report.solution.size() > 0) write_expansion(out, report.solution);
    if (!out) throw std::runtime_error("cannot write solution.expansion");
  }
  {
    std::ofstream out(dir / "run.json", std::ios::binary);
    out << to_json(config).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write run.json");
  }
  return report;
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open trace '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw InvalidArgument("'" + path + "' does not start with the trace header");
  }
  Trace t;
  t.columns = split_csv(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.columns.size()) {
      throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                            " fields");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') {
        throw InvalidArgument(path + ":" + std::to_string(line_no) + ": '" + c + "' is not a number");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void compare(const std::vector<std::string>& paths, const std::string& key, std::ostream& out, std::ostream& diag) {
  if (paths.size() < 2) throw InvalidArgument("compare needs at least two traces");
  if (key != "step" && key != "card_lambda") throw InvalidArgument("compare key must be step or card_lambda");
  const std::vector<std::string> metrics = {"epsilon_n", "stagnation", "l2_error", "linf_error"};
  const std::vector<std::string> diffs = {"epsilon_n", "l2_error", "linf_error"};

  std::vector<Trace> traces;
  std::vector<std::map<double, std::size_t>> index(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    traces.push_back(read_trace(paths[i]));
    const auto& cols = traces[i].columns;
    const std::size_t k = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), key) - cols.begin());
    for (std::size_t r = 0; r < traces[i].rows.size(); ++r) {
      if (!index[i].emplace(traces[i].rows[r][k], r).second) {
        throw InvalidArgument("trace '" + paths[i] + "' repeats " + key + " " +
                              format_double(traces[i].rows[r][k]) + "; it cannot be aligned on " + key);
      }
    }
  }
  auto column = [&](std::size_t t, const std::string& name) {
    const auto& cols = traces[t].columns;
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
  };

  std::vector<double> keys;
  std::size_t dropped = 0;
  for (const auto& [value, row] : index[0]) {
    bool everywhere = true;
    for (std::size_t i = 1; i < paths.size(); ++i) everywhere = everywhere && index[i].contains(value);
    if (everywhere) {
      keys.push_back(value);
    } else {
      ++dropped;
    }
  }
  for (std::size_t i = 1; i < paths.size(); ++i) {
    for (const auto& [value, row] : index[i]) {
      if (!index[0].contains(value)) ++dropped;
    }
  }
  if (keys.empty()) throw InvalidArgument("traces share no " + key + " values; they are misaligned");

  for (std::size_t i = 0; i < paths.size(); ++i) diag << "t" << i + 1 << " = " << paths[i] << '\n';
  if (dropped > 0) diag << "note: " << dropped << " rows without a matching " << key << " were dropped\n";

  out << key;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (const auto& m : metrics) out << ",t" << i + 1 << '_' << m;
  }
  for (std::size_t i = 1; i < paths.size(); ++i) {
    for (const auto& m : diffs) out << ",d" << i + 1 << '_' << m;
  }
  out << '\n';
  for (double k : keys) {
    out << format_double(k);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto& row = traces[i].rows[index[i].at(k)];
      for (const auto& m : metrics) out << ',' << format_double(row[column(i, m)]);
    }
    const auto& base = traces[0].rows[index[0].at(k)];
    for (std::size_t i = 1; i < paths.size(); ++i) {
      const auto& row = traces[i].rows[index[i].at(k)];
      for (const auto& m : diffs) {
        const double a = row[column(i, m)];
        const double b = base[column(0, m)];
        // Matching entries (including two missing values) differ by zero.
        out << ',' << format_double(a == b || (std::isnan(a) && std::isnan(b)) ? 0.0 : a - b);
      }
    }
    out << '\n';
  }
}

void list_problems(std::ostream& out) {
  for (const auto& p : fkpde::list_problems()) {
    out << p.name << '\t' << (p.dimension == 0 ? std::string("-") : std::to_string(p.dimension)) << '\t'
        << p.description << '\n';
  }
}

}  // namespace fkpde::cli
