#pragma once

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustdeg/adversary.hpp"
#include "robustdeg/estimators.hpp"
#include "robustdeg/parallel.hpp"
#include "robustdeg/rng.hpp"

namespace robustdeg {

/// Bad experiment configuration (maps to exit code 1 in the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_estimator_name(const std::string& name) {
  return name == "naive" || name == "median" || name == "prune" || name == "brute";
}

/// Dispatches to the estimator called `name`. eta and c_delta are ignored by
/// naive and median.
inline EstimateResult estimate_by_name(const std::string& name, const Graph& a, double eta,
                                       double c_delta) {
  if (name == "naive") return naive_mean(a);
  if (name == "median") return median_degree(a);
  if (name == "brute") return brute_force_estimate(a, eta, c_delta);
  if (name == "prune") {
    PruneConfig cfg;
    cfg.eta = eta;
    cfg.c_delta = c_delta;
    return prune_estimate(a, cfg);
  }
  throw std::invalid_argument("unknown estimator \"" + name + "\"");
}

struct ExperimentConfig {
  std::vector<std::size_t> n_grid;
  std::vector<double> d0_grid;
  std::vector<double> eta_grid;
  std::vector<AdversaryKind> adversaries;
  std::vector<std::string> estimators;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  double c_delta = kDefaultCDelta;
  std::string output_path;

  void validate() const {
    if (n_grid.empty() || d0_grid.empty() || eta_grid.empty() || adversaries.empty() ||
        estimators.empty())
      throw ConfigError("config: every grid must be non-empty");
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (!(c_delta > 0.0)) throw ConfigError("config: c_delta must be > 0");
    for (const auto& e : estimators)
      if (!is_estimator_name(e)) throw ConfigError("config: unknown estimator \"" + e + "\"");
    const bool prune = std::find(estimators.begin(), estimators.end(), "prune") != estimators.end();
    for (double eta : eta_grid) {
      if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("config: eta must be in [0, 1)");
      if (prune && !(eta < 0.5)) throw ConfigError("config: prune needs eta < 1/2");
    }
    for (std::size_t n : n_grid) {
      if (n < 2) throw ConfigError("config: n must be >= 2");
      for (double d0 : d0_grid)
        if (!(d0 >= 0.0 && d0 <= static_cast<double>(n)))
          throw ConfigError("config: d0 must be in [0, n]");
    }
    for (const auto& a : adversaries) {
      try {
        a.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
  }
};

/// Parses and validates a config document. Throws ConfigError.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  try {
    for (const auto& x : j.at("n_grid")) {
      if (!x.is_number_integer() || x.get<std::int64_t>() < 0)
        throw ConfigError("config: n_grid entries must be non-negative integers");
      cfg.n_grid.push_back(x.get<std::size_t>());
    }
    cfg.d0_grid = j.at("d0_grid").get<std::vector<double>>();
    cfg.eta_grid = j.at("eta_grid").get<std::vector<double>>();
    for (const auto& a : j.at("adversaries")) {
      try {
        cfg.adversaries.push_back(parse_adversary(a.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
    cfg.trials = j.at("trials").get<std::int64_t>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("c_delta")) cfg.c_delta = j.at("c_delta").get<double>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

struct BenchRow {
  std::string run_id;
  std::size_t n = 0;
  double d0 = 0.0;
  double eta = 0.0;
  std::string adversary;
  std::string estimator;
  std::optional<double> d_hat;
  std::optional<double> abs_error;
  std::optional<bool> satisfied;
  std::optional<double> slack;
  double wall_ms = 0.0;
  std::optional<double> abs_error_q90;  // aggregate rows only
  std::string error;
  bool aggregate = false;
};

inline const char* kBenchHeader =
    "run_id,n,d0,eta,adversary,estimator,d_hat,abs_error,satisfied,slack,wall_ms,abs_error_q90,"
    "error";

namespace detail {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' || ch == '\r' ? ' ' : ch;
  }
  return out + '"';
}

/// Linear-interpolation quantile of a non-empty sample.
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

/// One CSV line. With include_wall = false the wall_ms field is left empty,
/// which is the form compared for determinism.
inline std::string format_row(const BenchRow& r, bool include_wall = true) {
  auto opt = [](const std::optional<double>& x) {
    return x ? detail::format_number(*x) : std::string();
  };
  std::string line;
  line += detail::csv_field(r.run_id) + ',';
  line += std::to_string(r.n) + ',';
  line += detail::format_number(r.d0) + ',';
  line += detail::format_number(r.eta) + ',';
  line += detail::csv_field(r.adversary) + ',';
  line += detail::csv_field(r.estimator) + ',';
  line += opt(r.d_hat) + ',';
  line += opt(r.abs_error) + ',';
  line += (r.satisfied ? (*r.satisfied ? "1" : "0") : "") + std::string(",");
  line += opt(r.slack) + ',';
  line += (include_wall && !r.aggregate ? detail::format_number(r.wall_ms) : std::string()) + ',';
  line += opt(r.abs_error_q90) + ',';
  line += detail::csv_field(r.error);
  return line;
}

/// Seed of trial `trial` in instance cell `cell`.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial) {
  return derive_seed(master, cell, trial);
}

/// Runs the sweep. Instance cells are (n, d0, eta, adversary) in grid order;
/// every estimator sees the same corrupted instance for a given (cell, trial).
/// Output: for each instance cell and estimator, one row per trial followed by
/// one aggregate row (median abs_error, 0.9-quantile in abs_error_q90).
/// Ordering does not depend on `jobs`.
inline std::vector<BenchRow> run_bench(const ExperimentConfig& cfg, std::size_t jobs = 1) {
  cfg.validate();
  struct Cell {
    std::size_t n;
    double d0, eta;
    AdversaryKind adversary;
  };
  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_grid)
    for (double d0 : cfg.d0_grid)
      for (double eta : cfg.eta_grid)
        for (const auto& adv : cfg.adversaries) cells.push_back({n, d0, eta, adv});

  const auto trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t per_job = cfg.estimators.size();
  std::vector<BenchRow> data(cells.size() * trials * per_job);
  parallel_for(cells.size() * trials, jobs, [&](std::size_t job) {
    const std::size_t c = job / trials, t = job % trials;
    const Cell& cell = cells[c];
    auto slot = [&](std::size_t e) -> BenchRow& { return data[(c * per_job + e) * trials + t]; };
    for (std::size_t e = 0; e < per_job; ++e) {
      BenchRow& row = slot(e);
      row.run_id = std::to_string(c) + '-' + std::to_string(t);
      row.n = cell.n;
      row.d0 = cell.d0;
      row.eta = cell.eta;
      row.adversary = to_string(cell.adversary);
      row.estimator = cfg.estimators[e];
    }
    std::optional<CorruptedInstance> inst;
    try {
      inst = make_instance(cell.n, cell.d0, cell.eta, cell.adversary,
                           trial_seed(cfg.master_seed, c, t));
    } catch (const std::exception& ex) {
      for (std::size_t e = 0; e < per_job; ++e) slot(e).error = ex.what();
      return;
    }
    for (std::size_t e = 0; e < per_job; ++e) {
      BenchRow& row = slot(e);
      const auto start = std::chrono::steady_clock::now();
      try {
        const EstimateResult r =
            estimate_by_name(row.estimator, inst->corrupted, cell.eta, cfg.c_delta);
        row.d_hat = r.d_hat;
        row.abs_error = std::abs(r.d_hat - cell.d0);
        if (r.certificate) row.satisfied = r.certificate->satisfied;
        else if (row.estimator == "brute") row.satisfied = true;
        if (auto it = r.diagnostics.find("slack"); it != r.diagnostics.end())
          row.slack = it->second;
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
    }
  });

  std::vector<BenchRow> out;
  out.reserve(data.size() + cells.size() * per_job);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t e = 0; e < per_job; ++e) {
      std::vector<double> errors;
      for (std::size_t t = 0; t < trials; ++t) {
        const BenchRow& row = data[(c * per_job + e) * trials + t];
        if (row.abs_error) errors.push_back(*row.abs_error);
        out.push_back(row);
      }
      BenchRow agg;
      agg.aggregate = true;
      agg.run_id = std::to_string(c) + "-agg";
      agg.n = cells[c].n;
      agg.d0 = cells[c].d0;
      agg.eta = cells[c].eta;
      agg.adversary = to_string(cells[c].adversary);
      agg.estimator = cfg.estimators[e];
      if (!errors.empty()) {
        agg.abs_error = detail::quantile(errors, 0.5);
        agg.abs_error_q90 = detail::quantile(errors, 0.9);
      }
      if (errors.size() < trials)
        agg.error = std::to_string(trials - errors.size()) + " failed trials";
      out.push_back(std::move(agg));
    }
  }
  return out;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows,
                            bool include_wall = true) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) os << format_row(r, include_wall) << '\n';
}

}  // namespace robustdeg
