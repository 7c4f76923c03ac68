// robustdeg: generate, corrupt, estimate, certify, verify and bench.
//
// Exit codes: 0 ok, 1 usage/config, 2 no feasible candidate,
// 3 certificate unsatisfied, 4 I/O.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "robustdeg/robustdeg.hpp"

namespace {

using namespace robustdeg;

enum ExitCode { kOk = 0, kUsage = 1, kNoFeasible = 2, kUnsatisfied = 3, kIo = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string output;
  double c_delta = kDefaultCDelta;
};

/// Writes `text` to the --output file, or stdout when none was given.
void emit(const Globals& g, const std::string& text) {
  if (g.output.empty() || g.output == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("write to standard output failed");
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw IoError("cannot open " + g.output + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + g.output);
}

Graph load_graph(const std::string& path) {
  try {
    if (path == "-") return read_edge_list(std::cin);
    return read_edge_list_file(path);
  } catch (const FileError& e) {
    throw IoError(e.what());
  } catch (const EdgeListError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string json_line(const nlohmann::json& j) { return j.dump() + '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust degree estimation for corrupted Erdos-Renyi graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--output", g.output, "Output file (default: standard output)");
  app.add_option("--c-delta", g.c_delta, "Delta threshold constant")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Sample G(n, d0/n) as an edge list");
  std::size_t gen_n = 0;
  double gen_d0 = 0.0;
  gen->add_option("--n", gen_n, "Node count")->required();
  gen->add_option("--d0", gen_d0, "Degree parameter")->required();

  // corrupt
  auto* cor = app.add_subcommand("corrupt", "Corrupt an edge list");
  std::string cor_in, cor_adv = "isolate", cor_set_out;
  double cor_eta = 0.1;
  cor->add_option("--input", cor_in, "Input edge list ('-' for stdin)")->required();
  cor->add_option("--eta", cor_eta, "Corruption fraction")->capture_default_str();
  cor->add_option("--adversary", cor_adv, "none|isolate|clique_plant|degree_spoof:T|cut_heavy|random_rewire:P")
      ->capture_default_str();
  cor->add_option("--set-output", cor_set_out, "Write the corrupted node ids here, one per line");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate d0 from an edge list");
  std::string est_in, est_name = "prune";
  double est_eta = 0.1;
  est->add_option("--input", est_in, "Input edge list ('-' for stdin)")->required();
  est->add_option("--estimator", est_name, "naive|median|prune|brute")
      ->check(CLI::IsMember({"naive", "median", "prune", "brute"}))
      ->capture_default_str();
  est->add_option("--eta", est_eta, "Assumed corruption fraction")->capture_default_str();

  // certify
  auto* cert = app.add_subcommand("certify", "Goodness certificate of an edge list");
  std::string cert_in;
  double cert_gamma = 0.1;
  cert->add_option("--input", cert_in, "Input edge list ('-' for stdin)")->required();
  cert->add_option("--gamma", cert_gamma, "Set-size fraction")->capture_default_str();

  // verify
  auto* ver = app.add_subcommand("verify", "Monte Carlo check of a concentration lemma");
  std::string ver_lemma;
  std::size_t ver_n = 1000;
  std::vector<double> ver_d0{10.0};
  std::vector<double> ver_eta{0.01};
  std::int64_t ver_trials = 100;
  std::optional<double> ver_c;
  ver->add_option("--lemma", ver_lemma,
                  "average_degree|degree_subset_sum|high_degree_count|spectral|binomial_quantile")
      ->required()
      ->check(CLI::IsMember({"average_degree", "degree_subset_sum", "high_degree_count", "spectral",
                             "binomial_quantile"}));
  ver->add_option("--n", ver_n, "Node count")->capture_default_str();
  ver->add_option("--d0", ver_d0, "Degree parameter(s); binomial_quantile uses them as integer d")
      ->capture_default_str();
  ver->add_option("--eta", ver_eta, "binomial_quantile: corruption fraction(s)")->capture_default_str();
  ver->add_option("--trials", ver_trials, "Trials per parameter point")->capture_default_str();
  ver->add_option("--constant", ver_c, "Lemma constant (default: calibrated value)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep from a JSON config");
  std::string bench_config;
  bench->add_option("config", bench_config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "robustdeg: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*gen) {
      emit(g, to_edge_list_string(sample_er(gen_n, gen_d0, g.seed)));
    } else if (*cor) {
      const Graph clean = load_graph(cor_in);
      const auto inst = corrupt(clean, cor_eta, parse_adversary(cor_adv), g.seed);
      emit(g, to_edge_list_string(inst.corrupted));
      if (!cor_set_out.empty()) {
        std::ostringstream ss;
        for (Node v : inst.corrupted_set) ss << v << '\n';
        Globals set_target = g;
        set_target.output = cor_set_out;
        emit(set_target, ss.str());
      }
    } else if (*est) {
      const Graph a = load_graph(est_in);
      emit(g, json_line(to_json(estimate_by_name(est_name, a, est_eta, g.c_delta))));
    } else if (*cert) {
      const Graph a = load_graph(cert_in);
      const auto report = goodness_certificate(a, cert_gamma, g.c_delta);
      emit(g, json_line(to_json(report)));
      return report.satisfied ? kOk : kUnsatisfied;
    } else if (*ver) {
      std::string lines;
      auto c_or = [&](double fallback) { return ver_c.value_or(fallback); };
      if (ver_lemma == "binomial_quantile") {
        for (double d : ver_d0)
          for (double eta : ver_eta) {
            if (d != std::floor(d)) throw std::invalid_argument("binomial_quantile: d must be an integer");
            lines += json_line(to_json(verify_binomial_quantile(ver_n, static_cast<std::int64_t>(d), eta)));
          }
      } else {
        for (double d0 : ver_d0) {
          VerificationReport r;
          if (ver_lemma == "average_degree")
            r = verify_average_degree(ver_n, d0, ver_trials, c_or(kAverageDegreeC), g.seed, g.jobs);
          else if (ver_lemma == "degree_subset_sum")
            r = verify_degree_subset_sum(ver_n, d0, ver_trials, c_or(kSubsetSumC), g.seed, g.jobs);
          else if (ver_lemma == "high_degree_count")
            r = verify_high_degree_count(ver_n, d0, ver_trials, c_or(kHighDegreeC), g.seed, g.jobs);
          else
            r = verify_spectral(ver_n, d0, ver_trials, c_or(kSpectralC), g.seed, g.jobs);
          lines += json_line(to_json(r));
        }
      }
      emit(g, lines);
    } else if (*bench) {
      const ExperimentConfig cfg = parse_experiment_config(read_text(bench_config));
      std::ostringstream csv;
      write_bench_csv(csv, run_bench(cfg, g.jobs));
      Globals target = g;
      if (target.output.empty()) target.output = cfg.output_path;
      emit(target, csv.str());
    }
  } catch (const NoFeasibleCandidate& e) {
    std::cerr << "robustdeg: " << e.what() << '\n';
    return kNoFeasible;
  } catch (const IoError& e) {
    std::cerr << "robustdeg: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "robustdeg: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
