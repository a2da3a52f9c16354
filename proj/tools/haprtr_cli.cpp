// Command-line front end: generate instances, solve them, run seeded sweeps
// and plot the results.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 I/O or parse error,
// 3 numeric failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "haprtr/errors.hpp"
#include "haprtr/experiment.hpp"
#include "haprtr/haplotype.hpp"
#include "haprtr/io.hpp"
#include "haprtr/methods.hpp"
#include "haprtr/plot.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumeric = 3 };

haprtr::ExperimentConfig load_config(const std::string &path) {
  haprtr::ExperimentConfig cfg;
  if (path.empty())
    return cfg;
  std::istringstream is(haprtr::read_file(path));
  haprtr::apply_config(cfg, haprtr::KeyValueFile::parse(is));
  return cfg;
}

int cmd_generate(long long m, long long n, double pd, double err,
                 std::uint64_t seed, const std::string &out) {
  const auto inst = haprtr::generate_instance(m, n, pd, err, seed);
  haprtr::save_instance(out, inst.reads, inst.truth_h);
  std::cout << "wrote " << out << " (" << m << " x " << n << ", "
            << inst.reads.observed_count() << " observed, "
            << inst.flipped.size() << " flipped)\n";
  return kOk;
}

int cmd_solve(const std::string &instance_path, const std::string &method,
              const std::string &config_path,
              std::optional<std::uint64_t> seed) {
  if (!haprtr::is_registered(method)) {
    std::cerr << "error: unknown method '" << method
              << "'; registered methods: " << haprtr::registered_methods_list()
              << '\n';
    return kUsage;
  }
  const haprtr::ExperimentConfig cfg = load_config(config_path);
  cfg.method.validate();
  const haprtr::InstanceFile file = haprtr::load_instance(instance_path);

  const auto start = std::chrono::steady_clock::now();
  const haprtr::MethodOutcome out = haprtr::run_method(
      method, file.reads, cfg.method, seed.value_or(cfg.method.rtr.seed));
  const auto stop = std::chrono::steady_clock::now();

  std::cout << "method: " << method << '\n';
  if (file.truth)
    std::cout << "hd: " << haprtr::hd_ambiguous(out.est, *file.truth) << '\n';
  else
    std::cout << "hd: n/a\n";
  std::cout << "mec: " << haprtr::mec(file.reads, out.est) << '\n'
            << "iterations: " << out.iterations << '\n'
            << "grad_norm: " << haprtr::detail::format_double(out.grad_norm)
            << '\n'
            << "cost: " << haprtr::detail::format_double(out.cost) << '\n'
            << "unrecoverable_sites: " << file.reads.empty_columns() << '\n'
            << "wall_time_ms: "
            << haprtr::detail::format_fixed(
                   std::chrono::duration<double, std::milli>(stop - start)
                       .count(),
                   3)
            << '\n'
            << "haplotype: " << out.est.to_string() << '\n';
  return kOk;
}

int cmd_experiment(const std::string &config_path, const std::string &out,
                   std::size_t threads) {
  std::istringstream is(haprtr::read_file(config_path));
  const haprtr::ExperimentConfig cfg = haprtr::load_experiment_config(is);
  const auto records = haprtr::run_experiment(cfg, threads);
  haprtr::write_file_atomically(out, haprtr::csv_string(records));
  std::cout << "wrote " << out << " (" << records.size() << " rows)\n";
  return kOk;
}

int cmd_plot(const std::string &csv_path, const std::string &out) {
  std::istringstream is(haprtr::read_file(csv_path));
  const auto records = haprtr::read_csv(is);
  if (records.empty()) {
    std::cerr << "error: " << csv_path << " has no data rows\n";
    return kUsage;
  }
  haprtr::write_file_atomically(out, haprtr::render_hd_chart(records));
  std::cout << "wrote " << out << '\n';
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Haplotype assembly by Riemannian trust-region optimization"};
  app.require_subcommand(1);

  auto *gen = app.add_subcommand("generate", "Write a synthetic instance file");
  long long m = 0, n = 0;
  double pd = 1.0, err = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--m", m, "Number of reads (rows)")->required();
  gen->add_option("--n", n, "Number of SNP sites (columns)")->required();
  gen->add_option("--pd", pd, "Observation probability")->capture_default_str();
  gen->add_option("--err", err, "Fraction of observed entries flipped")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output instance file")->required();

  auto *solve = app.add_subcommand("solve", "Solve one instance file");
  std::string instance_path, method = "rtr", solve_config;
  std::optional<std::uint64_t> solve_seed;
  solve->add_option("instance", instance_path, "Instance file")->required();
  solve->add_option("--method", method,
                    "Method: " + haprtr::registered_methods_list())
      ->capture_default_str();
  solve->add_option("--config", solve_config, "Config file (key = value)");
  solve->add_option("--seed", solve_seed, "Seed for the starting point");

  auto *exp = app.add_subcommand("experiment", "Run a seeded parameter sweep");
  std::string exp_config, exp_out;
  std::size_t threads = 0;
  exp->add_option("--config", exp_config, "Config file (key = value)")
      ->required();
  exp->add_option("--out", exp_out, "Output CSV file")->required();
  exp->add_option("--threads", threads,
                  "Worker threads (default: $HAPRTR_THREADS or all cores)");

  auto *plot = app.add_subcommand("plot", "Plot mean hd against pd as SVG");
  std::string csv_path, plot_out;
  plot->add_option("csv", csv_path, "Results CSV")->required();
  plot->add_option("--out", plot_out, "Output SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen)
      return cmd_generate(m, n, pd, err, gen_seed, gen_out);
    if (*solve)
      return cmd_solve(instance_path, method, solve_config, solve_seed);
    if (*exp)
      return cmd_experiment(exp_config, exp_out, threads);
    if (*plot)
      return cmd_plot(csv_path, plot_out);
  } catch (const haprtr::NumericError &e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const haprtr::IoError &e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const haprtr::ParseError &e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const haprtr::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
