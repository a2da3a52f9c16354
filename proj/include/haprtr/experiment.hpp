#pragma once

/** Seeded parameter sweeps over (pd, err, trial, method).
 *
 * Trial seeds are
 *
 *   seed = base_seed + mix64(pd_index << 42 | err_index << 21 | trial)
 *
 * (mod 2^64), injective in the three indices because mix64 is a bijection and
 * each index is below 2^21. A trial's instance and every method run on it
 * depend on that seed only, so results do not depend on thread scheduling.
 */

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "haprtr/errors.hpp"
#include "haprtr/haplotype.hpp"
#include "haprtr/io.hpp"
#include "haprtr/methods.hpp"

namespace haprtr {

struct ExperimentConfig {
  Eigen::Index m = 100;
  Eigen::Index n = 120;
  std::vector<double> pd_grid = {0.3, 0.5, 0.7};
  std::vector<double> err_grid = {0.35};
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  std::vector<std::string> methods = {"altmin", "rtr"};
  MethodConfig method;
  /// Measure per-run wall time. Off by default: timings are the one
  /// nondeterministic column, and are written as 0 unless enabled.
  bool record_timing = false;

  void validate() const {
    if (m < 1)
      throw ParameterError("m must be at least 1");
    if (n < 2)
      throw ParameterError("n must be at least 2");
    auto check_grid = [](const std::vector<double> &grid, const char *name,
                         auto in_range) {
      if (grid.empty())
        throw ParameterError(std::string(name) + " must not be empty");
      if (grid.size() >= (std::size_t{1} << 21))
        throw ParameterError(std::string(name) + " has too many entries");
      for (double v : grid)
        if (!in_range(v))
          throw ParameterError(std::string(name) + ": value " +
                               std::to_string(v) + " out of range");
      std::vector<double> sorted = grid;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ParameterError(std::string(name) + " contains duplicates");
    };
    check_grid(pd_grid, "pd_grid", [](double v) { return v > 0.0 && v <= 1.0; });
    check_grid(err_grid, "err_grid",
               [](double v) { return v >= 0.0 && v < 0.5; });
    if (trials < 1 || trials >= (std::size_t{1} << 21))
      throw ParameterError("trials must be in [1, 2^21)");
    if (methods.empty())
      throw ParameterError("methods must not be empty");
    for (const auto &name : methods)
      if (!is_registered(name))
        throw ParameterError("methods: unknown method '" + name +
                             "'; registered methods: " +
                             registered_methods_list());
    std::vector<std::string> sorted = methods;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParameterError("methods contains duplicates");
    method.validate();
  }
};

/// Applies `key = value` settings on top of the defaults in `cfg`.
/// Unknown keys and malformed values raise ParameterError naming the key.
inline void apply_config(ExperimentConfig &cfg, const KeyValueFile &file) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_uint;
  for (const auto &[key, entry] : file.entries()) {
    const std::string &v = entry.value;
    RtrConfig &rtr = cfg.method.rtr;
    AltMinConfig &alt = cfg.method.altmin;
    if (key == "m")
      cfg.m = static_cast<Eigen::Index>(parse_uint(key, v));
    else if (key == "n")
      cfg.n = static_cast<Eigen::Index>(parse_uint(key, v));
    else if (key == "pd_grid")
      cfg.pd_grid = detail::parse_double_list(key, v);
    else if (key == "err_grid")
      cfg.err_grid = detail::parse_double_list(key, v);
    else if (key == "trials")
      cfg.trials = parse_uint(key, v);
    else if (key == "base_seed")
      cfg.base_seed = parse_uint(key, v);
    else if (key == "methods")
      cfg.methods = detail::split_list(v);
    else if (key == "epsilon")
      cfg.method.epsilon = parse_double(key, v);
    else if (key == "record_timing")
      cfg.record_timing = parse_bool(key, v);
    else if (key == "rtr.delta_bar")
      rtr.delta_bar = parse_double(key, v);
    else if (key == "rtr.delta0")
      rtr.delta0 = parse_double(key, v);
    else if (key == "rtr.rho_prime")
      rtr.rho_prime = parse_double(key, v);
    else if (key == "rtr.grad_tol")
      rtr.grad_tol = parse_double(key, v);
    else if (key == "rtr.max_outer")
      rtr.max_outer = parse_uint(key, v);
    else if (key == "rtr.tcg_kappa")
      rtr.tcg_kappa = parse_double(key, v);
    else if (key == "rtr.tcg_theta")
      rtr.tcg_theta = parse_double(key, v);
    else if (key == "rtr.tcg_max_inner")
      rtr.tcg_max_inner = parse_uint(key, v);
    else if (key == "rtr.rho_regularization")
      rtr.rho_regularization = parse_double(key, v);
    else if (key == "rtr.seed")
      rtr.seed = parse_uint(key, v);
    else if (key == "rtr.restarts")
      cfg.method.restarts = parse_uint(key, v);
    else if (key == "rtr.init") {
      if (v == "random")
        cfg.method.init = InitMode::Random;
      else if (v == "spectral")
        cfg.method.init = InitMode::Spectral;
      else
        throw ParameterError(key + ": expected random or spectral, got '" + v +
                             "'");
    } else if (key == "altmin.max_sweeps")
      alt.max_sweeps = parse_uint(key, v);
    else if (key == "altmin.tol")
      alt.tol = parse_double(key, v);
    else if (key == "altmin.seed")
      alt.seed = parse_uint(key, v);
    else
      throw ParameterError("unknown config key '" + key + "' (line " +
                           std::to_string(entry.line) + ")");
  }
}

inline ExperimentConfig load_experiment_config(std::istream &is) {
  ExperimentConfig cfg;
  apply_config(cfg, KeyValueFile::parse(is));
  cfg.validate();
  return cfg;
}

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t pd_index,
                                std::size_t err_index, std::size_t trial) {
  const std::uint64_t packed = (static_cast<std::uint64_t>(pd_index) << 42) |
                               (static_cast<std::uint64_t>(err_index) << 21) |
                               static_cast<std::uint64_t>(trial);
  return base_seed + mix64(packed);
}

struct ExperimentRecord {
  double pd = 0.0;
  double err = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string method;
  Eigen::Index hd = 0;
  Eigen::Index mec = 0;
  Eigen::Index unrecoverable_sites = 0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  double wall_time_ms = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "pd,err,trial,seed,method,hd,mec,unrecoverable_sites,iterations,grad_norm,"
    "wall_time_ms";

/// Threads to use: $HAPRTR_THREADS when set to a positive integer, else the
/// available hardware parallelism.
inline std::size_t default_thread_count() {
  if (const char *env = std::getenv("HAPRTR_THREADS")) {
    std::size_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0)
      return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every (pd, err, trial) cell, each on its own instance, with every
/// configured method. Records come back sorted by (pd, err, trial, method).
inline std::vector<ExperimentRecord>
run_experiment(const ExperimentConfig &cfg, std::size_t threads = 0) {
  cfg.validate();
  if (threads == 0)
    threads = default_thread_count();

  struct Cell {
    std::size_t pd_index, err_index, trial;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < cfg.pd_grid.size(); ++p)
    for (std::size_t e = 0; e < cfg.err_grid.size(); ++e)
      for (std::size_t t = 0; t < cfg.trials; ++t)
        cells.push_back({p, e, t});

  std::vector<std::string> methods = cfg.methods;
  std::sort(methods.begin(), methods.end());

  std::vector<std::vector<ExperimentRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells.size())
        return;
      try {
        const Cell &cell = cells[c];
        const double pd = cfg.pd_grid[cell.pd_index];
        const double err = cfg.err_grid[cell.err_index];
        const std::uint64_t seed =
            trial_seed(cfg.base_seed, cell.pd_index, cell.err_index, cell.trial);
        const Instance inst = generate_instance(cfg.m, cfg.n, pd, err, seed);
        for (const auto &name : methods) {
          const auto start = std::chrono::steady_clock::now();
          const MethodOutcome out = run_method(name, inst.reads, cfg.method, seed);
          const auto stop = std::chrono::steady_clock::now();
          ExperimentRecord rec;
          rec.pd = pd;
          rec.err = err;
          rec.trial = cell.trial;
          rec.seed = seed;
          rec.method = name;
          rec.hd = hd_ambiguous(out.est, inst.truth_h);
          rec.mec = mec(inst.reads, out.est);
          rec.unrecoverable_sites = inst.reads.empty_columns();
          rec.iterations = out.iterations;
          rec.grad_norm = out.grad_norm;
          rec.wall_time_ms =
              cfg.record_timing
                  ? std::chrono::duration<double, std::milli>(stop - start).count()
                  : 0.0;
          results[c].push_back(std::move(rec));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(cells.size());
        return;
      }
    }
  };

  threads = std::min(threads, cells.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  std::vector<ExperimentRecord> records;
  for (auto &cell : results)
    for (auto &rec : cell)
      records.push_back(std::move(rec));
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord &a, const ExperimentRecord &b) {
              return std::tie(a.pd, a.err, a.trial, a.method) <
                     std::tie(b.pd, b.err, b.trial, b.method);
            });
  return records;
}

namespace detail {

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                       std::chars_format::fixed, precision);
  return std::string(buf, ptr);
}

} // namespace detail

inline void write_csv(std::ostream &os,
                      const std::vector<ExperimentRecord> &records) {
  os << kCsvHeader << '\n';
  for (const auto &r : records) {
    os << detail::format_double(r.pd) << ',' << detail::format_double(r.err)
       << ',' << r.trial << ',' << r.seed << ',' << r.method << ',' << r.hd
       << ',' << r.mec << ',' << r.unrecoverable_sites << ',' << r.iterations
       << ',' << detail::format_double(r.grad_norm) << ','
       << detail::format_fixed(r.wall_time_ms, 3) << '\n';
  }
}

inline std::string csv_string(const std::vector<ExperimentRecord> &records) {
  std::ostringstream os;
  write_csv(os, records);
  return os.str();
}

/// Parses a results CSV with the exact header above. A header mismatch
/// names the first offending column.
inline std::vector<ExperimentRecord> read_csv(std::istream &is) {
  static const std::vector<std::string> expected =
      detail::split_list(kCsvHeader);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line))
    throw ParseError("empty CSV file", 1);
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  const auto header = detail::split_list(line);
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (c >= header.size())
      throw ParseError("missing column '" + expected[c] + "' (position " +
                           std::to_string(c + 1) + ")",
                       lineno);
    if (header[c] != expected[c])
      throw ParseError("bad column '" + header[c] + "' at position " +
                           std::to_string(c + 1) + ", expected '" +
                           expected[c] + "'",
                       lineno);
  }
  if (header.size() > expected.size())
    throw ParseError("unexpected extra column '" + header[expected.size()] + "'",
                     lineno);

  std::vector<ExperimentRecord> records;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto fields = detail::split_list(line);
    if (fields.size() != expected.size())
      throw ParseError("expected " + std::to_string(expected.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       lineno);
    try {
      ExperimentRecord r;
      r.pd = detail::parse_double("pd", fields[0]);
      r.err = detail::parse_double("err", fields[1]);
      r.trial = detail::parse_uint("trial", fields[2]);
      r.seed = detail::parse_uint("seed", fields[3]);
      r.method = fields[4];
      r.hd = static_cast<Eigen::Index>(detail::parse_uint("hd", fields[5]));
      r.mec = static_cast<Eigen::Index>(detail::parse_uint("mec", fields[6]));
      r.unrecoverable_sites = static_cast<Eigen::Index>(
          detail::parse_uint("unrecoverable_sites", fields[7]));
      r.iterations = detail::parse_uint("iterations", fields[8]);
      r.grad_norm = detail::parse_double("grad_norm", fields[9]);
      r.wall_time_ms = detail::parse_double("wall_time_ms", fields[10]);
      records.push_back(std::move(r));
    } catch (const ParameterError &e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return records;
}

} // namespace haprtr
