#pragma once

/** Named haplotype-assembly methods: "rtr" (trust region on the smoothed
 * L1 objective) and "altmin" (alternating rank-one completion). */

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "haprtr/altmin.hpp"
#include "haprtr/errors.hpp"
#include "haprtr/haplotype.hpp"
#include "haprtr/objective.hpp"
#include "haprtr/random.hpp"
#include "haprtr/rtr.hpp"

namespace haprtr {

enum class InitMode { Random, Spectral };

struct MethodConfig {
  RtrConfig rtr;
  AltMinConfig altmin;
  double epsilon = SmoothingParam::kDefault;
  /// Independent RTR starts per solve; the lowest final cost wins.
  std::size_t restarts = 1;
  InitMode init = InitMode::Random;

  void validate() const {
    rtr.validate();
    altmin.validate();
    SmoothingParam{epsilon};
    if (restarts < 1)
      throw ParameterError("rtr.restarts must be at least 1");
  }
};

inline constexpr std::array<std::string_view, 2> kMethods = {"altmin", "rtr"};

inline bool is_registered(std::string_view name) {
  return std::find(kMethods.begin(), kMethods.end(), name) != kMethods.end();
}

inline std::string registered_methods_list() {
  std::string out;
  for (const auto &m : kMethods) {
    if (!out.empty())
      out += ", ";
    out += m;
  }
  return out;
}

struct MethodOutcome {
  Haplotype est;
  /// Outer iterations (rtr) or sweeps (altmin) of the returned run.
  std::size_t iterations = 0;
  /// Riemannian gradient norm of the smoothed objective at the estimate.
  double grad_norm = 0.0;
  double cost = 0.0;
};

/// Leading right singular direction of P_Omega(M), sign-fixed so its
/// largest-magnitude coordinate is positive.
inline UnitVector spectral_init(const ReadMatrix &reads) {
  const Matrix gram = reads.sampled().transpose() * reads.sampled();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  Vector lead = eig.eigenvectors().col(gram.cols() - 1);
  Eigen::Index k = 0;
  lead.cwiseAbs().maxCoeff(&k);
  if (lead[k] < 0.0)
    lead = -lead;
  return UnitVector::normalized(lead);
}

/// Starting point of restart `r` for a solve seeded with `seed`.
inline UnitVector initial_point(const ReadMatrix &reads, const MethodConfig &cfg,
                                std::uint64_t seed, std::size_t r) {
  if (cfg.init == InitMode::Spectral && r == 0 && reads.observed_count() > 0)
    return spectral_init(reads);
  Rng rng = substream(seed, Stream::SolverInit, r);
  return UnitVector(random_unit_coords(reads.cols(), rng));
}

inline RtrResult solve_rtr(const ReadMatrix &reads, const MethodConfig &cfg,
                           std::uint64_t seed) {
  cfg.validate();
  const HaplotypeObjective objective(reads, SmoothingParam(cfg.epsilon));
  RtrResult best =
      rtr_minimize(objective, initial_point(reads, cfg, seed, 0), cfg.rtr);
  for (std::size_t r = 1; r < cfg.restarts; ++r) {
    RtrResult next =
        rtr_minimize(objective, initial_point(reads, cfg, seed, r), cfg.rtr);
    if (next.cost < best.cost)
      best = std::move(next);
  }
  return best;
}

inline MethodOutcome run_method(std::string_view name, const ReadMatrix &reads,
                                const MethodConfig &cfg, std::uint64_t seed) {
  if (name == "rtr") {
    const RtrResult res = solve_rtr(reads, cfg, seed);
    return MethodOutcome{decode(res.x), res.iterations, res.grad_norm, res.cost};
  }
  if (name == "altmin") {
    cfg.validate();
    AltMinConfig alt = cfg.altmin;
    alt.seed = seed;
    const AltMinResult res = altmin_rank1(reads, alt);
    const SmoothingParam eps(cfg.epsilon);
    const UnitVector x = res.v.norm() > 0.0 ? UnitVector::normalized(res.v)
                                            : UnitVector::basis(reads.cols(), 0);
    return MethodOutcome{res.est, res.sweeps,
                         riemannian_grad(reads, eps, x).norm(),
                         cost(reads, eps, x)};
  }
  throw ParameterError("unknown method '" + std::string(name) +
                       "'; registered methods: " + registered_methods_list());
}

} // namespace haprtr
