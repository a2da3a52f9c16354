#pragma once

/** Rank-one matrix completion by alternating least squares.
 *
 * Minimizes |P_Omega(M) - P_Omega(u v^T)|_F over u in R^m, v in R^n by exact
 * coordinate-wise updates of u and v in turn. The haplotype estimate is
 * sign(v).
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "haprtr/errors.hpp"
#include "haprtr/haplotype.hpp"
#include "haprtr/objective.hpp"
#include "haprtr/random.hpp"

namespace haprtr {

struct AltMinConfig {
  std::size_t max_sweeps = 100;
  double tol = 1e-8;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_sweeps < 1)
      throw ParameterError("altmin.max_sweeps must be at least 1");
    if (!(tol > 0.0))
      throw ParameterError("altmin.tol must be positive");
  }
};

struct AltMinResult {
  Vector u;
  Vector v;
  Haplotype est;
  std::size_t sweeps = 0;
  /// Masked residual norm after every half-sweep (u-update, then v-update).
  std::vector<double> residuals;
  /// Coordinates left unchanged because their update had a zero denominator.
  std::size_t degenerate_updates = 0;
};

/// |P_Omega(M) - P_Omega(u v^T)|_F.
inline double masked_residual(const ReadMatrix &reads, const Vector &u,
                              const Vector &v) {
  detail::require_same_size(u.size(), reads.rows(), "masked_residual");
  detail::require_same_size(v.size(), reads.cols(), "masked_residual");
  const Matrix fit = reads.mask().select(u * v.transpose(),
                                         Matrix::Zero(reads.rows(), reads.cols()));
  return (reads.sampled() - fit).norm();
}

/// u_i <- (sum_{j in Omega_i} M_ij v_j) / (sum_{j in Omega_i} v_j^2).
/// Returns the number of rows left unchanged.
inline std::size_t update_u(const ReadMatrix &reads, const Vector &v,
                            Vector &u) {
  detail::require_same_size(v.size(), reads.cols(), "update_u");
  detail::require_same_size(u.size(), reads.rows(), "update_u");
  const Matrix mask = reads.mask().cast<double>();
  const Vector num = reads.sampled() * v;
  const Vector den = mask * v.cwiseAbs2();
  std::size_t flagged = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (den[i] > 0.0)
      u[i] = num[i] / den[i];
    else
      ++flagged;
  }
  return flagged;
}

/// v_j <- (sum_{i in Omega_j} M_ij u_i) / (sum_{i in Omega_j} u_i^2).
/// Returns the number of columns left unchanged.
inline std::size_t update_v(const ReadMatrix &reads, const Vector &u,
                            Vector &v) {
  detail::require_same_size(u.size(), reads.rows(), "update_v");
  detail::require_same_size(v.size(), reads.cols(), "update_v");
  const Matrix mask = reads.mask().cast<double>();
  const Vector num = reads.sampled().transpose() * u;
  const Vector den = mask.transpose() * u.cwiseAbs2();
  std::size_t flagged = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (den[j] > 0.0)
      v[j] = num[j] / den[j];
    else
      ++flagged;
  }
  return flagged;
}

/// Alternating minimization from a given right factor v0.
inline AltMinResult altmin_rank1_from(const ReadMatrix &reads,
                                      const AltMinConfig &cfg, Vector v0) {
  cfg.validate();
  detail::require_same_size(v0.size(), reads.cols(), "altmin_rank1");
  if (reads.observed_count() == 0)
    throw DegenerateInputError("altmin_rank1: no observed entries");

  Vector u = Vector::Zero(reads.rows());
  Vector v = std::move(v0);
  std::vector<double> residuals;
  std::size_t flagged = 0;
  std::size_t sweeps = 0;
  double previous = masked_residual(reads, u, v);

  while (sweeps < cfg.max_sweeps) {
    ++sweeps;
    flagged += update_u(reads, v, u);
    residuals.push_back(masked_residual(reads, u, v));
    flagged += update_v(reads, u, v);
    const double current = masked_residual(reads, u, v);
    residuals.push_back(current);
    if (std::abs(previous - current) < cfg.tol)
      break;
    previous = current;
  }

  Haplotype est = decode(v);
  return AltMinResult{std::move(u), std::move(v), std::move(est), sweeps,
                      std::move(residuals), flagged};
}

/// Alternating minimization from a seeded uniform point on the sphere.
inline AltMinResult altmin_rank1(const ReadMatrix &reads,
                                 const AltMinConfig &cfg) {
  Rng rng = substream(cfg.seed, Stream::BaselineInit);
  return altmin_rank1_from(reads, cfg, random_unit_coords(reads.cols(), rng));
}

} // namespace haprtr
