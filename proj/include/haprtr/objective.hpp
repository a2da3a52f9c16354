#pragma once

/** Smoothed negative-L1 haplotype cost on the sphere
 *
 *   f(x) = -sum_i sqrt((M_i x)^2 + eps),
 *
 * where M_i is row i of the sampled read matrix P_Omega(M), together with
 * its Euclidean and Riemannian derivatives.
 */

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "haprtr/errors.hpp"
#include "haprtr/sphere.hpp"

namespace haprtr {

using Matrix = Eigen::MatrixXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// m x n matrix of SNP reads with entries +1 / -1 on the observed set Omega.
///
/// Stored dense: `sampled()` is P_Omega(M) (zero where unobserved) and
/// `mask()` is the indicator of Omega.
class ReadMatrix {
public:
  /// `values` must be +/-1 at every observed position; unobserved positions
  /// are ignored and zeroed.
  ReadMatrix(const Matrix &values, Mask mask) : mask_(std::move(mask)) {
    if (values.rows() != mask_.rows() || values.cols() != mask_.cols())
      throw DimensionError("ReadMatrix: values and mask shapes differ");
    if (values.rows() < 1 || values.cols() < 2)
      throw DimensionError("ReadMatrix: need m >= 1 and n >= 2");
    sampled_ = Matrix::Zero(values.rows(), values.cols());
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        if (!mask_(i, j))
          continue;
        const double v = values(i, j);
        if (v != 1.0 && v != -1.0)
          throw ContractError("ReadMatrix: observed entries must be +1 or -1");
        sampled_(i, j) = v;
      }
  }

  /// Fully observed matrix.
  explicit ReadMatrix(const Matrix &values)
      : ReadMatrix(values, Mask::Constant(values.rows(), values.cols(), true)) {}

  Eigen::Index rows() const { return sampled_.rows(); }
  Eigen::Index cols() const { return sampled_.cols(); }

  bool observed(Eigen::Index i, Eigen::Index j) const { return mask_(i, j); }

  /// +1 / -1 when observed, nothing otherwise.
  std::optional<int> entry(Eigen::Index i, Eigen::Index j) const {
    if (!mask_(i, j))
      return std::nullopt;
    return sampled_(i, j) > 0 ? 1 : -1;
  }

  const Matrix &sampled() const { return sampled_; }
  const Mask &mask() const { return mask_; }

  Eigen::Index observed_count() const { return mask_.count(); }

  /// Number of columns (sites) with no observed entry at all.
  Eigen::Index empty_columns() const {
    Eigen::Index count = 0;
    for (Eigen::Index j = 0; j < cols(); ++j)
      count += mask_.col(j).any() ? 0 : 1;
    return count;
  }

  /// Returns a copy with the sign of the observed entry (i, j) flipped.
  ReadMatrix with_flipped(Eigen::Index i, Eigen::Index j) const {
    if (!mask_(i, j))
      throw ContractError("ReadMatrix::with_flipped: entry is unobserved");
    ReadMatrix copy = *this;
    copy.sampled_(i, j) = -copy.sampled_(i, j);
    return copy;
  }

  friend bool operator==(const ReadMatrix &a, const ReadMatrix &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           a.mask_ == b.mask_ && a.sampled_ == b.sampled_;
  }

private:
  Matrix sampled_;
  Mask mask_;
};

/// Smoothing constant of the L1 surrogate; strictly positive.
class SmoothingParam {
public:
  static constexpr double kDefault = 1e-6;

  explicit SmoothingParam(double epsilon = kDefault) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw ParameterError("SmoothingParam: epsilon must be positive and finite");
  }

  double value() const { return epsilon_; }

private:
  double epsilon_;
};

/// sum over observed j of M_ij x_j. Empty rows give 0.
inline double masked_row_dot(const ReadMatrix &reads, Eigen::Index i,
                             const UnitVector &x) {
  if (i < 0 || i >= reads.rows())
    throw IndexError("masked_row_dot: row " + std::to_string(i) +
                     " out of range");
  detail::require_same_size(x.size(), reads.cols(), "masked_row_dot");
  return reads.sampled().row(i).dot(x.coords());
}

inline double cost(const ReadMatrix &reads, SmoothingParam eps,
                   const UnitVector &x) {
  detail::require_same_size(x.size(), reads.cols(), "cost");
  const Vector u = reads.sampled() * x.coords();
  return -(u.array().square() + eps.value()).sqrt().sum();
}

/// Grad f(x) = -sum_i M_i^T (M_i x) / sqrt((M_i x)^2 + eps).
inline Vector euclidean_grad(const ReadMatrix &reads, SmoothingParam eps,
                             const UnitVector &x) {
  detail::require_same_size(x.size(), reads.cols(), "euclidean_grad");
  const Vector u = reads.sampled() * x.coords();
  const Vector weights =
      (u.array() / (u.array().square() + eps.value()).sqrt()).matrix();
  return -(reads.sampled().transpose() * weights);
}

inline TangentVector riemannian_grad(const ReadMatrix &reads,
                                     SmoothingParam eps, const UnitVector &x) {
  return project_tangent(x, euclidean_grad(reads, eps, x));
}

/// Riemannian Hessian of the cost at a fixed point, applied matrix-free:
///
///   Hess f(x)[xi] = (I - x x^T) H_E(x) xi - (x . Grad f(x)) xi,
///   H_E(x)        = -sum_i eps (M_i^T M_i) ((M_i x)^2 + eps)^(-3/2).
class HessianOperator {
public:
  HessianOperator(const ReadMatrix &reads, SmoothingParam eps, UnitVector x)
      : sampled_(&reads.sampled()), x_(std::move(x)) {
    detail::require_same_size(x_.size(), reads.cols(), "HessianOperator");
    const Vector u = reads.sampled() * x_.coords();
    const Eigen::ArrayXd denom = u.array().square() + eps.value();
    curvature_ = (-eps.value() / (denom * denom.sqrt())).matrix();
    const Vector grad =
        -(reads.sampled().transpose() * (u.array() / denom.sqrt()).matrix());
    radial_ = x_.coords().dot(grad);
  }

  const UnitVector &point() const { return x_; }

  TangentVector operator()(const TangentVector &xi) const {
    detail::require_based_at(x_, xi, "hess_vec");
    const Vector euclidean =
        sampled_->transpose() *
        curvature_.cwiseProduct(*sampled_ * xi.dir());
    const Vector &c = x_.coords();
    return TangentVector(x_, euclidean - c.dot(euclidean) * c -
                                 radial_ * xi.dir());
  }

private:
  const Matrix *sampled_;
  UnitVector x_;
  Vector curvature_;
  double radial_ = 0.0;
};

inline TangentVector hess_vec(const ReadMatrix &reads, SmoothingParam eps,
                              const UnitVector &x, const TangentVector &xi) {
  return HessianOperator(reads, eps, x)(xi);
}

/// Lipschitz and boundedness constants of the convergence analysis.
struct DiagnosticConstants {
  /// L-C^1 constant: n sum_i |M_i^T M_i / sqrt(eps)|_F.
  double beta = 0.0;
  /// Hessian bound: (n^2 / eps) (sum_i |M_i|^2)^2.
  double beta_h = 0.0;
  /// Radial L-C^1 coefficient: sum_i (|M_i|^3 + |M_i|^2).
  double beta_rl = 0.0;
};

inline DiagnosticConstants diagnostic_constants(const ReadMatrix &reads,
                                                SmoothingParam eps) {
  const double n = static_cast<double>(reads.cols());
  double frob_sum = 0.0;
  double sq_sum = 0.0;
  double rl_sum = 0.0;
  for (Eigen::Index i = 0; i < reads.rows(); ++i) {
    const double sq = reads.sampled().row(i).squaredNorm();
    // |M_i^T M_i|_F = |M_i|^2 for a rank-one outer product.
    frob_sum += sq;
    sq_sum += sq;
    rl_sum += sq * std::sqrt(sq) + sq;
  }
  DiagnosticConstants out;
  out.beta = n * frob_sum / std::sqrt(eps.value());
  out.beta_h = n * n / eps.value() * sq_sum * sq_sum;
  out.beta_rl = rl_sum;
  return out;
}

/// Bundles a read matrix and smoothing constant into the oracle interface
/// consumed by the trust-region solver.
class HaplotypeObjective {
public:
  HaplotypeObjective(const ReadMatrix &reads, SmoothingParam eps)
      : reads_(&reads), eps_(eps) {}

  Eigen::Index dimension() const { return reads_->cols(); }

  double cost(const UnitVector &x) const {
    return haprtr::cost(*reads_, eps_, x);
  }
  TangentVector gradient(const UnitVector &x) const {
    return riemannian_grad(*reads_, eps_, x);
  }
  HessianOperator hessian(const UnitVector &x) const {
    return HessianOperator(*reads_, eps_, x);
  }

  const ReadMatrix &reads() const { return *reads_; }
  SmoothingParam epsilon() const { return eps_; }

private:
  const ReadMatrix *reads_;
  SmoothingParam eps_;
};

} // namespace haprtr
