#pragma once

// Reference computations for the tests. Everything here works from raw Eigen
// arithmetic and brute force so it stays independent of the library code it
// is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Great circle through x with unit-speed direction v/|v|, at arc length
/// |v| t.
inline Vector great_circle(const Vector &x, const Vector &v, double t) {
  const double s = v.norm();
  if (s == 0.0)
    return x;
  return std::cos(s * t) * x + std::sin(s * t) * (v / s);
}

/// Smoothed L1 cost by explicit loops over the observed entries.
inline double cost_loops(const Matrix &values, const Mask &mask, double eps,
                         const Vector &x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    double u = 0.0;
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      if (mask(i, j))
        u += values(i, j) * x[j];
    total -= std::sqrt(u * u + eps);
  }
  return total;
}

/// Central difference of f along the great circle through x in direction v.
inline double directional_fd(const std::function<double(const Vector &)> &f,
                             const Vector &x, const Vector &v, double h) {
  return (f(great_circle(x, v, h)) - f(great_circle(x, v, -h))) / (2.0 * h);
}

/// Central difference of a vector field along Euclidean coordinate j.
inline double partial_fd(const std::function<double(const Vector &)> &f,
                         const Vector &x, Eigen::Index j, double h) {
  Vector a = x, b = x;
  a[j] += h;
  b[j] -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

/// Minimum MEC over all 2^n haplotypes (n small). z and -z score the same,
/// so z_0 = +1 is fixed.
inline long brute_force_min_mec(const Matrix &values, const Mask &mask) {
  const Eigen::Index n = values.cols();
  long best = std::numeric_limits<long>::max();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n - 1)); ++bits) {
    long total = 0;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      long agree = 0, seen = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!mask(i, j))
          continue;
        const int z = (j == 0 || !((bits >> (j - 1)) & 1)) ? 1 : -1;
        ++seen;
        agree += values(i, j) == z ? 1 : 0;
      }
      total += std::min(agree, seen - agree);
    }
    best = std::min(best, total);
  }
  return best;
}

/// Minimum of g.e + 1/2 e^T H e over the disk |e| <= delta by polar grid
/// search (2-D only). Returns the minimizing model value.
inline double disk_grid_min(const Eigen::Vector2d &g, const Eigen::Matrix2d &H,
                            double delta, int radial = 400, int angular = 1440) {
  double best = 0.0;
  for (int a = 0; a < angular; ++a) {
    const double th = 2.0 * M_PI * a / angular;
    const Eigen::Vector2d dir(std::cos(th), std::sin(th));
    for (int r = 1; r <= radial; ++r) {
      const Eigen::Vector2d e = (delta * r / radial) * dir;
      best = std::min(best, g.dot(e) + 0.5 * e.dot(H * e));
    }
  }
  return best;
}

/// Orthonormal basis of the complement of x (columns).
inline Matrix tangent_basis(const Vector &x) {
  const Eigen::Index n = x.size();
  Matrix full(n, n + 1);
  full.col(0) = x;
  full.rightCols(n) = Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(full);
  Matrix q = qr.householderQ();
  return q.rightCols(n - 1);
}

} // namespace oracle
