#pragma once

/** Geometry of the unit sphere S^{n-1} embedded in R^n.
 *
 * Points are UnitVector values, tangent vectors are TangentVector values that
 * carry a copy of their base point. The metric is the one induced by R^n, so
 * inner products and norms of tangent vectors are plain Euclidean ones.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "haprtr/errors.hpp"

namespace haprtr {

using Vector = Eigen::VectorXd;

/// Point on S^{n-1}, n >= 2.
class UnitVector {
public:
  static constexpr double kNormTolerance = 1e-12;

  /// Wraps coordinates that are already unit length (within kNormTolerance).
  explicit UnitVector(Vector coords) : coords_(std::move(coords)) {
    check_dimension();
    if (std::abs(coords_.norm() - 1.0) > kNormTolerance)
      throw ContractError("UnitVector: coordinates do not have unit norm");
  }

  /// Normalizes arbitrary nonzero coordinates onto the sphere.
  static UnitVector normalized(const Vector &v) {
    const double nrm = v.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw ContractError("UnitVector: cannot normalize a zero or non-finite vector");
    return UnitVector(v / nrm, Unchecked{});
  }

  /// Standard basis vector e_k in R^n.
  static UnitVector basis(Eigen::Index n, Eigen::Index k) {
    Vector v = Vector::Zero(n);
    if (k < 0 || k >= n)
      throw IndexError("UnitVector::basis: index out of range");
    v[k] = 1.0;
    return UnitVector(std::move(v));
  }

  const Vector &coords() const { return coords_; }
  Eigen::Index size() const { return coords_.size(); }
  double operator[](Eigen::Index j) const { return coords_[j]; }

  UnitVector operator-() const { return UnitVector(-coords_, Unchecked{}); }

  friend bool operator==(const UnitVector &a, const UnitVector &b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

private:
  struct Unchecked {};
  UnitVector(Vector coords, Unchecked) : coords_(std::move(coords)) {
    check_dimension();
  }

  void check_dimension() const {
    if (coords_.size() < 2)
      throw DimensionError("UnitVector: dimension must be at least 2");
  }

  Vector coords_;
};

/// Vector in the tangent space T_x S^{n-1} = { v : x.v = 0 }.
///
/// Directions that fail the tangency tolerance are projected once on
/// construction instead of being rejected.
class TangentVector {
public:
  static constexpr double kTangencyTolerance = 1e-10;

  TangentVector(UnitVector base, Vector dir)
      : base_(std::move(base)), dir_(std::move(dir)) {
    detail::require_same_size(dir_.size(), base_.size(), "TangentVector");
    const double drift = base_.coords().dot(dir_);
    if (std::abs(drift) > kTangencyTolerance * (1.0 + dir_.norm()))
      dir_ -= drift * base_.coords();
  }

  static TangentVector zero(const UnitVector &base) {
    return TangentVector(base, Vector::Zero(base.size()));
  }

  const UnitVector &base() const { return base_; }
  const Vector &dir() const { return dir_; }
  Eigen::Index size() const { return dir_.size(); }
  double norm() const { return dir_.norm(); }

  TangentVector operator-() const { return {base_, -dir_, Unchecked{}}; }

  friend TangentVector operator*(double s, const TangentVector &v) {
    return {v.base_, s * v.dir_, Unchecked{}};
  }
  friend TangentVector operator*(const TangentVector &v, double s) {
    return s * v;
  }
  friend TangentVector operator+(const TangentVector &a,
                                 const TangentVector &b) {
    a.require_same_base(b, "operator+");
    return {a.base_, a.dir_ + b.dir_, Unchecked{}};
  }
  friend TangentVector operator-(const TangentVector &a,
                                 const TangentVector &b) {
    a.require_same_base(b, "operator-");
    return {a.base_, a.dir_ - b.dir_, Unchecked{}};
  }

  void require_same_base(const TangentVector &other, const char *where) const {
    detail::require_same_size(size(), other.size(), where);
    if (!(base_ == other.base_))
      throw ContractError(std::string(where) +
                          ": tangent vectors live at different base points");
  }

private:
  struct Unchecked {};
  // Linear combinations of tangent vectors at the same base stay tangent.
  TangentVector(UnitVector base, Vector dir, Unchecked)
      : base_(std::move(base)), dir_(std::move(dir)) {}

  UnitVector base_;
  Vector dir_;
};

/// Riemannian metric: the Euclidean dot product of tangent directions.
inline double inner(const TangentVector &u, const TangentVector &v) {
  u.require_same_base(v, "inner");
  return u.dir().dot(v.dir());
}

/// Orthogonal projection (I - x x^T) v onto T_x S^{n-1}.
inline TangentVector project_tangent(const UnitVector &x, const Vector &v) {
  detail::require_same_size(v.size(), x.size(), "project_tangent");
  const Vector &c = x.coords();
  return TangentVector(x, v - c.dot(v) * c);
}

namespace detail {

inline void require_based_at(const UnitVector &x, const TangentVector &v,
                             const char *where) {
  require_same_size(v.size(), x.size(), where);
  if (!(v.base() == x))
    throw ContractError(std::string(where) +
                        ": tangent vector is not based at the given point");
}

} // namespace detail

/// Great circle t -> x cos(|v| t) + (v/|v|) sin(|v| t).
inline UnitVector geodesic(const UnitVector &x, const TangentVector &v,
                           double t) {
  detail::require_based_at(x, v, "geodesic");
  const double speed = v.norm();
  if (speed == 0.0 || t == 0.0)
    return x;
  const double angle = speed * t;
  const Vector y =
      std::cos(angle) * x.coords() + (std::sin(angle) / speed) * v.dir();
  return UnitVector::normalized(y);
}

/// Exponential map: the geodesic with initial velocity v evaluated at t = 1.
inline UnitVector exp(const UnitVector &x, const TangentVector &v) {
  return geodesic(x, v, 1.0);
}

/// Metric-projection retraction R_x(v) = (x + v) / |x + v|.
inline UnitVector retract(const UnitVector &x, const TangentVector &v) {
  detail::require_based_at(x, v, "retract");
  return UnitVector::normalized(x.coords() + v.dir());
}

/// Parallel transport of v from T_x to T_y along the minimizing geodesic,
/// i.e. the rotation of span{x, y} taking x to y.
inline TangentVector transport(const UnitVector &x, const UnitVector &y,
                               const TangentVector &v) {
  detail::require_based_at(x, v, "transport");
  detail::require_same_size(y.size(), x.size(), "transport");
  if (y == x)
    return v;
  const Vector &a = x.coords();
  const Vector &b = y.coords();
  const double cosine = a.dot(b);
  if ((a + b).norm() <= 1e-10)
    throw AntipodalError("transport: points are antipodal");
  const Vector &w = v.dir();
  const Vector moved =
      w - ((a + b).dot(w) / (1.0 + cosine)) * (a + b) + 2.0 * a.dot(w) * b;
  return TangentVector(y, moved);
}

/// Geodesic distance arccos(x.y), in [0, pi].
///
/// Evaluated as atan2(|y - (x.y) x|, x.y), which equals the clamped arccos
/// but keeps full relative accuracy for nearly coincident points.
inline double dist(const UnitVector &x, const UnitVector &y) {
  detail::require_same_size(x.size(), y.size(), "dist");
  const double cosine = std::clamp(x.coords().dot(y.coords()), -1.0, 1.0);
  const double sine = (y.coords() - cosine * x.coords()).norm();
  return std::atan2(sine, cosine);
}

} // namespace haprtr
