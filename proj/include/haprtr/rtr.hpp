#pragma once

/** Riemannian trust-region minimization on the unit sphere.
 *
 * Each outer iteration approximately minimizes the quadratic model
 *
 *   m(eta) = f(x) + <grad f(x), eta> + 1/2 <Hess f(x)[eta], eta>,  |eta| <= Delta
 *
 * with Steihaug-Toint truncated CG, evaluates the ratio of actual to
 * predicted decrease at the retracted point, and updates the radius with the
 * factors 1/4, 1 and 2 (capped at delta_bar).
 */

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "haprtr/errors.hpp"
#include "haprtr/sphere.hpp"

namespace haprtr {

struct RtrConfig {
  /// Largest admissible trust-region radius.
  double delta_bar = std::numbers::pi;
  /// Initial radius, in (0, delta_bar).
  double delta0 = std::numbers::pi / 8.0;
  /// Acceptance threshold for rho_k, in [0, 1/4).
  double rho_prime = 0.1;
  double grad_tol = 1e-6;
  std::size_t max_outer = 500;
  /// Inner residual test |r_j| <= |r_0| min(kappa, |r_0|^theta).
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;
  /// Cap on tCG iterations; 0 means the tangent-space dimension n - 1.
  std::size_t tcg_max_inner = 0;
  /// Scale of the rounding allowance added to both decreases in rho_k, in
  /// units of machine epsilon times max(1, |f|).
  double rho_regularization = 1e3;
  std::uint64_t seed = 0;
  /// Keep the iterate coordinates in the trace.
  bool record_points = false;

  void validate() const {
    if (!(delta_bar > 0.0) || !std::isfinite(delta_bar))
      throw ParameterError("rtr.delta_bar must be positive");
    if (!(delta0 > 0.0 && delta0 < delta_bar))
      throw ParameterError("rtr.delta0 must lie in (0, delta_bar)");
    if (!(rho_prime >= 0.0 && rho_prime < 0.25))
      throw ParameterError("rtr.rho_prime must lie in [0, 0.25)");
    if (!(grad_tol > 0.0))
      throw ParameterError("rtr.grad_tol must be positive");
    if (!(tcg_kappa > 0.0 && tcg_kappa < 1.0))
      throw ParameterError("rtr.tcg_kappa must lie in (0, 1)");
    if (!(tcg_theta > 0.0))
      throw ParameterError("rtr.tcg_theta must be positive");
    if (!(rho_regularization >= 0.0))
      throw ParameterError("rtr.rho_regularization must be nonnegative");
  }
};

enum class TcgStop {
  ZeroGradient,
  ResidualSmall,
  NegativeCurvature,
  ExceededRadius,
  MaxInner,
};

inline const char *to_string(TcgStop s) {
  switch (s) {
  case TcgStop::ZeroGradient:
    return "zero-gradient";
  case TcgStop::ResidualSmall:
    return "residual";
  case TcgStop::NegativeCurvature:
    return "negative-curvature";
  case TcgStop::ExceededRadius:
    return "exceeded-radius";
  case TcgStop::MaxInner:
    return "max-inner";
  }
  return "unknown";
}

struct SubproblemResult {
  TangentVector eta;
  /// m(0) - m(eta).
  double model_decrease = 0.0;
  bool hit_boundary = false;
  std::size_t inner_iterations = 0;
  TcgStop stop = TcgStop::ZeroGradient;
};

/// Linear operator on the tangent space at a fixed point.
template <class Op>
concept TangentOperator = requires(const Op &op, const TangentVector &v) {
  { op(v) } -> std::convertible_to<TangentVector>;
};

/// Oracle triple for a smooth cost on the sphere. `hessian(x)` returns an
/// operator on T_x that is applied repeatedly by the inner solver.
template <class P>
concept RiemannianProblem = requires(const P &p, const UnitVector &x,
                                     const TangentVector &v) {
  { p.cost(x) } -> std::convertible_to<double>;
  { p.gradient(x) } -> std::convertible_to<TangentVector>;
  { p.hessian(x)(v) } -> std::convertible_to<TangentVector>;
};

/// Adapts three callables (point -> cost, point -> gradient,
/// (point, tangent) -> Hessian-vector product) to RiemannianProblem.
class FunctionProblem {
public:
  using CostFn = std::function<double(const UnitVector &)>;
  using GradFn = std::function<TangentVector(const UnitVector &)>;
  using HessFn =
      std::function<TangentVector(const UnitVector &, const TangentVector &)>;

  FunctionProblem(CostFn f, GradFn g, HessFn h)
      : cost_(std::move(f)), grad_(std::move(g)), hess_(std::move(h)) {}

  double cost(const UnitVector &x) const { return cost_(x); }
  TangentVector gradient(const UnitVector &x) const { return grad_(x); }
  auto hessian(const UnitVector &x) const {
    return [this, x](const TangentVector &v) { return hess_(x, v); };
  }

private:
  CostFn cost_;
  GradFn grad_;
  HessFn hess_;
};

namespace detail {

/// Positive root tau of |eta + tau d| = delta, given |eta| <= delta.
inline double boundary_step(const TangentVector &eta, const TangentVector &d,
                            double delta) {
  const double ed = inner(eta, d);
  const double dd = inner(d, d);
  const double gap = std::max(0.0, delta * delta - inner(eta, eta));
  const double root = std::sqrt(ed * ed + dd * gap);
  // Cancellation-free branch of the quadratic formula.
  return ed >= 0.0 ? gap / (ed + root) : (root - ed) / dd;
}

} // namespace detail

/// Truncated CG (Steihaug-Toint) for the trust-region subproblem at
/// grad.base(). Every path starts from the Cauchy step, so the result
/// satisfies m(0) - m(eta) >= 1/2 |g| min(delta, |g| / |H|).
template <TangentOperator Op>
SubproblemResult solve_subproblem(const TangentVector &grad, const Op &hess,
                                  double delta, const RtrConfig &cfg) {
  if (!(delta > 0.0))
    throw ParameterError("solve_subproblem: radius must be positive");

  const UnitVector &x = grad.base();
  SubproblemResult out{TangentVector::zero(x), 0.0, false, 0,
                       TcgStop::ZeroGradient};
  const double r0 = grad.norm();
  if (r0 == 0.0)
    return out;

  const std::size_t max_inner =
      cfg.tcg_max_inner > 0
          ? cfg.tcg_max_inner
          : static_cast<std::size_t>(std::max<Eigen::Index>(1, x.size() - 1));
  const double target = r0 * std::min(cfg.tcg_kappa, std::pow(r0, cfg.tcg_theta));

  TangentVector eta = TangentVector::zero(x);
  TangentVector h_eta = TangentVector::zero(x);
  TangentVector r = grad;
  TangentVector d = -grad;
  double rr = inner(r, r);
  out.stop = TcgStop::MaxInner;

  for (std::size_t j = 0; j < max_inner; ++j) {
    const TangentVector h_d = hess(d);
    const double curvature = inner(d, h_d);
    out.inner_iterations = j + 1;

    const double alpha = rr / curvature;
    const bool negative = !(curvature > 0.0);
    if (negative || (eta + alpha * d).norm() >= delta) {
      const double tau = detail::boundary_step(eta, d, delta);
      eta = eta + tau * d;
      h_eta = h_eta + tau * h_d;
      out.hit_boundary = true;
      out.stop = negative ? TcgStop::NegativeCurvature : TcgStop::ExceededRadius;
      break;
    }

    eta = eta + alpha * d;
    h_eta = h_eta + alpha * h_d;
    r = r + alpha * h_d;
    const double rr_next = inner(r, r);
    if (std::sqrt(rr_next) <= target) {
      out.stop = TcgStop::ResidualSmall;
      break;
    }
    d = -r + (rr_next / rr) * d;
    rr = rr_next;
  }

  // Rounding in the boundary step can overshoot the radius by an ulp.
  const double eta_norm = eta.norm();
  if (eta_norm > delta) {
    const double s = delta / eta_norm;
    eta = s * eta;
    h_eta = s * h_eta;
  }
  out.model_decrease = -(inner(grad, eta) + 0.5 * inner(eta, h_eta));
  out.eta = std::move(eta);
  return out;
}

struct RtrIteration {
  std::size_t k = 0;
  /// f(x_k) and |grad f(x_k)| at the start of the iteration.
  double cost = 0.0;
  double grad_norm = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double step_norm = 0.0;
  double model_decrease = 0.0;
  /// f(x_k) - f(R_{x_k}(eta_k)).
  double actual_decrease = 0.0;
  bool accepted = false;
  std::size_t inner_iterations = 0;
  TcgStop inner_stop = TcgStop::ZeroGradient;
  /// x_k, filled only when RtrConfig::record_points is set.
  Vector point;
};

enum class RtrStop { GradientTolerance, MaxIterations };

inline const char *to_string(RtrStop s) {
  return s == RtrStop::GradientTolerance ? "gradient-tolerance"
                                         : "max-iterations";
}

struct RtrTrace {
  std::vector<RtrIteration> iterations;
  RtrStop stop = RtrStop::MaxIterations;
};

struct RtrResult {
  UnitVector x;
  double cost = 0.0;
  double grad_norm = 0.0;
  /// Number of outer iterations performed (accepted or not).
  std::size_t iterations = 0;
  RtrTrace trace;
};

namespace detail {

inline void require_finite(double v, const char *what, std::size_t k) {
  if (!std::isfinite(v))
    throw NumericError(std::string("non-finite ") + what, k);
}

} // namespace detail

/// Runs the trust-region outer loop from x0 until |grad f| <= grad_tol or
/// max_outer iterations have been performed.
template <RiemannianProblem Problem>
RtrResult rtr_minimize(const Problem &problem, const UnitVector &x0,
                       const RtrConfig &cfg) {
  cfg.validate();

  UnitVector x = x0;
  double f = problem.cost(x);
  TangentVector g = problem.gradient(x);
  detail::require_finite(f, "cost", 0);
  detail::require_finite(g.norm(), "gradient", 0);

  double delta = cfg.delta0;
  RtrTrace trace;
  std::size_t k = 0;

  for (;; ++k) {
    const double g_norm = g.norm();
    if (g_norm <= cfg.grad_tol) {
      trace.stop = RtrStop::GradientTolerance;
      break;
    }
    if (k >= cfg.max_outer) {
      trace.stop = RtrStop::MaxIterations;
      break;
    }

    const auto hess = problem.hessian(x);
    SubproblemResult sub = solve_subproblem(g, hess, delta, cfg);
    detail::require_finite(sub.model_decrease, "model decrease", k);

    RtrIteration it;
    it.k = k;
    it.cost = f;
    it.grad_norm = g_norm;
    it.delta = delta;
    it.step_norm = sub.eta.norm();
    it.model_decrease = sub.model_decrease;
    it.inner_iterations = sub.inner_iterations;
    it.inner_stop = sub.stop;
    if (cfg.record_points)
      it.point = x.coords();

    UnitVector candidate = retract(x, sub.eta);
    const double f_candidate = problem.cost(candidate);
    detail::require_finite(f_candidate, "cost", k);

    // Below the resolution of f both decreases are rounding noise; the
    // regularization drives rho to 1 there instead of to 0/0.
    const double actual = f - f_candidate;
    const double reg = cfg.rho_regularization *
                       std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(f));
    const bool degenerate = !(sub.model_decrease > 0.0);
    const double rho =
        degenerate ? 0.0 : (actual + reg) / (sub.model_decrease + reg);
    it.rho = rho;
    it.actual_decrease = actual;

    if (rho < 0.25)
      delta *= 0.25;
    else if (rho > 0.75 && sub.hit_boundary)
      delta = std::min(2.0 * delta, cfg.delta_bar);

    if (!degenerate && rho > cfg.rho_prime) {
      // retract() already renormalizes onto the sphere.
      x = std::move(candidate);
      f = f_candidate;
      g = problem.gradient(x);
      detail::require_finite(g.norm(), "gradient", k + 1);
      it.accepted = true;
    }
    trace.iterations.push_back(std::move(it));
  }

  RtrResult result{x, f, g.norm(), k, std::move(trace)};
  return result;
}

} // namespace haprtr
