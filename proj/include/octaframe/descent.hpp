#pragma once

#include "errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string_view>

namespace octaframe
{

/// Gradient descent with Armijo backtracking.
struct DescentConfig
{
  double step = 0.1;       ///< trial step at the start of every iteration
  int max_iters = 500;     ///< maximum number of accepted steps
  double tol = 1e-3;       ///< stop once sqrt(objective) < tol
  double backtrack = 0.5;  ///< step shrink factor
  double armijo = 1e-4;    ///< sufficient-decrease constant
  double grad_tol = 1e-12; ///< stop once max |gradient| < grad_tol
  int max_backtracks = 60; ///< shrinks allowed before declaring a stall

  void validate() const
  {
    if (!(step > 0.0))
      throw ArgumentError("descent step must be positive");
    if (max_iters < 1)
      throw ArgumentError("max_iters must be at least 1");
    if (!(tol > 0.0))
      throw ArgumentError("tolerance must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw ArgumentError("backtracking factor must lie in (0, 1)");
    if (!(armijo > 0.0 && armijo < 1.0))
      throw ArgumentError("Armijo constant must lie in (0, 1)");
    if (!(grad_tol >= 0.0) || max_backtracks < 1)
      throw ArgumentError("invalid gradient tolerance or backtrack limit");
  }
};

enum class DescentStatus
{
  Converged,     ///< sqrt(objective) fell below tol
  Stationary,    ///< gradient fell below grad_tol first
  MaxIterations, ///< budget exhausted
  Stalled,       ///< line search could not find a decrease
};

inline std::string_view to_string(DescentStatus s)
{
  switch (s)
  {
  case DescentStatus::Converged: return "converged";
  case DescentStatus::Stationary: return "stationary";
  case DescentStatus::MaxIterations: return "max_iterations";
  case DescentStatus::Stalled: return "stalled";
  }
  return "unknown";
}

/// Minimizes a nonnegative objective.  `objective(x, grad)` returns f(x) and,
/// when grad is non-null, stores the gradient.  `observe(iter, x, f)` sees the
/// start point (iter 0) and every accepted iterate; accepted values strictly
/// decrease.
template <class Objective, class Observer>
DescentStatus gradient_descent(Objective &&objective, Eigen::VectorXd &x, const DescentConfig &cfg,
                               Observer &&observe)
{
  cfg.validate();
  Eigen::VectorXd g(x.size());
  double fx = objective(x, &g);
  observe(0, x, fx);

  Eigen::VectorXd trial(x.size());
  for (int iter = 0;; ++iter)
  {
    if (std::sqrt(fx) < cfg.tol)
      return DescentStatus::Converged;
    if (g.size() == 0 || g.cwiseAbs().maxCoeff() < cfg.grad_tol)
      return DescentStatus::Stationary;
    if (iter == cfg.max_iters)
      return DescentStatus::MaxIterations;

    const double slope = g.squaredNorm();
    double t = cfg.step;
    double ft = 0.0;
    bool accepted = false;
    for (int k = 0; k <= cfg.max_backtracks; ++k, t *= cfg.backtrack)
    {
      trial = x - t * g;
      ft = objective(trial, nullptr);
      if (ft <= fx - cfg.armijo * t * slope && ft < fx)
      {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      return DescentStatus::Stalled;

    x.swap(trial);
    fx = objective(x, &g);
    observe(iter + 1, x, fx);
  }
}

} // namespace octaframe
