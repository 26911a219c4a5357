#pragma once

// Single-octupole semisymmetrization and distance queries to the
// semisymmetric manifold.

#include "descent.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "semisymmetry.hpp"
#include "sh3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace octaframe
{

struct ManifoldDistance
{
  double distance = 0.0;
  Octupole nearest;
  EulerAngles angles;
};

struct DistanceConfig
{
  int grid_n = 24;
  int refine_iters = 50;
};

namespace detail
{

inline double wrap_angle(double t)
{
  const double tau = 2.0 * std::numbers::pi;
  t = std::fmod(t, tau);
  return t < 0.0 ? t + tau : t;
}

} // namespace detail

namespace detail
{

/// Damped Newton over frames q <- exp(w) q, which has no gimbal lock.  The
/// Hessian keeps the residual curvature term, so far-from-manifold targets
/// converge as fast as near ones.  Returns the squared distance reached.
inline double refine_frame(const Vector7 &target, Matrix3 &q, int iters)
{
  static const std::array<Matrix7, 3> gen{rotation_x_derivative(0.0), Matrix7(-rotation_y_derivative(0.0)),
                                          rotation_z_derivative(0.0)};
  const Vector7 ref = Octupole::reference().coeffs;
  Vector7 s = harmonic_rotation(q).m * ref;
  double cost = (s - target).squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < iters; ++it)
  {
    const Vector7 r = s - target;
    std::array<Vector7, 3> gs;
    Eigen::Vector3d grad;
    for (int k = 0; k < 3; ++k)
    {
      gs[k] = gen[k] * s;
      grad[k] = 2.0 * r.dot(gs[k]);
    }
    if (grad.cwiseAbs().maxCoeff() < 1e-300)
      break;
    Eigen::Matrix3d hess;
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l)
        hess(k, l) = hess(l, k) = 2.0 * gs[k].dot(gs[l]) + r.dot(gen[k] * gs[l] + gen[l] * gs[k]);

    bool improved = false;
    double gain = 0.0;
    for (int tries = 0; tries < 40 && !improved; ++tries)
    {
      Eigen::Matrix3d lhs = hess;
      lhs.diagonal().array() += lambda * (1.0 + hess.diagonal().cwiseAbs().array());
      const Eigen::LDLT<Eigen::Matrix3d> ldlt(lhs);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any())
      {
        lambda *= 4.0;
        continue;
      }
      const Eigen::Vector3d w = ldlt.solve(-grad);
      const double angle = w.norm();
      Matrix3 trial = q;
      if (angle > 0.0)
        trial = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix() * q;
      const Vector7 st = harmonic_rotation(trial).m * ref;
      const double tc = (st - target).squaredNorm();
      if (tc < cost)
      {
        gain = cost - tc;
        q = trial;
        s = st;
        cost = tc;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
      }
      else
      {
        lambda *= 4.0;
      }
    }
    if (!improved || gain <= 1e-30 * std::max(1.0, cost))
      break;
  }
  return cost;
}

/// Angles e with frame_rotation(e) == q.
inline EulerAngles frame_angles(const Matrix3 &q)
{
  const Vector3 xyz = q.eulerAngles(0, 1, 2);
  return {wrap_angle(xyz[0]), wrap_angle(-xyz[1]), wrap_angle(xyz[2])};
}

} // namespace detail

/// Grid local minima refined per distance query.
inline constexpr std::size_t kDistanceSeeds = 32;

/// Distance from a to the nearest unit semisymmetric octupole.
///
/// A grid_n^3 enumeration of XYZ Euler angles on [0, 2pi)^3 finds the periodic
/// local minima (ties go to the lowest linear index).  The best kDistanceSeeds
/// of them are polished by damped Newton over rotations for up to
/// refine_iters iterations and the closest result wins.  Only improving steps
/// are taken, so the result is never worse than the best grid point.
inline ManifoldDistance distance_to_manifold(const Octupole &a, int grid_n = 24, int refine_iters = 50)
{
  if (grid_n < 8)
    throw ArgumentError("distance grid needs at least 8 points per angle");
  if (refine_iters < 0)
    throw ArgumentError("refine_iters must be nonnegative");

  const double h = 2.0 * std::numbers::pi / grid_n;
  const std::size_t n = static_cast<std::size_t>(grid_n);
  const Vector7 ref = Octupole::reference().coeffs;

  std::vector<Vector7> by_gamma(n);
  std::vector<Matrix7> ry(n), rx(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    by_gamma[i] = rotation_z(i * h).m * ref;
    ry[i] = rotation_y(i * h).m;
    rx[i] = rotation_x(i * h).m;
  }

  // index = (ia * n + ib) * n + ig
  std::vector<double> dist2(n * n * n);
  parallel_for(n, [&](std::size_t ia) {
    for (std::size_t ib = 0; ib < n; ++ib)
    {
      const Matrix7 rxy = rx[ia] * ry[ib];
      for (std::size_t ig = 0; ig < n; ++ig)
        dist2[(ia * n + ib) * n + ig] = (rxy * by_gamma[ig] - a.coeffs).squaredNorm();
    }
  });

  // Periodic grid local minima, best first; ties go to the lower index.
  std::vector<std::size_t> minima;
  for (std::size_t ia = 0; ia < n; ++ia)
    for (std::size_t ib = 0; ib < n; ++ib)
      for (std::size_t ig = 0; ig < n; ++ig)
      {
        const std::size_t idx = (ia * n + ib) * n + ig;
        bool is_min = true;
        for (int da = -1; da <= 1 && is_min; ++da)
          for (int db = -1; db <= 1 && is_min; ++db)
            for (int dg = -1; dg <= 1 && is_min; ++dg)
            {
              const std::size_t j = (((ia + n + da) % n) * n + (ib + n + db) % n) * n + (ig + n + dg) % n;
              if (j != idx && (dist2[j] < dist2[idx] || (dist2[j] == dist2[idx] && j < idx)))
                is_min = false;
            }
        if (is_min)
          minima.push_back(idx);
      }
  std::sort(minima.begin(), minima.end(), [&](std::size_t x, std::size_t y) {
    return dist2[x] < dist2[y] || (dist2[x] == dist2[y] && x < y);
  });
  minima.resize(std::min<std::size_t>(minima.size(), kDistanceSeeds));

  Matrix3 best = Matrix3::Identity();
  double best_cost = std::numeric_limits<double>::infinity();
  for (const std::size_t idx : minima)
  {
    Matrix3 q = frame_rotation({h * static_cast<double>(idx / (n * n)), h * static_cast<double>((idx / n) % n),
                                h * static_cast<double>(idx % n)});
    const double c = detail::refine_frame(a.coeffs, q, refine_iters);
    if (c < best_cost)
    {
      best_cost = c;
      best = q;
    }
  }

  const EulerAngles e = detail::frame_angles(best);
  ManifoldDistance out;
  out.angles = e;
  out.nearest = semisymmetric_from_angles(e);
  out.distance = (out.nearest.coeffs - a.coeffs).norm();
  return out;
}

struct TrajectoryPoint
{
  int iter = 0;
  Octupole value;
  double penalty = 0.0;
  double sqrt_penalty = 0.0;
  double distance = 0.0;
};

struct Trajectory
{
  std::vector<TrajectoryPoint> points;
  DescentStatus status = DescentStatus::MaxIterations;
  /// The start point was ~0 and got replaced by 1e-3 * reference.
  bool perturbed = false;
};

/// Gradient descent on penalty(., w) from a0, recording the distance to the
/// manifold at every iterate.
inline Trajectory semisymmetrize(const Octupole &a0, const PenaltyWeights &w, const DescentConfig &cfg = {},
                                 const DistanceConfig &dist = {})
{
  if (!a0.finite())
    throw ArgumentError("initial octupole must be finite");
  w.validate();

  Trajectory traj;
  Eigen::VectorXd x = a0.coeffs;
  if (a0.norm() < 1e-8)
  {
    // Both gradient terms vanish at the origin.
    x = 1e-3 * Octupole::reference().coeffs;
    traj.perturbed = true;
  }

  auto objective = [&w](const Eigen::VectorXd &v, Eigen::VectorXd *grad) {
    const Octupole a{Vector7(v)};
    if (grad)
      *grad = penalty_gradient(a, w);
    return penalty(a, w);
  };
  auto observe = [&](int iter, const Eigen::VectorXd &v, double f) {
    TrajectoryPoint p;
    p.iter = iter;
    p.value = Octupole(Vector7(v));
    p.penalty = f;
    p.sqrt_penalty = std::sqrt(f);
    p.distance = distance_to_manifold(p.value, dist.grid_n, dist.refine_iters).distance;
    traj.points.push_back(p);
  };
  traj.status = gradient_descent(objective, x, cfg, observe);
  return traj;
}

/// sqrt(p) / distance per iterate; iterates closer than 1e-12 are skipped.
inline std::vector<double> sqrt_penalty_vs_distance(const Trajectory &t)
{
  std::vector<double> out;
  for (const auto &p : t.points)
    if (p.distance >= 1e-12)
      out.push_back(p.sqrt_penalty / p.distance);
  return out;
}

} // namespace octaframe
