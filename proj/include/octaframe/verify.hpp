#pragma once

// Numerical self-check of the manifold equations, the invariant deviation
// measure and its SO(3)-average construction, the rotation representation,
// and the analytic gradients.  Every check is seeded and reduced in a fixed
// order, so the report is byte-stable.

#include "errors.hpp"
#include "random.hpp"
#include "semisymmetry.hpp"
#include "sh3.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace octaframe
{

struct VerifyCheck
{
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_error <= tolerance; }
};

struct VerifyReport
{
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<VerifyCheck> checks;

  bool all_pass() const
  {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck &c) { return c.pass(); });
  }
};

/// Central differences: max |fd - analytic| / max(1, max |analytic|).
inline double gradient_check(const std::function<double(const Vector7 &)> &f, const Vector7 &x,
                             const Vector7 &analytic, double h = 1e-5)
{
  Vector7 fd;
  for (int i = 0; i < 7; ++i)
  {
    Vector7 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    fd[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return (fd - analytic).cwiseAbs().maxCoeff() / std::max(1.0, analytic.cwiseAbs().maxCoeff());
}

/// Max deviation of sum_m (R a)_m Y_m(v) from sum_m a_m Y_m(Q^T v), with R the image of Q.
inline double function_consistency_error(const Matrix3 &q, const Octupole &a, const Direction &v)
{
  const double lhs = evaluate(rotate(a, harmonic_rotation(q)), v);
  const double rhs = evaluate(a, Direction(q.transpose() * v.vec()));
  return std::abs(lhs - rhs);
}

inline VerifyReport run_verification(int samples, std::uint64_t seed)
{
  if (samples < 1)
    throw ArgumentError("samples must be at least 1");

  VerifyReport rep;
  rep.samples = samples;
  rep.seed = seed;
  Rng rng(seed);
  const PenaltyWeights w{5.0, 2.5};

  {
    double norm_err = 0.0, quad_err = 0.0;
    for (int i = 0; i < samples; ++i)
    {
      const auto r = quadric_residuals(semisymmetric_from_angles(random_angles(rng)));
      norm_err = std::max(norm_err, std::abs(r.norm));
      for (double q : r.quadric)
        quad_err = std::max(quad_err, std::abs(q));
    }
    rep.checks.push_back({"manifold unit norm", norm_err, 1e-12});
    rep.checks.push_back({"manifold quadrics", quad_err, 1e-10});
  }
  {
    double orth = 0.0;
    for (int i = 0; i < samples; ++i)
    {
      const EulerAngles e = random_angles(rng);
      for (const auto &r : {rotation_x(e.alpha), rotation_y(e.beta), rotation_z(e.gamma),
                            compose_zxz(e.alpha, e.beta, e.gamma), harmonic_rotation(random_rotation(rng))})
        orth = std::max(orth, r.orthogonality_error());
    }
    rep.checks.push_back({"rotation orthogonality", orth, 1e-13});
    const Matrix7 q = rotation_x_quarter().m;
    rep.checks.push_back(
        {"quarter turn order 4", (q * q * q * q - Matrix7::Identity()).cwiseAbs().maxCoeff(), 1e-14});
  }
  {
    double err = 0.0;
    for (int i = 0; i < samples; ++i)
    {
      const Matrix3 q = random_rotation(rng);
      const Octupole a = random_unit_octupole(rng);
      const Direction v(rng.normal(), rng.normal(), rng.normal());
      err = std::max(err, function_consistency_error(q, a, v));
    }
    rep.checks.push_back({"coefficient/function consistency", err, 1e-10});
  }
  {
    double err = 0.0;
    for (int i = 0; i < samples; ++i)
    {
      const Octupole a = random_unit_octupole(rng);
      const HarmonicRotation r = harmonic_rotation(random_rotation(rng));
      const double d = deviation(a);
      err = std::max(err, std::abs(deviation(rotate(a, r)) - d) / std::max(1.0, d));
    }
    rep.checks.push_back({"deviation rotation invariance", err, 1e-9});
  }
  {
    double err = 0.0;
    for (int i = 0; i < samples; ++i)
    {
      const Octupole a = random_unit_octupole(rng);
      err = std::max(err, std::abs(so3_average_trial(a) - deviation(a)));
    }
    rep.checks.push_back({"SO(3) average equals deviation", err, 1e-6});
  }
  {
    double dev = 0.0, pen = 0.0;
    for (int i = 0; i < samples; ++i)
    {
      const Octupole a = random_unit_octupole(rng);
      dev = std::max(dev, gradient_check([](const Vector7 &x) { return deviation(Octupole(x)); }, a.coeffs,
                                         deviation_gradient(a)));
      pen = std::max(pen, gradient_check([&w](const Vector7 &x) { return penalty(Octupole(x), w); }, a.coeffs,
                                         penalty_gradient(a, w)));
    }
    rep.checks.push_back({"deviation gradient", dev, 1e-6});
    rep.checks.push_back({"penalty gradient", pen, 1e-6});
  }
  return rep;
}

inline std::string format_report(const VerifyReport &rep)
{
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "octaframe verify: samples=%d seed=%llu\n", rep.samples,
                static_cast<unsigned long long>(rep.seed));
  out += line;
  std::snprintf(line, sizeof line, "%-34s %12s %12s  %s\n", "check", "max_error", "tolerance", "result");
  out += line;
  for (const auto &c : rep.checks)
  {
    std::snprintf(line, sizeof line, "%-34s %12.3e %12.1e  %s\n", c.name.c_str(), c.max_error, c.tolerance,
                  c.pass() ? "PASS" : "FAIL");
    out += line;
  }
  out += rep.all_pass() ? "all checks passed\n" : "some checks FAILED\n";
  return out;
}

} // namespace octaframe
