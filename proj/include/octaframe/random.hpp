#pragma once

// Portable seeded sampling.
//
// The engine is std::mt19937_64 (bit-exact across standard libraries).  The
// std:: distributions are not, so the conversions are spelled out here:
//   uniform()  = (next() >> 11) * 2^-53                in [0, 1)
//   normal()   = Box-Muller on (1 - uniform(), uniform()), cosine branch only
// A reimplementation in another language reproduces every stream from the
// same seed by following these two rules.

#include "sh3.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace octaframe
{

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal()
  {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

/// Uniform on the unit sphere of R^7.
inline Octupole random_unit_octupole(Rng &rng)
{
  Vector7 v;
  for (int i = 0; i < 7; ++i)
    v[i] = rng.normal();
  return Octupole(v / v.norm());
}

/// Each angle uniform in [0, 2pi).
inline EulerAngles random_angles(Rng &rng)
{
  const double tau = 2.0 * std::numbers::pi;
  EulerAngles e;
  e.alpha = rng.uniform(0.0, tau);
  e.beta = rng.uniform(0.0, tau);
  e.gamma = rng.uniform(0.0, tau);
  return e;
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
inline Matrix3 random_rotation(Rng &rng)
{
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i)
    q[i] = rng.normal();
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

} // namespace octaframe
