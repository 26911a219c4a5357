#pragma once

// Implicit description of the semisymmetric-octupole manifold and the
// rotation-invariant quartic that measures deviation from it.

#include "errors.hpp"
#include "parallel.hpp"
#include "sh3.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace octaframe
{

/// The three constant symmetric matrices cutting the manifold out of the unit sphere.
struct QuadricSet
{
  Matrix7 m1, m2, m3;

  const Matrix7 &operator[](int k) const { return k == 0 ? m1 : k == 1 ? m2 : m3; }

  static const QuadricSet &get()
  {
    static const QuadricSet set = [] {
      const double r = std::sqrt(15.0);
      QuadricSet q;
      q.m1 << -5, 0, 0, 0, 0, 0,  0,
               0, 0, 0, 0, 0, 0,  0,
               0, 0, 3, 0, 0, 0,  0,
               0, 0, 0, 4, 0, 0,  0,
               0, 0, 0, 0, 3, 0,  0,
               0, 0, 0, 0, 0, 0,  0,
               0, 0, 0, 0, 0, 0, -5;
      q.m2 << 0, 5, 0, 0, 0, 0, 0,
              5, 0, r, 0, 0, 0, 0,
              0, r, 0, 0, 0, 0, 0,
              0, 0, 0, 0, 2, 0, 0,
              0, 0, 0, 2, 0, r, 0,
              0, 0, 0, 0, r, 0, 5,
              0, 0, 0, 0, 0, 5, 0;
      q.m3 << 0,  0,  0, 0, 0,  5,  0,
              0,  0,  0, 0, r,  0, -5,
              0,  0,  0, 2, 0, -r,  0,
              0,  0,  2, 0, 0,  0,  0,
              0,  r,  0, 0, 0,  0,  0,
              5,  0, -r, 0, 0,  0,  0,
              0, -5,  0, 0, 0,  0,  0;
      return q;
    }();
    return set;
  }
};

struct QuadricResiduals
{
  double norm;                   // a^T a - 1
  std::array<double, 3> quadric; // a^T M_k a
};

inline QuadricResiduals quadric_residuals(const Octupole &a)
{
  const QuadricSet &q = QuadricSet::get();
  const Vector7 &v = a.coeffs;
  return {v.dot(v) - 1.0, {v.dot(q.m1 * v), v.dot(q.m2 * v), v.dot(q.m3 * v)}};
}

/// Scale and symmetry weights of the single-octupole penalty.
struct PenaltyWeights
{
  double w1 = 5.0;
  double w2 = 2.5;

  void validate() const
  {
    if (!(w1 > 0.0) || !(w2 > 0.0))
      throw ArgumentError("penalty weights must be positive");
  }
};

namespace detail
{

/// c * sqrt(15)^s * prod a_m^e_m
struct Monomial
{
  int coeff;
  int surd; // 1 if the coefficient carries a factor sqrt(15)
  std::array<int, 7> exps;
};

// Term-for-term transcription of the deviation quartic, in printed order.
// Exponents are listed for (a-3, a-2, a-1, a0, a1, a2, a3).
inline constexpr std::array<Monomial, 42> kDeviationTerms{{
    {25, 0, {4, 0, 0, 0, 0, 0, 0}},
    {50, 0, {2, 2, 0, 0, 0, 0, 0}},
    {20, 1, {1, 2, 1, 0, 0, 0, 0}},
    {-10, 0, {2, 0, 2, 0, 0, 0, 0}},
    {30, 0, {0, 2, 2, 0, 0, 0, 0}},
    {8, 1, {1, 0, 3, 0, 0, 0, 0}},
    {21, 0, {0, 0, 4, 0, 0, 0, 0}},
    {-40, 0, {2, 0, 0, 2, 0, 0, 0}},
    {80, 0, {0, 2, 0, 2, 0, 0, 0}},
    {32, 0, {0, 0, 2, 2, 0, 0, 0}},
    {16, 0, {0, 0, 0, 4, 0, 0, 0}},
    {120, 0, {1, 1, 0, 1, 1, 0, 0}},
    {-16, 1, {0, 1, 1, 1, 1, 0, 0}},
    {-10, 0, {2, 0, 0, 0, 2, 0, 0}},
    {30, 0, {0, 2, 0, 0, 2, 0, 0}},
    {-24, 1, {1, 0, 1, 0, 2, 0, 0}},
    {42, 0, {0, 0, 2, 0, 2, 0, 0}},
    {32, 0, {0, 0, 0, 2, 2, 0, 0}},
    {21, 0, {0, 0, 0, 0, 4, 0, 0}},
    {120, 0, {1, 0, 1, 1, 0, 1, 0}},
    {8, 1, {0, 0, 2, 1, 0, 1, 0}},
    {40, 1, {1, 1, 0, 0, 1, 1, 0}},
    {-8, 1, {0, 0, 0, 1, 2, 1, 0}},
    {50, 0, {2, 0, 0, 0, 0, 2, 0}},
    {-20, 1, {1, 0, 1, 0, 0, 2, 0}},
    {30, 0, {0, 0, 2, 0, 0, 2, 0}},
    {80, 0, {0, 0, 0, 2, 0, 2, 0}},
    {30, 0, {0, 0, 0, 0, 2, 2, 0}},
    {-120, 0, {0, 1, 1, 1, 0, 0, 1}},
    {-20, 1, {0, 2, 0, 0, 1, 0, 1}},
    {24, 1, {0, 0, 2, 0, 1, 0, 1}},
    {-8, 1, {0, 0, 0, 0, 3, 0, 1}},
    {40, 1, {0, 1, 1, 0, 0, 1, 1}},
    {120, 0, {0, 0, 0, 1, 1, 1, 1}},
    {20, 1, {0, 0, 0, 0, 1, 2, 1}},
    {50, 0, {2, 0, 0, 0, 0, 0, 2}},
    {50, 0, {0, 2, 0, 0, 0, 0, 2}},
    {-10, 0, {0, 0, 2, 0, 0, 0, 2}},
    {-40, 0, {0, 0, 0, 2, 0, 0, 2}},
    {-10, 0, {0, 0, 0, 0, 2, 0, 2}},
    {50, 0, {0, 0, 0, 0, 0, 2, 2}},
    {25, 0, {0, 0, 0, 0, 0, 0, 4}},
}};

inline double monomial_coeff(const Monomial &t)
{
  static const double r15 = std::sqrt(15.0);
  return t.surd ? t.coeff * r15 : static_cast<double>(t.coeff);
}

inline double ipow(double x, int e)
{
  double r = 1.0;
  for (int i = 0; i < e; ++i)
    r *= x;
  return r;
}

} // namespace detail

/// Rotation-invariant quartic deviation from semisymmetry; zero on the manifold
/// (and on its scalings).
inline double deviation(const Octupole &a)
{
  double sum = 0.0;
  for (const auto &t : detail::kDeviationTerms)
  {
    double term = detail::monomial_coeff(t);
    for (int i = 0; i < 7; ++i)
      term *= detail::ipow(a.coeffs[i], t.exps[i]);
    sum += term;
  }
  return sum;
}

/// Gradient of deviation(), differentiated monomial by monomial.
inline Vector7 deviation_gradient(const Octupole &a)
{
  Vector7 g = Vector7::Zero();
  for (const auto &t : detail::kDeviationTerms)
  {
    const double c = detail::monomial_coeff(t);
    for (int j = 0; j < 7; ++j)
    {
      if (t.exps[j] == 0)
        continue;
      double term = c * t.exps[j];
      for (int i = 0; i < 7; ++i)
        term *= detail::ipow(a.coeffs[i], i == j ? t.exps[i] - 1 : t.exps[i]);
      g[j] += term;
    }
  }
  return g;
}

/// Non-invariant sum of squared quadric residuals (norm residual excluded).
inline double trial_deviation(const Octupole &a)
{
  const auto r = quadric_residuals(a);
  return r.quadric[0] * r.quadric[0] + r.quadric[1] * r.quadric[1] + r.quadric[2] * r.quadric[2];
}

/// p(a) = w1 (a^T a - 1)^2 + w2 d(a)
inline double penalty(const Octupole &a, const PenaltyWeights &w)
{
  const double s = a.coeffs.squaredNorm() - 1.0;
  return w.w1 * s * s + w.w2 * deviation(a);
}

inline Vector7 penalty_gradient(const Octupole &a, const PenaltyWeights &w)
{
  const double s = a.coeffs.squaredNorm() - 1.0;
  return 4.0 * w.w1 * s * a.coeffs + w.w2 * deviation_gradient(a);
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
inline void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
}

/// Product rule for Haar averages over SO(3) in ZXZ angles: trapezoid in
/// alpha and gamma, Gauss-Legendre in beta (with the sin(beta) density).
struct So3Quadrature
{
  int n_alpha = 32;
  int n_beta = 32;
  int n_gamma = 32;

  void validate() const
  {
    if (n_alpha < 16 || n_beta < 16 || n_gamma < 16)
      throw ArgumentError("SO(3) quadrature needs at least 16 points per angle");
  }
};

/// Haar average of trial_deviation over the orbit of a.  Agrees with deviation(a).
///
/// Summation is over a flat array in (beta, gamma, alpha) order with a pairwise
/// tree, so the result does not depend on the worker count.
inline double so3_average_trial(const Octupole &a, const So3Quadrature &q = {})
{
  q.validate();
  using std::numbers::pi;

  std::vector<double> xs, ws;
  gauss_legendre(q.n_beta, xs, ws);

  const double da = 2.0 * pi / q.n_alpha, dg = 2.0 * pi / q.n_gamma;
  std::vector<Vector7> after_gamma(q.n_gamma);
  for (int k = 0; k < q.n_gamma; ++k)
    after_gamma[k] = rotation_z(k * dg).m * a.coeffs;
  std::vector<HarmonicRotation> rz_alpha(q.n_alpha);
  for (int i = 0; i < q.n_alpha; ++i)
    rz_alpha[i] = rotation_z(i * da);

  const std::size_t per_beta = static_cast<std::size_t>(q.n_gamma) * q.n_alpha;
  std::vector<double> values(per_beta * q.n_beta);
  parallel_for(static_cast<std::size_t>(q.n_beta), [&](std::size_t j) {
    const double beta = 0.5 * pi * (xs[j] + 1.0);
    const double weight = 0.5 * pi * ws[j] * std::sin(beta);
    const Matrix7 rx = rotation_x(beta).m;
    double *out = values.data() + j * per_beta;
    for (int k = 0; k < q.n_gamma; ++k)
    {
      const Vector7 c = rx * after_gamma[k];
      for (int i = 0; i < q.n_alpha; ++i)
        *out++ = weight * trial_deviation(Octupole(rz_alpha[i].m * c));
    }
  });

  return pairwise_sum(values) * da * dg / (8.0 * pi * pi);
}

} // namespace octaframe
