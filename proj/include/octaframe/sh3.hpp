#pragma once

// Degree-3 real spherical harmonics ("octupoles") and the exact 7x7 action of
// SO(3) on their coefficients.
//
// Coefficients are always ordered m = -3, -2, -1, 0, 1, 2, 3.  The basis is the
// real orthonormal one without the Condon-Shortley phase:
//
//   Y(-3) ~ y(3x^2 - y^2)    Y(-2) ~ xyz             Y(-1) ~ y(4z^2 - x^2 - y^2)
//   Y( 0) ~ z(2z^2 - 3x^2 - 3y^2)
//   Y( 1) ~ x(4z^2 - x^2 - y^2)   Y( 2) ~ z(x^2 - y^2)   Y( 3) ~ x(x^2 - 3y^2)
//
// A coefficient matrix R represents the 3x3 rotation Q when
//   sum_m (R a)_m Y_m(v) == sum_m a_m Y_m(Q^T v)   for every v,
// i.e. R rotates the spherical function by Q.  With this convention
//   rotation_z(g)        represents Rz(+g),
//   rotation_x_quarter() represents Rx(+pi/2),
//   rotation_x(a)        represents Rx(+a),
//   rotation_y(b)        represents Ry(-b)   (inherited from its conjugation formula).
// frame_rotation() and harmonic_rotation() translate between the two worlds.

#include "errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace octaframe
{

using Vector7 = Eigen::Matrix<double, 7, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7, Eigen::RowMajor>;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline constexpr int kMinOrder = -3;
inline constexpr int kMaxOrder = 3;

/// Slot of order m in a coefficient vector.
constexpr int slot(int m) { return m + 3; }

struct Octupole
{
  Vector7 coeffs = Vector7::Zero();

  Octupole() = default;
  explicit Octupole(const Vector7 &c) : coeffs(c) {}

  static Octupole zero() { return Octupole(); }

  /// Basis vector e_m.
  static Octupole unit(int m)
  {
    if (m < kMinOrder || m > kMaxOrder)
      throw ArgumentError("octupole order out of range: " + std::to_string(m));
    Octupole a;
    a.coeffs[slot(m)] = 1.0;
    return a;
  }

  /// The reference semisymmetric octupole Y(3,-2), i.e. (0,1,0,0,0,0,0).
  static Octupole reference() { return unit(-2); }

  double operator()(int m) const { return coeffs[slot(m)]; }
  double &operator()(int m) { return coeffs[slot(m)]; }

  double norm() const { return coeffs.norm(); }
  bool finite() const { return coeffs.allFinite(); }

  Octupole operator-() const { return Octupole(-coeffs); }
  friend Octupole operator*(double s, const Octupole &a) { return Octupole(s * a.coeffs); }
  friend bool operator==(const Octupole &a, const Octupole &b) { return a.coeffs == b.coeffs; }
};

/// Euler angles in radians.  How they compose is fixed by the function that
/// consumes them (XYZ in semisymmetric_from_angles, ZXZ in compose_zxz).
struct EulerAngles
{
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Orthogonal 7x7 matrix acting on octupole coefficients.
struct HarmonicRotation
{
  Matrix7 m = Matrix7::Identity();

  HarmonicRotation() = default;
  explicit HarmonicRotation(const Matrix7 &mat) : m(mat) {}

  static HarmonicRotation identity() { return HarmonicRotation(); }

  HarmonicRotation transpose() const { return HarmonicRotation(m.transpose()); }

  friend HarmonicRotation operator*(const HarmonicRotation &a, const HarmonicRotation &b)
  {
    return HarmonicRotation(a.m * b.m);
  }

  /// max |m^T m - I|
  double orthogonality_error() const
  {
    return (m.transpose() * m - Matrix7::Identity()).cwiseAbs().maxCoeff();
  }
};

/// Unit 3-vector.
class Direction
{
public:
  /// Normalizes v; throws on a zero or non-finite vector.
  explicit Direction(const Vector3 &v)
  {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw ArgumentError("direction must be a finite non-zero vector");
    v_ = v / n;
  }
  Direction(double x, double y, double z) : Direction(Vector3(x, y, z)) {}

  const Vector3 &vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  Direction operator-() const { return Direction(-v_); }

private:
  Vector3 v_;
};

namespace detail
{

inline Vector7 basis_values(const Vector3 &v)
{
  using std::numbers::pi;
  static const double c3 = 0.25 * std::sqrt(35.0 / (2.0 * pi));
  static const double c2 = 0.5 * std::sqrt(105.0 / pi);
  static const double c1 = 0.25 * std::sqrt(21.0 / (2.0 * pi));
  static const double c0 = 0.25 * std::sqrt(7.0 / pi);
  static const double c2p = 0.25 * std::sqrt(105.0 / pi);

  const double x = v.x(), y = v.y(), z = v.z();
  const double xx = x * x, yy = y * y, zz = z * z;
  Vector7 out;
  out << c3 * y * (3.0 * xx - yy),
         c2 * x * y * z,
         c1 * y * (4.0 * zz - xx - yy),
         c0 * z * (2.0 * zz - 3.0 * xx - 3.0 * yy),
         c1 * x * (4.0 * zz - xx - yy),
         c2p * z * (xx - yy),
         c3 * x * (xx - 3.0 * yy);
  return out;
}

} // namespace detail

/// All seven basis functions at v.
inline Vector7 eval_basis_all(const Direction &v) { return detail::basis_values(v.vec()); }

/// Y(3,m)(v).
inline double eval_basis(int m, const Direction &v)
{
  if (m < kMinOrder || m > kMaxOrder)
    throw ArgumentError("basis order out of range: " + std::to_string(m));
  return detail::basis_values(v.vec())[slot(m)];
}

/// sum_m a_m Y(3,m)(v)
inline double evaluate(const Octupole &a, const Direction &v)
{
  return a.coeffs.dot(detail::basis_values(v.vec()));
}

inline HarmonicRotation rotation_z(double gamma)
{
  Matrix7 r = Matrix7::Zero();
  r(3, 3) = 1.0;
  for (int k = 1; k <= 3; ++k)
  {
    const double c = std::cos(k * gamma), s = std::sin(k * gamma);
    const int lo = 3 - k, hi = 3 + k;
    r(lo, lo) = c;
    r(lo, hi) = s;
    r(hi, lo) = -s;
    r(hi, hi) = c;
  }
  return HarmonicRotation(r);
}

/// d/dgamma of rotation_z(gamma), entrywise.
inline Matrix7 rotation_z_derivative(double gamma)
{
  Matrix7 r = Matrix7::Zero();
  for (int k = 1; k <= 3; ++k)
  {
    const double c = k * std::cos(k * gamma), s = k * std::sin(k * gamma);
    const int lo = 3 - k, hi = 3 + k;
    r(lo, lo) = -s;
    r(lo, hi) = c;
    r(hi, lo) = -c;
    r(hi, hi) = -s;
  }
  return r;
}

/// Quarter turn about x: the constant integer/surd matrix scaled by 1/4.
inline const HarmonicRotation &rotation_x_quarter()
{
  static const HarmonicRotation q = [] {
    const double s6 = std::sqrt(6.0), s10 = std::sqrt(10.0), s15 = std::sqrt(15.0);
    Matrix7 r;
    r <<   0.0,  0.0,   0.0,  s10,  0.0,  -s6,  0.0,
           0.0, -4.0,   0.0,  0.0,  0.0,  0.0,  0.0,
           0.0,  0.0,   0.0,   s6,  0.0,  s10,  0.0,
          -s10,  0.0,   -s6,  0.0,  0.0,  0.0,  0.0,
           0.0,  0.0,   0.0,  0.0, -1.0,  0.0, -s15,
            s6,  0.0,  -s10,  0.0,  0.0,  0.0,  0.0,
           0.0,  0.0,   0.0,  0.0, -s15,  0.0,  1.0;
    return HarmonicRotation(0.25 * r);
  }();
  return q;
}

/// R_x(pi/2) R_z(beta) R_x(pi/2)^T
inline HarmonicRotation rotation_y(double beta)
{
  const Matrix7 &q = rotation_x_quarter().m;
  return HarmonicRotation(q * rotation_z(beta).m * q.transpose());
}

inline Matrix7 rotation_y_derivative(double beta)
{
  const Matrix7 &q = rotation_x_quarter().m;
  return q * rotation_z_derivative(beta) * q.transpose();
}

namespace detail
{
inline const Matrix7 &quarter_y()
{
  static const Matrix7 y = rotation_y(std::numbers::pi / 2.0).m;
  return y;
}
} // namespace detail

/// R_y(pi/2)^T R_z(alpha) R_y(pi/2)
inline HarmonicRotation rotation_x(double alpha)
{
  const Matrix7 &y = detail::quarter_y();
  return HarmonicRotation(y.transpose() * rotation_z(alpha).m * y);
}

inline Matrix7 rotation_x_derivative(double alpha)
{
  const Matrix7 &y = detail::quarter_y();
  return y.transpose() * rotation_z_derivative(alpha) * y;
}

inline Octupole rotate(const Octupole &a, const HarmonicRotation &r) { return Octupole(r.m * a.coeffs); }

/// a = R_x(alpha) R_y(beta) R_z(gamma) * reference
inline Octupole semisymmetric_from_angles(const EulerAngles &e)
{
  const Vector7 ref = Octupole::reference().coeffs;
  return Octupole(rotation_x(e.alpha).m * (rotation_y(e.beta).m * (rotation_z(e.gamma).m * ref)));
}

/// R_z(alpha) R_x(beta) R_z(gamma), the parametrization of the SO(3) average.
inline HarmonicRotation compose_zxz(double alpha, double beta, double gamma)
{
  return HarmonicRotation(rotation_z(alpha).m * rotation_x(beta).m * rotation_z(gamma).m);
}

// ---------------------------------------------------------------------------
// 3x3 side

enum class Axis { X, Y, Z };

/// Right-handed rotation by angle about a coordinate axis.
inline Matrix3 axis_rotation(Axis axis, double angle)
{
  const Vector3 u = axis == Axis::X ? Vector3::UnitX() : axis == Axis::Y ? Vector3::UnitY() : Vector3::UnitZ();
  return Eigen::AngleAxisd(angle, u).toRotationMatrix();
}

/// 3x3 rotation Q with harmonic image R_x(alpha) R_y(beta) R_z(gamma).
inline Matrix3 frame_rotation(const EulerAngles &e)
{
  return axis_rotation(Axis::X, e.alpha) * axis_rotation(Axis::Y, -e.beta) * axis_rotation(Axis::Z, e.gamma);
}

/// The 7x7 coefficient matrix representing the 3x3 rotation q.
///
/// Decomposes q as Rz(phi) Ry(theta) Rz(psi) and assembles the image from
/// rotation_z / rotation_y.  When q is close to a pure z rotation the
/// decomposition is ill-conditioned, so q is first split as (q Rx(-pi/2)) Rx(pi/2)
/// and the quarter turn is applied through rotation_x_quarter().
inline HarmonicRotation harmonic_rotation(const Matrix3 &q)
{
  const bool split = std::abs(q(2, 2)) > std::abs(q(2, 1));
  const Matrix3 w = split ? Matrix3(q * axis_rotation(Axis::X, -std::numbers::pi / 2.0)) : q;

  const double theta = std::atan2(std::hypot(w(0, 2), w(1, 2)), w(2, 2));
  const double phi = std::atan2(w(1, 2), w(0, 2));
  const double psi = std::atan2(w(2, 1), -w(2, 0));

  HarmonicRotation r(rotation_z(phi).m * rotation_y(-theta).m * rotation_z(psi).m);
  if (split)
    r = r * rotation_x_quarter();
  return r;
}

} // namespace octaframe
