#pragma once

// The 24 rotational symmetries of the cube and loop-based classification of
// frame-field singularities.

#include "errors.hpp"
#include "field.hpp"
#include "projection.hpp"
#include "sh3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace octaframe
{

/// Geodesic angle between two rotations, in radians.
inline double rotation_distance(const Matrix3 &a, const Matrix3 &b)
{
  const double c = 0.5 * ((a.transpose() * b).trace() - 1.0);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

class OctahedralGroup
{
public:
  struct Element
  {
    Matrix3 rotation;
    HarmonicRotation harmonic;
    /// +1 if the element fixes the reference octupole (the even subgroup), -1 if it negates it.
    int sign = 1;
  };

  /// Signed permutation matrices with determinant +1, in lexicographic
  /// (permutation, sign pattern) order; element 0 is the identity.
  static const OctahedralGroup &get()
  {
    static const OctahedralGroup g;
    return g;
  }

  static constexpr std::size_t size() { return 24; }
  static constexpr std::size_t identity() { return 0; }

  const Element &operator[](std::size_t i) const { return elements_[i]; }

  std::size_t multiply(std::size_t a, std::size_t b) const { return table_[a][b]; }

  std::size_t inverse(std::size_t a) const
  {
    for (std::size_t b = 0; b < size(); ++b)
      if (table_[a][b] == identity())
        return b;
    return identity();
  }

  /// Smallest k >= 1 with a^k = identity.
  int order(std::size_t a) const
  {
    int k = 1;
    for (std::size_t p = a; p != identity(); p = table_[p][a])
      ++k;
    return k;
  }

  /// Element closest to q and its geodesic distance.
  std::pair<std::size_t, double> nearest(const Matrix3 &q) const
  {
    std::size_t best = 0;
    double best_d = rotation_distance(elements_[0].rotation, q);
    for (std::size_t i = 1; i < size(); ++i)
    {
      const double d = rotation_distance(elements_[i].rotation, q);
      if (d < best_d)
      {
        best = i;
        best_d = d;
      }
    }
    return {best, best_d};
  }

private:
  OctahedralGroup()
  {
    std::array<int, 3> perm{0, 1, 2};
    std::size_t n = 0;
    do
    {
      for (int signs = 0; signs < 8; ++signs)
      {
        Matrix3 m = Matrix3::Zero();
        for (int r = 0; r < 3; ++r)
          m(r, perm[r]) = (signs >> (2 - r)) & 1 ? -1.0 : 1.0;
        if (m.determinant() < 0.0)
          continue;
        Element &e = elements_[n++];
        e.rotation = m;
        e.harmonic = harmonic_rotation(m);
        const Vector7 image = e.harmonic.m * Octupole::reference().coeffs;
        e.sign = image[slot(-2)] > 0.0 ? 1 : -1;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = 0; b < size(); ++b)
        table_[a][b] = nearest(elements_[a].rotation * elements_[b].rotation).first;
  }

  std::array<Element, 24> elements_;
  std::array<std::array<std::size_t, 24>, 24> table_{};
};

struct LoopIndexConfig
{
  /// Node values farther than this from the manifold are rejected.
  double max_manifold_distance = 0.3;
  /// Relative rotations must snap to a group element within this angle.
  double snap_tolerance = 25.0 * std::numbers::pi / 180.0;
  DistanceConfig distance;
};

/// Monodromy of the frame field around a closed loop of nodes.
///
/// `loop` lists nodes n0, n1, ..., n(k-1), k >= 3; consecutive nodes and the
/// pair (n(k-1), n0) must be adjacent.  Nodes may repeat, so two loops through
/// a shared base node can be concatenated.  Each node's frame is recovered from
/// its nearest manifold point, every step's relative rotation is snapped to
/// the octahedral group, and the ordered product of the snapped steps is
/// returned (expressed in the frame of n0).  The identity means the loop does
/// not enclose a singularity.
inline std::size_t loop_index(const FrameField &f, std::span<const std::size_t> loop, const OctahedralGroup &g,
                              const LoopIndexConfig &cfg = {})
{
  if (loop.size() < 3)
    throw ArgumentError("a loop needs at least 3 nodes");
  for (std::size_t i = 0; i < loop.size(); ++i)
  {
    const std::size_t a = loop[i], b = loop[(i + 1) % loop.size()];
    if (a >= f.nodes.size() || b >= f.nodes.size())
      throw ArgumentError("loop node out of range");
    if (!f.adjacent(a, b))
      throw ArgumentError("loop is not closed through adjacent nodes: " + std::to_string(a) + " -> " +
                          std::to_string(b));
  }

  std::vector<Matrix3> frames;
  frames.reserve(loop.size());
  for (std::size_t n : loop)
  {
    const auto d = distance_to_manifold(f.nodes[n].value, cfg.distance.grid_n, cfg.distance.refine_iters);
    if (d.distance > cfg.max_manifold_distance)
      throw ClassificationError("node " + std::to_string(n) + " is too far from the semisymmetric manifold");
    frames.push_back(frame_rotation(d.angles));
  }

  std::size_t product = OctahedralGroup::identity();
  for (std::size_t i = 0; i < frames.size(); ++i)
  {
    const Matrix3 step = frames[i].transpose() * frames[(i + 1) % frames.size()];
    const auto [elem, dist] = g.nearest(step);
    if (dist > cfg.snap_tolerance)
      throw ClassificationError("field too rough between nodes " + std::to_string(loop[i]) + " and " +
                                std::to_string(loop[(i + 1) % loop.size()]));
    product = g.multiply(product, elem);
  }
  return product;
}

} // namespace octaframe
