#pragma once

// Sign-agnostic octupole frame fields on node graphs.
//
//   E = sum_{edges a~b} |a-b|^2 |a+b|^2  +  sum_nodes p(a; w1, w2)
//
// Pinned nodes act as hard boundary values and are never modified.

#include "descent.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "semisymmetry.hpp"
#include "sh3.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace octaframe
{

struct GridDims
{
  int nx = 1, ny = 1, nz = 1;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t index(int i, int j, int k) const
  {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
  }
  bool on_boundary(int i, int j, int k) const
  {
    return i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1;
  }
  friend bool operator==(const GridDims &, const GridDims &) = default;
};

struct FieldNode
{
  Octupole value;
  bool pinned = false;
};

using Edge = std::array<std::size_t, 2>;

struct FrameField
{
  std::vector<FieldNode> nodes;
  std::vector<Edge> edges;
  std::optional<GridDims> grid;

  /// Regular grid with 6-neighbour edges, every node set to fill.
  static FrameField make_grid(const GridDims &dims, const Octupole &fill = Octupole::reference())
  {
    if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
      throw ArgumentError("grid dimensions must be positive");
    FrameField f;
    f.grid = dims;
    f.nodes.assign(dims.size(), FieldNode{fill, false});
    for (int k = 0; k < dims.nz; ++k)
      for (int j = 0; j < dims.ny; ++j)
        for (int i = 0; i < dims.nx; ++i)
        {
          const std::size_t n = dims.index(i, j, k);
          if (i + 1 < dims.nx)
            f.edges.push_back({n, dims.index(i + 1, j, k)});
          if (j + 1 < dims.ny)
            f.edges.push_back({n, dims.index(i, j + 1, k)});
          if (k + 1 < dims.nz)
            f.edges.push_back({n, dims.index(i, j, k + 1)});
        }
    return f;
  }

  void validate() const
  {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto &e : edges)
    {
      if (e[0] >= nodes.size() || e[1] >= nodes.size())
        throw ArgumentError("edge index out of range");
      if (e[0] == e[1])
        throw ArgumentError("self-loop edge at node " + std::to_string(e[0]));
      if (!seen.insert(std::minmax(e[0], e[1])).second)
        throw ArgumentError("duplicate edge " + std::to_string(e[0]) + "-" + std::to_string(e[1]));
    }
    for (const auto &n : nodes)
      if (!n.value.finite())
        throw ArgumentError("node values must be finite");
    if (grid && grid->size() != nodes.size())
      throw ArgumentError("grid dimensions do not match node count");
  }

  bool adjacent(std::size_t a, std::size_t b) const
  {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const Edge &e) { return (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a); });
  }
};

/// |a-b|^2 |a+b|^2; zero whenever a = +-b.
inline double smoothness_term(const Octupole &a, const Octupole &b)
{
  return (a.coeffs - b.coeffs).squaredNorm() * (a.coeffs + b.coeffs).squaredNorm();
}

inline double total_energy(const FrameField &f, const PenaltyWeights &w)
{
  std::vector<double> terms;
  terms.reserve(f.edges.size() + f.nodes.size());
  for (const auto &e : f.edges)
    terms.push_back(smoothness_term(f.nodes[e[0]].value, f.nodes[e[1]].value));
  for (const auto &n : f.nodes)
    terms.push_back(penalty(n.value, w));
  return pairwise_sum(terms);
}

/// Per-node gradient of total_energy; rows of pinned nodes are zero.
inline std::vector<Vector7> energy_gradient(const FrameField &f, const PenaltyWeights &w)
{
  std::vector<Vector7> g(f.nodes.size(), Vector7::Zero());
  for (const auto &e : f.edges)
  {
    const Vector7 &a = f.nodes[e[0]].value.coeffs, &b = f.nodes[e[1]].value.coeffs;
    const Vector7 diff = a - b, sum = a + b;
    const double d2 = diff.squaredNorm(), s2 = sum.squaredNorm();
    g[e[0]] += 2.0 * s2 * diff + 2.0 * d2 * sum;
    g[e[1]] += -2.0 * s2 * diff + 2.0 * d2 * sum;
  }
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
  {
    if (f.nodes[i].pinned)
      g[i].setZero();
    else
      g[i] += penalty_gradient(f.nodes[i].value, w);
  }
  return g;
}

/// Box-averaged half-resolution grid.
///
/// Each coarse value is the renormalized mean of its (up to 8) children, or
/// the reference octupole when the mean vanishes.  A coarse node is pinned iff
/// some child is, and then takes the value of its first pinned child.
inline FrameField coarsen(const FrameField &f)
{
  if (!f.grid)
    throw ArgumentError("coarsen requires grid metadata");
  const GridDims fd = *f.grid;
  if (fd.nx < 2 || fd.ny < 2 || fd.nz < 2)
    throw ArgumentError("coarsen requires at least 2 nodes per axis");

  const GridDims cd{(fd.nx + 1) / 2, (fd.ny + 1) / 2, (fd.nz + 1) / 2};
  FrameField c = FrameField::make_grid(cd);
  for (int K = 0; K < cd.nz; ++K)
    for (int J = 0; J < cd.ny; ++J)
      for (int I = 0; I < cd.nx; ++I)
      {
        Vector7 mean = Vector7::Zero();
        const FieldNode *pinned_child = nullptr;
        for (int dk = 0; dk < 2; ++dk)
          for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di)
            {
              const int i = 2 * I + di, j = 2 * J + dj, k = 2 * K + dk;
              if (i >= fd.nx || j >= fd.ny || k >= fd.nz)
                continue;
              const FieldNode &child = f.nodes[fd.index(i, j, k)];
              mean += child.value.coeffs;
              if (child.pinned && !pinned_child)
                pinned_child = &child;
            }
        FieldNode &node = c.nodes[cd.index(I, J, K)];
        if (pinned_child)
        {
          node = *pinned_child;
        }
        else
        {
          const double n = mean.norm();
          node.value = n > 1e-12 ? Octupole(mean / n) : Octupole::reference();
          node.pinned = false;
        }
      }
  return c;
}

/// Copies each coarse value onto the free nodes of fine_template it covers.
inline FrameField prolong(const FrameField &coarse, const FrameField &fine_template)
{
  if (!coarse.grid || !fine_template.grid)
    throw ArgumentError("prolong requires grid metadata");
  const GridDims fd = *fine_template.grid, cd = *coarse.grid;
  if (cd != GridDims{(fd.nx + 1) / 2, (fd.ny + 1) / 2, (fd.nz + 1) / 2})
    throw ArgumentError("coarse grid does not match the fine template");

  FrameField fine = fine_template;
  for (int k = 0; k < fd.nz; ++k)
    for (int j = 0; j < fd.ny; ++j)
      for (int i = 0; i < fd.nx; ++i)
      {
        FieldNode &node = fine.nodes[fd.index(i, j, k)];
        if (!node.pinned)
          node.value = coarse.nodes[cd.index(i / 2, j / 2, k / 2)].value;
      }
  return fine;
}

struct FieldOptConfig
{
  PenaltyWeights weights;
  DescentConfig descent{.max_iters = 5000, .tol = 1e-6, .grad_tol = 1e-10};
  int levels = 1;

  void validate() const
  {
    weights.validate();
    descent.validate();
    if (levels < 1)
      throw ArgumentError("levels must be at least 1");
  }
};

struct FieldOptResult
{
  FrameField field;
  /// Energy after every accepted step, one list per level, coarsest first.
  std::vector<std::vector<double>> energy_history;
  /// Outcome of the finest-level descent.
  DescentStatus status = DescentStatus::MaxIterations;
};

/// Descends E on the free nodes of one level, in place.
inline DescentStatus descend_level(FrameField &f, const FieldOptConfig &cfg, std::vector<double> &history)
{
  const std::size_t n = f.nodes.size();
  Eigen::VectorXd x(7 * n);
  for (std::size_t i = 0; i < n; ++i)
    x.segment<7>(7 * i) = f.nodes[i].value.coeffs;

  // Scratch field: the caller's field only ever holds accepted iterates.
  FrameField scratch = f;
  auto load = [&](const Eigen::VectorXd &v) {
    for (std::size_t i = 0; i < n; ++i)
      scratch.nodes[i].value.coeffs = v.segment<7>(7 * i);
  };
  auto objective = [&](const Eigen::VectorXd &v, Eigen::VectorXd *grad) {
    load(v);
    if (grad)
    {
      const auto g = energy_gradient(scratch, cfg.weights);
      for (std::size_t i = 0; i < n; ++i)
        grad->segment<7>(7 * i) = g[i];
    }
    return total_energy(scratch, cfg.weights);
  };
  auto observe = [&](int, const Eigen::VectorXd &, double e) { history.push_back(e); };

  const DescentStatus status = gradient_descent(objective, x, cfg.descent, observe);
  for (std::size_t i = 0; i < n; ++i)
    f.nodes[i].value.coeffs = x.segment<7>(7 * i);
  return status;
}

/// Minimizes E over the free nodes.  Grids are solved coarse-to-fine over a
/// factor-2 hierarchy (at most cfg.levels deep, stopping early once an axis
/// drops below 2 nodes); general graphs use a single level.
inline FieldOptResult optimize_field(const FrameField &f, const FieldOptConfig &cfg)
{
  if (f.nodes.empty())
    throw ArgumentError("cannot optimize an empty field");
  f.validate();
  cfg.validate();

  std::vector<FrameField> hierarchy{f};
  if (f.grid)
  {
    while (static_cast<int>(hierarchy.size()) < cfg.levels)
    {
      const GridDims d = *hierarchy.back().grid;
      if (d.nx < 2 || d.ny < 2 || d.nz < 2)
        break;
      hierarchy.push_back(coarsen(hierarchy.back()));
    }
  }

  FieldOptResult out;
  FrameField current = hierarchy.back();
  for (std::size_t level = hierarchy.size(); level-- > 0;)
  {
    if (level + 1 < hierarchy.size())
      current = prolong(current, hierarchy[level]);
    out.energy_history.emplace_back();
    out.status = descend_level(current, cfg, out.energy_history.back());
  }
  out.field = std::move(current);
  return out;
}

} // namespace octaframe
