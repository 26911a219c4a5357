#include "oracles.hpp"

#include <octaframe/field.hpp>
#include <octaframe/projection.hpp>
#include <octaframe/random.hpp>

#include <gtest/gtest.h>

using namespace octaframe;

namespace
{

const Octupole kRef = Octupole::reference();
const PenaltyWeights kW{5.0, 2.5};

FrameField path_graph(std::vector<Octupole> values)
{
  FrameField f;
  for (const auto &v : values)
    f.nodes.push_back({v, false});
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    f.edges.push_back({i, i + 1});
  return f;
}

Eigen::VectorXd flatten(const FrameField &f)
{
  Eigen::VectorXd x(7 * f.nodes.size());
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    x.segment<7>(7 * i) = f.nodes[i].value.coeffs;
  return x;
}

FrameField with_values(FrameField f, const Eigen::VectorXd &x)
{
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    f.nodes[i].value.coeffs = x.segment<7>(7 * i);
  return f;
}

bool monotone(const std::vector<double> &h)
{
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1])
      return false;
  return true;
}

} // namespace

TEST(SmoothnessTerm, Examples)
{
  Rng rng(50);
  const Octupole a = random_unit_octupole(rng);
  EXPECT_EQ(smoothness_term(a, a), 0.0);
  EXPECT_EQ(smoothness_term(a, -a), 0.0);
  EXPECT_NEAR(smoothness_term(kRef, Octupole::unit(-3)), 4.0, 1e-12);
}

TEST(SmoothnessTerm, SymmetricAndSignBlind)
{
  Rng rng(51);
  for (int i = 0; i < 100; ++i)
  {
    const Octupole a = random_unit_octupole(rng), b = 1.3 * random_unit_octupole(rng);
    const double s = smoothness_term(a, b);
    EXPECT_EQ(smoothness_term(b, a), s);
    EXPECT_EQ(smoothness_term(-a, b), s);
    EXPECT_EQ(smoothness_term(a, -b), s);
  }
}

TEST(TotalEnergy, Examples)
{
  FrameField grid = FrameField::make_grid({3, 3, 3});
  EXPECT_EQ(total_energy(grid, kW), 0.0);

  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        grid.nodes[grid.grid->index(i, j, k)].value = (i + j + k) % 2 ? -kRef : kRef;
  EXPECT_EQ(total_energy(grid, kW), 0.0);

  const FrameField two = path_graph({kRef, Octupole::unit(-3)});
  EXPECT_NEAR(total_energy(two, kW), 66.5, 1e-12);
}

TEST(TotalEnergy, ExactSignGaugeInvariance)
{
  Rng rng(52);
  FrameField f = FrameField::make_grid({3, 2, 2});
  for (auto &n : f.nodes)
    n.value = rng.uniform(0.5, 1.5) * random_unit_octupole(rng);
  const double e = total_energy(f, kW);
  const auto g = energy_gradient(f, kW);
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
  {
    FrameField flipped = f;
    flipped.nodes[i].value = -flipped.nodes[i].value;
    EXPECT_EQ(total_energy(flipped, kW), e);
    const auto gf = energy_gradient(flipped, kW);
    EXPECT_LT((gf[i] + g[i]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TotalEnergy, RotationInvariant)
{
  Rng rng(53);
  FrameField f = path_graph({random_unit_octupole(rng), random_unit_octupole(rng), random_unit_octupole(rng)});
  f.edges.push_back({0, 2});
  const double e = total_energy(f, kW);
  for (int t = 0; t < 20; ++t)
  {
    const HarmonicRotation r = harmonic_rotation(random_rotation(rng));
    FrameField g = f;
    for (auto &n : g.nodes)
      n.value = rotate(n.value, r);
    EXPECT_NEAR(total_energy(g, kW), e, 1e-9);
  }
}

TEST(EnergyGradient, Examples)
{
  const FrameField grid = FrameField::make_grid({2, 2, 2});
  for (const auto &g : energy_gradient(grid, kW))
    EXPECT_EQ(g, Vector7::Zero());

  const FrameField pair = path_graph({kRef, -kRef});
  for (const auto &g : energy_gradient(pair, kW))
    EXPECT_EQ(g, Vector7::Zero());
}

TEST(EnergyGradient, StationaryOnConstantSemisymmetricFields)
{
  Rng rng(54);
  for (int t = 0; t < 10; ++t)
  {
    const FrameField f = FrameField::make_grid({3, 3, 2}, semisymmetric_from_angles(random_angles(rng)));
    double worst = 0.0;
    for (const auto &g : energy_gradient(f, kW))
      worst = std::max(worst, g.cwiseAbs().maxCoeff());
    EXPECT_LE(worst, 1e-10);
  }
}

TEST(EnergyGradient, MatchesFiniteDifferences)
{
  Rng rng(55);
  for (int t = 0; t < 50; ++t)
  {
    FrameField f = path_graph({random_unit_octupole(rng), random_unit_octupole(rng), random_unit_octupole(rng),
                               random_unit_octupole(rng)});
    if (t % 2)
      f.nodes[1].pinned = true;
    const auto fd = oracle::fd_gradient(
        [&f](const Eigen::VectorXd &x) { return total_energy(with_values(f, x), kW); }, flatten(f));
    const auto g = energy_gradient(f, kW);
    Eigen::VectorXd analytic(fd.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      analytic.segment<7>(7 * i) = g[i];
    Eigen::VectorXd expected = fd;
    if (t % 2)
    {
      EXPECT_EQ(g[1], Vector7::Zero());
      expected.segment<7>(7) = Vector7::Zero();
    }
    EXPECT_LE(oracle::relative_error(expected, analytic), 1e-6);
  }
}

TEST(FrameField, Validation)
{
  FrameField f = path_graph({kRef, kRef});
  EXPECT_NO_THROW(f.validate());
  f.edges.push_back({1, 0});
  EXPECT_THROW(f.validate(), ArgumentError);
  f.edges = {{0, 0}};
  EXPECT_THROW(f.validate(), ArgumentError);
  f.edges = {{0, 2}};
  EXPECT_THROW(f.validate(), ArgumentError);
}

TEST(Coarsen, ConstantFieldStaysConstant)
{
  const Octupole c = semisymmetric_from_angles({0.3, 1.1, -0.4});
  const FrameField fine = FrameField::make_grid({4, 4, 4}, c);
  const FrameField coarse = coarsen(fine);
  ASSERT_EQ(*coarse.grid, (GridDims{2, 2, 2}));
  for (const auto &n : coarse.nodes)
    EXPECT_LT((n.value.coeffs - c.coeffs).norm(), 1e-15);

  const FrameField back = prolong(coarse, fine);
  for (std::size_t i = 0; i < fine.nodes.size(); ++i)
    EXPECT_LT((back.nodes[i].value.coeffs - c.coeffs).norm(), 1e-15);
}

TEST(Coarsen, OddDimensionsAndPins)
{
  FrameField fine = FrameField::make_grid({5, 3, 2});
  fine.nodes[fine.grid->index(4, 2, 1)] = {Octupole::unit(0), true};
  fine.nodes[fine.grid->index(1, 0, 0)] = {Octupole::unit(3), true};
  fine.nodes[fine.grid->index(0, 1, 0)] = {Octupole::unit(1), true};
  const FrameField coarse = coarsen(fine);
  ASSERT_EQ(*coarse.grid, (GridDims{3, 2, 1}));
  const auto &corner = coarse.nodes[coarse.grid->index(2, 1, 0)];
  EXPECT_TRUE(corner.pinned);
  EXPECT_EQ(corner.value, Octupole::unit(0));
  // First pinned child by fine linear index wins.
  const auto &origin = coarse.nodes[coarse.grid->index(0, 0, 0)];
  EXPECT_TRUE(origin.pinned);
  EXPECT_EQ(origin.value, Octupole::unit(3));
  EXPECT_FALSE(coarse.nodes[coarse.grid->index(1, 0, 0)].pinned);

  // Prolongation leaves pinned fine nodes alone.
  FrameField c2 = coarse;
  for (auto &n : c2.nodes)
    n.value = Octupole::unit(-1);
  const FrameField back = prolong(c2, fine);
  EXPECT_EQ(back.nodes[fine.grid->index(1, 0, 0)].value, Octupole::unit(3));
  EXPECT_EQ(back.nodes[fine.grid->index(2, 2, 1)].value, Octupole::unit(-1));
}

TEST(Coarsen, CancellingChildrenFallBackToReference)
{
  FrameField fine = FrameField::make_grid({2, 2, 2});
  for (std::size_t i = 0; i < fine.nodes.size(); ++i)
    fine.nodes[i].value = i % 2 ? -kRef : kRef;
  const FrameField coarse = coarsen(fine);
  ASSERT_EQ(coarse.nodes.size(), 1u);
  EXPECT_EQ(coarse.nodes[0].value, kRef);
}

TEST(Coarsen, RequiresGrid)
{
  const FrameField f = path_graph({kRef, kRef});
  EXPECT_THROW(coarsen(f), ArgumentError);
  EXPECT_THROW(prolong(f, f), ArgumentError);
  EXPECT_THROW(coarsen(FrameField::make_grid({1, 4, 4})), ArgumentError);
}

TEST(OptimizeField, EmptyFieldRejected)
{
  EXPECT_THROW(optimize_field(FrameField{}, FieldOptConfig{}), ArgumentError);
}

TEST(OptimizeField, SingleNodeReducesToSemisymmetrize)
{
  Rng rng(56);
  const Octupole a = random_unit_octupole(rng);
  FieldOptConfig cfg;
  cfg.weights = kW;
  cfg.descent = DescentConfig{};
  cfg.levels = 3; // ignored without a grid
  const FieldOptResult r = optimize_field(path_graph({a}), cfg);
  const Trajectory t = semisymmetrize(a, kW, cfg.descent);
  ASSERT_EQ(r.energy_history.size(), 1u);
  ASSERT_EQ(r.energy_history[0].size(), t.points.size());
  for (std::size_t i = 0; i < t.points.size(); ++i)
    EXPECT_EQ(r.energy_history[0][i], t.points[i].penalty);
  EXPECT_EQ(r.field.nodes[0].value, t.points.back().value);
}

TEST(OptimizeField, PinnedPairConverges)
{
  Rng rng(57);
  FrameField f = path_graph({kRef, random_unit_octupole(rng)});
  f.nodes[0].pinned = true;
  FieldOptConfig cfg;
  const FieldOptResult r = optimize_field(f, cfg);
  EXPECT_EQ(r.status, DescentStatus::Converged);
  EXPECT_EQ(r.field.nodes[0].value, kRef);
  const Vector7 a1 = r.field.nodes[1].value.coeffs;
  EXPECT_LE(std::min((a1 - kRef.coeffs).norm(), (a1 + kRef.coeffs).norm()), 1e-3);
  EXPECT_LE(smoothness_term(r.field.nodes[0].value, r.field.nodes[1].value), 1e-8);
  EXPECT_TRUE(monotone(r.energy_history[0]));
}

TEST(OptimizeField, ConstantBoundaryGrid)
{
  Rng rng(58);
  const Octupole boundary = semisymmetric_from_angles({0.4, -0.9, 1.7});
  FrameField f = FrameField::make_grid({8, 8, 8});
  const GridDims d = *f.grid;
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i)
      {
        auto &n = f.nodes[d.index(i, j, k)];
        if (d.on_boundary(i, j, k))
          n = {boundary, true};
        else
          n.value = random_unit_octupole(rng);
      }
  FieldOptConfig cfg;
  cfg.levels = 3;
  const FieldOptResult r = optimize_field(f, cfg);
  EXPECT_EQ(r.energy_history.size(), 3u);
  for (const auto &h : r.energy_history)
    EXPECT_TRUE(monotone(h));
  EXPECT_LE(total_energy(r.field, cfg.weights), 1e-6);
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
  {
    const Vector7 v = r.field.nodes[i].value.coeffs;
    EXPECT_LE(std::min((v - boundary.coeffs).norm(), (v + boundary.coeffs).norm()), 1e-3);
    if (f.nodes[i].pinned)
    {
      EXPECT_EQ(r.field.nodes[i].value, boundary);
    }
  }
}

TEST(OptimizeField, SingleLevelFromRandomStartIsMonotone)
{
  Rng rng(59);
  FrameField f = FrameField::make_grid({4, 4, 3});
  for (auto &n : f.nodes)
    n.value = random_unit_octupole(rng);
  f.nodes[0].pinned = true;
  FieldOptConfig cfg;
  cfg.descent.max_iters = 300;
  const FieldOptResult r = optimize_field(f, cfg);
  ASSERT_EQ(r.energy_history.size(), 1u);
  EXPECT_TRUE(monotone(r.energy_history[0]));
  EXPECT_LT(r.energy_history[0].back(), r.energy_history[0].front());
  EXPECT_EQ(r.field.nodes[0].value, f.nodes[0].value);
}
