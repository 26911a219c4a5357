// One line per acceptance criterion; exit status is nonzero if any fails.

#include "cli_runner.hpp"

#include <octaframe/octaframe.hpp>
#include <octaframe/verify.hpp>

#include <chrono>
#include <cstdio>
#include <numbers>

using namespace octaframe;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string &detail)
{
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool monotone(const std::vector<double> &h)
{
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1])
      return false;
  return true;
}

void zero_set()
{
  const auto t0 = Clock::now();
  Rng rng(101);
  double norm_err = 0.0, quad_err = 0.0;
  for (int i = 0; i < 1000; ++i)
  {
    const auto r = quadric_residuals(semisymmetric_from_angles(random_angles(rng)));
    norm_err = std::max(norm_err, std::abs(r.norm));
    for (double q : r.quadric)
      quad_err = std::max(quad_err, std::abs(q));
  }
  const double dt = seconds_since(t0);
  report(1, norm_err <= 1e-12 && quad_err <= 1e-10 && dt < 1.0,
         fmt("unit-norm err %.2e, quadric err %.2e, %.3f s", norm_err, quad_err, dt));
}

void average_equivalence()
{
  const auto t0 = Clock::now();
  Rng rng(102);
  double err = 0.0;
  for (int i = 0; i < 100; ++i)
  {
    const Octupole a = random_unit_octupole(rng);
    err = std::max(err, std::abs(so3_average_trial(a) - deviation(a)));
  }
  const double dt = seconds_since(t0);
  report(2, err <= 1e-6 && dt < 30.0, fmt("max |avg - d| %.2e, %.2f s", err, dt));
}

void rotation_invariance()
{
  Rng rng(103);
  double err = 0.0;
  for (int i = 0; i < 1000; ++i)
  {
    const Octupole a(Vector7::NullaryExpr([&] { return rng.normal(); }));
    const HarmonicRotation r = harmonic_rotation(random_rotation(rng));
    const double d = deviation(a);
    err = std::max(err, std::abs(deviation(rotate(a, r)) - d) / std::max(1.0, d));
  }
  report(3, err <= 1e-9, fmt("max scaled |d(Ra) - d(a)| %.2e", err));
}

void rotation_representation()
{
  const Matrix7 &q = rotation_x_quarter().m;
  const double order4 = (q * q * q * q - Matrix7::Identity()).cwiseAbs().maxCoeff();

  Rng rng(104);
  double ortho = std::max(rotation_x_quarter().orthogonality_error(), 0.0);
  for (int i = 0; i < 100; ++i)
  {
    const EulerAngles e = random_angles(rng);
    ortho = std::max({ortho, rotation_z(e.alpha).orthogonality_error(), rotation_y(e.beta).orthogonality_error(),
                      rotation_x(e.gamma).orthogonality_error(),
                      compose_zxz(e.alpha, e.beta, e.gamma).orthogonality_error(),
                      harmonic_rotation(random_rotation(rng)).orthogonality_error()});
  }
  double consistency = 0.0;
  for (int i = 0; i < 100; ++i)
  {
    const Matrix3 r = random_rotation(rng);
    const Octupole a(Vector7::NullaryExpr([&] { return rng.normal(); }));
    const Direction v(rng.normal(), rng.normal(), rng.normal());
    consistency = std::max(consistency, function_consistency_error(r, a, v));
  }
  report(4, order4 <= 1e-14 && ortho <= 1e-13 && consistency <= 1e-10,
         fmt("quarter^4 err %.2e, orthogonality err %.2e, consistency err %.2e", order4, ortho, consistency));
}

void spot_values()
{
  const Octupole ref = Octupole::reference(), e = Octupole::unit(-3);
  const double d0 = deviation(ref), d1 = deviation(e);
  const double q1 = quadric_residuals(e).quadric[0];
  const double s = smoothness_term(ref, e);
  const bool ok = std::abs(d0) <= 1e-12 && std::abs(d1 - 25.0) <= 1e-12 && std::abs(q1 + 5.0) <= 1e-12 &&
                  std::abs(s - 4.0) <= 1e-12;
  report(5, ok, fmt("d(ref) %.17g, d(e_-3) %.17g, M1 residual %.17g, smoothness %.17g", d0, d1, q1, s));
}

void gradients()
{
  Rng rng(105);
  const PenaltyWeights w{5.0, 2.5};
  double dev = 0.0, pen = 0.0, energy = 0.0;
  for (int i = 0; i < 50; ++i)
  {
    const Octupole a = random_unit_octupole(rng);
    dev = std::max(dev, gradient_check([](const Vector7 &x) { return deviation(Octupole(x)); }, a.coeffs,
                                       deviation_gradient(a)));
    pen = std::max(pen, gradient_check([&](const Vector7 &x) { return penalty(Octupole(x), w); }, a.coeffs,
                                       penalty_gradient(a, w)));

    // A three-node path with one pinned end; differentiate through each free node.
    FrameField f;
    for (int k = 0; k < 3; ++k)
      f.nodes.push_back({random_unit_octupole(rng), k == 0});
    f.edges = {{0, 1}, {1, 2}};
    const auto g = energy_gradient(f, w);
    for (std::size_t n = 1; n < 3; ++n)
      energy = std::max(energy, gradient_check(
                                    [&](const Vector7 &x) {
                                      FrameField t = f;
                                      t.nodes[n].value.coeffs = x;
                                      return total_energy(t, w);
                                    },
                                    f.nodes[n].value.coeffs, g[n]));
  }
  report(6, dev <= 1e-6 && pen <= 1e-6 && energy <= 1e-6,
         fmt("relative FD error: deviation %.2e, penalty %.2e, energy %.2e", dev, pen, energy));
}

void convergence_reproduction()
{
  Rng rng(7);
  const Trajectory t = semisymmetrize(random_unit_octupole(rng), {5.0, 2.5});
  bool mono = true;
  for (std::size_t i = 1; i < t.points.size(); ++i)
    mono = mono && t.points[i].sqrt_penalty < t.points[i - 1].sqrt_penalty;
  double lo = 1e300, hi = 0.0;
  for (const auto &p : t.points)
    if (p.distance < 0.5 && p.distance >= 1e-12)
    {
      lo = std::min(lo, p.sqrt_penalty / p.distance);
      hi = std::max(hi, p.sqrt_penalty / p.distance);
    }
  const bool reached = t.status == DescentStatus::Converged && t.points.back().sqrt_penalty < 1e-3 &&
                       t.points.back().iter <= 500;
  report(7, mono && reached && lo >= 0.5 && hi <= 20.0,
         fmt("%.0f iterations, final sqrt(p) %.2e, ratio range [%.3f, %.3f]", t.points.back().iter,
             t.points.back().sqrt_penalty, lo, hi));
}

void field_optimization()
{
  const Octupole ref = Octupole::reference();
  Rng rng(106);

  FrameField pair;
  pair.nodes = {{ref, true}, {random_unit_octupole(rng), false}};
  pair.edges = {{0, 1}};
  const FieldOptResult pr = optimize_field(pair, FieldOptConfig{});
  const Vector7 a1 = pr.field.nodes[1].value.coeffs;
  const double pair_smooth = smoothness_term(pr.field.nodes[0].value, pr.field.nodes[1].value);
  const double pair_dist = std::min((a1 - ref.coeffs).norm(), (a1 + ref.coeffs).norm());

  const Octupole boundary = semisymmetric_from_angles({0.4, -0.9, 1.7});
  FrameField grid = FrameField::make_grid({8, 8, 8});
  const GridDims d = *grid.grid;
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i)
      {
        auto &n = grid.nodes[d.index(i, j, k)];
        n = d.on_boundary(i, j, k) ? FieldNode{boundary, true} : FieldNode{random_unit_octupole(rng), false};
      }
  FieldOptConfig cfg;
  cfg.levels = 3;
  auto t0 = Clock::now();
  const FieldOptResult gr = optimize_field(grid, cfg);
  const double dt = seconds_since(t0);
  const double grid_energy = total_energy(gr.field, cfg.weights);

  // Without the hierarchy the interior starts random and must be smoothed out.
  FieldOptConfig flat = cfg;
  flat.levels = 1;
  t0 = Clock::now();
  const FieldOptResult fr = optimize_field(grid, flat);
  const double flat_dt = seconds_since(t0);
  const double flat_energy = total_energy(fr.field, flat.weights);

  bool mono = monotone(pr.energy_history[0]) && monotone(fr.energy_history[0]);
  for (const auto &h : gr.energy_history)
    mono = mono && monotone(h);

  bool gauge = true;
  for (FrameField f : {grid, gr.field, fr.field})
  {
    const double e0 = total_energy(f, cfg.weights);
    for (std::size_t n = 0; n < f.nodes.size(); n += 37)
    {
      f.nodes[n].value = -f.nodes[n].value;
      gauge = gauge && total_energy(f, cfg.weights) == e0;
      f.nodes[n].value = -f.nodes[n].value;
    }
  }

  report(8,
         pair_smooth <= 1e-8 && pair_dist <= 1e-3 && grid_energy <= 1e-6 && dt < 60.0 && flat_energy <= 1e-6 &&
             flat_dt < 60.0 && mono && gauge,
         fmt("pair smoothness %.2e, pair distance %.2e", pair_smooth, pair_dist) +
             fmt(", grid energy %.2e in %.2f s (3 levels), %.2e in %.2f s (1 level)", grid_energy, dt, flat_energy,
                 flat_dt) +
             (mono ? ", monotone" : ", NOT monotone") + (gauge ? ", sign-flip exact" : ", sign-flip drift"));
}

FrameField ring(const Vector3 &axis, double step_deg, int count, const Matrix3 &base)
{
  FrameField f;
  for (int k = 0; k < count; ++k)
  {
    const Matrix3 q =
        base * Eigen::AngleAxisd(k * step_deg * std::numbers::pi / 180.0, axis.normalized()).toRotationMatrix();
    f.nodes.push_back({rotate(Octupole::reference(), harmonic_rotation(q)), false});
  }
  for (int k = 0; k < count; ++k)
    f.edges.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>((k + 1) % count)});
  return f;
}

void singularity_classification()
{
  const auto &g = OctahedralGroup::get();
  Rng rng(107);
  const Matrix3 base = random_rotation(rng);

  const FrameField constant = ring(Vector3::UnitZ(), 0.0, 6, base);
  std::vector<std::size_t> six{0, 1, 2, 3, 4, 5};
  const bool identity = loop_index(constant, six, g) == OctahedralGroup::identity();

  const FrameField vertex = ring(Vector3(1, 1, 1), 15.0, 8, base);
  std::vector<std::size_t> fwd{0, 1, 2, 3, 4, 5, 6, 7}, rev{0, 7, 6, 5, 4, 3, 2, 1};
  const std::size_t a = loop_index(vertex, fwd, g), b = loop_index(vertex, rev, g);
  const bool order3 = a != OctahedralGroup::identity() && g.order(a) == 3;
  const bool inverse = b == g.inverse(a);

  report(9, identity && order3 && inverse,
         std::string("constant loop ") + (identity ? "identity" : "NOT identity") + ", vertex-axis loop order " +
             std::to_string(g.order(a)) + ", reversed loop " + (inverse ? "inverse" : "NOT inverse"));
}

void determinism()
{
  const auto a = cli::run("verify --samples 100 --seed 1");
  const auto b = cli::run("verify --samples 100 --seed 1");
  const auto c = cli::run("verify --samples 100 --seed 1", "OCTAFRAME_THREADS=1");
  const auto d = cli::run("verify --samples 100 --seed 1", "OCTAFRAME_THREADS=4");
  const bool same = a.out == b.out && a.out == c.out && a.out == d.out;
  report(10, a.code == 0 && !a.out.empty() && same,
         std::string("verify exit ") + std::to_string(a.code) + ", " + std::to_string(a.out.size()) +
             " report bytes, " + (same ? "identical" : "DIFFERENT") + " across runs and 1/4/default threads");
}

} // namespace

int main()
{
  const std::pair<int, void (*)()> criteria[] = {
      {1, zero_set},         {2, average_equivalence},      {3, rotation_invariance},
      {4, rotation_representation}, {5, spot_values},       {6, gradients},
      {7, convergence_reproduction}, {8, field_optimization}, {9, singularity_classification},
      {10, determinism}};
  for (const auto &[id, fn] : criteria)
  {
    try
    {
      fn();
    }
    catch (const std::exception &e)
    {
      report(id, false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
