// A ring of frames turning a third of a revolution about a cube diagonal.
// After optimizing the free nodes, the loop still carries an order-3 twist:
// the signature of a valence-3 singular line threading the ring.

#include <octaframe/octaframe.hpp>

#include <cstdio>
#include <numbers>

int main()
{
  using namespace octaframe;
  const int n = 12;
  const Vector3 axis = Vector3(1, 1, 1).normalized();

  // Every third node is pinned to the analytic frame; the rest start scrambled.
  FrameField f;
  Rng rng(3);
  for (int k = 0; k < n; ++k)
  {
    const double angle = (2.0 * std::numbers::pi / 3.0) * k / n;
    const Matrix3 q = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const bool pinned = k % 3 == 0;
    f.nodes.push_back(
        {pinned ? rotate(Octupole::reference(), harmonic_rotation(q)) : random_unit_octupole(rng), pinned});
    f.edges.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>((k + 1) % n)});
  }

  const FieldOptResult r = optimize_field(f, FieldOptConfig{});
  std::printf("optimizer: %s, energy %.3e -> %.3e\n", std::string(to_string(r.status)).c_str(),
              r.energy_history.back().front(), r.energy_history.back().back());

  std::vector<std::size_t> loop(n);
  for (int k = 0; k < n; ++k)
    loop[k] = static_cast<std::size_t>(k);

  const auto &g = OctahedralGroup::get();
  const std::size_t idx = loop_index(r.field, loop, g);
  const Eigen::AngleAxisd aa(g[idx].rotation);
  std::printf("loop index: element %zu, order %d, turn %.1f deg about (%.3f, %.3f, %.3f)\n", idx, g.order(idx),
              aa.angle() * 180.0 / std::numbers::pi, aa.axis().x(), aa.axis().y(), aa.axis().z());
  return g.order(idx) == 3 ? 0 : 1;
}
