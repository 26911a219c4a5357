// Semisymmetrize a random octupole and print sqrt(penalty) next to the
// distance to the manifold at every iteration.
//
//   demo_convergence [seed]

#include <octaframe/octaframe.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char **argv)
{
  using namespace octaframe;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;

  Rng rng(seed);
  const Trajectory t = semisymmetrize(random_unit_octupole(rng), PenaltyWeights{5.0, 2.5});

  std::printf("%5s %14s %14s %10s\n", "iter", "sqrt(p)", "distance", "ratio");
  for (const auto &p : t.points)
    std::printf("%5d %14.6e %14.6e %10.4f\n", p.iter, p.sqrt_penalty, p.distance,
                p.distance > 0 ? p.sqrt_penalty / p.distance : 0.0);
  std::printf("status: %s\n", std::string(to_string(t.status)).c_str());
  return t.status == DescentStatus::Converged ? 0 : 2;
}
