// Optimized tail bound for a Rademacher field on four points, next to a small
// Monte Carlo estimate of the same tail.

#include <cstdio>

#include "lil.hpp"

int main() {
  using namespace lil;

  FieldSpec spec;
  spec.family = Family::rademacher;
  spec.axes = {GridMeasureSpace::uniform_probability(4)};
  spec.norm = NormSpec::lp(2.0);

  const auto env = envelope_from_spec(spec);
  const auto v = NormingSequence::iterated_log(1.0);
  const auto u = log_grid(4.0, 40.0, 10);
  const auto curve = bound_curve(
      u, [&](double uu) { return optimize_bound(env, v, uu); }, Theorem::lebesgue, 1.0);

  const auto ens = simulate(spec, 2000, 20000, 7, 1.0);
  const auto emp = empirical_Q(ens, u);

  std::printf("%10s %14s %4s %14s %14s\n", "u", "bound", "d", "q_hat", "cp_upper_99");
  for (std::size_t i = 0; i < u.size(); ++i)
    std::printf("%10.4f %14.6e %4d %14.6e %14.6e\n", u[i], curve.values[i], curve.points[i].d, emp.q_hat[i],
                emp.cp_upper[i]);
}
