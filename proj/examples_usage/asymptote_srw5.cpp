#include <cstdio>

#include "latgf/latgf.hpp"

// Axis sweep for the simple random walk on Z^5: f(x) |x|^3 / a_5 tends to h(0) = 10.
int main() {
  using namespace latgf;
  PipelineConfig config;
  config.dim = 5;
  auto p = make_problem(config);

  AsymptoticsReport rep;
  rep.d = 5;
  rep.h0 = p.h0;
  set_rows(rep, green_rows(p, axis_sweep(5, 10, 30, 5)));

  std::printf("%-4s %-16s %-12s %-12s\n", "L", "f", "scaled", "remainder");
  for (const auto& r : rep.rows)
    std::printf("%-4d %-16.10e %-12.6f %-12.6f\n", r.x[0], r.f, r.scaled, r.remainder);
  std::printf("fitted exponent %.4f (expected -3)\n", rep.fitted_exponent);
  return 0;
}
