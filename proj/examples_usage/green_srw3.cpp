#include <cstdio>

#include "latgf/latgf.hpp"

// Green's function of the simple random walk on Z^3 against the series oracle.
int main() {
  using namespace latgf;
  PipelineConfig config;
  config.dim = 3;
  config.grid_n = 64;
  auto p = make_problem(config);

  std::vector<LatticePoint> xs{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {2, 0, 0}};
  auto rows = green_rows(p, xs);
  auto series = green_series_oracle(p.model.D, xs, 400);

  std::printf("%-10s %-16s %-16s %-10s\n", "x", "f(x)", "series", "estimate");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::size_t j = 0;
    while (!(xs[j] == r.x)) ++j;
    std::printf("%-10s %-16.12f %-16.12f %.2e\n", point_string(r.x, ',').c_str(), r.f_total.real(),
                series[j].value, r.error_estimate);
  }
  return 0;
}
