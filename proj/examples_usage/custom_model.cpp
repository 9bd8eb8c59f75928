#include <cstdio>
#include <fstream>
#include <sstream>

#include "latgf/latgf.hpp"

// A lazy walk read from a model file: stay put with probability 1/2, else a
// nearest-neighbour step. Its Green's function is twice that of the simple walk.
int main(int argc, char** argv) {
  using namespace latgf;
  const std::string path = argc > 1 ? argv[1] : "examples_usage/lazy_walk_d3.json";
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    return 1;
  }
  std::stringstream text;
  text << in.rdbuf();
  auto D = parse_model_json(text.str());

  std::printf("sigma^2 = %.6f, h(0) = %.6f\n", moment(D, 2), h_at_zero(D));
  auto lazy = green_series_oracle(D, LatticePoint{2, 1, 0}, 800);
  auto srw = green_series_oracle(simple_random_walk(3), LatticePoint{2, 1, 0}, 400);
  std::printf("C_lazy(2,1,0) = %.10f, 2 C_srw(2,1,0) = %.10f\n", lazy.value, 2 * srw.value);

  auto mc = green_mc_oracle(D, LatticePoint{2, 1, 0}, 20000, 7);
  double truncated = 0;
  for (double t : green_series_terms(D, LatticePoint{2, 1, 0}, mc.step_cap)) truncated += t;
  std::printf("Monte Carlo %.5f +- %.5f, series cut at the same %ld steps %.5f\n", mc.mean, mc.stderr_, mc.step_cap,
              truncated);
  return 0;
}
