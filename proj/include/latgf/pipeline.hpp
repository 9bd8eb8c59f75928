#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "latgf/asymptotics.hpp"
#include "latgf/bump.hpp"
#include "latgf/model.hpp"
#include "latgf/quadrature.hpp"
#include "latgf/symbols.hpp"
#include "latgf/transform.hpp"

namespace latgf {

/// Base offset-grid size per axis for the decomposition pipeline.
inline int default_grid_n(int d) {
  check_dim(d);
  switch (d) {
    case 3: return 256;
    case 4: return 96;
    case 5: return 64;
    default: return 32;
  }
}

/// Grid for the Sobolev norms; derivative counts grow like C(n + d, d).
inline int default_norm_grid_n(int d) {
  check_dim(d);
  switch (d) {
    case 3: return 64;
    case 4: return 24;
    default: return 16;
  }
}

struct PipelineConfig {
  int dim = 3;
  std::string model = "srw";
  double bump_inner = kPi / 4;
  double bump_outer = kPi / 2;
  int grid_n = 0;  // 0: default_grid_n(dim)
  int max_grid_n = 4096;
  int norm_grid_n = 0;  // 0: default_norm_grid_n(dim)
};

/// Everything the pipeline needs for one model, validated up front.
struct Problem {
  Model model;
  Symbol f;
  Symbol h;
  double h0;
  BumpFunction chi;
  QuadratureGrid grid;
  int norm_grid_n;
};

inline Problem make_problem(const PipelineConfig& c) {
  require(c.dim >= 3, "dimension must be >= 3 (the walk is recurrent for d <= 2)");
  check_dim(c.dim);
  auto model = load_model(c.model, c.dim);
  auto chi = make_bump(c.dim, c.bump_inner, c.bump_outer);
  const int gn = c.grid_n > 0 ? c.grid_n : default_grid_n(c.dim);
  QuadratureGrid grid(c.dim, gn, std::max(c.max_grid_n, gn));
  const int nn = c.norm_grid_n > 0 ? c.norm_grid_n : default_norm_grid_n(c.dim);
  require(nn >= 8 && nn % 2 == 0, "norm grid: must be even and >= 8");
  auto f = green_symbol(model.D);
  const double h0 = h_at_zero(model.D);
  auto h = h_symbol(f, h0);
  return {std::move(model), std::move(f), std::move(h), h0, std::move(chi), grid, nn};
}

/// (L, 0, ..., 0) for L = L_min, L_min + step, ..., <= L_max.
inline std::vector<LatticePoint> axis_sweep(int d, int L_min, int L_max, int step) {
  require(L_min >= 1, "axis sweep: L_min must be >= 1");
  require(L_max >= L_min, "axis sweep: L_max must be >= L_min");
  require(step >= 1, "axis sweep: L_step must be >= 1");
  std::vector<LatticePoint> xs;
  for (int L = L_min; L <= L_max; L += step) xs.push_back(axis_point(d, L));
  return xs;
}

/// Orders points by |x|, ties broken lexicographically.
inline void sort_by_norm(std::vector<LatticePoint>& xs) {
  std::stable_sort(xs.begin(), xs.end(), [](const LatticePoint& a, const LatticePoint& b) {
    if (a.norm2() != b.norm2()) return a.norm2() < b.norm2();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
}

/// f(x) = I1(x) + I2(x) for every x, in |x| order.
inline std::vector<DecompositionResult> green_rows(const Problem& p, std::vector<LatticePoint> xs) {
  if (xs.empty()) return {};
  for (const auto& x : xs) require(x.dim() == p.f.dim, "green: point dimension does not match --dim");
  sort_by_norm(xs);
  return decompose(p.f, p.h, p.chi, xs, p.grid);
}

/// As green_rows, with I1 from the real-space Riesz convolution. A
/// nonpositive domain radius selects 4|x| + 40 per point.
inline std::vector<DecompositionResult> green_rows_riesz(const Problem& p, std::vector<LatticePoint> xs,
                                                         double domain_radius = 0.0) {
  if (xs.empty()) return {};
  for (const auto& x : xs) require(x.dim() == p.f.dim, "green: point dimension does not match --dim");
  sort_by_norm(xs);
  auto i2 = i2_smooth_part(p.f, p.chi, xs, p.grid);
  std::vector<DecompositionResult> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double R = domain_radius > 0 ? domain_radius : 4.0 * xs[i].norm() + 40.0;
    auto i1 = i1_riesz(p.h, p.chi, xs[i], R, p.grid);
    out.push_back({xs[i], i1.value, i2[i].value, i1.value + i2[i].value, "riesz+offset-grid", i1.error + i2[i].error});
  }
  return out;
}

/// Sweep, decay fit, both Sobolev norms and the bound ratio.
inline AsymptoticsReport asymptote_report(const Problem& p, const std::vector<LatticePoint>& xs) {
  require(xs.size() >= 3, "asymptote: the sweep needs at least 3 points");
  const int d = p.f.dim;
  for (const auto& x : xs) require(x.norm2() > 0, "asymptote: the sweep must exclude x = 0");
  AsymptoticsReport rep;
  rep.d = d;
  rep.model_id = p.model.id;
  rep.h0 = p.h0;
  rep.r_inner = p.chi.r_inner();
  rep.r_outer = p.chi.r_outer();
  rep.grid_n = p.grid.n_per_axis;
  rep.norm_grid_n = p.norm_grid_n;
  set_rows(rep, green_rows(p, xs));
  const auto k = constants(d);
  QuadratureGrid ng(d, p.norm_grid_n);
  rep.norm_f = sobolev_norm(p.f, Region::TorusMinusV, d - 2, 1.0, ng, p.chi).value;
  rep.norm_h = sobolev_norm(p.h, Region::U, k.n, k.p, ng, p.chi).value;
  rep.bound_ratio = verify_bound(rep);
  return rep;
}

}  // namespace latgf
