#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "latgf/asymptotics.hpp"
#include "latgf/oracles.hpp"
#include "latgf/pipeline.hpp"

namespace latgf {

struct CriterionResult {
  int id;
  bool pass;
  std::string title;
  std::string detail;
};

struct AcceptanceOptions {
  std::string cli_path;  // CLI binary for the determinism check
  std::set<int> only;    // empty: all criteria
  std::uint64_t seed = 20240611;
};

namespace acceptance_detail {

inline std::string g(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline Problem problem(int d, const std::string& model = "srw", double ri = kPi / 4, double ro = kPi / 2) {
  PipelineConfig c;
  c.dim = d;
  c.model = model;
  c.bump_inner = ri;
  c.bump_outer = ro;
  return make_problem(c);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Shared sweeps, computed on first use.
struct Context {
  AcceptanceOptions opt;
  std::optional<std::vector<DecompositionResult>> srw3_axis;  // L = 10..60 step 5
  std::optional<std::vector<DecompositionResult>> srw5_axis;  // L = 10..40 step 5

  const std::vector<DecompositionResult>& srw3() {
    if (!srw3_axis) srw3_axis = green_rows(problem(3), axis_sweep(3, 10, 60, 5));
    return *srw3_axis;
  }
  const std::vector<DecompositionResult>& srw5() {
    if (!srw5_axis) srw5_axis = green_rows(problem(5), axis_sweep(5, 10, 40, 5));
    return *srw5_axis;
  }
  static double at(const std::vector<DecompositionResult>& rows, int L) {
    for (const auto& r : rows)
      if (r.x[0] == L) return r.f_total.real();
    throw InvalidArgument("acceptance: L = " + std::to_string(L) + " not in sweep");
  }
};

inline CriterionResult c1(Context& ctx) {
  const double target = 3.0 / (2.0 * kPi);
  std::vector<double> dev;
  std::string det;
  for (int L : {20, 40, 60}) {
    const double v = L * Context::at(ctx.srw3(), L);
    dev.push_back(std::abs(v - target) / target);
    det += "L=" + std::to_string(L) + " L*C=" + g(v, 9) + " dev=" + g(dev.back(), 3) + "; ";
  }
  const bool pass = dev[2] <= 0.02 && dev[0] > dev[1] && dev[1] > dev[2];
  return {1, pass, "SRW d=3 constant 3/(2 pi)", det + "need dev(60) <= 0.02, decreasing"};
}

inline CriterionResult c2(Context& ctx) {
  const double target = 5.0 / (4.0 * kPi * kPi);
  const double v = std::pow(30.0, 3) * Context::at(ctx.srw5(), 30);
  const double dev = std::abs(v - target) / target;
  return {2, dev <= 0.05, "SRW d=5 constant 5/(4 pi^2)",
          "L=30 L^3*C=" + g(v, 9) + " target=" + g(target, 9) + " dev=" + g(dev, 3) + "; need <= 0.05"};
}

inline CriterionResult c3(Context& ctx) {
  auto p = problem(3);
  // Both sides are invariant under coordinate permutations and sign flips, so
  // one representative x1 >= x2 >= x3 >= 0 per orbit covers 1 <= |x|_inf <= 5.
  std::vector<LatticePoint> xs;
  for (int a = 1; a <= 5; ++a)
    for (int b = 0; b <= a; ++b)
      for (int c = 0; c <= b; ++c) xs.push_back(LatticePoint{a, b, c});
  sort_by_norm(xs);
  auto pipe = green_rows(p, xs);
  auto series = green_series_oracle(p.model.D, xs, 400);
  double worst = 0;
  LatticePoint worst_x = xs.front();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double rel = std::abs(pipe[i].f_total.real() - series[i].value) / std::abs(series[i].value);
    if (rel > worst) {
      worst = rel;
      worst_x = xs[i];
    }
  }
  const LatticePoint e1{1, 0, 0};
  auto mc = green_mc_oracle(p.model.D, e1, 1'000'000, ctx.opt.seed);
  auto terms = green_series_terms(p.model.D, e1, mc.step_cap);
  double truncated = 0;
  for (double t : terms) truncated += t;
  const double z = std::abs(mc.mean - truncated) / mc.stderr_;
  const bool pass = worst <= 1e-3 && z <= 3.0;
  return {3, pass, "pipeline vs series oracle; MC vs series",
          std::to_string(xs.size()) + " orbit representatives, worst rel=" + g(worst, 3) + " at " +
              point_string(worst_x, ',') + " (need <= 1e-3); MC mean=" + g(mc.mean, 8) +
              " series(n<=" + std::to_string(mc.step_cap) + ")=" + g(truncated, 8) +
              " |diff|/stderr=" + g(z, 3) + " (need <= 3)"};
}

inline std::vector<LatticePoint> sample_points(int d) {
  auto pt = [d](std::initializer_list<int> head) {
    LatticePoint x(d);
    int j = 0;
    for (int v : head) x[j++] = v;
    return x;
  };
  return {pt({}),        pt({1}),       pt({1, 1}),    pt({2}),       pt({1, 1, 1}),
          pt({2, 1}),    pt({3}),       pt({2, 2, 1}), pt({3, 1, 1}), pt({4})};
}

inline CriterionResult c4(Context&) {
  std::string det;
  bool pass = true;
  for (int d : {3, 4, 5}) {
    auto p = problem(d);
    auto xs = sample_points(d);
    auto pipe = green_rows(p, xs);
    sort_by_norm(xs);
    const int ref_n = d == 3 ? 128 : d == 4 ? 64 : 32;
    auto grid = inverse_ft_grid_at(p.f, xs, QuadratureGrid(d, ref_n));
    int ok = 0;
    double worst = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double diff = std::abs(pipe[i].f_total - grid[i].value);
      const double budget = pipe[i].error_estimate + grid[i].error;
      worst = std::max(worst, diff / budget);
      if (diff <= budget) ++ok;
    }
    pass = pass && ok == static_cast<int>(xs.size());
    det += "d=" + std::to_string(d) + ": " + std::to_string(ok) + "/" + std::to_string(xs.size()) +
           " within budget, max diff/budget=" + g(worst, 3) + "; ";
  }
  return {4, pass, "I1 + I2 equals the grid inverse transform", det};
}

inline CriterionResult c5(Context&) {
  auto p = problem(3);
  std::string det;
  bool pass = true;
  for (int L : {10, 20, 40}) {
    const LatticePoint x{L, 0, 0};
    auto a = i1_subtraction(p.h, p.chi, x, p.grid);
    auto b = i1_riesz(p.h, p.chi, x, 4.0 * L + 40, p.grid);
    const double rel = std::abs(a.value - b.value) / std::abs(a.value);
    pass = pass && rel <= 1e-3;
    det += "|x|=" + std::to_string(L) + " rel=" + g(rel, 3) + "; ";
  }
  return {5, pass, "I1 by subtraction vs Riesz convolution", det + "need <= 1e-3"};
}

inline CriterionResult c6(Context&) {
  auto p = problem(3);
  std::string det;
  bool pass = true;
  for (const auto& x : {LatticePoint{0, 0, 0}, LatticePoint{3, 2, 1}, LatticePoint{6, 6, 0}}) {
    auto k_side = i1_subtraction(p.h, p.chi, x, p.grid);
    auto y_side = i1_riesz(p.h, p.chi, x, 4.0 * x.norm() + 40, p.grid);
    const double diff = std::abs(k_side.value - y_side.value);
    const double budget = k_side.error + y_side.error;
    pass = pass && diff <= budget;
    det += point_string(x, ',') + ": diff=" + g(diff, 3) + " budget=" + g(budget, 3) + "; ";
  }
  return {6, pass, "k-side vs y-side I1 within combined estimates", det};
}

inline CriterionResult c7(Context& ctx) {
  auto slope_of = [](const std::vector<DecompositionResult>& rows) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
      if (r.x[0] <= 40) pts.emplace_back(r.x.norm(), r.f_total.real());
    return fit_decay_exponent(pts).slope;
  };
  const double s3 = slope_of(ctx.srw3()), s5 = slope_of(ctx.srw5());
  const bool pass = std::abs(s3 + 1) <= 0.05 && std::abs(s5 + 3) <= 0.05;
  return {7, pass, "decay exponent -(d-2), L = 10..40",
          "d=3 slope=" + g(s3, 6) + " d=5 slope=" + g(s5, 6) + "; need within 0.05 of -1 and -3"};
}

inline CriterionResult c8(Context&) {
  const std::vector<double> radii{10, 20, 40, 80};
  std::string det;
  auto p = problem(3);
  auto u = u_decay_check(p.h, p.chi, radii, p.grid);
  const double drop = u.front().second / u.back().second;
  det += "srw sup_u:";
  for (const auto& [r, s] : u) det += " r=" + g(r, 3) + ":" + g(s, 4);
  det += " drop(10->80)=" + g(drop, 4) + " (need >= 2); ";
  std::vector<double> cs;
  for (int R : {1, 2, 3}) {
    auto q = problem(3, "spread-out-" + std::to_string(R));
    auto uq = u_decay_check(q.h, q.chi, radii, q.grid);
    double sup = 0;
    for (const auto& e : uq) sup = std::max(sup, e.second);
    const double norm = sobolev_norm(q.h, Region::U, 2, 2.0, QuadratureGrid(3, q.norm_grid_n), q.chi).value;
    cs.push_back(sup / norm);
    det += "R=" + std::to_string(R) + " sup_u/||h||=" + g(cs.back(), 4) + " ";
  }
  const double spread = *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
  det += "spread=" + g(spread, 3) + " (need <= 10)";
  return {8, drop >= 2 && spread <= 10, "weighted s decays; one constant across the family", det};
}

inline CriterionResult c9(Context&) {
  // The bump transition width sets how far out s keeps oscillating; a wide
  // transition puts L = 10..40 past that region.
  auto wide = problem(3, "srw", kPi / 8, kPi / 2);
  std::vector<double> vals;
  std::string det = "bump (pi/8, pi/2):";
  for (int L : {10, 20, 40}) {
    auto j = j2_tail(wide.h, wide.chi, LatticePoint{L, 0, 0}, 0.5, wide.grid);
    vals.push_back(j.scaled);
    det += " L=" + std::to_string(L) + ":" + g(j.scaled, 4) + "+-" + g(j.error, 2);
  }
  const bool pass = std::abs(vals[0]) > std::abs(vals[1]) && std::abs(vals[1]) > std::abs(vals[2]);
  auto def = problem(3);
  det += "; default bump (pi/4, pi/2), not graded:";
  for (int L : {10, 20, 40})
    det += " L=" + std::to_string(L) + ":" + g(j2_tail(def.h, def.chi, LatticePoint{L, 0, 0}, 0.5, def.grid).scaled, 4);
  return {9, pass, "|x|^{d-2} |J2| decreasing at eps = 0.5", det};
}

inline CriterionResult c10(Context& ctx) {
  auto p = problem(3);
  auto rep_for = [](const Problem& q, const std::vector<DecompositionResult>& rows) {
    AsymptoticsReport rep;
    rep.d = 3;
    rep.h0 = q.h0;
    set_rows(rep, rows);
    QuadratureGrid ng(3, q.norm_grid_n);
    rep.norm_f = sobolev_norm(q.f, Region::TorusMinusV, 1, 1.0, ng, q.chi).value;
    rep.norm_h = sobolev_norm(q.h, Region::U, 2, 2.0, ng, q.chi).value;
    return verify_bound(rep);
  };
  std::vector<DecompositionResult> short_rows;
  for (const auto& r : ctx.srw3())
    if (r.x[0] <= 30) short_rows.push_back(r);
  const double r30 = rep_for(p, short_rows), r60 = rep_for(p, ctx.srw3());
  const double change = std::abs(r60 / r30 - 1);
  std::string det = "srw ratio L<=30: " + g(r30, 5) + ", L<=60: " + g(r60, 5) + " change=" + g(change, 3) +
                    " (need <= 0.2); ";
  std::vector<double> ratios;
  for (int R : {1, 2, 3}) {
    auto q = problem(3, "spread-out-" + std::to_string(R));
    ratios.push_back(rep_for(q, green_rows(q, axis_sweep(3, 10, 30, 5))));
    det += "R=" + std::to_string(R) + ":" + g(ratios.back(), 4) + " ";
  }
  const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
  det += "spread=" + g(spread, 3) + " (need <= 10)";
  const bool pass = std::isfinite(r30) && std::isfinite(r60) && change <= 0.2 && spread <= 10;
  return {10, pass, "bound ratio stable and uniform", det};
}

inline CriterionResult c11(Context&) {
  auto p = problem(3);
  auto m = s_mass(p.h, p.chi);
  const double diff = std::abs(m.value.real() - p.h0);
  return {11, diff <= 1e-6, "mass identity sum s = h(0)",
          "sum s=" + g(m.value.real(), 12) + " h0=" + g(p.h0, 12) + " |diff|=" + g(diff, 3) + " estimate=" +
              g(m.error, 3) + " (need <= 1e-6)"};
}

inline CriterionResult c12(Context& ctx) {
  namespace fs = std::filesystem;
  if (ctx.opt.cli_path.empty()) return {12, false, "CLI determinism", "no CLI binary configured"};
  const fs::path dir = fs::temp_directory_path() / ("latgf-determinism-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"constants", "constants --dim 3 --model srw"},
      {"green", "green --dim 3 --grid-n 64 --x 0,0,0 --x 1,0,0 --x 2,1,0 --format csv"},
      {"green-json", "green --dim 4 --grid-n 64 --L-min 2 --L-max 6 --L-step 2 --format json"},
      {"asymptote", "asymptote --dim 3 --grid-n 64 --L-min 10 --L-max 20 --L-step 5 --format csv"},
      {"asymptote-json", "asymptote --dim 3 --grid-n 64 --L-min 10 --L-max 20 --L-step 5 --format json"},
      {"oracle", "oracle --dim 3 --x 1,0,0 --n-max 400 --walks 20000 --seed 7"},
      {"verify", "verify --only 11"}};
  std::string det;
  bool pass = true;
  for (const auto& [name, args] : cmds) {
    std::string out[2];
    int status[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path file = dir / (name + "." + std::to_string(run));
      const std::string cmd = "\"" + ctx.opt.cli_path + "\" " + args + " --output \"" + file.string() + "\" 2>/dev/null";
      status[run] = std::system(cmd.c_str());
      out[run] = read_file(file);
    }
    const bool same = status[0] == 0 && status[1] == 0 && !out[0].empty() && out[0] == out[1];
    pass = pass && same;
    det += name + (same ? ":identical " : ":DIFFERS(status " + std::to_string(status[0]) + ") ");
  }
  fs::remove_all(dir);
  return {12, pass, "CLI determinism", det};
}

}  // namespace acceptance_detail

/// Runs the acceptance criteria in order; `report` sees each result as it
/// completes. Exceptions inside a criterion count as a failure.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                                   const std::function<void(const CriterionResult&)>& report) {
  using namespace acceptance_detail;
  Context ctx{opt, std::nullopt, std::nullopt};
  const std::vector<std::pair<std::string, CriterionResult (*)(Context&)>> all{
      {"SRW d=3 constant 3/(2 pi)", c1},
      {"SRW d=5 constant 5/(4 pi^2)", c2},
      {"pipeline vs series oracle; MC vs series", c3},
      {"I1 + I2 equals the grid inverse transform", c4},
      {"I1 by subtraction vs Riesz convolution", c5},
      {"k-side vs y-side I1 within combined estimates", c6},
      {"decay exponent -(d-2), L = 10..40", c7},
      {"weighted s decays; one constant across the family", c8},
      {"|x|^{d-2} |J2| decreasing at eps = 0.5", c9},
      {"bound ratio stable and uniform", c10},
      {"mass identity sum s = h(0)", c11},
      {"CLI determinism", c12}};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opt.only.empty() && !opt.only.count(id)) continue;
    CriterionResult r;
    try {
      r = all[i].second(ctx);
    } catch (const std::exception& e) {
      r = {id, false, all[i].first, std::string("error: ") + e.what()};
    }
    if (report) report(r);
    out.push_back(r);
  }
  return out;
}

inline std::string format_result(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + ": " + (r.pass ? "PASS" : "FAIL") + " - " + r.title + " [" +
         r.detail + "]";
}

}  // namespace latgf
