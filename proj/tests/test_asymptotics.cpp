#include <gtest/gtest.h>

#include "latgf/asymptotics.hpp"
#include "latgf/pipeline.hpp"

using namespace latgf;

namespace {

Problem srw(int d) {
  PipelineConfig c;
  c.dim = d;
  return make_problem(c);
}

}  // namespace

TEST(Remainder, Examples) {
  const LatticePoint x{3, 4, 0};
  const double a = constants(3).a;
  EXPECT_NEAR(remainder(a * 6.0 / 5.0, x, 6.0, 3), 0.0, 1e-14);
  EXPECT_EQ(remainder(0.0, x, 6.0, 3), -6.0);
  EXPECT_THROW(remainder(1.0, LatticePoint{0, 0, 0}, 6.0, 3), InvalidArgument);
}

TEST(Remainder, LinearInValue) {
  const LatticePoint x{7, 1, 2, 0, 0};
  const double f = 3.2e-4;
  const double diff = remainder(2 * f, x, 10.0, 5) - remainder(f, x, 10.0, 5);
  EXPECT_NEAR(diff, std::pow(x.norm(), 3) * f / constants(5).a, 1e-12);
}

TEST(FitDecay, ExactPowerLaws) {
  std::vector<std::pair<double, double>> inv, flat;
  for (double r : {2.0, 5.0, 11.0, 30.0}) {
    inv.emplace_back(r, 0.7 / r);
    flat.emplace_back(r, 4.0);
  }
  auto a = fit_decay_exponent(inv);
  EXPECT_NEAR(a.slope, -1.0, 1e-12);
  EXPECT_NEAR(a.intercept, std::log(0.7), 1e-12);
  EXPECT_NEAR(a.r2, 1.0, 1e-12);
  EXPECT_FALSE(a.sign_varying);
  EXPECT_NEAR(fit_decay_exponent(flat).slope, 0.0, 1e-12);
}

TEST(FitDecay, ScaleInvariance) {
  std::vector<std::pair<double, double>> rows{{10, 0.048}, {20, 0.0239}, {40, 0.0119}, {60, 0.00796}};
  auto scaled = rows;
  for (auto& r : scaled) r.second *= 37.0;
  auto a = fit_decay_exponent(rows), b = fit_decay_exponent(scaled);
  EXPECT_NEAR(a.slope, b.slope, 1e-12);
  EXPECT_NEAR(b.intercept - a.intercept, std::log(37.0), 1e-12);
}

TEST(FitDecay, SignVaryingIsFlagged) {
  auto fit = fit_decay_exponent({{10, 0.1}, {20, -0.05}, {40, 0.025}});
  EXPECT_TRUE(fit.sign_varying);
  EXPECT_NEAR(fit.slope, -1.0, 1e-12);
}

TEST(FitDecay, Preconditions) {
  EXPECT_THROW(fit_decay_exponent({{1, 1}, {2, 1}}), InvalidArgument);
  EXPECT_THROW(fit_decay_exponent({{1, 1}, {2, 0}, {3, 1}}), InvalidArgument);
  EXPECT_THROW(fit_decay_exponent({{1, 1}, {1, 2}, {3, 1}}), InvalidArgument);
}

TEST(Sobolev, ConstantSymbolVolumeFraction) {
  auto chi = make_bump(3);
  auto one = constant_symbol(3, 1.0);
  auto r = sobolev_norm(one, Region::TorusMinusV, 0, 1.0, QuadratureGrid(3, 128), chi);
  const double frac = 1.0 - (4.0 / 3.0) * kPi * std::pow(chi.r_inner(), 3) / std::pow(kTwoPi, 3);
  EXPECT_NEAR(r.value, frac, 2e-3);
  EXPECT_LE(r.value, 1.0);
}

TEST(Sobolev, ConstantSymbolHasNoDerivativeMass) {
  auto chi = make_bump(3);
  auto one = constant_symbol(3, 1.0);
  QuadratureGrid g(3, 64);
  auto n0 = sobolev_norm(one, Region::TorusMinusV, 0, 1.0, g, chi);
  for (int n : {1, 2}) {
    auto r = sobolev_norm(one, Region::TorusMinusV, n, 1.0, g, chi);
    EXPECT_NEAR(r.value, n0.value, 1e-3);
  }
}

TEST(Sobolev, HOfSimpleRandomWalkIsGridStable) {
  auto p = srw(3);
  auto a = sobolev_norm(p.h, Region::U, 2, 2.0, QuadratureGrid(3, 64), p.chi);
  auto b = sobolev_norm(p.h, Region::U, 2, 2.0, QuadratureGrid(3, 128), p.chi);
  EXPECT_TRUE(std::isfinite(a.value));
  EXPECT_LT(std::abs(a.value - b.value), 0.01 * b.value);
}

TEST(Sobolev, MonotoneInOrderAndRegion) {
  auto p = srw(3);
  QuadratureGrid g(3, 48);
  double prev = 0;
  for (int n = 0; n <= 2; ++n) {
    const double v = sobolev_norm(p.h, Region::U, n, 2.0, g, p.chi).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  auto small = make_bump(3, kPi / 8, kPi / 3);
  EXPECT_GE(sobolev_norm(p.h, Region::U, 2, 2.0, g, p.chi).value,
            sobolev_norm(p.h, Region::U, 2, 2.0, g, small).value);
  auto bigger_v = make_bump(3, kPi / 3, kPi / 2);
  EXPECT_GE(sobolev_norm(p.f, Region::TorusMinusV, 1, 1.0, g, p.chi).value,
            sobolev_norm(p.f, Region::TorusMinusV, 1, 1.0, g, bigger_v).value);
}

TEST(Sobolev, SingularSymbolOnUIsRejected) {
  auto p = srw(3);
  EXPECT_THROW(sobolev_norm(p.f, Region::U, 0, 2.0, QuadratureGrid(3, 16), p.chi), InvalidArgument);
}

TEST(VerifyBound, ExactLeadingTermGivesZero) {
  AsymptoticsReport rep;
  rep.d = 3;
  rep.h0 = 6.0;
  std::vector<DecompositionResult> rows;
  for (int L : {10, 20, 30}) {
    LatticePoint x{L, 0, 0};
    const double f = constants(3).a * 6.0 / L;
    rows.push_back({x, f, 0.0, f, "synthetic", 0.0});
  }
  set_rows(rep, rows);
  rep.norm_f = 1.0;
  rep.norm_h = 2.0;
  EXPECT_NEAR(verify_bound(rep), 0.0, 1e-14);
  rep.norm_h = 0;
  EXPECT_THROW(verify_bound(rep), InvalidArgument);
}

TEST(Report, RowsSortedByNorm) {
  AsymptoticsReport rep;
  rep.d = 3;
  rep.h0 = 6.0;
  std::vector<DecompositionResult> rows;
  for (int L : {30, 10, 20}) rows.push_back({LatticePoint{L, 0, 0}, 0, 0, 1.0 / L, "t", 0});
  set_rows(rep, rows);
  EXPECT_EQ(rep.rows[0].x[0], 10);
  EXPECT_EQ(rep.rows[2].x[0], 30);
  for (const auto& r : rep.rows) EXPECT_EQ(r.remainder, r.scaled - rep.h0);
}

TEST(UDecay, ShapeAndPreconditions) {
  auto p = srw(3);
  QuadratureGrid g(3, 64);
  EXPECT_EQ(u_decay_check(p.h, p.chi, {12.0}, g).size(), 1u);
  EXPECT_THROW(u_decay_check(p.h, p.chi, {10.0, 5.0}, g), InvalidArgument);
  EXPECT_THROW(u_decay_check(p.h, p.chi, {}, g), InvalidArgument);
}

TEST(UDecay, TrigonometricSymbolIsTiny) {
  // h^ is a trigonometric polynomial, so s = F^{-1}[h^ chi^] decays faster than any power.
  Symbol trig{3, [](const TorusPoint& k) { return cplx(3.0 - k.cos(0) - k.cos(1) - k.cos(2)); }, false, cplx(0.0),
              true, "trig"};
  auto u = u_decay_check(trig, make_bump(3), {4, 8, 16}, QuadratureGrid(3, 64));
  for (const auto& [r, v] : u) EXPECT_TRUE(std::isfinite(v));
  EXPECT_LT(u[2].second, u[0].second);
}

TEST(Pipeline, SimpleRandomWalkThreeDimensions) {
  auto p = srw(3);
  auto rep = asymptote_report(p, axis_sweep(3, 20, 60, 10));
  EXPECT_GE(rep.fitted_exponent, -1.05);
  EXPECT_LE(rep.fitted_exponent, -0.95);
  EXPECT_LT(std::abs(rep.rows.back().remainder), std::abs(rep.rows.front().remainder));
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    EXPECT_LT(std::abs(rep.rows[i].remainder), std::abs(rep.rows[i - 1].remainder));
  EXPECT_NEAR(rep.rows.back().scaled, 6.0, 0.01);
  EXPECT_GT(rep.norm_f, 0);
  EXPECT_GT(rep.norm_h, 0);
  EXPECT_TRUE(std::isfinite(rep.bound_ratio));
}

TEST(Pipeline, SimpleRandomWalkFiveDimensions) {
  auto p = srw(5);
  auto rows = green_rows(p, axis_sweep(5, 10, 40, 5));
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) pts.emplace_back(r.x.norm(), r.f_total.real());
  const double slope = fit_decay_exponent(pts).slope;
  EXPECT_GE(slope, -3.05);
  EXPECT_LE(slope, -2.95);
}

TEST(Serialization, JsonAndCsvLayout) {
  PipelineConfig c;
  c.grid_n = 64;
  auto q = make_problem(c);
  auto rep = asymptote_report(q, axis_sweep(3, 10, 20, 5));
  auto j = to_json(rep);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_TRUE(j["rows"][0].contains("log_L"));
  EXPECT_TRUE(j["rows"][0].contains("log_f"));
  auto csv = to_csv(rep, "echo");
  EXPECT_EQ(csv.rfind("# latgf asymptote schema_version=1 echo\nL,x,f,scaled,remainder\n10,10 0 0,", 0), 0u);
  EXPECT_EQ(fmt12(1.0 / 3.0), "0.333333333333");
}
