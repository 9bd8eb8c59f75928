#include <gtest/gtest.h>

#include "latgf/pipeline.hpp"
#include "latgf/transform.hpp"

using namespace latgf;

namespace {

// C(x) of the simple random walk from an independent Bessel-integral
// evaluation (tests/golden/srw_green_bessel.py).
struct Golden {
  LatticePoint x;
  double value;
};

const std::vector<Golden> kSrw3{
    {{0, 0, 0}, 1.516386059151978},     {{1, 0, 0}, 0.516386059151978},     {{1, 1, 0}, 0.3311486021264239},
    {{1, 1, 1}, 0.2614701263863532},    {{2, 0, 0}, 0.2573358872541945},    {{3, 2, 1}, 0.1269459718073768},
    {{5, 0, 0}, 0.09660645200363897},   {{5, 5, 5}, 0.05500973466245093},   {{10, 0, 0}, 0.04786956925157643},
    {{20, 0, 0}, 0.02388827143828629},  {{40, 0, 0}, 0.0119384891950885},   {{60, 0, 0}, 0.007958300218119979}};

const std::vector<Golden> kSrw5{{{10, 0, 0, 0, 0}, 1.30021506083735e-4},
                                {{20, 0, 0, 0, 0}, 1.593181897212187e-5},
                                {{40, 0, 0, 0, 0}, 1.982032439268899e-6}};

struct Srw {
  StepDistribution D;
  Symbol f, h;
  BumpFunction chi;
  explicit Srw(int d)
      : D(simple_random_walk(d)), f(green_symbol(D)), h(h_symbol(f, h_at_zero(D))), chi(make_bump(d)) {}
};

std::vector<LatticePoint> points_of(const std::vector<Golden>& g) {
  std::vector<LatticePoint> xs;
  for (const auto& e : g) xs.push_back(e.x);
  return xs;
}

}  // namespace

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  auto rule = gauss_legendre(0.0, 2.0, 3);
  double s = 0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * std::pow(rule.x[i], 19);
  EXPECT_NEAR(s, std::pow(2.0, 20) / 20, 1e-8);
}

TEST(Quadrature, SphereRuleWeightsSumToArea) {
  for (int d = 3; d <= 5; ++d) {
    double s = 0;
    for (const auto& [u, w] : sphere_rule(d, 8)) {
      s += w;
      EXPECT_NEAR(u.norm(), 1.0, 1e-14);
    }
    EXPECT_NEAR(s, sphere_area(d), 1e-9 * sphere_area(d));
  }
}

TEST(Quadrature, OffsetGridNeverSamplesOrigin) {
  Symbol trap{3, [](const TorusPoint& k) -> cplx {
                if (k.is_zero()) throw NumericalError("sampled k = 0");
                return 1.0;
              },
              true, std::nullopt, true, "trap"};
  std::vector<RealVector> ys{RealVector{0, 0, 0}};
  EXPECT_NO_THROW(offset_grid_transform(trap, ys, uniform_counts(3, 16)));
}

TEST(Quadrature, AliasingGuard) {
  Srw s(3);
  QuadratureGrid g(3, 64, 256);
  LatticePoint far{200, 0, 0};
  try {
    i2_smooth_part(s.f, s.chi, far, g);
    FAIL() << "expected an aliasing error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("aliasing"), std::string::npos);
  }
}

TEST(InverseFtGrid, ConstantSymbolGivesDelta) {
  auto F = inverse_ft_grid(constant_symbol(3, 1.0), QuadratureGrid(3, 16));
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto x = F.point(i);
    EXPECT_NEAR(std::abs(F.values()[i] - (x.norm2() == 0 ? 1.0 : 0.0)), 0.0, 1e-14) << x;
  }
}

TEST(InverseFtGrid, RecoversStepDistribution) {
  auto D = simple_random_walk(3);
  auto F = inverse_ft_grid(d_hat_symbol(D), QuadratureGrid(3, 16));
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto x = F.point(i);
    EXPECT_NEAR(F.values()[i].real(), D.weight(x), 1e-12) << x;
    EXPECT_NEAR(F.values()[i].imag(), 0.0, 1e-12);
  }
}

TEST(InverseFtGrid, NonEvenSymbolUsesComplexPath) {
  // e^{i k_1} is the transform of the point mass at (1, 0, 0).
  Symbol shift{3, [](const TorusPoint& k) { return std::polar(1.0, k[0]); }, false, cplx(1.0), false, "shift"};
  auto F = inverse_ft_grid(shift, QuadratureGrid(3, 8));
  EXPECT_NEAR(std::abs(F.at(LatticePoint{1, 0, 0}) - 1.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(F.at(LatticePoint{-1, 0, 0})), 0.0, 1e-13);
}

TEST(InverseFtGrid, GreenSymbolWithinEstimate) {
  Srw s(3);
  const LatticePoint e1{1, 0, 0};
  auto est = inverse_ft_grid_at(s.f, std::span<const LatticePoint>(&e1, 1), QuadratureGrid(3, 64)).front();
  EXPECT_LE(std::abs(est.value.real() - 0.516386059151978), est.error);
  auto full = inverse_ft_grid(s.f, QuadratureGrid(3, 64));
  EXPECT_NEAR(full.at(e1).real(), est.value.real(), 1e-12);
}

TEST(I2, ConstantSymbolAtOrigin) {
  // I2(0) = 1 - int chi^ dk/(2 pi)^3 = 1 - 4 pi int psi(r) r^2 dr / (2 pi)^3.
  auto chi = make_bump(3);
  auto rule = gauss_legendre(chi.r_inner(), chi.r_outer(), 48);
  double ball = std::pow(chi.r_inner(), 3) / 3;
  for (std::size_t i = 0; i < rule.x.size(); ++i) ball += rule.w[i] * chi.radial(rule.x[i]) * rule.x[i] * rule.x[i];
  const double expected = 1.0 - 4 * kPi * ball / std::pow(kTwoPi, 3);
  auto coarse = i2_smooth_part(constant_symbol(3, 1.0), chi, LatticePoint{0, 0, 0}, QuadratureGrid(3, 128));
  auto fine = i2_smooth_part(constant_symbol(3, 1.0), chi, LatticePoint{0, 0, 0}, QuadratureGrid(3, 256));
  EXPECT_LE(std::abs(coarse.value.real() - expected), coarse.error);
  EXPECT_NEAR(fine.value.real(), expected, 1e-11);
}

TEST(I2, GreenSymbolGridStable) {
  Srw s(3);
  auto a = i2_smooth_part(s.f, s.chi, LatticePoint{0, 0, 0}, QuadratureGrid(3, 256));
  auto b = i2_smooth_part(s.f, s.chi, LatticePoint{0, 0, 0}, QuadratureGrid(3, 512));
  EXPECT_LT(std::abs(a.value - b.value), 1e-8);
  EXPECT_LT(a.error, 1e-8);
}

TEST(I2, ScaledTailBounded) {
  Srw s(3);
  auto xs = axis_sweep(3, 10, 60, 10);
  auto v = i2_smooth_part(s.f, s.chi, xs, QuadratureGrid(3, 256));
  // The smooth part decays faster than any power; it is already negligible next to a_3 h(0) / |x| = 0.48 / |x|.
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_LT(std::abs(v[i].value) * xs[i].norm(), 1e-2) << xs[i];
    if (xs[i].norm() >= 20) {
      EXPECT_LT(std::abs(v[i].value) * xs[i].norm(), 1e-4) << xs[i];
    }
  }
}

TEST(SEval, OriginIsTheSymbolIntegral) {
  Srw s(3);
  auto v = s_eval(s.h, s.chi, RealVector{0, 0, 0}, QuadratureGrid(3, 128));
  // Reference: radial-angular rule for int chi^ h^ dk/(2 pi)^3 on the ball.
  auto radial = gauss_legendre(0.0, s.chi.r_outer(), 8);
  auto dirs = sphere_rule(3, 24);
  double ref = 0;
  for (std::size_t i = 0; i < radial.x.size(); ++i)
    for (const auto& [u, w] : dirs) {
      RealVector k(3);
      for (int j = 0; j < 3; ++j) k[j] = radial.x[i] * u[j];
      ref += radial.w[i] * w * radial.x[i] * radial.x[i] * s.chi(k) * s.h(TorusPoint::from(k)).real();
    }
  ref /= std::pow(kTwoPi, 3);
  EXPECT_NEAR(v.value.real(), ref, 1e-7);
  EXPECT_LT(v.error, 1e-7);
}

TEST(SEval, RealForEvenSymbols) {
  Srw s(3);
  for (const auto& y : {RealVector{1.5, 0.2, -3.1}, RealVector{7, 7, 0}}) {
    auto v = s_eval(s.h, s.chi, y, QuadratureGrid(3, 64));
    EXPECT_EQ(v.value.imag(), 0.0);
  }
}

TEST(SEval, WeightedEnvelopeDecays) {
  Srw s(3);
  auto u = u_decay_check(s.h, s.chi, {5, 10, 20, 40}, QuadratureGrid(3, 128));
  ASSERT_EQ(u.size(), 4u);
  EXPECT_GT(u[0].second, u[3].second);
  EXPECT_GT(u[1].second, u[3].second);
}

TEST(RieszKernel, Examples) {
  EXPECT_NEAR(riesz_kernel(3, 1), 1 / (4 * kPi), 1e-16);
  EXPECT_NEAR(riesz_kernel(3, 2), 1 / (8 * kPi), 1e-16);
  EXPECT_NEAR(riesz_kernel(5, 1), 1 / (8 * kPi * kPi), 1e-16);
  EXPECT_THROW(riesz_kernel(3, 0), InvalidArgument);
}

TEST(I1Subtraction, ConstantSymbolIsPureRieszTerm) {
  auto chi = make_bump(3);
  auto h = constant_symbol(3, 2.5);
  for (const LatticePoint& x : {LatticePoint{0, 0, 0}, LatticePoint{4, 1, 0}}) {
    auto v = i1_subtraction(h, chi, x, QuadratureGrid(3, 32));
    const int panels = 4 + static_cast<int>(std::ceil(chi.r_outer() * x.norm() / kPi));
    EXPECT_EQ(v.value.real(), 2.5 * radial_riesz_term(3, chi, x.norm(), 2 * panels));
  }
}

TEST(I1Subtraction, ScaledValueApproachesLeadingConstant) {
  Srw s(3);
  auto xs = axis_sweep(3, 20, 60, 20);
  auto v = i1_subtraction(s.h, s.chi, xs, QuadratureGrid(3, 256));
  double prev = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dev = std::abs(v[i].value.real() * xs[i].norm() - 3 / (2 * kPi));
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(I1Riesz, AgreesWithSubtraction) {
  Srw s(3);
  QuadratureGrid g(3, 256);
  const LatticePoint x{20, 0, 0};
  auto a = i1_subtraction(s.h, s.chi, x, g);
  auto b = i1_riesz(s.h, s.chi, x, 120, g);
  EXPECT_LT(std::abs(a.value - b.value) / std::abs(a.value), 1e-3);
  EXPECT_LE(std::abs(a.value - b.value), a.error + b.error);
}

TEST(I1Riesz, AcceptsOrigin) {
  Srw s(3);
  QuadratureGrid g(3, 256);
  const LatticePoint x{0, 0, 0};
  auto a = i1_subtraction(s.h, s.chi, x, g);
  auto b = i1_riesz(s.h, s.chi, x, 40, g);
  EXPECT_LE(std::abs(a.value - b.value), a.error + b.error);
}

TEST(I1Riesz, RejectsSmallDomain) {
  Srw s(3);
  EXPECT_THROW(i1_riesz(s.h, s.chi, LatticePoint{20, 0, 0}, 10, QuadratureGrid(3, 64)), InvalidArgument);
}

TEST(Decompose, MatchesGoldenWithinEstimate) {
  Srw s(3);
  auto xs = points_of(kSrw3);
  auto r = decompose(s.f, s.h, s.chi, xs, QuadratureGrid(3, 256));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(r[i].f_total, r[i].i1 + r[i].i2);
    EXPECT_EQ(r[i].method_tag, "subtraction+offset-grid");
    EXPECT_LE(std::abs(r[i].f_total.real() - kSrw3[i].value), r[i].error_estimate) << xs[i];
    EXPECT_LT(r[i].error_estimate, 2e-7) << xs[i];
  }
}

TEST(Decompose, FiveDimensionalGoldenWithinEstimate) {
  Srw s(5);
  auto xs = points_of(kSrw5);
  auto r = decompose(s.f, s.h, s.chi, xs, QuadratureGrid(5, 64));
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_LE(std::abs(r[i].f_total.real() - kSrw5[i].value), r[i].error_estimate) << xs[i];
}

TEST(Decompose, ChangeUnderDoublingWithinEstimate) {
  Srw s(3);
  std::vector<LatticePoint> xs{{0, 0, 0}, {2, 1, 0}, {15, 0, 0}};
  auto coarse = decompose(s.f, s.h, s.chi, xs, QuadratureGrid(3, 128));
  auto fine = decompose(s.f, s.h, s.chi, xs, QuadratureGrid(3, 256));
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_LE(std::abs(fine[i].f_total - coarse[i].f_total), coarse[i].error_estimate) << xs[i];
}

TEST(Decompose, IdentityWithGridTransform) {
  Srw s(3);
  std::vector<LatticePoint> xs{{0, 0, 0}, {1, 0, 0}, {2, 2, 1}, {4, 0, 0}, {7, 0, 0}};
  auto r = decompose(s.f, s.h, s.chi, xs, QuadratureGrid(3, 256));
  auto g = inverse_ft_grid_at(s.f, xs, QuadratureGrid(3, 64));
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_LE(std::abs(r[i].f_total - g[i].value), r[i].error_estimate + g[i].error) << xs[i];
}

TEST(SMass, EqualsHAtZero) {
  Srw s(3);
  auto m = s_mass(s.h, s.chi);
  EXPECT_LE(std::abs(m.value.real() - 6.0), 1e-6);
  EXPECT_LE(std::abs(m.value.real() - 6.0), m.error);
}

TEST(J2, EpsilonSweep) {
  Srw s(3);
  QuadratureGrid g(3, 256);
  const LatticePoint x{20, 0, 0};
  double prev_i1 = 0;
  for (double eps : {0.25, 0.5, 0.75}) {
    auto j = j2_tail(s.h, s.chi, x, eps, g);
    EXPECT_TRUE(std::isfinite(j.scaled));
    EXPECT_LT(j.error, 1e-3 * (std::abs(j.scaled) + 1e-3));
    // I1 does not depend on epsilon; J1 + J2 reassembles it.
    if (prev_i1 != 0) {
      EXPECT_EQ(j.i1.real(), prev_i1);
    }
    prev_i1 = j.i1.real();
    EXPECT_NEAR(j.scaled, x.norm() * (j.i1 - j.j1).real(), 1e-15);
  }
}

TEST(J2, EpsilonNearOneLeavesLittle) {
  Srw s(3);
  QuadratureGrid g(3, 256);
  auto near_one = j2_tail(s.h, s.chi, LatticePoint{20, 0, 0}, 0.95, g);
  EXPECT_LT(std::abs(near_one.scaled), 0.05 * s.h(TorusPoint{0, 0, 0}).real());
  EXPECT_THROW(j2_tail(s.h, s.chi, LatticePoint{20, 0, 0}, 1.0, g), InvalidArgument);
  EXPECT_THROW(j2_tail(s.h, s.chi, LatticePoint{0, 0, 0}, 0.5, g), InvalidArgument);
}

TEST(J2, WideTransitionBumpDecreasesInMagnitude) {
  Srw s(3);
  auto chi = make_bump(3, kPi / 8, kPi / 2);
  QuadratureGrid g(3, 256);
  double prev = 1e300;
  for (int L : {10, 20, 40}) {
    const double v = std::abs(j2_tail(s.h, chi, LatticePoint{L, 0, 0}, 0.5, g).scaled);
    EXPECT_LT(v, prev) << "L=" << L;
    prev = v;
  }
}
