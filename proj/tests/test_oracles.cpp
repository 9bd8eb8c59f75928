#include <gtest/gtest.h>

#include "latgf/oracles.hpp"

using namespace latgf;

namespace {

std::vector<LatticePoint> lattice_images(const LatticePoint& x) {
  std::vector<LatticePoint> out;
  std::vector<int> perm{0, 1, 2};
  do {
    for (unsigned s = 0; s < 8; ++s) {
      LatticePoint y(3);
      for (int j = 0; j < 3; ++j) y[j] = ((s >> j) & 1 ? -1 : 1) * x[perm[j]];
      out.push_back(y);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

TEST(SeriesTerms, FirstTermsOfSimpleRandomWalk) {
  auto D = simple_random_walk(3);
  auto t0 = green_series_terms(D, LatticePoint{0, 0, 0}, 4);
  EXPECT_EQ(t0[0], 1.0);
  EXPECT_EQ(t0[1], 0.0);
  EXPECT_NEAR(t0[2], 1.0 / 6, 1e-16);
  EXPECT_EQ(t0[3], 0.0);
  // 90 closed 4-step paths out of 6^4.
  EXPECT_NEAR(t0[4], 90.0 / 1296, 1e-16);
  auto t1 = green_series_terms(D, LatticePoint{1, 0, 0}, 3);
  EXPECT_NEAR(t1[1], 1.0 / 6, 1e-16);
  EXPECT_NEAR(t1[3], 15.0 / 216, 1e-16);
}

TEST(SeriesTerms, MultiPointMatchesSinglePoint) {
  auto D = spread_out_walk(3, 1);
  std::vector<LatticePoint> xs{{0, 0, 0}, {3, 1, 0}, {-2, 0, 2}};
  auto all = green_series_terms(D, xs, 60);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto one = green_series_terms(D, xs[i], 60);
    for (std::size_t n = 0; n < one.size(); ++n) EXPECT_NEAR(all[i][n], one[n], 1e-17);
  }
}

TEST(SeriesOracle, MatchesReferenceValues) {
  auto D = simple_random_walk(3);
  auto r = green_series_oracle(D, std::vector<LatticePoint>{{0, 0, 0}, {1, 0, 0}, {1, 1, 1}}, 400);
  const double ref[] = {1.516386059151978, 0.516386059151978, 0.2614701263863532};
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(r[i].converged);
    EXPECT_LE(std::abs(r[i].value - ref[i]), r[i].tail_estimate + 1e-9) << i;
    EXPECT_EQ(r[i].value, r[i].partial_sum + r[i].tail);
  }
}

TEST(SeriesOracle, InvariantUnderLatticeSymmetries) {
  auto D = simple_random_walk(3);
  auto xs = lattice_images(LatticePoint{2, 1, 0});
  auto r = green_series_oracle(D, xs, 200);
  for (const auto& e : r) EXPECT_NEAR(e.value, r.front().value, 1e-12);
}

TEST(SeriesOracle, PartialSumsNondecreasingForNonnegativeWeights) {
  auto t = green_series_terms(spread_out_walk(3, 2), LatticePoint{3, 0, 1}, 150);
  double s = 0;
  for (double v : t) {
    EXPECT_GE(v, 0.0);
    const double next = s + v;
    EXPECT_GE(next, s);
    s = next;
  }
}

TEST(SeriesOracle, RejectsDegenerateWalks) {
  auto delta = StepDistribution::from_orbits(3, {{LatticePoint{0, 0, 0}, 1.0}});
  EXPECT_THROW(green_series_oracle(delta, LatticePoint{0, 0, 0}, 100), InvalidArgument);
  auto two_step = StepDistribution::from_orbits(3, {{LatticePoint{0, 0, 0}, -0.5}, {LatticePoint{2, 0, 0}, 0.25}});
  EXPECT_THROW(green_series_oracle(two_step, LatticePoint{0, 0, 0}, 100), InvalidArgument);
  EXPECT_THROW(green_series_oracle(simple_random_walk(3), LatticePoint{0, 0, 0}, 20), InvalidArgument);
}

TEST(MonteCarlo, UnreachablePointGivesZero) {
  auto r = green_mc_oracle(simple_random_walk(3), LatticePoint{50, 0, 0}, 1000, 1, 10);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.stderr_, 0.0);
}

TEST(MonteCarlo, DeterministicForFixedSeed) {
  auto D = simple_random_walk(3);
  auto a = green_mc_oracle(D, LatticePoint{1, 0, 0}, 5000, 42);
  auto b = green_mc_oracle(D, LatticePoint{1, 0, 0}, 5000, 42);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
  auto c = green_mc_oracle(D, LatticePoint{1, 0, 0}, 5000, 43);
  EXPECT_NE(a.mean, c.mean);
}

TEST(MonteCarlo, AgreesWithTruncatedSeries) {
  auto D = simple_random_walk(3);
  const LatticePoint x{1, 0, 0};
  auto mc = green_mc_oracle(D, x, 200000, 2024);
  EXPECT_EQ(mc.step_cap, default_step_cap(D, x));
  double truncated = 0;
  for (double t : green_series_terms(D, x, mc.step_cap)) truncated += t;
  EXPECT_LE(std::abs(mc.mean - truncated), 3 * mc.stderr_);
}

TEST(MonteCarlo, RejectsSignedWeights) {
  auto D = StepDistribution::from_orbits(3, {{LatticePoint{0, 0, 0}, -0.5}, {LatticePoint{1, 0, 0}, 0.25}});
  EXPECT_THROW(green_mc_oracle(D, LatticePoint{0, 0, 0}, 10, 1), InvalidArgument);
}
