#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "translocal/errors.hpp"
#include "translocal/maps.hpp"
#include "translocal/separated.hpp"

using namespace translocal;
using namespace translocal::separated;

namespace {

// Greedy admission in the given order, pairwise Bowen distances.
std::uint64_t brute_greedy(const maps::System& sys, const std::vector<PhasePoint>& pts, std::int64_t n, double eps,
                           bool strict = true) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool ok = true;
    for (auto j : kept) {
      const double d = bowen_distance(sys, pts[i], pts[j], n);
      if (strict ? d <= eps : d < eps) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(i);
  }
  return kept.size();
}

}  // namespace

TEST(BowenDistance, TriplingOrbit) {
  const auto f = maps::make_system("tripling");
  EXPECT_NEAR(bowen_distance(*f, PhasePoint::circle(0.10), PhasePoint::circle(0.11), 3), 0.09, 1e-12);
  EXPECT_NEAR(bowen_distance(*f, PhasePoint::circle(0.10), PhasePoint::circle(0.11), 1), 0.01, 1e-12);
  EXPECT_EQ(bowen_distance(*f, PhasePoint::circle(0.3), PhasePoint::circle(0.3), 12), 0.0);
}

TEST(BowenDistance, IsAMetricAndGrowsWithN) {
  const auto f = maps::make_system("g3branch");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PhasePoint> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(PhasePoint::circle(u(rng)));
  for (std::int64_t n = 1; n <= 6; ++n)
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        const double dab = bowen_distance(*f, pts[a], pts[b], n);
        ASSERT_EQ(dab, bowen_distance(*f, pts[b], pts[a], n));
        ASSERT_GE(bowen_distance(*f, pts[a], pts[b], n + 1), dab);
        for (std::size_t c = 0; c < pts.size(); c += 5)
          ASSERT_LE(dab, bowen_distance(*f, pts[a], pts[c], n) + bowen_distance(*f, pts[c], pts[b], n) + 1e-12);
      }
}

TEST(SeparatedCount, FullShiftWords) {
  const auto shift = maps::make_system("fullshift:2");
  for (int n = 1; n <= 10; ++n) {
    const BallSpec whole(PhasePoint::word({0}), 1.0, true);
    EXPECT_EQ(ball_separated_count(*shift, whole, n, 0.5).count, 1u << n) << n;
    EXPECT_EQ(symbolic_word_count(*shift, n), 1u << n);
  }
  EXPECT_EQ(symbolic_word_count(*maps::make_system("fullshift:3"), 4), 81u);
}

TEST(SeparatedCount, FullShiftWordGridByGreedy) {
  const auto shift = maps::make_system("fullshift:2");
  for (int n = 1; n <= 8; ++n) {
    const BallSpec whole(PhasePoint::word({0}), 1.0, true);
    const auto grid = sample_grid(whole, shift->metric(), std::exp(-static_cast<double>(n)));
    const auto q = SeparationQuery::from_grid(shift, grid, n, 0.5);
    EXPECT_EQ(separated_count(q).count, 1u << n);
  }
}

TEST(SeparatedCount, ShiftPrefixClassesMatchPairwiseGreedy) {
  const auto shift = maps::make_system("fullshift:3");
  std::mt19937_64 rng(8);
  SeparationQuery q;
  q.system = shift;
  for (int i = 0; i < 300; ++i) {
    std::vector<int> w(30);
    for (auto& c : w) c = static_cast<int>(rng() % 3 == 0);
    q.samples.push_back(PhasePoint::word(std::move(w), 0, 30));
  }
  for (std::int64_t n : {1, 2, 4, 7})
    for (double eps : {0.9, std::exp(-2.0), 0.05})
      for (bool strict : {true, false}) {
        q.n = n;
        q.epsilon = eps;
        q.strict = strict;
        EXPECT_EQ(separated_count(q).count, brute_greedy(*shift, q.samples, n, eps, strict)) << n << " " << eps;
      }
}

TEST(SeparatedCount, SingletonAndEmpty) {
  SeparationQuery q;
  q.system = maps::make_system("tripling");
  q.samples = {PhasePoint::circle(0.4)};
  EXPECT_EQ(separated_count(q).count, 1u);
  q.samples.clear();
  EXPECT_THROW(separated_count(q), ContractViolation);
}

TEST(SeparatedCount, CircleSpacingAtNOne) {
  const auto f = maps::make_system("tripling");
  const BallSpec whole(PhasePoint::circle(0.0), 0.5, true);
  BallCountOptions fine;
  fine.theta = 0.01;
  EXPECT_EQ(ball_separated_count(*f, whole, 1, 0.1, fine).count, 9u);
  // coarse refinement gives a maximal set that is not a maximum
  EXPECT_LE(ball_separated_count(*f, whole, 1, 0.1).count, 9u);
  // maximum (not only maximal) on a fine grid
  SeparationQuery q;
  q.system = f;
  for (int i = 0; i < 1000; ++i) q.samples.push_back(PhasePoint::circle(i / 1000.0));
  q.epsilon = 0.1;
  EXPECT_EQ(separated_count(q).count, 9u);
}

TEST(SeparatedCount, KernelMatchesPairwiseGreedy) {
  for (const char* id : {"tripling", "g3branch", "sqrtmap", "cat", "disk"}) {
    const auto f = maps::make_system(id);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SeparationQuery q;
    q.system = f;
    for (int i = 0; i < 600; ++i) {
      switch (f->space()) {
        case Space::circle: q.samples.push_back(PhasePoint::circle(u(rng))); break;
        case Space::interval: q.samples.push_back(PhasePoint::interval(u(rng))); break;
        case Space::torus: q.samples.push_back(PhasePoint::torus({u(rng), u(rng)})); break;
        case Space::disk: q.samples.push_back(PhasePoint::disk(std::sqrt(u(rng)), 6.28 * u(rng))); break;
        default: break;
      }
    }
    for (std::int64_t n : {1, 3, 5}) {
      q.n = n;
      for (double eps : {0.05, 0.2}) {
        q.epsilon = eps;
        for (bool strict : {true, false}) {
          q.strict = strict;
          EXPECT_EQ(separated_count(q).count, brute_greedy(*f, q.samples, n, eps, strict)) << id << " n=" << n;
        }
      }
    }
  }
}

TEST(SeparatedCount, AntitoneInEpsilonMonotoneInSamples) {
  const auto f = maps::make_system("tripling");
  SeparationQuery q;
  q.system = f;
  q.n = 4;
  for (int i = 0; i < 2000; ++i) q.samples.push_back(PhasePoint::circle(i / 2000.0));
  std::uint64_t prev = ~0ull;
  for (double eps : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    q.epsilon = eps;
    const auto c = separated_count(q).count;
    EXPECT_LE(c, prev);
    prev = c;
  }
  const BallSpec small(PhasePoint::circle(0.3), 0.05), big(PhasePoint::circle(0.3), 0.1);
  for (std::int64_t n = 2; n <= 8; ++n)
    EXPECT_LE(ball_separated_count(*f, small, n, 0.01).count, ball_separated_count(*f, big, n, 0.01).count);
}

TEST(SeparatedCount, TriplingRateNearLogThree) {
  const auto f = maps::make_system("tripling");
  const BallSpec whole(PhasePoint::circle(0.0), 0.5, true);
  BallCountOptions o;
  o.sample_cap = 200'000'000;
  double prev = 0;
  for (std::int64_t n = 8; n <= 12; ++n) {
    const double lc = std::log(static_cast<double>(ball_separated_count(*f, whole, n, 0.01, o).count));
    if (n > 8) EXPECT_NEAR(lc - prev, std::log(3.0), 0.05 * std::log(3.0));
    prev = lc;
  }
}

TEST(SeparatedCount, LatticeShortcutAgreesWithKernel) {
  const auto cat = maps::make_system("cat");
  const BallSpec ball(PhasePoint::torus({0.3, 0.7}), 0.2, true);
  BallCountOptions fast, slow;
  slow.lattice_shortcut = false;
  for (std::int64_t n = 5; n <= 8; ++n) {
    const double a = static_cast<double>(ball_separated_count(*cat, ball, n, 0.05, fast).count);
    const double b = static_cast<double>(ball_separated_count(*cat, ball, n, 0.05, slow).count);
    // different sample sets; the counts agree once eps-cells are long and thin
    EXPECT_NEAR(a / b, 1.0, 0.02) << n;
  }
}

TEST(SeparatedCount, ArcShortcutAgreesWithKernel) {
  BallCountOptions fast, slow;
  slow.arc_shortcut = false;
  for (const char* id : {"tripling", "g3branch"}) {
    const auto f = maps::make_system(id);
    for (const auto& K : {BallSpec(PhasePoint::circle(0.0), 0.5, true), BallSpec(PhasePoint::circle(0.93), 0.1, true),
                          BallSpec(PhasePoint::circle(0.4), 0.03, false)})
      for (std::int64_t n : {1, 4, 7})
        for (double eps : {0.05, 0.013})
          for (bool strict : {true, false}) {
            fast.strict = slow.strict = strict;
            EXPECT_EQ(ball_separated_count(*f, K, n, eps, fast).count, ball_separated_count(*f, K, n, eps, slow).count)
                << id << " n=" << n << " eps=" << eps;
          }
  }
}

TEST(SeparatedCount, ResolutionWarning) {
  SeparationQuery q;
  q.system = maps::make_system("tripling");
  q.samples = {PhasePoint::circle(0.1), PhasePoint::circle(0.2)};
  q.n = 6;
  q.epsilon = 0.01;
  q.resolution = 0.1;
  EXPECT_FALSE(separated_count(q).warnings.empty());
}

TEST(SeparatedCount, OverBudgetNamesTheCap) {
  BallCountOptions o;
  o.sample_cap = 1000;
  EXPECT_THROW(ball_separated_count(*maps::make_system("tripling"), BallSpec(PhasePoint::circle(0.0), 0.5), 12, 0.01, o),
               BudgetExceeded);
}
