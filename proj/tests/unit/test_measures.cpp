#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "translocal/entropy.hpp"
#include "translocal/errors.hpp"
#include "translocal/measures.hpp"

using namespace translocal;
using namespace translocal::measures;

namespace {

const double kLog3 = std::log(3.0);

entropy::Schedule sched() { return entropy::Schedule::make(4, 12, {0.05, 0.02}); }

}  // namespace

TEST(BallMeasure, ClosedForms) {
  EXPECT_NEAR(ball_measure(Measure::lebesgue_circle(), BallSpec(PhasePoint::circle(0.5), 0.1)), 0.2, 1e-15);
  EXPECT_NEAR(ball_measure(Measure::lebesgue_circle(), BallSpec(PhasePoint::circle(0.0), 0.7)), 1.0, 1e-15);
  EXPECT_NEAR(ball_measure(Measure::bernoulli({0.5, 0.5}), BallSpec(PhasePoint::word({0, 1, 1, 0, 1, 0, 0}), std::exp(-5.0), true)),
              std::pow(2.0, -5), 1e-12);
  EXPECT_EQ(ball_measure(Measure::dirac(PhasePoint::circle(0.3)), BallSpec(PhasePoint::circle(0.32), 0.05)), 1.0);
  EXPECT_EQ(ball_measure(Measure::dirac(PhasePoint::circle(0.3)), BallSpec(PhasePoint::circle(0.5), 0.05)), 0.0);
  EXPECT_NEAR(ball_measure(Measure::lebesgue_torus(), BallSpec(PhasePoint::torus({0.1, 0.9}), 0.1)), 0.04, 1e-12);
}

TEST(BowenBallMeasure, TriplingClosedForm) {
  const auto f = maps::make_system("tripling");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const auto x = PhasePoint::circle(u(rng));
    for (std::int64_t n : {1, 3, 8}) {
      const auto m = bowen_ball_measure(*f, Measure::lebesgue_circle(), x, n, 0.01);
      EXPECT_TRUE(m.exact);
      EXPECT_NEAR(m.value, 0.02 * std::pow(3.0, -(n - 1.0)), 1e-12 * std::pow(3.0, -(n - 1.0)));
    }
  }
}

TEST(BowenBallMeasure, NOneIsTheBall) {
  const auto g = maps::make_system("g3branch");
  const auto x = PhasePoint::circle(0.41);
  EXPECT_NEAR(bowen_ball_measure(*g, Measure::lebesgue_circle(), x, 1, 0.03).value,
              ball_measure(Measure::lebesgue_circle(), BallSpec(x, 0.03)), 1e-15);
}

TEST(BowenBallMeasure, DiracAtAFixedPoint) {
  const auto f = maps::make_system("tripling");
  const auto p = PhasePoint::circle(0.5);
  for (std::int64_t n : {1, 5, 20})
    for (double eps : {0.001, 0.1}) EXPECT_EQ(bowen_ball_measure(*f, Measure::dirac(p), p, n, eps).value, 1.0);
}

TEST(BowenBallMeasure, CatMapPolygonMatchesSampling) {
  const auto cat = maps::make_system("cat");
  const auto x = PhasePoint::torus({0.3, 0.55});
  const auto exact = bowen_ball_measure(*cat, Measure::lebesgue_torus(), x, 3, 0.05);
  EXPECT_TRUE(exact.exact);
  // Monte Carlo oracle
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  int hits = 0;
  const int N = 400000;
  for (int i = 0; i < N; ++i) {
    std::vector<double> y{x.coord(0) + u(rng), x.coord(1) + u(rng)}, z{x.coord(0), x.coord(1)};
    bool in = true;
    for (int j = 0; j < 3 && in; ++j) {
      if (j > 0) cat->step(y), cat->step(z);
      for (int c = 0; c < 2; ++c) {
        double d = std::fabs(y[c] - z[c]);
        d -= std::floor(d);
        if (std::min(d, 1 - d) >= 0.05) in = false;
      }
    }
    hits += in;
  }
  const double mc = 0.01 * hits / N;
  EXPECT_NEAR(exact.value, mc, 4 * std::sqrt(mc * 0.01 / N) + 1e-7);
}

TEST(BrinKatok, TriplingLebesgue) {
  const auto f = maps::make_system("tripling");
  for (double x : {0.1, 0.37, 0.81}) {
    const auto r = brin_katok(*f, Measure::lebesgue_circle(), PhasePoint::circle(x), sched());
    EXPECT_NEAR(r.upper.value, kLog3, 0.05 * kLog3);
    EXPECT_NEAR(r.lower.value, kLog3, 0.05 * kLog3);
    EXPECT_GE(r.upper.value, r.lower.value);
  }
}

TEST(BrinKatok, BernoulliShift) {
  std::mt19937_64 rng(5);
  std::vector<int> w(400);
  for (auto& c : w) c = static_cast<int>(rng() & 1);
  const auto r = brin_katok(*maps::make_system("fullshift:2"), Measure::bernoulli({0.5, 0.5}), PhasePoint::word(w, 0, 400),
                            sched());
  EXPECT_NEAR(r.upper.value, std::log(2.0), 0.05 * std::log(2.0));
  EXPECT_NEAR(r.lower.value, std::log(2.0), 0.05 * std::log(2.0));
}

TEST(BrinKatok, DiracIsZero) {
  const auto p = PhasePoint::circle(0.0);
  const auto r = brin_katok(*maps::make_system("tripling"), Measure::dirac(p), p, sched());
  EXPECT_NEAR(r.upper.value, 0.0, 1e-12);
}

TEST(LocalPressure, PotentialShifts) {
  const auto f = maps::make_system("tripling");
  const auto x = PhasePoint::circle(0.2718);
  const auto mu = Measure::lebesgue_circle();
  const auto zero = local_pressure(*f, mu, maps::Potential::zero(), x, sched());
  const auto bk = brin_katok(*f, mu, x, sched());
  // same code path
  EXPECT_EQ(zero.upper.value, bk.upper.value);
  EXPECT_EQ(zero.lower.value, bk.lower.value);
  for (double c : {-0.7, 0.4, 2.0}) {
    const auto p = local_pressure(*f, mu, maps::Potential::constant(c), x, sched());
    EXPECT_NEAR(p.upper.value, zero.upper.value + c, 1e-9);
    EXPECT_NEAR(p.lower.value, zero.lower.value + c, 1e-9);
  }
  EXPECT_NEAR(local_pressure(*f, mu, maps::Potential::geometric(1.0), x, sched()).upper.value, 0.0, 0.05);
}

TEST(TranslocalLocalPressure, BallMeasureRates) {
  const auto f = maps::make_system("tripling");
  const auto mu = Measure::lebesgue_circle();
  const auto x = PhasePoint::circle(0.6);
  const auto r = translocal_local_pressure(*f, mu, maps::Potential::zero(), x, 0.7, sched());
  EXPECT_NEAR(r.upper.value, 0.7, 0.01);
  EXPECT_NEAR(r.lower.value, 0.7, 0.01);
  const auto c = translocal_local_pressure(*f, mu, maps::Potential::constant(0.4), x, 0.7, sched());
  EXPECT_NEAR(c.upper.value, r.upper.value + 0.4, 1e-9);
  std::vector<int> w(400, 0);
  for (int i = 0; i < 400; i += 3) w[i] = 1;
  const auto s = translocal_local_pressure(*maps::make_system("fullshift:2"), Measure::bernoulli({0.5, 0.5}),
                                           maps::Potential::zero(), PhasePoint::word(w, 0, 400), 1.0, sched());
  EXPECT_NEAR(s.upper.value, std::log(2.0), 0.05 * std::log(2.0));
}

TEST(MaWenEntropyForm, BrinKatokBracketsRestrictedEntropy) {
  const auto f = maps::make_system("tripling");
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 50; ++i) {
    const auto r = brin_katok(*f, Measure::lebesgue_circle(), PhasePoint::circle(u(rng)), sched());
    lo = std::min(lo, r.lower.value);
    hi = std::max(hi, r.upper.value);
    EXPECT_NEAR(r.upper.value, kLog3, 0.05 * kLog3);
  }
  const double h = entropy::restricted_entropy(*f, BallSpec(PhasePoint::circle(0.0), 0.5, true),
                                               entropy::Schedule::make(6, 10, {0.05, 0.02}))
                       .value;
  EXPECT_GE(h, 0.9 * lo);
  EXPECT_LE(h, 1.1 * hi);
}

TEST(Certification, Whitelist) {
  EXPECT_TRUE(certified_invariant(*maps::make_system("tripling"), Measure::lebesgue_circle()));
  EXPECT_TRUE(certified_invariant(*maps::make_system("g3branch"), Measure::lebesgue_circle()));
  EXPECT_TRUE(certified_invariant(*maps::make_system("cat"), Measure::lebesgue_torus()));
  EXPECT_TRUE(certified_invariant(*maps::make_system("fullshift:2"), Measure::bernoulli({0.5, 0.5})));
  EXPECT_TRUE(certified_invariant(*maps::make_system("tripling"), Measure::dirac(PhasePoint::circle(0.5))));
  EXPECT_FALSE(certified_invariant(*maps::make_system("tripling"), Measure::dirac(PhasePoint::circle(0.3))));
  EXPECT_FALSE(certified_invariant(*maps::make_system("pomeau-manneville"), Measure::lebesgue_circle()));
  EXPECT_LT(preimage_length_defect(dynamic_cast<const maps::PiecewiseMap&>(*maps::make_system("tripling"))), 1e-12);
}

TEST(MeasureIds, RoundTrip) {
  for (const char* id : {"lebesgue-circle", "lebesgue-torus:2", "bernoulli:0.5,0.5", "dirac:0.25"})
    EXPECT_EQ(Measure::parse(Measure::parse(id).id()).id(), Measure::parse(id).id());
  EXPECT_THROW(Measure::parse("bernoulli:0.5,0.6"), ConfigError);
  EXPECT_THROW(Measure::parse("gaussian"), ConfigError);
}
