#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "translocal/errors.hpp"
#include "translocal/maps.hpp"

using namespace translocal;
using namespace translocal::maps;

TEST(Evaluate, ClosedForms) {
  EXPECT_NEAR(make_system("tripling")->evaluate(PhasePoint::circle(0.2)).coord(0), 0.6, 1e-15);
  EXPECT_NEAR(make_system("g3branch")->evaluate(PhasePoint::circle(0.6)).coord(0), 0.4, 1e-15);
  EXPECT_NEAR(make_system("pomeau-manneville")->evaluate(PhasePoint::interval(1.0 / 3)).coord(0), 0.5, 1e-15);
  EXPECT_NEAR(make_system("sqrtmap")->evaluate(PhasePoint::interval(0.32)).coord(0), 0.8, 1e-15);
}

TEST(Orbit, TriplingAndFixedPoint) {
  const auto o = orbit(*make_system("tripling"), PhasePoint::circle(0.1), 3);
  ASSERT_EQ(o.size(), 3u);
  EXPECT_NEAR(o[1].coord(0), 0.3, 1e-15);
  EXPECT_NEAR(o[2].coord(0), 0.9, 1e-14);
  for (const auto& p : orbit(*make_system("g3branch"), PhasePoint::circle(2.0 / 3), 5))
    EXPECT_NEAR(p.coord(0), 2.0 / 3, 1e-12);
  EXPECT_THROW(orbit(*make_system("tripling"), PhasePoint::circle(0.1), 0), ContractViolation);
}

TEST(Orbit, ShiftDropsTheFirstSymbol) {
  const auto o = orbit(*make_system("fullshift:2"), PhasePoint::word({1, 0, 1, 1, 0}), 2);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[1].symbol(0), 0);
  EXPECT_EQ(o[1].symbol(1), 1);
  EXPECT_EQ(o[1].symbol(2), 1);
}

TEST(LogDerivativeSum, ChainRule) {
  EXPECT_NEAR(log_derivative_sum(*make_system("tripling"), PhasePoint::circle(0.123), 5), 5 * std::log(3.0), 1e-12);
  EXPECT_NEAR(log_derivative_sum(*make_system("g3branch"), PhasePoint::circle(2.0 / 3), 3), 3 * std::log(4.0), 1e-9);
  EXPECT_NEAR(log_derivative_sum(*make_system("pomeau-manneville"), PhasePoint::interval(0.0), 4), 0.0, 1e-15);
}

TEST(LogDerivativeSum, BranchEndpointIsSingular) {
  EXPECT_THROW(log_derivative_sum(*make_system("g3branch"), PhasePoint::circle(0.5), 2), SingularOrbit);
}

TEST(ToralEigenData, CatIdentityAndBlocks) {
  const auto cat = toral_eigen_data({{2, 1}, {1, 1}});
  ASSERT_EQ(cat.size(), 2u);
  EXPECT_NEAR(cat[0].modulus, (3 + std::sqrt(5.0)) / 2, 1e-12);
  EXPECT_NEAR(cat[1].modulus, (3 - std::sqrt(5.0)) / 2, 1e-12);
  const auto id = toral_eigen_data({{1, 0}, {0, 1}});
  ASSERT_EQ(id.size(), 1u);
  EXPECT_NEAR(id[0].modulus, 1.0, 1e-12);
  EXPECT_EQ(id[0].multiplicity, 2);
  const auto blk = toral_eigen_data({{2, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 2, 1}, {0, 0, 1, 1}});
  ASSERT_EQ(blk.size(), 2u);
  EXPECT_EQ(blk[0].multiplicity, 2);
  EXPECT_NEAR(blk[0].modulus, 2.618033988749895, 1e-9);
  EXPECT_NEAR(blk[1].modulus, 0.3819660112501051, 1e-9);
  double det = 1;
  for (const auto& e : blk) det *= std::pow(e.modulus, e.multiplicity);
  EXPECT_NEAR(det, 1.0, 1e-9);
}

TEST(ToralEigenData, RejectsBadMatrices) {
  EXPECT_THROW(toral_eigen_data({{2, 1}, {1}}), ContractViolation);
  EXPECT_THROW(toral_eigen_data({{2, 0.5}, {1, 1}}), ContractViolation);
  EXPECT_THROW(make_system("toral:[[2,1],[1,1.5]]"), ConfigError);
}

TEST(Catalogue, UnknownIdNamesTheId) {
  try {
    make_system("no-such-map");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("no-such-map"), std::string::npos);
  }
}

TEST(Catalogue, OrbitsStayInTheSpace) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* id : {"tripling", "g3branch", "pomeau-manneville", "sqrtmap", "staircase", "disk", "cat",
                         "identity", "iterate:2:tripling"}) {
    const auto sys = make_system(id);
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> x;
      switch (sys->space()) {
        case Space::circle: x = {u(rng)}; break;
        case Space::interval: x = {u(rng)}; break;
        case Space::torus: x = {u(rng), u(rng)}; break;
        case Space::disk: x = {std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng)}; break;
        case Space::symbolic: break;
      }
      for (int k = 0; k < 1000; ++k) sys->step(x);
      for (std::size_t j = 0; j < x.size(); ++j) {
        ASSERT_TRUE(std::isfinite(x[j])) << id;
        if (sys->space() == Space::disk && j == 1) {
          ASSERT_GE(x[j], 0.0);
          ASSERT_LT(x[j], 2 * std::numbers::pi);
        } else {
          ASSERT_GE(x[j], 0.0) << id;
          ASSERT_LE(x[j], 1.0) << id;
          if (sys->space() != Space::interval && sys->space() != Space::disk) ASSERT_LT(x[j], 1.0) << id;
        }
      }
    }
  }
}

TEST(Staircase, LevelsCarryTwoNPlusOneSurjectiveLaps) {
  const StaircaseMap st;
  for (int n = 1; n <= 6; ++n) {
    const double lo = std::ldexp(1.0, -n), hi = std::ldexp(1.0, 1 - n);
    const auto laps = st.laps(n);
    ASSERT_EQ(laps.size(), static_cast<std::size_t>(2 * n + 1));
    for (std::size_t i = 0; i < laps.size(); ++i) {
      const auto& l = laps[i];
      EXPECT_NEAR(i == 0 ? lo : laps[i - 1].hi, l.lo, 1e-15);
      const double a = st.apply(l.lo + 1e-13 * (hi - lo)), b = st.apply(l.hi);
      // monotone lap covering the whole level
      EXPECT_NEAR(std::min(a, b), lo, 1e-9 * (hi - lo) + 1e-12);
      EXPECT_NEAR(std::max(a, b), hi, 1e-9 * (hi - lo) + 1e-12);
    }
    EXPECT_NEAR(laps.back().hi, hi, 1e-15);
    for (int k = 1; k < 50; ++k) {
      const double x = lo + (hi - lo) * k / 50.0;
      EXPECT_EQ(st.level(st.apply(x)), n);
    }
  }
  EXPECT_EQ(st.apply(0.0), 0.0);
}

TEST(LebesgueInvariance, PreimageLengths) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* id : {"tripling", "g3branch"}) {
    const auto sys = make_system(id);
    const auto& pm = dynamic_cast<const PiecewiseMap&>(*sys);
    for (int t = 0; t < 1000; ++t) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      // preimage of [a, b] through each affine branch y = s x + c
      double total = 0;
      for (const auto& br : pm.branches()) {
        const double s = br.a;
        for (int shift = -4; shift <= 4; ++shift) {
          const double x0 = (a + shift - br.b) / s, x1 = (b + shift - br.b) / s;
          const double lo = std::max(br.lo, std::min(x0, x1)), hi = std::min(br.hi, std::max(x0, x1));
          if (hi > lo) total += hi - lo;
        }
      }
      ASSERT_NEAR(total, b - a, 1e-9) << id;
    }
  }
}

TEST(Potential, GeometricNeedsDerivative) {
  EXPECT_NO_THROW(Potential::geometric(1.0).check(*make_system("tripling")));
  EXPECT_THROW(Potential::geometric(1.0).check(*make_system("cat")), ContractViolation);
  EXPECT_NEAR(Potential::geometric(1.0)(*make_system("tripling"), PhasePoint::circle(0.3)), -std::log(3.0), 1e-15);
  EXPECT_EQ(Potential::parse("constant:0.4").id(), "constant:0.4");
}

TEST(Iterate, StepsRTimes) {
  const auto f2 = make_system("iterate:2:tripling");
  EXPECT_NEAR(f2->evaluate(PhasePoint::circle(0.1)).coord(0), 0.9, 1e-14);
  EXPECT_NEAR(f2->max_expansion(), 9.0, 1e-12);
}
