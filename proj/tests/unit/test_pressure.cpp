#include <gtest/gtest.h>

#include <cmath>

#include "translocal/errors.hpp"
#include "translocal/measures.hpp"
#include "translocal/pressure.hpp"

using namespace translocal;
using namespace translocal::pressure;

namespace {

const double kLog3 = std::log(3.0);

const maps::System& tripling() {
  static const auto f = maps::make_system("tripling");
  return *f;
}

Region circle() { return Region::whole(PhasePoint::circle(0.0)); }

// One shared cover set: Z = S^1, phi = 0, r = 0.05, N in 4..8.
const CoverSet& circle_covers() {
  static const CoverSet c = CoverSet::bowen(tripling(), circle(), maps::Potential::zero(), 0.05, 4, 8);
  return c;
}

}  // namespace

TEST(CoverWeight, AboveAndBelowTheCriticalValue) {
  const auto& c = circle_covers();
  EXPECT_LT(c.weight(kLog3 + 0.2, 8).value, 1.0);
  EXPECT_GT(c.weight(kLog3 - 0.2, 8).value, 1.0);
  for (std::int64_t N = 4; N < 8; ++N) {
    EXPECT_GT(c.log_weight(kLog3 - 0.2, N + 1), c.log_weight(kLog3 - 0.2, N));
    EXPECT_LE(c.log_weight(kLog3 + 0.2, N + 1), c.log_weight(kLog3 + 0.2, N) + 1e-9);
  }
}

TEST(CoverWeight, NonDecreasingInN) {
  const auto& c = circle_covers();
  for (double s = 0.0; s <= 2.0; s += 0.1)
    for (std::int64_t N = 4; N < 8; ++N) EXPECT_GE(c.log_weight(s, N + 1), c.log_weight(s, N) - 1e-12) << s << " " << N;
}

TEST(CoverWeight, AntitoneInR) {
  CoverOptions o;
  o.horizon = 7;
  for (double s : {0.5, kLog3, 1.5}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.02, 0.05, 0.1, 0.2}) {
      const double w = cover_weight(tripling(), circle(), maps::Potential::zero(), s, r, 4, o).log_value;
      EXPECT_LE(w, prev + 1e-12) << s << " " << r;
      prev = w;
    }
  }
}

TEST(CoverWeight, SinglePoint) {
  const auto Z = Region::point(PhasePoint::circle(0.3));
  for (double s : {0.1, 1.0, 3.0})
    for (std::int64_t N : {2, 5, 9}) {
      const auto w = cover_weight(tripling(), Z, maps::Potential::zero(), s, 0.05, N);
      EXPECT_LE(w.log_value, -s * N + 1e-12);
    }
}

TEST(CriticalExponent, TriplingCircle) {
  const auto p = critical_exponent(circle_covers(), Variant::bowen_ball);
  EXPECT_NEAR(p.value, kLog3, 0.1);
  EXPECT_LE(p.s_lo, p.value);
  EXPECT_GE(p.s_hi, p.value);
  EXPECT_LE(p.s_hi - p.s_lo, 0.1);
}

TEST(CriticalExponent, RefinedGridStaysInsideTheBracket) {
  const auto& c = circle_covers();
  std::vector<double> coarse, fine;
  for (double s = 0.0; s <= 2.01; s += 0.5) coarse.push_back(s);
  const auto a = critical_exponent(c, Variant::bowen_ball, coarse, 0.2);
  for (double s = a.s_lo; s <= a.s_hi + 1e-12; s += 0.05) fine.push_back(s);
  const auto b = critical_exponent(c, Variant::bowen_ball, fine, 0.01);
  EXPECT_GE(b.s_lo, a.s_lo - 1e-12);
  EXPECT_LE(b.s_hi, a.s_hi + 1e-12);
  EXPECT_LE(b.s_hi - b.s_lo, a.s_hi - a.s_lo);
  EXPECT_GE(b.value, b.s_lo);
  EXPECT_LE(b.value, b.s_hi);
}

TEST(CriticalExponent, UnbracketedGridThrows) {
  EXPECT_THROW(critical_exponent(circle_covers(), Variant::bowen_ball, {1.5, 2.0, 2.5}), Unbracketed);
}

TEST(CriticalExponent, StoredWeightGrid) {
  const auto& c = circle_covers();
  std::vector<CoverWeight> w;
  for (double s = 0.5; s <= 1.75; s += 0.25)
    for (std::int64_t N = 4; N <= 8; ++N) w.push_back(c.weight(s, N));
  const auto p = critical_exponent(w, Variant::bowen_ball);
  EXPECT_LE(p.s_lo, kLog3);
  EXPECT_GE(p.s_hi, kLog3);
}

TEST(Pressure, ConstantAndGeometricPotentials) {
  const auto shifted = CoverSet::bowen(tripling(), circle(), maps::Potential::constant(0.4), 0.05, 3, 6);
  const auto base = CoverSet::bowen(tripling(), circle(), maps::Potential::zero(), 0.05, 3, 6);
  // shifting phi by c shifts every weight exactly
  for (double s : {0.8, 1.2, 1.6})
    for (std::int64_t N = 3; N <= 6; ++N)
      EXPECT_NEAR(shifted.log_weight(s + 0.4, N), base.log_weight(s, N), 1e-9 * (1 + std::fabs(base.log_weight(s, N))));
  const double p0 = critical_exponent(base, Variant::bowen_ball).value;
  EXPECT_NEAR(critical_exponent(shifted, Variant::bowen_ball).value, p0 + 0.4, 0.03);
  const auto geo = CoverSet::bowen(tripling(), circle(), maps::Potential::geometric(1.0), 0.05, 3, 6);
  EXPECT_NEAR(critical_exponent(geo, Variant::bowen_ball).value, 0.0, 0.05);
}

TEST(TranslocalPressure, CriticalExponentIsOmega) {
  for (double w : {0.3, 0.7, 1.2}) {
    // ceil(e^{wn}/2) is far from e^{wn}/2 until wn is about 3
    const std::int64_t N0 = w < 0.5 ? 8 : 4;
    const auto c = CoverSet::translocal(tripling(), circle(), maps::Potential::zero(), w, N0, 2 * N0);
    const auto up = critical_exponent(c, Variant::translocal_upper);
    EXPECT_NEAR(up.value, w, std::max(0.05, up.s_hi - up.s_lo)) << w;
    EXPECT_LT(c.weight(w + 0.1, 2 * N0).log_value, c.weight(w + 0.1, N0).log_value + 1e-9);
    EXPECT_GT(c.weight(w - 0.1, 2 * N0).log_value, c.weight(w - 0.1, N0).log_value);
  }
}

TEST(TranslocalPressure, UnionIsTheMaximum) {
  const double w = 0.7;
  Region a = Region::point(PhasePoint::circle(0.9));
  Region b = Region::ball(BallSpec(PhasePoint::circle(0.2), 0.05));
  Region c = Region::ball(BallSpec(PhasePoint::circle(0.6), 0.1));
  Region all = a;
  all.add(b.balls[0]).add(c.balls[0]);
  auto P = [&](const Region& Z) {
    return critical_exponent(CoverSet::translocal(tripling(), Z, maps::Potential::zero(), w, 4, 8),
                             Variant::translocal_upper);
  };
  const auto pa = P(a), pb = P(b), pc = P(c), pall = P(all);
  EXPECT_NEAR(pa.value, 0.0, 0.05);
  const double mx = std::max({pa.value, pb.value, pc.value});
  EXPECT_NEAR(pall.value, mx, std::max(0.02, pall.s_hi - pall.s_lo));
  // subsets never exceed the union
  EXPECT_LE(pb.value, pall.value + (pall.s_hi - pall.s_lo));
}

TEST(Audit, DiracAtAFixedPoint) {
  const auto p = PhasePoint::circle(0.0);
  AuditOptions o;
  o.schedule = entropy::Schedule::make(4, 10, {0.05, 0.02});
  const auto rep = ma_wen_audit(tripling(), measures::Measure::dirac(p), maps::Potential::zero(), Region::point(p),
                                std::nullopt, 1, o);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.max_upper, 0.0, 1e-9);
  EXPECT_NEAR(rep.upper_exponent.value, 0.0, 0.05);
}

TEST(Audit, TranslocalTriplingLebesgue) {
  AuditOptions o;
  o.schedule = entropy::Schedule::make(4, 10, {0.05, 0.02});
  const auto rep = ma_wen_audit(tripling(), measures::Measure::lebesgue_circle(), maps::Potential::zero(), circle(), 0.7,
                                4, o);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.upper_exponent.value, 0.7, 0.05);
}

TEST(Audit, RejectsUncertifiedPairs) {
  EXPECT_THROW(ma_wen_audit(*maps::make_system("pomeau-manneville"), measures::Measure::lebesgue_circle(),
                            maps::Potential::zero(), Region::ball(BallSpec(PhasePoint::interval(0.3), 0.1)),
                            std::nullopt, 2),
               ContractViolation);
}

TEST(RegionSamples, DeterministicAndInside) {
  Region Z = Region::ball(BallSpec(PhasePoint::circle(0.3), 0.1));
  Z.add(BallSpec(PhasePoint::circle(0.8), 0.05)).add(PhasePoint::circle(0.55));
  const auto a = region_samples(tripling(), Z, 20), b = region_samples(tripling(), Z, 20);
  ASSERT_EQ(a.size(), 20u);
  EXPECT_NEAR(a[0].coord(0), 0.55, 1e-15);
  const auto m = tripling().metric();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].coord(0), b[i].coord(0));
    if (i > 0) EXPECT_TRUE(Z.balls[0].contains(a[i], m) || Z.balls[1].contains(a[i], m));
  }
}
