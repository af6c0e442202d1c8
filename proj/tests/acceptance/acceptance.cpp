// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "translocal/entropy.hpp"
#include "translocal/errors.hpp"
#include "translocal/measures.hpp"
#include "translocal/pressure.hpp"
#include "translocal/symbolic.hpp"

using namespace translocal;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double v, double want) { return std::fabs(want) < 1e-12 ? std::fabs(v) : std::fabs(v - want) / std::fabs(want); }

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

struct Outcome {
  bool ok = true;
  std::string detail;
  void check(bool c, const std::string& what) {
    ok = ok && c;
    if (!detail.empty()) detail += "; ";
    detail += what + (c ? "" : " [x]");
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("error: ") + e.what();
  }
  if (!o.ok) ++failures;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

// Seeded candidate whose finite-time exponents over k in [n/2, n] all sit
// within 5% of lambda: typical for the horizon the estimator can see.
PhasePoint typical_point(const maps::System& sys, double lambda, std::int64_t n) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const auto z = PhasePoint::circle(u(rng));
    try {
      const auto l = entropy::lyapunov_exponent(sys, z, n);
      if (rel(l.upper, lambda) <= 0.05 && rel(l.lower, lambda) <= 0.05) return z;
    } catch (const SingularOrbit&) {
    }
  }
  throw ContractViolation("no typical point among 10000 candidates");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const auto tripling = maps::make_system("tripling");
  const auto deflt = entropy::Schedule::defaults();

  criterion(1, "tripling translocal entropy, 5 random z per omega", [&](Outcome& o) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double w : {0.0, 0.25, 0.5, 0.75}) {
      const auto t0 = std::chrono::steady_clock::now();
      const double want = std::max(0.0, 1.0 - w / kLog3) * kLog3;
      double worst = 0;
      for (int i = 0; i < 5; ++i) {
        const auto e = entropy::translocal_entropy(*tripling, PhasePoint::circle(u(rng)), w, deflt);
        worst = std::max({worst, rel(e.upper.value, want), rel(e.lower.value, want)});
      }
      const double dt = seconds_since(t0);
      o.check(worst <= 0.10 && dt <= 60.0, "w=" + num(w, 2) + " max rel err " + num(worst) + " in " + num(dt, 1) + "s");
    }
  });

  criterion(2, "circle-map theorem on g, omega=0.6", [&](Outcome& o) {
    const auto g = maps::make_system("g3branch");
    const double w = 0.6;
    const auto check_at = [&](const PhasePoint& z, double lambda, const std::string& tag) {
      const double want = (1.0 - w / lambda) * kLog3;
      const auto e = entropy::translocal_entropy(*g, z, w, deflt);
      o.check(rel(e.upper.value, want) <= 0.12,
              tag + " " + num(e.upper.value) + " vs " + num(want) + " (lower " + num(e.lower.value) + ")");
    };
    check_at(PhasePoint::circle(2.0 / 3), std::log(4.0), "z=2/3");
    const double lam = 1.5 * kLog2;
    const auto z = typical_point(*g, lam, deflt.n.back());
    check_at(z, lam, "typical z=" + num(z.coord(0)));
  });

  criterion(3, "Pomeau-Manneville neutral point, omega=0.5", [&](Outcome& o) {
    const auto e = entropy::translocal_entropy(*maps::make_system("pomeau-manneville"), PhasePoint::interval(0.0), 0.5,
                                               deflt);
    o.check(e.upper.value <= 0.05, "upper " + num(e.upper.value) + " <= 0.05");
  });

  criterion(4, "square-root map at 0, omega=1", [&](Outcome& o) {
    const auto e = entropy::translocal_entropy(*maps::make_system("sqrtmap"), PhasePoint::interval(0.0), 1.0, deflt);
    o.check(rel(e.upper.value, kLog2) <= 0.10, num(e.upper.value) + " vs log 2, rel err " + num(rel(e.upper.value, kLog2)));
  });

  criterion(5, "toral formula on the cat map", [&](Outcome& o) {
    const auto cat = maps::make_system("cat");
    // the default n-window is pre-asymptotic for the cat map
    const auto sched = entropy::Schedule::make(10, 17, {0.1, 0.05}, 5'000'000);
    const auto eig = maps::toral_eigen_data(*cat);
    for (double w : {0.3, 1.2}) {
      const double want = entropy::toral_translocal(eig, w);
      const auto e = entropy::translocal_entropy(*cat, PhasePoint::torus({0.3, 0.6}), w, sched);
      o.check(rel(e.upper.value, want) <= 0.15, "w=" + num(w, 1) + " " + num(e.upper.value) + " vs " + num(want));
    }
  });

  criterion(6, "staircase entropy function", [&](Outcome& o) {
    const auto st = maps::make_system("staircase");
    // eps below the lap width of each level
    const auto sched = entropy::Schedule::make(3, 7, {0.01, 0.005});
    const double a = entropy::yz_entropy_function(*st, PhasePoint::interval(0.75), {0.05, 0.02}, sched).value;
    const double b = entropy::yz_entropy_function(*st, PhasePoint::interval(0.3), {0.05, 0.02}, sched).value;
    o.check(rel(a, kLog3) <= 0.10, "x=0.75 " + num(a) + " vs log 3");
    o.check(rel(b, std::log(5.0)) <= 0.10, "x=0.3 " + num(b) + " vs log 5");
  });

  criterion(7, "Brin-Katok local entropy", [&](Outcome& o) {
    const auto sched = entropy::Schedule::make(4, 14, {0.05, 0.02, 0.01});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const auto r = measures::brin_katok(*tripling, measures::Measure::lebesgue_circle(), PhasePoint::circle(u(rng)), sched);
      worst = std::max({worst, rel(r.upper.value, kLog3), rel(r.lower.value, kLog3)});
    }
    o.check(worst <= 0.05, "tripling 20 points, max rel err " + num(worst));
    std::vector<int> w(600);
    for (auto& c : w) c = static_cast<int>(rng() & 1u);
    const auto r = measures::brin_katok(*maps::make_system("fullshift:2"), measures::Measure::bernoulli({0.5, 0.5}),
                                        PhasePoint::word(w, 0, 600), sched);
    o.check(rel(r.upper.value, kLog2) <= 0.05 && rel(r.lower.value, kLog2) <= 0.05,
            "2-shift " + num(r.lower.value) + ".." + num(r.upper.value) + " vs log 2");
  });

  criterion(8, "topological pressure on the circle", [&](Outcome& o) {
    const auto Z = pressure::Region::whole(PhasePoint::circle(0.0));
    const auto c0 = pressure::CoverSet::bowen(*tripling, Z, maps::Potential::zero(), 0.05, 4, 8);
    const auto p0 = pressure::critical_exponent(c0, pressure::Variant::bowen_ball);
    o.check(p0.lo <= kLog3 && kLog3 <= p0.hi && p0.hi - p0.lo <= 0.1,
            "phi=0 P=" + num(p0.value) + " in [" + num(p0.lo) + ", " + num(p0.hi) + "]");
    const auto c1 = pressure::CoverSet::bowen(*tripling, Z, maps::Potential::geometric(1.0), 0.05, 4, 8);
    const auto p1 = pressure::critical_exponent(c1, pressure::Variant::bowen_ball);
    o.check(std::fabs(p1.value) <= 0.05, "geometric t=1 P=" + num(p1.value));
  });

  criterion(9, "translocal pressure, omega=0.7", [&](Outcome& o) {
    const auto c = pressure::CoverSet::translocal(*tripling, pressure::Region::whole(PhasePoint::circle(0.0)),
                                                  maps::Potential::zero(), 0.7, 4, 8);
    const auto up = pressure::critical_exponent(c, pressure::Variant::translocal_upper);
    const auto lo = pressure::critical_exponent(c, pressure::Variant::translocal_lower);
    o.check(std::fabs(up.value - 0.7) <= 0.05, "upper " + num(up.value));
    o.check(std::fabs(lo.value - 0.7) <= 0.05, "lower " + num(lo.value));
  });

  criterion(10, "Ma-Wen audits on tripling with Lebesgue", [&](Outcome& o) {
    const auto Z = pressure::Region::ball(BallSpec(PhasePoint::circle(0.3), 0.1));
    pressure::AuditOptions opts;
    opts.schedule = entropy::Schedule::make(4, 12, {0.05, 0.02});
    opts.tolerance = 0.1;
    for (const char* phi : {"zero", "constant:0.4"})
      for (std::optional<double> w : {std::optional<double>{}, std::optional<double>{0.7}}) {
        const auto rep = pressure::ma_wen_audit(*tripling, measures::Measure::lebesgue_circle(),
                                                maps::Potential::parse(phi), Z, w, 4, opts);
        const std::string tag = std::string(phi) + (w ? " omega=0.7" : " bowen");
        o.check(rep.passed, tag + " P=" + num(rep.upper_exponent.value) + " locals " + num(rep.min_lower) + ".." +
                                num(rep.max_upper));
      }
  });

  criterion(11, "Kraft solver and coded-shift entropies", [&](Outcome& o) {
    const double h = symbolic::kraft_entropy({1, 2}).h;
    o.check(std::fabs(h - std::log((1 + std::sqrt(5.0)) / 2)) <= 1e-9, "[1,2] h=" + num(h, 12));
    for (const char* id : {"linear:1,0", "linear:2,1", "linear:3,0", "geometric:1", "geometric:2", "factorial"}) {
      const double hk = symbolic::kraft_entropy(symbolic::CodeWordFamily::parse(id), 1e-10).h;
      o.check(hk > 0 && hk < kLog2, std::string(id) + " h=" + num(hk, 6));
    }
  });

  criterion(12, "property suites", [&](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto light = entropy::Schedule::make(6, 10, {0.05, 0.02});
    auto slack = [](const entropy::RateEstimate& a, const entropy::RateEstimate& b) {
      auto t = [](const entropy::RateEstimate& e) { return std::isfinite(e.trend) ? std::fabs(e.trend) : 0.0; };
      return a.residual + b.residual + t(a) + t(b) + 1e-9;
    };
    const auto g = maps::make_system("g3branch");

    bool sandwich = true;
    for (double x : {0.2, 2.0 / 3}) {
      const auto yz = entropy::yz_entropy_function(*g, PhasePoint::circle(x), {0.05, 0.02}, light);
      for (double w : {0.0, 0.4, 0.8}) {
        const auto e = entropy::translocal_entropy(*g, PhasePoint::circle(x), w, light);
        sandwich = sandwich && e.lower.value >= 0 && e.lower.value <= e.upper.value + slack(e.lower, e.upper) &&
                   e.upper.value <= yz.value + slack(e.upper, yz);
      }
    }
    o.check(sandwich, "sandwich");

    bool mono = true;
    entropy::RateEstimate prev;
    for (int i = 0; i < 8; ++i) {
      const auto e = entropy::translocal_entropy(*g, PhasePoint::circle(0.1), 0.15 * i, light).upper;
      if (i > 0) mono = mono && e.value <= prev.value + slack(e, prev);
      prev = e;
    }
    o.check(mono, "omega-monotone");

    const double one = entropy::translocal_entropy(*tripling, PhasePoint::circle(0.3), 0.5, light).upper.value;
    const double two = entropy::translocal_entropy(*maps::make_system("iterate:2:tripling"), PhasePoint::circle(0.3), 1.0,
                                                   entropy::Schedule::make(3, 5, {0.05, 0.02}))
                           .upper.value;
    o.check(rel(two, 2 * one) <= 0.10, "iterate R=2 " + num(two) + " vs " + num(2 * one));
    const double prod = entropy::translocal_entropy(*maps::make_system("toral:[[3,0],[0,3]]"), PhasePoint::torus({0.3, 0.6}),
                                                    0.5, entropy::Schedule::make(4, 7, {0.05, 0.02}))
                            .upper.value;
    o.check(rel(prod, 2 * one) <= 0.15, "product " + num(prod) + " vs " + num(2 * one));

    const auto Z = pressure::Region::whole(PhasePoint::circle(0.0));
    const auto covers = pressure::CoverSet::bowen(*tripling, Z, maps::Potential::zero(), 0.05, 4, 8);
    bool nmono = true;
    for (double s = 0.0; s <= 2.0; s += 0.1)
      for (std::int64_t N = 4; N < 8; ++N) nmono = nmono && covers.log_weight(s, N + 1) >= covers.log_weight(s, N) - 1e-12;
    o.check(nmono, "N-monotone cover weights");
    pressure::CoverOptions co;
    co.horizon = 7;
    bool rmono = true;
    for (double s : {0.5, kLog3, 1.5}) {
      double last = std::numeric_limits<double>::infinity();
      for (double r : {0.02, 0.05, 0.1, 0.2}) {
        const double w = pressure::cover_weight(*tripling, Z, maps::Potential::zero(), s, r, 4, co).log_value;
        rmono = rmono && w <= last + 1e-12;
        last = w;
      }
    }
    o.check(rmono, "r-antitone cover weights");

    bool axioms = true;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto rnd = [&](Space s) {
      switch (s) {
        case Space::circle: return PhasePoint::circle(u(rng));
        case Space::torus: return PhasePoint::torus({u(rng), u(rng)});
        case Space::interval: return PhasePoint::interval(u(rng));
        case Space::disk: return PhasePoint::disk(std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
        case Space::symbolic: break;
      }
      std::vector<int> w(30);
      for (auto& c : w) c = u(rng) < 0.7 ? 0 : 1;
      return PhasePoint::word(std::move(w), 0, 30);
    };
    for (Space s : {Space::circle, Space::torus, Space::interval, Space::disk, Space::symbolic}) {
      const auto m = MetricSpec::for_space(s, s == Space::torus ? 2 : 1);
      for (int i = 0; i < 10000; ++i) {
        const auto a = rnd(s), b = rnd(s), c = rnd(s);
        const double ab = distance(a, b, m);
        axioms = axioms && ab >= 0 && ab == distance(b, a, m) && distance(a, a, m) <= 1e-12 &&
                 ab <= distance(a, c, m) + distance(c, b, m) + 1e-12;
      }
    }
    o.check(axioms, "metric axioms");
    const double dt = seconds_since(t0);
    o.check(dt <= 900.0, "runtime " + num(dt, 1) + "s <= 900s");
  });

  std::printf("%d of 12 criteria failed; total %.1fs\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
