#include "translocal/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "translocal/errors.hpp"

namespace translocal::entropy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Radii below this are not resolved by double-precision coordinates.
constexpr double kMinRadius = 1e-13;
constexpr double kSkipFactor = 1.5;

struct Fit {
  double slope, intercept;
};

Fit least_squares(const std::vector<std::pair<double, double>>& pts, std::size_t lo, std::size_t hi) {
  const double m = static_cast<double>(hi - lo);
  double sx = 0, sy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double dx = pts[i].first - mx;
    sxx += dx * dx;
    sxy += dx * (pts[i].second - my);
  }
  if (sxx <= 0) throw ContractViolation("growth_rate needs distinct n values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

bool finite_range(const std::vector<std::pair<double, double>>& pts, std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo; i < hi; ++i)
    if (!std::isfinite(pts[i].second)) return false;
  return true;
}

template <class T>
std::string fmt(T v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double ball_radius(double omega, std::int64_t n) { return std::exp(-omega * static_cast<double>(n)); }

RungData run_rung(const maps::System& sys, const Schedule& sched, double eps,
                  const std::function<BallSpec(std::int64_t)>& ball_for) {
  RungData rung{eps, {}, false};
  const auto opts = sched.options();
  double prev = 0, last = 0;
  for (std::int64_t n : sched.n) {
    // Skip cells whose sample count, extrapolated geometrically, would
    // overrun the budget anyway.
    if (prev > 0 && last > 0 && last * last / prev > kSkipFactor * static_cast<double>(opts.sample_cap)) {
      rung.truncated = true;
      break;
    }
    try {
      auto r = separated::ball_separated_count(sys, ball_for(n), n, eps, opts);
      rung.points.emplace_back(static_cast<double>(n), std::log(static_cast<double>(std::max<std::uint64_t>(r.count, 1))));
      prev = last;
      last = static_cast<double>(r.samples);
    } catch (const BudgetExceeded&) {
      rung.truncated = true;
      break;
    }
  }
  return rung;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::limsup ? "limsup" : "liminf"; }

RateEstimate growth_rate(std::vector<std::pair<double, double>> pts, Mode mode) {
  if (pts.size() < 3) throw ContractViolation("growth_rate needs at least 3 points, got " + fmt(pts.size()));
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  const std::size_t m = pts.size();
  const std::size_t tail = std::max<std::size_t>(3, (m + 1) / 2);
  const std::size_t start = m - tail;
  const std::size_t window = std::max<std::size_t>(3, tail - 1);

  RateEstimate out;
  out.mode = mode;
  out.n_min = static_cast<std::int64_t>(pts[start].first);
  out.n_max = static_cast<std::int64_t>(pts.back().first);

  double best = mode == Mode::limsup ? -kInf : kInf;
  for (std::size_t lo = start; lo + window <= m; ++lo) {
    double s = finite_range(pts, lo, lo + window) ? least_squares(pts, lo, lo + window).slope : kInf;
    best = mode == Mode::limsup ? std::max(best, s) : std::min(best, s);
  }
  out.value = out.raw = best;

  if (finite_range(pts, start, m)) {
    const Fit f = least_squares(pts, start, m);
    double ss = 0;
    for (std::size_t i = start; i < m; ++i) {
      const double e = pts[i].second - (f.intercept + f.slope * pts[i].first);
      ss += e * e;
    }
    out.residual = std::sqrt(ss / static_cast<double>(tail));
  } else {
    out.residual = kInf;
  }
  out.data.assign(pts.begin() + static_cast<std::ptrdiff_t>(start), pts.end());
  return out;
}

RateEstimate ladder_rate(const std::vector<RungData>& rungs, Mode mode, bool clamp) {
  RateEstimate out;
  out.mode = mode;
  std::optional<RateEstimate> last, prev;
  const RungData* last_data = nullptr;
  for (const auto& data : rungs) {
    if (data.truncated) out.incomplete = true;
    if (data.points.size() < 3) {
      out.notes.push_back("eps=" + fmt(data.epsilon) + ": fewer than 3 cells within budget");
      continue;
    }
    RateEstimate est = growth_rate(data.points, mode);
    out.ladder.push_back({data.epsilon, est.value, est.residual, est.n_min, est.n_max});
    if (data.truncated)
      out.notes.push_back("eps=" + fmt(data.epsilon) + ": n-window cut at " + fmt(est.n_max) +
                          " by the sample budget");
    prev = std::move(last);
    last = std::move(est);
    last_data = &data;
  }
  if (!last) throw BudgetExceeded("no epsilon rung produced 3 cells within the sample budget", 0);
  out.raw = last->value;
  out.value = clamp ? std::max(0.0, last->value) : last->value;
  out.n_min = last->n_min;
  out.n_max = last->n_max;
  out.epsilon = last_data->epsilon;
  out.residual = last->residual;
  out.data = last_data->points;
  if (prev) out.trend = last->value - prev->value;
  return out;
}

Schedule Schedule::defaults() { return make(6, 14, {0.05, 0.02, 0.01}); }

Schedule Schedule::make(std::int64_t n_min, std::int64_t n_max, std::vector<double> eps, std::size_t budget) {
  Schedule s;
  for (std::int64_t n = n_min; n <= n_max; ++n) s.n.push_back(n);
  s.epsilon = std::move(eps);
  s.budget = budget;
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (n.empty()) throw ContractViolation("schedule has no n values");
  if (epsilon.empty()) throw ContractViolation("schedule has no epsilon values");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < 1) throw ContractViolation("schedule n values must be >= 1");
    if (i && n[i] <= n[i - 1]) throw ContractViolation("schedule n values must be ascending");
  }
  for (std::size_t i = 0; i < epsilon.size(); ++i) {
    if (!(epsilon[i] > 0)) throw ContractViolation("schedule epsilon values must be positive");
    if (i && epsilon[i] >= epsilon[i - 1]) throw ContractViolation("schedule epsilon values must be descending");
  }
  if (budget == 0) throw ContractViolation("schedule budget must be positive");
  if (!(theta > 0 && theta < 1)) throw ContractViolation("schedule theta must lie in (0,1)");
}

separated::BallCountOptions Schedule::options() const {
  separated::BallCountOptions o;
  o.strict = strict;
  o.theta = theta;
  o.sample_cap = budget;
  return o;
}

RateEstimate restricted_entropy(const maps::System& sys, const BallSpec& K, const Schedule& sched) {
  sched.validate();
  if (!(K.radius > 0)) throw ContractViolation("restricted_entropy needs a nonempty ball");
  std::vector<RungData> rungs;
  for (double eps : sched.epsilon) rungs.push_back(run_rung(sys, sched, eps, [&](std::int64_t) { return K; }));
  return ladder_rate(rungs, Mode::limsup, false);
}

RateEstimate yz_entropy_function(const maps::System& sys, const PhasePoint& x,
                                 const std::vector<double>& deltas, const Schedule& sched) {
  sched.validate();
  if (deltas.empty()) throw ContractViolation("delta ladder is empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0)) throw ContractViolation("delta values must be positive");
    if (i && deltas[i] >= deltas[i - 1]) throw ContractViolation("delta ladder must be descending");
  }
  std::vector<RungData> rungs;
  for (double eps : sched.epsilon) {
    RungData best{eps, {}, false};
    double best_value = kInf;
    bool truncated = false;
    for (double delta : deltas) {
      const BallSpec ball(x, delta, true);
      RungData d = run_rung(sys, sched, eps, [&](std::int64_t) { return ball; });
      truncated = truncated || d.truncated || d.points.size() < 3;
      if (d.points.size() < 3) continue;
      const double v = growth_rate(d.points, Mode::limsup).value;
      if (v < best_value) {
        best_value = v;
        best = std::move(d);
      }
    }
    best.truncated = truncated;
    rungs.push_back(std::move(best));
  }
  return ladder_rate(rungs, Mode::limsup, false);
}

TranslocalEstimate translocal_entropy(const maps::System& sys, const PhasePoint& z, double omega,
                                      const Schedule& sched) {
  sched.validate();
  if (!(omega >= 0) || !std::isfinite(omega)) throw ContractViolation("omega must be >= 0");

  // Drop n whose ball is below coordinate resolution.
  Schedule s = sched;
  std::vector<std::string> notes;
  if (sys.space() != Space::symbolic) {
    std::vector<std::int64_t> kept;
    for (std::int64_t n : sched.n)
      if (ball_radius(omega, n) >= kMinRadius) kept.push_back(n);
    if (kept.size() < sched.n.size()) {
      notes.push_back("n-window shrunk to n <= " + (kept.empty() ? std::string("none") : fmt(kept.back())) +
                      ": balls below coordinate resolution");
      if (kept.size() < 3)
        throw ContractViolation("omega too large: fewer than 3 n values with resolvable balls");
      s.n = std::move(kept);
    }
  }

  std::vector<RungData> rungs;
  for (double eps : s.epsilon)
    rungs.push_back(run_rung(sys, s, eps, [&](std::int64_t n) { return BallSpec(z, ball_radius(omega, n), true); }));
  TranslocalEstimate out{ladder_rate(rungs, Mode::limsup, true), ladder_rate(rungs, Mode::liminf, true)};
  for (auto* e : {&out.upper, &out.lower}) e->notes.insert(e->notes.begin(), notes.begin(), notes.end());
  return out;
}

LyapunovEstimate lyapunov_exponent(const maps::System& sys, const PhasePoint& x, std::int64_t n) {
  if (n < 1) throw ContractViolation("lyapunov_exponent needs n >= 1");
  if (sys.space() == Space::torus) {
    auto eig = maps::toral_eigen_data(sys);
    const double top = std::log(eig.front().modulus);
    return {top, top};
  }
  if (!sys.has_derivative()) throw ContractViolation("system '" + sys.id() + "' has no derivative rule");
  if (x.space() != sys.space()) throw ContractViolation("point does not belong to the system's space");
  std::vector<double> c(x.coords().begin(), x.coords().end());
  double sum = 0;
  LyapunovEstimate out{-kInf, kInf};
  const std::int64_t k0 = std::max<std::int64_t>(1, (n + 1) / 2);
  for (std::int64_t k = 1; k <= n; ++k) {
    sum += sys.log_abs_derivative(c);
    sys.step(c);
    if (k >= k0) {
      const double avg = sum / static_cast<double>(k);
      out.upper = std::max(out.upper, avg);
      out.lower = std::min(out.lower, avg);
    }
  }
  return out;
}

double toral_translocal(const std::vector<maps::EigenModulus>& eigs, double omega) {
  double s = 0;
  for (const auto& e : eigs) {
    const double l = std::log(e.modulus);
    if (l >= omega) s += e.multiplicity * (l - omega);
  }
  return s;
}

std::vector<std::pair<std::int64_t, double>> approach_rate(const maps::System& sys, const PhasePoint& u,
                                                           const PhasePoint& v, std::int64_t k_max) {
  if (k_max < 1) throw ContractViolation("approach_rate needs k_max >= 1");
  const MetricSpec m = sys.metric();
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(static_cast<std::size_t>(k_max));
  if (sys.space() == Space::symbolic) {
    if (u.space() != Space::symbolic || v.space() != Space::symbolic)
      throw ContractViolation("approach_rate needs symbolic points on a shift");
    const std::int64_t hu = u.horizon(), hv = v.horizon();
    if (hu <= k_max) throw ContractViolation("horizon of u is shorter than k_max");
    const double lb = std::log(m.beta);
    for (std::int64_t k = 1; k <= k_max; ++k) {
      // First disagreement between sigma^k u and v within the common horizon.
      const std::int64_t len = std::min(hu - k, hv);
      std::int64_t i = 0;
      while (i < len && u.symbol(k + i) == v.symbol(i)) ++i;
      const double rate = i == len ? kInf : static_cast<double>(i) * lb / static_cast<double>(k);
      out.emplace_back(k, rate);
    }
    return out;
  }
  PhasePoint p = u;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    p = sys.evaluate(p);
    const double d = distance(p, v, m);
    out.emplace_back(k, d <= 0 ? kInf : -std::log(d) / static_cast<double>(k));
  }
  return out;
}

}  // namespace translocal::entropy
