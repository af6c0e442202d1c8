#include "translocal/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "translocal/errors.hpp"
#include "translocal/separated.hpp"
#include "translocal/symbolic.hpp"

namespace translocal::pressure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSkipFactor = 1.5;
constexpr std::int64_t kSymbolHorizon = 4096;

// Running log(sum exp(x_i)).
struct LogSum {
  double m = -kInf, acc = 0.0;
  void add(double x) {
    if (x == -kInf) return;
    if (x <= m) {
      acc += std::exp(x - m);
    } else {
      acc = acc * std::exp(m - x) + 1.0;
      m = x;
    }
  }
  void merge(const LogSum& o) {
    if (o.m == -kInf) return;
    add(o.m + std::log(o.acc));
  }
  double value() const { return m == -kInf ? -kInf : m + std::log(acc); }
};

template <class T>
std::string fmt(T v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool constant_potential(const maps::Potential& phi) {
  return phi.kind() == maps::Potential::Kind::zero || phi.kind() == maps::Potential::Kind::constant;
}

double constant_value(const maps::Potential& phi) {
  return phi.kind() == maps::Potential::Kind::constant ? phi.parameter() : 0.0;
}

double birkhoff_raw(const maps::System& sys, const maps::Potential& phi, std::span<const double> x0, std::int64_t n) {
  if (constant_potential(phi)) return constant_value(phi) * static_cast<double>(n);
  std::vector<double> c(x0.begin(), x0.end());
  double s = 0.0;
  for (std::int64_t m = 0; m < n; ++m) {
    s += phi(sys, std::span<const double>(c));
    sys.step(c);
  }
  return s;
}

double lsq_slope(const std::vector<std::pair<double, double>>& pts) {
  const double m = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  double sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sxx += (x - sx / m) * (x - sx / m);
    sxy += (x - sx / m) * (y - sy / m);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

std::size_t metric_width(const maps::System& sys) { return sys.space() == Space::disk ? 2 : sys.dim(); }

// Ball radius in the metric, clipped to the diameter of the space.
double clipped_radius(const maps::System& sys, double r) {
  switch (sys.space()) {
    case Space::circle:
    case Space::torus: return std::min(r, 0.5);
    case Space::interval: return std::min(r, 1.0);
    case Space::disk: return std::min(r, 2.0);
    case Space::symbolic: return r;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------- regions

Region Region::ball(BallSpec b) {
  Region z;
  z.balls.push_back(std::move(b));
  return z;
}

Region Region::point(PhasePoint p) {
  Region z;
  z.points.push_back(std::move(p));
  return z;
}

Region Region::whole(const PhasePoint& center) { return ball(BallSpec(center, 1.0, true)); }

Region& Region::add(BallSpec b) {
  balls.push_back(std::move(b));
  return *this;
}

Region& Region::add(PhasePoint p) {
  points.push_back(std::move(p));
  return *this;
}

std::string Region::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < balls.size(); ++i)
    os << (i ? " u " : "") << (balls[i].closed ? "B[" : "B(") << measures::describe(balls[i].center) << "; "
       << balls[i].radius << (balls[i].closed ? "]" : ")");
  for (std::size_t i = 0; i < points.size(); ++i)
    os << (balls.empty() && i == 0 ? "" : " u ") << "{" << measures::describe(points[i]) << "}";
  return os.str();
}

void Region::check(const maps::System& sys) const {
  if (empty()) throw ContractViolation("region is empty");
  for (const auto& b : balls) {
    if (b.center.space() != sys.space()) throw ContractViolation("region ball outside the phase space of " + sys.id());
    if (!(b.radius > 0)) throw ContractViolation("region balls need a positive radius");
  }
  for (const auto& p : points)
    if (p.space() != sys.space()) throw ContractViolation("region point outside the phase space of " + sys.id());
}

std::string to_string(Family f) {
  switch (f) {
    case Family::uniform: return "uniform-n";
    case Family::refined: return "refined";
    case Family::vitali: return "vitali-pruned";
  }
  return "?";
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::bowen_ball: return "bowen-ball";
    case Variant::translocal_upper: return "translocal-upper";
    case Variant::translocal_lower: return "translocal-lower";
  }
  return "?";
}

// ---------------------------------------------------------------- covers

CoverSet CoverSet::bowen(const maps::System& sys, const Region& Z, const maps::Potential& phi, double r,
                         std::int64_t N_min, std::int64_t N_max, const CoverOptions& opts) {
  Z.check(sys);
  if (!(r > 0)) throw ContractViolation("cover radius must be positive");
  if (N_min < 1 || N_max < N_min) throw ContractViolation("cover orders need 1 <= N_min <= N_max");
  if (sys.space() != Space::symbolic) phi.check(sys);
  else if (!constant_potential(phi)) throw ContractViolation("only constant potentials are defined on shift spaces");

  CoverSet cs;
  cs.translocal_ = false;
  cs.scale_ = r;
  cs.potential_ = phi.id();
  cs.N_min_ = N_min;
  cs.N_max_ = N_max;
  const std::int64_t top = opts.horizon > 0 ? std::max(opts.horizon, N_max) : N_max + 4;
  // Greedy centers at r/(1+theta) leave every point of a ball within r of
  // a center, not only the samples.
  const double r_sep = r / (1.0 + opts.theta);
  separated::BallCountOptions bo;
  bo.strict = false;
  bo.theta = opts.theta;
  bo.sample_cap = opts.budget;

  std::vector<double> prev_samples(Z.balls.size(), 0.0), last_samples(Z.balls.size(), 0.0);
  for (std::int64_t n = N_min; n <= top; ++n) {
    Level lv{n, 0.0, 0, 0.0, 0, false, {}};
    LogSum sum;
    bool over = false;
    for (std::size_t b = 0; b < Z.balls.size() && !over; ++b) {
      if (prev_samples[b] > 0 && last_samples[b] * last_samples[b] / prev_samples[b] >
                                     kSkipFactor * static_cast<double>(opts.budget)) {
        over = true;
        break;
      }
      LogSum part;
      bo.on_admit = nullptr;
      if (!constant_potential(phi) || opts.keep_elements) {
        bo.on_admit = [&](std::span<const double> x0) {
          part.add(birkhoff_raw(sys, phi, x0, n));
          if (opts.keep_elements) lv.elements.push_back({PhasePoint::from_coords(sys.space(), x0), n});
        };
      }
      try {
        const auto res = separated::ball_separated_count(sys, Z.balls[b], n, r_sep, bo);
        lv.count_uniform += res.count;
        if (constant_potential(phi)) {
          part = LogSum{};
          part.add(std::log(static_cast<double>(res.count)) + constant_value(phi) * static_cast<double>(n));
        }
        prev_samples[b] = last_samples[b];
        last_samples[b] = static_cast<double>(res.samples);
      } catch (const BudgetExceeded&) {
        over = true;
        break;
      }
      sum.merge(part);
    }
    if (over) {
      if (n <= N_max)
        throw BudgetExceeded("Bowen-ball cover of order " + std::to_string(n) + " for " + sys.id(), opts.budget);
      cs.notes_.push_back("uniform covers stop at n=" + std::to_string(n - 1) + " (sample budget)");
      break;
    }
    for (const auto& p : Z.points) {
      sum.add(sys.space() == Space::symbolic ? constant_value(phi) * static_cast<double>(n)
                                             : birkhoff_raw(sys, phi, p.coords(), n));
      ++lv.count_uniform;
      if (opts.keep_elements) lv.elements.push_back({p, n});
    }
    lv.log_sum_uniform = sum.value();
    cs.levels_.push_back(std::move(lv));
  }
  cs.horizon_ = cs.levels_.back().n;

  // Refined and pruned families on an explicit uniform-grid surrogate.
  if (sys.space() != Space::symbolic) {
    const double L = std::max(1.0, sys.max_expansion());
    const std::size_t width = metric_width(sys);
    const double d = static_cast<double>(sys.dim());
    std::int64_t hi = -1;
    double h = 0.0;
    for (std::int64_t n = cs.horizon_; n > N_min; --n) {
      h = opts.theta * r_sep * std::pow(L, -static_cast<double>(n - 1));
      double size = static_cast<double>(Z.points.size());
      for (const auto& b : Z.balls) size += std::pow(2.0 * clipped_radius(sys, b.radius) / h + 1.0, d);
      if (std::isfinite(L) && size <= static_cast<double>(opts.refine_cap)) {
        hi = n;
        break;
      }
    }
    if (hi < 0) {
      cs.notes_.push_back("refined and pruned families skipped: surrogate above " + std::to_string(opts.refine_cap) +
                          " samples");
    } else {
      std::vector<std::vector<double>> raw;
      for (const auto& b : Z.balls) {
        const double rad = clipped_radius(sys, b.radius);
        const BallSpec bb(b.center, rad, b.closed);
        SampleGrid g = sample_grid(bb, sys.metric(), std::min(h, rad), opts.refine_cap);
        for (auto& p : g.points) raw.emplace_back(p.coords().begin(), p.coords().end());
      }
      for (const auto& p : Z.points) raw.emplace_back(p.coords().begin(), p.coords().end());
      const std::size_t P = raw.size();
      const std::size_t row = static_cast<std::size_t>(hi) * width;
      std::vector<double> orbits(P * row), psum(P * static_cast<std::size_t>(hi + 1), 0.0);
      for (std::size_t p = 0; p < P; ++p) {
        std::vector<double> c = raw[p];
        double acc = 0.0;
        for (std::int64_t t = 0; t < hi; ++t) {
          if (t) sys.step(c);
          maps::metric_coords(sys.space(), c,
                              std::span<double>(orbits).subspan(p * row + static_cast<std::size_t>(t) * width, width));
          acc += constant_potential(phi) ? constant_value(phi) : phi(sys, std::span<const double>(c));
          psum[p * static_cast<std::size_t>(hi + 1) + static_cast<std::size_t>(t + 1)] = acc;
        }
      }
      auto orbit_of = [&](std::size_t p, std::int64_t n) {
        return std::span<const double>(orbits).subspan(p * row, static_cast<std::size_t>(n) * width);
      };
      Tree& tr = cs.tree_;
      tr.n_lo = N_min;
      tr.n_hi = hi;
      std::vector<std::vector<std::uint32_t>> assign;
      std::vector<std::uint64_t> cov;
      for (std::int64_t n = N_min; n <= hi; ++n) {
        separated::GreedyKernel k(sys.space(), width, n, r_sep, false, false);
        std::vector<std::uint32_t> a(P);
        std::vector<std::size_t> centers;
        for (std::size_t p = 0; p < P; ++p) {
          const std::int64_t blk = k.offer_or_blocker(orbit_of(p, n), 0.0);
          if (blk < 0) {
            a[p] = static_cast<std::uint32_t>(centers.size());
            centers.push_back(p);
          } else {
            a[p] = static_cast<std::uint32_t>(blk);
          }
        }
        std::vector<double> S(centers.size());
        for (std::size_t c = 0; c < centers.size(); ++c)
          S[c] = psum[centers[c] * static_cast<std::size_t>(hi + 1) + static_cast<std::size_t>(n)];

        // Redundancy pruning: drop the heaviest balls whose samples all lie
        // in another kept ball.
        std::vector<std::uint32_t> start(centers.size() + 1, 0), members;
        std::vector<std::uint32_t> count(P, 0);
        {
          std::vector<std::vector<std::uint32_t>> lists(centers.size());
          for (std::size_t p = 0; p < P; ++p) {
            k.covering(orbit_of(p, n), cov);
            count[p] = static_cast<std::uint32_t>(cov.size());
            for (auto c : cov) lists[c].push_back(static_cast<std::uint32_t>(p));
          }
          for (std::size_t c = 0; c < centers.size(); ++c) {
            start[c + 1] = start[c] + static_cast<std::uint32_t>(lists[c].size());
            members.insert(members.end(), lists[c].begin(), lists[c].end());
          }
        }
        std::vector<std::size_t> order(centers.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return S[x] > S[y]; });
        LogSum kept;
        std::uint64_t kept_n = 0;
        for (std::size_t c : order) {
          bool redundant = start[c + 1] > start[c];
          for (auto i = start[c]; i < start[c + 1] && redundant; ++i) redundant = count[members[i]] >= 2;
          if (redundant) {
            for (auto i = start[c]; i < start[c + 1]; ++i) --count[members[i]];
          } else {
            kept.add(S[c]);
            ++kept_n;
          }
        }
        Level& lv = cs.levels_[static_cast<std::size_t>(n - N_min)];
        lv.log_sum_vitali = kept.value();
        lv.count_vitali = kept_n;
        lv.have_vitali = true;

        tr.birkhoff.push_back(std::move(S));
        assign.push_back(std::move(a));
      }
      for (std::int64_t n = N_min; n < hi; ++n) {
        const auto& up = assign[static_cast<std::size_t>(n - N_min)];
        const auto& down = assign[static_cast<std::size_t>(n - N_min + 1)];
        const std::size_t C = tr.birkhoff[static_cast<std::size_t>(n - N_min)].size();
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(P);
        for (std::size_t p = 0; p < P; ++p) edges[p] = {up[p], down[p]};
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        std::vector<std::uint32_t> st(C + 1, 0), ch;
        for (auto& [u, v] : edges) {
          ++st[u + 1];
          ch.push_back(v);
        }
        for (std::size_t c = 0; c < C; ++c) st[c + 1] += st[c];
        tr.child_start.push_back(std::move(st));
        tr.children.push_back(std::move(ch));
      }
    }
  }

  double lo = kInf, hi_s = -kInf;
  for (std::size_t i = 0; i < cs.levels_.size(); ++i) {
    const double a = cs.levels_[i].log_sum_uniform;
    lo = std::min(lo, a / static_cast<double>(cs.levels_[i].n));
    hi_s = std::max(hi_s, a / static_cast<double>(cs.levels_[i].n));
    if (i) {
      const double dlt = a - cs.levels_[i - 1].log_sum_uniform;
      lo = std::min(lo, dlt);
      hi_s = std::max(hi_s, dlt);
    }
  }
  cs.s_range_ = {lo - 1.0, hi_s + 1.0};
  return cs;
}

CoverSet CoverSet::translocal(const maps::System& sys, const Region& Z, const maps::Potential& phi, double omega,
                              std::int64_t N_min, std::int64_t N_max, const CoverOptions& opts) {
  Z.check(sys);
  if (!(omega > 0) || !std::isfinite(omega)) throw ContractViolation("metric-ball covers need omega > 0");
  if (N_min < 1 || N_max < N_min) throw ContractViolation("cover orders need 1 <= N_min <= N_max");
  if (sys.space() != Space::symbolic) phi.check(sys);
  else if (!constant_potential(phi)) throw ContractViolation("only constant potentials are defined on shift spaces");

  CoverSet cs;
  cs.translocal_ = true;
  cs.scale_ = omega;
  cs.potential_ = phi.id();
  cs.N_min_ = N_min;
  cs.N_max_ = N_max;
  const std::int64_t top = opts.horizon > 0 ? std::max(opts.horizon, N_max) : N_max + 8;
  const std::size_t d = sys.dim();

  for (std::int64_t n = N_min; n <= top; ++n) {
    const double rho = std::exp(-omega * static_cast<double>(n));
    Level lv{n, 0.0, 0, 0.0, 0, false, {}};
    LogSum sum;
    bool over = false;
    for (const auto& ball : Z.balls) {
      if (sys.space() == Space::symbolic) {
        const auto* shift = dynamic_cast<const maps::ShiftMap*>(&sys);
        if (!shift) throw ContractViolation(sys.id() + " is not a shift system");
        const double beta = sys.metric().beta;
        const std::int64_t m = symbolic_agreement(rho, beta, true);
        const std::int64_t p = std::min(symbolic_agreement(ball.radius, beta, ball.closed), m);
        double cnt;
        if (shift->coded()) {
          std::vector<int> prefix;
          for (std::int64_t i = 0; i < p; ++i) prefix.push_back(ball.center.symbol(i));
          cnt = static_cast<double>(symbolic::coded_extension_count(*shift->family(), prefix, static_cast<int>(m)));
        } else {
          cnt = std::pow(static_cast<double>(shift->alphabet()), static_cast<double>(m - p));
        }
        lv.count_uniform += static_cast<std::uint64_t>(std::min(cnt, 1.8e19));
        if (cnt > 0) sum.add(std::log(cnt) + constant_value(phi) * static_cast<double>(n));
        continue;
      }
      // Centers on a product grid over the Chebyshev box of the ball; per
      // axis k balls of radius rho cover an extent D when 2 k rho >= D.
      const double R = clipped_radius(sys, ball.radius);
      std::vector<double> lo(d), ext(d);
      const double grid_rho = sys.space() == Space::disk ? rho / std::sqrt(2.0) : rho;
      std::vector<double> box_c(d);
      if (sys.space() == Space::disk) {
        std::vector<double> cart(2);
        maps::metric_coords(Space::disk, ball.center.coords(), cart);
        box_c = cart;
      } else {
        box_c.assign(ball.center.coords().begin(), ball.center.coords().end());
      }
      for (std::size_t i = 0; i < d; ++i) {
        double a = box_c[i] - R, b = box_c[i] + R;
        if (sys.space() == Space::interval) {
          a = std::max(a, 0.0);
          b = std::min(b, 1.0);
        }
        if (sys.space() == Space::disk) {
          a = std::max(a, -1.0);
          b = std::min(b, 1.0);
        }
        lo[i] = a;
        ext[i] = std::max(b - a, 0.0);
      }
      std::vector<std::int64_t> k(d);
      double total = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        k[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ext[i] / (2.0 * grid_rho) - 1e-12)));
        total *= static_cast<double>(k[i]);
      }
      if (constant_potential(phi) && !opts.keep_elements) {
        lv.count_uniform += static_cast<std::uint64_t>(std::min(total, 1.8e19));
        sum.add(std::log(total) + constant_value(phi) * static_cast<double>(n));
        continue;
      }
      if (total > static_cast<double>(opts.budget)) {
        over = true;
        break;
      }
      std::vector<std::int64_t> idx(d, 0);
      std::vector<double> x(d), cart(d);
      while (true) {
        for (std::size_t i = 0; i < d; ++i)
          cart[i] = lo[i] + (2.0 * static_cast<double>(idx[i]) + 1.0) * ext[i] / (2.0 * static_cast<double>(k[i]));
        if (sys.space() == Space::disk) {
          x[0] = std::min(1.0, std::hypot(cart[0], cart[1]));
          x[1] = std::atan2(cart[1], cart[0]);
          if (x[1] < 0) x[1] += 2.0 * std::numbers::pi;
        } else {
          x = cart;
        }
        const PhasePoint c = PhasePoint::from_coords(sys.space(), x);
        sum.add(birkhoff_raw(sys, phi, c.coords(), n));
        ++lv.count_uniform;
        if (opts.keep_elements) lv.elements.push_back({c, n});
        std::size_t i = d;
        while (i > 0 && ++idx[i - 1] >= k[i - 1]) {
          idx[i - 1] = 0;
          --i;
        }
        if (i == 0) break;
      }
    }
    if (over) {
      if (n <= N_max)
        throw BudgetExceeded("metric-ball cover of order " + std::to_string(n) + " for " + sys.id(), opts.budget);
      cs.notes_.push_back("metric-ball covers stop at n=" + std::to_string(n - 1) + " (budget)");
      break;
    }
    for (const auto& p : Z.points) {
      sum.add(sys.space() == Space::symbolic ? constant_value(phi) * static_cast<double>(n)
                                             : birkhoff_raw(sys, phi, p.coords(), n));
      ++lv.count_uniform;
      if (opts.keep_elements) lv.elements.push_back({p, n});
    }
    lv.log_sum_uniform = sum.value();
    cs.levels_.push_back(std::move(lv));
  }
  cs.horizon_ = cs.levels_.back().n;
  cs.notes_.push_back("metric-ball covers use the uniform-n family only");
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 1; i < cs.levels_.size(); ++i) {
    const double dlt = cs.levels_[i].log_sum_uniform - cs.levels_[i - 1].log_sum_uniform;
    lo = std::min(lo, dlt);
    hi = std::max(hi, dlt);
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  cs.s_range_ = {lo - 1.0, hi + 1.0};
  return cs;
}

const std::vector<CoverElement>& CoverSet::elements(std::int64_t n) const {
  if (n < N_min_ || n > horizon_) throw ContractViolation("no cover of order " + std::to_string(n));
  return levels_[static_cast<std::size_t>(n - N_min_)].elements;
}

double CoverSet::refined_log_weight(double s, std::int64_t N) const {
  const Tree& tr = tree_;
  if (tr.n_hi < 0 || N < tr.n_lo || N > tr.n_hi) return kInf;
  // Bottom-up: cost(node) = min(own weight, sum of children costs).
  std::vector<double> below;
  for (std::int64_t n = tr.n_hi; n >= N; --n) {
    const auto& S = tr.birkhoff[static_cast<std::size_t>(n - tr.n_lo)];
    std::vector<double> cost(S.size());
    for (std::size_t c = 0; c < S.size(); ++c) {
      const double own = S[c] - s * static_cast<double>(n);
      if (n == tr.n_hi) {
        cost[c] = own;
        continue;
      }
      const auto& st = tr.child_start[static_cast<std::size_t>(n - tr.n_lo)];
      const auto& ch = tr.children[static_cast<std::size_t>(n - tr.n_lo)];
      LogSum kids;
      for (auto i = st[c]; i < st[c + 1]; ++i) kids.add(below[ch[i]]);
      cost[c] = std::min(own, kids.value());
    }
    below.swap(cost);
  }
  LogSum total;
  for (double v : below) total.add(v);
  return total.value();
}

CoverWeight CoverSet::weight(double s, std::int64_t N) const {
  if (N < N_min_ || N > horizon_) throw ContractViolation("cover order " + std::to_string(N) + " outside the computed range");
  CoverWeight w;
  w.s = s;
  w.scale = scale_;
  w.translocal = translocal_;
  w.N = N;
  w.potential = potential_;
  double best = kInf;
  std::int64_t best_n = N;
  for (std::int64_t n = N; n <= horizon_; ++n) {
    const Level& lv = levels_[static_cast<std::size_t>(n - N_min_)];
    const double u = lv.log_sum_uniform - s * static_cast<double>(n);
    if (u < best) {
      best = u;
      best_n = n;
      w.family = Family::uniform;
      w.element_count = lv.count_uniform;
    }
    if (lv.have_vitali) {
      const double v = lv.log_sum_vitali - s * static_cast<double>(n);
      if (v < best) {
        best = v;
        best_n = n;
        w.family = Family::vitali;
        w.element_count = lv.count_vitali;
      }
    }
    const double rf = refined_log_weight(s, n);
    if (rf < best) {
      best = rf;
      best_n = n;
      w.family = Family::refined;
      w.element_count = 0;
    }
  }
  w.log_value = best;
  w.value = std::exp(best);
  if (w.family == Family::uniform) w.elements = levels_[static_cast<std::size_t>(best_n - N_min_)].elements;
  return w;
}

CoverWeight cover_weight(const maps::System& sys, const Region& Z, const maps::Potential& phi, double s, double r,
                         std::int64_t N, const CoverOptions& opts) {
  return CoverSet::bowen(sys, Z, phi, r, N, N, opts).weight(s, N);
}

CoverWeight translocal_cover_weight(const maps::System& sys, const Region& Z, const maps::Potential& phi, double s,
                                    double omega, std::int64_t N, const CoverOptions& opts) {
  return CoverSet::translocal(sys, Z, phi, omega, N, N, opts).weight(s, N);
}

// ---------------------------------------------------------------- exponents

double n_trend(const std::vector<std::pair<double, double>>& pts, Variant v) {
  if (pts.size() < 2) throw ContractViolation("an N-trend needs at least 2 orders");
  if (v == Variant::bowen_ball || pts.size() < 3) return lsq_slope(pts);
  return entropy::growth_rate(pts, v == Variant::translocal_upper ? entropy::Mode::limsup : entropy::Mode::liminf)
      .value;
}

namespace {

// Standard error of the least-squares slope; 0 below 3 points.
double slope_stderr(const std::vector<std::pair<double, double>>& pts) {
  const std::size_t m = pts.size();
  if (m < 3) return 0.0;
  double mx = 0, my = 0;
  for (auto& [x, y] : pts) mx += x, my += y;
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
  if (!(sxx > 0)) return 0.0;
  const double b = sxy / sxx;
  double rss = 0;
  for (auto& [x, y] : pts) {
    const double e = y - my - b * (x - mx);
    rss += e * e;
  }
  return std::sqrt(rss / static_cast<double>(m - 2) / sxx);
}

void widen(CriticalExponent& ce, double se_lo, double se_hi) {
  ce.lo = ce.s_lo - 2.0 * se_lo;
  ce.hi = ce.s_hi + kGrowthThreshold + 2.0 * se_hi;
}

std::string trend_report(const std::vector<std::pair<double, double>>& trends) {
  std::ostringstream os;
  os << "N-trend of log M by s:";
  for (auto& [s, t] : trends) os << " (" << fmt(s) << ", " << fmt(t) << ")";
  return os.str();
}

}  // namespace

CriticalExponent critical_exponent(const CoverSet& covers, Variant v, const std::vector<double>& grid_in, double tol) {
  if ((v == Variant::bowen_ball) == covers.is_translocal())
    throw ContractViolation("variant " + to_string(v) + " does not match the cover type");
  if (grid_in.size() < 2) throw ContractViolation("s-grid needs at least 2 values");
  if (!(tol > 0)) throw ContractViolation("bisection tolerance must be positive");
  std::vector<double> grid = grid_in;
  std::sort(grid.begin(), grid.end());
  CriticalExponent ce;
  ce.variant = v;
  ce.N_min = covers.N_min();
  ce.N_max = covers.N_max();
  auto series = [&](double s) {
    std::vector<std::pair<double, double>> pts;
    for (std::int64_t N = covers.N_min(); N <= covers.N_max(); ++N)
      pts.emplace_back(static_cast<double>(N), covers.log_weight(s, N));
    return pts;
  };
  auto trend = [&](double s) {
    const double t = n_trend(series(s), v);
    ce.trends.emplace_back(s, t);
    return t;
  };
  std::vector<char> grows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grows[i] = trend(grid[i]) > kGrowthThreshold;
  std::size_t k = grid.size();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grows[i] && !grows[i + 1]) {
      k = i;
      break;
    }
  if (k == grid.size() || !grows.front() || grows.back()) throw Unbracketed(trend_report(ce.trends));
  double lo = grid[k], hi = grid[k + 1];
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (trend(mid) > kGrowthThreshold ? lo : hi) = mid;
  }
  ce.s_lo = lo;
  ce.s_hi = hi;
  ce.value = 0.5 * (lo + hi);
  widen(ce, slope_stderr(series(lo)), slope_stderr(series(hi)));
  std::sort(ce.trends.begin(), ce.trends.end());
  return ce;
}

CriticalExponent critical_exponent(const CoverSet& covers, Variant v, double tol) {
  auto [a, b] = covers.s_range();
  std::vector<double> grid;
  for (double s = std::floor(a * 4.0) / 4.0; s <= b + 0.25; s += 0.25) grid.push_back(s);
  return critical_exponent(covers, v, grid, tol);
}

CriticalExponent critical_exponent(const std::vector<CoverWeight>& weights, Variant v) {
  if (weights.empty()) throw ContractViolation("no cover weights given");
  std::vector<double> ss;
  for (const auto& w : weights) {
    if (w.translocal != (v != Variant::bowen_ball))
      throw ContractViolation("variant " + to_string(v) + " does not match the cover type");
    ss.push_back(w.s);
  }
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  CriticalExponent ce;
  ce.variant = v;
  ce.N_min = std::numeric_limits<std::int64_t>::max();
  ce.N_max = std::numeric_limits<std::int64_t>::min();
  std::vector<char> grows;
  std::vector<double> se;
  for (double s : ss) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& w : weights)
      if (w.s == s) {
        pts.emplace_back(static_cast<double>(w.N), w.log_value);
        ce.N_min = std::min(ce.N_min, w.N);
        ce.N_max = std::max(ce.N_max, w.N);
      }
    std::sort(pts.begin(), pts.end());
    const double t = n_trend(pts, v);
    ce.trends.emplace_back(s, t);
    se.push_back(slope_stderr(pts));
    grows.push_back(t > kGrowthThreshold);
  }
  for (std::size_t i = 0; i + 1 < ss.size(); ++i)
    if (grows[i] && !grows[i + 1] && grows.front() && !grows.back()) {
      ce.s_lo = ss[i];
      ce.s_hi = ss[i + 1];
      ce.value = 0.5 * (ce.s_lo + ce.s_hi);
      widen(ce, se[i], se[i + 1]);
      return ce;
    }
  throw Unbracketed(trend_report(ce.trends));
}

// ---------------------------------------------------------------- audit

std::vector<PhasePoint> region_samples(const maps::System& sys, const Region& Z, std::size_t count) {
  Z.check(sys);
  std::vector<PhasePoint> out;
  for (const auto& p : Z.points) {
    if (out.size() >= count) return out;
    out.push_back(p);
  }
  if (Z.balls.empty()) return out;
  const std::size_t d = std::max<std::size_t>(sys.dim(), 1);
  auto radical = [](std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    for (; i > 0; i /= base) {
      f /= base;
      r += f * static_cast<double>(i % base);
    }
    return r;
  };
  constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (d > std::size(primes)) throw ContractViolation("region sampling supports up to 8 dimensions");
  std::mt19937_64 rng(0x5eedULL);
  for (std::uint64_t i = 1; out.size() < count; ++i) {
    const BallSpec& b = Z.balls[(i - 1) % Z.balls.size()];
    const double R = clipped_radius(sys, b.radius);
    switch (sys.space()) {
      case Space::circle:
        out.push_back(PhasePoint::circle(wrap_unit(b.center.coord(0) + (2.0 * radical(i, 2) - 1.0) * R)));
        break;
      case Space::interval: {
        const double lo = std::max(0.0, b.center.coord(0) - R), hi = std::min(1.0, b.center.coord(0) + R);
        out.push_back(PhasePoint::interval(lo + radical(i, 2) * (hi - lo)));
        break;
      }
      case Space::torus: {
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = wrap_unit(b.center.coord(k) + (2.0 * radical(i, primes[k]) - 1.0) * R);
        out.push_back(PhasePoint::torus(std::move(x)));
        break;
      }
      case Space::disk: {
        std::vector<double> c(2);
        maps::metric_coords(Space::disk, b.center.coords(), c);
        const double rr = R * std::sqrt(radical(i, 2)), th = 2.0 * std::numbers::pi * radical(i, 3);
        const double x = c[0] + rr * std::cos(th), y = c[1] + rr * std::sin(th);
        if (std::hypot(x, y) > 1.0) continue;
        double ang = std::atan2(y, x);
        if (ang < 0) ang += 2.0 * std::numbers::pi;
        out.push_back(PhasePoint::disk(std::hypot(x, y), ang));
        break;
      }
      case Space::symbolic: {
        const auto* shift = dynamic_cast<const maps::ShiftMap*>(&sys);
        if (!shift || shift->coded()) throw ContractViolation("symbolic region sampling needs a full shift");
        const std::int64_t p = std::min(symbolic_agreement(b.radius, sys.metric().beta, b.closed), kSymbolHorizon);
        std::vector<int> w(static_cast<std::size_t>(kSymbolHorizon));
        std::uniform_int_distribution<int> sym(0, shift->alphabet() - 1);
        for (std::int64_t k = 0; k < kSymbolHorizon; ++k)
          w[static_cast<std::size_t>(k)] = k < p ? b.center.symbol(k) : sym(rng);
        out.push_back(PhasePoint::word(std::move(w), 0, kSymbolHorizon));
        break;
      }
    }
  }
  return out;
}

AuditReport ma_wen_audit(const maps::System& sys, const measures::Measure& mu, const maps::Potential& phi,
                         const Region& Z, std::optional<double> omega, std::size_t samples, const AuditOptions& opts) {
  Z.check(sys);
  if (samples == 0) throw ContractViolation("audit needs at least one sample point of Z");
  if (!measures::certified_invariant(sys, mu))
    throw ContractViolation("(" + sys.id() + ", " + mu.id() + ") is not a certified invariant pair");
  double mass = 0.0;
  for (const auto& b : Z.balls) mass += measures::ball_measure(mu, b);
  // only atoms give points mass
  for (const auto& p : Z.points)
    if (mu.atom() && distance(*mu.atom(), p, sys.metric()) == 0.0) mass += 1.0;
  if (!(mass > 0.0)) throw ContractViolation("audit needs mu(Z) > 0");

  AuditReport rep;
  rep.omega = omega;
  rep.tolerance = opts.tolerance;
  const auto pts = region_samples(sys, Z, samples);
  rep.max_upper = -kInf;
  rep.min_lower = kInf;
  for (const auto& x : pts) {
    const auto lp = omega ? measures::translocal_local_pressure(sys, mu, phi, x, *omega, opts.schedule)
                          : measures::local_pressure(sys, mu, phi, x, opts.schedule);
    rep.points.push_back(measures::describe(x));
    rep.uppers.push_back(lp.upper.value);
    rep.lowers.push_back(lp.lower.value);
    rep.max_upper = std::max(rep.max_upper, lp.upper.value);
    rep.min_lower = std::min(rep.min_lower, lp.lower.value);
  }
  if (omega) {
    const auto cs = CoverSet::translocal(sys, Z, phi, *omega, opts.N_min, opts.N_max, opts.cover);
    rep.upper_exponent = critical_exponent(cs, Variant::translocal_upper);
    rep.lower_exponent = critical_exponent(cs, Variant::translocal_lower);
  } else {
    const auto cs = CoverSet::bowen(sys, Z, phi, opts.r, opts.N_min, opts.N_max, opts.cover);
    rep.upper_exponent = rep.lower_exponent = critical_exponent(cs, Variant::bowen_ball);
  }
  const bool up_ok = rep.upper_exponent.value <= rep.max_upper + opts.tolerance;
  const bool lo_ok = rep.lower_exponent.value >= rep.min_lower - opts.tolerance;
  rep.passed = up_ok && lo_ok;
  const std::string P = omega ? "P_Z,omega" : "P_Z";
  rep.lines.push_back("system " + sys.id() + ", measure " + mu.id() + ", potential " + phi.id() + ", Z = " +
                      Z.describe() + (omega ? ", omega = " + fmt(*omega) : std::string()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    rep.lines.push_back("  x = " + rep.points[i] + ": upper " + fmt(rep.uppers[i]) + ", lower " + fmt(rep.lowers[i]));
  rep.lines.push_back("upper " + P + " = " + fmt(rep.upper_exponent.value) + " in [" + fmt(rep.upper_exponent.s_lo) +
                      ", " + fmt(rep.upper_exponent.s_hi) + "] <= max upper " + fmt(rep.max_upper) + " + " +
                      fmt(opts.tolerance) + ": " + (up_ok ? "ok" : "FAIL"));
  rep.lines.push_back("lower " + P + " = " + fmt(rep.lower_exponent.value) + " in [" + fmt(rep.lower_exponent.s_lo) +
                      ", " + fmt(rep.lower_exponent.s_hi) + "] >= min lower " + fmt(rep.min_lower) + " - " +
                      fmt(opts.tolerance) + ": " + (lo_ok ? "ok" : "FAIL"));
  return rep;
}

}  // namespace translocal::pressure
