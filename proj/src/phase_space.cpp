#include "translocal/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "translocal/errors.hpp"

namespace translocal {

std::string to_string(Space s) {
  switch (s) {
    case Space::circle: return "circle";
    case Space::torus: return "torus";
    case Space::interval: return "interval";
    case Space::disk: return "disk";
    case Space::symbolic: return "symbolic";
  }
  return "unknown";
}

WordSequence::WordSequence(std::vector<int> word, int tail, std::int64_t horizon,
                           bool two_sided, int left_tail)
    : word_(std::move(word)),
      tail_(tail),
      horizon_(horizon),
      two_sided_(two_sided),
      left_tail_(left_tail) {}

int WordSequence::at(std::int64_t i) const {
  if (i >= horizon_ || (two_sided_ ? -i >= horizon_ : i < 0)) {
    throw ContractViolation("symbol index " + std::to_string(i) + " beyond horizon " +
                            std::to_string(horizon_));
  }
  if (i < 0) return left_tail_;
  if (static_cast<std::size_t>(i) < word_.size()) return word_[static_cast<std::size_t>(i)];
  return tail_;
}

int GeneratedSequence::at(std::int64_t i) const {
  if (i >= horizon_ || (two_sided_ ? -i >= horizon_ : i < 0)) {
    throw ContractViolation("symbol index " + std::to_string(i) + " beyond horizon " +
                            std::to_string(horizon_));
  }
  return gen_(i);
}

PhasePoint PhasePoint::circle(double x) {
  PhasePoint p;
  p.space_ = Space::circle;
  p.coords_ = {wrap_unit(x)};
  return p;
}

PhasePoint PhasePoint::torus(std::vector<double> x) {
  if (x.empty()) throw ContractViolation("torus point needs at least one coordinate");
  PhasePoint p;
  p.space_ = Space::torus;
  for (double& c : x) c = wrap_unit(c);
  p.coords_ = std::move(x);
  return p;
}

PhasePoint PhasePoint::interval(double x) {
  PhasePoint p;
  p.space_ = Space::interval;
  p.coords_ = {std::clamp(x, 0.0, 1.0)};
  return p;
}

PhasePoint PhasePoint::disk(double r, double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  PhasePoint p;
  p.space_ = Space::disk;
  double t = theta - two_pi * std::floor(theta / two_pi);
  if (t >= two_pi) t = 0.0;
  p.coords_ = {std::clamp(r, 0.0, 1.0), t};
  return p;
}

PhasePoint PhasePoint::symbolic(std::shared_ptr<const SymbolSequence> seq,
                                std::int64_t offset) {
  if (!seq) throw ContractViolation("symbolic point needs a sequence");
  PhasePoint p;
  p.space_ = Space::symbolic;
  p.seq_ = std::move(seq);
  p.offset_ = offset;
  return p;
}

PhasePoint PhasePoint::word(std::vector<int> w, int tail, std::int64_t horizon) {
  return symbolic(std::make_shared<WordSequence>(std::move(w), tail, horizon));
}

PhasePoint PhasePoint::from_coords(Space space, std::span<const double> c) {
  switch (space) {
    case Space::circle: return circle(c[0]);
    case Space::torus: return torus(std::vector<double>(c.begin(), c.end()));
    case Space::interval: return interval(c[0]);
    case Space::disk: return disk(c[0], c[1]);
    case Space::symbolic: break;
  }
  throw ContractViolation("symbolic points cannot be built from coordinates");
}

int PhasePoint::symbol(std::int64_t i) const {
  if (space_ != Space::symbolic) throw ContractViolation("symbol access on a non-symbolic point");
  return seq_->at(offset_ + i);
}

std::int64_t PhasePoint::horizon() const {
  if (space_ != Space::symbolic) return 0;
  return seq_->horizon() - offset_;
}

bool PhasePoint::two_sided() const { return seq_ && seq_->two_sided(); }

PhasePoint PhasePoint::shifted(std::int64_t k) const {
  if (space_ != Space::symbolic) throw ContractViolation("shift of a non-symbolic point");
  PhasePoint p = *this;
  p.offset_ += k;
  return p;
}

MetricSpec MetricSpec::for_space(Space s, std::size_t dim) {
  MetricSpec m;
  m.space = s;
  m.dim = s == Space::disk ? 2 : dim;
  return m;
}

namespace {

void require_space(const PhasePoint& p, const MetricSpec& m) {
  if (p.space() != m.space) {
    throw ContractViolation("point in " + to_string(p.space()) + " measured with a " +
                            to_string(m.space) + " metric");
  }
}

// Least index (by |i| when two-sided) at which the sequences differ; -1 if
// they agree up to the common horizon.
std::int64_t first_disagreement(const PhasePoint& a, const PhasePoint& b) {
  const std::int64_t h = std::min(a.horizon(), b.horizon());
  const bool two = a.two_sided() && b.two_sided();
  for (std::int64_t m = 0; m < h; ++m) {
    if (a.symbol(m) != b.symbol(m)) return m;
    if (two && m > 0 && a.symbol(-m) != b.symbol(-m)) return m;
  }
  return -1;
}

}  // namespace

double distance(const PhasePoint& a, const PhasePoint& b, const MetricSpec& m) {
  require_space(a, m);
  require_space(b, m);
  switch (m.space) {
    case Space::circle: return circle_gap(a.coord(0), b.coord(0));
    case Space::torus: {
      if (a.dim() != b.dim()) throw ContractViolation("torus dimension mismatch");
      double d = 0.0;
      for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, circle_gap(a.coord(i), b.coord(i)));
      return d;
    }
    case Space::interval: return std::fabs(a.coord(0) - b.coord(0));
    case Space::disk: {
      const double ax = a.coord(0) * std::cos(a.coord(1)), ay = a.coord(0) * std::sin(a.coord(1));
      const double bx = b.coord(0) * std::cos(b.coord(1)), by = b.coord(0) * std::sin(b.coord(1));
      return std::hypot(ax - bx, ay - by);
    }
    case Space::symbolic: {
      const std::int64_t k = first_disagreement(a, b);
      return k < 0 ? 0.0 : std::pow(m.beta, -static_cast<double>(k));
    }
  }
  return 0.0;
}

BallSpec::BallSpec(PhasePoint c, double r, bool is_closed)
    : center(std::move(c)), radius(r), closed(is_closed) {
  if (!(radius > 0.0)) throw ContractViolation("ball radius must be positive");
}

bool BallSpec::contains(const PhasePoint& p, const MetricSpec& m) const {
  const double d = distance(center, p, m);
  return closed ? d <= radius : d < radius;
}

std::int64_t symbolic_agreement(double radius, double beta, bool closed) {
  // d = beta^{-m}; closed: m >= log_beta(1/r), open: m > log_beta(1/r).
  const double t = std::log(1.0 / radius) / std::log(beta);
  if (closed) return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(t - 1e-9)));
  if (t < 0.0) return 0;
  return static_cast<std::int64_t>(std::floor(t + 1e-9)) + 1;
}

namespace {

// Offsets k*res, |k| <= K, that stay inside a 1D ball of the given radius.
std::vector<double> line_offsets(double radius, double res, bool closed) {
  auto K = static_cast<std::int64_t>(std::floor(radius / res + 1e-9));
  if (!closed && static_cast<double>(K) * res >= radius - 1e-15) --K;
  std::vector<double> out;
  for (std::int64_t k = -K; k <= K; ++k) out.push_back(static_cast<double>(k) * res);
  return out;
}

std::vector<double> circle_coords(double center, double radius, double res, bool closed) {
  std::vector<double> out;
  if (radius >= 0.5) {
    const auto count = static_cast<std::int64_t>(std::floor(1.0 / res + 1e-9));
    for (std::int64_t k = 0; k < count; ++k) out.push_back(wrap_unit(center + k * res));
    std::sort(out.begin(), out.end());
    return out;
  }
  for (double o : line_offsets(radius, res, closed)) out.push_back(wrap_unit(center + o));
  return out;
}

void check_cap(std::size_t count, std::size_t cap) {
  if (count > cap) throw BudgetExceeded("sample grid of " + std::to_string(count) + " points", cap);
}

}  // namespace

SampleGrid sample_grid(const BallSpec& ball, const MetricSpec& m, double resolution,
                       std::size_t cap) {
  if (!(resolution > 0.0) || resolution > ball.radius * (1.0 + 1e-12)) {
    throw ContractViolation("sample_grid precondition: 0 < resolution <= radius");
  }
  if (ball.center.space() != m.space) throw ContractViolation("ball and metric in different spaces");
  SampleGrid grid{ball, resolution, {}};
  const PhasePoint& c = ball.center;
  switch (m.space) {
    case Space::circle: {
      auto xs = circle_coords(c.coord(0), ball.radius, resolution, ball.closed);
      check_cap(xs.size(), cap);
      for (double x : xs) grid.points.push_back(PhasePoint::circle(x));
      break;
    }
    case Space::interval: {
      for (double o : line_offsets(ball.radius, resolution, ball.closed)) {
        const double x = c.coord(0) + o;
        if (x < 0.0 || x > 1.0) continue;
        grid.points.push_back(PhasePoint::interval(x));
      }
      check_cap(grid.points.size(), cap);
      break;
    }
    case Space::torus: {
      std::vector<std::vector<double>> axes;
      std::size_t count = 1;
      for (std::size_t i = 0; i < c.dim(); ++i) {
        axes.push_back(circle_coords(c.coord(i), ball.radius, resolution, ball.closed));
        count *= axes.back().size();
        check_cap(count, cap);
      }
      std::vector<std::size_t> idx(c.dim(), 0);
      for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> x(c.dim());
        for (std::size_t i = 0; i < c.dim(); ++i) x[i] = axes[i][idx[i]];
        grid.points.push_back(PhasePoint::torus(std::move(x)));
        for (std::size_t i = c.dim(); i-- > 0;) {
          if (++idx[i] < axes[i].size()) break;
          idx[i] = 0;
        }
      }
      break;
    }
    case Space::disk: {
      // Half spacing keeps the covering property near the boundary of the
      // ball intersected with the unit disk.
      const double h = 0.5 * resolution;
      const double cx = c.coord(0) * std::cos(c.coord(1));
      const double cy = c.coord(0) * std::sin(c.coord(1));
      const auto K = static_cast<std::int64_t>(std::ceil(ball.radius / h));
      const double side = 2.0 * static_cast<double>(K) + 1.0;
      check_cap(static_cast<std::size_t>(side * side * std::numbers::pi / 4.0), cap);
      for (std::int64_t i = -K; i <= K; ++i) {
        for (std::int64_t j = -K; j <= K; ++j) {
          const double x = cx + i * h, y = cy + j * h;
          const double r = std::hypot(x, y);
          if (r > 1.0) continue;
          PhasePoint p = PhasePoint::disk(r, std::atan2(y, x));
          if (ball.contains(p, m)) grid.points.push_back(std::move(p));
        }
      }
      check_cap(grid.points.size(), cap);
      break;
    }
    case Space::symbolic: {
      if (c.two_sided()) throw ContractViolation("grids over two-sided sequences are not supported");
      const std::int64_t prefix = symbolic_agreement(ball.radius, m.beta, ball.closed);
      const std::int64_t len =
          std::max<std::int64_t>(prefix,
                                 static_cast<std::int64_t>(std::ceil(
                                     std::log(1.0 / resolution) / std::log(m.beta) - 1e-9)));
      const std::int64_t free = len - prefix;
      double count = std::pow(static_cast<double>(m.alphabet), static_cast<double>(free));
      if (count > static_cast<double>(cap)) {
        throw BudgetExceeded("symbolic grid of " + std::to_string(count) + " words", cap);
      }
      std::vector<int> word(static_cast<std::size_t>(len), 0);
      for (std::int64_t i = 0; i < prefix; ++i) word[static_cast<std::size_t>(i)] = c.symbol(i);
      const auto total = static_cast<std::size_t>(count);
      for (std::size_t k = 0; k < total; ++k) {
        std::size_t v = k;
        for (std::int64_t i = len - 1; i >= prefix; --i) {
          word[static_cast<std::size_t>(i)] = static_cast<int>(v % static_cast<std::size_t>(m.alphabet));
          v /= static_cast<std::size_t>(m.alphabet);
        }
        grid.points.push_back(PhasePoint::word(word, 0, len + (1 << 16)));
      }
      break;
    }
  }
  return grid;
}

}  // namespace translocal
