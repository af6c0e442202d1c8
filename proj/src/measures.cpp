#include "translocal/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "translocal/errors.hpp"
#include "translocal/separated.hpp"

namespace translocal::measures {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxPieces = 1 << 20;
constexpr double kMinHits = 30;

double number(const std::string& s, const std::string& id) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size() && std::isfinite(v)) return v;
  } catch (...) {
  }
  throw ConfigError("bad number '" + s + "' in measure id '" + id + "'");
}

std::vector<double> numbers(const std::string& list, const std::string& id) {
  std::vector<double> v;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(number(item, id));
  if (v.empty()) throw ConfigError("empty parameter list in measure id '" + id + "'");
  return v;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Pieces of a Bowen ball under a circle map made of affine branches: each
// piece is an interval of offsets [lo, hi] from the current orbit point,
// reached from time 0 with total stretch `jac`.
struct Piece {
  double lo, hi, jac;
};

// One application of f to every piece, splitting at branch boundaries.
bool push_forward(const maps::PiecewiseMap& f, double c, double c_next, std::vector<Piece>& pieces) {
  std::vector<Piece> out;
  for (const Piece& p : pieces) {
    const double z1 = c + p.lo, z2 = c + p.hi;
    for (double u = std::floor(z1); u <= z2; u += 1.0) {
      const double a = std::max(z1, u) - u, b = std::min(z2, u + 1.0) - u;
      if (b < a) continue;
      for (const auto& br : f.branches()) {
        const double y1 = std::max(a, br.lo), y2 = std::min(b, br.hi);
        if (y2 <= y1 && !(y1 == y2 && a == b)) continue;
        const double w1 = br.a * y1 + br.b - c_next, w2 = br.a * y2 + br.b - c_next;
        out.push_back({std::min(w1, w2), std::max(w1, w2), p.jac * std::fabs(br.a)});
      }
    }
    if (out.size() > kMaxPieces) return false;
  }
  pieces.swap(out);
  return true;
}

// Keeps the parts of each piece within eps of an integer offset.
void clip(std::vector<Piece>& pieces, double eps) {
  std::vector<Piece> out;
  for (const Piece& p : pieces) {
    for (double m = std::ceil(p.lo - eps); m <= std::floor(p.hi + eps); m += 1.0) {
      const double lo = std::max(p.lo, m - eps), hi = std::min(p.hi, m + eps);
      if (hi > lo) out.push_back({lo - m, hi - m, p.jac});
    }
  }
  pieces.swap(out);
}

std::optional<double> circle_bowen_exact(const maps::PiecewiseMap& f, int R, const PhasePoint& x, std::int64_t n,
                                         double eps) {
  for (const auto& br : f.branches())
    if (br.kind != maps::Branch::Kind::affine) return std::nullopt;
  const double e = std::min(eps, 0.5);
  std::vector<Piece> pieces{{-e, e, 1.0}};
  double c = x.coord(0);
  for (std::int64_t j = 1; j < n; ++j) {
    for (int r = 0; r < R; ++r) {
      const double next = f.apply(c);
      if (!push_forward(f, c, next, pieces)) return std::nullopt;
      c = next;
    }
    clip(pieces, e);
    if (pieces.empty()) return 0.0;
  }
  double m = 0.0;
  for (const Piece& p : pieces) m += (p.hi - p.lo) / p.jac;
  return std::min(m, 1.0);
}

// Area of {v : |A^j v|_inf < eps, j < n}; valid as the Bowen ball measure
// when eps < 1/4 and ||A||_inf eps < 1/2.
std::optional<double> torus2_bowen_exact(const maps::ToralMap& f, std::int64_t n, double eps) {
  const Eigen::Matrix2d A = f.matrix().cast<double>();
  if (!(eps < 0.25) || !(A.cwiseAbs().rowwise().sum().maxCoeff() * eps < 0.5)) return std::nullopt;
  std::vector<Eigen::Vector2d> poly{{-eps, -eps}, {eps, -eps}, {eps, eps}, {-eps, eps}};
  Eigen::Matrix2d M = A;
  // Clip by |row . v| <= eps for each row of A^j.
  auto halfplane = [&](const Eigen::Vector2d& a, double b) {
    std::vector<Eigen::Vector2d> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& p = poly[i];
      const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
      const double fp = a.dot(p) - b, fq = a.dot(q) - b;
      if (fp <= 0) out.push_back(p);
      if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
    }
    poly.swap(out);
  };
  for (std::int64_t j = 1; j < n && !poly.empty(); ++j) {
    for (int r = 0; r < 2; ++r) {
      const Eigen::Vector2d row = M.row(r).transpose();
      halfplane(row, eps);
      halfplane(-row, eps);
    }
    M = A * M;
    // Once the strips are far thinner than double resolution the polygon degenerates.
    if (M.cwiseAbs().maxCoeff() > 1e15) return std::nullopt;
  }
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return std::fabs(area) / 2.0;
}

MeasureValue qmc_bowen(const maps::System& sys, const Measure& mu, const PhasePoint& x, std::int64_t n, double eps,
                       std::size_t samples) {
  const std::size_t d = sys.dim();
  if (d > std::size(kPrimes)) throw ContractViolation("quasi-Monte-Carlo fallback supports up to 12 dimensions");
  const double e = std::min(eps, 0.5);
  const double base = ball_measure(mu, BallSpec(x, e, false));
  std::size_t hits = 0;
  std::vector<double> y(d);
  for (std::size_t i = 1; i <= samples; ++i) {
    for (std::size_t k = 0; k < d; ++k) y[k] = wrap_unit(x.coord(k) + (2.0 * radical_inverse(i, kPrimes[k]) - 1.0) * e);
    const PhasePoint py = PhasePoint::from_coords(sys.space(), y);
    if (separated::bowen_distance(sys, x, py, n) < eps) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  MeasureValue v;
  v.value = base * p;
  v.stderr_ = base * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  v.exact = false;
  v.flagged = static_cast<double>(hits) < kMinHits;
  return v;
}

bool is_fixed(const maps::System& sys, const PhasePoint& p) {
  if (p.space() != sys.space()) return false;
  if (sys.space() == Space::symbolic) {
    const auto q = sys.evaluate(p);
    const std::int64_t h = std::min<std::int64_t>({p.horizon(), q.horizon(), 4096});
    for (std::int64_t i = 0; i < h; ++i)
      if (p.symbol(i) != q.symbol(i)) return false;
    return true;
  }
  return distance(sys.evaluate(p), p, sys.metric()) <= 1e-12;
}

LocalPressurePair finish(entropy::RateEstimate up, entropy::RateEstimate lo, std::optional<double> omega,
                         const PhasePoint& x, const maps::Potential& phi) {
  LocalPressurePair out;
  out.upper = {up.value, entropy::Mode::limsup, omega, describe(x), phi.id(), std::move(up)};
  out.lower = {lo.value, entropy::Mode::liminf, omega, describe(x), phi.id(), std::move(lo)};
  return out;
}

void check_pair(const maps::System& sys, const Measure& mu, const PhasePoint& x) {
  if (mu.space() != sys.space()) throw ContractViolation("measure " + mu.id() + " does not live on " + sys.id());
  if (x.space() != sys.space()) throw ContractViolation("point does not belong to the phase space of " + sys.id());
  if (!certified_invariant(sys, mu))
    throw ContractViolation("(" + sys.id() + ", " + mu.id() + ") is not a certified invariant pair");
}

}  // namespace

Measure Measure::lebesgue_circle() { return Measure(Kind::lebesgue_circle); }

Measure Measure::lebesgue_torus(std::size_t dim) {
  if (dim < 1) throw ContractViolation("torus dimension must be >= 1");
  Measure m(Kind::lebesgue_torus);
  m.dim_ = dim;
  return m;
}

Measure Measure::bernoulli(std::vector<double> p, double beta) {
  if (p.size() < 2) throw ContractViolation("Bernoulli measure needs at least 2 symbols");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ContractViolation("Bernoulli weights must be nonnegative");
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-9) throw ContractViolation("Bernoulli weights must sum to 1");
  if (!(beta > 1.0)) throw ContractViolation("metric base must exceed 1");
  Measure m(Kind::bernoulli);
  m.p_ = std::move(p);
  m.dim_ = 0;
  m.beta_ = beta;
  return m;
}

Measure Measure::dirac(PhasePoint p) {
  Measure m(Kind::dirac);
  m.dim_ = p.dim();
  m.atom_ = std::move(p);
  return m;
}

Measure Measure::parse(const std::string& id) {
  if (id == "lebesgue-circle") return lebesgue_circle();
  if (id == "lebesgue-torus") return lebesgue_torus(2);
  if (id.rfind("lebesgue-torus:", 0) == 0) {
    const double d = number(id.substr(15), id);
    if (d < 1 || d != std::floor(d)) throw ConfigError("bad torus dimension in measure id '" + id + "'");
    return lebesgue_torus(static_cast<std::size_t>(d));
  }
  try {
    if (id.rfind("bernoulli:", 0) == 0) return bernoulli(numbers(id.substr(10), id));
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string(e.what()) + " in measure id '" + id + "'");
  }
  if (id.rfind("dirac:", 0) == 0) {
    auto v = numbers(id.substr(6), id);
    return dirac(v.size() == 1 ? PhasePoint::circle(v[0]) : PhasePoint::torus(v));
  }
  throw ConfigError("unknown measure id '" + id + "'");
}

std::string Measure::id() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::lebesgue_circle: return "lebesgue-circle";
    case Kind::lebesgue_torus:
      os << "lebesgue-torus:" << dim_;
      break;
    case Kind::bernoulli:
      os << "bernoulli:";
      for (std::size_t i = 0; i < p_.size(); ++i) os << (i ? "," : "") << p_[i];
      break;
    case Kind::dirac:
      os << "dirac:" << describe(*atom_);
      break;
  }
  return os.str();
}

Space Measure::space() const {
  switch (kind_) {
    case Kind::lebesgue_circle: return Space::circle;
    case Kind::lebesgue_torus: return Space::torus;
    case Kind::bernoulli: return Space::symbolic;
    case Kind::dirac: return atom_->space();
  }
  return Space::circle;
}

std::string describe(const PhasePoint& p) {
  std::ostringstream os;
  os.precision(10);
  if (p.space() == Space::symbolic) {
    const std::int64_t h = std::min<std::int64_t>(p.horizon(), 16);
    for (std::int64_t i = 0; i < h; ++i) os << p.symbol(i);
    if (p.horizon() > h) os << "...";
    return os.str();
  }
  for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? "," : "") << p.coord(i);
  return os.str();
}

double ball_measure(const Measure& mu, const BallSpec& ball) {
  if (ball.center.space() != mu.space()) throw ContractViolation("ball and measure live on different spaces");
  switch (mu.kind()) {
    case Measure::Kind::lebesgue_circle: return std::min(1.0, 2.0 * ball.radius);
    case Measure::Kind::lebesgue_torus:
      if (ball.center.dim() != mu.dim()) throw ContractViolation("ball and measure have different dimensions");
      return std::pow(std::min(1.0, 2.0 * ball.radius), static_cast<double>(mu.dim()));
    case Measure::Kind::bernoulli: {
      const std::int64_t m = symbolic_agreement(ball.radius, mu.beta(), ball.closed);
      double v = 1.0;
      for (std::int64_t i = 0; i < m && v > 0.0; ++i) {
        const int s = ball.center.symbol(i);
        v *= s >= 0 && static_cast<std::size_t>(s) < mu.weights().size() ? mu.weights()[static_cast<std::size_t>(s)] : 0.0;
      }
      return v;
    }
    case Measure::Kind::dirac: {
      MetricSpec m = MetricSpec::for_space(mu.space(), std::max<std::size_t>(mu.dim(), 1));
      return ball.contains(*mu.atom(), m) ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

MeasureValue bowen_ball_measure(const maps::System& sys, const Measure& mu, const PhasePoint& x, std::int64_t n,
                                double eps, std::size_t qmc_samples) {
  if (n < 1) throw ContractViolation("Bowen ball needs n >= 1");
  if (!(eps > 0.0)) throw ContractViolation("Bowen ball needs eps > 0");
  if (mu.space() != sys.space() || x.space() != sys.space())
    throw ContractViolation("system, measure and point must share a phase space");
  MeasureValue v;
  if (n == 1) {
    v.value = ball_measure(mu, BallSpec(x, eps, false));
    return v;
  }
  switch (mu.kind()) {
    case Measure::Kind::dirac:
      v.value = separated::bowen_distance(sys, x, *mu.atom(), n) < eps ? 1.0 : 0.0;
      return v;
    case Measure::Kind::bernoulli: {
      const auto* shift = dynamic_cast<const maps::ShiftMap*>(&sys);
      if (!shift || shift->coded()) throw ContractViolation("Bernoulli measures are supported on full shifts");
      const std::int64_t m = symbolic_agreement(eps, sys.metric().beta, false);
      double val = 1.0;
      for (std::int64_t i = 0; i < n - 1 + m && val > 0.0; ++i) {
        const int s = x.symbol(i);
        val *= static_cast<std::size_t>(s) < mu.weights().size() ? mu.weights()[static_cast<std::size_t>(s)] : 0.0;
      }
      v.value = val;
      return v;
    }
    case Measure::Kind::lebesgue_circle: {
      const maps::System* base = &sys;
      int R = 1;
      if (const auto* it = dynamic_cast<const maps::IterateMap*>(&sys)) {
        base = it->base().get();
        R = it->power();
      }
      if (base->id() == "identity") {
        v.value = ball_measure(mu, BallSpec(x, eps, false));
        return v;
      }
      if (const auto* pw = dynamic_cast<const maps::PiecewiseMap*>(base); pw && pw->space() == Space::circle) {
        if (auto m = circle_bowen_exact(*pw, R, x, n, eps)) {
          v.value = *m;
          return v;
        }
      }
      break;
    }
    case Measure::Kind::lebesgue_torus:
      if (const auto* t = dynamic_cast<const maps::ToralMap*>(&sys); t && t->dim() == 2) {
        if (auto m = torus2_bowen_exact(*t, n, eps)) {
          v.value = *m;
          return v;
        }
      }
      break;
  }
  return qmc_bowen(sys, mu, x, n, eps, qmc_samples);
}

double preimage_length_defect(const maps::PiecewiseMap& sys, int arcs) {
  if (sys.space() != Space::circle) throw ContractViolation("preimage test needs a circle map");
  double worst = 0.0;
  for (int k = 0; k < arcs; ++k) {
    // Arcs of varied length and position, including ones across 0.
    const double a = std::fmod(0.6180339887498949 * (k + 1), 1.0);
    const double len = 0.01 + 0.9 * std::fmod(0.7548776662466927 * (k + 1), 1.0);
    double pre = 0.0;
    for (const auto& br : sys.branches()) {
      if (br.kind != maps::Branch::Kind::affine) return kInf;
      const double w1 = br.a * br.lo + br.b, w2 = br.a * br.hi + br.b;
      const double lo = std::min(w1, w2), hi = std::max(w1, w2);
      double covered = 0.0;
      for (double m = std::floor(lo - a) - 1.0; m <= std::ceil(hi - a) + 1.0; m += 1.0)
        covered += std::max(0.0, std::min(hi, a + len + m) - std::max(lo, a + m));
      pre += covered / std::fabs(br.a);
    }
    worst = std::max(worst, std::fabs(pre - len));
  }
  return worst;
}

bool certified_invariant(const maps::System& sys, const Measure& mu) {
  if (mu.space() != sys.space()) return false;
  if (mu.kind() == Measure::Kind::dirac) return is_fixed(sys, *mu.atom());
  if (const auto* it = dynamic_cast<const maps::IterateMap*>(&sys)) return certified_invariant(*it->base(), mu);
  switch (mu.kind()) {
    case Measure::Kind::lebesgue_circle:
      if (sys.id() == "identity") return true;
      if (const auto* pw = dynamic_cast<const maps::PiecewiseMap*>(&sys))
        return pw->space() == Space::circle && preimage_length_defect(*pw) < 1e-9;
      return false;
    case Measure::Kind::lebesgue_torus:
      if (const auto* t = dynamic_cast<const maps::ToralMap*>(&sys))
        return t->dim() == mu.dim() && t->matrix().cast<double>().determinant() != 0.0;
      return false;
    case Measure::Kind::bernoulli:
      if (const auto* s = dynamic_cast<const maps::ShiftMap*>(&sys))
        return !s->coded() && static_cast<std::size_t>(s->alphabet()) == mu.weights().size() &&
               std::fabs(sys.metric().beta - mu.beta()) < 1e-12;
      return false;
    case Measure::Kind::dirac: break;
  }
  return false;
}

LocalPressurePair local_pressure(const maps::System& sys, const Measure& mu, const maps::Potential& phi,
                                 const PhasePoint& x, const entropy::Schedule& sched) {
  sched.validate();
  check_pair(sys, mu, x);
  if (sys.space() != Space::symbolic) phi.check(sys);
  std::vector<entropy::RungData> rungs;
  for (double eps : sched.epsilon) {
    entropy::RungData rung{eps, {}, false};
    for (std::int64_t n : sched.n) {
      const MeasureValue m = bowen_ball_measure(sys, mu, x, n, eps);
      const double s = phi.birkhoff_sum(sys, x, n);
      rung.points.emplace_back(static_cast<double>(n), m.value > 0.0 ? s - std::log(m.value) : kInf);
    }
    rungs.push_back(std::move(rung));
  }
  return finish(entropy::ladder_rate(rungs, entropy::Mode::limsup, false),
                entropy::ladder_rate(rungs, entropy::Mode::liminf, false), std::nullopt, x, phi);
}

LocalPressurePair brin_katok(const maps::System& sys, const Measure& mu, const PhasePoint& x,
                             const entropy::Schedule& sched) {
  return local_pressure(sys, mu, maps::Potential::zero(), x, sched);
}

LocalPressurePair translocal_local_pressure(const maps::System& sys, const Measure& mu, const maps::Potential& phi,
                                            const PhasePoint& x, double omega, const entropy::Schedule& sched) {
  sched.validate();
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ContractViolation("omega must be >= 0");
  check_pair(sys, mu, x);
  if (sys.space() != Space::symbolic) phi.check(sys);
  entropy::RungData rung{std::numeric_limits<double>::quiet_NaN(), {}, false};
  for (std::int64_t n : sched.n) {
    const double m = ball_measure(mu, BallSpec(x, std::exp(-omega * static_cast<double>(n)), true));
    const double s = phi.birkhoff_sum(sys, x, n);
    rung.points.emplace_back(static_cast<double>(n), m > 0.0 ? s - std::log(m) : kInf);
  }
  const std::vector<entropy::RungData> rungs{rung};
  return finish(entropy::ladder_rate(rungs, entropy::Mode::limsup, false),
                entropy::ladder_rate(rungs, entropy::Mode::liminf, false), omega, x, phi);
}

}  // namespace translocal::measures
