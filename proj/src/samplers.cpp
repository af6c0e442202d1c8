#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "translocal/errors.hpp"
#include "translocal/separated.hpp"

namespace translocal::separated {

namespace {

// Refines consecutive samples of a 1D ball until their Bowen distance is at
// most theta*eps, feeding samples to the kernel in sweep order.
class Stream1D {
 public:
  Stream1D(const maps::System& sys, std::int64_t n, double eps, const BallCountOptions& opts,
           SeparationResult& res)
      : sys_(sys),
        n_(n),
        gap_(opts.theta * eps),
        cap_(opts.sample_cap),
        res_(res),
        kernel_(sys.space(), 1, n, eps, opts.strict, true),
        on_admit_(opts.on_admit),
        eps_(eps),
        strict_(opts.strict),
        arcs_(opts.arc_shortcut && bowen_balls_are_arcs(sys, eps)) {}

  void run(double s0, double s1, bool include_s1) {
    const auto coarse = static_cast<std::int64_t>(
        std::clamp(std::ceil((s1 - s0) / gap_), 1.0, static_cast<double>(cap_)));
    const auto n = static_cast<std::size_t>(n_);
    std::vector<double> a(n + 1), b(n + 1);
    orbit(s0, a);
    emit(s0, a);
    double sa = s0;
    for (std::int64_t k = 1; k <= coarse; ++k) {
      const double sb = k == coarse ? s1 : s0 + (s1 - s0) * static_cast<double>(k) / static_cast<double>(coarse);
      orbit(sb, b);
      refine(sa, a, sb, b);
      if (k < coarse || include_s1) emit(sb, b);
      sa = sb;
      a.swap(b);
    }
  }

  std::uint64_t count() const { return arcs_ ? admitted_ : kernel_.count(); }

  // On a circle covering map with increasing affine branches, f is injective
  // on arcs of length 2 eps when 2 eps L < 1, and an arc of length 2 L eps
  // meets an arc of length 2 eps in one piece when 2 eps (L + 1) < 1. Bowen
  // balls are then arcs by induction, so in sweep order a sample is blocked
  // iff the last or the first admitted orbit blocks it.
  static bool bowen_balls_are_arcs(const maps::System& sys, double eps) {
    const auto* pm = dynamic_cast<const maps::PiecewiseMap*>(&sys);
    if (!pm || sys.space() != Space::circle || !pm->full_affine()) return false;
    for (const auto& b : pm->branches())
      if (!(b.a > 0.0)) return false;
    return 2.0 * eps * (pm->max_expansion() + 1.0) < 1.0;
  }

 private:
  double point(double s) const { return sys_.space() == Space::circle ? wrap_unit(s) : std::clamp(s, 0.0, 1.0); }

  // Orbit segment followed by its stretch max_{j<n} |Df^j|, or +inf where
  // the derivative is unavailable.
  void orbit(double s, std::span<double> out) {
    double x = point(s);
    double logd = 0.0, stretch = 0.0;
    bool deriv = sys_.has_derivative();
    out[0] = x;
    for (std::int64_t t = 1; t < n_; ++t) {
      if (deriv) {
        try {
          logd += sys_.log_abs_derivative(std::span<const double>(&x, 1));
          stretch = std::max(stretch, logd);
        } catch (const SingularOrbit&) {
          deriv = false;
        }
      }
      sys_.step(std::span<double>(&x, 1));
      out[static_cast<std::size_t>(t)] = x;
    }
    out[static_cast<std::size_t>(n_)] = deriv ? std::exp(stretch) : std::numeric_limits<double>::infinity();
    res_.orbit_evaluations += static_cast<std::uint64_t>(n_ - 1);
  }

  std::span<const double> row(std::span<const double> o) const { return o.first(static_cast<std::size_t>(n_)); }

  void emit(double s, std::span<const double> o) {
    if (++res_.samples > cap_) throw BudgetExceeded("adaptive sample stream for " + sys_.id(), cap_);
    if (arcs_) {
      const auto r = row(o);
      if (blocks(last_, r) || blocks(first_, r)) return;
      if (first_.empty()) first_.assign(r.begin(), r.end());
      last_.assign(r.begin(), r.end());
      ++admitted_;
      if (on_admit_) on_admit_(o.first(1));
      return;
    }
    if (kernel_.offer(row(o), s) && on_admit_) on_admit_(o.first(1));
  }

  bool blocks(const std::vector<double>& a, std::span<const double> r) const {
    if (a.empty()) return false;
    const double d = kernel_.distance(a, r);
    return strict_ ? d <= eps_ : d < eps_;
  }

  // Emits the samples strictly between sa and sb. The interval is split into
  // ceil(stretch * length / gap) equal pieces, which puts affine pieces on a
  // uniform final spacing; pieces that stay wide straddle a jump or a strong
  // nonlinearity and are refined again, by bisection when the stretch
  // predicts no further split.
  void refine(double sa, std::span<const double> A, double sb, std::span<const double> B) {
    const auto n = static_cast<std::size_t>(n_);
    if (kernel_.distance(row(A), row(B)) <= gap_) return;
    const double mid = 0.5 * (sa + sb);
    if (mid <= sa || mid >= sb) return;
    const double predicted = std::min(A[n], B[n]) * (sb - sa) / gap_;
    const auto m = static_cast<std::int64_t>(
        std::isfinite(predicted) && predicted >= 2.0 ? std::min(std::ceil(predicted), 1e12) : 2.0);
    std::vector<double> prev(A.begin(), A.end()), cur(n + 1);
    double ps = sa;
    for (std::int64_t i = 1; i < m; ++i) {
      const double s = sa + (sb - sa) * (static_cast<double>(i) / static_cast<double>(m));
      if (s <= ps || s >= sb) continue;
      orbit(s, cur);
      refine(ps, prev, s, cur);
      emit(s, cur);
      ps = s;
      prev.swap(cur);
    }
    refine(ps, prev, sb, B);
  }

  const maps::System& sys_;
  std::int64_t n_;
  double gap_;
  std::size_t cap_;
  SeparationResult& res_;
  GreedyKernel kernel_;
  std::function<void(std::span<const double>)> on_admit_;
  double eps_;
  bool strict_;
  bool arcs_;
  std::vector<double> first_, last_;
  std::uint64_t admitted_ = 0;
};

SeparationResult count_1d(const maps::System& sys, const BallSpec& K, std::int64_t n, double eps,
                          const BallCountOptions& opts) {
  SeparationResult res;
  Stream1D stream(sys, n, eps, opts, res);
  const double c = K.center.coord(0), r = K.radius;
  if (sys.space() == Space::circle) {
    if (r >= 0.5) {
      stream.run(0.0, 1.0, false);
    } else {
      const double lo = K.closed ? c - r : std::nextafter(c - r, c);
      const double hi = K.closed ? c + r : std::nextafter(c + r, c);
      stream.run(lo, hi, true);
    }
  } else {
    double lo = std::max(0.0, c - r), hi = std::min(1.0, c + r);
    if (!K.closed) {
      if (c - r >= 0.0) lo = std::nextafter(c - r, c);
      if (c + r <= 1.0) hi = std::nextafter(c + r, c);
    }
    if (hi <= lo) {
      stream.run(c, c, false);
    } else {
      stream.run(lo, hi, true);
    }
  }
  res.count = stream.count();
  return res;
}

// Lattice adapted to the real eigenbasis of a toral matrix: spacing
// theta*eps/|lambda_i|^{n-1} along expanding directions, theta*eps along the
// others, filtered to the Chebyshev box.
struct LatticeFrame {
  Eigen::MatrixXd V, Vinv;
  std::vector<double> lambda, h;
  std::vector<std::int64_t> span;  // indices run over [-span_i, span_i]
  std::vector<double> center;
  double r;
  bool closed;

  std::size_t dim() const { return h.size(); }
  Eigen::VectorXd offset(const std::vector<std::int64_t>& k) const {
    Eigen::VectorXd off = Eigen::VectorXd::Zero(V.rows());
    for (std::size_t i = 0; i < dim(); ++i)
      off += static_cast<double>(k[i]) * h[i] * V.col(static_cast<Eigen::Index>(i));
    return off;
  }
  bool inside(const Eigen::VectorXd& off) const {
    const double box = off.cwiseAbs().maxCoeff();
    return closed ? box <= r : box < r;
  }
};

// Empty when the spectrum is not real and diagonalizable.
std::optional<LatticeFrame> lattice_frame(const maps::ToralMap& sys, const BallSpec& K, std::int64_t n,
                                          double eps, const BallCountOptions& opts) {
  const auto d = static_cast<Eigen::Index>(sys.dim());
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.matrix().cast<double>());
  if (es.info() != Eigen::Success) return std::nullopt;
  if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
  LatticeFrame f;
  f.V = es.eigenvectors().real();
  for (Eigen::Index i = 0; i < d; ++i) f.V.col(i) /= f.V.col(i).cwiseAbs().maxCoeff();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f.V);
  if (!lu.isInvertible() || std::fabs(lu.determinant()) < 1e-8) return std::nullopt;
  f.Vinv = lu.inverse();
  f.r = std::min(K.radius, 0.5);
  f.closed = K.closed;
  f.center.assign(K.center.coords().begin(), K.center.coords().end());

  double predicted = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lam = std::fabs(es.eigenvalues()[i].real());
    double hi = opts.theta * eps * std::pow(std::max(1.0, lam), -static_cast<double>(n - 1));
    hi = std::min(hi, f.r);
    const double T = f.r * f.Vinv.row(i).cwiseAbs().sum();
    f.lambda.push_back(lam);
    f.h.push_back(hi);
    f.span.push_back(static_cast<std::int64_t>(std::floor(T / hi)));
    predicted *= 2.0 * static_cast<double>(f.span.back()) + 1.0;
  }
  if (predicted > 8.0 * static_cast<double>(opts.sample_cap)) {
    throw BudgetExceeded("eigen lattice of " + std::to_string(predicted) + " points for " + sys.id(),
                         opts.sample_cap);
  }
  return f;
}

// Calls visit(k, offset) for the lattice points inside the ball, in
// lexicographic index order.
template <class F>
void for_each_lattice_point(const LatticeFrame& f, F&& visit) {
  const std::size_t d = f.dim();
  std::vector<std::int64_t> k(d);
  for (std::size_t i = 0; i < d; ++i) k[i] = -f.span[i];
  while (true) {
    const Eigen::VectorXd off = f.offset(k);
    if (f.inside(off)) visit(k, off);
    std::size_t i = d;
    while (i > 0 && ++k[i - 1] > f.span[i - 1]) {
      k[i - 1] = -f.span[i - 1];
      --i;
    }
    if (i == 0) break;
  }
}

bool eigen_lattice(const maps::ToralMap& sys, const BallSpec& K, std::int64_t n, double eps,
                   const BallCountOptions& opts, std::vector<std::vector<double>>& pts) {
  const auto f = lattice_frame(sys, K, n, eps, opts);
  if (!f) return false;
  for_each_lattice_point(*f, [&](const std::vector<std::int64_t>&, const Eigen::VectorXd& off) {
    std::vector<double> p(f->dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = f->center[i] + off[static_cast<Eigen::Index>(i)];
    pts.push_back(std::move(p));
    if (pts.size() > opts.sample_cap) throw BudgetExceeded("eigen lattice for " + sys.id(), opts.sample_cap);
  });
  return true;
}

// Greedy over the eigen lattice in index order. With 2r < 1/2 and
// ||A||_inf eps < 1/2, two ball points are (n, eps)-close iff their real
// difference v satisfies |A^j v|_inf <= eps for all j < n, so closeness
// depends on the index difference only, and is impossible once
// |dk_i| h_i max(1,|lambda_i|)^{n-1} exceeds eps times the l1 norm of row i
// of V^{-1}. Returns false when the preconditions fail.
bool lattice_greedy(const maps::ToralMap& sys, const BallSpec& K, std::int64_t n, double eps,
                    const BallCountOptions& opts, SeparationResult& res) {
  const Eigen::MatrixXd A = sys.matrix().cast<double>();
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(std::min(K.radius, 0.5) < 0.25) || !(norm * eps < 0.5)) return false;
  const auto f = lattice_frame(sys, K, n, eps, opts);
  if (!f) return false;
  const std::size_t d = f->dim();

  // Index window and the earlier offsets inside it that conflict.
  std::vector<std::int64_t> b(d);
  double window = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double reach = f->Vinv.row(static_cast<Eigen::Index>(i)).cwiseAbs().sum() * eps /
                         (f->h[i] * std::pow(std::max(1.0, f->lambda[i]), static_cast<double>(n - 1)));
    b[i] = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(reach * (1.0 + 1e-9))), 2 * f->span[i]);
    window *= 2.0 * static_cast<double>(b[i]) + 1.0;
  }
  if (window > 1e6) return false;
  auto close = [&](const Eigen::VectorXd& v0) {
    Eigen::VectorXd v = v0;
    for (std::int64_t j = 0; j < n; ++j) {
      if (j) v = A * v;
      const double dj = v.cwiseAbs().maxCoeff();
      if (opts.strict ? dj > eps : dj >= eps) return false;
    }
    return true;
  };
  std::vector<std::int64_t> stride(d);
  std::int64_t total = 1;
  for (std::size_t i = d; i-- > 0;) {
    stride[i] = total;
    total *= 2 * f->span[i] + 1;
  }
  // Lexicographically negative offsets, flat and per axis.
  std::vector<std::int64_t> conflicts, deltas;
  {
    std::vector<std::int64_t> k(d);
    for (std::size_t i = 0; i < d; ++i) k[i] = -b[i];
    while (true) {
      bool negative = false;
      for (std::size_t i = 0; i < d; ++i) {
        if (k[i] != 0) {
          negative = k[i] < 0;
          break;
        }
      }
      if (negative) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i)
          v += static_cast<double>(k[i]) * f->h[i] * f->V.col(static_cast<Eigen::Index>(i));
        if (close(v)) {
          std::int64_t flat = 0;
          for (std::size_t i = 0; i < d; ++i) flat += k[i] * stride[i];
          conflicts.push_back(flat);
          deltas.insert(deltas.end(), k.begin(), k.end());
        }
      }
      std::size_t i = d;
      while (i > 0 && ++k[i - 1] > b[i - 1]) {
        k[i - 1] = -b[i - 1];
        --i;
      }
      if (i == 0) break;
    }
  }

  std::vector<bool> admitted(static_cast<std::size_t>(total), false);
  std::uint64_t count = 0, samples = 0;
  for_each_lattice_point(*f, [&](const std::vector<std::int64_t>& k, const Eigen::VectorXd& off) {
    if (++samples > opts.sample_cap) throw BudgetExceeded("eigen lattice for " + sys.id(), opts.sample_cap);
    std::int64_t flat = 0;
    for (std::size_t i = 0; i < d; ++i) flat += (k[i] + f->span[i]) * stride[i];
    for (std::size_t c = 0; c < conflicts.size(); ++c) {
      const std::int64_t* dk = &deltas[c * d];
      bool in = true;
      for (std::size_t i = 0; i < d && in; ++i) {
        const std::int64_t ki = k[i] + dk[i];
        in = ki >= -f->span[i] && ki <= f->span[i];
      }
      if (in && admitted[static_cast<std::size_t>(flat + conflicts[c])]) return;
    }
    admitted[static_cast<std::size_t>(flat)] = true;
    ++count;
    if (opts.on_admit) {
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = wrap_unit(f->center[i] + off[static_cast<Eigen::Index>(i)]);
      opts.on_admit(x);
    }
  });
  res.count = count;
  res.samples = samples;
  res.orbit_evaluations = 0;
  return true;
}

SeparationResult count_grid(const maps::System& sys, const BallSpec& K, std::int64_t n, double eps,
                            const BallCountOptions& opts) {
  SeparationResult res;
  const std::size_t width = sys.space() == Space::disk ? 2 : sys.dim();
  // Unwrapped points sorted by the first coordinate, which is the sweep key.
  std::vector<std::vector<double>> pts;
  bool lattice = false;
  if (const auto* t = dynamic_cast<const maps::ToralMap*>(&sys)) {
    if (opts.lattice_shortcut && lattice_greedy(*t, K, n, eps, opts, res)) return res;
    lattice = eigen_lattice(*t, K, n, eps, opts, pts);
  }
  if (!lattice) {
    const double L = std::max(1.0, sys.max_expansion());
    double h = opts.theta * eps * std::pow(L, -static_cast<double>(n - 1));
    h = std::min(h, K.radius);
    const double per_axis = 2.0 * std::min(K.radius, 1.0) / h + 1.0;
    if (std::pow(per_axis, static_cast<double>(sys.dim())) > 8.0 * static_cast<double>(opts.sample_cap)) {
      throw BudgetExceeded("uniform grid for " + sys.id(), opts.sample_cap);
    }
    SampleGrid g = sample_grid(K, sys.metric(), h, opts.sample_cap);
    for (const auto& p : g.points) {
      std::vector<double> v(p.coords().begin(), p.coords().end());
      if (sys.space() == Space::torus) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          double o = v[i] - K.center.coord(i);
          o -= std::round(o);
          v[i] = K.center.coord(i) + o;
        }
      }
      pts.push_back(std::move(v));
    }
    res.warnings.push_back("uniform grid sampler at spacing " + std::to_string(h));
  }
  std::vector<double> sweep(pts.size());
  std::vector<double> cart(2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (sys.space() == Space::disk) {
      maps::metric_coords(Space::disk, pts[i], cart);
      sweep[i] = cart[0];
    } else {
      sweep[i] = pts[i][0];
    }
  }
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sweep[a] < sweep[b]; });

  GreedyKernel kernel(sys.space(), width, n, eps, opts.strict, true);
  std::vector<double> row(static_cast<std::size_t>(n) * width), work;
  for (std::size_t idx : order) {
    work = pts[idx];
    if (sys.space() == Space::torus) {
      for (double& v : work) v = wrap_unit(v);
    }
    for (std::int64_t t = 0; t < n; ++t) {
      if (t > 0) sys.step(work);
      maps::metric_coords(sys.space(), work, std::span<double>(row).subspan(static_cast<std::size_t>(t) * width, width));
    }
    res.orbit_evaluations += static_cast<std::uint64_t>(n - 1);
    ++res.samples;
    if (kernel.offer(row, sweep[idx]) && opts.on_admit) {
      work = pts[idx];
      if (sys.space() == Space::torus)
        for (double& v : work) v = wrap_unit(v);
      opts.on_admit(work);
    }
  }
  res.count = kernel.count();
  return res;
}

// Points of a shift space are (n, eps)-close iff they agree on the first
// n - 1 + c symbols with c = ceil(log_beta(1/eps)); one word per class is a
// maximum separated set.
SeparationResult count_symbolic(const maps::System& sys, const BallSpec& K, std::int64_t n, double eps,
                                const BallCountOptions& opts) {
  const auto* shift = dynamic_cast<const maps::ShiftMap*>(&sys);
  if (!shift) throw ContractViolation(sys.id() + " is not a shift system");
  const double beta = sys.metric().beta;
  const double t = std::log(1.0 / eps) / std::log(beta);
  std::int64_t c = opts.strict ? static_cast<std::int64_t>(std::ceil(t - 1e-9))
                               : static_cast<std::int64_t>(std::floor(t + 1e-9)) + 1;
  c = std::max<std::int64_t>(c, 0);
  const std::int64_t L = n - 1 + c;
  const std::int64_t p = symbolic_agreement(K.radius, beta, K.closed);
  SeparationResult res;
  res.method = SeparationResult::Method::exact_symbolic;
  if (L > 4096) throw BudgetExceeded("symbolic class length " + std::to_string(L), 4096);
  std::vector<int> prefix;
  for (std::int64_t i = 0; i < std::min(p, L); ++i) prefix.push_back(K.center.symbol(i));
  if (shift->coded()) {
    const std::uint64_t cnt = symbolic::coded_extension_count(*shift->family(), prefix, static_cast<int>(L));
    res.count = std::max<std::uint64_t>(cnt, 1);
  } else {
    const double cnt = std::pow(static_cast<double>(shift->alphabet()), static_cast<double>(L - static_cast<std::int64_t>(prefix.size())));
    if (cnt > 1.8e19) throw BudgetExceeded("symbolic class count", opts.sample_cap);
    res.count = static_cast<std::uint64_t>(std::llround(cnt));
  }
  res.samples = res.count;
  return res;
}

}  // namespace

SeparationResult ball_separated_count(const maps::System& sys, const BallSpec& K, std::int64_t n,
                                      double epsilon, const BallCountOptions& opts) {
  if (n < 1) throw ContractViolation("separated count needs n >= 1");
  if (!(epsilon > 0.0)) throw ContractViolation("separated count needs eps > 0");
  if (!(opts.theta > 0.0 && opts.theta <= 1.0)) throw ContractViolation("refinement ratio must lie in (0, 1]");
  if (K.center.space() != sys.space()) {
    throw ContractViolation("ball in " + to_string(K.center.space()) + " passed to " + sys.id());
  }
  switch (sys.space()) {
    case Space::circle:
    case Space::interval: return count_1d(sys, K, n, epsilon, opts);
    case Space::torus:
    case Space::disk: return count_grid(sys, K, n, epsilon, opts);
    case Space::symbolic: return count_symbolic(sys, K, n, epsilon, opts);
  }
  throw ContractViolation("unsupported phase space");
}

}  // namespace translocal::separated
