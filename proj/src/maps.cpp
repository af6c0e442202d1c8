#include "translocal/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "translocal/errors.hpp"

namespace translocal::maps {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_coordinates(const System& sys) {
  if (sys.space() == Space::symbolic) {
    throw ContractViolation(sys.id() + " acts on symbol sequences, not coordinates");
  }
}

}  // namespace

PhasePoint System::evaluate(const PhasePoint& x) const {
  require_coordinates(*this);
  if (x.space() != space() || x.dim() != dim()) {
    throw ContractViolation("point in " + to_string(x.space()) + " passed to " + id());
  }
  std::vector<double> c(x.coords().begin(), x.coords().end());
  step(c);
  return PhasePoint::from_coords(space(), c);
}

double System::log_abs_derivative(std::span<const double>) const {
  throw ContractViolation(id() + " has no scalar derivative rule");
}

double Branch::value(double x) const {
  switch (kind) {
    case Kind::affine: return a * x + b;
    case Kind::mobius: return x / (1.0 - x);
    case Kind::sqrt2: return std::sqrt(2.0 * x);
  }
  return x;
}

double Branch::log_slope(double x) const {
  switch (kind) {
    case Kind::affine: return std::log(std::fabs(a));
    case Kind::mobius: return -2.0 * std::log1p(-x);
    case Kind::sqrt2:
      if (x <= 0.0) throw SingularOrbit("sqrt(2x) is not differentiable at 0");
      return -0.5 * std::log(2.0 * x);
  }
  return 0.0;
}

PiecewiseMap::PiecewiseMap(std::string id, Space space, std::vector<Branch> branches,
                           std::vector<double> singular, std::optional<double> htop,
                           std::string description)
    : id_(std::move(id)),
      space_(space),
      branches_(std::move(branches)),
      singular_(std::move(singular)),
      htop_(htop),
      description_(std::move(description)) {
  if (space_ != Space::circle && space_ != Space::interval) {
    throw ContractViolation("piecewise maps live on the circle or the interval");
  }
  if (branches_.empty() || branches_.front().lo != 0.0 || branches_.back().hi != 1.0) {
    throw ContractViolation("branches of " + id_ + " must partition [0,1)");
  }
  for (std::size_t i = 1; i < branches_.size(); ++i) {
    if (branches_[i].lo != branches_[i - 1].hi) {
      throw ContractViolation("branches of " + id_ + " must be contiguous");
    }
  }
  max_expansion_ = 0.0;
  for (const Branch& br : branches_) {
    switch (br.kind) {
      case Branch::Kind::affine: max_expansion_ = std::max(max_expansion_, std::fabs(br.a)); break;
      case Branch::Kind::mobius:
        max_expansion_ = std::max(max_expansion_, 1.0 / ((1.0 - br.hi) * (1.0 - br.hi)));
        all_affine_ = false;
        break;
      case Branch::Kind::sqrt2:
        max_expansion_ = std::numeric_limits<double>::infinity();
        all_affine_ = false;
        break;
    }
  }
  std::sort(singular_.begin(), singular_.end());
}

const Branch& PiecewiseMap::branch_at(double x) const {
  auto it = std::upper_bound(branches_.begin(), branches_.end(), x,
                             [](double v, const Branch& b) { return v < b.lo; });
  if (it == branches_.begin()) return branches_.front();
  return *(it - 1);
}

double PiecewiseMap::apply(double x) const {
  const double y = branch_at(x).value(x);
  if (space_ == Space::circle) return wrap_unit(y);
  return std::clamp(y, 0.0, 1.0);
}

double PiecewiseMap::log_abs_derivative(std::span<const double> x) const {
  if (std::binary_search(singular_.begin(), singular_.end(), x[0])) {
    throw SingularOrbit(id_ + " is not differentiable at " + std::to_string(x[0]));
  }
  return branch_at(x[0]).log_slope(x[0]);
}

bool PiecewiseMap::full_affine() const {
  if (!all_affine_) return false;
  for (const Branch& br : branches_) {
    const double y0 = br.a * br.lo + br.b, y1 = br.a * br.hi + br.b;
    if (std::fabs(std::min(y0, y1)) > 1e-12 || std::fabs(std::max(y0, y1) - 1.0) > 1e-12) return false;
  }
  return true;
}

StaircaseMap::StaircaseMap(int cap) : cap_(cap) {
  if (cap < 1 || cap > 60) throw ContractViolation("staircase level cap must lie in [1, 60]");
}

std::string StaircaseMap::id() const {
  return cap_ == 12 ? "staircase" : "staircase:" + std::to_string(cap_);
}

std::string StaircaseMap::description() const {
  return "zigzag staircase, level (2^-n, 2^(1-n)] carries 2n+1 laps, h_top(x) = log(2n+1)";
}

int StaircaseMap::level(double x) const {
  if (x <= 0.0) return 0;
  // Smallest n with 2^{-n} < x, i.e. x in (2^{-n}, 2^{1-n}].
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
  const int n = m == 0.5 ? 2 - e : 1 - e;
  return n > cap_ ? 0 : std::max(n, 1);
}

double StaircaseMap::apply(double x) const {
  const int n = level(x);
  if (n == 0) return x;
  const double a = std::ldexp(1.0, -n), b = 2.0 * a;
  const double m = 2.0 * n + 1.0;
  const double w = a / m;
  auto j = static_cast<int>(std::ceil((x - a) / w)) - 1;
  j = std::clamp(j, 0, 2 * n);
  const double t = x - (a + j * w);
  const double y = j % 2 == 0 ? a + m * t : b - m * t;
  return std::clamp(y, a, b);
}

double StaircaseMap::log_abs_derivative(std::span<const double> x) const {
  const int n = level(x[0]);
  if (n == 0) return 0.0;
  const double a = std::ldexp(1.0, -n);
  const double w = a / (2.0 * n + 1.0);
  const double r = (x[0] - a) / w;
  if (r == std::floor(r) || x[0] == 2.0 * a) {
    throw SingularOrbit("staircase lap endpoint " + std::to_string(x[0]));
  }
  return std::log(2.0 * n + 1.0);
}

std::vector<StaircaseMap::Lap> StaircaseMap::laps(int n) const {
  if (n < 1 || n > cap_) throw ContractViolation("staircase level out of range");
  const double a = std::ldexp(1.0, -n);
  const int m = 2 * n + 1;
  const double w = a / m;
  std::vector<Lap> out;
  for (int j = 0; j < m; ++j) {
    out.push_back({a + j * w, j + 1 == m ? 2.0 * a : a + (j + 1) * w, j % 2 == 0});
  }
  return out;
}

ToralMap::ToralMap(Eigen::MatrixXi A, std::string id) : A_(std::move(A)), id_(std::move(id)) {
  if (A_.rows() != A_.cols() || A_.rows() == 0) throw ContractViolation("toral matrix must be square");
  Ad_ = A_.cast<double>();
}

void ToralMap::step(std::span<double> x) const {
  const auto d = static_cast<std::size_t>(A_.rows());
  double y[16];
  std::vector<double> big;
  double* out = y;
  if (d > 16) {
    big.resize(d);
    out = big.data();
  }
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += A_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
    out[i] = wrap_unit(s);
  }
  std::copy(out, out + d, x.begin());
}

double ToralMap::max_expansion() const {
  return Ad_.cwiseAbs().rowwise().sum().maxCoeff();
}

std::vector<EigenModulus> ToralMap::eigen_data() const {
  Eigen::EigenSolver<Eigen::MatrixXd> es(Ad_, false);
  if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed for " + id_);
  std::vector<double> mods;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  std::vector<EigenModulus> out;
  for (double m : mods) {
    if (!out.empty() && std::fabs(out.back().modulus - m) <= 1e-6 * std::max(1.0, m)) {
      ++out.back().multiplicity;
    } else {
      out.push_back({m, 1});
    }
  }
  return out;
}

std::optional<double> ToralMap::htop() const {
  double h = 0.0;
  for (const auto& e : eigen_data()) {
    if (e.modulus > 1.0 + 1e-12) h += e.multiplicity * std::log(e.modulus);
  }
  return h;
}

std::string ToralMap::description() const {
  return "toral endomorphism x -> A x mod 1, h_top = sum of log|lambda| over |lambda| > 1";
}

void DiskMap::step(std::span<double> x) const {
  const double r = x[0];
  x[0] = std::clamp(r * (2.0 - r), 0.0, 1.0);
  double t = std::fmod(3.0 * x[1], kTwoPi);
  if (t < 0.0) t += kTwoPi;
  x[1] = t >= kTwoPi ? 0.0 : t;
}

std::optional<double> DiskMap::htop() const { return std::log(3.0); }

std::string DiskMap::description() const {
  return "closed disk, (r, theta) -> (r(2-r), 3 theta), h_omega(0) = log 3 (1 - omega/log 2)";
}

ShiftMap::ShiftMap(int alphabet, double beta) : alphabet_(alphabet), beta_(beta) {
  if (alphabet < 1) throw ContractViolation("shift alphabet must be nonempty");
  if (!(beta > 1.0)) throw ContractViolation("symbolic metric base must exceed 1");
}

ShiftMap::ShiftMap(symbolic::CodeWordFamily family, double beta)
    : alphabet_(family.alphabet()), beta_(beta), family_(std::move(family)) {
  if (!(beta > 1.0)) throw ContractViolation("symbolic metric base must exceed 1");
}

std::string ShiftMap::id() const {
  return family_ ? "codedshift:" + family_->id() : "fullshift:" + std::to_string(alphabet_);
}

MetricSpec ShiftMap::metric() const {
  MetricSpec m = MetricSpec::for_space(Space::symbolic);
  m.beta = beta_;
  m.alphabet = alphabet_;
  return m;
}

PhasePoint ShiftMap::evaluate(const PhasePoint& x) const {
  if (x.space() != Space::symbolic) throw ContractViolation("shift applied to a non-symbolic point");
  return x.shifted(1);
}

void ShiftMap::step(std::span<double>) const {
  throw ContractViolation(id() + " acts on symbol sequences, not coordinates");
}

std::optional<double> ShiftMap::htop() const {
  if (!family_) return std::log(static_cast<double>(alphabet_));
  return symbolic::kraft_entropy(*family_).h;
}

std::string ShiftMap::description() const {
  if (!family_) return "full shift, h_top = log k";
  return "coded shift, h_top solves sum_k e^{-h |C_k|} = 1";
}

std::uint64_t ShiftMap::word_count(int n) const {
  if (n < 0) throw ContractViolation("word length must be >= 0");
  if (family_) return symbolic::coded_language_count(*family_, n, symbolic::Language::prefixes);
  std::uint64_t c = 1;
  for (int i = 0; i < n; ++i) {
    if (c > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(alphabet_)) {
      throw BudgetExceeded("word count overflows 64 bits", 64);
    }
    c *= static_cast<std::uint64_t>(alphabet_);
  }
  return c;
}

IterateMap::IterateMap(SystemPtr base, int R) : base_(std::move(base)), R_(R) {
  if (!base_) throw ContractViolation("iterate of a null system");
  if (R < 1) throw ContractViolation("iterate power must be >= 1");
}

std::string IterateMap::id() const { return "iterate:" + std::to_string(R_) + ":" + base_->id(); }

PhasePoint IterateMap::evaluate(const PhasePoint& x) const {
  PhasePoint y = x;
  for (int i = 0; i < R_; ++i) y = base_->evaluate(y);
  return y;
}

void IterateMap::step(std::span<double> x) const {
  for (int i = 0; i < R_; ++i) base_->step(x);
}

double IterateMap::log_abs_derivative(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  double s = 0.0;
  for (int i = 0; i < R_; ++i) {
    s += base_->log_abs_derivative(y);
    base_->step(y);
  }
  return s;
}

double IterateMap::max_expansion() const { return std::pow(base_->max_expansion(), R_); }

std::optional<double> IterateMap::htop() const {
  auto h = base_->htop();
  if (!h) return std::nullopt;
  return R_ * *h;
}

std::string IterateMap::description() const {
  return "R-th iterate of " + base_->id() + ", h_top(f^R) = R h_top(f)";
}

void metric_coords(Space space, std::span<const double> x, std::span<double> out) {
  if (space == Space::disk) {
    out[0] = x[0] * std::cos(x[1]);
    out[1] = x[0] * std::sin(x[1]);
    return;
  }
  std::copy(x.begin(), x.end(), out.begin());
}

std::vector<PhasePoint> orbit(const System& sys, const PhasePoint& x, std::int64_t n, std::int64_t cap) {
  if (n < 1) throw ContractViolation("orbit length must be >= 1");
  if (n > cap) throw BudgetExceeded("orbit of length " + std::to_string(n), static_cast<std::size_t>(cap));
  if (x.space() != sys.space()) throw ContractViolation("point in " + to_string(x.space()) + " passed to " + sys.id());
  std::vector<PhasePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(x);
  for (std::int64_t j = 1; j < n; ++j) out.push_back(sys.evaluate(out.back()));
  return out;
}

double log_derivative_sum(const System& sys, const PhasePoint& x, std::int64_t n) {
  if (n < 1) throw ContractViolation("derivative sum needs n >= 1");
  if (!sys.has_derivative()) throw ContractViolation(sys.id() + " has no derivative rule");
  if (x.space() != sys.space()) throw ContractViolation("point in " + to_string(x.space()) + " passed to " + sys.id());
  std::vector<double> c(x.coords().begin(), x.coords().end());
  double s = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    s += sys.log_abs_derivative(c);
    sys.step(c);
  }
  return s;
}

std::vector<EigenModulus> toral_eigen_data(const std::vector<std::vector<double>>& matrix) {
  const auto d = matrix.size();
  if (d == 0) throw ContractViolation("empty toral matrix");
  Eigen::MatrixXi A(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (matrix[i].size() != d) throw ContractViolation("toral matrix must be square");
    for (std::size_t j = 0; j < d; ++j) {
      const double v = matrix[i][j];
      if (v != std::round(v) || std::fabs(v) > 1e9) throw ContractViolation("toral matrix entries must be integers");
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<int>(v);
    }
  }
  return ToralMap(A, "toral").eigen_data();
}

std::vector<EigenModulus> toral_eigen_data(const System& sys) {
  const auto* t = dynamic_cast<const ToralMap*>(&sys);
  if (!t) throw ContractViolation(sys.id() + " is not a toral system");
  return t->eigen_data();
}

}  // namespace translocal::maps
