#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "translocal/phase_space.hpp"
#include "translocal/symbolic.hpp"

namespace translocal::maps {

inline constexpr std::int64_t kOrbitHorizonCap = 1 << 22;

struct EigenModulus {
  double modulus;
  int multiplicity;
};

/// A dynamical system f: X -> X on one of the supported phase spaces.
///
/// Coordinate systems advance raw coordinates through step(); symbolic
/// systems act on PhasePoint only.
class System {
 public:
  virtual ~System() = default;

  virtual std::string id() const = 0;
  virtual Space space() const = 0;
  /// Number of raw coordinates (0 for symbolic systems).
  virtual std::size_t dim() const { return 1; }
  virtual MetricSpec metric() const { return MetricSpec::for_space(space(), dim()); }

  virtual PhasePoint evaluate(const PhasePoint& x) const;
  virtual void step(std::span<double> x) const = 0;

  virtual bool has_derivative() const { return false; }
  /// log|f'(x)|; throws SingularOrbit at points where f is not differentiable.
  virtual double log_abs_derivative(std::span<const double> x) const;
  /// Lipschitz bound in the phase-space metric.
  virtual double max_expansion() const = 0;

  virtual std::optional<double> htop() const { return std::nullopt; }
  virtual std::string description() const { return id(); }
};

using SystemPtr = std::shared_ptr<const System>;

/// One branch of a piecewise map on [lo, hi).
struct Branch {
  enum class Kind { affine, mobius, sqrt2 };  // a x + b, x/(1-x), sqrt(2x)
  double lo, hi;
  Kind kind = Kind::affine;
  double a = 1.0, b = 0.0;

  double value(double x) const;
  double log_slope(double x) const;
};

/// Piecewise map of the circle or the interval with left-closed branches.
class PiecewiseMap final : public System {
 public:
  PiecewiseMap(std::string id, Space space, std::vector<Branch> branches,
               std::vector<double> singular, std::optional<double> htop,
               std::string description);

  std::string id() const override { return id_; }
  Space space() const override { return space_; }
  void step(std::span<double> x) const override { x[0] = apply(x[0]); }
  double apply(double x) const;
  bool has_derivative() const override { return true; }
  double log_abs_derivative(std::span<const double> x) const override;
  double max_expansion() const override { return max_expansion_; }
  std::optional<double> htop() const override { return htop_; }
  std::string description() const override { return description_; }

  const std::vector<Branch>& branches() const { return branches_; }
  const std::vector<double>& singular_points() const { return singular_; }
  /// True when every branch is affine and maps its domain onto [0,1).
  bool full_affine() const;

 private:
  const Branch& branch_at(double x) const;

  std::string id_;
  Space space_;
  std::vector<Branch> branches_;
  std::vector<double> singular_;
  std::optional<double> htop_;
  std::string description_;
  double max_expansion_ = 1.0;
  bool all_affine_ = true;
};

/// Piecewise-linear zigzag on [0,1]: the level I_n = (2^{-n}, 2^{1-n}] is
/// mapped onto itself by 2n+1 monotone laps of slope +-(2n+1). Below
/// 2^{-cap} the map is the identity.
class StaircaseMap final : public System {
 public:
  explicit StaircaseMap(int cap = 12);

  struct Lap {
    double lo, hi;  // domain (lo, hi]
    bool increasing;
  };

  std::string id() const override;
  Space space() const override { return Space::interval; }
  void step(std::span<double> x) const override { x[0] = apply(x[0]); }
  double apply(double x) const;
  bool has_derivative() const override { return true; }
  double log_abs_derivative(std::span<const double> x) const override;
  double max_expansion() const override { return 2.0 * cap_ + 1.0; }
  std::string description() const override;

  int cap() const { return cap_; }
  /// Level n with x in (2^{-n}, 2^{1-n}], or 0 below the cap (and at x = 0).
  int level(double x) const;
  std::vector<Lap> laps(int level) const;

 private:
  int cap_;
};

/// x -> A x mod 1 on the d-torus for an integer matrix A.
class ToralMap final : public System {
 public:
  ToralMap(Eigen::MatrixXi A, std::string id);

  std::string id() const override { return id_; }
  Space space() const override { return Space::torus; }
  std::size_t dim() const override { return static_cast<std::size_t>(A_.rows()); }
  void step(std::span<double> x) const override;
  double max_expansion() const override;
  std::optional<double> htop() const override;
  std::string description() const override;

  const Eigen::MatrixXi& matrix() const { return A_; }
  std::vector<EigenModulus> eigen_data() const;

 private:
  Eigen::MatrixXi A_;
  Eigen::MatrixXd Ad_;
  std::string id_;
};

/// (r, theta) -> (r(2-r), 3 theta mod 2 pi) on the closed unit disk.
class DiskMap final : public System {
 public:
  std::string id() const override { return "disk"; }
  Space space() const override { return Space::disk; }
  std::size_t dim() const override { return 2; }
  void step(std::span<double> x) const override;
  double max_expansion() const override { return 6.0; }
  std::optional<double> htop() const override;
  std::string description() const override;
};

/// Left shift on one-sided sequences over k symbols, optionally restricted
/// to a coded shift.
class ShiftMap final : public System {
 public:
  explicit ShiftMap(int alphabet, double beta = std::numbers::e);
  ShiftMap(symbolic::CodeWordFamily family, double beta = std::numbers::e);

  std::string id() const override;
  Space space() const override { return Space::symbolic; }
  std::size_t dim() const override { return 0; }
  MetricSpec metric() const override;
  PhasePoint evaluate(const PhasePoint& x) const override;
  void step(std::span<double> x) const override;
  double max_expansion() const override { return beta_; }
  std::optional<double> htop() const override;
  std::string description() const override;

  int alphabet() const { return alphabet_; }
  bool coded() const { return family_.has_value(); }
  const std::optional<symbolic::CodeWordFamily>& family() const { return family_; }
  /// Number of admissible words of length n.
  std::uint64_t word_count(int n) const;

 private:
  int alphabet_;
  double beta_;
  std::optional<symbolic::CodeWordFamily> family_;
};

/// The R-th iterate f^R of a coordinate system.
class IterateMap final : public System {
 public:
  IterateMap(SystemPtr base, int R);

  std::string id() const override;
  Space space() const override { return base_->space(); }
  std::size_t dim() const override { return base_->dim(); }
  MetricSpec metric() const override { return base_->metric(); }
  PhasePoint evaluate(const PhasePoint& x) const override;
  void step(std::span<double> x) const override;
  bool has_derivative() const override { return base_->has_derivative(); }
  double log_abs_derivative(std::span<const double> x) const override;
  double max_expansion() const override;
  std::optional<double> htop() const override;
  std::string description() const override;

  const SystemPtr& base() const { return base_; }
  int power() const { return R_; }

 private:
  SystemPtr base_;
  int R_;
};

/// Identity on the circle.
class IdentityMap final : public System {
 public:
  std::string id() const override { return "identity"; }
  Space space() const override { return Space::circle; }
  void step(std::span<double>) const override {}
  bool has_derivative() const override { return true; }
  double log_abs_derivative(std::span<const double>) const override { return 0.0; }
  double max_expansion() const override { return 1.0; }
  std::optional<double> htop() const override { return 0.0; }
  std::string description() const override { return "identity map of the circle"; }
};

/// Coordinates in which the phase-space metric is computed: Cartesian for
/// the disk, the raw coordinates otherwise.
void metric_coords(Space space, std::span<const double> x, std::span<double> out);

/// [x, f(x), ..., f^{n-1}(x)].
std::vector<PhasePoint> orbit(const System& sys, const PhasePoint& x, std::int64_t n,
                              std::int64_t cap = kOrbitHorizonCap);

/// sum_{j<n} log|f'(f^j x)|.
double log_derivative_sum(const System& sys, const PhasePoint& x, std::int64_t n);

/// Eigenvalue moduli of an integer matrix with algebraic multiplicities,
/// descending. Rows must be equally long and entries integral.
std::vector<EigenModulus> toral_eigen_data(const std::vector<std::vector<double>>& matrix);
std::vector<EigenModulus> toral_eigen_data(const System& sys);

struct CatalogueEntry {
  std::string id;
  std::string space;
  std::string description;
};

/// Resolves a catalogue identifier; throws ConfigError naming unknown ids.
SystemPtr make_system(const std::string& id);
std::vector<CatalogueEntry> catalogue();

class Potential {
 public:
  enum class Kind { zero, constant, geometric, table };

  static Potential zero() { return Potential(Kind::zero); }
  static Potential constant(double c);
  static Potential geometric(double t);
  /// Piecewise-constant values on a uniform grid of [0,1).
  static Potential table(std::vector<double> values);
  /// "zero", "constant:c", "geometric:t" or "table:v0,v1,...".
  static Potential parse(const std::string& id);

  Kind kind() const { return kind_; }
  std::string id() const;
  double parameter() const { return param_; }

  /// phi(x) for raw coordinates x of a point of sys.
  double operator()(const System& sys, std::span<const double> x) const;
  double operator()(const System& sys, const PhasePoint& x) const;
  /// Checks that phi is evaluable on sys.
  void check(const System& sys) const;
  /// sum_{m<n} phi(f^m x).
  double birkhoff_sum(const System& sys, const PhasePoint& x, std::int64_t n) const;

 private:
  explicit Potential(Kind k) : kind_(k) {}
  Kind kind_;
  double param_ = 0.0;
  std::vector<double> table_;
};

}  // namespace translocal::maps
