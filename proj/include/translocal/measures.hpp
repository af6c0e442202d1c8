#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "translocal/entropy.hpp"
#include "translocal/maps.hpp"
#include "translocal/phase_space.hpp"

namespace translocal::measures {

/// A Borel probability measure on one of the phase spaces.
class Measure {
 public:
  enum class Kind { lebesgue_circle, lebesgue_torus, bernoulli, dirac };

  static Measure lebesgue_circle();
  static Measure lebesgue_torus(std::size_t dim = 2);
  /// Product measure with symbol weights p (summing to 1).
  static Measure bernoulli(std::vector<double> p, double beta = std::numbers::e);
  static Measure dirac(PhasePoint p);
  /// "lebesgue-circle", "lebesgue-torus[:d]", "bernoulli:p0,p1,...",
  /// "dirac:x" (circle) or "dirac:x1,x2,..." (torus).
  static Measure parse(const std::string& id);

  Kind kind() const { return kind_; }
  std::string id() const;
  Space space() const;
  std::size_t dim() const { return dim_; }
  const std::vector<double>& weights() const { return p_; }
  const std::optional<PhasePoint>& atom() const { return atom_; }
  double beta() const { return beta_; }

 private:
  explicit Measure(Kind k) : kind_(k) {}
  Kind kind_;
  std::size_t dim_ = 1;
  std::vector<double> p_;
  double beta_ = std::numbers::e;
  std::optional<PhasePoint> atom_;
};

/// Measure value; exact unless `sampled`, in which case stderr is the
/// quasi-Monte-Carlo standard error and `flagged` marks too few hits.
struct MeasureValue {
  double value = 0.0;
  double stderr_ = 0.0;
  bool exact = true;
  bool flagged = false;
};

/// mu(ball), in closed form for every supported measure.
double ball_measure(const Measure& mu, const BallSpec& ball);

/// mu{y : d(f^j x, f^j y) < eps for j < n}. Exact for Dirac and Bernoulli
/// measures, for Lebesgue measure under affine circle maps (interval
/// propagation) and under 2-dimensional toral maps (polygon clipping);
/// quasi-Monte-Carlo otherwise.
MeasureValue bowen_ball_measure(const maps::System& sys, const Measure& mu, const PhasePoint& x,
                                std::int64_t n, double eps, std::size_t qmc_samples = 1 << 16);

/// Whether (sys, mu) is a certified invariant pair: Lebesgue under
/// piecewise-affine full-branch circle maps with a passing preimage-length
/// test and under toral automorphisms, uniform Bernoulli on full shifts,
/// Dirac at fixed points, iterates of certified pairs.
bool certified_invariant(const maps::System& sys, const Measure& mu);

/// max over test arcs J of |mu(f^{-1} J) - mu(J)| for Lebesgue under a
/// piecewise-affine circle map.
double preimage_length_defect(const maps::PiecewiseMap& sys, int arcs = 64);

struct LocalPressureEstimate {
  double value = 0.0;
  entropy::Mode mode = entropy::Mode::limsup;
  std::optional<double> omega;  // absent for the Bowen-ball version
  std::string point;
  std::string potential;
  entropy::RateEstimate window;
};

struct LocalPressurePair {
  LocalPressureEstimate upper, lower;
};

/// Growth rates of sum_{m<n} phi(f^m x) - log mu(B_n(x, eps)) over the
/// schedule; zero-measure balls give +inf.
LocalPressurePair local_pressure(const maps::System& sys, const Measure& mu, const maps::Potential& phi,
                                 const PhasePoint& x, const entropy::Schedule& sched);

/// local_pressure with phi = 0.
LocalPressurePair brin_katok(const maps::System& sys, const Measure& mu, const PhasePoint& x,
                             const entropy::Schedule& sched);

/// Growth rates of sum_{m<n} phi(f^m x) - log mu(B(x, e^{-omega n})).
LocalPressurePair translocal_local_pressure(const maps::System& sys, const Measure& mu,
                                            const maps::Potential& phi, const PhasePoint& x, double omega,
                                            const entropy::Schedule& sched);

std::string describe(const PhasePoint& p);

}  // namespace translocal::measures
