#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "translocal/maps.hpp"
#include "translocal/phase_space.hpp"
#include "translocal/separated.hpp"

namespace translocal::entropy {

enum class Mode { limsup, liminf };

std::string to_string(Mode m);

/// Growth rate of one epsilon rung.
struct RungRate {
  double epsilon = 0.0;
  double value = 0.0;
  double residual = 0.0;
  std::int64_t n_min = 0, n_max = 0;
};

struct RateEstimate {
  double value = 0.0;
  double raw = 0.0;                 // before the clamp at 0, if any
  std::int64_t n_min = 0, n_max = 0;
  double epsilon = 0.0;             // rung the value is read at
  double residual = 0.0;
  Mode mode = Mode::limsup;
  /// value(smallest eps) - value(previous rung); NaN with a single rung.
  double trend = std::numeric_limits<double>::quiet_NaN();
  std::vector<RungRate> ladder;
  /// (n, log count) data of the reported rung.
  std::vector<std::pair<double, double>> data;
  bool incomplete = false;          // some cells were dropped
  std::vector<std::string> notes;
};

/// Least-squares slopes of log counts against n over the tail window (the
/// last half of the points, at least 3): the maximum windowed slope in
/// limsup mode, the minimum in liminf mode. Residual is the RMS deviation of
/// a single fit over the tail.
RateEstimate growth_rate(std::vector<std::pair<double, double>> log_counts, Mode mode);

struct Schedule {
  std::vector<std::int64_t> n;
  std::vector<double> epsilon;      // descending
  std::size_t budget = kDefaultGridCap;
  double theta = 0.45;              // sampler refinement ratio
  bool strict = true;

  /// n = 6..14, eps = {0.05, 0.02, 0.01}, 5e6 samples per cell.
  static Schedule defaults();
  static Schedule make(std::int64_t n_min, std::int64_t n_max, std::vector<double> eps,
                       std::size_t budget = kDefaultGridCap);
  void validate() const;
  separated::BallCountOptions options() const;
};

/// Log counts log S(n, eps, K_n) for one rung; cells past the sample budget
/// are dropped together with every larger n.
struct RungData {
  double epsilon;
  std::vector<std::pair<double, double>> points;
  bool truncated = false;
};

/// Growth rate per rung, read at the smallest eps with at least 3 points;
/// the trend is the difference to the previous usable rung.
RateEstimate ladder_rate(const std::vector<RungData>& rungs, Mode mode, bool clamp);

/// Estimate of h_top(f, K), read at the smallest eps with at least 3 cells.
RateEstimate restricted_entropy(const maps::System& sys, const BallSpec& K, const Schedule& sched);

/// Surrogate of h_top(x): per eps the infimum over closed delta-balls of the
/// restricted rate, reported at the smallest eps.
RateEstimate yz_entropy_function(const maps::System& sys, const PhasePoint& x,
                                 const std::vector<double>& delta_ladder, const Schedule& sched);

struct TranslocalEstimate {
  RateEstimate upper, lower;
};

/// Upper and lower translocal entropy at z: growth rates of S(n, eps,
/// closed B(z, e^{-omega n})), clamped at 0.
TranslocalEstimate translocal_entropy(const maps::System& sys, const PhasePoint& z, double omega,
                                      const Schedule& sched);

struct LyapunovEstimate {
  double upper, lower;
};

/// Extremes of (1/k) log|Df^k(x)| over k in [n/2, n]; top eigenvalue
/// log-modulus for toral systems.
LyapunovEstimate lyapunov_exponent(const maps::System& sys, const PhasePoint& x, std::int64_t n);

/// sum over |lambda_i| >= e^omega of (log|lambda_i| - omega), with multiplicity.
double toral_translocal(const std::vector<maps::EigenModulus>& eigs, double omega);

/// (k, -(1/k) log d(f^k u, v)) for k = 1..k_max; +inf where f^k u = v.
std::vector<std::pair<std::int64_t, double>> approach_rate(const maps::System& sys, const PhasePoint& u,
                                                           const PhasePoint& v, std::int64_t k_max);

}  // namespace translocal::entropy
