#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "translocal/entropy.hpp"
#include "translocal/maps.hpp"
#include "translocal/measures.hpp"
#include "translocal/phase_space.hpp"

namespace translocal::pressure {

/// A finite union of balls and explicit points.
struct Region {
  std::vector<BallSpec> balls;
  std::vector<PhasePoint> points;

  static Region ball(BallSpec b);
  static Region point(PhasePoint p);
  /// The whole space: one ball of radius 1 around `center`.
  static Region whole(const PhasePoint& center);
  Region& add(BallSpec b);
  Region& add(PhasePoint p);

  bool empty() const { return balls.empty() && points.empty(); }
  std::string describe() const;
  void check(const maps::System& sys) const;
};

enum class Family { uniform, refined, vitali };
std::string to_string(Family f);

struct CoverElement {
  PhasePoint center;
  std::int64_t n;
};

struct CoverWeight {
  double value = 0.0;        // may underflow to 0 or overflow to inf; see log_value
  double log_value = 0.0;
  double s = 0.0;
  double scale = 0.0;        // r for Bowen balls, omega for metric balls
  bool translocal = false;
  std::int64_t N = 1;
  std::string potential;
  Family family = Family::uniform;
  std::uint64_t element_count = 0;
  /// The chosen cover, when elements were kept (uniform covers only).
  std::vector<CoverElement> elements;
};

struct CoverOptions {
  /// Largest ball order used; 0 picks N_max + 4 for Bowen balls (capped by
  /// the sample budget) and N_max + 8 for metric balls.
  std::int64_t horizon = 0;
  std::size_t budget = kDefaultGridCap;
  double theta = 0.45;
  /// Explicit sample surrogate for the refined and pruned families.
  std::size_t refine_cap = 200'000;
  bool keep_elements = false;
};

/// Covers of a region at every order n in [N_min, horizon], from which
/// M(s, N) = min over families and orders n >= N is evaluated for any s.
class CoverSet {
 public:
  /// Bowen balls B_n(x_j, r).
  static CoverSet bowen(const maps::System& sys, const Region& Z, const maps::Potential& phi, double r,
                        std::int64_t N_min, std::int64_t N_max, const CoverOptions& opts = {});
  /// Metric balls B(x_j, e^{-omega n}).
  static CoverSet translocal(const maps::System& sys, const Region& Z, const maps::Potential& phi, double omega,
                             std::int64_t N_min, std::int64_t N_max, const CoverOptions& opts = {});

  CoverWeight weight(double s, std::int64_t N) const;
  double log_weight(double s, std::int64_t N) const { return weight(s, N).log_value; }

  bool is_translocal() const { return translocal_; }
  std::int64_t N_min() const { return N_min_; }
  std::int64_t N_max() const { return N_max_; }
  std::int64_t horizon() const { return horizon_; }
  double scale() const { return scale_; }
  const std::string& potential() const { return potential_; }
  /// Uniform cover elements of order n (kept with opts.keep_elements).
  const std::vector<CoverElement>& elements(std::int64_t n) const;
  /// Natural s-range containing every critical value.
  std::pair<double, double> s_range() const { return s_range_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  struct Level {
    std::int64_t n;
    double log_sum_uniform;  // log sum_j exp(S_n phi(x_j)), uniform family
    std::uint64_t count_uniform;
    double log_sum_vitali = 0.0;
    std::uint64_t count_vitali = 0;
    bool have_vitali = false;
    std::vector<CoverElement> elements;
  };
  // Refinement tree over the explicit surrogate: a node at order n stands
  // for its Bowen ball, its children cover the node's samples at order n+1.
  struct Tree {
    std::int64_t n_lo = 0, n_hi = -1;
    std::vector<std::vector<double>> birkhoff;           // per order, per center
    std::vector<std::vector<std::uint32_t>> child_start;  // CSR per order (n < n_hi)
    std::vector<std::vector<std::uint32_t>> children;
  };

  double refined_log_weight(double s, std::int64_t N) const;

  bool translocal_ = false;
  double scale_ = 0.0;
  std::string potential_;
  std::int64_t N_min_ = 1, N_max_ = 1, horizon_ = 1;
  std::vector<Level> levels_;   // by n - N_min
  Tree tree_;
  std::pair<double, double> s_range_{0.0, 1.0};
  std::vector<std::string> notes_;
};

/// M_Z(s, r, phi, N): minimum over the implemented cover families.
CoverWeight cover_weight(const maps::System& sys, const Region& Z, const maps::Potential& phi, double s, double r,
                         std::int64_t N, const CoverOptions& opts = {});

/// M_{f,Z,omega}(s, phi, N) with metric balls B(x_j, e^{-omega n_j}).
CoverWeight translocal_cover_weight(const maps::System& sys, const Region& Z, const maps::Potential& phi, double s,
                                    double omega, std::int64_t N, const CoverOptions& opts = {});

enum class Variant { bowen_ball, translocal_upper, translocal_lower };
std::string to_string(Variant v);

struct CriticalExponent {
  double value = 0.0;
  double s_lo = 0.0, s_hi = 0.0;
  /// The bracket widened by what the finite N-window cannot resolve: log M
  /// falls at unit rate in s, so a trend at or below the growth threshold
  /// leaves the zero crossing up to the threshold above s_hi; both ends also
  /// move by two standard errors of the fitted N-slope.
  double lo = 0.0, hi = 0.0;
  Variant variant = Variant::bowen_ball;
  std::int64_t N_min = 0, N_max = 0;
  /// (s, N-trend of log M) at every evaluated s.
  std::vector<std::pair<double, double>> trends;
};

/// Slope of log M(s, N) over the N-window that decides growth: the full
/// least-squares slope for Bowen balls, the max (upper) or min (lower)
/// windowed slope for metric balls.
double n_trend(const std::vector<std::pair<double, double>>& logM_by_N, Variant v);

/// Trend above which log M counts as growing in N.
inline constexpr double kGrowthThreshold = 0.005;

/// Critical s from a cover set: the s-grid must bracket the transition
/// (growing at the low end, not growing at the high end); bisection then
/// narrows the bracket to `tol`. Throws Unbracketed with the trend report.
CriticalExponent critical_exponent(const CoverSet& covers, Variant v, const std::vector<double>& s_grid,
                                   double tol = 0.02);
/// Same with an s-grid spanning covers.s_range() in steps of 0.25.
CriticalExponent critical_exponent(const CoverSet& covers, Variant v, double tol = 0.02);

/// Critical s from stored weights over an (s, N) grid, without bisection:
/// the bracket is the pair of adjacent grid values where growth stops.
CriticalExponent critical_exponent(const std::vector<CoverWeight>& weights, Variant v);

struct AuditOptions {
  entropy::Schedule schedule = entropy::Schedule::defaults();
  double r = 0.05;
  std::int64_t N_min = 4, N_max = 8;
  double tolerance = 0.1;
  CoverOptions cover;
};

struct AuditReport {
  bool passed = false;
  std::optional<double> omega;
  double tolerance = 0.0;
  std::vector<std::string> points;
  std::vector<double> uppers, lowers;
  double max_upper = 0.0, min_lower = 0.0;
  CriticalExponent upper_exponent, lower_exponent;  // equal for Bowen balls
  std::vector<std::string> lines;
};

/// Checks P_Z <= max sampled upper local pressure + tol and
/// P_Z >= min sampled lower local pressure - tol (translocal versions when
/// omega is given).
AuditReport ma_wen_audit(const maps::System& sys, const measures::Measure& mu, const maps::Potential& phi,
                         const Region& Z, std::optional<double> omega, std::size_t samples,
                         const AuditOptions& opts = {});

/// Deterministic sample points of a region, spread by a low-discrepancy sequence.
std::vector<PhasePoint> region_samples(const maps::System& sys, const Region& Z, std::size_t count);

}  // namespace translocal::pressure
