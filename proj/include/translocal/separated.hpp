#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "translocal/maps.hpp"
#include "translocal/phase_space.hpp"

namespace translocal::separated {

/// max_{0<=j<n} d(f^j a, f^j b) in the system's metric.
double bowen_distance(const maps::System& sys, const PhasePoint& a, const PhasePoint& b,
                      std::int64_t n);

struct SeparationResult {
  enum class Method { greedy, exact_symbolic };

  std::uint64_t count = 0;
  Method method = Method::greedy;
  std::uint64_t orbit_evaluations = 0;  // single map applications
  std::uint64_t samples = 0;            // candidate points scanned
  std::vector<std::string> warnings;
};

std::string to_string(SeparationResult::Method m);

struct SeparationQuery {
  maps::SystemPtr system;
  std::vector<PhasePoint> samples;  // scanned in this order
  std::int64_t n = 1;
  double epsilon = 0.1;
  bool strict = true;               // separated iff d_n > eps (else d_n >= eps)
  double resolution = 0.0;          // sample spacing, if known; checked against eps L^{-(n-1)}

  static SeparationQuery from_grid(maps::SystemPtr sys, const SampleGrid& grid, std::int64_t n,
                                   double epsilon, bool strict = true);
};

/// Greedy maximal (n, eps)-separated subset of the samples.
SeparationResult separated_count(const SeparationQuery& q);

/// Number of admissible words of length n of a shift system.
std::uint64_t symbolic_word_count(const maps::System& sys, int n);

struct BallCountOptions {
  bool strict = true;
  /// Consecutive samples are refined until their Bowen distance is <= theta * eps.
  /// Values near 1/k make sample spacings commensurate with eps on affine maps.
  double theta = 0.45;
  std::size_t sample_cap = kDefaultGridCap;
  /// On tori with a real diagonalizable matrix, decide closeness of lattice
  /// samples from their index difference instead of running the kernel.
  bool lattice_shortcut = true;
  /// On circle covering maps with small eps, compare each sample with the
  /// first and last admitted orbits only (Bowen balls are arcs there).
  bool arc_shortcut = true;
  /// Called with the raw time-0 coordinates of every admitted sample
  /// (coordinate spaces only).
  std::function<void(std::span<const double>)> on_admit;
};

/// Lower bound on S(n, eps, K) for a ball K, with a sampler chosen per space:
/// adaptive bisection on the circle and the interval, an eigen-adapted
/// lattice on tori, a uniform grid on the disk, and exact prefix classes on
/// shift spaces. Throws BudgetExceeded past opts.sample_cap samples.
SeparationResult ball_separated_count(const maps::System& sys, const BallSpec& K, std::int64_t n,
                                      double epsilon, const BallCountOptions& opts = {});

/// Streaming greedy admission over orbit segments given in metric
/// coordinates (n rows of `width` values, time-major).
///
/// With `ordered` set, candidates must arrive with non-decreasing `sweep`
/// keys (the time-0 position along the first coordinate, unwrapped), and
/// admitted orbits that can no longer conflict are evicted. Admission
/// decisions do not depend on eviction.
class GreedyKernel {
 public:
  GreedyKernel(Space space, std::size_t width, std::int64_t n, double epsilon, bool strict,
               bool ordered = true);

  /// Admits the orbit iff it is separated from every admitted orbit.
  bool offer(std::span<const double> orbit, double sweep);
  /// As offer(); returns -1 on admission, else the admission index of an
  /// admitted orbit within eps.
  std::int64_t offer_or_blocker(std::span<const double> orbit, double sweep);
  /// Admission indices of all live admitted orbits within eps, ascending.
  void covering(std::span<const double> orbit, std::vector<std::uint64_t>& out);
  std::uint64_t count() const { return admitted_; }
  /// Bowen distance between two orbit segments in metric coordinates.
  double distance(std::span<const double> a, std::span<const double> b) const;

 private:
  struct Key {
    std::size_t time, coord;
  };

  bool conflicts(std::span<const double> a, std::span<const double> b) const;
  template <class F>
  void scan(std::span<const double> orbit, F&& hit);
  std::int64_t cell(double v, std::size_t k) const;
  void buckets(std::span<const double> orbit, std::vector<std::uint64_t>& out) const;
  std::uint64_t bucket_of(std::span<const double> orbit) const;
  void insert(std::uint32_t slot, std::uint64_t bucket);
  void maybe_compact();
  void maybe_grow();
  void rebuild(bool rehash);

  static constexpr std::size_t kMaxKeys = 8;

  Space space_;
  std::size_t width_;
  std::int64_t n_;
  double eps_;
  bool strict_;
  std::vector<Key> keys_;            // candidates; the first active_ are hashed
  std::size_t active_ = 0;
  std::vector<std::int64_t> cells_;  // cells per unit length per key
  bool wraps_;
  double offset_;                    // added before cell lookup (disk: +1)

  // Live admitted orbits occupy [0, perm_) and [lo_, orbits_.size()/row_).
  std::vector<double> orbits_;
  std::vector<double> sweeps_;
  std::vector<std::uint64_t> ordinals_;
  std::vector<std::uint64_t> bucket_ids_;
  std::size_t row_;
  std::size_t perm_ = 0, lo_ = 0;
  bool ordered_;
  bool have_first_ = false;
  double first_sweep_ = 0.0, last_sweep_ = 0.0;
  std::uint64_t admitted_ = 0;

  // Open-addressing table bucket -> head slot, chained through next_.
  std::vector<std::uint64_t> table_keys_;
  std::vector<std::uint32_t> table_heads_;
  std::vector<std::uint32_t> next_;
  std::size_t table_used_ = 0;
  mutable std::vector<std::uint64_t> scratch_;
};

}  // namespace translocal::separated
