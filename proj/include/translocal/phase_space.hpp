#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace translocal {

enum class Space { circle, torus, interval, disk, symbolic };

std::string to_string(Space s);

/// Read-only access to a (possibly lazily generated) symbol sequence.
///
/// One-sided sequences are indexed from 0; two-sided sequences accept any
/// index with |i| < horizon().
class SymbolSequence {
 public:
  virtual ~SymbolSequence() = default;
  virtual int at(std::int64_t i) const = 0;
  virtual std::int64_t horizon() const = 0;
  virtual bool two_sided() const { return false; }
};

/// Finite word followed by a constant tail symbol (and, when two-sided, a
/// constant left tail).
class WordSequence final : public SymbolSequence {
 public:
  WordSequence(std::vector<int> word, int tail, std::int64_t horizon,
               bool two_sided = false, int left_tail = 0);
  int at(std::int64_t i) const override;
  std::int64_t horizon() const override { return horizon_; }
  bool two_sided() const override { return two_sided_; }
  const std::vector<int>& word() const { return word_; }

 private:
  std::vector<int> word_;
  int tail_;
  std::int64_t horizon_;
  bool two_sided_;
  int left_tail_;
};

/// Sequence defined by a generator function, evaluated on demand.
class GeneratedSequence final : public SymbolSequence {
 public:
  GeneratedSequence(std::function<int(std::int64_t)> gen, std::int64_t horizon,
                    bool two_sided = false)
      : gen_(std::move(gen)), horizon_(horizon), two_sided_(two_sided) {}
  int at(std::int64_t i) const override;
  std::int64_t horizon() const override { return horizon_; }
  bool two_sided() const override { return two_sided_; }

 private:
  std::function<int(std::int64_t)> gen_;
  std::int64_t horizon_;
  bool two_sided_;
};

/// A point of one of the supported phase spaces.
///
/// Coordinates: circle {x in [0,1)}, torus {x_1..x_d in [0,1)}, interval
/// {x in [0,1]}, disk {r in [0,1], theta in [0,2pi)}. Symbolic points refer
/// to a shared sequence plus a shift offset.
class PhasePoint {
 public:
  static PhasePoint circle(double x);
  static PhasePoint torus(std::vector<double> x);
  static PhasePoint interval(double x);
  static PhasePoint disk(double r, double theta);
  static PhasePoint symbolic(std::shared_ptr<const SymbolSequence> seq,
                             std::int64_t offset = 0);
  /// One-sided word padded with `tail` up to `horizon`.
  static PhasePoint word(std::vector<int> w, int tail = 0,
                         std::int64_t horizon = 1 << 20);

  /// Builds a point of `space` from raw coordinates, reducing them into the space.
  static PhasePoint from_coords(Space space, std::span<const double> coords);

  Space space() const { return space_; }
  std::span<const double> coords() const { return coords_; }
  double coord(std::size_t i) const { return coords_.at(i); }
  std::size_t dim() const { return coords_.size(); }

  int symbol(std::int64_t i) const;
  std::int64_t horizon() const;
  bool two_sided() const;
  std::int64_t offset() const { return offset_; }
  const std::shared_ptr<const SymbolSequence>& sequence() const { return seq_; }
  PhasePoint shifted(std::int64_t k = 1) const;

 private:
  Space space_ = Space::circle;
  std::vector<double> coords_;
  std::shared_ptr<const SymbolSequence> seq_;
  std::int64_t offset_ = 0;
};

/// Reduces x into [0,1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// min(|a-b|, 1-|a-b|) for a, b in [0,1).
inline double circle_gap(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return d > 0.5 ? 1.0 - d : d;
}

struct MetricSpec {
  Space space = Space::circle;
  std::size_t dim = 1;
  double beta = std::numbers::e;  // symbolic decay base, > 1
  int alphabet = 2;                // symbolic alphabet size, used by grids

  static MetricSpec for_space(Space s, std::size_t dim = 1);
};

/// d(a,b): circle gap, Chebyshev on the torus, |a-b| on the interval,
/// Euclidean in the plane for the disk, beta^{-m} for symbol sequences.
double distance(const PhasePoint& a, const PhasePoint& b, const MetricSpec& m);

struct BallSpec {
  PhasePoint center;
  double radius = 1.0;
  bool closed = true;

  BallSpec(PhasePoint c, double r, bool is_closed = true);
  bool contains(const PhasePoint& p, const MetricSpec& m) const;
};

/// Number of leading symbols two sequences must share to be within `radius`.
std::int64_t symbolic_agreement(double radius, double beta, bool closed);

struct SampleGrid {
  BallSpec ball;
  double resolution;
  std::vector<PhasePoint> points;
};

inline constexpr std::size_t kDefaultGridCap = 5'000'000;

/// Deterministic uniform grid over a ball. Throws ContractViolation when
/// resolution is not in (0, radius], BudgetExceeded above `cap` points.
SampleGrid sample_grid(const BallSpec& ball, const MetricSpec& m, double resolution,
                       std::size_t cap = kDefaultGridCap);

}  // namespace translocal
