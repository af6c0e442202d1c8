#include "translocal/separated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "translocal/errors.hpp"

namespace translocal::separated {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();
constexpr double kSweepSlack = 1e-12;
// Probe margin against rounding in distance and cell computations.
constexpr double kCellSlack = 1e-9;
// Cost of one bucket probe relative to one conflict check.
constexpr double kProbeCost = 4.0;

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::size_t metric_width(const maps::System& sys) {
  return sys.space() == Space::disk ? 2 : sys.dim();
}

}  // namespace

std::string to_string(SeparationResult::Method m) {
  return m == SeparationResult::Method::greedy ? "greedy" : "exact-symbolic";
}

GreedyKernel::GreedyKernel(Space space, std::size_t width, std::int64_t n, double epsilon,
                           bool strict, bool ordered)
    : space_(space), width_(width), n_(n), eps_(epsilon), strict_(strict) {
  if (n < 1) throw ContractViolation("Bowen distance needs n >= 1");
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
  if (width == 0 || space == Space::symbolic) throw ContractViolation("kernel needs coordinate orbits");
  ordered_ = ordered;
  row_ = static_cast<std::size_t>(n) * width;
  wraps_ = space == Space::circle || space == Space::torus;
  offset_ = space == Space::disk ? 1.0 : 0.0;
  const double span = space == Space::disk ? 2.0 : 1.0;

  // Candidate hash keys, best first. Late times spread an orbit family
  // furthest; intermediate times split the families that fold onto the same
  // late cell.
  const auto last = static_cast<std::int64_t>(n - 1);
  const std::int64_t times[] = {last,         (2 * last) / 3, last / 3, last - 1, last / 2,
                                (5 * last) / 6, last / 6,      last - 2, 0};
  std::vector<std::int64_t> seen;
  for (std::int64_t t : times) {
    if (t < 0 || std::find(seen.begin(), seen.end(), t) != seen.end()) continue;
    seen.push_back(t);
    for (std::size_t c = 0; c < width && keys_.size() < kMaxKeys; ++c)
      keys_.push_back({static_cast<std::size_t>(t), c});
  }
  const auto per_unit = static_cast<std::int64_t>(std::max(1.0, std::floor(span / (2.0 * epsilon + 4.0 * kCellSlack))));
  cells_.assign(keys_.size(), std::min<std::int64_t>(per_unit, std::int64_t{1} << 40));
  active_ = std::min<std::size_t>(2, keys_.size());
  table_keys_.assign(1024, kEmpty);
  table_heads_.assign(1024, kNone);
}

double GreedyKernel::distance(std::span<const double> a, std::span<const double> b) const {
  double d = 0.0;
  for (std::int64_t t = 0; t < n_; ++t) {
    const std::size_t o = static_cast<std::size_t>(t) * width_;
    double dt = 0.0;
    switch (space_) {
      case Space::circle:
      case Space::torus:
        for (std::size_t c = 0; c < width_; ++c) dt = std::max(dt, circle_gap(a[o + c], b[o + c]));
        break;
      case Space::interval: dt = std::fabs(a[o] - b[o]); break;
      case Space::disk: dt = std::hypot(a[o] - b[o], a[o + 1] - b[o + 1]); break;
      case Space::symbolic: break;
    }
    d = std::max(d, dt);
  }
  return d;
}

bool GreedyKernel::conflicts(std::span<const double> a, std::span<const double> b) const {
  // Latest times separate fastest under expansion, so scan backwards.
  for (std::int64_t t = n_ - 1; t >= 0; --t) {
    const std::size_t o = static_cast<std::size_t>(t) * width_;
    double dt = 0.0;
    switch (space_) {
      case Space::circle:
      case Space::torus:
        for (std::size_t c = 0; c < width_; ++c) dt = std::max(dt, circle_gap(a[o + c], b[o + c]));
        break;
      case Space::interval: dt = std::fabs(a[o] - b[o]); break;
      case Space::disk: dt = std::hypot(a[o] - b[o], a[o + 1] - b[o + 1]); break;
      case Space::symbolic: break;
    }
    if (strict_ ? dt > eps_ : dt >= eps_) return false;
  }
  return true;
}

std::int64_t GreedyKernel::cell(double v, std::size_t k) const {
  const std::int64_t m = cells_[k];
  const double span = space_ == Space::disk ? 2.0 : 1.0;
  if (wraps_) {
    auto c = static_cast<std::int64_t>(std::floor(wrap_unit(v) * static_cast<double>(m)));
    return ((c % m) + m) % m;
  }
  auto c = static_cast<std::int64_t>(std::floor((v + offset_) / span * static_cast<double>(m)));
  return std::clamp<std::int64_t>(c, 0, m - 1);
}

std::uint64_t GreedyKernel::bucket_of(std::span<const double> orbit) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::size_t k = 0; k < active_; ++k) {
    const double v = orbit[keys_[k].time * width_ + keys_[k].coord];
    h = mix(h ^ static_cast<std::uint64_t>(cell(v, k)));
  }
  return h == kEmpty ? h - 1 : h;
}

void GreedyKernel::buckets(std::span<const double> orbit, std::vector<std::uint64_t>& out) const {
  // Cells are at least 2 eps wide, so [v - eps, v + eps] meets at most the
  // cells of its two endpoints.
  std::int64_t lo[kMaxKeys], hi[kMaxKeys];
  for (std::size_t k = 0; k < active_; ++k) {
    const double v = orbit[keys_[k].time * width_ + keys_[k].coord];
    lo[k] = cell(v - eps_ - kCellSlack, k);
    hi[k] = cell(v + eps_ + kCellSlack, k);
  }
  out.clear();
  const std::size_t K = active_;
  for (std::uint32_t mask = 0; mask < (1u << K); ++mask) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    bool dup = false;
    for (std::size_t k = 0; k < K; ++k) {
      const bool up = (mask >> k) & 1u;
      if (up && hi[k] == lo[k]) {
        dup = true;
        break;
      }
      h = mix(h ^ static_cast<std::uint64_t>(up ? hi[k] : lo[k]));
    }
    if (dup) continue;
    out.push_back(h == kEmpty ? h - 1 : h);
  }
}

void GreedyKernel::insert(std::uint32_t slot, std::uint64_t bucket) {
  if (2 * (table_used_ + 1) > table_keys_.size()) {
    std::vector<std::uint64_t> keys(table_keys_.size() * 2, kEmpty);
    std::vector<std::uint32_t> heads(keys.size(), kNone);
    const std::size_t mask = keys.size() - 1;
    for (std::size_t i = 0; i < table_keys_.size(); ++i) {
      if (table_keys_[i] == kEmpty) continue;
      std::size_t j = table_keys_[i] & mask;
      while (keys[j] != kEmpty) j = (j + 1) & mask;
      keys[j] = table_keys_[i];
      heads[j] = table_heads_[i];
    }
    table_keys_.swap(keys);
    table_heads_.swap(heads);
  }
  const std::size_t mask = table_keys_.size() - 1;
  std::size_t j = bucket & mask;
  while (table_keys_[j] != kEmpty && table_keys_[j] != bucket) j = (j + 1) & mask;
  if (table_keys_[j] == kEmpty) {
    table_keys_[j] = bucket;
    ++table_used_;
  }
  if (next_.size() <= slot) next_.resize(slot + 1, kNone);
  next_[slot] = table_heads_[j];
  table_heads_[j] = slot;
}

void GreedyKernel::rebuild(bool rehash) {
  const std::size_t total = sweeps_.size();
  std::size_t w = perm_;
  for (std::size_t r = lo_; r < total; ++r, ++w) {
    std::copy_n(orbits_.begin() + static_cast<std::ptrdiff_t>(r * row_), row_,
                orbits_.begin() + static_cast<std::ptrdiff_t>(w * row_));
    sweeps_[w] = sweeps_[r];
    ordinals_[w] = ordinals_[r];
    bucket_ids_[w] = bucket_ids_[r];
  }
  orbits_.resize(w * row_);
  sweeps_.resize(w);
  ordinals_.resize(w);
  bucket_ids_.resize(w);
  lo_ = perm_;
  std::size_t cap = 1024;
  while (cap < 4 * w) cap *= 2;
  table_keys_.assign(cap, kEmpty);
  table_heads_.assign(cap, kNone);
  table_used_ = 0;
  next_.assign(w, kNone);
  if (rehash)
    for (std::size_t s = 0; s < w; ++s)
      bucket_ids_[s] = bucket_of(std::span<const double>(orbits_).subspan(s * row_, row_));
  for (std::size_t s = 0; s < w; ++s) insert(static_cast<std::uint32_t>(s), bucket_ids_[s]);
}

void GreedyKernel::maybe_compact() {
  const std::size_t dead = lo_ - perm_;
  const std::size_t live = sweeps_.size() - dead;
  if (dead > 65536 && dead > live) rebuild(false);
}

void GreedyKernel::maybe_grow() {
  // Expected work per offer with K keys: 2^K probes plus the live orbits
  // sharing the probed cells.
  const double live = static_cast<double>(perm_ + sweeps_.size() - lo_);
  auto cost = [&](std::size_t K) {
    double sel = 1.0;
    for (std::size_t k = 0; k < K; ++k) sel *= std::min(1.0, 2.0 / static_cast<double>(cells_[k]));
    return kProbeCost * std::ldexp(1.0, static_cast<int>(K)) + live * sel;
  };
  std::size_t K = active_;
  while (K < keys_.size() && cost(K + 1) < cost(K)) ++K;
  if (K == active_) return;
  active_ = K;
  rebuild(true);
}

bool GreedyKernel::offer(std::span<const double> orbit, double sweep) { return offer_or_blocker(orbit, sweep) < 0; }

std::int64_t GreedyKernel::offer_or_blocker(std::span<const double> orbit, double sweep) {
  if (orbit.size() != row_) throw ContractViolation("orbit segment has the wrong length");
  if (ordered_) {
    if (!have_first_) {
      have_first_ = true;
      first_sweep_ = last_sweep_ = sweep;
    }
    if (sweep < last_sweep_ - kSweepSlack) throw ContractViolation("sweep keys must be non-decreasing");
    last_sweep_ = sweep;
    // Orbits whose time-0 position trails by more than eps cannot conflict.
    const double cutoff = sweep - eps_ - kSweepSlack;
    while (lo_ < sweeps_.size() && sweeps_[lo_] < cutoff) ++lo_;
    maybe_compact();
  }

  std::int64_t blocker = -1;
  scan(orbit, [&](std::uint32_t s) {
    blocker = static_cast<std::int64_t>(ordinals_[s]);
    return true;
  });
  if (blocker >= 0) return blocker;

  const auto slot = static_cast<std::uint32_t>(sweeps_.size());
  if (slot == kNone) throw BudgetExceeded("admitted orbit count", kNone);
  orbits_.insert(orbits_.end(), orbit.begin(), orbit.end());
  sweeps_.push_back(sweep);
  ordinals_.push_back(admitted_);
  const std::uint64_t b = bucket_of(orbit);
  bucket_ids_.push_back(b);
  insert(slot, b);
  // Orbits near the start of a wrapping sweep may meet the end of it.
  if (ordered_ && wraps_ && perm_ == sweeps_.size() - 1 && lo_ == perm_ &&
      sweep < first_sweep_ + eps_ + kSweepSlack) {
    ++perm_;
    ++lo_;
  }
  ++admitted_;
  if ((admitted_ & 1023) == 0) maybe_grow();
  return -1;
}

void GreedyKernel::covering(std::span<const double> orbit, std::vector<std::uint64_t>& out) {
  if (orbit.size() != row_) throw ContractViolation("orbit segment has the wrong length");
  out.clear();
  scan(orbit, [&](std::uint32_t s) {
    out.push_back(ordinals_[s]);
    return false;
  });
  std::sort(out.begin(), out.end());
}

template <class F>
void GreedyKernel::scan(std::span<const double> orbit, F&& hit) {
  buckets(orbit, scratch_);
  const std::size_t mask = table_keys_.size() - 1;
  for (std::uint64_t b : scratch_) {
    std::size_t j = b & mask;
    while (table_keys_[j] != kEmpty && table_keys_[j] != b) j = (j + 1) & mask;
    if (table_keys_[j] == kEmpty) continue;
    for (std::uint32_t s = table_heads_[j]; s != kNone; s = next_[s]) {
      if (s >= perm_ && s < lo_) {
        // Chains run newest first: past this point only evicted or permanent slots remain.
        if (perm_ == 0) break;
        continue;
      }
      const auto other = std::span<const double>(orbits_).subspan(static_cast<std::size_t>(s) * row_, row_);
      if (conflicts(orbit, other) && hit(s)) return;
    }
  }
}

double bowen_distance(const maps::System& sys, const PhasePoint& a, const PhasePoint& b,
                      std::int64_t n) {
  if (n < 1) throw ContractViolation("Bowen distance needs n >= 1");
  if (n > maps::kOrbitHorizonCap) {
    throw BudgetExceeded("Bowen distance horizon", static_cast<std::size_t>(maps::kOrbitHorizonCap));
  }
  const MetricSpec m = sys.metric();
  PhasePoint x = a, y = b;
  double d = distance(x, y, m);
  for (std::int64_t j = 1; j < n; ++j) {
    x = sys.evaluate(x);
    y = sys.evaluate(y);
    d = std::max(d, distance(x, y, m));
  }
  return d;
}

SeparationQuery SeparationQuery::from_grid(maps::SystemPtr sys, const SampleGrid& grid, std::int64_t n,
                                           double epsilon, bool strict) {
  SeparationQuery q;
  q.system = std::move(sys);
  q.samples = grid.points;
  q.n = n;
  q.epsilon = epsilon;
  q.strict = strict;
  q.resolution = grid.resolution;
  return q;
}

namespace {

void resolution_warning(const maps::System& sys, double resolution, std::int64_t n, double eps,
                        std::vector<std::string>& warnings) {
  const double L = sys.max_expansion();
  std::ostringstream os;
  if (!std::isfinite(L)) {
    os << sys.id() << " has no finite expansion bound; sample resolution is unchecked";
    warnings.push_back(os.str());
    return;
  }
  if (resolution <= 0.0) {
    warnings.push_back("sample resolution unknown; greedy count is a lower bound of unknown quality");
    return;
  }
  const double need = eps * std::pow(std::max(1.0, L), -static_cast<double>(n - 1));
  if (resolution > need * (1.0 + 1e-9)) {
    os << "sample resolution " << resolution << " exceeds eps*L^-(n-1) = " << need;
    warnings.push_back(os.str());
  }
}

// Orbit segment of raw coordinates x in metric coordinates.
void fill_orbit(const maps::System& sys, std::span<const double> x, std::int64_t n, std::size_t width,
                std::vector<double>& work, std::span<double> out) {
  work.assign(x.begin(), x.end());
  for (std::int64_t t = 0; t < n; ++t) {
    if (t > 0) sys.step(work);
    maps::metric_coords(sys.space(), work, out.subspan(static_cast<std::size_t>(t) * width, width));
  }
}

}  // namespace

SeparationResult separated_count(const SeparationQuery& q) {
  if (!q.system) throw ContractViolation("separation query without a system");
  if (q.samples.empty()) throw ContractViolation("separated_count needs a nonempty sample set");
  if (q.n < 1) throw ContractViolation("separated_count needs n >= 1");
  if (!(q.epsilon > 0.0)) throw ContractViolation("separated_count needs eps > 0");
  const maps::System& sys = *q.system;
  SeparationResult res;
  res.samples = q.samples.size();
  resolution_warning(sys, q.resolution, q.n, q.epsilon, res.warnings);

  if (sys.space() == Space::symbolic) {
    // One-sided: d_n = beta^-(k-n+1) clamped to 1, with k the first
    // disagreement, so closeness is agreement on a fixed prefix and the greedy
    // count is the number of distinct prefixes.
    const double beta = sys.metric().beta;
    std::int64_t K = 0;
    while (K < maps::kOrbitHorizonCap &&
           (q.strict ? std::pow(beta, -static_cast<double>(K)) > q.epsilon
                     : std::pow(beta, -static_cast<double>(K)) >= q.epsilon))
      ++K;
    const std::int64_t L = q.n - 1 + K;
    const bool prefix_ok = std::all_of(q.samples.begin(), q.samples.end(), [&](const PhasePoint& p) {
      return p.space() == Space::symbolic && !p.two_sided() && p.horizon() >= L;
    });
    if (prefix_ok) {
      std::set<std::vector<int>> classes;
      std::vector<int> w(static_cast<std::size_t>(L));
      for (const PhasePoint& p : q.samples) {
        for (std::int64_t i = 0; i < L; ++i) w[static_cast<std::size_t>(i)] = p.symbol(i);
        classes.insert(w);
      }
      res.count = classes.size();
      res.orbit_evaluations += static_cast<std::uint64_t>(q.n - 1) * q.samples.size();
      return res;
    }
    std::vector<const PhasePoint*> admitted;
    for (const PhasePoint& p : q.samples) {
      bool ok = true;
      for (const PhasePoint* a : admitted) {
        const double d = bowen_distance(sys, p, *a, q.n);
        res.orbit_evaluations += 2 * static_cast<std::uint64_t>(q.n - 1);
        if (q.strict ? d <= q.epsilon : d < q.epsilon) {
          ok = false;
          break;
        }
      }
      if (ok) admitted.push_back(&p);
    }
    res.count = admitted.size();
    return res;
  }

  const std::size_t width = metric_width(sys);
  std::vector<double> row(static_cast<std::size_t>(q.n) * width), work;
  std::vector<double> sweeps;
  for (const PhasePoint& p : q.samples) {
    if (p.space() != sys.space() || p.dim() != sys.dim()) {
      throw ContractViolation("sample point in " + to_string(p.space()) + " passed to " + sys.id());
    }
    double c[2];
    maps::metric_coords(sys.space(), p.coords(), std::span<double>(c, width == 1 ? 1 : 2));
    sweeps.push_back(c[0]);
  }
  const bool ordered = std::is_sorted(sweeps.begin(), sweeps.end());
  GreedyKernel kernel(sys.space(), width, q.n, q.epsilon, q.strict, ordered);
  for (std::size_t i = 0; i < q.samples.size(); ++i) {
    fill_orbit(sys, q.samples[i].coords(), q.n, width, work, row);
    res.orbit_evaluations += static_cast<std::uint64_t>(q.n - 1);
    kernel.offer(row, ordered ? sweeps[i] : 0.0);
  }
  res.count = kernel.count();
  return res;
}

std::uint64_t symbolic_word_count(const maps::System& sys, int n) {
  const auto* shift = dynamic_cast<const maps::ShiftMap*>(&sys);
  if (!shift) throw ContractViolation(sys.id() + " has no symbolic language");
  return shift->word_count(n);
}

}  // namespace translocal::separated
