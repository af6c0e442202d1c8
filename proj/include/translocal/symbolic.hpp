#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "translocal/phase_space.hpp"

namespace translocal::symbolic {

/// k-th word (k >= 1) of {0,1}^+ in length-then-lexicographic order:
/// 0, 1, 00, 01, 10, 11, 000, ...
std::vector<int> binary_word(std::int64_t k);

/// Code words C_k = 2 0^{g(k)} w_k 0^{g(k)} 2 over {0,1,2}, or an explicit
/// finite list of code words.
class CodeWordFamily {
 public:
  enum class Gap { factorial, linear, geometric, explicit_words };

  /// g(k) = (10+k)!; lengths are available, words are not.
  static CodeWordFamily factorial();
  /// g(k) = a*k + b with a >= 1, b >= 0.
  static CodeWordFamily linear(std::int64_t a, std::int64_t b);
  /// g(k) = c * 2^k with c >= 1.
  static CodeWordFamily geometric(std::int64_t c);
  static CodeWordFamily explicit_words(std::vector<std::vector<int>> words, int alphabet = 2);
  /// "linear:a,b", "geometric:c", "factorial" or "words:0,01,...".
  static CodeWordFamily parse(const std::string& id);

  Gap gap() const { return gap_; }
  std::string id() const;
  int alphabet() const { return alphabet_; }
  bool finite() const { return gap_ == Gap::explicit_words; }
  std::size_t size() const { return words_.size(); }

  /// g(k) as a double (factorial gaps overflow to +inf past k ~ 160).
  double gap_length(std::int64_t k) const;
  /// |C_k| = 2 g(k) + |w_k| + 2 for gap families; |words[k-1]| otherwise.
  double code_length(std::int64_t k) const;
  /// Lower bound on |C_{k+1}| - |C_k| for every k >= K.
  double min_increment_from(std::int64_t K) const;
  /// Explicit symbols of C_k; throws for factorial gaps or past `cap` symbols.
  std::vector<int> code_word(std::int64_t k, std::size_t cap = 1u << 22) const;
  /// Explicit family of the first K code words.
  CodeWordFamily truncated(std::int64_t K) const;

 private:
  Gap gap_ = Gap::linear;
  std::int64_t a_ = 1, b_ = 0, c_ = 1;
  int alphabet_ = 3;
  std::vector<std::vector<int>> words_;
};

struct KraftSolution {
  double h = 0.0;
  double residual = 0.0;           // |sum_k e^{-h L_k} - 1| plus the tail bound
  std::int64_t truncation = 0;     // number of explicit terms summed
  double tail_bound = 0.0;
};

/// Unique positive root of sum_k e^{-h L_k} = 1 for an explicit length list.
KraftSolution kraft_entropy(const std::vector<double>& lengths, double tol = 1e-12);
/// Same for the lengths |C_k| of a code-word family (infinite families are
/// truncated with a geometric tail bound).
KraftSolution kraft_entropy(const CodeWordFamily& family, double tol = 1e-12);

enum class Language { prefixes, subwords };

/// Number of distinct length-n words of the coded language: subwords of free
/// concatenations, or only those starting at a code-word boundary.
std::uint64_t coded_language_count(const CodeWordFamily& family, int n, Language lang = Language::subwords,
                                   std::size_t state_budget = 200'000);

/// Number of length-n words of the prefix language that start with `prefix`
/// (1 when n <= |prefix| and the prefix itself is admissible, else 0 for
/// inadmissible prefixes).
std::uint64_t coded_extension_count(const CodeWordFamily& family, const std::vector<int>& prefix,
                                    int n, std::size_t state_budget = 200'000);

/// Membership of `word` in the prefix or subword language of a finite family.
bool is_admissible(const CodeWordFamily& family, const std::vector<int>& word,
                   Language lang = Language::subwords);

struct UVW {
  PhasePoint u, v, w;
};

inline constexpr std::int64_t kUVWHorizonCap = 39'916'800;  // 11!

/// One-sided sequences v (alternating 1/0 blocks of length j!-(j-1)!),
/// u (1-blocks alternating with copies of v's prefix) and w = 0^infinity.
UVW make_uvw(std::int64_t horizon);

/// Symbol of v at index i (0-based).
int uvw_v_symbol(std::int64_t i);
int uvw_u_symbol(std::int64_t i);

}  // namespace translocal::symbolic
