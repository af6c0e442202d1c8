#include "translocal/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "translocal/errors.hpp"

namespace translocal::symbolic {

std::vector<int> binary_word(std::int64_t k) {
  if (k < 1) throw ContractViolation("binary words are indexed from 1");
  int m = 0;
  while ((std::int64_t{2} << m) - 1 <= k) ++m;  // 2^{m+1}-1 > k >= 2^m - 1
  const std::int64_t idx = k + 1 - (std::int64_t{1} << m);
  std::vector<int> w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(m - 1 - i)] = static_cast<int>((idx >> i) & 1);
  return w;
}

CodeWordFamily CodeWordFamily::factorial() {
  CodeWordFamily f;
  f.gap_ = Gap::factorial;
  return f;
}

CodeWordFamily CodeWordFamily::linear(std::int64_t a, std::int64_t b) {
  if (a < 1 || b < 0) throw ContractViolation("linear gap family needs a >= 1, b >= 0");
  CodeWordFamily f;
  f.gap_ = Gap::linear;
  f.a_ = a;
  f.b_ = b;
  return f;
}

CodeWordFamily CodeWordFamily::geometric(std::int64_t c) {
  if (c < 1) throw ContractViolation("geometric gap family needs c >= 1");
  CodeWordFamily f;
  f.gap_ = Gap::geometric;
  f.c_ = c;
  return f;
}

CodeWordFamily CodeWordFamily::explicit_words(std::vector<std::vector<int>> words, int alphabet) {
  if (words.empty()) throw ContractViolation("empty code-word list");
  for (const auto& w : words) {
    if (w.empty()) throw ContractViolation("code words must be nonempty");
    for (int s : w) {
      if (s < 0) throw ContractViolation("negative symbol in code word");
      alphabet = std::max(alphabet, s + 1);
    }
  }
  CodeWordFamily f;
  f.gap_ = Gap::explicit_words;
  f.words_ = std::move(words);
  f.alphabet_ = alphabet;
  return f;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& id) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw ConfigError("");
    return v;
  } catch (...) {
    throw ConfigError("bad integer '" + s + "' in code-word family '" + id + "'");
  }
}

}  // namespace

CodeWordFamily CodeWordFamily::parse(const std::string& id) {
  const auto colon = id.find(':');
  const std::string kind = id.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : id.substr(colon + 1);
  if (kind == "factorial") return factorial();
  if (kind == "linear") {
    auto p = split(args, ',');
    if (p.size() != 2) throw ConfigError("linear family needs 'linear:a,b', got '" + id + "'");
    return linear(parse_int(p[0], id), parse_int(p[1], id));
  }
  if (kind == "geometric") {
    return geometric(parse_int(args, id));
  }
  if (kind == "words") {
    std::vector<std::vector<int>> words;
    for (const auto& w : split(args, ',')) {
      std::vector<int> word;
      for (char ch : w) {
        if (ch < '0' || ch > '9') throw ConfigError("bad symbol in code word '" + w + "'");
        word.push_back(ch - '0');
      }
      words.push_back(std::move(word));
    }
    return explicit_words(std::move(words));
  }
  throw ConfigError("unknown code-word family '" + id + "'");
}

std::string CodeWordFamily::id() const {
  switch (gap_) {
    case Gap::factorial: return "factorial";
    case Gap::linear: return "linear:" + std::to_string(a_) + "," + std::to_string(b_);
    case Gap::geometric: return "geometric:" + std::to_string(c_);
    case Gap::explicit_words: {
      std::string s = "words:";
      for (std::size_t i = 0; i < words_.size(); ++i) {
        if (i) s += ',';
        for (int c : words_[i]) s += static_cast<char>('0' + c);
      }
      return s;
    }
  }
  return "";
}

double CodeWordFamily::gap_length(std::int64_t k) const {
  switch (gap_) {
    case Gap::factorial: return std::round(std::exp(std::lgamma(11.0 + static_cast<double>(k))));
    case Gap::linear: return static_cast<double>(a_ * k + b_);
    case Gap::geometric: return static_cast<double>(c_) * std::ldexp(1.0, static_cast<int>(k));
    case Gap::explicit_words: break;
  }
  throw ContractViolation("explicit families have no gap function");
}

double CodeWordFamily::code_length(std::int64_t k) const {
  if (k < 1) throw ContractViolation("code words are indexed from 1");
  if (gap_ == Gap::explicit_words) {
    if (static_cast<std::size_t>(k) > words_.size()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(words_[static_cast<std::size_t>(k - 1)].size());
  }
  return 2.0 * gap_length(k) + static_cast<double>(binary_word(k).size()) + 2.0;
}

double CodeWordFamily::min_increment_from(std::int64_t K) const {
  switch (gap_) {
    case Gap::linear: return 2.0 * static_cast<double>(a_);
    case Gap::geometric: return 2.0 * gap_length(K);
    case Gap::factorial: return 2.0 * (gap_length(K + 1) - gap_length(K));
    case Gap::explicit_words: break;
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<int> CodeWordFamily::code_word(std::int64_t k, std::size_t cap) const {
  if (gap_ == Gap::explicit_words) {
    if (k < 1 || static_cast<std::size_t>(k) > words_.size()) {
      throw ContractViolation("code word index out of range");
    }
    return words_[static_cast<std::size_t>(k - 1)];
  }
  if (gap_ == Gap::factorial) {
    throw ContractViolation("factorial-gap code words are available through their lengths only");
  }
  const double len = code_length(k);
  if (len > static_cast<double>(cap)) throw BudgetExceeded("code word C_" + std::to_string(k), cap);
  const auto g = static_cast<std::size_t>(gap_length(k));
  std::vector<int> word;
  word.reserve(static_cast<std::size_t>(len));
  word.push_back(2);
  word.insert(word.end(), g, 0);
  for (int s : binary_word(k)) word.push_back(s);
  word.insert(word.end(), g, 0);
  word.push_back(2);
  return word;
}

CodeWordFamily CodeWordFamily::truncated(std::int64_t K) const {
  if (gap_ == Gap::explicit_words) {
    std::vector<std::vector<int>> w(words_.begin(),
                                    words_.begin() + std::min<std::int64_t>(K, static_cast<std::int64_t>(words_.size())));
    return explicit_words(std::move(w), alphabet_);
  }
  std::vector<std::vector<int>> words;
  for (std::int64_t k = 1; k <= K; ++k) words.push_back(code_word(k));
  return explicit_words(std::move(words), alphabet_);
}

namespace {

// sum_k e^{-h L_k} - 1 together with the truncation data.
struct KraftSum {
  double value;
  std::int64_t terms;
  double tail;
};

KraftSum kraft_sum(const CodeWordFamily& fam, double h, double tol) {
  double sum = 0.0;
  if (fam.finite()) {
    for (std::size_t k = 1; k <= fam.size(); ++k) sum += std::exp(-h * fam.code_length(static_cast<std::int64_t>(k)));
    return {sum - 1.0, static_cast<std::int64_t>(fam.size()), 0.0};
  }
  std::int64_t k = 1;
  for (;; ++k) {
    const double L = fam.code_length(k);
    const double term = std::isfinite(L) ? std::exp(-h * L) : 0.0;
    sum += term;
    // Stop once the remaining geometric tail is negligible.
    const double inc = fam.min_increment_from(k);
    const double next = std::isfinite(L) ? std::exp(-h * (L + inc)) : 0.0;
    const double ratio = std::exp(-h * inc);
    const double tail = ratio < 1.0 ? next / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    if (tail < tol * 1e-3 || k > 50'000'000) return {sum - 1.0, k, tail};
  }
}

}  // namespace

KraftSolution kraft_entropy(const CodeWordFamily& family, double tol) {
  double lo = 1e-12;
  const KraftSum at_lo = kraft_sum(family, lo, tol);
  if (at_lo.value <= 0.0) {
    throw NoPositiveRoot("sum of e^{-h L_k} does not exceed 1 as h -> 0+");
  }
  double hi = std::log(static_cast<double>(std::max(2, family.alphabet())));
  while (kraft_sum(family, hi, tol).value > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NoPositiveRoot("Kraft sum bracket diverged");
  }
  while (hi - lo > tol * std::max(1e-3, lo) && hi - lo > 1e-300) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (kraft_sum(family, mid, tol).value > 0.0 ? lo : hi) = mid;
  }
  const double h = 0.5 * (lo + hi);
  const KraftSum s = kraft_sum(family, h, tol);
  return {h, std::fabs(s.value) + s.tail, s.terms, s.tail};
}

KraftSolution kraft_entropy(const std::vector<double>& lengths, double tol) {
  if (lengths.empty()) throw ContractViolation("kraft_entropy needs at least one length");
  std::vector<std::vector<int>> words;
  for (double L : lengths) {
    if (!(L >= 1.0) || L != std::floor(L)) throw ContractViolation("code lengths must be positive integers");
    words.emplace_back(static_cast<std::size_t>(L), 0);
  }
  // Only the lengths matter for the root; the alphabet bounds the bracket.
  auto fam = CodeWordFamily::explicit_words(std::move(words),
                                            static_cast<int>(lengths.size()) + 1);
  return kraft_entropy(fam, tol);
}

namespace {

// Nondeterministic reader of free concatenations: a state is (word, pos)
// with 0 < pos < |word|, or the boundary state (-1, 0).
struct NfaState {
  int word;
  int pos;
  auto operator<=>(const NfaState&) const = default;
};

struct ActiveWords {
  std::vector<std::vector<int>> words;
  std::vector<bool> complete;
};

// Code words that matter for windows of length n: complete words of length
// <= n and the distinct length-n prefixes of longer ones.
ActiveWords active_words(const CodeWordFamily& fam, int n) {
  ActiveWords act;
  if (fam.finite()) {
    for (std::size_t k = 1; k <= fam.size(); ++k) {
      auto w = fam.code_word(static_cast<std::int64_t>(k));
      const bool complete = w.size() <= static_cast<std::size_t>(n);
      if (!complete) w.resize(static_cast<std::size_t>(n));
      act.words.push_back(std::move(w));
      act.complete.push_back(complete);
    }
    return act;
  }
  std::set<std::vector<int>> long_prefixes;
  for (std::int64_t k = 1;; ++k) {
    const double g = fam.gap_length(k);
    if (fam.gap() == CodeWordFamily::Gap::factorial || g >= n) {
      // Every longer gap gives the same window 2 0^{n-1}.
      std::vector<int> w(static_cast<std::size_t>(n), 0);
      w[0] = 2;
      long_prefixes.insert(std::move(w));
      break;
    }
    auto w = fam.code_word(k);
    if (w.size() <= static_cast<std::size_t>(n)) {
      act.words.push_back(std::move(w));
      act.complete.push_back(true);
    } else {
      w.resize(static_cast<std::size_t>(n));
      long_prefixes.insert(std::move(w));
    }
  }
  for (const auto& w : long_prefixes) {
    act.words.push_back(w);
    act.complete.push_back(false);
  }
  return act;
}

std::vector<NfaState> advance(const ActiveWords& act, const std::vector<NfaState>& from, int sym) {
  std::vector<NfaState> out;
  auto enter = [&](int w, int pos) {
    const auto len = static_cast<int>(act.words[static_cast<std::size_t>(w)].size());
    if (pos == len && act.complete[static_cast<std::size_t>(w)]) {
      out.push_back({-1, 0});
    } else {
      // an incomplete word read to its end stays alive but has no continuation
      // inside the window
      out.push_back({w, pos});
    }
  };
  for (const NfaState& s : from) {
    if (s.word < 0) {
      for (std::size_t w = 0; w < act.words.size(); ++w) {
        if (act.words[w][0] == sym) enter(static_cast<int>(w), 1);
      }
    } else if (static_cast<std::size_t>(s.pos) < act.words[static_cast<std::size_t>(s.word)].size() &&
               act.words[static_cast<std::size_t>(s.word)][static_cast<std::size_t>(s.pos)] == sym) {
      enter(s.word, s.pos + 1);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NfaState> start_states(const ActiveWords& act, Language lang) {
  std::vector<NfaState> s{{-1, 0}};
  if (lang == Language::subwords) {
    for (std::size_t w = 0; w < act.words.size(); ++w) {
      for (std::size_t p = 1; p < act.words[w].size(); ++p) s.push_back({static_cast<int>(w), static_cast<int>(p)});
    }
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

namespace {

// Every length-n window of a concatenation, for the subword language. A gap
// run longer than n shows the same windows as a run of exactly n zeros, and
// code words with |w_k| > n add no window that |w_k| = n does not, so the
// compressed words C_k with |w_k| <= n suffice.
ActiveWords window_words(const CodeWordFamily& fam, int n, std::size_t budget) {
  if (fam.finite()) {
    ActiveWords act;
    for (std::size_t k = 1; k <= fam.size(); ++k) {
      act.words.push_back(fam.code_word(static_cast<std::int64_t>(k)));
      act.complete.push_back(true);
    }
    return act;
  }
  std::set<std::vector<int>> seen;
  std::size_t symbols = 0;
  for (std::int64_t k = 1;; ++k) {
    auto w = binary_word(k);
    if (w.size() > static_cast<std::size_t>(n)) break;
    const auto g = static_cast<std::size_t>(std::min(fam.gap_length(k), static_cast<double>(n)));
    std::vector<int> c{2};
    c.insert(c.end(), g, 0);
    c.insert(c.end(), w.begin(), w.end());
    c.insert(c.end(), g, 0);
    c.push_back(2);
    symbols += c.size();
    if (symbols > budget) throw BudgetExceeded("subword automaton at n=" + std::to_string(n), budget);
    seen.insert(std::move(c));
  }
  ActiveWords act;
  for (const auto& c : seen) {
    act.words.push_back(c);
    act.complete.push_back(true);
  }
  return act;
}

}  // namespace

std::uint64_t coded_language_count(const CodeWordFamily& family, int n, Language lang, std::size_t state_budget) {
  if (lang == Language::prefixes) return coded_extension_count(family, {}, n, state_budget);
  if (n < 0) throw ContractViolation("word length must be >= 0");
  if (n == 0) return 1;
  const ActiveWords act = window_words(family, n, state_budget);
  std::map<std::vector<NfaState>, std::uint64_t> layer{{start_states(act, Language::subwords), 1}};
  for (int step = 0; step < n; ++step) {
    std::map<std::vector<NfaState>, std::uint64_t> next;
    for (const auto& [states, count] : layer) {
      for (int sym = 0; sym < family.alphabet(); ++sym) {
        auto to = advance(act, states, sym);
        if (to.empty()) continue;
        auto& slot = next[std::move(to)];
        if (slot > std::numeric_limits<std::uint64_t>::max() - count) {
          throw BudgetExceeded("language count overflows 64 bits at n=" + std::to_string(n), 64);
        }
        slot += count;
      }
    }
    if (next.size() > state_budget) {
      throw BudgetExceeded("language automaton at n=" + std::to_string(n), state_budget);
    }
    layer = std::move(next);
  }
  std::uint64_t total = 0;
  for (const auto& kv : layer) total += kv.second;
  return total;
}

std::uint64_t coded_extension_count(const CodeWordFamily& family, const std::vector<int>& prefix,
                                    int n, std::size_t state_budget) {
  if (n < 0) throw ContractViolation("word length must be >= 0");
  const int horizon = std::max(n, static_cast<int>(prefix.size()));
  if (horizon == 0) return 1;
  const ActiveWords act = active_words(family, horizon);
  auto start = start_states(act, Language::prefixes);
  for (int s : prefix) {
    start = advance(act, start, s);
    if (start.empty()) return 0;
  }
  std::map<std::vector<NfaState>, std::uint64_t> layer{{start, 1}};
  for (int step = static_cast<int>(prefix.size()); step < n; ++step) {
    std::map<std::vector<NfaState>, std::uint64_t> next;
    for (const auto& [states, count] : layer) {
      for (int sym = 0; sym < family.alphabet(); ++sym) {
        auto to = advance(act, states, sym);
        if (to.empty()) continue;
        auto& slot = next[std::move(to)];
        if (slot > std::numeric_limits<std::uint64_t>::max() - count) {
          throw BudgetExceeded("language count overflows 64 bits at n=" + std::to_string(n), 64);
        }
        slot += count;
      }
    }
    if (next.size() > state_budget) {
      throw BudgetExceeded("language automaton at n=" + std::to_string(n), state_budget);
    }
    layer = std::move(next);
  }
  std::uint64_t total = 0;
  for (const auto& kv : layer) total += kv.second;
  return total;
}

bool is_admissible(const CodeWordFamily& family, const std::vector<int>& word, Language lang) {
  if (!family.finite()) throw ContractViolation("membership is decided on finite families");
  ActiveWords act;
  for (std::size_t k = 1; k <= family.size(); ++k) {
    act.words.push_back(family.code_word(static_cast<std::int64_t>(k)));
    act.complete.push_back(true);
  }
  auto states = start_states(act, lang);
  for (int s : word) {
    states = advance(act, states, s);
    if (states.empty()) return false;
  }
  return true;
}

namespace {

std::int64_t factorial_i(int j) {
  std::int64_t f = 1;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

// Block j >= 3 occupies [(j-1)!, j!).
int block_of(std::int64_t i) {
  int j = 3;
  while (factorial_i(j) <= i) ++j;
  return j;
}

}  // namespace

int uvw_v_symbol(std::int64_t i) {
  if (i < 0) throw ContractViolation("one-sided index");
  if (i == 0) return 1;
  if (i == 1) return 0;
  return block_of(i) % 2 == 1 ? 1 : 0;
}

int uvw_u_symbol(std::int64_t i) {
  if (i < 0) throw ContractViolation("one-sided index");
  if (i < 2) return 1;
  const int j = block_of(i);
  if (j % 2 == 0) return 1;
  return uvw_v_symbol(i - factorial_i(j - 1));
}

UVW make_uvw(std::int64_t horizon) {
  if (horizon < 1 || horizon > kUVWHorizonCap) {
    throw BudgetExceeded("uvw horizon " + std::to_string(horizon), static_cast<std::size_t>(kUVWHorizonCap));
  }
  auto v = std::make_shared<GeneratedSequence>(uvw_v_symbol, horizon);
  auto u = std::make_shared<GeneratedSequence>(uvw_u_symbol, horizon);
  auto w = std::make_shared<WordSequence>(std::vector<int>{}, 0, horizon);
  return {PhasePoint::symbolic(u), PhasePoint::symbolic(v), PhasePoint::symbolic(w)};
}

}  // namespace translocal::symbolic
