#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "translocal/entropy.hpp"
#include "translocal/errors.hpp"
#include "translocal/symbolic.hpp"

using namespace translocal;
using namespace translocal::symbolic;

namespace {

// All length-n windows of concatenations of `words`, by brute force.
std::size_t brute_subwords(const std::vector<std::vector<int>>& words, int n) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> frontier{{}};
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& s : frontier)
      for (const auto& w : words) {
        auto c = s;
        c.insert(c.end(), w.begin(), w.end());
        if (c.size() >= static_cast<std::size_t>(3 * n)) {
          for (std::size_t i = 0; i + n <= c.size(); ++i) seen.insert(std::vector<int>(c.begin() + i, c.begin() + i + n));
        } else {
          next.push_back(std::move(c));
        }
      }
    frontier = std::move(next);
  }
  return seen.size();
}

}  // namespace

TEST(Kraft, ClosedForms) {
  EXPECT_NEAR(kraft_entropy({1, 1}).h, std::log(2.0), 1e-10);
  EXPECT_NEAR(kraft_entropy({1, 2}).h, std::log((1 + std::sqrt(5.0)) / 2), 1e-9);
  EXPECT_NEAR(kraft_entropy({2, 2, 2}).h, std::log(3.0) / 2, 1e-10);
}

TEST(Kraft, NoPositiveRoot) { EXPECT_THROW(kraft_entropy({1}), NoPositiveRoot); }

TEST(Kraft, GapFamiliesStayBelowLogTwo) {
  for (const char* id : {"linear:1,0", "linear:2,1", "geometric:1", "factorial"}) {
    const auto sol = kraft_entropy(CodeWordFamily::parse(id), 1e-10);
    EXPECT_GT(sol.h, 0.0) << id;
    EXPECT_LT(sol.h, std::log(2.0)) << id;
    // h is near 1e-9 for factorial gaps and F is steep there
    EXPECT_LT(sol.residual, std::string(id) == "factorial" ? 1e-4 : 1e-8) << id;
  }
}

TEST(Kraft, ExtraLengthRaisesEntropy) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> len(1, 8), cnt(2, 6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> L(static_cast<std::size_t>(cnt(rng)));
    for (auto& l : L) l = len(rng);
    const double h0 = kraft_entropy(L).h;
    L.push_back(len(rng));
    EXPECT_GT(kraft_entropy(L).h, h0);
  }
}

TEST(CodedLanguage, SmallFamilies) {
  EXPECT_EQ(coded_language_count(CodeWordFamily::parse("words:0,1"), 8), 256u);
  // 000 001 010 100 101: 101 sits in 01.01
  EXPECT_EQ(coded_language_count(CodeWordFamily::parse("words:0,01"), 3), 5u);
  EXPECT_EQ(brute_subwords({{0}, {0, 1}}, 3), 5u);
  EXPECT_EQ(coded_language_count(CodeWordFamily::parse("words:0,01"), 3, Language::prefixes), 3u);
}

TEST(CodedLanguage, DynamicProgramMatchesBruteForce) {
  const std::vector<std::vector<std::vector<int>>> fams{
      {{0}, {1, 1}}, {{0, 1}, {1, 1, 0}, {2}}, {{1, 0, 0}, {0, 1}}, {{2, 0, 0, 2}, {2, 1, 2}}};
  for (const auto& f : fams) {
    const auto fam = CodeWordFamily::explicit_words(f, 3);
    for (int n = 1; n <= 7; ++n) ASSERT_EQ(coded_language_count(fam, n), brute_subwords(f, n)) << n;
  }
}

TEST(CodedLanguage, InfiniteFamilySubwordsMatchBruteForceOnTruncation) {
  // windows of length n only involve C_k with |w_k| <= n; a long truncation
  // of the family therefore has the same length-n windows
  const auto lin = CodeWordFamily::linear(1, 0);
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::vector<int>> words;
    for (std::int64_t k = 1; k <= 30; ++k) words.push_back(lin.code_word(k));
    std::set<std::vector<int>> seen;
    for (const auto& a : words)
      for (const auto& b : words) {
        auto c = a;
        c.insert(c.end(), b.begin(), b.end());
        for (std::size_t i = 0; i + n <= c.size(); ++i) seen.insert(std::vector<int>(c.begin() + i, c.begin() + i + n));
      }
    EXPECT_EQ(coded_language_count(lin, n), seen.size()) << n;
  }
}

TEST(CodedLanguage, GrowthRateMatchesKraftOnFiniteFamilies) {
  const std::vector<std::vector<std::vector<int>>> fams{{{0}, {0, 1}},
                                                        {{0}, {1, 1}, {1, 0, 1}},
                                                        {{0, 0}, {1}, {2, 2, 2}},
                                                        {{0, 1}, {1, 0, 1}, {2}},
                                                        {{2, 0, 1, 2}, {2, 1}, {0}}};
  for (const auto& f : fams) {
    const auto fam = CodeWordFamily::explicit_words(f, 3);
    std::vector<std::pair<double, double>> pts;
    for (int n = 15; n <= 25; ++n) pts.emplace_back(n, std::log(static_cast<double>(coded_language_count(fam, n))));
    const double rate = entropy::growth_rate(pts, entropy::Mode::limsup).value;
    const double h = kraft_entropy(fam).h;
    EXPECT_NEAR(rate, h, 0.1 * h);
  }
}

TEST(CodedLanguage, PrefixGrowthOfGapFamiliesTracksKraft) {
  for (const char* id : {"linear:1,0", "geometric:1"}) {
    const auto fam = CodeWordFamily::parse(id);
    std::vector<std::pair<double, double>> pts;
    for (int n = 40; n <= 70; n += 3)
      pts.emplace_back(n, std::log(static_cast<double>(coded_language_count(fam, n, Language::prefixes))));
    const double rate = entropy::growth_rate(pts, entropy::Mode::limsup).value;
    const double h = kraft_entropy(fam).h;
    EXPECT_LT(rate, std::log(2.0)) << id;
    EXPECT_NEAR(rate, h, 0.25 * h) << id;
  }
}

TEST(Synchronizing, GluingAcrossTwoTwos) {
  // Every admissible word ending in 2 and one starting with 2 glue across 22.
  const auto fam = CodeWordFamily::linear(1, 0).truncated(6);
  std::vector<std::vector<int>> left, right;
  for (int n = 1; n <= 15; ++n) {
    // all length-n windows ending with 2 and starting with 2, from a long concatenation
    std::vector<int> cat;
    for (int r = 0; r < 3; ++r)
      for (std::int64_t k = 1; k <= 6; ++k) {
        auto c = fam.code_word(k);
        cat.insert(cat.end(), c.begin(), c.end());
      }
    for (std::size_t i = 0; i + n <= cat.size(); ++i) {
      std::vector<int> s(cat.begin() + i, cat.begin() + i + n);
      if (s.back() == 2 && (i + n < cat.size() && cat[i + n] == 2)) left.push_back(s);
      if (s.front() == 2 && i > 0 && cat[i - 1] == 2) right.push_back(s);
    }
  }
  ASSERT_FALSE(left.empty());
  ASSERT_FALSE(right.empty());
  for (std::size_t a = 0; a < left.size(); a += 7)
    for (std::size_t b = 0; b < right.size(); b += 7) {
      auto g = left[a];
      g.insert(g.end(), right[b].begin(), right[b].end());
      if (g.size() > 15) continue;
      ASSERT_TRUE(is_admissible(fam, g));
    }
}

TEST(UVW, BlockArithmetic) {
  const auto s = make_uvw(1000);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(s.w.symbol(i), 0);
  EXPECT_EQ(s.v.symbol(0), 1);
  EXPECT_EQ(s.v.symbol(1), 0);
  EXPECT_EQ(s.v.symbol(2), 1);
  for (int i = 2; i <= 5; ++i) EXPECT_EQ(s.v.symbol(i), 1) << i;
  for (int i = 6; i < 24; ++i) EXPECT_EQ(s.v.symbol(i), 0) << i;
  EXPECT_EQ(s.u.symbol(0), 1);
  EXPECT_EQ(s.u.symbol(1), 1);
  EXPECT_THROW(make_uvw(kUVWHorizonCap + 1), BudgetExceeded);
}

TEST(BinaryWords, LengthThenLex) {
  EXPECT_EQ(binary_word(1), (std::vector<int>{0}));
  EXPECT_EQ(binary_word(2), (std::vector<int>{1}));
  EXPECT_EQ(binary_word(3), (std::vector<int>{0, 0}));
  EXPECT_EQ(binary_word(6), (std::vector<int>{1, 1}));
  EXPECT_EQ(binary_word(7), (std::vector<int>{0, 0, 0}));
}

TEST(CodeWords, GapLayout) {
  const auto f = CodeWordFamily::linear(1, 0);
  EXPECT_EQ(f.code_word(2), (std::vector<int>{2, 0, 0, 1, 0, 0, 2}));
  EXPECT_DOUBLE_EQ(f.code_length(2), 7.0);
  EXPECT_THROW(CodeWordFamily::factorial().code_word(1), ContractViolation);
  EXPECT_DOUBLE_EQ(CodeWordFamily::factorial().gap_length(1), 39916800.0);
}
