#include "cutstack/windows.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace cutstack;

namespace {

Matching random_monotone(Rng& rng, std::size_t r, std::uint64_t max_step) {
  Matching m;
  std::size_t i = uniform_below(rng, max_step), j = uniform_below(rng, max_step);
  for (std::size_t s = 0; s < r; ++s) {
    m.pairs.emplace_back(i, j);
    i += 1 + uniform_below(rng, max_step);
    j += 1 + uniform_below(rng, max_step);
  }
  return m;
}

std::set<std::size_t> brute_window(const Matching& m, std::uint64_t width, std::size_t w, bool first) {
  std::set<std::size_t> out;
  auto c = [&](std::size_t s) { return first ? m.pairs[s - 1].first : m.pairs[s - 1].second; };
  for (std::size_t s = 1; s <= m.size(); ++s)
    if (c(s) >= c(w) && c(s) <= c(w) + width) out.insert(s);
  return out;
}

std::set<std::size_t> as_set(const IndexRange& r) {
  std::set<std::size_t> out;
  for (std::size_t s = r.first; s <= r.last; ++s) out.insert(s);
  return out;
}

}  // namespace

TEST(Windows, SinglePair) {
  Matching m{{{3, 7}}};
  for (long M : {0L, 1L, 100L}) {
    auto ws = window_sets(m, BigInt(M), 1);
    EXPECT_EQ(ws.I, (IndexRange{1, 1}));
    EXPECT_EQ(ws.J, (IndexRange{1, 1}));
  }
  EXPECT_THROW(window_sets(m, BigInt(1), 2), domain_error);
}

TEST(Windows, ConsecutiveIndices) {
  Matching m;
  for (std::size_t s = 1; s <= 10; ++s) m.pairs.emplace_back(s, 2 * s);
  auto ws = window_sets(m, BigInt(5), 1);
  EXPECT_EQ(ws.I, (IndexRange{1, 6}));
  EXPECT_EQ(ws.J, (IndexRange{1, 3}));
  Matching shortm;
  for (std::size_t s = 1; s <= 4; ++s) shortm.pairs.emplace_back(s, s);
  EXPECT_EQ(window_sets(shortm, BigInt(5), 1).I, (IndexRange{1, 4}));
}

TEST(Windows, MatchBruteForceAndDisjointness) {
  Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    auto m = random_monotone(rng, 1 + uniform_below(rng, std::uint64_t{30}), 1 + uniform_below(rng, std::uint64_t{6}));
    const std::uint64_t width = uniform_below(rng, std::uint64_t{20});
    const std::size_t w = 1 + uniform_below(rng, std::uint64_t{m.size()});
    auto ws = window_sets(m, big(width), w);
    auto bi = brute_window(m, width, w, true), bj = brute_window(m, width, w, false);
    ASSERT_EQ(as_set(ws.I), bi);
    ASSERT_EQ(as_set(ws.J), bj);
    auto [si, sj] = window_sizes(m, big(width));
    EXPECT_EQ(si[w - 1], bi.size());
    EXPECT_EQ(sj[w - 1], bj.size());
    for (std::size_t s = w + 1; s <= m.size(); ++s) {
      if (!bi.count(s)) {
        for (auto x : brute_window(m, width, s, true)) ASSERT_FALSE(bi.count(x));
      }
      if (!bj.count(s)) {
        for (auto x : brute_window(m, width, s, false)) ASSERT_FALSE(bj.count(x));
      }
    }
  }
}

TEST(CombLemma, EmptyMatchingIsTrivial) {
  auto rep = comb_lemma_check(Matching{}, WindowParams{BigInt(4), Rational(1, 2), BigInt(100)});
  EXPECT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.hypothesis);
  EXPECT_EQ(rep.conclusion, true);
}

TEST(CombLemma, IdentityMatchingFailsHypothesis) {
  const std::size_t n = 4000;
  Matching id;
  for (std::size_t s = 1; s <= n; ++s) id.pairs.emplace_back(s, s);
  WindowParams p{BigInt(16), Rational(1, 2), big(n)};
  auto rep = comb_lemma_check(id, p);
  EXPECT_EQ(rep.width, 64);
  EXPECT_TRUE(rep.applicable);
  EXPECT_FALSE(rep.hypothesis);
  EXPECT_FALSE(rep.conclusion.has_value());
  // |I(64, s)| = 65 > 32 while at least 33 indices remain.
  EXPECT_EQ(rep.witness_count, n - 32);
  EXPECT_EQ(rep.witnesses.front(), 1u);
}

TEST(CombLemma, InapplicableWhenNTooSmall) {
  WindowParams p{BigInt(16), Rational(1, 2), BigInt(511)};
  EXPECT_FALSE(p.applicable());
  p.N = 512;
  EXPECT_TRUE(p.applicable());
  auto rep = comb_lemma_check(Matching{{{0, 0}}}, WindowParams{BigInt(16), Rational(1, 2), BigInt(100)});
  EXPECT_FALSE(rep.applicable);
  EXPECT_FALSE(rep.conclusion.has_value());
  EXPECT_THROW(comb_lemma_check(Matching{}, WindowParams{BigInt(0), Rational(1, 2), BigInt(1)}), domain_error);
  EXPECT_THROW(comb_lemma_check(Matching{}, WindowParams{BigInt(2), Rational(1), BigInt(1)}), domain_error);
}

TEST(GreedyCover, SingleCluster) {
  Matching m;
  for (std::size_t s = 0; s < 20; ++s) m.pairs.emplace_back(100 + s, 50 + 2 * s);
  WindowParams p{BigInt(16), Rational(1, 2), BigInt(4000)};
  auto tr = greedy_cover(m, p);
  EXPECT_EQ(tr.v(), 1u);
  EXPECT_TRUE(tr.ok());
}

TEST(GreedyCover, TwoDistantClusters) {
  Matching m;
  for (std::size_t s = 0; s < 10; ++s) m.pairs.emplace_back(s, s);
  for (std::size_t s = 0; s < 10; ++s) m.pairs.emplace_back(1000 + s, 1000 + s);
  WindowParams p{BigInt(16), Rational(1, 2), BigInt(4000)};
  auto tr = greedy_cover(m, p);
  ASSERT_EQ(tr.v(), 2u);
  EXPECT_EQ(tr.blocks[0].set, (IndexRange{1, 10}));
  EXPECT_EQ(tr.blocks[1].set, (IndexRange{11, 20}));
  EXPECT_EQ(tr.blocks[1].pivot, 11u);
  EXPECT_TRUE(tr.ok());
  EXPECT_TRUE(tr.chain_bound);
}

TEST(GreedyCover, ClusteredInstancesSatisfyEveryLink) {
  Rng rng(29);
  for (long k : {4L, 16L}) {
    for (Rational xi : {Rational(1, 4), Rational(1, 2)}) {
      for (int t = 0; t < 100; ++t) {
        WindowParams p{BigInt(k), xi, 0};
        p.N = 8 * ceil_pow(Rational(p.K), 1 + xi) + uniform_below(rng, std::uint64_t{5000});
        auto m = clustered_matching(rng, p);
        ASSERT_TRUE(m.monotone());
        auto rep = comb_lemma_check(m, p);
        ASSERT_TRUE(rep.applicable);
        ASSERT_TRUE(rep.indices_in_range);
        ASSERT_TRUE(rep.hypothesis);
        EXPECT_EQ(rep.conclusion, true);
        auto tr = greedy_cover(m, p);
        EXPECT_TRUE(tr.covers);
        EXPECT_TRUE(tr.blocks_bounded);
        EXPECT_TRUE(tr.count_bound);
        EXPECT_TRUE(tr.chain_bound);
        EXPECT_LE(big(tr.total), 2 * p.K * big(tr.v()));
      }
    }
  }
}

TEST(GreedyCover, BlocksFollowTheTieRule) {
  // Equal window sizes pick J.
  Matching m{{{0, 0}, {1, 1}}};
  auto tr = greedy_cover(m, WindowParams{BigInt(1), Rational(1, 2), BigInt(100)});
  ASSERT_EQ(tr.v(), 1u);
  EXPECT_FALSE(tr.blocks[0].from_i);
}
