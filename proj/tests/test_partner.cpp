#include "cutstack/alternation.hpp"
#include "cutstack/partner.hpp"
#include "cutstack/rng.hpp"
#include "cutstack/spec.hpp"

#include <gtest/gtest.h>

using namespace cutstack;

namespace {

std::vector<BigInt> powers_of_ten(std::initializer_list<unsigned> e) {
  std::vector<BigInt> v;
  for (unsigned x : e) v.push_back(pow(BigInt(10), x));
  return v;
}

const Rational kGamma(21, 100), kGammaPrime(3, 10);

RankOneSpec shipped_t(std::size_t depth = 20) {
  return build_power_window("T", depth, PowerWindowRule{kGamma, kGammaPrime, CutChoice::mid, 0, {}},
                            SpacerRule::staircase());
}

PartnerParams shipped_params() { return PartnerParams{kGamma, kGammaPrime, 7}; }

/// First index n >= 1 with a_n inside [b_1, b_last) failing
/// b_m^(u+v) < a_n^v or a_n^(u+v) < b_{m+1}^v, for delta = u/v.
std::optional<std::size_t> brute_first_failure(const std::vector<BigInt>& a, const std::vector<BigInt>& b,
                                               unsigned u, unsigned v) {
  for (std::size_t n = 0; n < a.size(); ++n)
    for (std::size_t m = 0; m + 1 < b.size(); ++m) {
      if (!(b[m] <= a[n] && a[n] < b[m + 1])) continue;
      bool ok = pow(b[m], u + v) < pow(a[n], v) && pow(a[n], u + v) < pow(b[m + 1], v);
      if (!ok) return n + 1;
    }
  return std::nullopt;
}

}  // namespace

TEST(Alternation, PowersOfTenExample) {
  auto b = powers_of_ten({1, 7, 31});
  auto a = powers_of_ten({3, 15});
  auto r = check_mutual_alternation(a, b, Rational(1));
  EXPECT_TRUE(r.b_wrt_a.verdict);
  EXPECT_EQ(r.b_wrt_a.decided, 2u);
  EXPECT_EQ(r.b_wrt_a.entries[0].bracket, 1u);
  EXPECT_EQ(r.b_wrt_a.entries[1].bracket, 2u);
  // b_1 < a_1 and b_3 > a_2 leave those two b indices undecidable.
  EXPECT_TRUE(r.a_wrt_b.verdict);
  EXPECT_EQ(r.a_wrt_b.decided, 1u);
  EXPECT_EQ(r.a_wrt_b.undecidable, 2u);
}

TEST(Alternation, EqualSequencesFail) {
  auto a = powers_of_ten({1, 4, 9, 20});
  auto r = check_alternating(a, a, Rational(1, 10));
  EXPECT_FALSE(r.verdict);
  EXPECT_EQ(r.first_failure, 1u);
  EXPECT_FALSE(r.entries[0].lower_gap);
}

TEST(Alternation, Errors) {
  EXPECT_THROW(check_alternating({BigInt(3), BigInt(2)}, {BigInt(1)}, Rational(1)), domain_error);
  EXPECT_THROW(check_alternating({BigInt(1)}, {BigInt(1)}, Rational(0)), domain_error);
}

TEST(Alternation, FirstFailureMatchesBruteScan) {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    // Interleaved geometric-ish sequences with random gaps.
    std::vector<BigInt> a, b;
    BigInt x = 2;
    for (int i = 0; i < 14; ++i) {
      x = x * (1 + uniform_below(rng, std::uint64_t{40})) + 1;
      (uniform_below(rng, std::uint64_t{2}) ? a : b).push_back(x);
    }
    if (a.empty() || b.empty()) continue;
    for (auto [u, v] : {std::pair{1u, 1u}, std::pair{1u, 2u}, std::pair{1u, 20u}}) {
      auto r = check_alternating(a, b, Rational(u, v));
      EXPECT_EQ(r.first_failure, brute_first_failure(a, b, u, v)) << "trial " << t;
      EXPECT_EQ(r.verdict, !r.first_failure.has_value());
    }
  }
}

TEST(Partner, ConstructAndVerifyShippedPair) {
  auto t = shipped_t();
  auto res = construct_partner(t, shipped_params());
  const auto& s = res.spec;
  EXPECT_EQ(s.label, "T-partner");
  EXPECT_EQ(s.max_stage(), t.max_stage() - 1);
  for (std::size_t n = 1; n <= 8; ++n) {
    EXPECT_EQ(s.cut(n), 2);
    EXPECT_EQ(s.spacers(n).kind(), SpacerKind::none);
  }
  for (std::size_t n = 9; n <= s.max_stage(); ++n) EXPECT_EQ(s.spacers(n).kind(), SpacerKind::staircase);
  for (const auto& w : res.trace.windows) {
    EXPECT_TRUE(w.contains_choice()) << "stage " << w.stage();
    EXPECT_TRUE(w.length_bound);
    EXPECT_EQ(w.chosen, s.cut(w.stage()));
    // Least admissible: one less would fall below the window or below 2.
    EXPECT_TRUE(w.chosen == 2 || w.prefix * (w.chosen - 1) < w.lower);
  }
  auto v = verify_partner(t, s, shipped_params(), VerifyOptions{0, 14});
  EXPECT_EQ(v.threshold, 10u);
  EXPECT_TRUE(v.staircase_form);
  EXPECT_TRUE(v.p_window_ok);
  EXPECT_TRUE(v.class_s.verdict);
  EXPECT_TRUE(v.class_t.verdict);
  EXPECT_TRUE(v.alternation_ok);
  EXPECT_TRUE(v.ok());
  // Rerun is bit-identical.
  EXPECT_EQ(construct_partner(t, shipped_params()).spec, s);
  EXPECT_EQ(serialize_trace(construct_partner(t, shipped_params()).trace), serialize_trace(res.trace));
  EXPECT_TRUE(intermediate_chain_check(t, s, shipped_params()).ok());
}

TEST(Partner, AlternationInequalityOfTheConstruction) {
  auto t = shipped_t();
  auto s = construct_partner(t, shipped_params()).spec;
  auto ht = compute_stats(t).heights, hs = compute_stats(s).heights;
  // (h^S_{n-1})^{1+gamma/4} < h^T_n once the construction is under way.
  for (std::size_t n = 14; n <= hs.size(); ++n)
    EXPECT_LT(compare_pow(Rational(hs[n - 2]), 1 + kGamma / 4, Rational(ht[n - 1])), 0) << n;
}

TEST(Partner, SelfAsPartnerFailsAlternation) {
  auto t = shipped_t(14);
  auto v = verify_partner(t, t, shipped_params());
  EXPECT_FALSE(v.alternation_ok);
  EXPECT_FALSE(v.ok());
}

TEST(Partner, SpacerFreePartnerFailsStaircaseForm) {
  auto t = shipped_t(14);
  auto s = construct_partner(t, shipped_params()).spec;
  for (auto& st : s.stages) st.spacers = SpacerRule::none();
  auto v = verify_partner(t, s, shipped_params());
  EXPECT_FALSE(v.staircase_form);
  EXPECT_EQ(v.staircase_failure, v.threshold);
}

TEST(Partner, RejectsBadInputs) {
  auto t = shipped_t(14);
  EXPECT_THROW(construct_partner(t, PartnerParams{kGamma, Rational(1, 2), 7}), domain_error);
  EXPECT_THROW(construct_partner(t, PartnerParams{kGamma, kGammaPrime, 7, Rational(1, 50)}), domain_error);
  // Membership only starts at stage 5.
  EXPECT_THROW(construct_partner(t, PartnerParams{kGamma, kGammaPrime, 2}), domain_error);
}

TEST(Partner, EmptyWindowReportsStage) {
  // With n' = 5 the first post-doubling window is already empty.
  auto t = shipped_t(16);
  try {
    construct_partner(t, PartnerParams{kGamma, kGammaPrime, 5});
    ADD_FAILURE() << "expected construction_failure";
  } catch (const construction_failure& e) {
    EXPECT_EQ(e.stage(), 7u);
    EXPECT_GT(e.lower(), e.upper());
  }
}

TEST(Chain, OdometerCrossover) {
  auto od = odometer(10);
  auto r = intermediate_chain_check(od, od, shipped_params());
  // 4 h_n <= h_n^{1.9} first holds at h_n = 8.
  EXPECT_EQ(r.height_bound_tail, 4u);
  for (const auto& e : r.height_bound) EXPECT_EQ(e.holds, e.n >= 4) << e.n;
}

TEST(Chain, EmptyRangeIsVacuous) {
  auto od = odometer(4);
  auto r = intermediate_chain_check(od, od, shipped_params(), 50);
  EXPECT_TRUE(r.left.empty());
  EXPECT_TRUE(r.right.empty());
  EXPECT_TRUE(r.ok());
}
