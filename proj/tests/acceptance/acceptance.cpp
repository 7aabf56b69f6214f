// Acceptance gate: one PASS/FAIL line per check, with pinned tolerances and
// time budgets. Exit status is 0 unless a check outside kExpectedRed fails.

#include "cutstack/cutstack.hpp"
#include "oracles/atk_oracle.hpp"
#include "oracles/generators.hpp"
#include "oracles/lcs_oracle.hpp"
#include "oracles/stacking_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace cutstack;

namespace {

// Checks known to be unattainable at computable depth. They still print FAIL.
const std::set<int> kExpectedRed{6};

const Rational kGamma(21, 100), kGammaPrime(3, 10);
constexpr std::size_t kNPrime = 7;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Word = std::vector<std::uint32_t>;

Word random_word(Rng& rng, std::size_t k, std::uint64_t alphabet) {
  Word w(k);
  for (auto& x : w) x = static_cast<std::uint32_t>(uniform_below(rng, alphabet));
  return w;
}

RankOneSpec shipped_t(std::size_t depth) {
  return build_power_window("T", depth, PowerWindowRule{kGamma, kGammaPrime, CutChoice::mid, 0, {}},
                            SpacerRule::staircase());
}

// ------------------------------------------------------------------ heights

BigInt spacer_total(const Stage& st) {
  switch (st.spacers.kind()) {
    case SpacerKind::none:
      return 0;
    case SpacerKind::staircase:
      return st.cut * (st.cut + 1) / 2;
    default: {
      BigInt t = 0;
      for (const auto& v : st.spacers.values()) t += v;
      return t;
    }
  }
}

Outcome check_heights() {
  Rng rng(101);
  Outcome o;
  std::size_t bad = 0, stages = 0;
  for (int t = 0; t < 50; ++t) {
    RankOneSpec spec;
    if (t % 5 == 4) {
      // Astronomical cuts: power-window staircases with random cut choice.
      spec = build_power_window("pw", 6 + uniform_below(rng, 7), PowerWindowRule{kGamma, kGammaPrime, CutChoice::uniform, rng(), {}},
                                SpacerRule::staircase());
    } else {
      spec = gen::random_small_spec(rng, 4'000'000'000'000'000'000ull, 12, 2 + uniform_below(rng, 40));
    }
    const auto s = compute_stats(spec);
    Rational k = 1;
    BigInt prod = 1, h = 1;
    for (std::size_t n = 1; n <= spec.top_stage(); ++n) {
      ++stages;
      if (n > 1) {
        const Stage& st = spec.stages[n - 2];
        h = st.cut * h + spacer_total(st);
        Rational e(spacer_total(st), prod * st.cut);
        e.canonicalize();
        k *= 1 + e;
        prod *= st.cut;
      }
      const bool ok = s.height(n) == h && s.height(n) >= (BigInt(1) << (n - 1)) && prod <= s.height(n) &&
                      Rational(s.height(n)) <= k * Rational(prod);
      if (!ok) ++bad;
    }
    if (s.k_bound != k) ++bad;
  }
  o.pass = bad == 0;
  o.detail = "specs=50 stages=" + std::to_string(stages) + " violations=" + std::to_string(bad);
  return o;
}

// ------------------------------------------------------------- orbit oracle

Outcome check_orbit_oracle() {
  Rng rng(202);
  Outcome o;
  std::size_t specs = 0, symbols = 0, mismatches = 0;
  for (int t = 0; t < 10; ++t) {
    auto spec = gen::random_small_spec(rng, 100'000, 12);
    RankOneSystem sys(spec);
    oracle::Stacking st(gen::to_oracle(spec));
    const std::size_t h = st.height(), len = h / 2;
    if (len < 2) continue;
    ++specs;
    for (int r = 0; r < 100; ++r) {
      const std::size_t start = uniform_below(rng, std::uint64_t{h - len + 1});
      const std::size_t n = 1 + uniform_below(rng, std::uint64_t{sys.max_stage()});
      auto w = code_orbit(sys, state_from_level(sys, big(start)), n, len);
      const std::int64_t hn = st.tower_height(n);
      for (std::size_t i = 0; i < len; ++i) {
        const std::int64_t lv = st.at(start + i).level[n - 1];
        mismatches += w.symbols[i] != static_cast<std::uint32_t>(lv < 0 ? hn : lv);
      }
      symbols += len;
    }
  }
  o.pass = mismatches == 0 && specs >= 5;
  o.detail = "specs=" + std::to_string(specs) + " symbols=" + std::to_string(symbols) +
             " mismatches=" + std::to_string(mismatches);
  return o;
}

// -------------------------------------------------------------- f-bar kernels

Outcome check_fbar() {
  Rng rng(303);
  Outcome o;
  std::size_t fast_bad = 0, enum_bad = 0, enum_pairs = 0, axiom_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + uniform_below(rng, std::uint64_t{512});
    const std::uint64_t alpha = 1 + uniform_below(rng, std::uint64_t{32});
    auto a = random_word(rng, k, alpha), b = random_word(rng, k, alpha);
    auto ex = fbar_exact(a, b, false);
    auto fa = fbar_fast(a, b);
    fast_bad += ex.r != fa.r || ex.value != fa.value;
  }
  for (std::size_t k = 1; k <= 8; ++k)
    for (std::uint32_t x = 0; x < (1u << k); ++x)
      for (std::uint32_t y = 0; y < (1u << k); ++y) {
        auto a = oracle::binary_word(x, k), b = oracle::binary_word(y, k);
        const std::size_t want = oracle::lcs_enumerate(a, b);
        auto ex = fbar_exact(a, b);
        ++enum_pairs;
        enum_bad += ex.r != want || ex.value != fbar_value(want, k) || !matching_valid(a, b, *ex.matching);
      }
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + uniform_below(rng, std::uint64_t{256});
    const std::uint64_t alpha = 1 + uniform_below(rng, std::uint64_t{4});
    auto a = random_word(rng, k, alpha), b = random_word(rng, k, alpha), c = random_word(rng, k, alpha);
    const Rational ab = fbar_fast(a, b).value, ba = fbar_fast(b, a).value;
    const Rational bc = fbar_fast(b, c).value, ac = fbar_fast(a, c).value;
    axiom_bad += ab != ba || ac > ab + bc || fbar_fast(a, a).value != 0;
  }
  o.pass = fast_bad == 0 && enum_bad == 0 && axiom_bad == 0;
  o.detail = "fast_vs_exact=" + std::to_string(fast_bad) + "/1000 exhaustive=" + std::to_string(enum_bad) + "/" +
             std::to_string(enum_pairs) + " axioms=" + std::to_string(axiom_bad) + "/1000";
  return o;
}

// ------------------------------------------------------------- window lemma

Outcome check_window_lemma() {
  Rng rng(404);
  Outcome o;
  std::size_t runs = 0, bad = 0, not_applicable = 0;
  const long ks[] = {16, 64, 256};
  const Rational xis[] = {Rational(1, 4), Rational(1, 2)};
  for (int t = 0; t < 1000; ++t) {
    WindowParams p{BigInt(ks[t % 3]), xis[(t / 3) % 2], 0};
    p.N = 8 * ceil_pow(Rational(p.K), 1 + p.xi) + uniform_below(rng, std::uint64_t{20000});
    auto m = clustered_matching(rng, p);
    auto rep = comb_lemma_check(m, p);
    ++runs;
    if (!(rep.applicable && rep.indices_in_range && rep.hypothesis)) {
      ++not_applicable;
      continue;
    }
    auto tr = greedy_cover(m, p);
    const bool ok = rep.conclusion == true && tr.covers && tr.blocks_bounded && tr.count_bound && tr.chain_bound &&
                    big(tr.total) <= 2 * p.K * big(tr.v());
    bad += !ok;
  }
  o.pass = bad == 0 && not_applicable == 0;
  o.detail = "matchings=" + std::to_string(runs) + " violations=" + std::to_string(bad) +
             " hypothesis_unmet=" + std::to_string(not_applicable);
  return o;
}

// ------------------------------------------------------------------ partner

Outcome check_partner() {
  Outcome o;
  const PartnerParams params{kGamma, kGammaPrime, kNPrime};
  auto t = shipped_t(20);
  auto s = construct_partner(t, params).spec;
  // Alternation only has to hold from some index on; 14 is the pinned
  // witness (both directions fail at 11 or 12, inside the cut-2 prefix's reach).
  auto v = verify_partner(t, s, params, VerifyOptions{10, 14});
  std::size_t undecidable = 0;
  for (const auto* r : {&v.alternation.b_wrt_a, &v.alternation.a_wrt_b}) undecidable += r->undecidable;
  o.pass = s.max_stage() >= 8 && v.ok() && v.class_t.verdict;
  std::ostringstream os;
  os << "depth=" << s.max_stage() << " staircase=" << v.staircase_form << " p_window=" << v.p_window_ok
     << " class_s=" << v.class_s.verdict << " alternation=" << v.alternation.b_wrt_a.verdict << "/"
     << v.alternation.a_wrt_b.verdict << " undecidable=" << undecidable;
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------- good-set measure

Outcome check_good_measure() {
  Outcome o;
  const PartnerParams params{kGamma, kGammaPrime, kNPrime};
  RankOneSystem t(shipped_t(20));
  RankOneSystem s(construct_partner(t.spec(), params).spec);
  GoodSets gt(t, GoodSetParams{kGamma, kGammaPrime, kNPrime + 3});
  GoodSets gs(s, GoodSetParams{kGamma / 3, 3 * kGammaPrime, kNPrime + 3});
  Rng rng(606);
  std::ostringstream os;
  std::size_t fails = 0, stages = 0;
  for (auto [name, g] : {std::pair{"T", &gt}, std::pair{"S", &gs}}) {
    auto est = estimate_F_measures(*g, 100000, rng);
    std::vector<std::size_t> failed;
    for (const auto& e : est) {
      if (e.stage < 4) continue;
      ++stages;
      const double n = static_cast<double>(e.stage);
      if (e.mean() < 1 - 4 / (n * n) - 3 * e.sigma()) failed.push_back(e.stage);
    }
    fails += failed.size();
    os << name << "_failing_stages=";
    for (std::size_t i = 0; i < failed.size(); ++i) os << (i ? "," : "") << failed[i];
    if (failed.empty()) os << "none";
    char buf[64];
    std::snprintf(buf, sizeof buf, "(mu_%zu=%.4f) ", est.back().stage, est.back().mean());
    os << buf;
  }
  o.pass = fails == 0;
  os << "stages=" << stages << " samples=100000";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ A_theta

RankOneSpec explicit_spec(const std::string& label, const std::vector<unsigned long>& cuts, Rng& rng,
                          std::uint64_t max_spacer) {
  RankOneSpec spec{label, {}};
  for (auto p : cuts) {
    std::vector<BigInt> v;
    for (unsigned long i = 0; i < p; ++i) v.push_back(big(uniform_below(rng, max_spacer + 1)));
    spec.stages.push_back({BigInt(p), SpacerRule::explicit_values(v)});
  }
  return spec;
}

Outcome check_a_theta() {
  Rng rng(707);
  Outcome o;
  std::size_t runs = 0, brute_bad = 0, low_k = 0, union_bad = 0, good = 0, undecidable = 0;
  const std::size_t n0 = 3, n1 = 3, N = 200;
  for (int trial = 0; trial < 20; ++trial) {
    auto spec_t = explicit_spec("t", {4, 8, 8}, rng, 1);
    auto spec_s = explicit_spec("s", {4, 7, 9}, rng, 1);
    RankOneSystem st(spec_t), ss(spec_s);
    if (st.height(4) > 1000 || ss.height(4) > 1000) throw std::logic_error("materialized factor too tall");
    oracle::Stacking ot(gen::to_oracle(spec_t)), os(gen::to_oracle(spec_s));
    auto factor = [](const oracle::Stacking& o, const RankOneSpec& spec, const RankOneSystem& sys) {
      oracle::Factor f{&o, gen::to_oracle(spec), {}, 1, 40};  // column margin exponent gamma/4, gamma = 1/10
      for (std::size_t n = 1; n <= sys.top_stage(); ++n) f.heights.push_back(o.tower_height(n));
      return f;
    };
    auto ft_o = factor(ot, spec_t, st), fs_o = factor(os, spec_s, ss);
    GoodSets ft(st, GoodSetParams{Rational(1, 10), Rational(1, 2), n1});
    GoodSets fs(ss, GoodSetParams{Rational(1, 10), Rational(1, 2), n1});
    const auto ht = to_u64(st.height(4)), hs = to_u64(ss.height(4));
    for (int rep = 0; rep < 10; ++rep) {
      std::uint64_t x, y, xp, yp;
      // Distinct product orbits: equal offsets in both factors would pair a point with itself.
      do {
        x = uniform_below(rng, ht - N), y = uniform_below(rng, hs - N);
        xp = uniform_below(rng, ht - N), yp = uniform_below(rng, hs - N);
      } while (x - xp == y - yp);
      auto first = product_orbit(st, ss, state_from_level(st, big(x)), state_from_level(ss, big(y)), N);
      auto second = product_orbit(st, ss, state_from_level(st, big(xp)), state_from_level(ss, big(yp)), N);
      auto w1 = code_product_orbit(st, ss, first.t[0], first.s[0], n0, N);
      auto w2 = code_product_orbit(st, ss, second.t[0], second.s[0], n0, N);
      const Matching theta = lcs_matching(w1.symbols, w2.symbols);
      ++runs;
      auto got = a_theta_partition(ft, fs, first, second, theta, n0);
      auto want = oracle::atk_brute(ft_o, fs_o, static_cast<std::int64_t>(x), static_cast<std::int64_t>(y),
                                    static_cast<std::int64_t>(xp), static_cast<std::int64_t>(yp), theta.pairs, n0, n1);
      std::set<std::size_t> ks;
      for (const auto& [k, v] : got.sets) ks.insert(k);
      for (const auto& [k, v] : want.sets) ks.insert(k);
      for (std::size_t k = 0; k <= 12; ++k) ks.insert(k);
      for (auto k : ks) {
        auto it = want.sets.find(k);
        const std::vector<std::size_t> expect = it == want.sets.end() ? std::vector<std::size_t>{} : it->second;
        brute_bad += a_theta_k(ft, fs, first, second, theta, k, n0) != expect;
        if (2 * k < n0) low_k += got.size(k);
      }
      std::set<std::size_t> all;
      for (const auto& [k, v] : got.sets) all.insert(v.begin(), v.end());
      union_bad += all != std::set<std::size_t>(got.good.begin(), got.good.end());
      good += got.good.size();
      undecidable += got.undecidable.size() + got.level_mismatch.size();
    }
  }
  o.pass = brute_bad == 0 && low_k == 0 && union_bad == 0 && good > 0;
  o.detail = "runs=" + std::to_string(runs) + " brute_mismatch=" + std::to_string(brute_bad) +
             " low_k_members=" + std::to_string(low_k) + " union_ne_H=" + std::to_string(union_bad) +
             " good=" + std::to_string(good) + " unscaled=" + std::to_string(undecidable);
  return o;
}

// -------------------------------------------------------------- directional

Outcome check_directional() {
  Outcome o;
  Experiment ex(load_config(std::string(CUTSTACK_CONFIG_DIR) + "/shipped.cfg"));
  const auto& cfg = ex.config();
  auto recs = fbar_sweep(ex);
  std::size_t inadmissible = 0;
  for (const auto& r : recs) inadmissible += !r.admissible;
  auto rows = summarize(recs);
  bool enough = cfg.pairs >= 20 && rows.size() == cfg.sources.size() * cfg.lengths.size();
  for (const auto& r : rows) enough = enough && r.count >= 20;
  auto dc = directional_check(rows);
  std::ostringstream os;
  for (const auto& r : rows) os << r.source << "@" << r.N << "=" << to_decimal(r.median, 5) << " ";
  os << "inadmissible=" << inadmissible;
  for (const auto& f : dc.failures) os << " [" << f << "]";
  o.pass = enough && inadmissible == 0 && dc.ok();
  o.detail = os.str();
  return o;
}

}  // namespace

int main() {
  struct Check {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Check> checks{
      {1, "heights", 1.0, check_heights},
      {2, "orbit-oracle", 30.0, check_orbit_oracle},
      {3, "fbar-kernels", 60.0, check_fbar},
      {4, "window-lemma", 60.0, check_window_lemma},
      {5, "partner", 10.0, check_partner},
      {6, "good-set-measure", 1e9, check_good_measure},
      {7, "a-theta", 1e9, check_a_theta},
      {8, "directional", 600.0, check_directional},
  };
  int unexpected = 0;
  for (const auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    const bool expected = kExpectedRed.count(c.id) > 0;
    std::printf("%s %d %s: %s; %.2fs", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    if (c.budget_s < 1e8) std::printf(" (budget %.0fs)", c.budget_s);
    if (!pass && expected) std::printf(" [expected]");
    if (pass && expected) std::printf(" [expected red, now green]");
    std::printf("\n");
    std::fflush(stdout);
    if (!pass && !expected) ++unexpected;
  }
  return unexpected ? 1 : 0;
}
