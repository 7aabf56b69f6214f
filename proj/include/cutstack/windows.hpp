#ifndef CUTSTACK_WINDOWS_HPP
#define CUTSTACK_WINDOWS_HPP

// Window sets over the index pairs of a matching and the greedy cover
// bounding the size of matchings whose windows are all thin.
//
// Indices s are 1-based here (s = 1..r); pair s is theta.pairs[s - 1].

#include "exact.hpp"
#include "fbar.hpp"
#include "rng.hpp"

#include <optional>
#include <vector>

namespace cutstack {

struct WindowParams {
  BigInt K = 1;
  Rational xi{1, 2};
  BigInt N = 0;

  void validate() const {
    if (K < 1) throw domain_error("K must be >= 1");
    if (!(xi > 0 && xi < 1)) throw domain_error("xi must lie in (0, 1)");
    if (sgn(N) < 0) throw domain_error("N must be non-negative");
  }
  /// Integer window width floor(K^{1+xi}); i_s - i_w <= K^{1+xi} iff <= width.
  BigInt width() const { return floor_pow(Rational(K), 1 + xi); }
  /// 8 K^{1+xi} <= N.
  bool applicable() const { return sgn(N) > 0 && compare_pow(Rational(K), 1 + xi, Rational(N, 8)) <= 0; }
};

/// Contiguous set {first, ..., last} of 1-based indices; empty when last < first.
struct IndexRange {
  std::size_t first = 1;
  std::size_t last = 0;
  std::size_t size() const { return last >= first ? last - first + 1 : 0; }
  bool contains(std::size_t s) const { return s >= first && s <= last; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct WindowSets {
  IndexRange I;
  IndexRange J;
};

namespace detail {

inline std::uint64_t width_u64(const BigInt& m) { return fits_u64(m) ? to_u64(m) : ~std::uint64_t{0}; }

inline std::size_t window_end(const Matching& theta, std::size_t w, std::uint64_t m, bool first) {
  auto coord = [&](std::size_t s) { return first ? theta.pairs[s - 1].first : theta.pairs[s - 1].second; };
  const std::uint64_t base = coord(w);
  const std::uint64_t lim = base + m < base ? ~std::uint64_t{0} : base + m;
  std::size_t lo = w, hi = theta.size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (coord(mid) <= lim) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

}  // namespace detail

/// I(M, w) = {s : i_s in [i_w, i_w + M]} and J(M, w) likewise on j. Both are
/// intervals starting at w because the coordinates increase.
inline WindowSets window_sets(const Matching& theta, const BigInt& M, std::size_t w) {
  if (w < 1 || w > theta.size()) throw domain_error("window pivot out of range");
  if (!theta.monotone()) throw domain_error("matching is not monotone");
  if (sgn(M) < 0) throw domain_error("window width must be non-negative");
  const std::uint64_t m = detail::width_u64(M);
  return {{w, detail::window_end(theta, w, m, true)}, {w, detail::window_end(theta, w, m, false)}};
}

/// Sizes |I(M, s)| and |J(M, s)| for every s, by two pointers.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> window_sizes(const Matching& theta,
                                                                                const BigInt& M) {
  const std::size_t r = theta.size();
  const std::uint64_t m = detail::width_u64(M);
  std::vector<std::size_t> si(r), sj(r);
  std::size_t ei = 0, ej = 0;
  for (std::size_t s = 0; s < r; ++s) {
    if (ei < s) ei = s;
    if (ej < s) ej = s;
    const auto [is, js] = theta.pairs[s];
    while (ei + 1 < r && theta.pairs[ei + 1].first - is <= m) ++ei;
    while (ej + 1 < r && theta.pairs[ej + 1].second - js <= m) ++ej;
    si[s] = ei - s + 1;
    sj[s] = ej - s + 1;
  }
  return {si, sj};
}

struct CombReport {
  bool applicable = false;  // 8 K^{1+xi} <= N
  bool indices_in_range = true;
  BigInt width;
  std::size_t r = 0;
  bool hypothesis = false;  // min(|I|, |J|) <= 2K for every s
  std::size_t witness_count = 0;
  std::vector<std::size_t> witnesses;  // first failing s, capped
  /// r < 4N / K^xi; set only when hypothesis and applicability hold.
  std::optional<bool> conclusion;
};

inline CombReport comb_lemma_check(const Matching& theta, const WindowParams& params, std::size_t max_witnesses = 16) {
  params.validate();
  if (!theta.monotone()) throw domain_error("matching is not monotone");
  CombReport rep;
  rep.applicable = params.applicable();
  rep.width = params.width();
  rep.r = theta.size();
  for (auto [i, j] : theta.pairs)
    if (big(i) > params.N || big(j) > params.N) rep.indices_in_range = false;
  const BigInt two_k = 2 * params.K;
  auto [si, sj] = window_sizes(theta, rep.width);
  for (std::size_t s = 0; s < rep.r; ++s)
    if (big(std::min(si[s], sj[s])) > two_k) {
      ++rep.witness_count;
      if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(s + 1);
    }
  rep.hypothesis = rep.witness_count == 0;
  if (rep.hypothesis && rep.applicable && rep.indices_in_range) {
    // r K^xi < 4N
    rep.conclusion = rep.r == 0 || compare_pow(Rational(params.K), params.xi, Rational(4 * params.N, big(rep.r))) < 0;
  }
  return rep;
}

struct CoverBlock {
  std::size_t pivot = 0;
  bool from_i = false;  // B = I(width, pivot), else J(width, pivot)
  IndexRange set;
};

struct CoverTrace {
  std::vector<CoverBlock> blocks;
  std::size_t r = 0;
  std::size_t total = 0;  // sum |B_l|
  BigInt width;
  std::size_t v() const { return blocks.size(); }
  bool covers = false;           // r <= sum |B_l|, and every index is covered
  bool blocks_bounded = false;   // |B_l| <= 2K for all l, so sum <= 2Kv
  bool count_bound = false;      // v/2 <= N / K^{1+xi}
  bool chain_bound = false;      // 2Kv <= 4N / K^xi
  bool ok() const { return covers && blocks_bounded && count_bound; }
};

/// Pivot = least uncovered index; block = the smaller of I and J there
/// (J when the sizes tie).
inline CoverTrace greedy_cover(const Matching& theta, const WindowParams& params) {
  params.validate();
  if (!theta.monotone()) throw domain_error("matching is not monotone");
  CoverTrace tr;
  tr.r = theta.size();
  tr.width = params.width();
  std::vector<char> covered(tr.r + 1, 0);
  std::size_t next = 1, n_covered = 0;
  bool bounded = true;
  const BigInt two_k = 2 * params.K;
  while (n_covered < tr.r) {
    while (covered[next]) ++next;
    auto ws = window_sets(theta, tr.width, next);
    CoverBlock b;
    b.pivot = next;
    b.from_i = ws.I.size() < ws.J.size();
    b.set = b.from_i ? ws.I : ws.J;
    for (std::size_t s = b.set.first; s <= b.set.last; ++s)
      if (!covered[s]) {
        covered[s] = 1;
        ++n_covered;
      }
    tr.total += b.set.size();
    if (big(b.set.size()) > two_k) bounded = false;
    tr.blocks.push_back(b);
  }
  tr.covers = tr.total >= tr.r;
  tr.blocks_bounded = bounded;
  const std::size_t v = tr.v();
  // v K^{1+xi} <= 2N
  tr.count_bound = v == 0 || compare_pow(Rational(params.K), 1 + params.xi, Rational(2 * params.N, big(v))) <= 0;
  // 2Kv K^xi <= 4N
  tr.chain_bound = v == 0 || compare_pow(Rational(params.K), params.xi, Rational(2 * params.N, params.K * big(v))) <= 0;
  return tr;
}

/// Matching made of clusters of at most 2K consecutive-ish pairs, clusters
/// separated in both coordinates by more than floor(K^{1+xi}), inside [0, N].
inline Matching clustered_matching(Rng& rng, const WindowParams& params) {
  params.validate();
  const std::uint64_t m = to_u64(params.width());
  const std::uint64_t n = to_u64(params.N);
  const std::uint64_t two_k = to_u64(2 * params.K);
  Matching theta;
  std::uint64_t i = uniform_below(rng, m + 1), j = uniform_below(rng, m + 1);
  for (;;) {
    const std::uint64_t size = 1 + uniform_below(rng, two_k);
    std::uint64_t ci = i, cj = j;
    bool full = false;
    for (std::uint64_t c = 0; c < size; ++c) {
      if (ci > n || cj > n) {
        full = true;
        break;
      }
      theta.pairs.emplace_back(ci, cj);
      ci += 1 + uniform_below(rng, 3);
      cj += 1 + uniform_below(rng, 3);
    }
    if (full) break;
    const auto& last = theta.pairs.back();
    i = last.first + m + 1 + uniform_below(rng, m + 1);
    j = last.second + m + 1 + uniform_below(rng, m + 1);
    if (i > n || j > n) break;
  }
  return theta;
}

}  // namespace cutstack

#endif  // CUTSTACK_WINDOWS_HPP
