#ifndef CUTSTACK_FBAR_HPP
#define CUTSTACK_FBAR_HPP

// f-bar distance 1 - r/k between equal-length words, where r is the size of
// a largest matching, i.e. the LCS length.
//
// Kernels:
//   lcs_length_dp     quadratic DP, two rows (reference)
//   lcs_matching      Hirschberg divide and conquer, linear space
//   lcs_length_bits   bit-parallel, k^2/64 word operations

#include "exact.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cutstack {

using Symbols = std::span<const std::uint32_t>;

/// Index pairs (i_s, j_s), s = 1..r, stored 0-based.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool monotone() const {
    for (std::size_t s = 1; s < pairs.size(); ++s)
      if (!(pairs[s].first > pairs[s - 1].first && pairs[s].second > pairs[s - 1].second)) return false;
    return true;
  }
  friend bool operator==(const Matching&, const Matching&) = default;
};

struct FbarResult {
  std::size_t k = 0;
  std::size_t r = 0;
  Rational value;
  std::optional<Matching> matching;
};

inline Rational fbar_value(std::size_t r, std::size_t k) {
  Rational v(BigInt(static_cast<unsigned long>(k - r)), BigInt(static_cast<unsigned long>(k)));
  v.canonicalize();
  return v;
}

inline void require_same_length(Symbols a, Symbols b) {
  if (a.size() != b.size()) throw domain_error("f-bar needs words of equal length");
  if (a.empty()) throw domain_error("f-bar of empty words");
}

/// Both coordinates strictly increasing, inside the words, matching equal symbols.
inline bool matching_valid(Symbols a, Symbols b, const Matching& m) {
  if (!m.monotone()) return false;
  for (auto [i, j] : m.pairs)
    if (i >= a.size() || j >= b.size() || a[i] != b[j]) return false;
  return true;
}

namespace detail {

/// row[j] = LCS(a, b[0..j)) for j = 0..|b|, rolling over a.
inline std::vector<std::uint32_t> lcs_last_row(Symbols a, Symbols b) {
  std::vector<std::uint32_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    cur[0] = 0;
    const std::uint32_t ai = a[i];
    for (std::size_t j = 0; j < b.size(); ++j)
      cur[j + 1] = ai == b[j] ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    std::swap(prev, cur);
  }
  return prev;
}

/// Same as lcs_last_row on the reversed words: row[j] = LCS(a, last j symbols of b).
inline std::vector<std::uint32_t> lcs_last_row_reversed(Symbols a, Symbols b) {
  std::vector<std::uint32_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  const std::size_t n = b.size();
  for (std::size_t i = a.size(); i-- > 0;) {
    cur[0] = 0;
    const std::uint32_t ai = a[i];
    for (std::size_t j = 0; j < n; ++j)
      cur[j + 1] = ai == b[n - 1 - j] ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    std::swap(prev, cur);
  }
  return prev;
}

/// Full-table LCS with traceback for small blocks.
inline void lcs_block(Symbols a, Symbols b, std::size_t a0, std::size_t b0,
                      std::vector<std::pair<std::size_t, std::size_t>>& out) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::uint32_t> t((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return t[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = a[i - 1] == b[j - 1] ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));
  std::vector<std::pair<std::size_t, std::size_t>> rev;
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1] && at(i, j) == at(i - 1, j - 1) + 1) {
      rev.emplace_back(a0 + i - 1, b0 + j - 1);
      --i;
      --j;
    } else if (at(i - 1, j) >= at(i, j - 1)) {
      --i;
    } else {
      --j;
    }
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
}

inline void hirschberg(Symbols a, Symbols b, std::size_t a0, std::size_t b0,
                       std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (a.empty() || b.empty()) return;
  if (a.size() * b.size() <= 4096 || a.size() == 1) {
    lcs_block(a, b, a0, b0, out);
    return;
  }
  const std::size_t mid = a.size() / 2;
  auto upper = lcs_last_row(a.first(mid), b);
  auto lower = lcs_last_row_reversed(a.subspan(mid), b);
  std::size_t split = 0;
  std::uint32_t best = 0;
  for (std::size_t s = 0; s <= b.size(); ++s) {
    std::uint32_t v = upper[s] + lower[b.size() - s];
    if (v > best || s == 0) {
      best = v;
      split = s;
    }
  }
  hirschberg(a.first(mid), b.first(split), a0, b0, out);
  hirschberg(a.subspan(mid), b.subspan(split), a0 + mid, b0 + split, out);
}

}  // namespace detail

/// Reference quadratic DP, O(k) memory.
inline std::size_t lcs_length_dp(Symbols a, Symbols b) { return detail::lcs_last_row(a, b).back(); }

/// One maximum matching, linear space.
inline Matching lcs_matching(Symbols a, Symbols b) {
  Matching m;
  detail::hirschberg(a, b, 0, 0, m.pairs);
  return m;
}

/// Bit-parallel LCS length. Bits of V mark columns of b; a zero bit is a
/// column where the LCS grew. Per symbol x of a:
///   U = V & M[x];  V = (V + U) | (V & ~M[x])
inline std::size_t lcs_length_bits(Symbols a, Symbols b) {
  const std::size_t m = b.size();
  if (m == 0 || a.empty()) return 0;
  const std::size_t words = (m + 63) / 64;
  std::unordered_map<std::uint32_t, std::size_t> index;
  std::vector<std::uint64_t> masks;
  for (std::size_t j = 0; j < m; ++j) {
    auto [it, fresh] = index.emplace(b[j], index.size());
    if (fresh) masks.resize(masks.size() + words, 0);
    masks[it->second * words + j / 64] |= std::uint64_t{1} << (j % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (std::uint32_t x : a) {
    auto it = index.find(x);
    if (it == index.end()) continue;  // M = 0 leaves V unchanged
    const std::uint64_t* mk = &masks[it->second * words];
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t vw = v[w], u = vw & mk[w];
      const std::uint64_t s1 = vw + u;
      const std::uint64_t c1 = s1 < vw;
      const std::uint64_t s2 = s1 + carry;
      const std::uint64_t c2 = s2 < s1;
      carry = c1 | c2;
      v[w] = s2 | (vw & ~mk[w]);
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t live = w + 1 == words && m % 64 ? (std::uint64_t{1} << (m % 64)) - 1 : ~std::uint64_t{0};
    zeros += static_cast<std::size_t>(std::popcount(~v[w] & live));
  }
  return zeros;
}

inline FbarResult fbar_exact(Symbols a, Symbols b, bool with_matching = true) {
  require_same_length(a, b);
  FbarResult res;
  res.k = a.size();
  if (with_matching) {
    Matching m = lcs_matching(a, b);
    res.r = m.size();
    res.matching = std::move(m);
  } else {
    res.r = lcs_length_dp(a, b);
  }
  res.value = fbar_value(res.r, res.k);
  return res;
}

inline FbarResult fbar_fast(Symbols a, Symbols b) {
  require_same_length(a, b);
  FbarResult res;
  res.k = a.size();
  res.r = lcs_length_bits(a, b);
  res.value = fbar_value(res.r, res.k);
  return res;
}

/// Largest matching whose pairs all satisfy |i - j| <= band, in O(k band).
/// Cells left of the band equal the cell above them and cells right of it
/// equal the last band cell of their row, so only band cells are computed.
inline std::size_t lcs_length_banded(Symbols a, Symbols b, std::size_t band) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::uint32_t> prev(m + 1, 0), cur(m + 1, 0);
  std::size_t prev_hi = m;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > band ? i - band : 1;
    const std::size_t hi = std::min(m, i + band);
    if (lo > m) break;
    cur[lo - 1] = lo == 1 ? 0 : prev[lo - 1];
    for (std::size_t j = lo; j <= hi; ++j) {
      const std::uint32_t up = j <= prev_hi ? prev[j] : prev[prev_hi];
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(up, cur[j - 1]);
    }
    std::swap(prev, cur);
    prev_hi = hi;
  }
  return prev[prev_hi];
}

/// r is at most the shared-symbol mass sum_x min(#x in a, #x in b).
inline std::size_t histogram_overlap(Symbols a, Symbols b) {
  std::unordered_map<std::uint32_t, std::int64_t> c;
  for (auto x : a) ++c[x];
  std::size_t overlap = 0;
  for (auto x : b) {
    auto it = c.find(x);
    if (it != c.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return overlap;
}

struct FbarBounds {
  Rational lower;
  Rational upper;
  std::size_t banded_r = 0;
  bool exact = false;
};

/// lower <= f-bar(a, b) <= upper. The banded DP gives a valid matching
/// (upper bound); the histogram overlap bounds r from above (lower bound).
inline FbarBounds fbar_bounds(Symbols a, Symbols b, long band) {
  require_same_length(a, b);
  if (band < 0) throw domain_error("band must be non-negative");
  const std::size_t k = a.size();
  FbarBounds out;
  out.banded_r = lcs_length_banded(a, b, static_cast<std::size_t>(band));
  out.upper = fbar_value(out.banded_r, k);
  if (static_cast<std::size_t>(band) + 1 >= k) {
    out.lower = out.upper;
    out.exact = true;
  } else {
    out.lower = fbar_value(histogram_overlap(a, b), k);
  }
  return out;
}

}  // namespace cutstack

#endif  // CUTSTACK_FBAR_HPP
