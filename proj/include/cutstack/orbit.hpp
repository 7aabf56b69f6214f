#ifndef CUTSTACK_ORBIT_HPP
#define CUTSTACK_ORBIT_HPP

// Points of a truncated rank-one tower in adic form, and the map T on them.
//
// A system with cuts p_1..p_M describes the towers T_1..T_{M+1}. A point of
// the top tower T_{M+1} is either
//   * a point of the base interval T_1, given by its columns c_1..c_M
//     (c_n is the column of T_n inside T_{n+1} that contains it), or
//   * a point of a spacer level added at stage k, given by the column c_k
//     the spacer block sits on, its offset inside the block, and the
//     columns c_{k+1}..c_M that place the block inside T_{M+1}.
// Stepping past the top of T_{M+1} would need c_{M+1} and raises
// orbit_escape.

#include "exact.hpp"
#include "rng.hpp"
#include "spec.hpp"
#include "tower.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cutstack {

class orbit_escape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable spec plus its exact heights; safe to share between threads.
class RankOneSystem {
 public:
  explicit RankOneSystem(RankOneSpec spec) : spec_(std::move(spec)), stats_(compute_stats(spec_)) {
    for (const auto& h : stats_.heights) {
      if (!fits_u64(h) || h >= (BigInt(1) << 62)) break;
      small_heights_.push_back(to_u64(h));
    }
  }

  const RankOneSpec& spec() const { return spec_; }
  const TowerStats& stats() const { return stats_; }
  std::size_t max_stage() const { return spec_.max_stage(); }
  std::size_t top_stage() const { return spec_.top_stage(); }
  const BigInt& height(std::size_t n) const { return stats_.height(n); }
  const BigInt& cut(std::size_t n) const { return spec_.cut(n); }
  const SpacerRule& spacers(std::size_t n) const { return spec_.spacers(n); }

  /// Largest n such that h_n (and everything below it) fits comfortably in 64 bits.
  std::size_t small_stage_limit() const { return small_heights_.size(); }
  std::uint64_t small_height(std::size_t n) const { return small_heights_.at(n - 1); }

 private:
  RankOneSpec spec_;
  TowerStats stats_;
  std::vector<std::uint64_t> small_heights_;
};

/// A point of the base interval T_1 in column coordinates c_1..c_M.
struct PointAddress {
  std::vector<BigInt> columns;

  friend bool operator==(const PointAddress&, const PointAddress&) = default;
};

struct OrbitState {
  /// 0 for a point of T_1, otherwise the stage whose spacers contain the point.
  std::size_t spacer_stage = 0;
  /// Position inside the spacer block (spacer states only).
  BigInt spacer_offset;
  /// columns[n-1] = c_n. Entries below spacer_stage are 0 (undefined).
  std::vector<BigInt> columns;

  bool in_spacer() const { return spacer_stage != 0; }
  const BigInt& column(std::size_t n) const { return columns.at(n - 1); }

  static OrbitState at(PointAddress address) { return OrbitState{0, 0, std::move(address.columns)}; }

  friend bool operator==(const OrbitState& a, const OrbitState& b) {
    return a.spacer_stage == b.spacer_stage && a.spacer_offset == b.spacer_offset && a.columns == b.columns;
  }
};

namespace detail {

inline bool has_spacer(const SpacerRule& rule, const BigInt& column) {
  switch (rule.kind()) {
    case SpacerKind::none:
      return false;
    case SpacerKind::staircase:
      return true;
    case SpacerKind::explicit_values:
      break;
  }
  return sgn(rule.at(column)) > 0;
}

/// First level of column c inside T_{n+1}: (c-1) h_n + sum_{i<c} a_{n,i}.
inline BigInt column_start(const RankOneSystem& sys, std::size_t n, const BigInt& c) {
  return (c - 1) * sys.height(n) + sys.spacers(n).prefix_sum(c - 1);
}

/// Column c of T_n inside T_{n+1} whose block (column plus its spacers)
/// contains the T_{n+1} level L.
inline BigInt find_column(const RankOneSystem& sys, std::size_t n, const BigInt& level) {
  const BigInt& h = sys.height(n);
  const SpacerRule& rule = sys.spacers(n);
  const BigInt& p = sys.cut(n);
  BigInt c;
  if (rule.kind() == SpacerKind::none) {
    c = level / h + 1;
  } else if (rule.kind() == SpacerKind::staircase) {
    // Largest x = c - 1 with x h + x (x + 1) / 2 <= L, i.e. x^2 + (2h+1) x - 2L <= 0.
    BigInt b = 2 * h + 1;
    BigInt x = (isqrt(b * b + 8 * level) - b) / 2;
    if (sgn(x) < 0) x = 0;
    while (x > 0 && x * h + x * (x + 1) / 2 > level) --x;
    while (x + 1 < p && (x + 1) * h + (x + 1) * (x + 2) / 2 <= level) ++x;
    c = x + 1;
  } else {
    BigInt lo = 1, hi = p;
    while (lo < hi) {
      BigInt mid = (lo + hi + 1) / 2;
      if (column_start(sys, n, mid) <= level)
        lo = mid;
      else
        hi = mid - 1;
    }
    c = lo;
  }
  if (c < 1 || c > p) throw domain_error("level " + level.get_str() + " outside T_" + std::to_string(n + 1));
  return c;
}

}  // namespace detail

/// Moves the point one level up. Leaves the state untouched and throws
/// orbit_escape when the image lies beyond the top tower.
inline void advance(const RankOneSystem& sys, OrbitState& s) {
  const std::size_t m = sys.max_stage();
  std::size_t n = 1;
  bool block_done = false;
  if (s.in_spacer()) {
    const std::size_t k = s.spacer_stage;
    BigInt next = s.spacer_offset + 1;
    if (next < sys.spacers(k).at(s.column(k))) {
      s.spacer_offset = std::move(next);
      return;
    }
    n = k;
    block_done = true;
  }
  for (;;) {
    if (!block_done) {
      // The point sits on the top level of T_n, inside column c_n of T_{n+1}.
      if (n > m) throw orbit_escape("orbit leaves the top tower T_" + std::to_string(m + 1));
      if (detail::has_spacer(sys.spacers(n), s.column(n))) {
        for (std::size_t i = 1; i < n; ++i) s.columns[i - 1] = 0;
        s.spacer_stage = n;
        s.spacer_offset = 0;
        return;
      }
    }
    // Column c_n and its spacers are exhausted.
    if (s.column(n) < sys.cut(n)) {
      ++s.columns[n - 1];
      for (std::size_t i = 1; i < n; ++i) s.columns[i - 1] = 1;
      s.spacer_stage = 0;
      s.spacer_offset = 0;
      return;
    }
    ++n;
    block_done = false;
  }
}

inline OrbitState step(const RankOneSystem& sys, OrbitState s) {
  advance(sys, s);
  return s;
}

/// Level of the point in T_n, or nullopt when it lies in a spacer added at a
/// stage >= n (outside T_n).
inline std::optional<BigInt> level_in_tower(const RankOneSystem& sys, const OrbitState& s, std::size_t n) {
  if (n < 1 || n > sys.top_stage())
    throw domain_error("tower index " + std::to_string(n) + " outside [1, " + std::to_string(sys.top_stage()) + "]");
  const std::size_t k = s.spacer_stage;
  if (k >= n) return std::nullopt;
  BigInt level = 0;
  std::size_t i = 1;
  if (k > 0) {
    const BigInt& c = s.column(k);
    level = c * sys.height(k) + sys.spacers(k).prefix_sum(c - 1) + s.spacer_offset;
    i = k + 1;
  }
  for (; i < n; ++i) level += detail::column_start(sys, i, s.column(i));
  return level;
}

/// Levels of the point in every tower T_1..T_{M+1}.
inline std::vector<std::optional<BigInt>> levels_in_all_towers(const RankOneSystem& sys, const OrbitState& s) {
  std::vector<std::optional<BigInt>> out(sys.top_stage());
  const std::size_t k = s.spacer_stage;
  BigInt level = 0;
  std::size_t i = 1;
  if (k > 0) {
    const BigInt& c = s.column(k);
    level = c * sys.height(k) + sys.spacers(k).prefix_sum(c - 1) + s.spacer_offset;
    i = k + 1;
  }
  out[i - 1] = level;
  for (; i < sys.top_stage(); ++i) {
    level += detail::column_start(sys, i, s.column(i));
    out[i] = level;
  }
  return out;
}

/// 64-bit fast path of level_in_tower for n <= small_stage_limit().
/// Returns -1 for points outside T_n.
inline std::int64_t small_level(const RankOneSystem& sys, const OrbitState& s, std::size_t n) {
  const std::size_t k = s.spacer_stage;
  if (k >= n) return -1;
  std::uint64_t level = 0;
  std::size_t i = 1;
  auto prefix = [&](std::size_t stage, std::uint64_t c) -> std::uint64_t {
    const SpacerRule& rule = sys.spacers(stage);
    switch (rule.kind()) {
      case SpacerKind::none:
        return 0;
      case SpacerKind::staircase:
        return c * (c + 1) / 2;
      case SpacerKind::explicit_values:
        break;
    }
    return to_u64(rule.prefix_sum(big(c)));
  };
  if (k > 0) {
    std::uint64_t c = s.column(k).get_ui();
    level = c * sys.small_height(k) + prefix(k, c - 1) + s.spacer_offset.get_ui();
    i = k + 1;
  }
  for (; i < n; ++i) {
    std::uint64_t c = s.column(i).get_ui();
    level += (c - 1) * sys.small_height(i) + prefix(i, c - 1);
  }
  return static_cast<std::int64_t>(level);
}

/// Point of T_{M+1} whose T_n level is `level`, completed above stage n by
/// `upper` = c_n..c_M. Entries of `upper` are validated against the cuts.
inline OrbitState state_from_level(const RankOneSystem& sys, std::size_t n, const BigInt& level,
                                   const std::vector<BigInt>& upper) {
  const std::size_t m = sys.max_stage();
  if (n < 1 || n > m + 1) throw domain_error("tower index " + std::to_string(n) + " out of range");
  if (sgn(level) < 0 || level >= sys.height(n))
    throw domain_error("level " + level.get_str() + " outside T_" + std::to_string(n));
  if (upper.size() != m + 1 - n) throw domain_error("state_from_level: wrong number of upper columns");
  OrbitState s;
  s.columns.assign(m, BigInt(0));
  for (std::size_t i = n; i <= m; ++i) {
    const BigInt& c = upper[i - n];
    if (c < 1 || c > sys.cut(i)) throw domain_error("column " + c.get_str() + " outside [1, p_" + std::to_string(i) + "]");
    s.columns[i - 1] = c;
  }
  BigInt l = level;
  for (std::size_t i = n - 1; i >= 1; --i) {
    BigInt c = detail::find_column(sys, i, l);
    BigInt local = l - detail::column_start(sys, i, c);
    s.columns[i - 1] = c;
    if (local >= sys.height(i)) {
      s.spacer_stage = i;
      s.spacer_offset = local - sys.height(i);
      for (std::size_t j = 1; j < i; ++j) s.columns[j - 1] = 0;
      return s;
    }
    l = std::move(local);
  }
  return s;
}

inline OrbitState state_from_level(const RankOneSystem& sys, const BigInt& top_level) {
  return state_from_level(sys, sys.top_stage(), top_level, {});
}

/// Base-interval point with independent uniform columns c_n in [1, p_n].
inline PointAddress sample_address(const RankOneSystem& sys, Rng& rng) {
  PointAddress a;
  a.columns.reserve(sys.max_stage());
  for (std::size_t n = 1; n <= sys.max_stage(); ++n) a.columns.push_back(uniform_between(rng, 1, sys.cut(n)));
  return a;
}

/// Point of T_n drawn from normalized Lebesgue measure on T_n: a uniform
/// level of T_n and uniform columns above it.
inline OrbitState sample_state_in_tower(const RankOneSystem& sys, std::size_t n, Rng& rng) {
  BigInt level = uniform_below(rng, sys.height(n));
  std::vector<BigInt> upper;
  for (std::size_t i = n; i <= sys.max_stage(); ++i) upper.push_back(uniform_between(rng, 1, sys.cut(i)));
  return state_from_level(sys, n, level, upper);
}

/// Point drawn from normalized Lebesgue measure on the top tower T_{M+1}.
inline OrbitState sample_state(const RankOneSystem& sys, Rng& rng) {
  return sample_state_in_tower(sys, sys.top_stage(), rng);
}

inline OrbitState sample_point(const RankOneSystem& sys, std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  return sample_state(sys, rng);
}

/// Result of a horizontal distance query: 1/h_stage, or an upper bound
/// 1/h_{M+1} when the points share a level in every computed tower.
struct HorizontalDistance {
  std::size_t stage = 0;
  bool truncated = false;

  Rational value(const RankOneSystem& sys) const { return Rational(BigInt(1), sys.height(stage)); }
};

/// Both points must lie in one level of T_n. The distance is 1/h_m for the
/// largest m >= n such that they share a level of T_m.
inline HorizontalDistance horizontal_distance(const RankOneSystem& sys, const OrbitState& x, const OrbitState& y,
                                              std::size_t n) {
  auto lx = level_in_tower(sys, x, n);
  auto ly = level_in_tower(sys, y, n);
  if (!lx || !ly || *lx != *ly)
    throw domain_error("horizontal_distance: points are not in one level of T_" + std::to_string(n));
  for (std::size_t m = n; m <= sys.max_stage(); ++m)
    if (x.column(m) != y.column(m)) return {m, false};
  return {sys.top_stage(), true};
}

/// True when x and y lie in one level of T_n.
inline bool same_level(const RankOneSystem& sys, const OrbitState& x, const OrbitState& y, std::size_t n) {
  auto lx = level_in_tower(sys, x, n);
  if (!lx) return false;
  auto ly = level_in_tower(sys, y, n);
  return ly && *lx == *ly;
}

}  // namespace cutstack

#endif  // CUTSTACK_ORBIT_HPP
