#ifndef CUTSTACK_TOWER_HPP
#define CUTSTACK_TOWER_HPP

#include "exact.hpp"
#include "spec.hpp"

#include <optional>
#include <vector>

namespace cutstack {

/// Exact height data of a truncated rank-one construction.
struct TowerStats {
  std::vector<BigInt> heights;        // heights[n-1] = h_n, n = 1 .. M+1
  std::vector<BigInt> cut_products;   // cut_products[n] = p_1 ... p_n, n = 0 .. M
  std::vector<Rational> eps;          // eps[n-1] = (sum_i a_{n,i}) / (p_1 ... p_n)
  Rational k_bound{1};                // product of (1 + eps_n)
  Rational spacer_mass{0};            // sum of eps_n

  const BigInt& height(std::size_t n) const { return heights.at(n - 1); }
  const BigInt& cut_product(std::size_t n) const { return cut_products.at(n); }
  std::size_t top_stage() const { return heights.size(); }
};

inline TowerStats compute_stats(const RankOneSpec& spec) {
  spec.validate();
  TowerStats s;
  const std::size_t m = spec.max_stage();
  s.heights.reserve(m + 1);
  s.cut_products.reserve(m + 1);
  s.heights.emplace_back(1);
  s.cut_products.emplace_back(1);
  for (std::size_t n = 1; n <= m; ++n) {
    const Stage& st = spec.stages[n - 1];
    BigInt total = st.spacers.prefix_sum(st.cut);
    s.heights.push_back(st.cut * s.heights.back() + total);
    s.cut_products.push_back(s.cut_products.back() * st.cut);
    Rational e(total, s.cut_products.back());
    e.canonicalize();
    s.eps.push_back(e);
    s.k_bound *= 1 + e;
    s.spacer_mass += e;
  }
  return s;
}

/// Parameters of the class C_{gamma, gamma'}: cuts in [h^gamma, h^gamma'),
/// strictly increasing spacers bounded by h^gamma', from stage n_start on.
struct ClassParams {
  Rational gamma;
  Rational gamma_prime;
  std::size_t n_start = 1;

  void validate() const {
    if (!(sgn(gamma) > 0 && gamma < gamma_prime && gamma_prime < 1))
      throw domain_error("class parameters need 0 < gamma < gamma' < 1, got " + to_fraction_string(gamma) + ", " +
                         to_fraction_string(gamma_prime));
  }
};

struct StageMembership {
  std::size_t stage = 0;
  bool cut_in_window = false;
  bool spacers_increasing = false;
  bool top_spacer_bounded = false;

  bool ok() const { return cut_in_window && spacers_increasing && top_spacer_bounded; }
};

struct ClassReport {
  std::vector<StageMembership> stages;
  bool verdict = true;
  std::optional<std::size_t> first_failure;
  /// Smallest n0 such that every checked stage >= n0 passes.
  std::size_t tail_start = 0;
};

inline bool spacers_strictly_increasing(const Stage& st) {
  switch (st.spacers.kind()) {
    case SpacerKind::none:
      return st.cut < 2;
    case SpacerKind::staircase:
      return true;
    case SpacerKind::explicit_values:
      break;
  }
  const auto& v = st.spacers.values();
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

inline StageMembership stage_membership(const Stage& st, const BigInt& height, const Rational& gamma,
                                        const Rational& gamma_prime, std::size_t n) {
  StageMembership m;
  m.stage = n;
  Rational h(height), p(st.cut);
  m.cut_in_window = compare_pow(h, gamma, p) <= 0 && compare_pow(h, gamma_prime, p) > 0;
  m.spacers_increasing = spacers_strictly_increasing(st);
  BigInt top = st.spacers.at(st.cut);
  m.top_spacer_bounded = sgn(top) == 0 || compare_pow(h, gamma_prime, Rational(top)) >= 0;
  return m;
}

/// Stage-by-stage membership in C_{gamma, gamma'} over [n_start, M].
/// Power inequalities are decided as integer powers, p^v >= h^u for gamma = u/v.
inline ClassReport classify(const RankOneSpec& spec, const TowerStats& stats, const ClassParams& params) {
  params.validate();
  ClassReport r;
  const std::size_t m = spec.max_stage();
  r.tail_start = std::max<std::size_t>(params.n_start, 1);
  for (std::size_t n = std::max<std::size_t>(params.n_start, 1); n <= m; ++n) {
    auto sm = stage_membership(spec.stages[n - 1], stats.height(n), params.gamma, params.gamma_prime, n);
    r.stages.push_back(sm);
    if (!sm.ok()) {
      r.verdict = false;
      if (!r.first_failure) r.first_failure = n;
      r.tail_start = n + 1;
    }
  }
  return r;
}

inline ClassReport classify(const RankOneSpec& spec, const ClassParams& params) {
  return classify(spec, compute_stats(spec), params);
}

}  // namespace cutstack

#endif  // CUTSTACK_TOWER_HPP
