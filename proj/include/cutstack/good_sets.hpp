#ifndef CUTSTACK_GOOD_SETS_HPP
#define CUTSTACK_GOOD_SETS_HPP

// Tower-interior sets F_n, level-separated sets D^{x,n}, the distance-scale
// partition A_theta^k of a matching, and a sampling probe of the separation
// inequalities at a given stage.

#include "fbar.hpp"
#include "orbit.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cutstack {

struct GoodSetParams {
  Rational gamma;            // column margin h_n^{gamma/4}
  Rational gamma_prime{1, 2};
  std::size_t n1 = 1;        // F = intersection of F_n over n1 <= n <= M
  std::size_t n3 = 1;        // D = intersection of D_n over n3 <= n <= M

  void validate() const {
    if (!(gamma > 0 && gamma < 1)) throw domain_error("gamma must lie in (0, 1)");
    if (!(gamma_prime > 0 && gamma_prime < 1)) throw domain_error("gamma_prime must lie in (0, 1)");
    if (n1 < 1 || n3 < 1) throw domain_error("good-set thresholds start at 1");
  }
};

/// Per-stage margins of one system, computed once.
class GoodSets {
 public:
  GoodSets(const RankOneSystem& sys, const GoodSetParams& params) : sys_(&sys), params_(params) {
    params.validate();
    const Rational e = params.gamma / 4;
    for (std::size_t n = 1; n <= sys.top_stage(); ++n) {
      const BigInt& h = sys.height(n);
      Stage st;
      st.margin = h / (big(n) * big(n));
      if (n <= sys.max_stage()) {
        st.col_lo = ceil_pow(Rational(h), e);
        st.col_hi = sys.cut(n) - st.col_lo;
      }
      stages_.push_back(st);
    }
  }

  const RankOneSystem& system() const { return *sys_; }
  const GoodSetParams& params() const { return params_; }
  const BigInt& margin(std::size_t n) const { return stages_.at(n - 1).margin; }
  const BigInt& column_low(std::size_t n) const { return stages_.at(n - 1).col_lo; }
  const BigInt& column_high(std::size_t n) const { return stages_.at(n - 1).col_hi; }

  /// The F_n window is empty when the column range or the level range is.
  bool stage_empty(std::size_t n) const {
    check_f_stage(n);
    const auto& st = stages_[n - 1];
    return st.col_lo > st.col_hi || 2 * st.margin > sys_->height(n);
  }

  bool in_F(const OrbitState& x, std::size_t n) const {
    check_f_stage(n);
    auto level = level_in_tower(*sys_, x, n);
    return level && f_holds(*level, x.column(n), n);
  }

  /// x in F_n for every n in [from, to]; to = 0 means M.
  bool in_F_all(const OrbitState& x, std::size_t from, std::size_t to = 0) const {
    if (to == 0) to = sys_->max_stage();
    if (from > to) return true;
    check_f_stage(from);
    check_f_stage(to);
    auto levels = levels_in_all_towers(*sys_, x);
    for (std::size_t n = from; n <= to; ++n)
      if (!levels[n - 1] || !f_holds(*levels[n - 1], x.column(n), n)) return false;
    return true;
  }
  bool in_F_all(const OrbitState& x) const { return in_F_all(x, params_.n1); }

  /// Entry n-1 is x in F_n, for n = 1..M; levels are computed once.
  std::vector<bool> F_profile(const OrbitState& x) const {
    auto levels = levels_in_all_towers(*sys_, x);
    std::vector<bool> out(sys_->max_stage());
    for (std::size_t n = 1; n <= sys_->max_stage(); ++n)
      out[n - 1] = levels[n - 1] && f_holds(*levels[n - 1], x.column(n), n);
    return out;
  }

  /// x' in T_n and |l_n(x') - l_n(x)| > floor(h_n / n^2). False when x is
  /// outside T_n, where the set is undefined.
  bool in_D(const OrbitState& x, const OrbitState& xp, std::size_t n) const {
    check_d_stage(n);
    auto lx = level_in_tower(*sys_, x, n);
    auto lp = level_in_tower(*sys_, xp, n);
    return lx && lp && d_holds(*lx, *lp, n);
  }

  bool in_D_all(const OrbitState& x, const OrbitState& xp, std::size_t from, std::size_t to = 0) const {
    if (to == 0) to = sys_->max_stage();
    if (from > to) return true;
    check_d_stage(from);
    check_d_stage(to);
    auto lx = levels_in_all_towers(*sys_, x);
    auto lp = levels_in_all_towers(*sys_, xp);
    for (std::size_t n = from; n <= to; ++n)
      if (!lx[n - 1] || !lp[n - 1] || !d_holds(*lx[n - 1], *lp[n - 1], n)) return false;
    return true;
  }
  bool in_D_all(const OrbitState& x, const OrbitState& xp) const { return in_D_all(x, xp, params_.n3); }

 private:
  struct Stage {
    BigInt margin;
    BigInt col_lo;
    BigInt col_hi;
  };

  void check_f_stage(std::size_t n) const {
    if (n < 1 || n > sys_->max_stage())
      throw domain_error("F_n needs 1 <= n <= " + std::to_string(sys_->max_stage()) + ", got " + std::to_string(n));
  }
  void check_d_stage(std::size_t n) const {
    if (n < 1 || n > sys_->top_stage())
      throw domain_error("D_n needs 1 <= n <= " + std::to_string(sys_->top_stage()) + ", got " + std::to_string(n));
  }
  bool f_holds(const BigInt& level, const BigInt& column, std::size_t n) const {
    const auto& st = stages_[n - 1];
    return level >= st.margin && level <= sys_->height(n) - st.margin && column >= st.col_lo && column <= st.col_hi;
  }
  bool d_holds(const BigInt& lx, const BigInt& lp, std::size_t n) const {
    BigInt d = lp - lx;
    return abs(d) > stages_[n - 1].margin;
  }

  const RankOneSystem* sys_;
  GoodSetParams params_;
  std::vector<Stage> stages_;
};

inline bool in_F(const RankOneSystem& sys, const OrbitState& x, std::size_t n, const GoodSetParams& p) {
  return GoodSets(sys, p).in_F(x, n);
}
inline bool in_D(const RankOneSystem& sys, const OrbitState& x, const OrbitState& xp, std::size_t n) {
  return GoodSets(sys, GoodSetParams{Rational(1, 2)}).in_D(x, xp, n);
}

struct MeasureEstimate {
  std::size_t stage = 0;
  std::size_t samples = 0;
  std::size_t hits = 0;
  double mean() const { return samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0; }
  /// Binomial standard error of mean().
  double sigma() const {
    if (!samples) return 0.0;
    const double p = mean();
    return std::sqrt(p * (1 - p) / static_cast<double>(samples));
  }
};

/// Monte Carlo mu(F_n) for every n = 1..M, points uniform on the top tower.
inline std::vector<MeasureEstimate> estimate_F_measures(const GoodSets& g, std::size_t samples, Rng& rng) {
  const std::size_t m = g.system().max_stage();
  std::vector<MeasureEstimate> est(m);
  for (std::size_t n = 1; n <= m; ++n) est[n - 1].stage = n;
  for (std::size_t t = 0; t < samples; ++t) {
    auto prof = g.F_profile(sample_state(g.system(), rng));
    for (std::size_t n = 0; n < m; ++n) {
      ++est[n].samples;
      est[n].hits += prof[n];
    }
  }
  return est;
}

/// States x, Gx, ..., G^{len-1}x; throws orbit_escape past the top tower.
inline std::vector<OrbitState> orbit_states(const RankOneSystem& sys, OrbitState x, std::size_t len) {
  std::vector<OrbitState> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (i > 0) advance(sys, x);
    out.push_back(x);
  }
  return out;
}

/// Orbit of a point of the product system, one state per time for each factor.
struct ProductOrbit {
  std::vector<OrbitState> t;
  std::vector<OrbitState> s;
  std::size_t size() const { return t.size(); }
};

inline ProductOrbit product_orbit(const RankOneSystem& sys_t, const RankOneSystem& sys_s, const OrbitState& x,
                                  const OrbitState& y, std::size_t len) {
  return {orbit_states(sys_t, x, len), orbit_states(sys_s, y, len)};
}

/// Membership in (F^T cap T^T_{n0}) x (F^S cap T^S_{n0}).
inline bool in_good_product(const GoodSets& ft, const GoodSets& fs, const OrbitState& x, const OrbitState& y,
                            std::size_t n0) {
  return level_in_tower(ft.system(), x, n0) && level_in_tower(fs.system(), y, n0) && ft.in_F_all(x) &&
         fs.in_F_all(y);
}

/// Number of times i < len whose product iterate lies in the good product set.
inline std::size_t good_hits(const GoodSets& ft, const GoodSets& fs, const ProductOrbit& orb, std::size_t n0) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < orb.size(); ++i) hits += in_good_product(ft, fs, orb.t[i], orb.s[i], n0);
  return hits;
}

/// Scale index k with 2^k < H <= 2^{k+1}, H >= 2.
inline std::size_t dyadic_scale(const BigInt& h) {
  if (h < 2) throw domain_error("dyadic scale needs H >= 2");
  return bit_length(h - 1) - 1;
}

struct AThetaResult {
  std::size_t n0 = 0;
  std::map<std::size_t, std::vector<std::size_t>> sets;  // k -> indices s (1-based)
  std::vector<std::size_t> good;                         // H: every iterate in the good product set
  std::vector<std::size_t> undecidable;                  // in H, scale hidden by truncation
  std::vector<std::size_t> level_mismatch;               // in H, pair not in one level of T_{n0}

  std::size_t size(std::size_t k) const {
    auto it = sets.find(k);
    return it == sets.end() ? 0 : it->second.size();
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [k, v] : sets) t += v.size();
    return t;
  }
};

namespace detail {

/// H-value of one factor: exact height, or a lower bound under truncation.
struct ScaleBound {
  BigInt h;
  bool exact;
};

inline ScaleBound factor_scale(const RankOneSystem& sys, const OrbitState& a, const OrbitState& b, std::size_t n0) {
  auto d = horizontal_distance(sys, a, b, n0);
  return {sys.height(d.stage), !d.truncated};
}

}  // namespace detail

/// Partition of the matched indices by the dyadic scale of the larger of the
/// two horizontal distances. Orbits must cover every index of theta.
inline AThetaResult a_theta_partition(const GoodSets& ft, const GoodSets& fs, const ProductOrbit& first,
                                      const ProductOrbit& second, const Matching& theta, std::size_t n0) {
  if (n0 < 3) throw domain_error("partition stage n0 must be >= 3");
  if (n0 > ft.system().top_stage() || n0 > fs.system().top_stage()) throw domain_error("n0 beyond the computed towers");
  AThetaResult out;
  out.n0 = n0;
  for (std::size_t s = 1; s <= theta.size(); ++s) {
    auto [i, j] = theta.pairs[s - 1];
    if (i >= first.size() || j >= second.size()) throw domain_error("matching index beyond the orbit");
    const OrbitState &x = first.t[i], &y = first.s[i], &xp = second.t[j], &yp = second.s[j];
    if (!in_good_product(ft, fs, x, y, n0) || !in_good_product(ft, fs, xp, yp, n0)) continue;
    out.good.push_back(s);
    if (!same_level(ft.system(), x, xp, n0) || !same_level(fs.system(), y, yp, n0)) {
      out.level_mismatch.push_back(s);
      continue;
    }
    auto a = detail::factor_scale(ft.system(), x, xp, n0);
    auto b = detail::factor_scale(fs.system(), y, yp, n0);
    // The larger distance has the smaller height. A truncated factor only
    // bounds its height from below.
    std::optional<BigInt> h;
    if (a.exact && b.exact) h = std::min(a.h, b.h);
    else if (a.exact && a.h <= b.h) h = a.h;
    else if (b.exact && b.h <= a.h) h = b.h;
    if (!h) {
      out.undecidable.push_back(s);
      continue;
    }
    out.sets[dyadic_scale(*h)].push_back(s);
  }
  return out;
}

inline std::vector<std::size_t> a_theta_k(const GoodSets& ft, const GoodSets& fs, const ProductOrbit& first,
                                          const ProductOrbit& second, const Matching& theta, std::size_t k,
                                          std::size_t n0) {
  auto res = a_theta_partition(ft, fs, first, second, theta, n0);
  auto it = res.sets.find(k);
  return it == res.sets.end() ? std::vector<std::size_t>{} : it->second;
}

// ------------------------------------------------------- separation probe

struct ProbeWitness {
  BigInt x_level;   // top-tower levels; state_from_level replays the points
  BigInt xp_level;
  BigInt i;
  BigInt j;
};

struct LemmaProbe {
  std::string name;
  bool at_scale = false;  // the stage satisfies the finite-scale condition of the statement
  std::size_t pairs = 0;
  std::size_t checks = 0;
  std::size_t escaped = 0;      // iterates past the top tower, skipped
  std::size_t violation_count = 0;
  std::vector<ProbeWitness> violations;  // capped
  bool inconclusive() const { return pairs == 0; }
};

struct ProbeReport {
  std::size_t n = 0;
  Rational xi;
  std::vector<LemmaProbe> lemmas;
};

namespace detail {

inline BigInt top_level(const RankOneSystem& sys, const OrbitState& s) { return *level_in_tower(sys, s, sys.top_stage()); }

inline std::optional<OrbitState> jump(const RankOneSystem& sys, const BigInt& top, const BigInt& steps) {
  BigInt l = top + steps;
  if (l >= sys.height(sys.top_stage())) return std::nullopt;
  return state_from_level(sys, l);
}

/// A point of F, and of T_stage when stage > 0.
inline std::optional<OrbitState> sample_in_F(const GoodSets& g, Rng& rng, std::size_t attempts, std::size_t stage = 0) {
  for (std::size_t a = 0; a < attempts; ++a) {
    auto x = sample_state(g.system(), rng);
    if (g.in_F_all(x) && (stage == 0 || level_in_tower(g.system(), x, stage))) return x;
  }
  return std::nullopt;
}

inline void record(LemmaProbe& p, const BigInt& xl, const BigInt& xpl, const BigInt& i, const BigInt& j) {
  ++p.violation_count;
  if (p.violations.size() < 32) p.violations.push_back({xl, xpl, i, j});
}

/// Pairs (i, j) in [0, L]^2: all of them when (L+1)^2 <= budget, else a sample.
template <class F>
void for_index_pairs(const BigInt& L, std::size_t budget, Rng& rng, F&& f) {
  const BigInt count = (L + 1) * (L + 1);
  if (count <= big(budget)) {
    for (BigInt i = 0; i <= L; ++i)
      for (BigInt j = 0; j <= L; ++j) f(i, j);
  } else {
    for (std::size_t t = 0; t < budget; ++t) f(uniform_below(rng, BigInt(L + 1)), uniform_below(rng, BigInt(L + 1)));
  }
}

}  // namespace detail

/// Samples admissible pairs at stage n and checks, for each, the three
/// separation inequalities on iterates:
///   short-block: d(x,x') = 1/h_n, r in [h_n, h_n^{1+2 xi}], both iterates in F
///                => iterates not in one level of T_n
///   uniform:     x, x' in one level of T_n, i != j <= h_n/n^3
///                => G^i x, G^j x' not in one level of T_n
///   separated:   x' in D_x, i, j <= h_{n+1}/(n+1)^2, G^i x in T_n
///                => G^i x, G^j x' not in one level of T_{n+1}
/// `pair_budget` caps the sampled pairs per inequality, `check_budget` the
/// index checks per pair.
inline ProbeReport lemma_separation_probe(const GoodSets& g, std::size_t n, const Rational& xi, std::size_t pair_budget,
                                          std::size_t check_budget, Rng& rng) {
  const RankOneSystem& sys = g.system();
  if (n < 2 || n + 1 > sys.max_stage()) throw domain_error("probe stage must satisfy 2 <= n < M");
  if (!(xi > 0)) throw domain_error("xi must be positive");
  const auto& gp = g.params();
  ProbeReport rep;
  rep.n = n;
  rep.xi = xi;
  const BigInt& hn = sys.height(n);
  const std::size_t attempts = 50 * pair_budget + 100;

  // short-block
  {
    LemmaProbe p;
    p.name = "short-block";
    p.at_scale = n >= gp.n1 &&
                 compare_pow(Rational(hn), gp.gamma_prime + 2 * xi, Rational(hn, big(n) * big(n))) < 0;
    const BigInt r_hi = floor_pow(Rational(hn), 1 + 2 * xi);
    for (std::size_t t = 0; t < pair_budget; ++t) {
      auto x = detail::sample_in_F(g, rng, attempts, n);
      if (!x || sys.cut(n) < 2) break;
      std::vector<BigInt> upper(x->columns.begin() + static_cast<long>(n - 1), x->columns.end());
      BigInt c = uniform_between(rng, 1, sys.cut(n) - 1);
      if (c >= upper[0]) c += 1;
      upper[0] = c;
      OrbitState xp = state_from_level(sys, n, *level_in_tower(sys, *x, n), upper);
      if (!g.in_F_all(xp)) continue;
      ++p.pairs;
      const BigInt tx = detail::top_level(sys, *x), txp = detail::top_level(sys, xp);
      const BigInt span = r_hi - hn + 1;
      const bool all = span <= big(check_budget);
      const std::size_t count = all ? to_u64(span) : check_budget;
      for (std::size_t u = 0; u < count; ++u) {
        BigInt r = all ? BigInt(hn + big(u)) : BigInt(hn + uniform_below(rng, span));
        auto a = detail::jump(sys, tx, r), b = detail::jump(sys, txp, r);
        if (!a || !b) {
          ++p.escaped;
          continue;
        }
        if (!g.in_F_all(*a) || !g.in_F_all(*b)) continue;
        ++p.checks;
        if (same_level(sys, *a, *b, n)) detail::record(p, tx, txp, r, r);
      }
    }
    rep.lemmas.push_back(std::move(p));
  }

  // uniform
  {
    LemmaProbe p;
    p.name = "uniform";
    p.at_scale = n >= gp.n1;
    const BigInt L = hn / (big(n) * big(n) * big(n));
    for (std::size_t t = 0; t < pair_budget; ++t) {
      auto x = detail::sample_in_F(g, rng, attempts, n);
      if (!x) break;
      std::vector<BigInt> upper;
      for (std::size_t i = n; i <= sys.max_stage(); ++i) upper.push_back(uniform_between(rng, 1, sys.cut(i)));
      OrbitState xp = state_from_level(sys, n, *level_in_tower(sys, *x, n), upper);
      if (!g.in_F_all(xp)) continue;
      ++p.pairs;
      const BigInt tx = detail::top_level(sys, *x), txp = detail::top_level(sys, xp);
      detail::for_index_pairs(L, check_budget, rng, [&](const BigInt& i, const BigInt& j) {
        if (i == j) return;
        auto a = detail::jump(sys, tx, i), b = detail::jump(sys, txp, j);
        if (!a || !b) {
          ++p.escaped;
          return;
        }
        ++p.checks;
        if (same_level(sys, *a, *b, n)) detail::record(p, tx, txp, i, j);
      });
    }
    rep.lemmas.push_back(std::move(p));
  }

  // separated
  {
    LemmaProbe p;
    p.name = "separated";
    p.at_scale = n >= 2 * std::max(gp.n1, gp.n3);
    const BigInt L = sys.height(n + 1) / (big(n + 1) * big(n + 1));
    for (std::size_t t = 0; t < pair_budget; ++t) {
      auto x = detail::sample_in_F(g, rng, attempts);
      if (!x) break;
      std::optional<OrbitState> xp;
      for (std::size_t a = 0; a < attempts && !xp; ++a) {
        auto cand = sample_state(sys, rng);
        if (g.in_D_all(*x, cand)) xp = cand;
      }
      if (!xp) continue;
      ++p.pairs;
      const BigInt tx = detail::top_level(sys, *x), txp = detail::top_level(sys, *xp);
      detail::for_index_pairs(L, check_budget, rng, [&](const BigInt& i, const BigInt& j) {
        auto a = detail::jump(sys, tx, i), b = detail::jump(sys, txp, j);
        if (!a || !b) {
          ++p.escaped;
          return;
        }
        if (!level_in_tower(sys, *a, n)) return;
        ++p.checks;
        if (same_level(sys, *a, *b, n + 1)) detail::record(p, tx, txp, i, j);
      });
    }
    rep.lemmas.push_back(std::move(p));
  }
  return rep;
}

}  // namespace cutstack

#endif  // CUTSTACK_GOOD_SETS_HPP
