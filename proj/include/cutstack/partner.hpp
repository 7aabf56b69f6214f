#ifndef CUTSTACK_PARTNER_HPP
#define CUTSTACK_PARTNER_HPP

// Staircase partner S of a rank-one T, with heights alternating against
// those of T, built window by window on cut products.

#include "alternation.hpp"
#include "exact.hpp"
#include "spec.hpp"
#include "tower.hpp"

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutstack {

class construction_failure : public std::runtime_error {
 public:
  construction_failure(std::size_t stage, BigInt lower, BigInt upper)
      : std::runtime_error("empty selection window at stage " + std::to_string(stage) + ": [" + lower.get_str() + ", " +
                           upper.get_str() + "]"),
        stage_(stage),
        lower_(std::move(lower)),
        upper_(std::move(upper)) {}

  std::size_t stage() const { return stage_; }
  const BigInt& lower() const { return lower_; }
  const BigInt& upper() const { return upper_; }

 private:
  std::size_t stage_;
  BigInt lower_, upper_;
};

struct PartnerParams {
  Rational gamma;
  Rational gamma_prime;
  std::size_t n_prime = 1;  // n'_T
  Rational eta{1, 128};

  void validate() const {
    ClassParams{gamma, gamma_prime, n_prime}.validate();
    if (!(gamma_prime < Rational(1, 3))) throw domain_error("partner construction needs gamma' < 1/3");
    if (!(sgn(eta) > 0 && eta < Rational(1, 100))) throw domain_error("eta must lie in (0, 1/100)");
    if (n_prime < 1) throw domain_error("n'_T must be at least 1");
  }

  /// 1 + (1/4 + eta) gamma
  Rational slow_exponent() const { return 1 + (Rational(1, 4) + eta) * gamma; }
  /// 1 + gamma / 4
  Rational fast_exponent() const { return 1 + gamma / 4; }
};

/// Window for the cut product p^S_1 ... p^S_{w+1}.
struct PartnerWindow {
  std::size_t w = 0;
  BigInt lower;    // ceil((K_T p^T_1...p^T_{w+1})^{1+gamma/4})
  BigInt upper;    // floor((p^T_1...p^T_{w+2})^{1/(1+(1/4+eta)gamma)})
  BigInt prefix;   // p^S_1 ... p^S_w
  BigInt chosen;   // p^S_{w+1}
  bool left_inequality = false;  // (p^S_1..p^S_w)^{1+(1/4+eta)gamma} < p^T_1..p^T_{w+1}
  bool length_bound = false;     // upper - lower >= 4 p^S_1..p^S_w

  std::size_t stage() const { return w + 1; }
  bool contains_choice() const {
    BigInt prod = prefix * chosen;
    return chosen >= 2 && lower <= prod && prod <= upper;
  }
};

struct PartnerTrace {
  std::string source_label;
  std::string partner_label;
  PartnerParams params;
  Rational k_t;
  std::vector<PartnerWindow> windows;
};

struct PartnerResult {
  RankOneSpec spec;
  PartnerTrace trace;
};

/// S has max stage M_T - 1: stage w + 1 uses cut products of T up to w + 2.
inline PartnerResult construct_partner(const RankOneSpec& spec_t, const PartnerParams& params) {
  params.validate();
  const TowerStats st = compute_stats(spec_t);
  ClassReport cls = classify(spec_t, st, ClassParams{params.gamma, params.gamma_prime, params.n_prime});
  if (!cls.verdict)
    throw domain_error("T is not in the class from stage " + std::to_string(params.n_prime) + " (first failure at stage " +
                       std::to_string(*cls.first_failure) + ")");
  const std::size_t mt = spec_t.max_stage();
  if (mt < 2) throw domain_error("T needs at least two stages");
  const std::size_t ms = mt - 1;

  PartnerResult out;
  out.spec.label = spec_t.label + "-partner";
  out.trace.source_label = spec_t.label;
  out.trace.partner_label = out.spec.label;
  out.trace.params = params;
  out.trace.k_t = st.k_bound;

  const Rational slow = params.slow_exponent();
  const Rational fast = params.fast_exponent();
  const Rational inv_slow = 1 / slow;
  BigInt prefix = 1;
  for (std::size_t n = 1; n <= std::min(params.n_prime + 1, ms); ++n) {
    out.spec.stages.push_back({BigInt(2), SpacerRule::none()});
    prefix *= 2;
  }
  for (std::size_t w = params.n_prime + 1; w + 1 <= ms; ++w) {
    PartnerWindow win;
    win.w = w;
    win.prefix = prefix;
    win.lower = ceil_pow(st.k_bound * Rational(st.cut_product(w + 1)), fast);
    win.upper = floor_pow(Rational(st.cut_product(w + 2)), inv_slow);
    win.left_inequality = compare_pow(Rational(prefix), slow, Rational(st.cut_product(w + 1))) < 0;
    win.length_bound = win.upper - win.lower >= 4 * prefix;
    BigInt p = ceil_div(win.lower, prefix);
    if (p < 2) p = 2;
    if (prefix * p > win.upper) throw construction_failure(w + 1, win.lower, win.upper);
    win.chosen = p;
    out.spec.stages.push_back({p, SpacerRule::staircase()});
    prefix *= p;
    out.trace.windows.push_back(std::move(win));
  }
  out.spec.validate();
  return out;
}

inline std::string serialize_trace(const PartnerTrace& t) {
  std::ostringstream os;
  os << "cutstack-partner-trace v1\n";
  os << "source: " << t.source_label << '\n';
  os << "partner: " << t.partner_label << '\n';
  os << "gamma: " << to_fraction_string(t.params.gamma) << '\n';
  os << "gamma_prime: " << to_fraction_string(t.params.gamma_prime) << '\n';
  os << "eta: " << to_fraction_string(t.params.eta) << '\n';
  os << "n_prime: " << t.params.n_prime << '\n';
  os << "k_t: " << to_fraction_string(t.k_t) << '\n';
  os << "windows: " << t.windows.size() << '\n';
  for (const auto& w : t.windows) {
    os << "window " << w.stage() << ": lower " << w.lower.get_str() << " upper " << w.upper.get_str() << " prefix "
       << w.prefix.get_str() << " chosen " << w.chosen.get_str() << " left_inequality "
       << (w.left_inequality ? "true" : "false") << " length_bound " << (w.length_bound ? "true" : "false") << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------ verification

struct VerifyOptions {
  /// First stage checked for windows and class membership; 0 means n'_T + 3.
  std::size_t threshold = 0;
  /// First index checked for alternation in each direction; 0 means threshold.
  std::size_t alternation_start = 0;
};

struct PartnerStageCheck {
  std::size_t stage = 0;
  bool p_window = false;  // p^S_n in [h_n^{gamma/3}, h_n^{3 gamma'}]
  StageMembership membership;
};

struct PartnerVerification {
  std::size_t threshold = 0;
  std::size_t alternation_start = 0;
  bool staircase_form = true;
  std::optional<std::size_t> staircase_failure;
  std::vector<PartnerStageCheck> stages;
  bool p_window_ok = true;
  ClassReport class_s;
  ClassReport class_t;
  MutualAlternation alternation;
  bool alternation_ok = false;
  bool in_l = false;

  bool ok() const { return staircase_form && p_window_ok && class_s.verdict && alternation_ok && in_l; }
};

inline PartnerVerification verify_partner(const RankOneSpec& spec_t, const RankOneSpec& spec_s,
                                          const PartnerParams& params, VerifyOptions opt = {}) {
  ClassParams{params.gamma, params.gamma_prime, params.n_prime}.validate();
  const TowerStats st = compute_stats(spec_t);
  const TowerStats ss = compute_stats(spec_s);
  PartnerVerification v;
  v.threshold = opt.threshold ? opt.threshold : params.n_prime + 3;
  v.alternation_start = opt.alternation_start ? opt.alternation_start : v.threshold;
  const Rational lo = params.gamma / 3;
  const Rational hi = 3 * params.gamma_prime;

  for (std::size_t n = v.threshold; n <= spec_s.max_stage(); ++n)
    if (spec_s.spacers(n).kind() != SpacerKind::staircase) {
      v.staircase_form = false;
      if (!v.staircase_failure) v.staircase_failure = n;
    }

  for (std::size_t n = v.threshold; n <= spec_s.max_stage(); ++n) {
    PartnerStageCheck c;
    c.stage = n;
    Rational h(ss.height(n)), p(spec_s.cut(n));
    c.p_window = compare_pow(h, lo, p) <= 0 && compare_pow(h, hi, p) >= 0;
    c.membership = stage_membership(spec_s.stages[n - 1], ss.height(n), lo, hi, n);
    v.p_window_ok = v.p_window_ok && c.p_window;
    v.stages.push_back(c);
  }
  // The class check needs gamma' < 1, which 3 gamma' < 1 guarantees.
  v.class_s = classify(spec_s, ss, ClassParams{lo, hi, v.threshold});
  v.class_t = classify(spec_t, st, ClassParams{lo, hi, params.n_prime});
  v.alternation = check_mutual_alternation(st.heights, ss.heights, params.gamma / 4, v.alternation_start,
                                           v.alternation_start);
  v.alternation_ok = v.alternation.verdict();
  v.in_l = v.class_s.verdict && v.class_t.verdict && v.alternation_ok;
  return v;
}

// -------------------------------------------------------- inequality chain

struct ChainEntry {
  std::size_t n = 0;
  bool holds = false;
};

struct ChainReport {
  std::size_t from = 0;
  /// (p^S_1..p^S_{n-2})^{1+(1/4+eta)gamma} < p^T_1..p^T_{n-1}
  std::vector<ChainEntry> left;
  /// (K_T p^T_1..p^T_{n-1})^{1+gamma/4} < p^S_1..p^S_{n-1}
  std::vector<ChainEntry> right;
  /// h^T_{n+2} <= (h^T_n)^{1+3 gamma'}, checked for every n >= 1
  std::vector<ChainEntry> height_bound;
  std::size_t height_bound_tail = 1;

  static bool all(const std::vector<ChainEntry>& v) {
    for (const auto& e : v)
      if (!e.holds) return false;
    return true;
  }
  bool ok() const { return all(left) && all(right); }
};

inline ChainReport intermediate_chain_check(const RankOneSpec& spec_t, const RankOneSpec& spec_s,
                                            const PartnerParams& params, std::size_t from = 0) {
  const TowerStats st = compute_stats(spec_t);
  const TowerStats ss = compute_stats(spec_s);
  ChainReport r;
  r.from = from ? from : params.n_prime + 3;
  const Rational slow = params.slow_exponent();
  const Rational fast = params.fast_exponent();
  for (std::size_t n = r.from; n - 1 <= spec_t.max_stage() && n - 2 <= spec_s.max_stage(); ++n)
    r.left.push_back({n, compare_pow(Rational(ss.cut_product(n - 2)), slow, Rational(st.cut_product(n - 1))) < 0});
  for (std::size_t n = r.from; n - 1 <= spec_t.max_stage() && n - 1 <= spec_s.max_stage(); ++n)
    r.right.push_back(
        {n, compare_pow(st.k_bound * Rational(st.cut_product(n - 1)), fast, Rational(ss.cut_product(n - 1))) < 0});
  const Rational e = 1 + 3 * params.gamma_prime;
  for (std::size_t n = 1; n + 2 <= st.top_stage(); ++n) {
    bool ok = compare_pow(Rational(st.height(n)), e, Rational(st.height(n + 2))) >= 0;
    r.height_bound.push_back({n, ok});
    if (!ok) r.height_bound_tail = n + 1;
  }
  return r;
}

}  // namespace cutstack

#endif  // CUTSTACK_PARTNER_HPP
