#ifndef CUTSTACK_SPEC_HPP
#define CUTSTACK_SPEC_HPP

#include "exact.hpp"
#include "rng.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cutstack {

/// Raised for structurally invalid rank-one data or unreadable spec files.
class malformed_spec : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SpacerKind { none, staircase, explicit_values };

/// Spacer heights a_{n,1..p_n} of one stage. `none` and `staircase` are
/// symbolic so that stages with astronomically many columns stay cheap.
class SpacerRule {
 public:
  static SpacerRule none() { return SpacerRule(SpacerKind::none, {}); }
  static SpacerRule staircase() { return SpacerRule(SpacerKind::staircase, {}); }
  static SpacerRule explicit_values(std::vector<BigInt> values) {
    return SpacerRule(SpacerKind::explicit_values, std::move(values));
  }

  SpacerKind kind() const { return kind_; }
  const std::vector<BigInt>& values() const { return values_; }

  /// a_{n,i} for 1 <= i <= p_n.
  BigInt at(const BigInt& i) const {
    switch (kind_) {
      case SpacerKind::none:
        return 0;
      case SpacerKind::staircase:
        return i;
      case SpacerKind::explicit_values:
        break;
    }
    return values_.at(to_u64(i) - 1);
  }

  /// Sum of a_{n,i} over 1 <= i <= c (0 for c = 0).
  BigInt prefix_sum(const BigInt& c) const {
    switch (kind_) {
      case SpacerKind::none:
        return 0;
      case SpacerKind::staircase:
        return c * (c + 1) / 2;
      case SpacerKind::explicit_values:
        break;
    }
    return prefix_.at(to_u64(c));
  }

  friend bool operator==(const SpacerRule& a, const SpacerRule& b) {
    return a.kind_ == b.kind_ && a.values_ == b.values_;
  }

 private:
  SpacerRule(SpacerKind kind, std::vector<BigInt> values) : kind_(kind), values_(std::move(values)) {
    prefix_.reserve(values_.size() + 1);
    prefix_.emplace_back(0);
    for (const auto& v : values_) prefix_.push_back(prefix_.back() + v);
  }

  SpacerKind kind_;
  std::vector<BigInt> values_;
  std::vector<BigInt> prefix_;
};

struct Stage {
  BigInt cut;
  SpacerRule spacers;

  friend bool operator==(const Stage& a, const Stage& b) { return a.cut == b.cut && a.spacers == b.spacers; }
};

/// Generating data of a rank-one system truncated at stage M = stages.size().
/// Stage n (1-based) cuts T_n into p_n columns and stacks them into T_{n+1},
/// so the data describes the towers T_1 .. T_{M+1}.
struct RankOneSpec {
  std::string label;
  std::vector<Stage> stages;

  std::size_t max_stage() const { return stages.size(); }
  /// Index of the deepest tower the data describes.
  std::size_t top_stage() const { return stages.size() + 1; }

  const Stage& stage(std::size_t n) const {
    if (n < 1 || n > stages.size())
      throw domain_error("stage " + std::to_string(n) + " outside [1, " + std::to_string(stages.size()) + "]");
    return stages[n - 1];
  }
  const BigInt& cut(std::size_t n) const { return stage(n).cut; }
  const SpacerRule& spacers(std::size_t n) const { return stage(n).spacers; }

  void validate() const {
    if (stages.empty()) throw malformed_spec("spec '" + label + "' has no stages");
    for (std::size_t n = 1; n <= stages.size(); ++n) {
      const Stage& s = stages[n - 1];
      if (s.cut < 2)
        throw malformed_spec("stage " + std::to_string(n) + ": cut " + s.cut.get_str() + " is below 2");
      if (s.spacers.kind() == SpacerKind::explicit_values) {
        const auto& v = s.spacers.values();
        if (v.empty()) throw malformed_spec("stage " + std::to_string(n) + ": empty spacer array");
        if (!fits_u64(s.cut) || v.size() != to_u64(s.cut))
          throw malformed_spec("stage " + std::to_string(n) + ": spacer array length " + std::to_string(v.size()) +
                               " differs from cut " + s.cut.get_str());
        for (const auto& a : v)
          if (sgn(a) < 0) throw malformed_spec("stage " + std::to_string(n) + ": negative spacer");
      }
    }
  }

  friend bool operator==(const RankOneSpec& a, const RankOneSpec& b) {
    return a.label == b.label && a.stages == b.stages;
  }
};

inline RankOneSpec make_spec(std::string label, const std::vector<BigInt>& cuts, const SpacerRule& rule) {
  RankOneSpec spec{std::move(label), {}};
  for (const auto& p : cuts) spec.stages.push_back({p, rule});
  spec.validate();
  return spec;
}

inline RankOneSpec make_spec(std::string label, std::initializer_list<unsigned long> cuts, const SpacerRule& rule) {
  std::vector<BigInt> big_cuts;
  for (auto p : cuts) big_cuts.emplace_back(p);
  return make_spec(std::move(label), big_cuts, rule);
}

/// p_n = base for every stage, no spacers.
inline RankOneSpec odometer(std::size_t stages, unsigned long base = 2) {
  return make_spec("odometer" + std::to_string(base), std::vector<BigInt>(stages, BigInt(base)), SpacerRule::none());
}

enum class CutChoice { min, mid, uniform };

inline std::string to_string(CutChoice c) {
  switch (c) {
    case CutChoice::min:
      return "min";
    case CutChoice::mid:
      return "mid";
    case CutChoice::uniform:
      return "uniform";
  }
  return "min";
}

/// Chooses each cut inside [h_n^gamma, h_n^gamma') from the height reached so far.
struct PowerWindowRule {
  Rational gamma;
  Rational gamma_prime;
  CutChoice choice = CutChoice::min;
  std::uint64_t seed = 0;
  std::vector<BigInt> prefix;  // explicit leading cuts
};

/// Integer window [lo, hi] = [max(2, ceil(h^gamma)), ceil(h^gamma') - 1] of
/// admissible cuts at height h. Empty when lo > hi.
inline std::pair<BigInt, BigInt> cut_window(const BigInt& height, const Rational& gamma, const Rational& gamma_prime) {
  BigInt lo = ceil_pow(Rational(height), gamma);
  if (lo < 2) lo = 2;
  BigInt hi = floor_pow_strict(Rational(height), gamma_prime);
  return {lo, hi};
}

/// Materializes a power-window rule. Stages where the window is empty
/// fall back to its lower end, which then fails class membership there.
inline RankOneSpec build_power_window(std::string label, std::size_t max_stage, const PowerWindowRule& rule,
                                      const SpacerRule& spacers) {
  if (spacers.kind() == SpacerKind::explicit_values)
    throw malformed_spec("power-window cuts need a symbolic spacer rule");
  if (!(sgn(rule.gamma) > 0 && rule.gamma < rule.gamma_prime && rule.gamma_prime < 1))
    throw malformed_spec("power-window needs 0 < gamma < gamma' < 1");
  RankOneSpec spec{std::move(label), {}};
  Rng rng(splitmix64(rule.seed));
  BigInt h = 1;
  for (std::size_t n = 1; n <= max_stage; ++n) {
    BigInt p;
    if (n <= rule.prefix.size()) {
      p = rule.prefix[n - 1];
    } else {
      auto [lo, hi] = cut_window(h, rule.gamma, rule.gamma_prime);
      if (hi < lo) {
        p = lo;
      } else if (rule.choice == CutChoice::min) {
        p = lo;
      } else if (rule.choice == CutChoice::mid) {
        p = lo + (hi - lo) / 2;
      } else {
        p = uniform_between(rng, lo, hi);
      }
    }
    spec.stages.push_back({p, spacers});
    h = p * h + spacers.prefix_sum(p);
  }
  spec.validate();
  return spec;
}

}  // namespace cutstack

#endif  // CUTSTACK_SPEC_HPP
