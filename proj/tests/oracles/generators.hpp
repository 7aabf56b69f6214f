#ifndef CUTSTACK_TESTS_GENERATORS_HPP
#define CUTSTACK_TESTS_GENERATORS_HPP

#include "cutstack/orbit.hpp"
#include "cutstack/spec.hpp"
#include "stacking_oracle.hpp"

#include <vector>

namespace gen {

using namespace cutstack;

/// Random cuts in [2, max_cut] with a per-stage random spacer rule, grown
/// while the top height stays at or below max_height.
inline RankOneSpec random_small_spec(Rng& rng, std::uint64_t max_height, std::size_t max_depth = 12,
                                     std::uint64_t max_cut = 5) {
  RankOneSpec spec{"random", {}};
  std::uint64_t h = 1;
  while (spec.stages.size() < max_depth) {
    std::uint64_t p = 2 + uniform_below(rng, max_cut - 1);
    SpacerRule rule = SpacerRule::none();
    std::uint64_t total = 0;
    switch (uniform_below(rng, 3)) {
      case 0:
        break;
      case 1:
        rule = SpacerRule::staircase();
        total = p * (p + 1) / 2;
        break;
      default: {
        std::vector<BigInt> v;
        for (std::uint64_t i = 0; i < p; ++i) {
          std::uint64_t a = uniform_below(rng, 4);
          v.push_back(big(a));
          total += a;
        }
        rule = SpacerRule::explicit_values(std::move(v));
      }
    }
    std::uint64_t next = p * h + total;
    if (next > max_height) break;
    spec.stages.push_back({big(p), rule});
    h = next;
  }
  if (spec.stages.empty()) spec.stages.push_back({BigInt(2), SpacerRule::none()});
  spec.validate();
  return spec;
}

inline std::vector<oracle::StageData> to_oracle(const RankOneSpec& spec) {
  std::vector<oracle::StageData> out;
  for (std::size_t n = 1; n <= spec.max_stage(); ++n) {
    oracle::StageData d;
    d.cut = static_cast<std::int64_t>(to_u64(spec.cut(n)));
    for (std::int64_t i = 1; i <= d.cut; ++i)
      d.spacers.push_back(static_cast<std::int64_t>(to_u64(spec.spacers(n).at(big(i)))));
    out.push_back(std::move(d));
  }
  return out;
}

/// OrbitState the oracle assigns to a top-tower cell.
inline OrbitState oracle_state(const oracle::Cell& c) {
  OrbitState s;
  s.spacer_stage = c.spacer_stage;
  s.spacer_offset = c.spacer_offset;
  for (auto v : c.column) s.columns.emplace_back(static_cast<long>(v));
  return s;
}

}  // namespace gen

#endif  // CUTSTACK_TESTS_GENERATORS_HPP
