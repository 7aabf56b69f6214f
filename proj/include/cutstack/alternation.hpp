#ifndef CUTSTACK_ALTERNATION_HPP
#define CUTSTACK_ALTERNATION_HPP

#include "exact.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cutstack {

enum class AlternationStatus { pass, fail, undecidable };

struct AlternationEntry {
  std::size_t index = 0;   // n, 1-based into a
  std::size_t bracket = 0; // m(n), 1-based into b; 0 when undecidable
  bool lower_gap = false;  // b_m^{1+delta} < a_n
  bool upper_gap = false;  // a_n^{1+delta} < b_{m+1}
  AlternationStatus status = AlternationStatus::undecidable;
};

/// Verdict for "b is a-alternating with exponent delta" from index n0 on.
struct AlternationReport {
  Rational delta;
  std::size_t n0 = 1;
  std::vector<AlternationEntry> entries;
  bool verdict = true;  // every decidable index >= n0 passes
  std::optional<std::size_t> first_failure;
  /// Smallest index from which every decidable entry passes.
  std::size_t tail_start = 1;
  std::size_t decided = 0;
  std::size_t undecidable = 0;
};

inline void require_increasing(const std::vector<BigInt>& s, const char* name) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (sgn(s[i]) <= 0) throw domain_error(std::string(name) + " must be positive");
    if (i > 0 && !(s[i] > s[i - 1])) throw domain_error(std::string(name) + " must be strictly increasing");
  }
}

inline AlternationReport check_alternating(const std::vector<BigInt>& a, const std::vector<BigInt>& b,
                                           const Rational& delta, std::size_t n0 = 1) {
  if (sgn(delta) <= 0) throw domain_error("delta must be positive");
  require_increasing(a, "a");
  require_increasing(b, "b");
  AlternationReport r;
  r.delta = delta;
  r.n0 = n0 == 0 ? 1 : n0;
  r.tail_start = r.n0;
  const Rational e = 1 + delta;
  std::size_t m = 0;  // number of b entries <= a_n, monotone in n
  for (std::size_t n = r.n0; n <= a.size(); ++n) {
    const BigInt& an = a[n - 1];
    while (m < b.size() && b[m] <= an) ++m;
    AlternationEntry en;
    en.index = n;
    if (m == 0 || m == b.size()) {
      ++r.undecidable;
      r.entries.push_back(en);
      continue;
    }
    en.bracket = m;
    en.lower_gap = compare_pow(Rational(b[m - 1]), e, Rational(an)) < 0;
    en.upper_gap = compare_pow(Rational(an), e, Rational(b[m])) < 0;
    en.status = en.lower_gap && en.upper_gap ? AlternationStatus::pass : AlternationStatus::fail;
    ++r.decided;
    if (en.status == AlternationStatus::fail) {
      r.verdict = false;
      if (!r.first_failure) r.first_failure = n;
      r.tail_start = n + 1;
    }
    r.entries.push_back(en);
  }
  return r;
}

/// Both directions of the definition.
struct MutualAlternation {
  AlternationReport b_wrt_a;  // check_alternating(a, b): indices of a
  AlternationReport a_wrt_b;  // check_alternating(b, a): indices of b
  bool verdict() const { return b_wrt_a.verdict && a_wrt_b.verdict; }
};

inline MutualAlternation check_mutual_alternation(const std::vector<BigInt>& a, const std::vector<BigInt>& b,
                                                  const Rational& delta, std::size_t n0a = 1, std::size_t n0b = 1) {
  return {check_alternating(a, b, delta, n0a), check_alternating(b, a, delta, n0b)};
}

}  // namespace cutstack

#endif  // CUTSTACK_ALTERNATION_HPP
