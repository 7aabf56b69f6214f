#ifndef CUTSTACK_CODING_HPP
#define CUTSTACK_CODING_HPP

// Symbolic coding of orbits against the level partitions of T_n, and the
// on-disk word formats.
//
// A symbol is a dense u32 in a mixed radix: one digit per factor system,
// digit value = level in [0, h_n) or h_n for OUTSIDE.

#include "exact.hpp"
#include "orbit.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace cutstack {

struct SymbolWord {
  /// radices[c] = h_n + 1 of factor c; the last digit value is OUTSIDE.
  std::vector<std::uint64_t> radices;
  std::vector<std::uint32_t> symbols;

  std::size_t size() const { return symbols.size(); }

  std::uint64_t alphabet_size() const {
    std::uint64_t a = 1;
    for (auto r : radices) a *= r;
    return a;
  }

  /// Digits of symbol t, most significant factor first.
  std::vector<std::uint64_t> digits(std::size_t t) const {
    std::vector<std::uint64_t> d(radices.size());
    std::uint64_t v = symbols.at(t);
    for (std::size_t c = radices.size(); c-- > 0;) {
      d[c] = v % radices[c];
      v /= radices[c];
    }
    return d;
  }

  bool digit_outside(std::size_t t, std::size_t factor) const {
    return digits(t)[factor] + 1 == radices[factor];
  }

  friend bool operator==(const SymbolWord&, const SymbolWord&) = default;
};

inline std::uint64_t checked_radix(const RankOneSystem& sys, std::size_t n) {
  if (n < 1 || n > sys.max_stage())
    throw domain_error("partition stage " + std::to_string(n) + " outside [1, " + std::to_string(sys.max_stage()) + "]");
  const BigInt& h = sys.height(n);
  if (h >= BigInt(std::numeric_limits<std::uint32_t>::max()))
    throw domain_error("partition stage " + std::to_string(n) + " has too many levels for a dense alphabet");
  return to_u64(h) + 1;
}

/// Digit of the current point for the stage-n partition (h_n means OUTSIDE).
inline std::uint64_t level_digit(const RankOneSystem& sys, const OrbitState& s, std::size_t n, std::uint64_t radix) {
  if (n <= sys.small_stage_limit()) {
    std::int64_t l = small_level(sys, s, n);
    return l < 0 ? radix - 1 : static_cast<std::uint64_t>(l);
  }
  auto l = level_in_tower(sys, s, n);
  return l ? to_u64(*l) : radix - 1;
}

/// Word of length N: symbol t codes the stage-n level of T^t x.
/// The state is advanced N - 1 times; orbit_escape propagates.
inline SymbolWord code_orbit(const RankOneSystem& sys, OrbitState state, std::size_t n, std::size_t length) {
  SymbolWord w;
  const std::uint64_t radix = checked_radix(sys, n);
  w.radices = {radix};
  w.symbols.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) advance(sys, state);
    w.symbols.push_back(static_cast<std::uint32_t>(level_digit(sys, state, n, radix)));
  }
  return w;
}

inline SymbolWord code_product_orbit(const RankOneSystem& sys_t, const RankOneSystem& sys_s, OrbitState x, OrbitState y,
                                     std::size_t n, std::size_t length) {
  SymbolWord w;
  const std::uint64_t rt = checked_radix(sys_t, n);
  const std::uint64_t rs = checked_radix(sys_s, n);
  if (rt * rs > std::numeric_limits<std::uint32_t>::max())
    throw domain_error("product alphabet at stage " + std::to_string(n) + " exceeds 32 bits");
  w.radices = {rt, rs};
  w.symbols.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) {
      advance(sys_t, x);
      advance(sys_s, y);
    }
    w.symbols.push_back(static_cast<std::uint32_t>(level_digit(sys_t, x, n, rt) * rs + level_digit(sys_s, y, n, rs)));
  }
  return w;
}

/// Componentwise pairing of two single-system words.
inline SymbolWord zip_words(const SymbolWord& a, const SymbolWord& b) {
  if (a.size() != b.size()) throw domain_error("zip_words: lengths differ");
  SymbolWord w;
  w.radices = a.radices;
  w.radices.insert(w.radices.end(), b.radices.begin(), b.radices.end());
  const std::uint64_t rb = b.alphabet_size();
  if (a.alphabet_size() * rb > std::numeric_limits<std::uint32_t>::max())
    throw domain_error("zip_words: product alphabet exceeds 32 bits");
  w.symbols.reserve(a.size());
  for (std::size_t t = 0; t < a.size(); ++t)
    w.symbols.push_back(static_cast<std::uint32_t>(std::uint64_t{a.symbols[t]} * rb + b.symbols[t]));
  return w;
}

// ---------------------------------------------------------------- text form
//
//   # cutstack-word radices=5,7 length=3
//   0,4
//   OUTSIDE,2
//   1,OUTSIDE

inline std::string symbol_text(const SymbolWord& w, std::size_t t) {
  auto d = w.digits(t);
  std::string out;
  for (std::size_t c = 0; c < d.size(); ++c) {
    if (c) out += ',';
    out += d[c] + 1 == w.radices[c] ? std::string("OUTSIDE") : std::to_string(d[c]);
  }
  return out;
}

inline void write_word_text(std::ostream& os, const SymbolWord& w) {
  os << "# cutstack-word radices=";
  for (std::size_t c = 0; c < w.radices.size(); ++c) os << (c ? "," : "") << w.radices[c];
  os << " length=" << w.size() << '\n';
  for (std::size_t t = 0; t < w.size(); ++t) os << symbol_text(w, t) << '\n';
}

inline std::uint64_t parse_u64_field(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw malformed_spec("bad " + what + ": '" + s + "'");
  BigInt v = parse_bigint(s);
  if (!fits_u64(v)) throw malformed_spec(what + " out of range: " + s);
  return to_u64(v);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

/// Reads the text form. Without a header line the word is read as a single
/// factor whose radix is one more than the largest integer symbol seen.
inline SymbolWord read_word_text(std::istream& is) {
  SymbolWord w;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::uint64_t> declared_length;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("radices=", 0) == 0) {
          w.radices.clear();
          for (const auto& r : split(tok.substr(8), ',')) w.radices.push_back(parse_u64_field(r, "radix"));
        } else if (tok.rfind("length=", 0) == 0) {
          declared_length = parse_u64_field(tok.substr(7), "length");
        }
      }
      continue;
    }
    rows.push_back(split(line, ','));
    if (!w.radices.empty() && rows.back().size() != w.radices.size())
      throw malformed_spec("word line " + std::to_string(line_no) + ": wrong number of components");
  }
  if (w.radices.empty()) {
    std::uint64_t mx = 0;
    for (auto& r : rows) {
      if (r.size() != 1) throw malformed_spec("word without header must have one component per line");
      if (r[0] != "OUTSIDE") mx = std::max(mx, parse_u64_field(r[0], "symbol") + 1);
    }
    w.radices = {mx + 1};
  }
  if (w.alphabet_size() > std::numeric_limits<std::uint32_t>::max() || w.alphabet_size() == 0)
    throw malformed_spec("word alphabet does not fit 32 bits");
  for (auto& r : rows) {
    std::uint64_t v = 0;
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::uint64_t d = r[c] == "OUTSIDE" ? w.radices[c] - 1 : parse_u64_field(r[c], "symbol");
      if (d >= w.radices[c]) throw malformed_spec("symbol " + r[c] + " outside its alphabet");
      v = v * w.radices[c] + d;
    }
    w.symbols.push_back(static_cast<std::uint32_t>(v));
  }
  if (declared_length && *declared_length != w.size())
    throw malformed_spec("word length " + std::to_string(w.size()) + " differs from header " +
                         std::to_string(*declared_length));
  return w;
}

// -------------------------------------------------------------- binary form
//
// u32 alphabet size, u64 length, then `length` little-endian symbols of
// 1, 2 or 4 bytes (the narrowest width that holds alphabet_size - 1).

inline unsigned symbol_width(std::uint64_t alphabet) {
  if (alphabet <= 0x100) return 1;
  if (alphabet <= 0x10000) return 2;
  return 4;
}

namespace detail {
inline void put_le(std::ostream& os, std::uint64_t v, unsigned bytes) {
  for (unsigned b = 0; b < bytes; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFF));
}
inline std::uint64_t get_le(std::istream& is, unsigned bytes) {
  std::uint64_t v = 0;
  for (unsigned b = 0; b < bytes; ++b) {
    int c = is.get();
    if (c == std::char_traits<char>::eof()) throw malformed_spec("truncated binary word");
    v |= std::uint64_t(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}
}  // namespace detail

inline void write_word_binary(std::ostream& os, const SymbolWord& w) {
  const std::uint64_t a = w.alphabet_size();
  if (a > std::numeric_limits<std::uint32_t>::max()) throw domain_error("alphabet does not fit the binary header");
  detail::put_le(os, a, 4);
  detail::put_le(os, w.size(), 8);
  const unsigned width = symbol_width(a);
  for (auto s : w.symbols) detail::put_le(os, s, width);
}

/// The binary form keeps only the flat alphabet, so the result has one factor.
inline SymbolWord read_word_binary(std::istream& is) {
  SymbolWord w;
  const std::uint64_t a = detail::get_le(is, 4);
  if (a == 0) throw malformed_spec("binary word with empty alphabet");
  const std::uint64_t n = detail::get_le(is, 8);
  const unsigned width = symbol_width(a);
  w.radices = {a};
  w.symbols.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t t = 0; t < n; ++t) {
    std::uint64_t s = detail::get_le(is, width);
    if (s >= a) throw malformed_spec("binary symbol " + std::to_string(s) + " outside alphabet " + std::to_string(a));
    w.symbols.push_back(static_cast<std::uint32_t>(s));
  }
  if (is.peek() != std::char_traits<char>::eof()) throw malformed_spec("trailing bytes after binary word");
  return w;
}

}  // namespace cutstack

#endif  // CUTSTACK_CODING_HPP
