#ifndef CUTSTACK_SPEC_IO_HPP
#define CUTSTACK_SPEC_IO_HPP

// Spec text format.
//
// Canonical (what serialize_spec writes, one stage per line):
//
//   cutstack-spec v1
//   label: T
//   max_stage: 3
//   stage 1: cut 2 spacers staircase
//   stage 2: cut 3 spacers none
//   stage 3: cut 2 spacers 0 5
//
// Rule form (accepted by parse_spec, materialized on read):
//
//   cutstack-spec v1
//   label: T
//   max_stage: 18
//   cuts: power-window gamma=21/100 gamma_prime=3/10 choice=mid seed=0 prefix=2
//   spacer_rule: staircase
//
// `cuts:` may also be a plain list "cuts: 2 3 4". With spacer_rule explicit,
// each stage needs a "spacers n: a_1 ... a_p" line. Lines starting with '#'
// and blank lines are ignored.

#include "coding.hpp"
#include "exact.hpp"
#include "spec.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cutstack {

inline constexpr const char* kSpecMagic = "cutstack-spec v1";

inline std::string spacer_text(const SpacerRule& rule) {
  switch (rule.kind()) {
    case SpacerKind::none:
      return "none";
    case SpacerKind::staircase:
      return "staircase";
    case SpacerKind::explicit_values:
      break;
  }
  std::string out;
  for (std::size_t i = 0; i < rule.values().size(); ++i) out += (i ? " " : "") + rule.values()[i].get_str();
  return out;
}

inline std::string serialize_spec(const RankOneSpec& spec) {
  std::ostringstream os;
  os << kSpecMagic << '\n';
  os << "label: " << spec.label << '\n';
  os << "max_stage: " << spec.max_stage() << '\n';
  for (std::size_t n = 1; n <= spec.max_stage(); ++n)
    os << "stage " << n << ": cut " << spec.cut(n).get_str() << " spacers " << spacer_text(spec.spacers(n)) << '\n';
  return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

[[noreturn]] inline void fail(std::size_t line, const std::string& msg) {
  throw malformed_spec("spec line " + std::to_string(line) + ": " + msg);
}

inline BigInt parse_int_at(std::size_t line, const std::string& s) {
  try {
    return parse_bigint(s);
  } catch (const domain_error& e) {
    fail(line, e.what());
  }
}

inline Rational parse_rational_at(std::size_t line, const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const domain_error& e) {
    fail(line, e.what());
  }
}

inline SpacerRule parse_spacers(std::size_t line, const std::vector<std::string>& toks, std::size_t from) {
  if (from >= toks.size()) fail(line, "missing spacer data");
  if (toks.size() == from + 1 && toks[from] == "none") return SpacerRule::none();
  if (toks.size() == from + 1 && toks[from] == "staircase") return SpacerRule::staircase();
  std::vector<BigInt> v;
  for (std::size_t i = from; i < toks.size(); ++i) v.push_back(parse_int_at(line, toks[i]));
  return SpacerRule::explicit_values(std::move(v));
}

inline CutChoice parse_choice(std::size_t line, const std::string& s) {
  if (s == "min") return CutChoice::min;
  if (s == "mid") return CutChoice::mid;
  if (s == "uniform") return CutChoice::uniform;
  fail(line, "unknown cut choice '" + s + "'");
}

}  // namespace detail

namespace detail {

inline RankOneSpec parse_spec_impl(const std::string& text, std::optional<std::size_t> max_stage_override) {
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  bool seen_magic = false;
  std::optional<std::string> label;
  std::optional<std::size_t> max_stage;
  std::map<std::size_t, Stage> stage_lines;
  std::map<std::size_t, SpacerRule> spacer_lines;
  std::optional<std::vector<BigInt>> cut_list;
  std::optional<PowerWindowRule> window;
  std::optional<std::string> spacer_rule;
  std::size_t rule_line = 0;

  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!seen_magic) {
      if (line != kSpecMagic) fail(line_no, "expected header '" + std::string(kSpecMagic) + "'");
      seen_magic = true;
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) fail(line_no, "expected 'key: value'");
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    auto kw = words(key);
    auto vw = words(value);
    if (key == "label") {
      label = value;
    } else if (key == "max_stage") {
      BigInt m = parse_int_at(line_no, value);
      if (m < 1 || !fits_u64(m) || m > 100000) fail(line_no, "max_stage must be in [1, 100000]");
      max_stage = to_u64(m);
    } else if (kw.size() == 2 && kw[0] == "stage") {
      std::size_t n = to_u64(parse_int_at(line_no, kw[1]));
      if (vw.size() < 4 || vw[0] != "cut" || vw[2] != "spacers") fail(line_no, "expected 'cut P spacers ...'");
      if (stage_lines.count(n)) fail(line_no, "duplicate stage " + std::to_string(n));
      stage_lines.emplace(n, Stage{parse_int_at(line_no, vw[1]), parse_spacers(line_no, vw, 3)});
    } else if (kw.size() == 2 && kw[0] == "spacers") {
      std::size_t n = to_u64(parse_int_at(line_no, kw[1]));
      spacer_lines.emplace(n, parse_spacers(line_no, vw, 0));
    } else if (key == "cuts") {
      rule_line = line_no;
      if (vw.empty()) fail(line_no, "empty cuts");
      if (vw[0] == "power-window") {
        PowerWindowRule r;
        bool have_g = false, have_gp = false;
        for (std::size_t i = 1; i < vw.size(); ++i) {
          auto eq = vw[i].find('=');
          if (eq == std::string::npos) fail(line_no, "expected key=value in power-window rule");
          std::string k = vw[i].substr(0, eq), v = vw[i].substr(eq + 1);
          if (k == "gamma") {
            r.gamma = parse_rational_at(line_no, v);
            have_g = true;
          } else if (k == "gamma_prime") {
            r.gamma_prime = parse_rational_at(line_no, v);
            have_gp = true;
          } else if (k == "choice") {
            r.choice = parse_choice(line_no, v);
          } else if (k == "seed") {
            r.seed = to_u64(parse_int_at(line_no, v));
          } else if (k == "prefix") {
            for (const auto& p : split(v, ',')) r.prefix.push_back(parse_int_at(line_no, p));
          } else {
            fail(line_no, "unknown power-window field '" + k + "'");
          }
        }
        if (!have_g || !have_gp) fail(line_no, "power-window needs gamma and gamma_prime");
        window = r;
      } else {
        std::vector<BigInt> cuts;
        for (const auto& t : vw) cuts.push_back(parse_int_at(line_no, t));
        cut_list = std::move(cuts);
      }
    } else if (key == "spacer_rule") {
      if (value != "staircase" && value != "none" && value != "explicit")
        fail(line_no, "spacer_rule must be staircase, none or explicit");
      spacer_rule = value;
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }
  if (!seen_magic) throw malformed_spec("empty spec file");

  RankOneSpec spec;
  spec.label = label.value_or("");
  const bool rule_form = cut_list || window;
  if (rule_form && !stage_lines.empty()) fail(rule_line, "cannot mix 'cuts:' with stage lines");

  if (!rule_form) {
    if (stage_lines.empty()) throw malformed_spec("spec has no stages");
    std::size_t n = 1;
    for (auto& [idx, st] : stage_lines) {
      if (idx != n) throw malformed_spec("stage lines must be numbered 1.." + std::to_string(stage_lines.size()));
      spec.stages.push_back(st);
      ++n;
    }
    if (max_stage && *max_stage != spec.stages.size())
      throw malformed_spec("max_stage " + std::to_string(*max_stage) + " differs from " +
                           std::to_string(spec.stages.size()) + " stage lines");
    if (max_stage_override && *max_stage_override < spec.stages.size()) spec.stages.erase(spec.stages.begin() + static_cast<long>(*max_stage_override), spec.stages.end());
    spec.validate();
    return spec;
  }

  std::string rule = spacer_rule.value_or("staircase");
  auto stage_spacers = [&](std::size_t n) -> SpacerRule {
    if (rule == "staircase") return SpacerRule::staircase();
    if (rule == "none") return SpacerRule::none();
    auto it = spacer_lines.find(n);
    if (it == spacer_lines.end()) throw malformed_spec("missing 'spacers " + std::to_string(n) + ":' line");
    return it->second;
  };

  if (cut_list) {
    std::size_t m = cut_list->size();
    if (max_stage && *max_stage != m && !max_stage_override)
      throw malformed_spec("max_stage " + std::to_string(*max_stage) + " differs from " + std::to_string(m) + " cuts");
    if (max_stage_override) m = std::min(m, *max_stage_override);
    for (std::size_t n = 1; n <= m; ++n) spec.stages.push_back({(*cut_list)[n - 1], stage_spacers(n)});
    spec.validate();
    return spec;
  }

  std::size_t m = max_stage_override ? *max_stage_override : max_stage.value_or(0);
  if (m == 0) throw malformed_spec("power-window cuts need max_stage");
  if (rule == "explicit") throw malformed_spec("power-window cuts need spacer_rule staircase or none");
  try {
    return build_power_window(spec.label, m, *window, stage_spacers(1));
  } catch (const domain_error& e) {
    throw malformed_spec(e.what());
  }
}

}  // namespace detail

/// Parses either form. `max_stage_override`, when set, replaces max_stage for
/// rule-based cuts and truncates explicit ones.
inline RankOneSpec parse_spec(const std::string& text, std::optional<std::size_t> max_stage_override = std::nullopt) {
  try {
    return detail::parse_spec_impl(text, max_stage_override);
  } catch (const domain_error& e) {
    throw malformed_spec(e.what());
  }
}

inline RankOneSpec load_spec(const std::string& path, std::optional<std::size_t> max_stage_override = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw malformed_spec("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), max_stage_override);
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace cutstack

#endif  // CUTSTACK_SPEC_IO_HPP
