#ifndef CUTSTACK_EXPERIMENT_HPP
#define CUTSTACK_EXPERIMENT_HPP

// Experiment plumbing: a small key/value config, pair sources (the shipped
// rank-one pair and two reference systems), f-bar sweeps, the distance-scale
// histogram, and summary tables.
//
// Config text, one "key: value" per line, '#' starts a comment:
//
//   label: shipped
//   t_spec: t_power_window.spec      # relative to the config file
//   s_spec: construct                # or a spec path
//   lengths: 2000 10000 30000
//   pairs: 20
//   seed: 20240601

#include "coding.hpp"
#include "good_sets.hpp"
#include "partner.hpp"
#include "spec_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef CUTSTACK_VERSION
#define CUTSTACK_VERSION "0.1.0"
#endif

namespace cutstack {

inline constexpr const char* kCodeVersion = "cutstack " CUTSTACK_VERSION;

using Record = nlohmann::ordered_json;

class malformed_input : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 15];
  return out;
}

// ------------------------------------------------------------------ config

inline const std::vector<std::string>& known_sources() {
  static const std::vector<std::string> s{"constructed", "odometer", "sturmian"};
  return s;
}

struct ExperimentConfig {
  std::string label = "experiment";
  std::string t_spec;
  std::string s_spec = "construct";
  Rational gamma{21, 100};
  Rational gamma_prime{3, 10};
  Rational eta{1, 128};
  Rational xi{21, 40000};  // min(gamma, 1 - gamma', gamma/4) / 100 at the defaults
  std::size_t n_prime = 7;
  std::size_t n0 = 3;
  std::size_t n1 = 0;  // 0: n' + 3
  std::size_t n3 = 0;  // 0: n1
  std::vector<std::size_t> lengths{2000, 10000, 30000};
  std::size_t pairs = 20;
  std::uint64_t seed = 1;
  std::vector<std::string> sources = known_sources();
  std::size_t max_attempts = 200000;
  std::size_t max_stage = 0;  // 0: as written in the spec
  std::size_t atk_length = 2000;
  std::size_t perturbations = 4;
  std::string out_dir = "out";
  std::string base_dir = ".";  // directory of the config file

  std::size_t good_from() const { return n1 ? n1 : n_prime + 3; }
  std::size_t separated_from() const { return n3 ? n3 : good_from(); }
  std::size_t max_length() const { return lengths.back(); }

  std::string resolve(const std::string& path) const {
    std::filesystem::path p(path);
    return p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  }

  void validate() const {
    auto bad = [](const std::string& m) { throw malformed_input("config: " + m); };
    if (t_spec.empty()) bad("t_spec is required");
    if (lengths.empty()) bad("lengths must not be empty");
    for (std::size_t i = 0; i < lengths.size(); ++i)
      if (lengths[i] == 0 || (i > 0 && lengths[i] <= lengths[i - 1])) bad("lengths must be positive and increasing");
    if (pairs == 0) bad("pairs must be >= 1");
    if (n0 < 3) bad("n0 must be >= 3");
    if (max_attempts == 0) bad("max_attempts must be >= 1");
    if (atk_length == 0) bad("atk_length must be >= 1");
    if (!(sgn(xi) > 0 && xi < 1)) bad("xi must lie in (0, 1)");
    if (sources.empty()) bad("sources must not be empty");
    std::set<std::string> seen;
    for (const auto& s : sources) {
      if (std::find(known_sources().begin(), known_sources().end(), s) == known_sources().end())
        bad("unknown source '" + s + "'");
      if (!seen.insert(s).second) bad("duplicate source '" + s + "'");
    }
  }

  /// Result-affecting fields in fixed order; out_dir and base_dir are left out.
  std::string canonical() const {
    std::ostringstream os;
    auto list = [](const auto& v) {
      std::ostringstream l;
      for (std::size_t i = 0; i < v.size(); ++i) l << (i ? " " : "") << v[i];
      return l.str();
    };
    os << "label: " << label << '\n'
       << "t_spec: " << t_spec << '\n'
       << "s_spec: " << s_spec << '\n'
       << "gamma: " << to_fraction_string(gamma) << '\n'
       << "gamma_prime: " << to_fraction_string(gamma_prime) << '\n'
       << "eta: " << to_fraction_string(eta) << '\n'
       << "xi: " << to_fraction_string(xi) << '\n'
       << "n_prime: " << n_prime << '\n'
       << "n0: " << n0 << '\n'
       << "n1: " << good_from() << '\n'
       << "n3: " << separated_from() << '\n'
       << "lengths: " << list(lengths) << '\n'
       << "pairs: " << pairs << '\n'
       << "seed: " << seed << '\n'
       << "sources: " << list(sources) << '\n'
       << "max_attempts: " << max_attempts << '\n'
       << "max_stage: " << max_stage << '\n'
       << "atk_length: " << atk_length << '\n'
       << "perturbations: " << perturbations << '\n';
    return os.str();
  }
};

namespace detail {

inline std::uint64_t parse_count(const std::string& v, const std::string& key) {
  try {
    return parse_u64_field(v, key);
  } catch (const std::exception&) {
    throw malformed_input("config: " + key + " expects a non-negative integer, got '" + v + "'");
  }
}

inline Rational parse_config_rational(const std::string& v, const std::string& key) {
  try {
    return parse_rational(v);
  } catch (const std::exception&) {
    throw malformed_input("config: " + key + " expects a rational, got '" + v + "'");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".") {
  ExperimentConfig c;
  c.base_dir = base_dir;
  std::istringstream is(text);
  std::string raw;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw malformed_input("config line " + std::to_string(line_no) + ": expected 'key: value'");
    const std::string key = detail::trim(line.substr(0, colon));
    const std::string value = detail::trim(line.substr(colon + 1));
    if (!seen.insert(key).second) throw malformed_input("config line " + std::to_string(line_no) + ": duplicate " + key);
    auto count = [&] { return detail::parse_count(value, key); };
    auto rat = [&] { return detail::parse_config_rational(value, key); };
    if (key == "label") c.label = value;
    else if (key == "t_spec") c.t_spec = value;
    else if (key == "s_spec") c.s_spec = value;
    else if (key == "gamma") c.gamma = rat();
    else if (key == "gamma_prime") c.gamma_prime = rat();
    else if (key == "eta") c.eta = rat();
    else if (key == "xi") c.xi = rat();
    else if (key == "n_prime") c.n_prime = count();
    else if (key == "n0") c.n0 = count();
    else if (key == "n1") c.n1 = count();
    else if (key == "n3") c.n3 = count();
    else if (key == "pairs") c.pairs = count();
    else if (key == "seed") c.seed = count();
    else if (key == "max_attempts") c.max_attempts = count();
    else if (key == "max_stage") c.max_stage = count();
    else if (key == "atk_length") c.atk_length = count();
    else if (key == "perturbations") c.perturbations = count();
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "lengths") {
      c.lengths.clear();
      for (const auto& w : detail::words(value)) c.lengths.push_back(detail::parse_count(w, key));
    } else if (key == "sources") {
      c.sources = detail::words(value);
    } else {
      throw malformed_input("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw malformed_input("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

// ----------------------------------------------------------------- sources

/// Two coded words of one sampled pair, plus what is needed to replay it.
struct PairDraw {
  std::string source;
  std::size_t index = 0;
  bool admissible = false;
  std::size_t attempts = 0;
  Record start;                      // replay data
  SymbolWord a, b;
  std::vector<std::uint32_t> good_prefix;  // good_prefix[N] = good iterates among the first N (constructed only)

  std::string label(char side) const { return source + "#" + std::to_string(index) + ":" + side; }
};

inline constexpr std::uint64_t kGoldenStep = 0x9E3779B97F4A7C15ull;  // frac((sqrt 5 - 1) / 2) in 64-bit fixed point

/// Two-interval coding of the rotation by the golden mean: 1 on [1 - alpha, 1).
inline SymbolWord sturmian_word(std::uint64_t phase, std::size_t length) {
  SymbolWord w;
  w.radices = {2};
  w.symbols.reserve(length);
  const std::uint64_t cut = 0 - kGoldenStep;
  for (std::size_t i = 0; i < length; ++i, phase += kGoldenStep) w.symbols.push_back(phase >= cut ? 1u : 0u);
  return w;
}

class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::optional<std::size_t> cap;
    if (cfg_.max_stage) cap = cfg_.max_stage;
    RankOneSpec t = load_spec(cfg_.resolve(cfg_.t_spec), cap);
    RankOneSpec s = cfg_.s_spec == "construct"
                        ? construct_partner(t, PartnerParams{cfg_.gamma, cfg_.gamma_prime, cfg_.n_prime, cfg_.eta}).spec
                        : load_spec(cfg_.resolve(cfg_.s_spec), cap);
    if (cfg_.good_from() > std::min(t.max_stage(), s.max_stage()))
      throw malformed_input("config: n1 beyond the computed stages");
    t_ = std::make_unique<RankOneSystem>(std::move(t));
    s_ = std::make_unique<RankOneSystem>(std::move(s));
    gt_ = std::make_unique<GoodSets>(*t_, GoodSetParams{cfg_.gamma, cfg_.gamma_prime, cfg_.good_from(),
                                                        cfg_.separated_from()});
    // S lives in the class with exponents gamma/3 and 3 gamma'.
    gs_ = std::make_unique<GoodSets>(*s_, GoodSetParams{cfg_.gamma / 3, 3 * cfg_.gamma_prime, cfg_.good_from(),
                                                        cfg_.separated_from()});
    odo2_ = std::make_unique<RankOneSystem>(odometer(40, 2));
    odo3_ = std::make_unique<RankOneSystem>(odometer(26, 3));
    hash_ = hex64(fnv1a64(cfg_.canonical() + serialize_spec(t_->spec()) + serialize_spec(s_->spec())));
  }

  const ExperimentConfig& config() const { return cfg_; }
  const RankOneSystem& system_t() const { return *t_; }
  const RankOneSystem& system_s() const { return *s_; }
  const GoodSets& good_t() const { return *gt_; }
  const GoodSets& good_s() const { return *gs_; }
  const std::string& config_hash() const { return hash_; }

  Rng stream(const std::string& source, std::size_t index) const {
    return make_stream(cfg_.seed ^ fnv1a64(source), index);
  }

  PairDraw draw(const std::string& source, std::size_t index, std::size_t length) const {
    Rng rng = stream(source, index);
    if (source == "constructed") return draw_constructed(rng, index, length);
    if (source == "odometer") return draw_odometer(rng, index, length);
    if (source == "sturmian") return draw_sturmian(rng, index, length);
    throw malformed_input("unknown source '" + source + "'");
  }

  /// Sampled start points of a constructed pair: x, y from F, x', y' from F cap D.
  struct Starts {
    OrbitState x, y, xp, yp;
  };

  std::optional<Starts> sample_starts(Rng& rng, std::size_t& attempts) const {
    auto pick = [&](const GoodSets& g, const OrbitState* anchor) -> std::optional<OrbitState> {
      for (std::size_t a = 0; a < cfg_.max_attempts; ++a) {
        ++attempts;
        auto z = sample_state(g.system(), rng);
        if (g.in_F_all(z) && (!anchor || g.in_D_all(*anchor, z))) return z;
      }
      return std::nullopt;
    };
    auto x = pick(*gt_, nullptr);
    if (!x) return std::nullopt;
    auto y = pick(*gs_, nullptr);
    if (!y) return std::nullopt;
    auto xp = pick(*gt_, &*x);
    if (!xp) return std::nullopt;
    auto yp = pick(*gs_, &*y);
    if (!yp) return std::nullopt;
    return Starts{*x, *y, *xp, *yp};
  }

 private:
  PairDraw draw_constructed(Rng& rng, std::size_t index, std::size_t length) const {
    PairDraw d;
    d.source = "constructed";
    d.index = index;
    auto st = sample_starts(rng, d.attempts);
    if (!st) return d;
    auto top = [](const RankOneSystem& sys, const OrbitState& z) {
      return level_in_tower(sys, z, sys.top_stage())->get_str();
    };
    d.start = {{"x", top(*t_, st->x)}, {"y", top(*s_, st->y)}, {"xp", top(*t_, st->xp)}, {"yp", top(*s_, st->yp)}};
    try {
      d.a = code_product_orbit(*t_, *s_, st->x, st->y, cfg_.n0, length);
      d.b = code_product_orbit(*t_, *s_, st->xp, st->yp, cfg_.n0, length);
      d.good_prefix.assign(length + 1, 0);
      OrbitState x = st->x, y = st->y;
      for (std::size_t i = 0; i < length; ++i) {
        if (i > 0) {
          advance(*t_, x);
          advance(*s_, y);
        }
        d.good_prefix[i + 1] = d.good_prefix[i] + (in_good_product(*gt_, *gs_, x, y, cfg_.n0) ? 1 : 0);
      }
    } catch (const orbit_escape&) {
      d.good_prefix.clear();
      return d;
    }
    d.admissible = true;
    return d;
  }

  PairDraw draw_odometer(Rng& rng, std::size_t index, std::size_t length) const {
    PairDraw d;
    d.source = "odometer";
    d.index = index;
    for (std::size_t a = 0; a < cfg_.max_attempts; ++a) {
      d.attempts += 1;
      OrbitState x = sample_state(*odo2_, rng), y = sample_state(*odo3_, rng);
      OrbitState xp = sample_state(*odo2_, rng), yp = sample_state(*odo3_, rng);
      try {
        d.a = code_product_orbit(*odo2_, *odo3_, x, y, cfg_.n0, length);
        d.b = code_product_orbit(*odo2_, *odo3_, xp, yp, cfg_.n0, length);
      } catch (const orbit_escape&) {
        continue;
      }
      auto top = [](const RankOneSystem& sys, const OrbitState& z) {
        return level_in_tower(sys, z, sys.top_stage())->get_str();
      };
      d.start = {{"x", top(*odo2_, x)}, {"y", top(*odo3_, y)}, {"xp", top(*odo2_, xp)}, {"yp", top(*odo3_, yp)}};
      d.admissible = true;
      return d;
    }
    return d;
  }

  PairDraw draw_sturmian(Rng& rng, std::size_t index, std::size_t length) const {
    PairDraw d;
    d.source = "sturmian";
    d.index = index;
    d.attempts = 1;
    const std::uint64_t u = rng(), v = rng();
    d.start = {{"phase", std::to_string(u)}, {"phase_prime", std::to_string(v)}};
    d.a = sturmian_word(u, length);
    d.b = sturmian_word(v, length);
    d.admissible = true;
    return d;
  }

  ExperimentConfig cfg_;
  std::unique_ptr<RankOneSystem> t_, s_, odo2_, odo3_;
  std::unique_ptr<GoodSets> gt_, gs_;
  std::string hash_;
};

// ------------------------------------------------------------------- sweep

struct SweepRecord {
  std::string source;
  std::size_t pair = 0;
  bool admissible = true;
  std::size_t attempts = 0;
  std::vector<std::string> labels;
  std::size_t k = 0;  // word length N
  std::size_t r = 0;
  Rational fraction;
  std::optional<Rational> hit_rate;
  std::optional<double> seconds;
};

inline Record stamp(Record rec, const std::string& hash) {
  Record out{{"config_hash", hash}, {"version", kCodeVersion}};
  for (auto& [k, v] : rec.items()) out[k] = v;
  return out;
}

inline Record to_record(const SweepRecord& s) {
  Record r{{"kind", s.admissible ? "fbar" : "skipped"}, {"source", s.source}, {"pair", s.pair}};
  if (!s.admissible) {
    r["attempts"] = s.attempts;
    return r;
  }
  r["labels"] = s.labels;
  r["k"] = s.k;
  r["r"] = s.r;
  r["fraction"] = to_fraction_string(s.fraction);
  r["decimal"] = to_decimal(s.fraction, 6);
  if (s.hit_rate) r["hit_rate"] = to_fraction_string(*s.hit_rate);
  if (s.seconds) r["seconds"] = *s.seconds;
  return r;
}

inline SweepRecord parse_sweep_record(const std::string& line) {
  try {
    auto j = Record::parse(line);
    SweepRecord s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "fbar" && kind != "skipped") throw malformed_input("not an fbar record: " + kind);
    s.source = j.at("source").get<std::string>();
    s.pair = j.at("pair").get<std::size_t>();
    s.admissible = kind == "fbar";
    if (!s.admissible) return s;
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.k = j.at("k").get<std::size_t>();
    s.r = j.at("r").get<std::size_t>();
    s.fraction = parse_rational(j.at("fraction").get<std::string>());
    if (s.fraction != fbar_value(s.r, s.k)) throw malformed_input("fraction disagrees with k and r");
    if (j.contains("hit_rate")) s.hit_rate = parse_rational(j.at("hit_rate").get<std::string>());
    return s;
  } catch (const malformed_input&) {
    throw;
  } catch (const std::exception& e) {
    throw malformed_input(std::string("bad record: ") + e.what());
  }
}

struct SweepOptions {
  bool timing = false;
  /// Called once per drawn pair (for persisting words).
  std::function<void(const PairDraw&)> on_pair;
};

/// f-bar of every sampled pair at every configured N, sources in config order.
inline std::vector<SweepRecord> fbar_sweep(const Experiment& ex, const SweepOptions& opt = {}) {
  const auto& cfg = ex.config();
  std::vector<SweepRecord> out;
  for (const auto& source : cfg.sources) {
    for (std::size_t p = 0; p < cfg.pairs; ++p) {
      PairDraw d = ex.draw(source, p, cfg.max_length());
      if (opt.on_pair) opt.on_pair(d);
      if (!d.admissible) {
        SweepRecord skip;
        skip.source = source;
        skip.pair = p;
        skip.admissible = false;
        skip.attempts = d.attempts;
        out.push_back(std::move(skip));
        continue;
      }
      for (std::size_t n : cfg.lengths) {
        const auto t0 = std::chrono::steady_clock::now();
        Symbols a(d.a.symbols.data(), n), b(d.b.symbols.data(), n);
        FbarResult f = fbar_fast(a, b);
        SweepRecord s;
        s.source = source;
        s.pair = p;
        s.attempts = d.attempts;
        s.labels = {d.label('a'), d.label('b')};
        s.k = n;
        s.r = f.r;
        s.fraction = f.value;
        if (!d.good_prefix.empty()) {
          Rational q(BigInt(static_cast<unsigned long>(d.good_prefix[n])), BigInt(static_cast<unsigned long>(n)));
          q.canonicalize();
          s.hit_rate = q;
        }
        if (opt.timing) s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

// ------------------------------------------------------------- histogram

/// Local-search variant of a matching: each move re-places one pair on some
/// other equal-symbol position between its neighbours, or drops it.
inline Matching perturb_matching(Rng& rng, Symbols a, Symbols b, const Matching& theta, std::size_t moves) {
  Matching m = theta;
  for (std::size_t mv = 0; mv < moves && !m.pairs.empty(); ++mv) {
    const std::size_t s = uniform_below(rng, static_cast<std::uint64_t>(m.size()));
    const std::size_t lo_i = s ? m.pairs[s - 1].first + 1 : 0, lo_j = s ? m.pairs[s - 1].second + 1 : 0;
    const std::size_t hi_i = s + 1 < m.size() ? m.pairs[s + 1].first : a.size();
    const std::size_t hi_j = s + 1 < m.size() ? m.pairs[s + 1].second : b.size();
    bool placed = false;
    for (int tries = 0; tries < 32 && !placed; ++tries) {
      const std::size_t i = lo_i + uniform_below(rng, static_cast<std::uint64_t>(hi_i - lo_i));
      const std::size_t j = lo_j + uniform_below(rng, static_cast<std::uint64_t>(hi_j - lo_j));
      if (a[i] == b[j]) {
        m.pairs[s] = {i, j};
        placed = true;
      }
    }
    if (!placed) m.pairs.erase(m.pairs.begin() + static_cast<std::ptrdiff_t>(s));
  }
  return m;
}

struct AtkHistogram {
  std::size_t pair = 0;
  std::string matching;  // "optimal" or "perturbed-<i>"
  std::size_t N = 0;
  std::size_t matched = 0;
  AThetaResult parts;
  std::size_t k_floor = 0;  // ceil(n0 / 2): smallest k reported

  /// |A^k| <= N / k^2, i.e. |A^k| k^2 <= N.
  bool within_bound(std::size_t k) const { return parts.size(k) * k * k <= N; }
  std::size_t below_floor() const {
    std::size_t c = 0;
    for (const auto& [k, v] : parts.sets)
      if (2 * k < parts.n0) c += v.size();
    return c;
  }
  std::size_t k_max() const { return parts.sets.empty() ? k_floor : std::max(k_floor, parts.sets.rbegin()->first); }
};

inline std::vector<AtkHistogram> atk_histograms(const Experiment& ex, std::size_t pair) {
  const auto& cfg = ex.config();
  const std::size_t len = cfg.atk_length;
  PairDraw d = ex.draw("constructed", pair, len);
  std::vector<AtkHistogram> out;
  if (!d.admissible) return out;
  Rng rng = ex.stream("constructed", pair);
  auto starts = ex.sample_starts(rng, d.attempts);  // replays the draw exactly
  const auto& T = ex.system_t();
  const auto& S = ex.system_s();
  ProductOrbit first = product_orbit(T, S, starts->x, starts->y, len);
  ProductOrbit second = product_orbit(T, S, starts->xp, starts->yp, len);
  Symbols a(d.a.symbols), b(d.b.symbols);
  Matching opt = lcs_matching(a, b);
  Rng prng = make_stream(cfg.seed ^ fnv1a64("perturb"), pair);
  for (std::size_t v = 0; v <= cfg.perturbations; ++v) {
    Matching m = v == 0 ? opt : perturb_matching(prng, a, b, opt, opt.size() / 4 + 1);
    AtkHistogram h;
    h.pair = pair;
    h.matching = v == 0 ? "optimal" : "perturbed-" + std::to_string(v);
    h.N = len;
    h.matched = m.size();
    h.parts = a_theta_partition(ex.good_t(), ex.good_s(), first, second, m, cfg.n0);
    h.k_floor = (cfg.n0 + 1) / 2;
    out.push_back(std::move(h));
  }
  return out;
}

/// One summary record and one record per k in [ceil(n0/2), k_max].
inline std::vector<Record> to_records(const AtkHistogram& h) {
  std::vector<Record> out;
  out.push_back(Record{{"kind", "atk-summary"},
                       {"pair", h.pair},
                       {"matching", h.matching},
                       {"N", h.N},
                       {"matched", h.matched},
                       {"good", h.parts.good.size()},
                       {"scaled", h.parts.total()},
                       {"undecidable", h.parts.undecidable.size()},
                       {"level_mismatch", h.parts.level_mismatch.size()},
                       {"below_floor", h.below_floor()}});
  for (std::size_t k = h.k_floor; k <= h.k_max(); ++k) {
    const BigInt bound_num(static_cast<unsigned long>(h.N));
    const Rational bound(bound_num, BigInt(static_cast<unsigned long>(k * k)));
    out.push_back(Record{{"kind", "atk"},
                         {"pair", h.pair},
                         {"matching", h.matching},
                         {"N", h.N},
                         {"k", k},
                         {"size", h.parts.size(k)},
                         {"bound", to_fraction_string(bound)},
                         {"within_bound", h.within_bound(k)}});
  }
  return out;
}

// ----------------------------------------------------------------- report

struct SummaryRow {
  std::string source;
  std::size_t N = 0;
  std::size_t count = 0;
  Rational median, min, max;
};

inline Rational exact_median(std::vector<Rational> v) {
  if (v.empty()) throw domain_error("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

/// Rows ordered by first appearance of the source, then by N.
inline std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records) {
  std::vector<std::string> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<Rational>> groups;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.source) == order.end()) order.push_back(r.source);
    if (r.admissible) groups[{r.source, r.k}].push_back(r.fraction);
  }
  std::vector<SummaryRow> rows;
  for (const auto& src : order)
    for (const auto& [key, vals] : groups) {
      if (key.first != src) continue;
      SummaryRow row{src, key.second, vals.size(), exact_median(vals), *std::min_element(vals.begin(), vals.end()),
                     *std::max_element(vals.begin(), vals.end())};
      rows.push_back(std::move(row));
    }
  return rows;
}

struct DirectionalCheck {
  bool above_baselines = true;     // constructed median > every baseline median at every N
  bool baselines_monotone = true;  // each baseline median non-increasing in N
  std::vector<std::string> failures;
  bool ok() const { return above_baselines && baselines_monotone; }
};

inline DirectionalCheck directional_check(const std::vector<SummaryRow>& rows, const std::string& subject = "constructed") {
  DirectionalCheck c;
  std::map<std::size_t, Rational> mine;
  std::map<std::string, std::vector<const SummaryRow*>> base;
  for (const auto& r : rows) {
    if (r.source == subject) mine[r.N] = r.median;
    else base[r.source].push_back(&r);
  }
  if (mine.empty() || base.empty()) {
    c.above_baselines = false;
    c.failures.push_back("need the subject and at least one baseline");
    return c;
  }
  for (const auto& [src, rs] : base) {
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const auto& r = *rs[i];
      auto it = mine.find(r.N);
      if (it == mine.end() || !(it->second > r.median)) {
        c.above_baselines = false;
        c.failures.push_back(subject + " median not above " + src + " at N=" + std::to_string(r.N));
      }
      if (i > 0 && r.median > rs[i - 1]->median) {
        c.baselines_monotone = false;
        c.failures.push_back(src + " median increases at N=" + std::to_string(r.N));
      }
    }
  }
  return c;
}

inline std::string summary_tsv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "source\tN\tpairs\tmedian\tmin\tmax\tmedian_fraction\n";
  for (const auto& r : rows)
    os << r.source << '\t' << r.N << '\t' << r.count << '\t' << to_decimal(r.median, 6) << '\t'
       << to_decimal(r.min, 6) << '\t' << to_decimal(r.max, 6) << '\t' << to_fraction_string(r.median) << '\n';
  return os.str();
}

inline const char* plot_script() {
  return R"PY(#!/usr/bin/env python3
"""Median and minimum f-bar against word length, read from summary.tsv."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
table = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "summary.tsv")
series = {}
with open(table, newline="") as fh:
    for row in csv.DictReader(fh, delimiter="\t"):
        s = series.setdefault(row["source"], {"N": [], "median": [], "min": []})
        s["N"].append(int(row["N"]))
        s["median"].append(float(row["median"]))
        s["min"].append(float(row["min"]))

fig, ax = plt.subplots(figsize=(6, 4))
for name, s in series.items():
    line, = ax.plot(s["N"], s["median"], marker="o", label=name + " median")
    ax.plot(s["N"], s["min"], ls=":", color=line.get_color(), label=name + " min")
ax.axhline(0.01, color="black", ls="--", lw=1, label="1/100")
ax.set_xscale("log")
ax.set_xlabel("N")
ax.set_ylabel("f-bar")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(here, "fbar.png"), dpi=120)
)PY";
}

}  // namespace cutstack

#endif  // CUTSTACK_EXPERIMENT_HPP
