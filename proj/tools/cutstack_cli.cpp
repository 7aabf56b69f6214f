// cutstack: command-line front end.
//
// Exit codes: 0 success, 2 a check or construction failed, 3 malformed input
// (bad files, bad parameters). Errors go to stderr as one JSON record.

#include "cutstack/cutstack.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cutstack;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kCheckFailed = 2, kMalformed = 3 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_stage;
  std::string out_dir;
  std::string format = "text";
};

// ------------------------------------------------------------- output

std::string text_value(const Record& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + text_value(v[i]);
    return s;
  }
  return v.dump();
}

/// Records in JSON lines, or "kind key=value ..." in text mode.
class Emitter {
 public:
  Emitter(const Globals& g, std::string hash) : records_(g.format == "records"), hash_(std::move(hash)) {}

  void operator()(const Record& r) const {
    if (records_) {
      std::cout << stamp(r, hash_).dump() << '\n';
      return;
    }
    std::string line;
    for (const auto& [k, v] : r.items()) {
      if (k == "kind") line = text_value(v) + line;
      else line += " " + k + "=" + text_value(v);
    }
    std::cout << line << '\n';
  }
  bool records() const { return records_; }
  const std::string& hash() const { return hash_; }

 private:
  bool records_;
  std::string hash_;
};

std::string input_hash(const std::string& command, const std::vector<std::string>& parts) {
  std::string s = command;
  for (const auto& p : parts) s += '\n' + p;
  return hex64(fnv1a64(s));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw malformed_input("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw malformed_input("cannot write " + path);
  out << text;
}

RankOneSpec read_spec(const std::string& path, const Globals& g) { return load_spec(path, g.max_stage); }

bool is_binary_word(const std::string& path) { return fs::path(path).extension() == ".bin"; }

SymbolWord read_word(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw malformed_input("cannot open word file " + path);
  return is_binary_word(path) ? read_word_binary(in) : read_word_text(in);
}

void write_word(const std::string& path, const SymbolWord& w) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw malformed_input("cannot write " + path);
  if (is_binary_word(path)) write_word_binary(out, w);
  else write_word_text(out, w);
}

Rational rational_arg(const std::string& s, const char* name) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    throw malformed_input(std::string("--") + name + " expects a rational, got '" + s + "'");
  }
}

std::string str(const BigInt& v) { return v.get_str(); }
std::string frac(const Rational& q) { return to_fraction_string(q); }

// ---------------------------------------------------------- parameters

struct ClassArgs {
  std::string gamma = "21/100";
  std::string gamma_prime = "3/10";
  std::size_t n_prime = 7;
  std::string eta = "1/128";

  void attach(CLI::App* app, bool partner) {
    app->add_option("--gamma", gamma, "class exponent gamma")->capture_default_str();
    app->add_option("--gamma-prime", gamma_prime, "class exponent gamma'")->capture_default_str();
    if (partner) {
      app->add_option("--n-prime", n_prime, "stage from which T is in its class")->capture_default_str();
      app->add_option("--eta", eta, "slack in the slow exponent")->capture_default_str();
    }
  }
  PartnerParams partner() const {
    PartnerParams p{rational_arg(gamma, "gamma"), rational_arg(gamma_prime, "gamma-prime"), n_prime,
                    rational_arg(eta, "eta")};
    p.validate();
    return p;
  }
  std::vector<std::string> parts() const { return {gamma, gamma_prime, std::to_string(n_prime), eta}; }
};

// ------------------------------------------------------------ commands

int cmd_build_spec(const Globals& g, const std::string& from, const std::string& label, const std::string& cuts,
                   bool power, const ClassArgs& ca, const std::string& choice, std::size_t depth,
                   const std::string& spacers, const std::string& out) {
  RankOneSpec spec;
  auto rule = [&] {
    if (spacers == "staircase") return SpacerRule::staircase();
    if (spacers == "none") return SpacerRule::none();
    throw malformed_input("--spacers must be staircase or none");
  };
  if (!from.empty()) {
    spec = read_spec(from, g);
  } else if (!cuts.empty()) {
    std::vector<BigInt> cv;
    for (const auto& w : detail::words(cuts)) cv.push_back(parse_bigint(w));
    spec = make_spec(label, cv, rule());
  } else if (power) {
    PowerWindowRule r{rational_arg(ca.gamma, "gamma"), rational_arg(ca.gamma_prime, "gamma-prime"),
                      CutChoice::min, g.seed.value_or(0), {}};
    if (choice == "mid") r.choice = CutChoice::mid;
    else if (choice == "uniform") r.choice = CutChoice::uniform;
    else if (choice != "min") throw malformed_input("--choice must be min, mid or uniform");
    spec = build_power_window(label, g.max_stage.value_or(depth), r, rule());
  } else {
    throw malformed_input("build-spec needs --from, --cuts or --power-window");
  }
  const std::string text = serialize_spec(spec);
  if (out.empty()) {
    std::cout << text;
    return kOk;
  }
  write_file(out, text);
  Emitter emit(g, hex64(fnv1a64(text)));
  emit(Record{{"kind", "spec"}, {"path", out}, {"label", spec.label}, {"max_stage", spec.max_stage()}});
  return kOk;
}

int cmd_stats(const Globals& g, const std::string& path) {
  auto spec = read_spec(path, g);
  auto st = compute_stats(spec);
  Emitter emit(g, input_hash("stats", {serialize_spec(spec)}));
  for (std::size_t n = 1; n <= spec.max_stage(); ++n)
    emit(Record{{"kind", "stage"},
                {"n", n},
                {"cut", str(spec.cut(n))},
                {"spacers", spacer_text(spec.spacers(n))},
                {"height", str(st.height(n))},
                {"eps", frac(st.eps[n - 1])}});
  emit(Record{{"kind", "stats"},
              {"label", spec.label},
              {"max_stage", spec.max_stage()},
              {"top_height", str(st.height(st.top_stage()))},
              {"k_bound", frac(st.k_bound)},
              {"k_bound_decimal", to_decimal(st.k_bound, 6)},
              {"spacer_mass", frac(st.spacer_mass)}});
  return kOk;
}

int cmd_classify(const Globals& g, const std::string& path, const ClassArgs& ca, std::size_t from) {
  auto spec = read_spec(path, g);
  ClassParams cp{rational_arg(ca.gamma, "gamma"), rational_arg(ca.gamma_prime, "gamma-prime"), from};
  auto rep = classify(spec, cp);
  Emitter emit(g, input_hash("classify", {serialize_spec(spec), ca.gamma, ca.gamma_prime, std::to_string(from)}));
  for (const auto& s : rep.stages)
    emit(Record{{"kind", "class-stage"},
                {"n", s.stage},
                {"cut_in_window", s.cut_in_window},
                {"spacers_increasing", s.spacers_increasing},
                {"top_spacer_bounded", s.top_spacer_bounded}});
  Record v{{"kind", "class"}, {"label", spec.label}, {"verdict", rep.verdict}, {"tail_start", rep.tail_start}};
  if (rep.first_failure) v["first_failure"] = *rep.first_failure;
  emit(v);
  return rep.verdict ? kOk : kCheckFailed;
}

int cmd_construct_partner(const Globals& g, const std::string& path, const ClassArgs& ca, const std::string& out,
                          const std::string& trace_path) {
  auto t = read_spec(path, g);
  auto params = ca.partner();
  auto parts = ca.parts();
  parts.insert(parts.begin(), serialize_spec(t));
  Emitter emit(g, input_hash("construct-partner", parts));
  auto res = construct_partner(t, params);
  const std::string text = serialize_spec(res.spec);
  if (out.empty()) std::cout << text;
  else write_file(out, text);
  if (!trace_path.empty()) write_file(trace_path, serialize_trace(res.trace));
  if (!out.empty())
    emit(Record{{"kind", "partner"},
                {"path", out},
                {"label", res.spec.label},
                {"max_stage", res.spec.max_stage()},
                {"windows", res.trace.windows.size()},
                {"k_t", frac(res.trace.k_t)}});
  return kOk;
}

Record alternation_record(const char* name, const AlternationReport& r) {
  Record rec{{"kind", "alternation"},  {"direction", name},         {"delta", frac(r.delta)},
             {"from", r.n0},           {"verdict", r.verdict},      {"decided", r.decided},
             {"undecidable", r.undecidable}, {"tail_start", r.tail_start}};
  if (r.first_failure) rec["first_failure"] = *r.first_failure;
  return rec;
}

int cmd_verify_partner(const Globals& g, const std::string& tp, const std::string& sp, const ClassArgs& ca,
                       std::size_t threshold, std::size_t alt_start) {
  auto t = read_spec(tp, g);
  auto s = read_spec(sp, g);
  auto params = ca.partner();
  auto parts = ca.parts();
  parts.insert(parts.begin(), {serialize_spec(t), serialize_spec(s), std::to_string(threshold), std::to_string(alt_start)});
  Emitter emit(g, input_hash("verify-partner", parts));
  auto v = verify_partner(t, s, params, VerifyOptions{threshold, alt_start});
  for (const auto& c : v.stages)
    emit(Record{{"kind", "partner-stage"}, {"n", c.stage}, {"p_window", c.p_window}, {"in_class", c.membership.ok()}});
  emit(alternation_record("s_wrt_t", v.alternation.b_wrt_a));
  emit(alternation_record("t_wrt_s", v.alternation.a_wrt_b));
  Record rec{{"kind", "verify-partner"},
             {"threshold", v.threshold},
             {"alternation_start", v.alternation_start},
             {"staircase_form", v.staircase_form},
             {"p_window", v.p_window_ok},
             {"class_s", v.class_s.verdict},
             {"class_t", v.class_t.verdict},
             {"alternation", v.alternation_ok},
             {"in_l", v.in_l},
             {"ok", v.ok()}};
  if (v.staircase_failure) rec["staircase_failure"] = *v.staircase_failure;
  emit(rec);
  return v.ok() ? kOk : kCheckFailed;
}

int cmd_chain_check(const Globals& g, const std::string& tp, const std::string& sp, const ClassArgs& ca,
                    std::size_t from) {
  auto t = read_spec(tp, g);
  auto s = read_spec(sp, g);
  auto params = ca.partner();
  auto parts = ca.parts();
  parts.insert(parts.begin(), {serialize_spec(t), serialize_spec(s), std::to_string(from)});
  Emitter emit(g, input_hash("chain-check", parts));
  auto r = intermediate_chain_check(t, s, params, from);
  for (const auto& e : r.left) emit(Record{{"kind", "chain"}, {"side", "left"}, {"n", e.n}, {"holds", e.holds}});
  for (const auto& e : r.right) emit(Record{{"kind", "chain"}, {"side", "right"}, {"n", e.n}, {"holds", e.holds}});
  emit(Record{{"kind", "chain-check"},
              {"from", r.from},
              {"left", ChainReport::all(r.left)},
              {"right", ChainReport::all(r.right)},
              {"height_bound_tail", r.height_bound_tail},
              {"ok", r.ok()}});
  return r.ok() ? kOk : kCheckFailed;
}

int cmd_sample(const Globals& g, const std::string& path, std::size_t count, std::size_t stage, std::size_t f_samples,
               const ClassArgs& ca) {
  auto spec = read_spec(path, g);
  RankOneSystem sys(spec);
  const std::uint64_t seed = g.seed.value_or(1);
  Emitter emit(g, input_hash("sample", {serialize_spec(spec), std::to_string(seed), std::to_string(count),
                                        std::to_string(stage), std::to_string(f_samples), ca.gamma, ca.gamma_prime}));
  Rng rng(splitmix64(seed));
  const std::size_t n = stage ? stage : sys.top_stage();
  if (n > sys.top_stage()) throw domain_error("--stage beyond the top tower");
  for (std::size_t i = 0; i < count; ++i) {
    auto x = sample_state_in_tower(sys, n, rng);
    std::vector<std::string> cols;
    for (const auto& c : x.columns) cols.push_back(str(c));
    emit(Record{{"kind", "point"}, {"index", i}, {"top_level", str(*level_in_tower(sys, x, sys.top_stage()))},
                {"columns", cols}});
  }
  if (f_samples) {
    GoodSets gs(sys, GoodSetParams{rational_arg(ca.gamma, "gamma"), rational_arg(ca.gamma_prime, "gamma-prime")});
    for (const auto& e : estimate_F_measures(gs, f_samples, rng)) {
      const double floor_n = 1.0 - 4.0 / static_cast<double>(e.stage * e.stage);
      emit(Record{{"kind", "f-measure"}, {"n", e.stage}, {"samples", e.samples}, {"hits", e.hits},
                  {"mean", e.mean()}, {"sigma", e.sigma()}, {"floor", floor_n}, {"stage_empty", gs.stage_empty(e.stage)}});
    }
  }
  return kOk;
}

int cmd_code(const Globals& g, const std::string& path, const std::string& partner, std::size_t n0, std::size_t length,
             const std::string& start, const std::string& start_s, const std::string& out) {
  auto spec = read_spec(path, g);
  RankOneSystem sys(spec);
  Rng rng(splitmix64(g.seed.value_or(1)));
  auto point = [&](const RankOneSystem& s, const std::string& lv) {
    if (lv.empty()) return sample_state(s, rng);
    BigInt l = parse_bigint(lv);
    if (sgn(l) < 0 || l >= s.height(s.top_stage())) throw domain_error("start level outside the top tower");
    return state_from_level(s, l);
  };
  SymbolWord w;
  if (partner.empty()) {
    w = code_orbit(sys, point(sys, start), n0, length);
  } else {
    RankOneSystem ssys(read_spec(partner, g));
    auto x = point(sys, start);
    auto y = point(ssys, start_s);
    w = code_product_orbit(sys, ssys, x, y, n0, length);
  }
  if (out.empty()) {
    write_word_text(std::cout, w);
    return kOk;
  }
  write_word(out, w);
  Emitter emit(g, input_hash("code", {serialize_spec(spec), partner, std::to_string(n0), std::to_string(length), start,
                                      start_s, std::to_string(g.seed.value_or(1))}));
  emit(Record{{"kind", "word"}, {"path", out}, {"length", w.size()}, {"alphabet", w.alphabet_size()}});
  return kOk;
}

Record fbar_record(const std::string& la, const std::string& lb, const SymbolWord& a, const SymbolWord& b,
                   const std::string& kernel, long band) {
  if (a.size() != b.size()) throw domain_error("words " + la + " and " + lb + " differ in length");
  Record r{{"kind", "fbar"}, {"labels", {la, lb}}, {"k", a.size()}};
  if (kernel == "bounds") {
    auto fb = fbar_bounds(a.symbols, b.symbols, band);
    r["banded_r"] = fb.banded_r;
    r["lower"] = frac(fb.lower);
    r["upper"] = frac(fb.upper);
    r["exact"] = fb.exact;
    return r;
  }
  FbarResult f = kernel == "exact" ? fbar_exact(a.symbols, b.symbols, false) : fbar_fast(a.symbols, b.symbols);
  r["r"] = f.r;
  r["fraction"] = frac(f.value);
  r["decimal"] = to_decimal(f.value, 6);
  return r;
}

int cmd_fbar(const Globals& g, const std::vector<std::string>& words_in, const std::string& manifest,
             const std::string& kernel, long band) {
  if (kernel != "exact" && kernel != "fast" && kernel != "bounds")
    throw malformed_input("--kernel must be exact, fast or bounds");
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!manifest.empty()) {
    const fs::path base = fs::path(manifest).parent_path();
    std::istringstream is(read_file(manifest));
    std::string line;
    std::size_t no = 0;
    while (std::getline(is, line)) {
      ++no;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      auto w = detail::words(line);
      if (w.empty()) continue;
      if (w.size() != 2) throw malformed_input("manifest line " + std::to_string(no) + ": expected two word files");
      auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
      pairs.emplace_back(resolve(w[0]), resolve(w[1]));
    }
  } else if (words_in.size() == 2) {
    pairs.emplace_back(words_in[0], words_in[1]);
  } else {
    throw malformed_input("fbar needs two word files or --manifest");
  }
  std::vector<std::string> parts{kernel, std::to_string(band)};
  std::vector<std::pair<SymbolWord, SymbolWord>> loaded;
  for (const auto& [a, b] : pairs) {
    loaded.emplace_back(read_word(a), read_word(b));
    parts.push_back(read_file(a));
    parts.push_back(read_file(b));
  }
  Emitter emit(g, input_hash("fbar", parts));
  for (std::size_t i = 0; i < pairs.size(); ++i)
    emit(fbar_record(pairs[i].first, pairs[i].second, loaded[i].first, loaded[i].second, kernel, band));
  return kOk;
}

ExperimentConfig config_with_overrides(const std::string& path, const Globals& g) {
  auto c = load_config(path);
  if (g.seed) c.seed = *g.seed;
  if (g.max_stage) c.max_stage = *g.max_stage;
  c.out_dir = g.out_dir.empty() ? c.resolve(c.out_dir) : g.out_dir;
  c.validate();
  return c;
}

int cmd_fbar_sweep(const Globals& g, const std::string& config, bool persist, bool timing) {
  Experiment ex(config_with_overrides(config, g));
  const auto& cfg = ex.config();
  fs::create_directories(cfg.out_dir);
  SweepOptions opt;
  opt.timing = timing;
  if (persist)
    opt.on_pair = [&](const PairDraw& d) {
      if (!d.admissible) return;
      const std::string stem = (fs::path(cfg.out_dir) / "words" / (d.source + "_" + std::to_string(d.index))).string();
      write_word(stem + "_a.bin", d.a);
      write_word(stem + "_b.bin", d.b);
    };
  auto recs = fbar_sweep(ex, opt);
  std::ostringstream lines;
  for (const auto& r : recs) lines << stamp(to_record(r), ex.config_hash()).dump() << '\n';
  write_file((fs::path(cfg.out_dir) / "records.jsonl").string(), lines.str());
  write_file((fs::path(cfg.out_dir) / "config.canonical").string(), cfg.canonical());
  if (persist) {
    std::ostringstream man;
    for (const auto& src : cfg.sources)
      for (std::size_t p = 0; p < cfg.pairs; ++p)
        if (fs::exists(fs::path(cfg.out_dir) / "words" / (src + "_" + std::to_string(p) + "_a.bin")))
          man << "words/" << src << '_' << p << "_a.bin words/" << src << '_' << p << "_b.bin\n";
    write_file((fs::path(cfg.out_dir) / "words.manifest").string(), man.str());
  }
  Emitter emit(g, ex.config_hash());
  if (emit.records()) {
    std::cout << lines.str();
  } else {
    std::cout << summary_tsv(summarize(recs));
  }
  std::size_t skipped = 0;
  for (const auto& r : recs) skipped += !r.admissible;
  if (skipped) std::cerr << Record{{"kind", "warning"}, {"skipped_pairs", skipped}}.dump() << '\n';
  return kOk;
}

int cmd_atk(const Globals& g, const std::string& config, std::size_t pairs) {
  Experiment ex(config_with_overrides(config, g));
  const auto& cfg = ex.config();
  fs::create_directories(cfg.out_dir);
  Emitter emit(g, ex.config_hash());
  std::ostringstream lines;
  const std::size_t np = pairs ? pairs : cfg.pairs;
  for (std::size_t p = 0; p < np; ++p) {
    auto hs = atk_histograms(ex, p);
    if (hs.empty()) {
      Record skip{{"kind", "skipped"}, {"pair", p}};
      lines << stamp(skip, ex.config_hash()).dump() << '\n';
      emit(skip);
      continue;
    }
    for (const auto& h : hs)
      for (const auto& r : to_records(h)) {
        lines << stamp(r, ex.config_hash()).dump() << '\n';
        emit(r);
      }
  }
  write_file((fs::path(cfg.out_dir) / "atk.jsonl").string(), lines.str());
  return kOk;
}

int cmd_probe(const Globals& g, const std::string& path, std::size_t stage, const std::string& xi, const ClassArgs& ca,
              std::size_t n1, std::size_t n3, std::size_t pairs, std::size_t checks) {
  auto spec = read_spec(path, g);
  RankOneSystem sys(spec);
  GoodSets gs(sys, GoodSetParams{rational_arg(ca.gamma, "gamma"), rational_arg(ca.gamma_prime, "gamma-prime"), n1, n3});
  const std::uint64_t seed = g.seed.value_or(1);
  Rng rng(splitmix64(seed));
  auto rep = lemma_separation_probe(gs, stage, rational_arg(xi, "xi"), pairs, checks, rng);
  Emitter emit(g, input_hash("probe-lemmas", {serialize_spec(spec), std::to_string(stage), xi, ca.gamma, ca.gamma_prime,
                                              std::to_string(n1), std::to_string(n3), std::to_string(pairs),
                                              std::to_string(checks), std::to_string(seed)}));
  bool failed = false;
  for (const auto& l : rep.lemmas) {
    Record wit = Record::array();
    for (const auto& w : l.violations)
      wit.push_back(Record{{"x_level", str(w.x_level)}, {"xp_level", str(w.xp_level)}, {"i", str(w.i)}, {"j", str(w.j)}});
    emit(Record{{"kind", "probe"},
                {"name", l.name},
                {"n", rep.n},
                {"at_scale", l.at_scale},
                {"pairs", l.pairs},
                {"checks", l.checks},
                {"escaped", l.escaped},
                {"violations", l.violation_count},
                {"inconclusive", l.inconclusive()},
                {"witnesses", wit}});
    failed = failed || (l.at_scale && l.violation_count > 0);
  }
  return failed ? kCheckFailed : kOk;
}

void error_record(int code, const std::string& type, const std::string& msg, Record extra = Record::object()) {
  Record r{{"kind", "error"}, {"code", code}, {"type", type}, {"message", msg}, {"version", kCodeVersion}};
  for (auto& [k, v] : extra.items()) r[k] = v;
  std::cerr << r.dump() << '\n';
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs, bool strict) {
  std::vector<SweepRecord> recs;
  std::vector<std::string> parts;
  for (const auto& path : inputs) {
    const std::string text = read_file(path);
    parts.push_back(text);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto j = Record::parse(line, nullptr, false);
      if (j.is_discarded()) throw malformed_input("report: " + path + " is not line-delimited JSON");
      const std::string kind = j.value("kind", "");
      if (kind == "fbar" || kind == "skipped") recs.push_back(parse_sweep_record(line));
    }
  }
  auto rows = summarize(recs);
  if (rows.empty()) {
    error_record(kCheckFailed, "empty_results", "report: no f-bar results");
    return kCheckFailed;
  }
  const std::string dir = g.out_dir.empty() ? "." : g.out_dir;
  fs::create_directories(dir);
  const std::string tsv = summary_tsv(rows);
  write_file((fs::path(dir) / "summary.tsv").string(), tsv);
  write_file((fs::path(dir) / "plot_fbar.py").string(), plot_script());
  Emitter emit(g, input_hash("report", parts));
  auto dc = directional_check(rows);
  if (emit.records()) {
    for (const auto& r : rows)
      emit(Record{{"kind", "summary"},
                  {"source", r.source},
                  {"N", r.N},
                  {"pairs", r.count},
                  {"median", frac(r.median)},
                  {"median_decimal", to_decimal(r.median, 6)},
                  {"min", frac(r.min)},
                  {"min_decimal", to_decimal(r.min, 6)},
                  {"max", frac(r.max)}});
  } else {
    std::cout << tsv;
  }
  emit(Record{{"kind", "directional"},
              {"above_baselines", dc.above_baselines},
              {"baselines_monotone", dc.baselines_monotone},
              {"threshold", "1/100"},
              {"failures", dc.failures}});
  return strict && !dc.ok() ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-one towers, partner construction and f-bar experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kCodeVersion);
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--max-stage", g.max_stage, "truncate specs at this stage");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--format", g.format, "text or records")->check(CLI::IsMember({"text", "records"}));

  int rc = kOk;

  // build-spec
  std::string bs_from, bs_label = "T", bs_cuts, bs_choice = "mid", bs_spacers = "staircase", bs_out;
  bool bs_power = false;
  std::size_t bs_depth = 20;
  ClassArgs bs_ca;
  auto* bs = app.add_subcommand("build-spec", "write a canonical spec file");
  bs->add_option("--from", bs_from, "spec file (rule form accepted)");
  bs->add_option("--label", bs_label)->capture_default_str();
  bs->add_option("--cuts", bs_cuts, "explicit cut list, e.g. \"2 3 4\"");
  bs->add_flag("--power-window", bs_power, "choose cuts inside [h^gamma, h^gamma')");
  bs->add_option("--choice", bs_choice, "min, mid or uniform")->capture_default_str();
  bs->add_option("--depth", bs_depth)->capture_default_str();
  bs->add_option("--spacers", bs_spacers, "staircase or none")->capture_default_str();
  bs->add_option("-o,--output", bs_out);
  bs_ca.attach(bs, false);
  bs->callback([&] {
    rc = cmd_build_spec(g, bs_from, bs_label, bs_cuts, bs_power, bs_ca, bs_choice, bs_depth, bs_spacers, bs_out);
  });

  std::string st_spec;
  auto* st = app.add_subcommand("stats", "heights and spacer mass");
  st->add_option("spec", st_spec)->required();
  st->callback([&] { rc = cmd_stats(g, st_spec); });

  std::string cl_spec;
  std::size_t cl_from = 1;
  ClassArgs cl_ca;
  auto* cl = app.add_subcommand("classify", "stagewise class membership");
  cl->add_option("spec", cl_spec)->required();
  cl->add_option("--from", cl_from, "first stage checked")->capture_default_str();
  cl_ca.attach(cl, false);
  cl->callback([&] { rc = cmd_classify(g, cl_spec, cl_ca, cl_from); });

  std::string cp_spec, cp_out, cp_trace;
  ClassArgs cp_ca;
  auto* cp = app.add_subcommand("construct-partner", "build the alternating staircase partner");
  cp->add_option("spec", cp_spec)->required();
  cp->add_option("-o,--output", cp_out);
  cp->add_option("--trace", cp_trace, "write the window trace here");
  cp_ca.attach(cp, true);
  cp->callback([&] { rc = cmd_construct_partner(g, cp_spec, cp_ca, cp_out, cp_trace); });

  std::string vp_t, vp_s;
  std::size_t vp_threshold = 0, vp_alt = 0;
  ClassArgs vp_ca;
  auto* vp = app.add_subcommand("verify-partner", "check a partner against T");
  vp->add_option("t_spec", vp_t)->required();
  vp->add_option("s_spec", vp_s)->required();
  vp->add_option("--threshold", vp_threshold, "first stage checked (0: n'+3)")->capture_default_str();
  vp->add_option("--alternation-start", vp_alt, "first alternation index (0: threshold)")->capture_default_str();
  vp_ca.attach(vp, true);
  vp->callback([&] { rc = cmd_verify_partner(g, vp_t, vp_s, vp_ca, vp_threshold, vp_alt); });

  std::string cc_t, cc_s;
  std::size_t cc_from = 0;
  ClassArgs cc_ca;
  auto* cc = app.add_subcommand("chain-check", "cut-product inequalities between T and S");
  cc->add_option("t_spec", cc_t)->required();
  cc->add_option("s_spec", cc_s)->required();
  cc->add_option("--from", cc_from, "first index (0: n'+3)")->capture_default_str();
  cc_ca.attach(cc, true);
  cc->callback([&] { rc = cmd_chain_check(g, cc_t, cc_s, cc_ca, cc_from); });

  std::string sa_spec;
  std::size_t sa_count = 10, sa_stage = 0, sa_f = 0;
  ClassArgs sa_ca;
  auto* sa = app.add_subcommand("sample", "sample points, optionally estimate mu(F_n)");
  sa->add_option("spec", sa_spec)->required();
  sa->add_option("--count", sa_count)->capture_default_str();
  sa->add_option("--stage", sa_stage, "sample inside T_n (0: top tower)")->capture_default_str();
  sa->add_option("--f-measure", sa_f, "Monte Carlo samples for mu(F_n), 0 to skip")->capture_default_str();
  sa_ca.attach(sa, false);
  sa->callback([&] { rc = cmd_sample(g, sa_spec, sa_count, sa_stage, sa_f, sa_ca); });

  std::string co_spec, co_partner, co_start, co_start_s, co_out;
  std::size_t co_n0 = 3, co_len = 1000;
  auto* co = app.add_subcommand("code", "write the coded orbit of a point (or a product point)");
  co->add_option("spec", co_spec)->required();
  co->add_option("--partner", co_partner, "second factor spec for a product word");
  co->add_option("--n0", co_n0, "partition stage")->capture_default_str();
  co->add_option("--length", co_len)->capture_default_str();
  co->add_option("--start", co_start, "top-tower level of the start (default: sampled)");
  co->add_option("--start-s", co_start_s, "top-tower level in the partner");
  co->add_option("-o,--output", co_out, "word file; .bin selects the packed form");
  co->callback([&] { rc = cmd_code(g, co_spec, co_partner, co_n0, co_len, co_start, co_start_s, co_out); });

  std::vector<std::string> fb_words;
  std::string fb_manifest, fb_kernel = "fast";
  long fb_band = 64;
  auto* fb = app.add_subcommand("fbar", "f-bar distance of word pairs");
  fb->add_option("words", fb_words, "two word files");
  fb->add_option("--manifest", fb_manifest, "file with one pair of word paths per line");
  fb->add_option("--kernel", fb_kernel, "exact, fast or bounds")->capture_default_str();
  fb->add_option("--band", fb_band, "band for --kernel bounds")->capture_default_str();
  fb->callback([&] { rc = cmd_fbar(g, fb_words, fb_manifest, fb_kernel, fb_band); });

  std::string sw_config;
  bool sw_persist = false, sw_timing = false;
  auto* sw = app.add_subcommand("fbar-sweep", "f-bar of sampled pairs over the configured lengths");
  sw->add_option("config", sw_config)->required();
  sw->add_flag("--persist-words", sw_persist, "write each pair's words under out-dir/words");
  sw->add_flag("--timing", sw_timing, "add wall time to records (breaks byte stability)");
  sw->callback([&] { rc = cmd_fbar_sweep(g, sw_config, sw_persist, sw_timing); });

  std::string ah_config;
  std::size_t ah_pairs = 0;
  auto* ah = app.add_subcommand("atk-histogram", "distance-scale histogram of optimal and perturbed matchings");
  ah->add_option("config", ah_config)->required();
  ah->add_option("--pairs", ah_pairs, "pairs to analyse (0: config value)")->capture_default_str();
  ah->callback([&] { rc = cmd_atk(g, ah_config, ah_pairs); });

  std::string pl_spec, pl_xi = "1/8";
  std::size_t pl_stage = 4, pl_n1 = 10, pl_n3 = 10, pl_pairs = 200, pl_checks = 64;
  ClassArgs pl_ca;
  auto* pl = app.add_subcommand("probe-lemmas", "sample the separation inequalities at one stage");
  pl->add_option("spec", pl_spec)->required();
  pl->add_option("--stage", pl_stage)->capture_default_str();
  pl->add_option("--xi", pl_xi)->capture_default_str();
  pl->add_option("--n1", pl_n1)->capture_default_str();
  pl->add_option("--n3", pl_n3)->capture_default_str();
  pl->add_option("--pairs", pl_pairs)->capture_default_str();
  pl->add_option("--checks", pl_checks, "iterate checks per pair")->capture_default_str();
  pl_ca.attach(pl, false);
  pl->callback([&] { rc = cmd_probe(g, pl_spec, pl_stage, pl_xi, pl_ca, pl_n1, pl_n3, pl_pairs, pl_checks); });

  std::vector<std::string> rp_inputs;
  bool rp_strict = false;
  auto* rp = app.add_subcommand("report", "summary table and plot script from sweep records");
  rp->add_option("records", rp_inputs)->required();
  rp->add_flag("--strict", rp_strict, "exit 2 when the directional check fails");
  rp->callback([&] { rc = cmd_report(g, rp_inputs, rp_strict); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record(kMalformed, "usage", e.what());
    return kMalformed;
  } catch (const construction_failure& e) {
    error_record(kCheckFailed, "construction_failure", e.what(),
                 Record{{"stage", e.stage()}, {"lower", e.lower().get_str()}, {"upper", e.upper().get_str()}});
    return kCheckFailed;
  } catch (const malformed_spec& e) {
    error_record(kMalformed, "malformed_spec", e.what());
    return kMalformed;
  } catch (const malformed_input& e) {
    error_record(kMalformed, "malformed_input", e.what());
    return kMalformed;
  } catch (const orbit_escape& e) {
    error_record(kMalformed, "orbit_escape", e.what());
    return kMalformed;
  } catch (const std::domain_error& e) {
    error_record(kMalformed, "domain_error", e.what());
    return kMalformed;
  } catch (const std::exception& e) {
    error_record(kInternal, "internal", e.what());
    return kInternal;
  }
  return rc;
}
