#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "format.hpp"
#include "rrcrt/multi_mod.hpp"
#include "rrcrt/oracle.hpp"
#include "rrcrt/simkit.hpp"
#include "rrcrt/two_mod.hpp"

namespace rrcrt::cli {

using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format;
  bool seed_given = false;
};

// numbers go into JSON at the same 6 significant digits as CSV
json num(double v) { return parse_decimal(fmt_num(v)); }

std::vector<std::int64_t> int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_int(part));
  return out;
}

std::vector<std::vector<std::int64_t>> group_list(const std::string& s) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& part : split(s, '|')) out.push_back(int_list(part));
  if (out.size() != 2) throw ArgumentError("--groups needs exactly two groups, e.g. \"120,300|210,490\"");
  return out;
}

std::pair<std::int64_t, std::int64_t> gamma_pair(const std::string& s) {
  const auto v = int_list(s);
  if (v.size() != 2) throw ArgumentError("--gammas takes two cofactors, e.g. 18,29");
  return {v[0], v[1]};
}

// "a:b:s" inclusive of b (within rounding), or a comma list
std::vector<double> tau_list(const std::string& s) {
  if (s.find(':') == std::string::npos) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_decimal(part));
    return out;
  }
  const auto p = split(s, ':');
  if (p.size() != 3) throw ArgumentError("--tau range must be start:stop:step");
  const double a = parse_decimal(p[0]), b = parse_decimal(p[1]), step = parse_decimal(p[2]);
  if (step <= 0.0 || b < a) throw ArgumentError("--tau range needs step > 0 and stop >= start");
  const auto n = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

// "a:b" inclusive, or a comma list
std::vector<std::int64_t> probe_list(const std::string& s) {
  if (s.find(':') == std::string::npos) return int_list(s);
  const auto p = split(s, ':');
  if (p.size() != 2) throw ArgumentError("--probe-boundary range must be start:stop");
  const std::int64_t a = parse_int(p[0]), b = parse_int(p[1]);
  if (b < a) throw ArgumentError("--probe-boundary needs stop >= start");
  std::vector<std::int64_t> out;
  for (std::int64_t n = a; n <= b; ++n) out.push_back(n);
  return out;
}

TwoModSystem system_from(const std::optional<std::int64_t>& m1, const std::optional<std::int64_t>& m2, bool real,
                         const std::string& m_text, const std::string& gammas) {
  if (real) {
    if (m_text.empty() || gammas.empty()) throw ArgumentError("--real needs --m <decimal> and --gammas g1,g2");
    const auto [g1, g2] = gamma_pair(gammas);
    return TwoModSystem::real(parse_decimal(m_text), g1, g2);
  }
  if (!m1 || !m2) throw ArgumentError("need --m1 and --m2");
  return TwoModSystem::from_moduli(*m1, *m2);
}

json system_json(const TwoModSystem& s) {
  json j;
  j["gammas"] = {s.gamma1(), s.gamma2()};
  if (s.is_integer()) {
    j["moduli"] = {s.m1(), s.m2()};
    j["m"] = s.m();
    j["lcm"] = s.lcm();
  } else {
    j["m"] = num(s.real_m());
    j["moduli"] = {num(s.real_m1()), num(s.real_m2())};
  }
  return j;
}

// The output stream for a command: a file under --out, else stdout.
class Sink {
 public:
  Sink(const Globals& g, std::ostream& fallback) : path_(g.out_path) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) throw ArgumentError("cannot open --out path '" + path_ + "'");
    }
    os_ = path_.empty() ? &fallback : &file_;
  }
  std::ostream& os() { return *os_; }

  void manifest(const std::string& command, json config, std::uint64_t seed) {
    if (path_.empty()) return;
    file_.close();
    json m;
    m["command"] = command;
    m["config"] = std::move(config);
    m["seed"] = seed;
    m["version"] = kVersion;
    m["outputs"] = {path_};
    std::ofstream mf(path_ + ".manifest.json");
    if (!mf) throw ArgumentError("cannot write manifest beside '" + path_ + "'");
    mf << m.dump(2) << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* os_;
};

// ---- levels ----

struct LevelsOpts {
  std::optional<std::int64_t> m1, m2;
  bool real = false;
  std::string m, gammas;
};

int cmd_levels(const LevelsOpts& o, const Globals& g, std::ostream& out, bool color) {
  const auto system = system_from(o.m1, o.m2, o.real, o.m, o.gammas);
  const auto table = level_table(system);
  std::vector<DeltaBaseline> baseline;
  if (system.is_integer()) baseline = delta_baseline(system);

  auto range_text = [&](const RobustnessLevel& r) {
    return system.is_integer() ? std::to_string(r.dynamic_range) : fmt_num(r.real_dynamic_range);
  };

  Sink sink(g, out);
  auto& os = sink.os();
  if (g.format == "json") {
    json j;
    j["system"] = system_json(system);
    j["levels"] = json::array();
    for (const auto& r : table) {
      j["levels"].push_back({{"j", r.j},
                             {"sigma_j", r.sigma_j},
                             {"robustness_bound", num(r.robustness_bound)},
                             {"n_ddot_1", r.n_ddot_1},
                             {"n_ddot_2", r.n_ddot_2},
                             {"dynamic_range", system.is_integer() ? json(r.dynamic_range) : num(r.real_dynamic_range)}});
    }
    j["delta_baseline"] = json::array();
    for (const auto& b : baseline) {
      j["delta_baseline"].push_back({{"i", b.i},
                                     {"delta_i", b.delta_i},
                                     {"bound", num(b.bound)},
                                     {"range_lower", b.range_lower},
                                     {"exact_range", b.exact_range},
                                     {"range_upper", b.range_upper}});
    }
    os << j.dump(2) << '\n';
  } else if (g.format == "csv") {
    write_csv_row(os, {"j", "sigma_j", "robustness_bound", "n_ddot_1", "n_ddot_2", "dynamic_range"});
    for (const auto& r : table) {
      write_csv_row(os, {std::to_string(r.j), std::to_string(r.sigma_j), fmt_num(r.robustness_bound),
                         std::to_string(r.n_ddot_1), std::to_string(r.n_ddot_2), range_text(r)});
    }
    if (!baseline.empty()) {
      os << '\n';
      write_csv_row(os, {"i", "delta_i", "bound", "range_lower", "exact_range", "range_upper"});
      for (const auto& b : baseline) {
        write_csv_row(os, {std::to_string(b.i), std::to_string(b.delta_i), fmt_num(b.bound),
                           std::to_string(b.range_lower), std::to_string(b.exact_range), std::to_string(b.range_upper)});
      }
    }
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : table) {
      rows.push_back({std::to_string(r.j), std::to_string(r.sigma_j), fmt_num(r.robustness_bound),
                      std::to_string(r.n_ddot_1), std::to_string(r.n_ddot_2), range_text(r)});
    }
    write_table(os, {"j", "sigma_j", "bound", "n_ddot_1", "n_ddot_2", "dynamic_range"}, rows, color);
    if (!baseline.empty()) {
      os << "\ndelta-chain baseline (bound delta_i/4)\n";
      rows.clear();
      for (const auto& b : baseline) {
        rows.push_back({std::to_string(b.i), std::to_string(b.delta_i), fmt_num(b.bound), std::to_string(b.range_lower),
                        std::to_string(b.exact_range), std::to_string(b.range_upper)});
      }
      write_table(os, {"i", "delta_i", "bound", "range_lower", "exact_range", "range_upper"}, rows, color);
    }
  }
  json cfg = {{"format", g.format}};
  if (system.is_integer()) {
    cfg["m1"] = system.m1();
    cfg["m2"] = system.m2();
  } else {
    cfg["m"] = o.m;
    cfg["gammas"] = o.gammas;
  }
  sink.manifest("levels", cfg, g.seed);
  return kOk;
}

// ---- reconstruct ----

struct ReconstructOpts {
  std::string moduli, groups, remainders, algorithm = "auto";
  int level = 1;
  bool oracle = false, strict = false, real = false;
  std::string m, gammas;
};

int cmd_reconstruct(const ReconstructOpts& o, const Globals& g, std::ostream& out, std::ostream& err) {
  if (g.format == "csv") throw ArgumentError("reconstruct writes JSON only");
  const auto texts = split(o.remainders, ',');
  bool real_values = o.real;
  for (const auto& t : texts) real_values = real_values || looks_real(t);
  std::vector<double> rr;
  std::vector<std::int64_t> ri;
  for (const auto& t : texts) {
    if (real_values) {
      rr.push_back(parse_decimal(t));
    } else {
      ri.push_back(parse_int(t));
      rr.push_back(static_cast<double>(ri.back()));
    }
  }

  json j;
  bool agree = true;
  if (!o.groups.empty()) {
    if (!o.moduli.empty() || o.real) throw ArgumentError("--groups cannot be combined with --moduli or --real");
    const auto gl = group_list(o.groups);
    const CascadeSpec spec{ModuliGroup(gl[0]), ModuliGroup(gl[1]), o.level};
    const auto sol = real_values ? cascade_reconstruct(spec, std::span<const double>(rr))
                                 : cascade_reconstruct(spec, std::span<const std::int64_t>(ri));
    const auto bounds = cascade_bounds(spec);
    j["mode"] = "cascade";
    j["groups"] = gl;
    j["level"] = spec.j();
    j["eta"] = {spec.group1().eta(), spec.group2().eta()};
    j["swapped"] = spec.swapped();
    j["overlapping"] = spec.overlapping();
    j["h"] = sol.h;
    j["l"] = {sol.l1, sol.l2};
    j["total_foldings"] = sol.total_foldings;
    j["group_estimates"] = {num(sol.group_estimate1), num(sol.group_estimate2)};
    j["N_hat"] = real_values ? num(sol.mean) : json(sol.N_hat);
    j["mean"] = num(sol.mean);
    j["dynamic_range"] = bounds.dynamic_range;
    j["tau_bound"] = num(bounds.tau_bound);
    if (spec.overlapping()) err << "warning: groups share moduli; exactness is not certified for overlapping splits\n";
    if (o.oracle) {
      const auto moduli = spec.caller_moduli();
      const std::int64_t N = nearest_scan(rr, moduli, bounds.dynamic_range);
      std::vector<std::int64_t> expect;
      for (const auto m : moduli) expect.push_back(N / m);
      agree = expect == sol.total_foldings;
      j["oracle"] = {{"N", N}, {"foldings", expect}, {"agree", agree}};
    }
  } else {
    std::optional<std::int64_t> m1, m2;
    if (!o.real) {
      const auto mv = int_list(o.moduli);
      if (o.moduli.empty() || mv.size() != 2) throw ArgumentError("--moduli takes two moduli (or use --groups)");
      m1 = mv[0];
      m2 = mv[1];
    }
    const auto system = system_from(m1, m2, o.real, o.m, o.gammas);
    if (rr.size() != 2) throw ArgumentError("two moduli need two remainders");
    const auto choice = parse_algorithm(o.algorithm);
    if (choice == AlgorithmChoice::alg1 && o.level != 1) throw ArgumentError("Algorithm 1 only covers level 1");
    const LevelContext ctx(system, o.level);
    std::int64_t n1 = 0, n2 = 0;
    if (real_values) {
      const RealObservation obs{rr[0], rr[1]};
      const auto sol = choice == AlgorithmChoice::alg1 ? algorithm1_real(system, obs) : algorithm2_real(ctx, obs);
      n1 = sol.n1_hat;
      n2 = sol.n2_hat;
      j["N_hat"] = num(sol.N_hat);
      j["in_range"] = in_range(system, obs);
    } else {
      const IntObservation obs{ri[0], ri[1]};
      const auto sol = choice == AlgorithmChoice::alg1 ? algorithm1(system, obs) : algorithm2(ctx, obs);
      n1 = sol.n1_hat;
      n2 = sol.n2_hat;
      j["N_hat"] = sol.N_hat;
      j["mean"] = num(sol.mean);
      j["in_range"] = in_range(system, obs);
    }
    j["mode"] = "two_moduli";
    j["system"] = system_json(system);
    j["level"] = o.level;
    j["algorithm"] = choice == AlgorithmChoice::alg1 ? "alg1" : "alg2";
    j["n"] = {n1, n2};
    j["dynamic_range"] = system.is_integer() ? json(ctx.level().dynamic_range) : num(ctx.level().real_dynamic_range);
    j["robustness_bound"] = num(ctx.level().robustness_bound);
    if (!j["in_range"].get<bool>()) err << "warning: remainders outside [0, m_i)\n";
    if (o.oracle) {
      if (!system.is_integer()) throw ArgumentError("--oracle needs integer moduli");
      const auto best = real_values
                            ? exhaustive_folding_search(system, RealObservation{rr[0], rr[1]}, ctx.level().dynamic_range)
                            : exhaustive_folding_search(system, IntObservation{ri[0], ri[1]}, ctx.level().dynamic_range);
      agree = best.n1_hat == n1 && best.n2_hat == n2;
      j["oracle"] = {{"N", best.N_hat}, {"n", {best.n1_hat, best.n2_hat}}, {"agree", agree}};
    }
  }

  Sink sink(g, out);
  sink.os() << j.dump(2) << '\n';
  json cfg = {{"remainders", o.remainders}, {"level", o.level}, {"algorithm", o.algorithm}, {"oracle", o.oracle}};
  if (!o.groups.empty()) cfg["groups"] = o.groups;
  if (!o.moduli.empty()) cfg["moduli"] = o.moduli;
  if (o.real) {
    cfg["m"] = o.m;
    cfg["gammas"] = o.gammas;
  }
  sink.manifest("reconstruct", cfg, g.seed);
  if (o.oracle && !agree) {
    err << "oracle disagreement\n";
    if (o.strict) return kOracleMismatch;
  }
  return kOk;
}

// ---- simulate ----

struct SimulateOpts {
  std::optional<std::int64_t> m1, m2, trials;
  std::optional<int> level;
  std::optional<unsigned> threads;
  std::string tau, probe, range_policy, error_model, algorithm, config, groups;
  bool compare = false;
};

const std::vector<std::string> kConfigKeys = {"m1",           "m2",          "level",  "taus",    "trials_per_point",
                                              "seed",         "error_model", "range_policy", "algorithm", "threads",
                                              "probe",        "compare",     "groups"};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read config '" + path + "'");
  json j = json::parse(in);
  // a manifest carries the resolved config under "config"
  if (j.contains("command") && j.contains("config")) {
    if (j["command"] != "simulate") throw ArgumentError("manifest is for '" + j["command"].get<std::string>() + "'");
    j = j["config"];
  }
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), k) == kConfigKeys.end()) {
      throw ArgumentError("unknown config field '" + k + "'");
    }
  }
  return j;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& series, bool with_series) {
  std::vector<std::string> header{"x", "mean_abs_error", "mean_rel_error", "failure_rate", "clamped_fraction"};
  if (with_series) header.insert(header.begin(), "series");
  write_csv_row(os, header);
  for (const auto& s : series) {
    for (const auto& r : s.rows) {
      std::vector<std::string> cells{fmt_num(r.x), fmt_num(r.mean_abs_error), fmt_num(r.mean_rel_error),
                                     fmt_num(r.failure_rate), fmt_num(r.clamped_fraction)};
      if (with_series) cells.insert(cells.begin(), s.series);
      write_csv_row(os, cells);
    }
  }
}

json sweep_json(const std::vector<SweepResult>& series) {
  json arr = json::array();
  for (const auto& s : series) {
    json rows = json::array();
    for (const auto& r : s.rows) {
      rows.push_back({{"x", num(r.x)},
                      {"mean_abs_error", num(r.mean_abs_error)},
                      {"mean_rel_error", num(r.mean_rel_error)},
                      {"failure_rate", num(r.failure_rate)},
                      {"clamped_fraction", num(r.clamped_fraction)},
                      {"trials", r.trials},
                      {"rel_excluded", r.rel_excluded}});
    }
    arr.push_back({{"name", s.series}, {"rows", rows}});
  }
  return arr;
}

int cmd_simulate(const SimulateOpts& o, const Globals& g, std::ostream& out) {
  json c = o.config.empty() ? json::object() : load_config(o.config);
  if (o.m1) c["m1"] = *o.m1;
  if (o.m2) c["m2"] = *o.m2;
  if (o.level) c["level"] = *o.level;
  if (o.trials) c["trials_per_point"] = *o.trials;
  if (o.threads) c["threads"] = *o.threads;
  if (!o.tau.empty()) c["taus"] = tau_list(o.tau);
  if (!o.probe.empty()) c["probe"] = probe_list(o.probe);
  if (!o.range_policy.empty()) c["range_policy"] = o.range_policy;
  if (!o.error_model.empty()) c["error_model"] = o.error_model;
  if (!o.algorithm.empty()) c["algorithm"] = o.algorithm;
  if (!o.groups.empty()) c["groups"] = group_list(o.groups);
  if (o.compare) c["compare"] = true;
  if (g.seed_given || !c.contains("seed")) c["seed"] = g.seed;
  if (!c.contains("trials_per_point")) c["trials_per_point"] = 100000;
  if (!c.contains("level")) c["level"] = 1;
  if (!c.contains("range_policy")) c["range_policy"] = "unclamped";
  if (!c.contains("error_model")) c["error_model"] = "uniform_real";
  if (!c.contains("algorithm")) c["algorithm"] = "auto";
  if (!c.contains("compare")) c["compare"] = false;

  const bool compare = c["compare"].get<bool>();
  const auto seed = c["seed"].get<std::uint64_t>();
  const auto trials = c["trials_per_point"].get<std::int64_t>();
  const auto level = c["level"].get<int>();
  const auto policy = parse_range_policy(c["range_policy"].get<std::string>());
  const auto model = parse_error_model(c["error_model"].get<std::string>());
  const unsigned threads = c.contains("threads") ? c["threads"].get<unsigned>() : 0;
  if (trials < 1) throw ArgumentError("trials_per_point must be >= 1");

  std::vector<SweepResult> results;
  if (compare) {
    if (!c.contains("groups") || !c.contains("taus")) throw ArgumentError("--compare needs groups and taus");
    const auto gl = c["groups"].get<std::vector<std::vector<std::int64_t>>>();
    if (gl.size() != 2) throw ArgumentError("groups must hold two lists");
    ComparisonConfig cc;
    cc.group1 = gl[0];
    cc.group2 = gl[1];
    cc.level = level;
    cc.taus = c["taus"].get<std::vector<double>>();
    cc.trials_per_point = trials;
    cc.seed = seed;
    cc.error_model = model;
    cc.range_policy = policy;
    cc.threads = threads;
    results = run_comparison(cc);
  } else {
    if (!c.contains("m1") || !c.contains("m2")) throw ArgumentError("simulate needs --m1 and --m2 (or --compare)");
    TrialConfig tc;
    tc.m1 = c["m1"].get<std::int64_t>();
    tc.m2 = c["m2"].get<std::int64_t>();
    tc.level = level;
    tc.trials_per_point = trials;
    tc.seed = seed;
    tc.error_model = model;
    tc.range_policy = policy;
    tc.algorithm = parse_algorithm(c["algorithm"].get<std::string>());
    tc.threads = threads;
    if (c.contains("probe")) {
      const auto probe = c["probe"].get<std::vector<std::int64_t>>();
      results.push_back(run_boundary_probe(tc, probe));
    } else {
      if (!c.contains("taus")) throw ArgumentError("simulate needs --tau or --probe-boundary");
      tc.taus = c["taus"].get<std::vector<double>>();
      results.push_back(run_tau_sweep(tc));
    }
  }

  Sink sink(g, out);
  if (g.format == "json") {
    sink.os() << json{{"series", sweep_json(results)}}.dump(2) << '\n';
  } else {
    write_sweep_csv(sink.os(), results, compare);
  }
  sink.manifest("simulate", c, seed);
  return kOk;
}

// ---- verify ----

struct VerifyOpts {
  std::optional<std::int64_t> m1, m2;
  bool exhaustive = false, falsify = false, nddot = false;
  std::optional<int> random_systems;
  std::int64_t gamma_max = 200;
};

int cmd_verify(const VerifyOpts& o, const Globals& g, std::ostream& out) {
  if (g.format == "csv") throw ArgumentError("verify writes text or JSON");
  std::vector<SuiteResult> results;
  if (o.m1 || o.m2) {
    const auto system = system_from(o.m1, o.m2, false, "", "");
    const bool all = !o.exhaustive && !o.falsify && !o.nddot;
    if (all || o.nddot) results.push_back(verify_n_ddot(system));
    if (all || o.falsify) results.push_back(verify_falsifiers(system));
    if (o.exhaustive || (all && system.lcm() <= 50000)) results.push_back(verify_exhaustive(system));
  } else if (o.exhaustive || o.falsify || o.nddot) {
    throw ArgumentError("--exhaustive, --falsify and --nddot need --m1 and --m2");
  }
  if (o.random_systems) results.push_back(verify_random_n_ddot(*o.random_systems, o.gamma_max, g.seed));
  if (results.empty()) throw ArgumentError("nothing to verify; give --m1/--m2 or --random-systems");

  bool ok = true;
  Sink sink(g, out);
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back({{"suite", r.name}, {"passed", r.passed()}, {"checked", r.checked}, {"failures", r.failures},
                     {"detail", r.detail}});
      ok = ok && r.passed();
    }
    sink.os() << json{{"passed", ok}, {"suites", arr}}.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      sink.os() << (r.passed() ? "PASS " : "FAIL ") << r.name << " checked=" << r.checked << " failures=" << r.failures
                << " " << r.detail << '\n';
      ok = ok && r.passed();
    }
  }
  json cfg = {{"exhaustive", o.exhaustive}, {"falsify", o.falsify}, {"nddot", o.nddot}, {"gamma_max", o.gamma_max}};
  if (o.m1) cfg["m1"] = *o.m1;
  if (o.m2) cfg["m2"] = *o.m2;
  if (o.random_systems) cfg["random_systems"] = *o.random_systems;
  sink.manifest("verify", cfg, g.seed);
  return ok ? kOk : kVerifyFailed;
}

// ---- plane ----

struct PlaneOpts {
  std::optional<std::int64_t> m1, m2, max;
};

int cmd_plane(const PlaneOpts& o, const Globals& g, std::ostream& out) {
  if (!o.m1 || !o.m2 || *o.m1 < 1 || *o.m2 < 1) throw ArgumentError("plane needs positive --m1 and --m2");
  const std::int64_t lcm = checked_mul(*o.m1 / std::gcd(*o.m1, *o.m2), *o.m2);
  const std::int64_t max = o.max.value_or(lcm);
  if (max < 0 || max > lcm) throw ArgumentError("--max must lie in [0, lcm] = [0, " + std::to_string(lcm) + "]");
  Sink sink(g, out);
  if (g.format == "json") {
    json rows = json::array();
    for (std::int64_t N = 0; N < max; ++N) rows.push_back({N, N % *o.m1, N % *o.m2});
    sink.os() << json{{"columns", {"N", "r1", "r2"}}, {"rows", rows}}.dump() << '\n';
  } else {
    sink.os() << "N,r1,r2\n";
    for (std::int64_t N = 0; N < max; ++N) sink.os() << N << ',' << N % *o.m1 << ',' << N % *o.m2 << '\n';
  }
  sink.manifest("plane", {{"m1", *o.m1}, {"m2", *o.m2}, {"max", max}}, g.seed);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool tty) {
  CLI::App app{"Robust remaindering with two or more moduli", "rrcrt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed for simulate and verify --random-systems");
  app.add_option("--out", g.out_path, "write output here and a manifest beside it");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  LevelsOpts lo;
  auto* levels = app.add_subcommand("levels", "dynamic range / robustness bound table");
  levels->add_option("--m1", lo.m1, "smaller modulus");
  levels->add_option("--m2", lo.m2, "larger modulus");
  levels->add_flag("--real", lo.real, "real gcd mode");
  levels->add_option("--m", lo.m, "real gcd (with --real)");
  levels->add_option("--gammas", lo.gammas, "cofactors g1,g2 (with --real)");

  ReconstructOpts ro;
  auto* rec = app.add_subcommand("reconstruct", "recover N from erroneous remainders");
  rec->add_option("--moduli", ro.moduli, "two moduli m1,m2");
  rec->add_option("--groups", ro.groups, "two groups for the cascade, e.g. \"120,300|210,490\"");
  rec->add_option("--remainders", ro.remainders, "observed remainders, comma separated")->required();
  rec->add_option("--level", ro.level, "robustness level j")->capture_default_str();
  rec->add_option("--algorithm", ro.algorithm, "auto, alg1 or alg2")->capture_default_str();
  rec->add_flag("--oracle", ro.oracle, "cross-check against an exhaustive search");
  rec->add_flag("--strict", ro.strict, "exit 3 when the oracle disagrees");
  rec->add_flag("--real", ro.real, "real gcd mode");
  rec->add_option("--m", ro.m, "real gcd (with --real)");
  rec->add_option("--gammas", ro.gammas, "cofactors g1,g2 (with --real)");

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweeps, boundary probes, comparisons");
  sim->add_option("--m1", so.m1);
  sim->add_option("--m2", so.m2);
  sim->add_option("--level", so.level);
  sim->add_option("--tau", so.tau, "start:stop:step (inclusive) or a comma list");
  sim->add_option("--trials", so.trials, "trials per point (default 100000)");
  sim->add_option("--probe-boundary", so.probe, "N values start:stop (inclusive) or a comma list");
  sim->add_option("--threads", so.threads, "worker threads (default: all cores)");
  sim->add_option("--range-policy", so.range_policy, "unclamped (default) or clamp");
  sim->add_option("--error-model", so.error_model, "uniform_real (default) or uniform_integer");
  sim->add_option("--algorithm", so.algorithm, "auto, alg1 or alg2");
  sim->add_option("--config", so.config, "JSON config or a previous run's manifest");
  sim->add_flag("--compare", so.compare, "single-stage vs two-stage vs cascade");
  sim->add_option("--groups", so.groups, "groups for --compare");

  VerifyOpts vo;
  auto* ver = app.add_subcommand("verify", "oracle equivalence suites");
  ver->add_option("--m1", vo.m1);
  ver->add_option("--m2", vo.m2);
  ver->add_flag("--exhaustive", vo.exhaustive, "every N, level and legal integer error pair");
  ver->add_flag("--falsify", vo.falsify, "adversarial instances at each dynamic range");
  ver->add_flag("--nddot", vo.nddot, "closed-form vs definitional ladder depths");
  ver->add_option("--random-systems", vo.random_systems, "random coprime cofactor pairs to check");
  ver->add_option("--gamma-max", vo.gamma_max, "largest cofactor for --random-systems")->capture_default_str();

  PlaneOpts po;
  auto* plane = app.add_subcommand("plane", "dump (N, r1, r2) points");
  plane->add_option("--m1", po.m1)->required();
  plane->add_option("--m2", po.m2)->required();
  plane->add_option("--max", po.max, "rows for N in [0, max) (default lcm)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (levels->parsed()) return cmd_levels(lo, g, out, tty && color_wanted());
    if (rec->parsed()) return cmd_reconstruct(ro, g, out, err);
    if (sim->parsed()) return cmd_simulate(so, g, out);
    if (ver->parsed()) return cmd_verify(vo, g, out);
    if (plane->parsed()) return cmd_plane(po, g, out);
  } catch (const json::exception& e) {
    err << "error: bad JSON: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace rrcrt::cli
