#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "oee/complexity.hpp"
#include "oee/eca.hpp"
#include "oee/ensemble.hpp"
#include "oee/innovation.hpp"
#include "oee/io.hpp"
#include "oee/recurrence.hpp"
#include "oee/report.hpp"
#include "oee/svg.hpp"
#include "oee/variants.hpp"
#include "oee/wolfram_class.hpp"

namespace oee {

namespace {

namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

const char* const kSubcommands[] = {"run", "ensemble", "oracle", "norm", "analyze", "render"};

struct GlobalOptions {
  int threads = 0;
  std::string class_table;
  std::string config;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OEE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) throw std::invalid_argument("OEE_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return 0;
}

ClassTable load_classes(const std::string& path) {
  if (!path.empty()) return ClassTable::load(path);
  if (fs::exists(OEE_DEFAULT_CLASS_TABLE)) return ClassTable::load(OEE_DEFAULT_CLASS_TABLE);
  return ClassTable::builtin();
}

WidthRatio parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return WidthRatio{static_cast<unsigned>(std::stoul(text)), 1};
    const WidthRatio r{static_cast<unsigned>(std::stoul(text.substr(0, slash))),
                       static_cast<unsigned>(std::stoul(text.substr(slash + 1)))};
    if (r.den == 0 || r.num == 0) throw std::invalid_argument("zero");
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("width ratio must look like 5/2, got '" + text + "'");
  }
}

std::string ratio_text(const WidthRatio& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

// A state given either as a 0/1 string (its length is the width) or as hex
// with an explicit width.
BitState parse_state(const std::string& text, std::optional<unsigned> width, const char* what) {
  if (text.starts_with("0x") || text.starts_with("0X")) {
    if (!width) throw std::invalid_argument(std::string(what) + " given in hex needs an explicit width");
    const std::uint64_t v = std::stoull(text.substr(2), nullptr, 16);
    return BitState(v, *width);
  }
  const BitState s = BitState::from_string(text);
  if (width && s.width() != *width) throw std::invalid_argument(std::string(what) + " length does not match its width");
  return s;
}

Json metadata_json(const Metadata& config, const std::optional<Json>& extra = std::nullopt) {
  Json meta;
  meta["tool"] = "oee";
  meta["version"] = kToolVersion;
  Json cfg;
  for (const auto& [k, v] : config) cfg[k] = v;
  meta["config"] = cfg;
  meta["errata"] = errata_json();
  if (extra) {
    for (const auto& [k, v] : extra->items()) meta[k] = v;
  }
  return meta;
}

// ---------------------------------------------------------------- run ------

struct RunOptions {
  std::string variant;
  std::optional<unsigned> w_o, w_e;
  std::optional<int> rule_o, rule_e;
  std::string state_o, state_e;
  double mu = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t cap = 0;
  std::string out = "trajectory.csv";
  std::string pgm;
};

int cmd_run(const RunOptions& o) {
  SamplePlan plan;
  plan.variant = parse_variant(o.variant);
  plan.mu = o.mu;
  plan.master_seed = o.seed;
  plan.step_cap = o.cap;
  plan.complexity = false;
  plan.samples = 1;

  CounterRng rng(o.seed, 0);
  const auto& reps = canonical_rules();
  std::optional<BitState> s_o, s_e;
  if (!o.state_o.empty()) s_o = parse_state(o.state_o, o.w_o, "--state-o");
  plan.w_o = s_o ? s_o->width() : o.w_o.value_or(0);
  if (plan.w_o == 0) throw std::invalid_argument("run needs --wo or --state-o");
  if (has_environment(plan.variant)) {
    if (!o.state_e.empty()) s_e = parse_state(o.state_e, o.w_e, "--state-e");
    const unsigned we = s_e ? s_e->width() : o.w_e.value_or(plan.variant == Variant::CaseII ? kCaseTwoEnvWidth : 0);
    if (we == 0) throw std::invalid_argument("case1 needs --we or --state-e");
    plan.w_e = we;
  } else if (o.w_e || !o.state_e.empty() || o.rule_e) {
    throw std::invalid_argument(o.variant + " has no environment");
  }
  plan.validate();

  InitialTuple t;
  t.r_o = static_cast<std::uint8_t>(o.rule_o ? RuleTable::from_number(*o.rule_o).number() : reps[rng.next_below(88)]);
  t.s_o = s_o ? s_o->value() : rng.next_u64() & BitState::mask_for(plan.w_o);
  if (has_environment(plan.variant)) {
    t.r_e = static_cast<std::uint8_t>(o.rule_e ? RuleTable::from_number(*o.rule_e).number() : reps[rng.next_below(88)]);
    t.s_e = s_e ? s_e->value() : rng.next_u64() & BitState::mask_for(*plan.w_e);
  }
  if (plan.variant == Variant::CaseIII) t.seed = o.seed;

  const ExecutionRecord rec = evaluate(plan, t, std::nullopt);
  const VariantConfig config = make_config(plan, t);
  const std::uint64_t tail = is_deterministic(plan.variant) ? 0 : rec.t_P;
  const Trajectory traj = run_trajectory(config, TrajectoryOptions{o.cap, tail});

  Metadata meta = {{"tool", "oee"},
                   {"version", kToolVersion},
                   {"command", "run"},
                   {"variant", std::string(to_string(plan.variant))},
                   {"w_o", std::to_string(plan.w_o)},
                   {"w_e", std::to_string(plan.effective_w_e())},
                   {"rule_o", std::to_string(t.r_o)},
                   {"state_o", config.s_o.to_string()}};
  if (config.s_e) {
    meta.emplace_back("rule_e", std::to_string(t.r_e));
    meta.emplace_back("state_e", config.s_e->to_string());
  }
  if (plan.variant == Variant::CaseIII) {
    meta.emplace_back("mu", format_double(plan.mu));
    meta.emplace_back("seed", std::to_string(o.seed));
  }
  meta.emplace_back("cap", std::to_string(o.cap));

  write_file_atomic(o.out, [&](std::ostream& out) {
    for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
    out << "t,s_o,r_o" << (config.s_e ? ",s_e" : "") << '\n';
    for (const auto& snap : traj.snapshots) {
      out << snap.t << ',' << snap.s_o.to_string() << ',' << int{snap.r_o.number()};
      if (snap.s_e) out << ',' << snap.s_e->to_string();
      out << '\n';
    }
  });
  if (!o.pgm.empty()) {
    std::vector<BitState> states;
    for (const auto& snap : traj.snapshots) states.push_back(snap.s_o);
    std::string comment;
    for (const auto& [k, v] : meta) comment += k + "=" + v + "\n";
    write_pgm(fs::path(o.pgm), to_rows(states), comment);
  }

  const auto flag = [](const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "n/a"; };
  std::cout << "variant " << to_string(plan.variant) << "  w_o " << plan.w_o << "  w_e " << plan.effective_w_e()
            << "  r_o(0) " << int{t.r_o} << '\n'
            << "t_P " << rec.t_P << "  t_r " << rec.t_r << "  t_r_rule " << rec.t_r_rule << "  t_a " << rec.t_a
            << (rec.censored ? "  (censored at cap)" : "") << '\n'
            << "INN " << flag(rec.inn) << "  UE " << flag(rec.ue) << "  OEE " << flag(rec.oee) << "  I "
            << format_double(rec.innovation_I) << '\n'
            << "wrote " << o.out << (o.pgm.empty() ? "" : " and " + o.pgm) << '\n';
  return 0;
}

// ----------------------------------------------------------- ensemble ------

struct EnsembleOptions {
  std::string variant;
  unsigned w_o = 3;
  std::optional<unsigned> w_e;
  std::string ratio;
  double mu = 0.5;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  std::uint64_t cap = 0;
  bool no_complexity = false;
  bool lyapunov_all = false;
  unsigned perturb_bit = 0;
  std::uint64_t norm_samples = NormParams{}.samples;
  std::uint64_t norm_steps = NormParams{}.steps;
  std::uint64_t norm_seed = NormParams{}.seed;
  std::string norm_cache;
  std::string csv = "records.csv";
  std::string report = "report.json";
};

SamplePlan plan_from(const EnsembleOptions& o) {
  SamplePlan plan;
  plan.variant = parse_variant(o.variant);
  plan.w_o = o.w_o;
  plan.w_e = o.w_e;
  if (!o.ratio.empty()) plan.ratio = parse_ratio(o.ratio);
  plan.mu = o.mu;
  plan.samples = o.samples;
  plan.master_seed = o.seed;
  plan.step_cap = o.cap;
  plan.complexity = !o.no_complexity;
  plan.lyapunov_mode = o.lyapunov_all ? LyapunovMode::AllPositions : LyapunovMode::SinglePosition;
  plan.perturb_bit = o.perturb_bit;
  plan.norm.samples = o.norm_samples;
  plan.norm.steps = o.norm_steps;
  plan.norm.seed = o.norm_seed;
  plan.validate();
  return plan;
}

// Resolved plan echo. Worker count is deliberately absent: outputs must not
// depend on it.
Metadata plan_metadata(const SamplePlan& plan) {
  Metadata m = {{"tool", "oee"},
                {"version", kToolVersion},
                {"command", "ensemble"},
                {"variant", std::string(to_string(plan.variant))},
                {"w_o", std::to_string(plan.w_o)},
                {"w_e", std::to_string(plan.effective_w_e())},
                {"ratio", plan.ratio ? ratio_text(*plan.ratio) : ""},
                {"mu", plan.variant == Variant::CaseIII ? format_double(plan.mu) : ""},
                {"samples", std::to_string(plan.samples)},
                {"seed", std::to_string(plan.master_seed)},
                {"step_cap", std::to_string(plan.step_cap)},
                {"complexity", plan.complexity ? "1" : "0"}};
  if (plan.complexity) {
    m.emplace_back("lyapunov_mode", plan.lyapunov_mode == LyapunovMode::AllPositions ? "all_positions" : "single_position");
    if (plan.lyapunov_mode == LyapunovMode::SinglePosition) m.emplace_back("perturb_bit", std::to_string(plan.perturb_bit));
    m.emplace_back("norm_samples", std::to_string(plan.norm.samples));
    m.emplace_back("norm_steps", std::to_string(plan.norm.steps));
    m.emplace_back("norm_seed", std::to_string(plan.norm.seed));
  }
  return m;
}

void print_summary(const EnsembleReport& rep) {
  std::cout << "records " << rep.records << "  censored " << rep.censored << '\n'
            << "OEE% " << format_double(rep.oee_percent) << "  INN% " << format_double(rep.inn_percent) << "  UE% "
            << format_double(rep.ue_percent) << '\n';
}

int cmd_ensemble(const EnsembleOptions& o, const GlobalOptions& g) {
  const SamplePlan plan = plan_from(o);
  const ClassTable classes = load_classes(g.class_table);
  const int threads = resolve_threads(g.threads);
  std::optional<NormCache> cache;
  if (!o.norm_cache.empty()) cache.emplace(o.norm_cache);

  const auto records = run_ensemble(plan, threads, cache ? &*cache : nullptr);
  if (cache) cache->save();
  const Metadata meta = plan_metadata(plan);
  write_records_csv(fs::path(o.csv), records, meta);

  const EnsembleReport rep = aggregate(records, classes);
  Json extra;
  extra["sample_space"] = sample_space_json(plan.variant, plan.w_o, plan.effective_w_e());
  write_report_json(o.report, rep, metadata_json(meta, extra));
  print_summary(rep);
  std::cout << "wrote " << o.csv << " and " << o.report << '\n';
  return 0;
}

// ------------------------------------------------------------- oracle ------

struct OracleOptions {
  unsigned width = 3;
  std::string cache;
  bool verify = false;
  std::uint64_t check = 0;
  std::uint64_t seed = 1;
};

int cmd_oracle(const OracleOptions& o) {
  if (o.width < 3 || o.width > CounterfactualOracle::kMaxWidth)
    throw std::invalid_argument("oracle width must be in 3.." + std::to_string(CounterfactualOracle::kMaxWidth));
  const fs::path path = o.cache.empty() ? fs::path("oracle_w" + std::to_string(o.width) + ".bin") : fs::path(o.cache);
  CounterfactualOracle oracle;
  if (o.verify) {
    oracle = CounterfactualOracle::load(path);
    if (!(oracle == CounterfactualOracle::build(oracle.width()))) throw DataError(path.string() + ": cache differs from a fresh enumeration");
    std::cout << "verified " << path.string() << " (" << oracle.records().size() << " trajectories)\n";
  } else {
    oracle = CounterfactualOracle::load_or_build(path, o.width);
    std::cout << "oracle " << path.string() << " holds " << oracle.records().size() << " trajectories of width "
              << oracle.width() << '\n';
  }
  if (o.check > 0) {
    // Cross-check the constraint test against containment on Case I windows.
    SamplePlan plan;
    plan.variant = Variant::CaseI;
    plan.w_o = oracle.width();
    plan.w_e = oracle.width();
    plan.complexity = false;
    plan.master_seed = o.seed;
    plan.samples = std::min<std::uint64_t>(o.check, sample_space_size(plan.variant, plan.w_o, *plan.w_e));
    std::uint64_t mismatches = 0;
    for (const auto& t : draw_plan(plan)) {
      const auto traj = run_trajectory(make_config(plan, t), 0);
      const auto rep = measure_recurrence(make_config(plan, t), traj);
      const auto window = traj.organism_states(0, rep.t_r + 1);
      if (oracle.contains(window) != !inn_flag(window)) ++mismatches;
    }
    std::cout << "checked " << plan.samples << " windows, " << mismatches << " disagreements\n";
    if (mismatches) return kExitData;
  }
  return 0;
}

// --------------------------------------------------------------- norm ------

struct NormOptions {
  std::vector<unsigned> widths;
  std::uint64_t samples = NormParams{}.samples;
  std::uint64_t steps = NormParams{}.steps;
  std::uint64_t seed = NormParams{}.seed;
  std::string cache = "norm_cache.txt";
};

int cmd_norm(const NormOptions& o, const GlobalOptions& g) {
  const int threads = resolve_threads(g.threads);
  NormCache cache(o.cache);
  for (unsigned w : o.widths) {
    const NormParams p{w, o.samples, o.steps, o.seed};
    const std::uint64_t bits = cache.get(p, threads);
    std::cout << "w " << w << "  samples " << p.samples << "  steps " << p.effective_steps() << "  max_bits " << bits << '\n';
  }
  cache.save();
  std::cout << "wrote " << o.cache << '\n';
  return 0;
}

// ------------------------------------------------------------ analyze ------

struct AnalyzeOptions {
  std::string csv;
  std::string out_dir = "analysis";
  bool no_replay = false;
};

int cmd_analyze(const AnalyzeOptions& o, const GlobalOptions& g) {
  const ClassTable classes = load_classes(g.class_table);
  RecordsFile file = read_records_csv(fs::path(o.csv));
  std::uint64_t cap = 0;
  for (const auto& [k, v] : file.metadata) {
    if (k == "step_cap" && !v.empty()) cap = std::stoull(v);
  }
  if (!o.no_replay) {
    const int threads = resolve_threads(g.threads);
    const auto n = static_cast<std::int64_t>(file.records.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (std::int64_t i = 0; i < n; ++i) replay_attractor_rules(file.records[i], cap);
  }
  const EnsembleReport rep = aggregate(file.records, classes);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  Metadata meta = file.metadata;
  meta.emplace_back("analyzed_from", fs::path(o.csv).filename().string());
  meta.emplace_back("metagenome", o.no_replay ? "not replayed" : "replayed");
  write_report_json(dir / "report.json", rep, metadata_json(meta));

  std::vector<std::pair<double, double>> scatter;
  for (const auto& [t_r, I] : rep.innovation_vs_t_r) scatter.emplace_back(static_cast<double>(t_r), I);
  write_svg(dir / "t_r_histogram.svg", svg_log_histogram(rep.t_r_ratio, "recurrence time", "t_r / t_P (log2 bins)"));
  write_svg(dir / "t_a_histogram.svg", svg_log_histogram(rep.t_a_ratio, "attractor size", "t_a / t_P (log2 bins)"));
  write_svg(dir / "box_plots.svg", svg_box_plot({{"t_r / t_P", rep.t_r_box}, {"t_a / t_P", rep.t_a_box}}, "timescales"));
  write_svg(dir / "innovation_vs_t_r.svg", svg_scatter(scatter, "innovation vs recurrence", "t_r", "I"));
  write_svg(dir / "heat_all.svg", svg_heat_grid(rep.complexity_all.grid, "C vs k, all records"));
  write_svg(dir / "heat_oee.svg", svg_heat_grid(rep.complexity_oee.grid, "C vs k, OEE records"));
  write_svg(dir / "metagenome_all.svg", svg_metagenome(rep.metagenome_all, "attractor rules, all records"));
  write_svg(dir / "metagenome_oee.svg", svg_metagenome(rep.metagenome_oee, "attractor rules, OEE records"));
  print_summary(rep);
  std::cout << "wrote report and plots to " << dir.string() << '\n';
  return 0;
}

// ------------------------------------------------------------- render ------

struct RenderOptions {
  std::string variant = "case1";
  unsigned w_o = 101;
  unsigned w_e = 101;
  std::size_t steps = 400;
  std::uint64_t seed = 7;
  std::optional<int> rule_o, rule_e;
  double mu = 0.5;
  bool with_env = false;
  std::string out = "render.pgm";
};

int cmd_render(const RenderOptions& o) {
  WideConfig cfg;
  cfg.variant = parse_variant(o.variant);
  if (o.w_o < 3) throw std::invalid_argument("organism width must be at least 3");
  if (o.steps == 0) throw std::invalid_argument("render needs at least one step");
  CounterRng rng(o.seed, 0);
  const auto& reps = canonical_rules();
  cfg.r_o = o.rule_o ? RuleTable::from_number(*o.rule_o) : RuleTable::from_bits(reps[rng.next_below(88)]);
  cfg.s_o.resize(o.w_o);
  for (auto& c : cfg.s_o) c = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  unsigned w_e = 0;
  if (has_environment(cfg.variant)) {
    w_e = cfg.variant == Variant::CaseII ? kCaseTwoEnvWidth : o.w_e;
    if (w_e == 0) throw std::invalid_argument("environment width must be positive");
    cfg.r_e = o.rule_e ? RuleTable::from_number(*o.rule_e) : RuleTable::from_bits(reps[rng.next_below(88)]);
    cfg.s_e.resize(w_e);
    for (auto& c : cfg.s_e) c = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  }
  cfg.mu = o.mu;
  cfg.seed = o.seed;
  const WideRun run = run_wide(cfg, o.steps);

  std::vector<WideState> rows = run.organism;
  if (o.with_env && w_e > 0) {
    for (std::size_t t = 0; t < rows.size(); ++t) {
      rows[t].push_back(0);
      rows[t].insert(rows[t].end(), run.environment[t].begin(), run.environment[t].end());
    }
  }
  std::ostringstream comment;
  comment << "oee " << kToolVersion << " render variant=" << to_string(cfg.variant) << " w_o=" << o.w_o << " w_e=" << w_e
          << " steps=" << o.steps << " seed=" << o.seed << " rule_o=" << int{cfg.r_o.number()};
  if (w_e) comment << " rule_e=" << int{cfg.r_e.number()};
  write_pgm(fs::path(o.out), rows, comment.str());
  std::cout << "wrote " << o.out << " (" << rows.size() << " rows x " << rows.front().size() << " columns)\n";
  return 0;
}

// ------------------------------------------------------------- config ------

// Moves `key = value` pairs of a --config file in front of the command-line
// arguments of the subcommand, so that explicit flags (taken last) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
      continue;
    }
    if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
      continue;
    }
    out.push_back(args[i]);
  }
  if (config_path.empty()) return out;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(config_path)) {
    injected.push_back("--" + key + "=" + value);
  }
  std::size_t insert_at = 1;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (std::find(std::begin(kSubcommands), std::end(kSubcommands), out[i]) != std::end(kSubcommands)) {
      insert_at = i + 1;
      break;
    }
  }
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(std::min(insert_at, out.size())), injected.begin(), injected.end());
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Coupled elementary cellular automata: simulation, open-endedness tests and ensemble statistics", "oee"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--threads", g.threads, "Worker threads (default: OEE_THREADS, then the OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--class-table", g.class_table, "Wolfram class table (256 lines '<rule> <class>')");
  app.add_option("--config", g.config, "Flat 'key = value' file mirroring long flags; command-line flags win");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one configuration and write its trajectory");
  run_cmd->add_option("--variant", run.variant, "case1 | case2 | case3 | eca")->required();
  run_cmd->add_option("--wo", run.w_o, "Organism width");
  run_cmd->add_option("--we", run.w_e, "Environment width (case1; case2 uses 8)");
  run_cmd->add_option("--rule-o", run.rule_o, "Initial organism rule (default: random canonical)");
  run_cmd->add_option("--rule-e", run.rule_e, "Environment rule (default: random canonical)");
  run_cmd->add_option("--state-o", run.state_o, "Initial organism state: 0/1 string or 0x-hex with --wo");
  run_cmd->add_option("--state-e", run.state_e, "Initial environment state: 0/1 string or 0x-hex with --we");
  run_cmd->add_option("--mu", run.mu, "Case III flip probability")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Seed for random initial values and the case3 stream")->capture_default_str();
  run_cmd->add_option("--cap", run.cap, "Step cap (0: automatic)")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Trajectory CSV")->capture_default_str();
  run_cmd->add_option("--pgm", run.pgm, "Optional PGM image of the organism");

  EnsembleOptions ens;
  auto* ens_cmd = app.add_subcommand("ensemble", "Sample and evaluate many executions");
  ens_cmd->add_option("--variant", ens.variant, "case1 | case2 | case3 | eca")->required();
  ens_cmd->add_option("--wo", ens.w_o, "Organism width")->capture_default_str();
  ens_cmd->add_option("--we", ens.w_e, "Environment width (case1)");
  ens_cmd->add_option("--ratio", ens.ratio, "Case I environment ratio w_e/w_o, e.g. 5/2 (rounded down)");
  ens_cmd->add_option("--mu", ens.mu, "Case III flip probability")->capture_default_str();
  ens_cmd->add_option("--samples", ens.samples, "Number of executions")->capture_default_str();
  ens_cmd->add_option("--seed", ens.seed, "Master seed")->capture_default_str();
  ens_cmd->add_option("--cap", ens.cap, "Step cap per execution (0: automatic)")->capture_default_str();
  ens_cmd->add_flag("--no-complexity", ens.no_complexity, "Skip compressibility and Lyapunov exponent");
  ens_cmd->add_flag("--lyapunov-all", ens.lyapunov_all, "Average k over every perturbation position");
  ens_cmd->add_option("--perturb-bit", ens.perturb_bit, "Perturbed organism cell for k")->capture_default_str();
  ens_cmd->add_option("--norm-samples", ens.norm_samples, "Random ECA sampled for the C normaliser")->capture_default_str();
  ens_cmd->add_option("--norm-steps", ens.norm_steps, "Step cap of each normaliser run")->capture_default_str();
  ens_cmd->add_option("--norm-seed", ens.norm_seed, "Seed of the normaliser sample")->capture_default_str();
  ens_cmd->add_option("--norm-cache", ens.norm_cache, "Normalisation cache file");
  ens_cmd->add_option("--csv", ens.csv, "Records CSV")->capture_default_str();
  ens_cmd->add_option("--report", ens.report, "Report JSON")->capture_default_str();

  OracleOptions orc;
  auto* orc_cmd = app.add_subcommand("oracle", "Build or verify the counterfactual trajectory cache");
  orc_cmd->add_option("--width", orc.width, "State width (3..5)")->capture_default_str();
  orc_cmd->add_option("--cache", orc.cache, "Cache file (default oracle_w<width>.bin)");
  orc_cmd->add_flag("--verify", orc.verify, "Check an existing cache against a fresh enumeration");
  orc_cmd->add_option("--check", orc.check, "Cross-check this many Case I windows against the rule-constraint test");
  orc_cmd->add_option("--seed", orc.seed, "Seed for --check draws")->capture_default_str();

  NormOptions nrm;
  auto* nrm_cmd = app.add_subcommand("norm", "Compute compressibility normalisation constants");
  nrm_cmd->add_option("--width", nrm.widths, "Full-system width(s)")->required()->expected(1, -1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  nrm_cmd->add_option("--samples", nrm.samples, "Random ECA per width")->capture_default_str();
  nrm_cmd->add_option("--steps", nrm.steps, "Step cap per run")->capture_default_str();
  nrm_cmd->add_option("--seed", nrm.seed, "Sample seed")->capture_default_str();
  nrm_cmd->add_option("--cache", nrm.cache, "Cache file")->capture_default_str();

  AnalyzeOptions ana;
  auto* ana_cmd = app.add_subcommand("analyze", "Rebuild a report and plots from a records CSV");
  ana_cmd->add_option("--csv", ana.csv, "Records CSV")->required();
  ana_cmd->add_option("--out-dir", ana.out_dir, "Output directory")->capture_default_str();
  ana_cmd->add_flag("--no-replay", ana.no_replay, "Skip replaying executions for the metagenome");

  RenderOptions ren;
  auto* ren_cmd = app.add_subcommand("render", "Draw a wide run as a PGM image");
  ren_cmd->add_option("--variant", ren.variant, "case1 | case2 | case3 | eca")->capture_default_str();
  ren_cmd->add_option("--wo", ren.w_o, "Organism width")->capture_default_str();
  ren_cmd->add_option("--we", ren.w_e, "Environment width (case1)")->capture_default_str();
  ren_cmd->add_option("--steps", ren.steps, "Rows (time steps)")->capture_default_str();
  ren_cmd->add_option("--seed", ren.seed, "Seed for initial states and rules")->capture_default_str();
  ren_cmd->add_option("--rule-o", ren.rule_o, "Initial organism rule (default: random canonical)");
  ren_cmd->add_option("--rule-e", ren.rule_e, "Environment rule (default: random canonical)");
  ren_cmd->add_option("--mu", ren.mu, "Case III flip probability")->capture_default_str();
  ren_cmd->add_flag("--with-env", ren.with_env, "Append the environment to the right of each row");
  ren_cmd->add_option("--out", ren.out, "PGM file")->capture_default_str();

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
  } catch (const DataError& e) {
    std::cerr << "oee: " << e.what() << '\n';
    return kExitData;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*ens_cmd) return cmd_ensemble(ens, g);
    if (*orc_cmd) return cmd_oracle(orc);
    if (*nrm_cmd) return cmd_norm(nrm, g);
    if (*ana_cmd) return cmd_analyze(ana, g);
    if (*ren_cmd) return cmd_render(ren);
  } catch (const DataError& e) {
    std::cerr << "oee: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "oee: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "oee: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "oee: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace oee
