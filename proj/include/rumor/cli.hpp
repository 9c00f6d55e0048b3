#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rumor/experiments.hpp"
#include "rumor/output.hpp"

namespace rumor::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kArgumentError = 2, kGenerationFailure = 3 };

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kSeedEnv = "RUMORBENCH_SEED";

/// Files are only written once the whole command has succeeded.
struct PendingFile {
  std::string path;
  std::string contents;
};

struct Outcome {
  output::Record record;
  std::vector<PendingFile> extra_files;
};

struct CommonOptions {
  std::string format = "csv";
  std::string out = "-";
  std::optional<std::uint64_t> seed;
  unsigned threads = default_thread_count();

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv(kSeedEnv); env && *env)
      return detail::parse_number<std::uint64_t>(env, kSeedEnv);
    return kDefaultSeed;
  }
};

inline void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opts.out, "Output path, '-' for stdout");
  cmd->add_option("--seed", opts.seed, "Master seed (default: $RUMORBENCH_SEED or 1)");
  cmd->add_option("--threads", opts.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

struct ProtocolOptions {
  std::string model = "random";
  std::string lists = "canonic";
  double failure = 0.0;
  bool paired = false;

  std::vector<ProtocolConfig> build() const {
    if (!(failure >= 0.0 && failure < 1.0)) throw std::invalid_argument("--failure must be in [0,1)");
    const ListPolicy policy = parse_list_policy(lists);
    const double f = 1.0 - failure;
    if (paired)
      return {ProtocolConfig{Model::FullyRandom, lists::Canonic{}, f}, ProtocolConfig{Model::Quasirandom, policy, f}};
    return {ProtocolConfig{parse_model(model), policy, f}};
  }

  void echo(output::Record& rec) const {
    if (paired) rec.config.emplace_back("paired", "true");
    else rec.config.emplace_back("model", model);
    rec.config.emplace_back("lists", lists);
    rec.config.emplace_back("failure", output::format_number(failure));
  }
};

inline void add_protocol(CLI::App* cmd, ProtocolOptions& opts) {
  cmd->add_option("--model", opts.model, "random | quasi")->check(CLI::IsMember({"random", "quasi"}));
  cmd->add_option("--lists", opts.lists, "canonic | random | lowdisc | explicit:<perm>");
  cmd->add_option("--failure", opts.failure, "Per-transmission loss probability in [0,1)");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  CommonOptions common;
  ProtocolOptions protocol;
  std::string graph;
  bool async = false;
  std::uint64_t reps = 100000;
  std::uint64_t resample_every = 1000;
  std::string histogram;
  double bin_width = 0.0;
  std::size_t max_attempts = kDefaultMaxAttempts;
  std::optional<std::uint32_t> max_round;
};

inline void add_experiment_options(CLI::App* cmd, SimulateOptions& o) {
  add_common(cmd, o.common);
  add_protocol(cmd, o.protocol);
  cmd->add_option("--graph", o.graph, "complete:N | hypercube:D | torus:S | gnp:N:P|lnn|2lnn | regular:N:D")
      ->required();
  cmd->add_option("--reps", o.reps, "Repetitions")->check(CLI::PositiveNumber);
  cmd->add_option("--resample-every", o.resample_every, "Runs per random graph sample")->check(CLI::PositiveNumber);
  cmd->add_flag("--paired", o.protocol.paired, "Run random and quasi on the same samples and start vertices");
  cmd->add_option("--max-attempts", o.max_attempts, "Connectivity retries per graph sample")
      ->check(CLI::PositiveNumber);
}

inline ExperimentConfig experiment_config(const SimulateOptions& o) {
  ExperimentConfig cfg;
  cfg.graph = parse_graph_spec(o.graph);
  cfg.protocols = o.protocol.build();
  cfg.async = o.async;
  cfg.reps = o.reps;
  cfg.resample_every = o.resample_every;
  cfg.master_seed = o.common.resolved_seed();
  cfg.bin_width = o.bin_width;
  cfg.threads = o.common.threads;
  cfg.max_attempts = o.max_attempts;
  cfg.validate();
  return cfg;
}

inline void echo_experiment(output::Record& rec, const SimulateOptions& o, const ExperimentConfig& cfg) {
  rec.config.emplace_back("graph", to_string(cfg.graph));
  o.protocol.echo(rec);
  rec.config.emplace_back("async", o.async ? "true" : "false");
  rec.config.emplace_back("reps", std::to_string(cfg.reps));
  rec.config.emplace_back("seed", std::to_string(cfg.master_seed));
  rec.config.emplace_back("resample-every", std::to_string(cfg.resample_every));
  rec.config.emplace_back("max-attempts", std::to_string(cfg.max_attempts));
}

inline Outcome cmd_simulate(const SimulateOptions& o) {
  const ExperimentConfig cfg = experiment_config(o);
  const auto est = estimate_broadcast(cfg);

  Outcome result;
  auto& rec = result.record;
  rec.experiment = "simulate";
  echo_experiment(rec, o, cfg);
  if (o.bin_width > 0.0) rec.config.emplace_back("bin-width", output::format_number(o.bin_width));
  rec.columns = {"model", "graph", "n", "reps", "mean", "std", "min", "max", "p50", "p90", "p99"};
  std::ostringstream hist;
  hist << "model,bin_lower,count\n";
  for (const auto& p : est.protocols) {
    const auto& s = p.stats;
    rec.rows.push_back({std::string(to_string(p.protocol.model)), to_string(cfg.graph),
                        std::int64_t{node_count(cfg.graph)}, static_cast<std::int64_t>(cfg.reps), s.mean, s.std_dev,
                        s.min, s.max, s.percentile(0.5), s.percentile(0.9), s.percentile(0.99)});
    for (const auto& bin : s.histogram)
      hist << to_string(p.protocol.model) << ',' << output::format_number(bin.lower_edge) << ',' << bin.count << '\n';
  }
  if (!o.histogram.empty()) result.extra_files.push_back({o.histogram, hist.str()});
  return result;
}

inline Outcome cmd_curve(const SimulateOptions& o) {
  if (o.async) throw std::invalid_argument("curve needs the synchronous model");
  const ExperimentConfig cfg = experiment_config(o);
  const auto curves = uninformed_curve(cfg, o.max_round);

  Outcome result;
  auto& rec = result.record;
  rec.experiment = "curve";
  echo_experiment(rec, o, cfg);
  if (o.max_round) rec.config.emplace_back("max-round", std::to_string(*o.max_round));
  rec.columns = {"round", "model", "mean_uninformed"};
  for (std::size_t j = 0; j < curves.size(); ++j)
    for (std::size_t t = 0; t < curves[j].size(); ++t)
      rec.rows.push_back({static_cast<std::int64_t>(t), std::string(to_string(cfg.protocols[j].model)), curves[j][t]});
  return result;
}

// ---------------------------------------------------------------------------
// torus-spread

struct TorusSpreadOptions {
  CommonOptions common;
  ProtocolOptions protocol;
  std::uint32_t side = 63;
  std::uint32_t steps = 50;
  std::uint64_t reps = 100000;
  std::string dump_cells;
};

inline Outcome cmd_torus_spread(const TorusSpreadOptions& o) {
  if (o.protocol.failure != 0.0) throw std::invalid_argument("torus-spread is lossless");
  validate(GraphSpec{spec::Torus{o.side}});
  if (o.reps < 1) throw std::invalid_argument("--reps must be >= 1");
  const auto protocol = o.protocol.build().front();
  const std::uint64_t seed = o.common.resolved_seed();
  const auto spread = torus_spread(o.side, protocol, o.steps, o.reps, seed, o.common.threads);

  Outcome result;
  auto& rec = result.record;
  rec.experiment = "torus-spread";
  rec.config = {{"side", std::to_string(o.side)},
                {"steps", std::to_string(o.steps)},
                {"model", o.protocol.model},
                {"lists", o.protocol.lists},
                {"reps", std::to_string(o.reps)},
                {"seed", std::to_string(seed)}};
  rec.columns = {"metric", "mean", "std"};
  auto row = [&](const char* name, const MeanStd& m) { rec.rows.push_back({std::string(name), m.mean, m.std_dev}); };
  row("informed_count", spread.informed_count);
  row("radius_in", spread.radius_in);
  row("radius_out", spread.radius_out);
  row("radius_diff", spread.radius_diff);
  row("normalized_diff", spread.normalized_diff);
  if (!o.dump_cells.empty()) {
    std::ostringstream cells;
    cells << "x,y\n";
    for (const auto& [x, y] : spread.first_snapshot) cells << x << ',' << y << '\n';
    result.extra_files.push_back({o.dump_cells, cells.str()});
  }
  return result;
}

// ---------------------------------------------------------------------------
// disc-sweep

struct DiscSweepOptions {
  CommonOptions common;
  std::uint32_t side = 32;
  std::string perms = "sample:300";
  std::uint64_t reps_per_perm = 200;
};

inline Outcome cmd_disc_sweep(const DiscSweepOptions& o) {
  validate(GraphSpec{spec::Torus{o.side}});
  if (o.reps_per_perm < 1) throw std::invalid_argument("--reps-per-perm must be >= 1");
  const std::uint64_t seed = o.common.resolved_seed();
  std::vector<DirectionPermutation> perms;
  if (o.perms == "all") {
    perms = all_permutations(8);
  } else if (o.perms.starts_with("sample:")) {
    const auto k = detail::parse_number<std::size_t>(std::string_view(o.perms).substr(7), "sample size");
    RandomSource rng = RandomSource::derived(seed, StreamPurpose::PermutationChoice, 0);
    perms = sample_permutations(8, k, rng);
  } else {
    throw std::invalid_argument("--perms must be 'all' or 'sample:<k>'");
  }
  const auto sweep = discrepancy_sweep(o.side, perms, o.reps_per_perm, seed, o.common.threads);

  Outcome result;
  auto& rec = result.record;
  rec.experiment = "disc-sweep";
  rec.config = {{"side", std::to_string(o.side)},
                {"perms", o.perms},
                {"reps-per-perm", std::to_string(o.reps_per_perm)},
                {"seed", std::to_string(seed)}};
  rec.columns = {"perm", "disc1", "disc2", "mean_time"};
  for (const auto& row : sweep.rows)
    rec.rows.push_back({format_permutation(row.perm, '-'), row.disc1, row.disc2, row.mean_time});
  rec.summary = {{"r2_l1", sweep.r2_l1}, {"r2_l2", sweep.r2_l2}};
  return result;
}

// ---------------------------------------------------------------------------
// analytic

struct AnalyticOptions {
  CommonOptions common;
  std::uint64_t n = 4096;
  std::string p = "lnn";
  std::uint64_t threshold = 5;
};

inline Outcome cmd_analytic(const AnalyticOptions& o) {
  if (o.n < 2 || o.n > std::numeric_limits<NodeId>::max()) throw std::invalid_argument("--n must be >= 2");
  const auto density = parse_density(static_cast<NodeId>(o.n), o.p);
  const double value = o.threshold == 0 ? 0.0 : expected_low_degree_count(o.n, density.p, o.threshold);
  Outcome result;
  auto& rec = result.record;
  rec.experiment = "analytic";
  rec.config = {{"n", std::to_string(o.n)}, {"p", o.p}, {"threshold", std::to_string(o.threshold)}};
  rec.columns = {"n", "p", "threshold", "expected_count"};
  rec.rows.push_back({static_cast<std::int64_t>(o.n), density.p, static_cast<std::int64_t>(o.threshold), value});
  return result;
}

// ---------------------------------------------------------------------------
// sweep (broadcast time against graph size)

struct SweepOptions {
  CommonOptions common;
  std::string family = "complete";
  std::uint32_t min_exp = 1;
  std::uint32_t max_exp = 13;
  std::uint64_t reps = 100000;
  std::string lists = "canonic";
};

inline Outcome cmd_sweep(const SweepOptions& o) {
  if (o.min_exp < 1 || o.max_exp < o.min_exp || o.max_exp > 20)
    throw std::invalid_argument("need 1 <= min-exp <= max-exp <= 20");
  std::vector<GraphSpec> specs;
  for (std::uint32_t e = o.min_exp; e <= o.max_exp; ++e) {
    if (o.family == "complete") specs.push_back(spec::Complete{NodeId{1} << e});
    else if (o.family == "hypercube") specs.push_back(spec::Hypercube{e});
    else throw std::invalid_argument("--family must be complete or hypercube");
  }
  ExperimentConfig base;
  base.protocols = {ProtocolConfig{Model::FullyRandom}, ProtocolConfig{Model::Quasirandom, parse_list_policy(o.lists)}};
  base.reps = o.reps;
  base.master_seed = o.common.resolved_seed();
  base.threads = o.common.threads;
  const auto rows = size_sweep(specs, base);

  Outcome result;
  auto& rec = result.record;
  rec.experiment = "sweep";
  rec.config = {{"family", o.family},
                {"min-exp", std::to_string(o.min_exp)},
                {"max-exp", std::to_string(o.max_exp)},
                {"lists", o.lists},
                {"reps", std::to_string(o.reps)},
                {"seed", std::to_string(base.master_seed)}};
  rec.columns = {"graph", "n", "model", "mean", "std"};
  for (const auto& r : rows) rec.rows.push_back({r.graph, std::int64_t{r.n}, r.protocol, r.mean, r.std_dev});
  return result;
}

// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << contents;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

/// Entry point shared by the rumorbench binary and the tests. args excludes
/// the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Push-protocol rumor spreading simulator"};
  app.name("rumorbench");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Broadcast-time statistics");
  add_experiment_options(simulate, sim);
  simulate->add_flag("--async", sim.async, "Continuous-time model with Exp(1) delays");
  simulate->add_option("--histogram", sim.histogram, "Write histogram rows to this path");
  simulate->add_option("--bin-width", sim.bin_width, "Histogram bin width (default 1, async 0.2)")
      ->check(CLI::PositiveNumber);

  SimulateOptions curve_opts;
  curve_opts.reps = 100000;
  auto* curve = app.add_subcommand("curve", "Mean uninformed nodes per round");
  add_experiment_options(curve, curve_opts);
  curve->add_option("--max-round", curve_opts.max_round, "Last round to report");

  TorusSpreadOptions spread;
  auto* torus = app.add_subcommand("torus-spread", "Informed-set geometry on the torus after a fixed number of rounds");
  add_common(torus, spread.common);
  add_protocol(torus, spread.protocol);
  torus->add_option("--side", spread.side, "Torus side length")->required();
  torus->add_option("--steps", spread.steps, "Rounds to run")->required();
  torus->add_option("--reps", spread.reps, "Repetitions")->check(CLI::PositiveNumber);
  torus->add_option("--dump-cells", spread.dump_cells, "Write run 0's informed cells as x,y rows");

  DiscSweepOptions disc;
  auto* sweep_cmd = app.add_subcommand("disc-sweep", "Broadcast time against list discrepancy on the torus");
  add_common(sweep_cmd, disc.common);
  sweep_cmd->add_option("--side", disc.side, "Torus side length");
  sweep_cmd->add_option("--perms", disc.perms, "all | sample:<k>");
  sweep_cmd->add_option("--reps-per-perm", disc.reps_per_perm, "Runs per permutation")->check(CLI::PositiveNumber);

  AnalyticOptions analytic;
  auto* analytic_cmd = app.add_subcommand("analytic", "Expected number of low-degree vertices in G(n,p)");
  add_common(analytic_cmd, analytic.common);
  analytic_cmd->add_option("--n", analytic.n, "Node count")->required();
  analytic_cmd->add_option("--p", analytic.p, "Edge probability, or lnn / 2lnn")->required();
  analytic_cmd->add_option("--threshold", analytic.threshold, "Count vertices of degree below this")->required();

  SweepOptions size;
  auto* size_cmd = app.add_subcommand("sweep", "Mean broadcast time for n = 2^min-exp .. 2^max-exp");
  add_common(size_cmd, size.common);
  size_cmd->add_option("--family", size.family, "complete | hypercube");
  size_cmd->add_option("--min-exp", size.min_exp, "Smallest exponent");
  size_cmd->add_option("--max-exp", size.max_exp, "Largest exponent");
  size_cmd->add_option("--lists", size.lists, "List policy for the quasirandom model");
  size_cmd->add_option("--reps", size.reps, "Repetitions per size")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "rumorbench: " << e.what() << '\n';
    return kArgumentError;
  }

  const CommonOptions* common = nullptr;
  try {
    Outcome result;
    if (simulate->parsed()) {
      common = &sim.common;
      result = cmd_simulate(sim);
    } else if (curve->parsed()) {
      common = &curve_opts.common;
      result = cmd_curve(curve_opts);
    } else if (torus->parsed()) {
      common = &spread.common;
      result = cmd_torus_spread(spread);
    } else if (sweep_cmd->parsed()) {
      common = &disc.common;
      result = cmd_disc_sweep(disc);
    } else if (analytic_cmd->parsed()) {
      common = &analytic.common;
      result = cmd_analytic(analytic);
    } else {
      common = &size.common;
      result = cmd_sweep(size);
    }

    std::ostringstream text;
    if (common->format == "json") output::write_json(text, result.record);
    else output::write_csv(text, result.record);
    if (common->out == "-") out << text.str();
    else write_text_file(common->out, text.str());
    for (const auto& file : result.extra_files) write_text_file(file.path, file.contents);
    return kOk;
  } catch (const GenerationFailure& e) {
    err << "rumorbench: graph generation failed: " << e.what() << '\n';
    return kGenerationFailure;
  } catch (const std::invalid_argument& e) {
    err << "rumorbench: " << e.what() << '\n';
    return kArgumentError;
  } catch (const UndefinedCorrelation& e) {
    err << "rumorbench: " << e.what() << '\n';
    return kArgumentError;
  } catch (const std::exception& e) {
    err << "rumorbench: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace rumor::cli
