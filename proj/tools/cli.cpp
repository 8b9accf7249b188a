#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dagsel/errors.hpp"
#include "dagsel/experiments.hpp"
#include "dagsel/mc.hpp"
#include "dagsel/metrics.hpp"
#include "dagsel/optim.hpp"
#include "dagsel/pool.hpp"
#include "dagsel/strategies.hpp"

namespace dagsel::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PoolFlags {
  std::string file;
  std::string zipf;
};

struct GameFlags {
  int n = 10;
  int b = 100;
};

struct SolverFlags {
  std::optional<double> tol;
  std::optional<int> max_iters;

  SolverConfig config() const {
    SolverConfig cfg;
    if (tol) cfg.tol = *tol;
    if (max_iters) cfg.max_iters = *max_iters;
    return cfg;
  }
};

struct StrategyFlags {
  std::string file;
  std::string model;
  std::string mechanism;
};

void add_pool_flags(CLI::App* cmd, PoolFlags& f) {
  auto* file = cmd->add_option("--pool", f.file,
                               "Fee file: .txt/.csv one fee per line, .json array");
  auto* zipf = cmd->add_option("--zipf", f.zipf,
                               "Synthetic pool as maxfee,s,m,seed");
  file->excludes(zipf);
}

void add_game_flags(CLI::App* cmd, GameFlags& f) {
  cmd->add_option("--n", f.n, "Number of validators")->capture_default_str();
  cmd->add_option("--b", f.b, "Block capacity")->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--tol", f.tol, "Stop when the iterate moves less than this");
  cmd->add_option("--max-iters", f.max_iters, "Iteration cap of the solver");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("invalid " + what + ": '" + text + "'");
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  if (text.empty() ||
      !std::all_of(text.begin(), text.end(),
                   [](unsigned char c) { return std::isdigit(c); }))
    throw UsageError("invalid " + what + ": '" + text + "'");
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + ": '" + text + "'");
  }
}

TransactionPool load_pool(const PoolFlags& f) {
  if (f.file.empty() && f.zipf.empty())
    throw UsageError("a pool source is required: --pool FILE or --zipf maxfee,s,m,seed");
  if (!f.file.empty()) return read_pool(f.file);
  const auto parts = split(f.zipf, ',');
  if (parts.size() != 4)
    throw UsageError("--zipf expects maxfee,s,m,seed");
  const double max_fee = parse_number(parts[0], "Zipf maximum fee");
  const double shape = parse_number(parts[1], "Zipf shape");
  const std::uint64_t m = parse_unsigned(parts[2], "Zipf pool size");
  const std::uint64_t seed = parse_unsigned(parts[3], "Zipf seed");
  if (!(max_fee >= 1.0 && max_fee == static_cast<int>(max_fee)))
    throw UsageError("Zipf maximum fee must be a positive integer");
  if (!(shape >= 0.0)) throw UsageError("Zipf shape must be >= 0");
  if (m < 1) throw UsageError("Zipf pool size must be >= 1");
  return zipf_pool(ZipfSpec{static_cast<int>(max_fee), shape,
                            static_cast<std::size_t>(m), seed});
}

GameConfig make_game(const GameFlags& f, const TransactionPool& pool) {
  GameConfig config(f.n, f.b);
  require_capacity(config, pool.size());
  return config;
}

StrategyKind parse_kind(const std::string& name) {
  const auto kind = parse_strategy_kind(name);
  if (!kind) throw UsageError("unknown model '" + name + "'");
  return *kind;
}

Mechanism parse_mech(const std::string& name) {
  const auto mechanism = parse_mechanism(name);
  if (!mechanism) throw UsageError("unknown mechanism '" + name + "'");
  return *mechanism;
}

std::string model_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::RTS: return "rts";
    case StrategyKind::PTS: return "pts";
    case StrategyKind::NE_RFA: return "rfa";
    case StrategyKind::NE_CFS: return "cfs";
  }
  return "?";
}

/// The mechanism an equilibrium kind is solved for, if any.
std::optional<Mechanism> native_mechanism(StrategyKind kind) {
  if (kind == StrategyKind::NE_RFA) return Mechanism::RFA;
  if (kind == StrategyKind::NE_CFS) return Mechanism::CFS;
  return std::nullopt;
}

void emit(const std::string& text, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + out_path + "'");
  file << text;
  if (!file) throw IoError("failed writing '" + out_path + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct LoadedStrategy {
  MarginalStrategy q;
  std::optional<StrategyKind> kind;
};

LoadedStrategy read_strategy_file(const std::string& path,
                                  const TransactionPool& pool,
                                  const GameConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open strategy file '" + path + "'");
  try {
    const Json doc = Json::parse(in);
    const Json& q = doc.is_array() ? doc : doc.at("q");
    if (!q.is_array()) throw std::invalid_argument("\"q\" is not an array");
    std::vector<double> values;
    values.reserve(q.size());
    for (const auto& x : q) {
      if (!x.is_number()) throw std::invalid_argument("non-numeric entry in \"q\"");
      values.push_back(x.get<double>());
    }
    if (values.size() != pool.size())
      throw std::invalid_argument("strategy has " + std::to_string(values.size()) +
                                  " entries but the pool has " +
                                  std::to_string(pool.size()));
    std::optional<StrategyKind> kind;
    if (doc.is_object() && doc.contains("model") && doc["model"].is_string())
      kind = parse_strategy_kind(doc["model"].get<std::string>());
    return {validate_marginals(std::move(values), config), kind};
  } catch (const std::exception& e) {
    throw IoError("malformed strategy file '" + path + "': " + e.what());
  }
}

/// Strategy from --strategy FILE or --model KIND, with the mechanism used to
/// price it: --mechanism if given, else the kind's own, else RFA.
struct PricedStrategy {
  MarginalStrategy q;
  Mechanism mechanism;
};

PricedStrategy resolve_strategy(const StrategyFlags& f,
                                const TransactionPool& pool,
                                const GameConfig& config,
                                const SolverConfig& solver) {
  if (f.file.empty() == f.model.empty())
    throw UsageError("exactly one of --strategy FILE or --model KIND is required");
  std::optional<StrategyKind> kind;
  std::optional<MarginalStrategy> q;
  if (!f.file.empty()) {
    auto loaded = read_strategy_file(f.file, pool, config);
    kind = loaded.kind;
    q = std::move(loaded.q);
  } else {
    kind = parse_kind(f.model);
    q = make_strategy(*kind, pool, config, solver);
  }
  Mechanism mechanism = Mechanism::RFA;
  if (!f.mechanism.empty())
    mechanism = parse_mech(f.mechanism);
  else if (kind && native_mechanism(*kind))
    mechanism = *native_mechanism(*kind);
  return {std::move(*q), mechanism};
}

// ---- solve ----------------------------------------------------------------

struct SolveFlags {
  std::string model;
  std::string mechanism = "rfa";
  PoolFlags pool;
  GameFlags game;
  SolverFlags solver;
  std::string out;
};

int cmd_solve(const SolveFlags& f, std::ostream& out) {
  const StrategyKind kind = parse_kind(f.model);
  const Mechanism judged = native_mechanism(kind).value_or(parse_mech(f.mechanism));
  const TransactionPool pool = load_pool(f.pool);
  const GameConfig config = make_game(f.game, pool);
  const SolverConfig solver = f.solver.config();
  solver.validate();

  std::optional<MarginalStrategy> q;
  Json diag;
  bool converged = true;
  if (const auto mechanism = native_mechanism(kind)) {
    EquilibriumResult result = solve_ne(*mechanism, pool, config, solver);
    converged = result.converged;
    diag["iterations"] = result.iterations;
    diag["kkt_residual"] = result.kkt_residual;
    q = std::move(result.strategy);
  } else {
    q = make_strategy(kind, pool, config, solver);
    diag["iterations"] = 0;
    diag["kkt_residual"] = kkt_residual(judged, *q, pool, config);
  }
  diag["converged"] = converged;
  diag["ne_gap"] = ne_gap(judged, *q, pool, config);

  Json doc;
  doc["model"] = model_name(kind);
  doc["n"] = config.n_validators();
  doc["b"] = config.block_capacity();
  doc["q"] = std::vector<double>(q->values().begin(), q->values().end());
  doc["diagnostics"] = diag;
  emit(dump(doc), f.out, out);
  return converged ? kOk : kNotConverged;
}

// ---- metrics --------------------------------------------------------------

struct MetricsFlags {
  StrategyFlags strategy;
  PoolFlags pool;
  GameFlags game;
  SolverFlags solver;
  std::string out;
};

int cmd_metrics(const MetricsFlags& f, std::ostream& out) {
  const TransactionPool pool = load_pool(f.pool);
  const GameConfig config = make_game(f.game, pool);
  const SolverConfig solver = f.solver.config();
  solver.validate();
  const PricedStrategy s = resolve_strategy(f.strategy, pool, config, solver);
  const ThroughputReport report = throughput_report(s.mechanism, s.q, pool, config);

  Json doc;
  doc["theta_tx"] = report.theta_tx;
  doc["theta_fee"] = report.theta_fee;
  doc["per_validator_payoff"] = report.per_validator_payoff;
  doc["ne_gap"] = ne_gap(s.mechanism, s.q, pool, config);
  emit(dump(doc), f.out, out);
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateFlags {
  StrategyFlags strategy;
  PoolFlags pool;
  GameFlags game;
  SolverFlags solver;
  int runs = 50;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  if (f.runs < 1) throw UsageError("--runs must be >= 1");
  const TransactionPool pool = load_pool(f.pool);
  const GameConfig config = make_game(f.game, pool);
  const SolverConfig solver = f.solver.config();
  solver.validate();
  const PricedStrategy s = resolve_strategy(f.strategy, pool, config, solver);
  const SimulationReport r =
      simulate(s.q, pool, config, s.mechanism, f.runs, f.seed);

  Json doc;
  doc["runs"] = r.runs;
  doc["theta_tx_mean"] = r.theta_tx_mean;
  doc["theta_tx_std"] = r.theta_tx_std;
  doc["theta_fee_mean"] = r.theta_fee_mean;
  doc["theta_fee_std"] = r.theta_fee_std;
  doc["per_validator_reward_mean"] = r.per_validator_reward_mean;
  doc["per_validator_reward_std"] = r.per_validator_reward_std;
  doc["seed"] = r.seed;
  emit(dump(doc), f.out, out);
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepFlags {
  std::string vary;
  std::string values;
  bool paper_grid = false;
  std::string strategies = "rts,pts,rfa,cfs";
  std::string format = "csv";
  std::string out;
  SweepBase base;
  SolverFlags solver;
};

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  const auto vary = parse_sweep_parameter(f.vary);
  if (!vary) throw UsageError("--vary must be one of m, maxfee, s");
  if (f.paper_grid == !f.values.empty())
    throw UsageError("exactly one of --values or --paper-grid is required");

  SweepSpec spec;
  spec.vary = *vary;
  spec.base = f.base;
  spec.solver = f.solver.config();
  if (f.paper_grid) {
    spec.values = paper_grid(*vary);
  } else {
    for (const auto& item : split(f.values, ','))
      spec.values.push_back(parse_number(item, "sweep value"));
  }
  spec.strategies.clear();
  for (const auto& item : split(f.strategies, ','))
    spec.strategies.push_back(parse_kind(item));

  ResultFormat format;
  if (f.format == "csv")
    format = ResultFormat::CSV;
  else if (f.format == "json")
    format = ResultFormat::JSON;
  else
    throw UsageError("--format must be csv or json");

  const auto rows = run_sweep(spec);
  if (f.out.empty())
    out << render_results(rows, format);
  else
    write_results(rows, f.out, format);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Equilibrium transaction selection for DAG-based ledgers", "dagsel"};
  app.require_subcommand(1, 1);

  SolveFlags solve_f;
  auto* solve_cmd = app.add_subcommand("solve", "Compute a selection strategy");
  solve_cmd->add_option("--model", solve_f.model, "rfa, cfs, rts or pts")->required();
  solve_cmd->add_option("--mechanism", solve_f.mechanism,
                        "Mechanism used for rts/pts diagnostics")
      ->capture_default_str();
  add_pool_flags(solve_cmd, solve_f.pool);
  add_game_flags(solve_cmd, solve_f.game);
  add_solver_flags(solve_cmd, solve_f.solver);
  solve_cmd->add_option("--out", solve_f.out, "Write JSON here instead of stdout");

  MetricsFlags metrics_f;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "Analytic throughput of a strategy");
  metrics_cmd->add_option("--strategy", metrics_f.strategy.file,
                          "Strategy JSON written by solve");
  metrics_cmd->add_option("--model", metrics_f.strategy.model,
                          "Compute the strategy inline: rfa, cfs, rts or pts");
  metrics_cmd->add_option("--mechanism", metrics_f.strategy.mechanism,
                          "rfa or cfs (default: the strategy's own, else rfa)");
  add_pool_flags(metrics_cmd, metrics_f.pool);
  add_game_flags(metrics_cmd, metrics_f.game);
  add_solver_flags(metrics_cmd, metrics_f.solver);
  metrics_cmd->add_option("--out", metrics_f.out, "Write JSON here instead of stdout");

  SimulateFlags sim_f;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo realization of a strategy");
  sim_cmd->add_option("--strategy", sim_f.strategy.file,
                      "Strategy JSON written by solve");
  sim_cmd->add_option("--model", sim_f.strategy.model,
                      "Compute the strategy inline: rfa, cfs, rts or pts");
  sim_cmd->add_option("--mechanism", sim_f.strategy.mechanism,
                      "rfa or cfs (default: the strategy's own, else rfa)");
  add_pool_flags(sim_cmd, sim_f.pool);
  add_game_flags(sim_cmd, sim_f.game);
  add_solver_flags(sim_cmd, sim_f.solver);
  sim_cmd->add_option("--runs", sim_f.runs, "Number of simulated rounds")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_f.seed, "Base seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_f.out, "Write JSON here instead of stdout");

  SweepFlags sweep_f;
  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep over Zipf pools");
  sweep_cmd->add_option("--vary", sweep_f.vary, "m, maxfee or s")->required();
  sweep_cmd->add_option("--values", sweep_f.values, "Comma-separated values");
  sweep_cmd->add_flag("--paper-grid", sweep_f.paper_grid, "Use the built-in grid");
  sweep_cmd->add_option("--strategies", sweep_f.strategies,
                        "Comma-separated subset of rts,pts,rfa,cfs")
      ->capture_default_str();
  sweep_cmd->add_option("--format", sweep_f.format, "csv or json")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_f.out, "Write results here instead of stdout");
  sweep_cmd->add_option("--n", sweep_f.base.n_validators, "Number of validators")
      ->capture_default_str();
  sweep_cmd->add_option("--b", sweep_f.base.block_capacity, "Block capacity")
      ->capture_default_str();
  sweep_cmd->add_option("--m", sweep_f.base.m, "Pool size")->capture_default_str();
  sweep_cmd->add_option("--maxfee", sweep_f.base.max_fee, "Largest fee")
      ->capture_default_str();
  sweep_cmd->add_option("--s", sweep_f.base.shape, "Zipf shape")->capture_default_str();
  sweep_cmd->add_option("--sim", sweep_f.base.sim, "Replicates per value")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_f.base.seed, "Base seed")->capture_default_str();
  add_solver_flags(sweep_cmd, sweep_f.solver);

  CLI::App* active = nullptr;
  auto usage = [&](const std::string& message) {
    err << "error: " << message << "\n\n"
        << (active ? active->help() : app.help());
    return kUsage;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    if (!subs.empty()) active = subs.front();
    return usage(e.what());
  }
  active = app.get_subcommands().front();

  try {
    if (active == solve_cmd) return cmd_solve(solve_f, out);
    if (active == metrics_cmd) return cmd_metrics(metrics_f, out);
    if (active == sim_cmd) return cmd_simulate(sim_f, out);
    return cmd_sweep(sweep_f, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const UsageError& e) {
    return usage(e.what());
  } catch (const std::invalid_argument& e) {
    return usage(e.what());
  } catch (const InfeasibleCapacity& e) {
    return usage(e.what());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dagsel::cli
