#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dagsel/optim.hpp"
#include "dagsel/strategies.hpp"

namespace dagsel {

enum class SweepParameter { M, MaxFee, S };

/// "m", "maxFee", "s".
std::string_view to_string(SweepParameter p);
/// Accepts m, maxfee / maxFee, s.
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

/// Base setting: 10 validators, blocks of 100, 1000 transactions with fees
/// uniform on 1..10, 50 replicates.
struct SweepBase {
  int n_validators = 10;
  int block_capacity = 100;
  std::size_t m = 1000;
  int max_fee = 10;
  double shape = 0.0;
  int sim = 50;
  std::uint64_t seed = 1;
};

struct SweepSpec {
  SweepParameter vary = SweepParameter::M;
  std::vector<double> values;
  SweepBase base;
  std::vector<StrategyKind> strategies{StrategyKind::RTS, StrategyKind::PTS,
                                       StrategyKind::NE_RFA,
                                       StrategyKind::NE_CFS};
  SolverConfig solver;

  /// Throws std::invalid_argument on empty or non-increasing values, an
  /// empty strategy list or nonpositive base fields.
  void validate() const;
};

/// m: 100..10000 log-spaced; maxFee: 5..100 step 5; s: 0..1.4 step 0.1.
std::vector<double> paper_grid(SweepParameter p);

struct SweepRow {
  std::string vary_name;
  double vary_value = 0.0;
  StrategyKind strategy = StrategyKind::RTS;
  double theta_tx_mean = 0.0;
  double theta_tx_std = 0.0;
  double theta_fee_mean = 0.0;
  double theta_fee_std = 0.0;
  int runs = 0;
  std::uint64_t seed = 0;
  bool failed = false;  // written as nan (CSV) / null (JSON)
};

/// Seed of replicate `replicate` at value index `value_index`:
/// derive_seed(base_seed, value_index, replicate).
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t value_index,
                             std::size_t replicate);

/// For every value: draw `sim` Zipf pools, evaluate every strategy on each
/// pool with the analytic throughput formulas and aggregate mean and sample
/// std over replicates. Rows are ordered by value, then strategy. A cell
/// whose construction throws is marked failed.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

enum class ResultFormat { CSV, JSON };

inline constexpr std::string_view kResultsHeader =
    "vary_name,vary_value,strategy,theta_tx_mean,theta_tx_std,"
    "theta_fee_mean,theta_fee_std,runs,seed";

/// Decimal notation with 9 significant digits, trailing zeros trimmed.
std::string format_decimal(double x);

std::string render_results(const std::vector<SweepRow>& rows,
                           ResultFormat format);

/// Throws IoError with the path on failure.
void write_results(const std::vector<SweepRow>& rows,
                   const std::filesystem::path& path, ResultFormat format);

/// Parses a CSV produced by write_results. Throws IoError on a schema
/// mismatch.
std::vector<SweepRow> read_results_csv(const std::filesystem::path& path);

}  // namespace dagsel
