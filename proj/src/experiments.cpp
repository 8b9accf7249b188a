#include "dagsel/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dagsel/errors.hpp"
#include "dagsel/metrics.hpp"
#include "dagsel/rng.hpp"
#include "dagsel/summation.hpp"

namespace dagsel {
namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(std::span<const double> xs) {
  Moments out;
  out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      sq[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
    out.std = std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
  }
  return out;
}

struct CellSetting {
  GameConfig config;
  ZipfSpec zipf;
};

CellSetting setting_for(const SweepSpec& spec, double value) {
  SweepBase b = spec.base;
  switch (spec.vary) {
    case SweepParameter::M: b.m = static_cast<std::size_t>(std::llround(value)); break;
    case SweepParameter::MaxFee: b.max_fee = static_cast<int>(std::lround(value)); break;
    case SweepParameter::S: b.shape = value; break;
  }
  return {GameConfig(b.n_validators, b.block_capacity),
          ZipfSpec{b.max_fee, b.shape, b.m, 0}};
}

std::string number_or_null(double x, bool failed, bool json) {
  if (failed) return json ? "null" : "nan";
  return format_decimal(x);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::M: return "m";
    case SweepParameter::MaxFee: return "maxFee";
    case SweepParameter::S: return "s";
  }
  return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "m") return SweepParameter::M;
  if (lower == "maxfee") return SweepParameter::MaxFee;
  if (lower == "s") return SweepParameter::S;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep has no values");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw std::invalid_argument("sweep values must be strictly increasing");
  if (strategies.empty()) throw std::invalid_argument("no strategies selected");
  if (base.n_validators < 2 || base.block_capacity < 1 || base.m < 1 ||
      base.max_fee < 1 || base.sim < 1 || !(base.shape >= 0.0))
    throw std::invalid_argument("invalid base parameters");
  for (double v : values) {
    if (vary == SweepParameter::S && !(v >= 0.0))
      throw std::invalid_argument("Zipf shape values must be >= 0");
    if (vary != SweepParameter::S && !(v >= 1.0 && v == std::floor(v)))
      throw std::invalid_argument("m and maxFee values must be positive integers");
  }
  solver.validate();
}

std::vector<double> paper_grid(SweepParameter p) {
  std::vector<double> grid;
  switch (p) {
    case SweepParameter::M:
      grid = {100, 200, 500, 1000, 2000, 5000, 10000};
      break;
    case SweepParameter::MaxFee:
      for (int v = 5; v <= 100; v += 5) grid.push_back(v);
      break;
    case SweepParameter::S:
      for (int i = 0; i <= 14; ++i) grid.push_back(i / 10.0);
      break;
  }
  return grid;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t value_index,
                             std::size_t replicate) {
  return derive_seed(base_seed, value_index, replicate);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n_strat = spec.strategies.size();
  const auto sim = static_cast<std::size_t>(spec.base.sim);
  std::vector<SweepRow> rows;
  rows.reserve(spec.values.size() * n_strat);

  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    CellSetting setting = setting_for(spec, spec.values[vi]);
    std::vector<std::vector<double>> tx(n_strat), fee(n_strat);
    std::vector<bool> failed(n_strat, false);

    for (std::size_t r = 0; r < sim; ++r) {
      setting.zipf.seed = replicate_seed(spec.base.seed, vi, r);
      const TransactionPool pool = zipf_pool(setting.zipf);
      for (std::size_t s = 0; s < n_strat; ++s) {
        if (failed[s]) continue;
        try {
          const MarginalStrategy q =
              make_strategy(spec.strategies[s], pool, setting.config, spec.solver);
          tx[s].push_back(effective_tx_throughput(q, setting.config));
          fee[s].push_back(effective_fee_throughput(q, pool, setting.config));
        } catch (const std::exception&) {
          failed[s] = true;
        }
      }
    }

    for (std::size_t s = 0; s < n_strat; ++s) {
      SweepRow row;
      row.vary_name = std::string(to_string(spec.vary));
      row.vary_value = spec.values[vi];
      row.strategy = spec.strategies[s];
      row.seed = spec.base.seed;
      row.failed = failed[s];
      if (!row.failed) {
        const Moments t = moments(tx[s]);
        const Moments f = moments(fee[s]);
        row.theta_tx_mean = t.mean;
        row.theta_tx_std = t.std;
        row.theta_fee_mean = f.mean;
        row.theta_fee_std = f.std;
        row.runs = static_cast<int>(tx[s].size());
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_decimal(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char sci[64];
  std::snprintf(sci, sizeof sci, "%.8e", x);
  const double rounded = std::strtod(sci, nullptr);
  const int exponent = std::atoi(std::strchr(sci, 'e') + 1);
  const int decimals = std::max(0, 8 - exponent);
  char fixed[512];
  std::snprintf(fixed, sizeof fixed, "%.*f", decimals, rounded);
  std::string out(fixed);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

std::string render_results(const std::vector<SweepRow>& rows,
                           ResultFormat format) {
  std::ostringstream out;
  if (format == ResultFormat::CSV) {
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
      out << r.vary_name << ',' << format_decimal(r.vary_value) << ','
          << to_string(r.strategy) << ','
          << number_or_null(r.theta_tx_mean, r.failed, false) << ','
          << number_or_null(r.theta_tx_std, r.failed, false) << ','
          << number_or_null(r.theta_fee_mean, r.failed, false) << ','
          << number_or_null(r.theta_fee_std, r.failed, false) << ',' << r.runs
          << ',' << r.seed << '\n';
    }
    return out.str();
  }
  out << '[';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << (i ? ",\n " : "\n ") << "{\"vary_name\":\"" << r.vary_name
        << "\",\"vary_value\":" << format_decimal(r.vary_value)
        << ",\"strategy\":\"" << to_string(r.strategy)
        << "\",\"theta_tx_mean\":" << number_or_null(r.theta_tx_mean, r.failed, true)
        << ",\"theta_tx_std\":" << number_or_null(r.theta_tx_std, r.failed, true)
        << ",\"theta_fee_mean\":" << number_or_null(r.theta_fee_mean, r.failed, true)
        << ",\"theta_fee_std\":" << number_or_null(r.theta_fee_std, r.failed, true)
        << ",\"runs\":" << r.runs << ",\"seed\":" << r.seed << '}';
  }
  out << (rows.empty() ? "]\n" : "\n]\n");
  return out.str();
}

void write_results(const std::vector<SweepRow>& rows,
                   const std::filesystem::path& path, ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results file '" + path.string() + "'");
  out << render_results(rows, format);
  if (!out) throw IoError("failed writing results file '" + path.string() + "'");
}

std::vector<SweepRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw IoError("results file '" + path.string() + "' has an unexpected header");
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected 9 fields");
    try {
      SweepRow r;
      r.vary_name = f[0];
      r.vary_value = std::stod(f[1]);
      const auto kind = parse_strategy_kind(f[2]);
      if (!kind) throw std::invalid_argument("unknown strategy " + f[2]);
      r.strategy = *kind;
      r.failed = f[3] == "nan";
      if (!r.failed) {
        r.theta_tx_mean = std::stod(f[3]);
        r.theta_tx_std = std::stod(f[4]);
        r.theta_fee_mean = std::stod(f[5]);
        r.theta_fee_std = std::stod(f[6]);
      }
      r.runs = std::stoi(f[7]);
      r.seed = std::stoull(f[8]);
      rows.push_back(std::move(r));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace dagsel
