#include "dagsel/pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dagsel/errors.hpp"
#include "dagsel/rng.hpp"
#include "dagsel/summation.hpp"

namespace dagsel {

GameConfig::GameConfig(int n_validators, int block_capacity)
    : n_validators_(n_validators), block_capacity_(block_capacity) {
  if (n_validators < 2)
    throw std::invalid_argument("n_validators must be >= 2");
  if (block_capacity < 1)
    throw std::invalid_argument("block_capacity must be >= 1");
}

void require_capacity(const GameConfig& config, std::size_t m) {
  if (static_cast<std::size_t>(config.block_capacity()) > m)
    throw InfeasibleCapacity("block capacity " +
                             std::to_string(config.block_capacity()) +
                             " exceeds pool size " + std::to_string(m));
}

TransactionPool::TransactionPool(std::vector<double> fees)
    : fees_(std::move(fees)) {
  if (fees_.empty()) throw std::invalid_argument("transaction pool is empty");
  for (std::size_t i = 0; i < fees_.size(); ++i) {
    if (!(std::isfinite(fees_[i]) && fees_[i] > 0.0))
      throw std::invalid_argument("fee at position " + std::to_string(i) +
                                  " is not a positive number");
  }
  std::sort(fees_.begin(), fees_.end(), std::greater<>());
}

double TransactionPool::total_fee() const { return pairwise_sum(fees_); }

FeeLevels::FeeLevels(std::vector<FeeLevel> levels) : levels_(std::move(levels)) {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].count == 0)
      throw std::invalid_argument("fee level with zero count");
    if (i > 0 && !(levels_[i].value < levels_[i - 1].value))
      throw std::invalid_argument("fee levels must be strictly descending");
    total_ += levels_[i].count;
  }
}

std::vector<double> FeeLevels::expand() const {
  std::vector<double> out;
  out.reserve(total_);
  for (const auto& lv : levels_) out.insert(out.end(), lv.count, lv.value);
  return out;
}

FeeLevels group_fee_levels(const TransactionPool& pool) {
  std::vector<FeeLevel> levels;
  for (double fee : pool.fees()) {
    if (!levels.empty() && levels.back().value == fee)
      ++levels.back().count;
    else
      levels.push_back({fee, 1});
  }
  return FeeLevels(std::move(levels));
}

std::vector<double> zipf_probabilities(int max_fee, double shape) {
  if (max_fee < 1) throw std::invalid_argument("max_fee must be >= 1");
  if (!(shape >= 0.0)) throw std::invalid_argument("shape must be >= 0");
  std::vector<double> w(static_cast<std::size_t>(max_fee));
  for (int i = 1; i <= max_fee; ++i) w[i - 1] = std::pow(i, -shape);
  const double c = pairwise_sum(w);
  for (double& x : w) x /= c;
  return w;
}

TransactionPool zipf_pool(const ZipfSpec& spec) {
  if (spec.m < 1) throw std::invalid_argument("pool size must be >= 1");
  const std::vector<double> prob = zipf_probabilities(spec.max_fee, spec.shape);
  std::vector<double> cdf(prob.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) cdf[i] = (acc += prob[i]);
  cdf.back() = 1.0;

  Xoshiro256 rng(spec.seed);
  std::vector<double> fees(spec.m);
  for (double& fee : fees) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    fee = static_cast<double>(std::distance(cdf.begin(), it) + 1);
  }
  return TransactionPool(std::move(fees));
}

MarginalStrategy validate_marginals(std::vector<double> q,
                                    const GameConfig& config) {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!(q[i] >= 0.0 && q[i] <= 1.0)) throw BoundViolation(i);
  const double b = config.block_capacity();
  const double sum = pairwise_sum(q);
  if (std::abs(sum - b) > kMarginalSumRelTol * b) throw SumMismatch(sum, b);
  return MarginalStrategy(std::move(q));
}

namespace {

bool is_json_path(const std::filesystem::path& path) {
  return path.extension() == ".json";
}

bool is_text_path(const std::filesystem::path& path) {
  const auto ext = path.extension();
  return ext == ".txt" || ext == ".csv";
}

std::string format_fee(double fee) {
  char buf[64];
  if (fee == std::floor(fee) && fee < 9.007199254740992e15)
    std::snprintf(buf, sizeof buf, "%.0f", fee);
  else
    std::snprintf(buf, sizeof buf, "%.17g", fee);
  return buf;
}

}  // namespace

TransactionPool read_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pool file '" + path.string() + "'");
  std::vector<double> fees;
  try {
    if (is_json_path(path)) {
      const auto doc = nlohmann::json::parse(in);
      if (!doc.is_array()) throw std::invalid_argument("expected a JSON array");
      for (const auto& v : doc) {
        if (!v.is_number()) throw std::invalid_argument("non-numeric entry");
        fees.push_back(v.get<double>());
      }
    } else if (is_text_path(path)) {
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r,");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r,");
        const std::string token = line.substr(first, last - first + 1);
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size())
          throw std::invalid_argument("line " + std::to_string(lineno) +
                                      ": trailing characters");
        fees.push_back(v);
      }
    } else {
      throw std::invalid_argument("unsupported extension (use .txt, .csv or .json)");
    }
    return TransactionPool(std::move(fees));
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("invalid pool file '" + path.string() + "': " + e.what());
  }
}

void write_pool(const std::filesystem::path& path,
                const TransactionPool& pool) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write pool file '" + path.string() + "'");
  if (is_json_path(path)) {
    out << '[';
    for (std::size_t i = 0; i < pool.size(); ++i)
      out << (i ? "," : "") << format_fee(pool.fees()[i]);
    out << "]\n";
  } else {
    for (double fee : pool.fees()) out << format_fee(fee) << '\n';
  }
  if (!out) throw IoError("failed writing pool file '" + path.string() + "'");
}

}  // namespace dagsel
