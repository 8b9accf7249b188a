#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dagsel {

/// N symmetric validators, each filling a block of b transactions.
class GameConfig {
 public:
  GameConfig(int n_validators, int block_capacity);

  int n_validators() const noexcept { return n_validators_; }
  int block_capacity() const noexcept { return block_capacity_; }

 private:
  int n_validators_;
  int block_capacity_;
};

/// Throws InfeasibleCapacity when b > m.
void require_capacity(const GameConfig& config, std::size_t m);

/// The shared mempool: m positive fees in descending order.
class TransactionPool {
 public:
  /// Sorts descending. Throws std::invalid_argument on an empty list or a
  /// fee that is not a finite positive number.
  explicit TransactionPool(std::vector<double> fees);

  std::span<const double> fees() const noexcept { return fees_; }
  std::size_t size() const noexcept { return fees_.size(); }
  double max_fee() const noexcept { return fees_.front(); }
  double total_fee() const;

 private:
  std::vector<double> fees_;
};

struct FeeLevel {
  double value;
  std::size_t count;
};

/// Distinct fee values with multiplicities, strictly descending by value.
class FeeLevels {
 public:
  explicit FeeLevels(std::vector<FeeLevel> levels);

  std::span<const FeeLevel> levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  const FeeLevel& operator[](std::size_t i) const { return levels_[i]; }
  std::size_t transaction_count() const noexcept { return total_; }

  /// Repeat each value `count` times; reproduces the sorted pool.
  std::vector<double> expand() const;

 private:
  std::vector<FeeLevel> levels_;
  std::size_t total_ = 0;
};

FeeLevels group_fee_levels(const TransactionPool& pool);

/// Zipf-like fees: value i in {1..max_fee} drawn with weight i^(-shape).
struct ZipfSpec {
  int max_fee = 10;
  double shape = 0.0;
  std::size_t m = 1000;
  std::uint64_t seed = 0;
};

/// i.i.d. draws by inverse-CDF lookup on a Xoshiro256 stream seeded with
/// spec.seed; sorted descending. Deterministic given the spec.
TransactionPool zipf_pool(const ZipfSpec& spec);

/// Normalized Zipf weights i^(-shape)/C for i = 1..max_fee (index i-1).
std::vector<double> zipf_probabilities(int max_fee, double shape);

/// Marginal inclusion probabilities: each in [0,1], summing to b.
class MarginalStrategy {
 public:
  std::span<const double> values() const noexcept { return q_; }
  std::size_t size() const noexcept { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  operator std::span<const double>() const noexcept { return q_; }

 private:
  explicit MarginalStrategy(std::vector<double> q) : q_(std::move(q)) {}
  friend MarginalStrategy validate_marginals(std::vector<double> q,
                                             const GameConfig& config);

  std::vector<double> q_;
};

inline constexpr double kMarginalSumRelTol = 1e-9;

/// Throws BoundViolation(index) for the first q_i outside [0,1] and
/// SumMismatch when |sum q - b| > 1e-9 b.
MarginalStrategy validate_marginals(std::vector<double> q,
                                    const GameConfig& config);

/// One positive number per line (.txt, .csv) or a JSON array (.json).
/// Throws IoError with the path on any read or parse failure.
TransactionPool read_pool(const std::filesystem::path& path);
void write_pool(const std::filesystem::path& path, const TransactionPool& pool);

}  // namespace dagsel
