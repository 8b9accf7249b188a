#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dagsel {

/// Argument outside the mathematical domain of a share function or its inverse.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Block capacity cannot be realized: b exceeds the number of transactions
/// (or the total coverage the fee levels can absorb).
class InfeasibleCapacity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A marginal probability lies outside [0, 1].
class BoundViolation : public std::invalid_argument {
 public:
  explicit BoundViolation(std::size_t index)
      : std::invalid_argument("marginal probability out of [0,1] at index " +
                              std::to_string(index)),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Marginals do not sum to the block capacity.
class SumMismatch : public std::invalid_argument {
 public:
  SumMismatch(double sum, double capacity)
      : std::invalid_argument("marginals sum to " + std::to_string(sum) +
                              ", expected " + std::to_string(capacity)),
        sum_(sum),
        capacity_(capacity) {}

  double sum() const noexcept { return sum_; }
  double capacity() const noexcept { return capacity_; }

 private:
  double sum_;
  double capacity_;
};

/// The equilibrium solver stopped without meeting its convergence test.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read, written or parsed. The message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dagsel
