#include "dagsel/waterfilling.hpp"

#include <stdexcept>
#include <string>

#include "dagsel/errors.hpp"

namespace dagsel {
namespace {

constexpr double kRootRelTol = 1e-12;
// Enough halvings to reach the smallest subnormal from any double bracket.
constexpr int kRootMaxIter = 1100;

// G over a prefix, without the z > 0 check; z = 0 yields the right limit
// sum k_h - b because clamped_inverse(0) = 1.
double coverage_gap(double z, std::size_t prefix, const FeeLevels& levels,
                    const GameConfig& config, const ShareModel& model) {
  double covered = 0.0;
  for (std::size_t h = 0; h < prefix; ++h)
    covered += static_cast<double>(levels[h].count) *
               model.clamped_inverse(z / levels[h].value);
  return covered - config.block_capacity();
}

}  // namespace

double g_ell(double z, std::size_t prefix, const FeeLevels& levels,
             const GameConfig& config, const ShareModel& model) {
  if (!(z > 0.0)) throw DomainError("g_ell: z must be positive");
  if (prefix < 1 || prefix > levels.size())
    throw std::out_of_range("g_ell: level index " + std::to_string(prefix) +
                            " outside 1.." + std::to_string(levels.size()));
  return coverage_gap(z, prefix, levels, config, model);
}

CoverageRoot find_kmax_and_root(const FeeLevels& levels,
                                const GameConfig& config,
                                const ShareModel& model) {
  require_capacity(config, levels.transaction_count());

  std::size_t k_max = 0;
  for (std::size_t l = 1; l <= levels.size(); ++l) {
    if (coverage_gap(levels[l - 1].value, l, levels, config, model) > 0.0)
      break;
    k_max = l;
  }
  // G_1(v_1) = -b always holds, so the covered prefix is never empty.
  if (k_max == 0) throw InfeasibleCapacity("no fee level can be covered");

  if (coverage_gap(0.0, k_max, levels, config, model) < 0.0)
    throw InfeasibleCapacity("block capacity exceeds the covered levels");

  // G is nonincreasing; keep G(hi) <= 0 < G(lo) and shrink toward the
  // smallest root.
  double lo = 0.0;
  double hi = levels[0].value * model.at_zero();
  for (int it = 0; it < kRootMaxIter && hi - lo > kRootRelTol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (coverage_gap(mid, k_max, levels, config, model) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return {k_max, hi};
}

WaterfillingSolution theorem_equilibrium(const FeeLevels& levels,
                                         const GameConfig& config,
                                         Mechanism mechanism) {
  const ShareModel model(mechanism, config.n_validators());
  const std::size_t m = levels.transaction_count();
  require_capacity(config, m);

  std::vector<double> q_levels(levels.size(), 0.0);
  std::vector<double> p;
  p.reserve(m);

  if (static_cast<std::size_t>(config.block_capacity()) == m) {
    for (std::size_t l = 0; l < levels.size(); ++l)
      q_levels[l] = static_cast<double>(levels[l].count);
    p.assign(m, 1.0);
    const double c = levels[levels.size() - 1].value * model.at_one();
    return {levels.size(), c, std::move(q_levels),
            validate_marginals(std::move(p), config)};
  }

  const CoverageRoot root = find_kmax_and_root(levels, config, model);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const double coverage =
        l < root.k_max ? model.clamped_inverse(root.c / levels[l].value) : 0.0;
    q_levels[l] = static_cast<double>(levels[l].count) * coverage;
    p.insert(p.end(), levels[l].count, coverage);
  }
  return {root.k_max, root.c, std::move(q_levels),
          validate_marginals(std::move(p), config)};
}

}  // namespace dagsel
