#include "pram/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pram {

namespace {

bool degenerate_level(std::int64_t t1, double xi) {
  return xi >= 1.0 / static_cast<double>(t1);
}

BlockPlan noop_plan(const FrequencyTable& freq, int target_index,
                    double xi_requested, double xi_achieved) {
  std::vector<std::vector<int>> blocks;
  blocks.reserve(static_cast<std::size_t>(freq.k()));
  for (int i = 0; i < freq.k(); ++i) blocks.push_back({i});
  return BlockPlan::validated(freq, target_index, xi_requested, xi_achieved, 0.0,
                              std::move(blocks));
}

// Smallest integer m with 1/m <= xi, with fixups against rounding drift.
int relaxation_anchor(double xi) {
  int m = static_cast<int>(std::ceil(1.0 / xi));
  while (m > 1 && 1.0 / static_cast<double>(m - 1) <= xi) --m;
  while (1.0 / static_cast<double>(m) > xi) ++m;
  return m;
}

}  // namespace

double psi(std::int64_t t1, double theta) {
  if (t1 < 1) throw ValidationError("psi: T1 must be at least 1");
  const double t = static_cast<double>(t1);
  if (!(theta >= 0.0 && theta <= t))
    throw ValidationError("psi: theta outside [0, T1]");
  return (t - theta) / (t * (t - theta) + theta * theta);
}

double solve_theta(std::int64_t t1, double xi) {
  if (t1 < 1) throw ValidationError("solve_theta: T1 must be at least 1");
  if (!(xi > 0.0 && xi < 1.0))
    throw ValidationError("solve_theta: xi outside (0, 1)");
  if (degenerate_level(t1, xi))
    throw ValidationError(
        "solve_theta: xi >= 1/T1, the unperturbed release already meets it");

  const double t = static_cast<double>(t1);
  const double a = xi;
  const double b = 1.0 - xi * t;
  const double c = xi * t * t - t;
  if (!(b > 0.0))
    throw ValidationError(
        "solve_theta: xi >= 1/T1, the unperturbed release already meets it");
  // c < 0 and b > 0, so the parabola has one root on each side of zero; the
  // positive one lies in (0, T1). Dividing the product of roots by the
  // larger-magnitude root avoids cancellation.
  const double disc = b * b - 4.0 * a * c;
  const double q = -0.5 * (b + std::sqrt(disc));
  const double theta = c / q;
  if (!(theta > 0.0 && theta < t))
    throw std::logic_error("solve_theta: root escaped (0, T1)");
  if (std::abs(psi(t1, theta) - xi) > 1e-10)
    throw std::logic_error("solve_theta: residual exceeds 1e-10");
  return theta;
}

int min_block_size(std::int64_t t1, double xi) {
  if (t1 < 1) throw ValidationError("min_block_size: T1 must be at least 1");
  if (!(xi > 0.0 && xi < 1.0))
    throw ValidationError("min_block_size: xi outside (0, 1)");
  if (degenerate_level(t1, xi)) return 2;
  const double theta = solve_theta(t1, xi);
  const double t = static_cast<double>(t1);
  const std::int64_t k1 = detail::guarded_ceil(t / (t - theta));
  return static_cast<int>(std::max<std::int64_t>(2, k1));
}

std::array<std::array<int, 7>, 10> block_size_table() {
  std::array<std::array<int, 7>, 10> table{};
  for (int t1 = 1; t1 <= 10; ++t1) {
    for (std::size_t c = 0; c < kBlockTableXi.size(); ++c)
      table[static_cast<std::size_t>(t1 - 1)][c] =
          min_block_size(t1, kBlockTableXi[c]);
  }
  return table;
}

BlockPlan plan_blocks(const FrequencyTable& freq, int target_index, double xi) {
  if (target_index < 0 || target_index >= freq.k())
    throw ValidationError("plan: target index out of range");
  if (!(xi > 0.0 && xi < 1.0)) throw ValidationError("plan: xi outside (0, 1)");
  const std::int64_t t1 = freq.counts[static_cast<std::size_t>(target_index)];
  if (t1 < 1) throw ValidationError("plan: target category has no records");

  if (degenerate_level(t1, xi)) return noop_plan(freq, target_index, xi, xi);

  // Categories that may share the target's block, cheapest distortion first.
  std::vector<int> qualifying;
  for (int j = 0; j < freq.k(); ++j) {
    if (j != target_index && freq.counts[static_cast<std::size_t>(j)] >= t1)
      qualifying.push_back(j);
  }
  std::sort(qualifying.begin(), qualifying.end(), [&](int a, int b) {
    const auto ca = freq.counts[static_cast<std::size_t>(a)];
    const auto cb = freq.counts[static_cast<std::size_t>(b)];
    return ca != cb ? ca < cb : a < b;
  });

  auto feasible = [&](double level) {
    const int k1 = min_block_size(t1, level);
    return static_cast<std::size_t>(k1 - 1) <= qualifying.size();
  };
  auto make_plan = [&](double level) {
    const int k1 = min_block_size(t1, level);
    const double theta = solve_theta(t1, level);
    std::vector<int> members(qualifying.begin(), qualifying.begin() + (k1 - 1));
    members.push_back(target_index);
    std::sort(members.begin(), members.end());
    std::vector<std::vector<int>> blocks;
    blocks.push_back(std::move(members));
    for (int j = 0; j < freq.k(); ++j) {
      if (std::find(blocks[0].begin(), blocks[0].end(), j) == blocks[0].end())
        blocks.push_back({j});
    }
    return BlockPlan::validated(freq, target_index, xi, level, theta,
                                std::move(blocks));
  };

  if (feasible(xi)) return make_plan(xi);

  // Relax along 1/(n*-1), 1/(n*-2), ..., 1/2. Once the level reaches 1/T1
  // the unperturbed release is already safe at that level.
  const int anchor = relaxation_anchor(xi);
  for (int denom = anchor - 1; denom >= 2; --denom) {
    const double level = 1.0 / static_cast<double>(denom);
    if (degenerate_level(t1, level))
      return noop_plan(freq, target_index, xi, level);
    if (feasible(level)) return make_plan(level);
  }

  const std::size_t m = qualifying.size();
  double best = 1.0;
  if (m >= 1) {
    const double t = static_cast<double>(t1);
    const double theta_cap = t * static_cast<double>(m) /
                             static_cast<double>(m + 1);
    best = psi(t1, theta_cap);
  }
  throw PlanningError(
      "plan: only " + std::to_string(m) + " categories hold at least " +
          std::to_string(t1) +
          " records; not enough for any level down to 1/2 (best achievable " +
          "bound " + std::to_string(best) + ")",
      best);
}

}  // namespace pram
