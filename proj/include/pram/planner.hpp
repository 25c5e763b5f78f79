#pragma once

#include <array>
#include <cstdint>

#include "pram/types.hpp"

namespace pram {

/// Worst-case probability that an intruder correctly re-identifies a unit of
/// a category with t1 copies after perturbation with spread theta:
///   psi(t1, theta) = (t1 - theta) / (t1 * (t1 - theta) + theta^2).
/// Strictly decreasing in theta on [0, t1], from 1/t1 down to 0.
double psi(std::int64_t t1, double theta);

/// Solves psi(t1, theta) = xi for theta in (0, t1). Requires xi < 1/t1;
/// at or above that level the unperturbed release already meets the bound.
/// Uses the stable closed form of the quadratic
///   xi*theta^2 + (1 - xi*t1)*theta + (xi*t1^2 - t1) = 0,
/// computing the larger-magnitude root first and the other from the product.
double solve_theta(std::int64_t t1, double xi);

/// Minimum number of categories a block must contain so that a target
/// category with t1 copies can be protected at level xi:
///   ceil(t1 / (t1 - theta*)) with a 1e-9 integrality guard, never below 2.
/// For degenerate levels (xi >= 1/t1) returns 2, the smallest block that
/// perturbs at all.
int min_block_size(std::int64_t t1, double xi);

inline constexpr std::array<double, 7> kBlockTableXi = {0.1,   0.125, 0.15, 0.175,
                                                        0.2,   0.25,  0.3};

/// Minimum block sizes for t1 = 1..10 across the seven reference levels.
std::array<std::array<int, 7>, 10> block_size_table();

/// Chooses the protection block for one target category: solves for theta at
/// the requested level, picks the smallest-count qualifying categories to
/// fill the block, and leaves every other category in a singleton block.
/// If the level is unattainable with the available categories, retries on
/// the relaxation grid 1/(n*-1), 1/(n*-2), ..., 1/2 where n* is the
/// smallest integer with 1/n* <= xi, and reports the achieved level.
/// Emits a no-op plan when the target is already safe (xi >= 1/T1).
/// Throws PlanningError if even xi = 1/2 cannot be met.
BlockPlan plan_blocks(const FrequencyTable& freq, int target_index, double xi);

}  // namespace pram
