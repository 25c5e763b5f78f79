#pragma once

#include <cstdint>
#include <vector>

#include "pram/perturb.hpp"
#include "pram/types.hpp"

namespace pram {

/// One replicate's released counts and intruder outcome.
struct ReplicateStat {
  std::vector<std::int64_t> released_counts;
  bool correct_match = false;
};

/// Runs `replicates` independent perturbations of the column and reports the
/// mean squared error of the released proportions against the column's own
/// proportions, plus the intruder game's success fraction for the target
/// category. Replicate r perturbs with seed mix_seed(master_seed, 2r) and
/// plays the game with seed mix_seed(master_seed, 2r+1), so the report is a
/// pure function of (column, matrix, target, replicates, master_seed)
/// regardless of the job count. Error accumulation uses compensated sums
/// combined in replicate order.
SimulationReport run_replicates(const CategoricalColumn& col,
                                const TransitionMatrix& m, int target_index,
                                std::int64_t replicates, std::uint64_t master_seed,
                                int jobs = 1,
                                std::vector<ReplicateStat>* trace = nullptr);

/// Plays one round of the intruder game on a released column: picks
/// uniformly among the records showing target_category and succeeds when the
/// pick is the designated target record. No records showing the category
/// means failure.
bool intruder_game(const CategoricalColumn& released, std::int64_t target_record,
                   int target_category, std::uint64_t seed);

struct ConditionalEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t kept = 0;
};

/// Monte Carlo estimate of the correct-match probability conditional on the
/// released target count equalling a, by rejection on that count. The
/// column is materialized from the frequency table in label order and the
/// target record is its first target-category record; replicate r perturbs
/// with seed mix_seed(seed, r). kept == 0 (the count never hit a) is
/// reported, not thrown.
ConditionalEstimate estimate_conditional_r1(const FrequencyTable& freq,
                                            const BlockPlan& plan,
                                            const TransitionMatrix& m,
                                            std::int64_t a, std::int64_t replicates,
                                            std::uint64_t seed);

}  // namespace pram
