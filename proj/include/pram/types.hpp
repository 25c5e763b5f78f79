#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pram {

/// Input or configuration violated a documented precondition.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No block satisfying the requested security level exists for the given
/// frequency table. Carries the tightest level the data could support.
class PlanningError : public std::runtime_error {
 public:
  PlanningError(const std::string& message, double best_achievable_xi)
      : std::runtime_error(message), best_achievable_xi_(best_achievable_xi) {}
  double best_achievable_xi() const noexcept { return best_achievable_xi_; }

 private:
  double best_achievable_xi_;
};

/// Filesystem-level failure: missing file, unreadable stream, failed write.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
// Ceiling with a tolerance window: values within tol of an integer snap to
// that integer instead of being pushed up by rounding noise.
std::int64_t guarded_ceil(double x, double tol = 1e-9);
}  // namespace detail

/// Category labels with their observed counts. Immutable after construction.
struct FrequencyTable {
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;

  int k() const { return static_cast<int>(labels.size()); }
};

/// Checked constructor for FrequencyTable. Enforces: at least two uniquely
/// labelled categories, non-negative counts, and a positive total.
FrequencyTable validate_frequency_table(std::vector<std::string> labels,
                                        std::vector<std::int64_t> counts);

/// Result of planning a perturbation for one target category: the solved
/// spread parameter theta, the achieved security level, and the block
/// partition of the categories. theta == 0 encodes a no-op plan (every
/// category in its own singleton block, data released unchanged).
struct BlockPlan {
  int target_index = 0;
  double xi_requested = 0.0;
  double xi_achieved = 0.0;
  double theta = 0.0;
  std::vector<std::vector<int>> blocks;
  int k1 = 1;  // size of the block containing target_index

  bool is_noop() const { return theta == 0.0; }
  bool relaxed() const { return xi_achieved > xi_requested; }
  const std::vector<int>& target_block() const;

  /// Checked constructor. Enforces that blocks partition the categories,
  /// theta lies in [0, T1) with theta > 0 only for a genuine block, every
  /// in-block category has count >= T1, and k1 covers the minimum size
  /// implied by theta.
  static BlockPlan validated(const FrequencyTable& freq, int target_index,
                             double xi_requested, double xi_achieved,
                             double theta, std::vector<std::vector<int>> blocks);
};

/// Row-stochastic block-diagonal transition matrix. p is row-major k x k;
/// p[i*k + j] is the probability a record of category i is released as
/// category j. Entries across different blocks are exactly zero.
struct TransitionMatrix {
  int k = 0;
  std::vector<double> p;
  std::vector<int> block_of;

  double at(int i, int j) const { return p[static_cast<std::size_t>(i) * k + j]; }
  double& at(int i, int j) { return p[static_cast<std::size_t>(i) * k + j]; }
  std::vector<int> block_members(int block_id) const;

  /// Checked constructor: rows sum to 1 within 1e-12, entries in [0,1],
  /// cross-block entries exactly zero, singleton blocks get identity rows.
  static TransitionMatrix validated(int k, std::vector<double> p,
                                    std::vector<int> block_of);
};

/// Per-category odds of landing in the target category after perturbation,
/// restricted to the target's block. alpha[i] is the column entry
/// p(members[i] -> target); beta[i] = alpha[i] / (1 - alpha[i]).
/// t_star holds the in-block counts with one record (the target unit)
/// removed from the target category.
struct OddsVector {
  std::vector<int> members;  // category indices of the target's block, ascending
  int target_pos = 0;        // position of the target category within members
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::int64_t> t_star;

  double beta_target() const { return beta[static_cast<std::size_t>(target_pos)]; }
  std::int64_t total_t_star() const;
};

/// Exact re-identification risk by released target count a, the closed-form
/// bound, and the certified maximum.
struct RiskProfile {
  std::map<std::int64_t, double> r1_by_a;
  double psi_bound = 0.0;
  double max_risk = 0.0;
  double xi_target = 0.0;
  std::int64_t argmax_a = 0;
  bool certified = false;
};

/// Summary of a Monte Carlo run: per-category mean squared error of the
/// released proportions against the original ones, and the intruder's
/// empirical correct-match rate.
struct SimulationReport {
  std::int64_t replicates = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> mse_per_category;
  std::vector<double> mean_proportion_per_category;
  double avg_correct_match = 0.0;
  std::string rng_name;
};

}  // namespace pram
