#include "pram/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace pram {

namespace detail {

std::int64_t guarded_ceil(double x, double tol) {
  double r = std::round(x);
  if (std::abs(x - r) <= tol) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace detail

FrequencyTable validate_frequency_table(std::vector<std::string> labels,
                                        std::vector<std::int64_t> counts) {
  if (labels.empty() || counts.empty())
    throw ValidationError("frequency table: labels and counts must be non-empty");
  if (labels.size() != counts.size())
    throw ValidationError("frequency table: labels and counts differ in length");
  if (labels.size() < 2)
    throw ValidationError("frequency table: fewer than 2 categories");
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second)
      throw ValidationError("frequency table: duplicate label '" + label + "'");
  }
  std::int64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0)
      throw ValidationError("frequency table: negative count at index " +
                            std::to_string(i));
    n += counts[i];
  }
  if (n < 1) throw ValidationError("frequency table: no records");
  FrequencyTable t;
  t.labels = std::move(labels);
  t.counts = std::move(counts);
  t.n = n;
  return t;
}

const std::vector<int>& BlockPlan::target_block() const {
  for (const auto& block : blocks) {
    if (std::find(block.begin(), block.end(), target_index) != block.end())
      return block;
  }
  throw ValidationError("plan: target category missing from every block");
}

BlockPlan BlockPlan::validated(const FrequencyTable& freq, int target_index,
                               double xi_requested, double xi_achieved,
                               double theta,
                               std::vector<std::vector<int>> blocks) {
  const int k = freq.k();
  if (target_index < 0 || target_index >= k)
    throw ValidationError("plan: target index out of range");
  if (!(xi_requested > 0.0 && xi_requested < 1.0))
    throw ValidationError("plan: xi_requested outside (0, 1)");
  if (!(xi_achieved > 0.0 && xi_achieved < 1.0))
    throw ValidationError("plan: xi_achieved outside (0, 1)");
  if (xi_achieved < xi_requested)
    throw ValidationError("plan: achieved level below the requested one");

  std::vector<int> seen(static_cast<std::size_t>(k), 0);
  for (auto& block : blocks) {
    if (block.empty()) throw ValidationError("plan: empty block");
    std::sort(block.begin(), block.end());
    for (int idx : block) {
      if (idx < 0 || idx >= k)
        throw ValidationError("plan: block index out of range");
      if (seen[static_cast<std::size_t>(idx)]++)
        throw ValidationError("plan: category " + std::to_string(idx) +
                              " appears in more than one block");
    }
  }
  for (int i = 0; i < k; ++i) {
    if (!seen[static_cast<std::size_t>(i)])
      throw ValidationError("plan: category " + std::to_string(i) +
                            " missing from the partition");
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  const std::int64_t t1 = freq.counts[static_cast<std::size_t>(target_index)];
  if (t1 < 1) throw ValidationError("plan: target category has no records");

  BlockPlan plan;
  plan.target_index = target_index;
  plan.xi_requested = xi_requested;
  plan.xi_achieved = xi_achieved;
  plan.theta = theta;
  plan.blocks = std::move(blocks);

  const std::vector<int>& target_block = plan.target_block();
  plan.k1 = static_cast<int>(target_block.size());

  if (theta == 0.0) {
    for (const auto& block : plan.blocks) {
      if (block.size() > 1)
        throw ValidationError("plan: no-op plan must use singleton blocks");
    }
    return plan;
  }
  if (!(theta > 0.0 && theta < static_cast<double>(t1)))
    throw ValidationError("plan: theta outside (0, T1)");
  for (int idx : target_block) {
    if (freq.counts[static_cast<std::size_t>(idx)] < t1)
      throw ValidationError("plan: in-block category " + std::to_string(idx) +
                            " has fewer records than the target");
  }
  const double k_min =
      static_cast<double>(t1) / (static_cast<double>(t1) - theta);
  if (plan.k1 < detail::guarded_ceil(k_min))
    throw ValidationError("plan: block smaller than the minimum size for theta");
  return plan;
}

std::vector<int> TransitionMatrix::block_members(int block_id) const {
  std::vector<int> members;
  for (int i = 0; i < k; ++i) {
    if (block_of[static_cast<std::size_t>(i)] == block_id) members.push_back(i);
  }
  return members;
}

TransitionMatrix TransitionMatrix::validated(int k, std::vector<double> p,
                                             std::vector<int> block_of) {
  if (k < 1) throw ValidationError("matrix: needs at least one category");
  if (p.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k))
    throw ValidationError("matrix: entry count is not k*k");
  if (block_of.size() != static_cast<std::size_t>(k))
    throw ValidationError("matrix: block map length is not k");

  TransitionMatrix m;
  m.k = k;
  m.p = std::move(p);
  m.block_of = std::move(block_of);

  std::vector<int> block_sizes;
  for (int i = 0; i < k; ++i) {
    const int b = m.block_of[static_cast<std::size_t>(i)];
    if (b < 0) throw ValidationError("matrix: negative block id");
    if (b >= static_cast<int>(block_sizes.size()))
      block_sizes.resize(static_cast<std::size_t>(b) + 1, 0);
    ++block_sizes[static_cast<std::size_t>(b)];
  }

  for (int i = 0; i < k; ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double v = m.at(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("matrix: entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside [0, 1]");
      if (m.block_of[static_cast<std::size_t>(i)] !=
              m.block_of[static_cast<std::size_t>(j)] &&
          v != 0.0)
        throw ValidationError("matrix: nonzero entry crosses blocks at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("matrix: row " + std::to_string(i) +
                            " does not sum to 1");
    const int b = m.block_of[static_cast<std::size_t>(i)];
    if (block_sizes[static_cast<std::size_t>(b)] == 1 && m.at(i, i) != 1.0)
      throw ValidationError("matrix: singleton row " + std::to_string(i) +
                            " is not identity");
  }
  return m;
}

std::int64_t OddsVector::total_t_star() const {
  std::int64_t total = 0;
  for (std::int64_t t : t_star) total += t;
  return total;
}

}  // namespace pram
