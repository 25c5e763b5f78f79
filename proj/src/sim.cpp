#include "pram/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <string>

namespace pram {

namespace {

constexpr std::int64_t kRepsPerTask = 64;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct TaskResult {
  std::vector<double> sq_error;   // plain sums within one task
  std::vector<double> proportion;
  std::int64_t matches = 0;
  std::vector<ReplicateStat> stats;
};

bool game_on_values(const std::vector<int>& released, std::int64_t target_record,
                    int target_category, std::uint64_t seed) {
  std::int64_t shown = 0;
  for (int v : released) shown += (v == target_category);
  if (shown == 0) return false;
  std::mt19937_64 rng(seed);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  std::int64_t pick = static_cast<std::int64_t>(u * static_cast<double>(shown));
  pick = std::min(pick, shown - 1);
  for (std::size_t r = 0; r < released.size(); ++r) {
    if (released[r] == target_category && pick-- == 0)
      return static_cast<std::int64_t>(r) == target_record;
  }
  return false;
}

}  // namespace

bool intruder_game(const CategoricalColumn& released, std::int64_t target_record,
                   int target_category, std::uint64_t seed) {
  if (target_record < 0 || target_record >= released.size())
    throw ValidationError("game: target record out of range");
  if (target_category < 0 ||
      target_category >= static_cast<int>(released.labels.size()))
    throw ValidationError("game: target category out of range");
  return game_on_values(released.values, target_record, target_category, seed);
}

SimulationReport run_replicates(const CategoricalColumn& col,
                                const TransitionMatrix& m, int target_index,
                                std::int64_t replicates, std::uint64_t master_seed,
                                int jobs, std::vector<ReplicateStat>* trace) {
  if (replicates < 1)
    throw ValidationError("simulate: replicates must be at least 1");
  if (static_cast<int>(col.labels.size()) != m.k)
    throw ValidationError("simulate: column and matrix category counts differ");
  if (target_index < 0 || target_index >= m.k)
    throw ValidationError("simulate: target index out of range");
  const std::int64_t n = col.size();
  if (n == 0) throw ValidationError("simulate: column has no records");

  std::int64_t target_record = -1;
  for (std::size_t r = 0; r < col.values.size(); ++r) {
    if (col.values[r] == target_index) {
      target_record = static_cast<std::int64_t>(r);
      break;
    }
  }
  if (target_record < 0)
    throw ValidationError("simulate: target category has no records");

  const std::size_t k = col.labels.size();
  std::vector<double> base(k, 0.0);
  for (int v : col.values) base[static_cast<std::size_t>(v)] += 1.0;
  for (double& b : base) b /= static_cast<double>(n);

  const Perturber perturber(m);
  const std::int64_t tasks = (replicates + kRepsPerTask - 1) / kRepsPerTask;

  auto run_task = [&](std::int64_t task) {
    TaskResult result;
    result.sq_error.assign(k, 0.0);
    result.proportion.assign(k, 0.0);
    std::vector<int> released;
    std::vector<std::int64_t> counts(k, 0);
    const std::int64_t lo = task * kRepsPerTask;
    const std::int64_t hi = std::min(replicates, lo + kRepsPerTask);
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      perturber.apply(col.values,
                      mix_seed(master_seed, static_cast<std::uint64_t>(2 * rep)),
                      1, released);
      std::fill(counts.begin(), counts.end(), 0);
      for (int v : released) ++counts[static_cast<std::size_t>(v)];
      for (std::size_t j = 0; j < k; ++j) {
        const double prop =
            static_cast<double>(counts[j]) / static_cast<double>(n);
        const double d = prop - base[j];
        result.sq_error[j] += d * d;
        result.proportion[j] += prop;
      }
      const bool match = game_on_values(
          released, target_record, target_index,
          mix_seed(master_seed, static_cast<std::uint64_t>(2 * rep + 1)));
      result.matches += match;
      if (trace) result.stats.push_back({counts, match});
    }
    return result;
  };

  std::vector<TaskResult> results(static_cast<std::size_t>(tasks));
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks)));
  if (workers == 1) {
    for (std::int64_t t = 0; t < tasks; ++t)
      results[static_cast<std::size_t>(t)] = run_task(t);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::future<void>> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.push_back(std::async(std::launch::async, [&]() {
        for (std::int64_t t = next.fetch_add(1); t < tasks;
             t = next.fetch_add(1))
          results[static_cast<std::size_t>(t)] = run_task(t);
      }));
    }
    for (auto& f : pool) f.get();
  }

  // Combine in task order so the report is independent of scheduling.
  std::vector<KahanSum> sq(k), prop(k);
  std::int64_t matches = 0;
  for (auto& result : results) {
    for (std::size_t j = 0; j < k; ++j) {
      sq[j].add(result.sq_error[j]);
      prop[j].add(result.proportion[j]);
    }
    matches += result.matches;
    if (trace)
      for (auto& stat : result.stats) trace->push_back(std::move(stat));
  }

  SimulationReport report;
  report.replicates = replicates;
  report.master_seed = master_seed;
  report.rng_name = kRngName;
  report.mse_per_category.resize(k);
  report.mean_proportion_per_category.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    report.mse_per_category[j] = sq[j].sum / static_cast<double>(replicates);
    report.mean_proportion_per_category[j] =
        prop[j].sum / static_cast<double>(replicates);
  }
  report.avg_correct_match =
      static_cast<double>(matches) / static_cast<double>(replicates);
  return report;
}

ConditionalEstimate estimate_conditional_r1(const FrequencyTable& freq,
                                            const BlockPlan& plan,
                                            const TransitionMatrix& m,
                                            std::int64_t a, std::int64_t replicates,
                                            std::uint64_t seed) {
  if (a < 1) throw ValidationError("estimate: released count must be >= 1");
  if (replicates < 1)
    throw ValidationError("estimate: replicates must be at least 1");
  if (plan.is_noop())
    throw ValidationError("estimate: needs a perturbing plan");
  if (freq.k() != m.k)
    throw ValidationError("estimate: matrix and table sizes differ");

  CategoricalColumn col;
  col.labels = freq.labels;
  for (int c = 0; c < freq.k(); ++c) {
    for (std::int64_t copies = 0;
         copies < freq.counts[static_cast<std::size_t>(c)]; ++copies)
      col.values.push_back(c);
  }
  std::int64_t target_record = -1;
  for (std::size_t r = 0; r < col.values.size(); ++r) {
    if (col.values[r] == plan.target_index) {
      target_record = static_cast<std::int64_t>(r);
      break;
    }
  }
  if (target_record < 0)
    throw ValidationError("estimate: target category has no records");

  const Perturber perturber(m);
  std::vector<int> released;
  std::int64_t kept = 0;
  std::int64_t hits = 0;
  for (std::int64_t rep = 0; rep < replicates; ++rep) {
    perturber.apply(col.values, mix_seed(seed, static_cast<std::uint64_t>(rep)),
                    1, released);
    std::int64_t shown = 0;
    for (int v : released) shown += (v == plan.target_index);
    if (shown != a) continue;
    ++kept;
    hits += (released[static_cast<std::size_t>(target_record)] ==
             plan.target_index);
  }

  ConditionalEstimate estimate;
  estimate.kept = kept;
  if (kept == 0) {
    estimate.mean = std::numeric_limits<double>::quiet_NaN();
    estimate.std_error = std::numeric_limits<double>::quiet_NaN();
    return estimate;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(kept);
  estimate.mean = p / static_cast<double>(a);
  estimate.std_error =
      std::sqrt(p * (1.0 - p) / static_cast<double>(kept)) /
      static_cast<double>(a);
  return estimate;
}

}  // namespace pram
