#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pram/types.hpp"

namespace pram {

/// A single categorical variable: integer codes plus the label for each code.
struct CategoricalColumn {
  std::vector<int> values;
  std::vector<std::string> labels;

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }

  /// Checked constructor: every value must index into labels.
  static CategoricalColumn validated(std::vector<int> values,
                                     std::vector<std::string> labels);
};

/// Name of the generator behind every stream in this library.
inline constexpr const char* kRngName = "mt19937_64";

/// Derives a child seed from a master seed and a stream index via the
/// splitmix64 finalizer. Fixed across platforms and versions.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Precomputed per-row samplers for repeated perturbation with one matrix.
/// Sampling is inverse-CDF over the in-block destinations of each row, so a
/// record can never leave its category's block.
class Perturber {
 public:
  explicit Perturber(const TransitionMatrix& m);

  int k() const { return k_; }

  /// Resamples every record. Records are split into `partitions` contiguous
  /// chunks; chunk p draws from mt19937_64 seeded with mix_seed(seed, p),
  /// one variate per record in order. partitions == 1 is the default
  /// everywhere and gives bit-identical output on every platform.
  void apply(const std::vector<int>& in, std::uint64_t seed, int partitions,
             std::vector<int>& out) const;

 private:
  int k_ = 0;
  std::vector<std::vector<double>> cum_;
  std::vector<std::vector<int>> dest_;
};

/// Releases a perturbed copy of the column using the matrix rows as
/// per-record resampling distributions.
CategoricalColumn perturb(const CategoricalColumn& col, const TransitionMatrix& m,
                          std::uint64_t seed, int partitions = 1);

/// Observed counts per label. Returned unvalidated: an empty column yields
/// all-zero counts and validation is deferred to the consumer.
FrequencyTable frequencies(const CategoricalColumn& col);

}  // namespace pram
