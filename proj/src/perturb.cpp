#include "pram/perturb.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace pram {

namespace {

inline double canonical(std::mt19937_64& rng) {
  // 53 uniform bits in [0, 1); identical on every conforming platform.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

CategoricalColumn CategoricalColumn::validated(std::vector<int> values,
                                               std::vector<std::string> labels) {
  const int k = static_cast<int>(labels.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r] < 0 || values[r] >= k)
      throw ValidationError("column: value out of range at record " +
                            std::to_string(r));
  }
  CategoricalColumn col;
  col.values = std::move(values);
  col.labels = std::move(labels);
  return col;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

Perturber::Perturber(const TransitionMatrix& m) : k_(m.k) {
  cum_.resize(static_cast<std::size_t>(k_));
  dest_.resize(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < k_; ++j) {
      if (m.block_of[static_cast<std::size_t>(i)] !=
          m.block_of[static_cast<std::size_t>(j)])
        continue;
      acc += m.at(i, j);
      cum_[static_cast<std::size_t>(i)].push_back(acc);
      dest_[static_cast<std::size_t>(i)].push_back(j);
    }
  }
}

void Perturber::apply(const std::vector<int>& in, std::uint64_t seed,
                      int partitions, std::vector<int>& out) const {
  if (partitions < 1) throw ValidationError("perturb: partitions must be >= 1");
  const std::size_t n = in.size();
  out.resize(n);
  const std::size_t chunk =
      (n + static_cast<std::size_t>(partitions) - 1) /
      static_cast<std::size_t>(partitions);
  for (int p = 0; p < partitions; ++p) {
    const std::size_t lo = static_cast<std::size_t>(p) * chunk;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + chunk);
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(p)));
    for (std::size_t r = lo; r < hi; ++r) {
      const auto row = static_cast<std::size_t>(in[r]);
      const double u = canonical(rng);
      const auto& cum = cum_[row];
      const auto& dest = dest_[row];
      std::size_t j = 0;
      while (j + 1 < cum.size() && u >= cum[j]) ++j;
      out[r] = dest[j];
    }
  }
}

CategoricalColumn perturb(const CategoricalColumn& col, const TransitionMatrix& m,
                          std::uint64_t seed, int partitions) {
  if (static_cast<int>(col.labels.size()) != m.k)
    throw ValidationError("perturb: column and matrix category counts differ");
  const Perturber perturber(m);
  CategoricalColumn released;
  released.labels = col.labels;
  perturber.apply(col.values, seed, partitions, released.values);
  return released;
}

FrequencyTable frequencies(const CategoricalColumn& col) {
  FrequencyTable table;
  table.labels = col.labels;
  table.counts.assign(col.labels.size(), 0);
  for (int v : col.values) ++table.counts[static_cast<std::size_t>(v)];
  table.n = col.size();
  return table;
}

}  // namespace pram
