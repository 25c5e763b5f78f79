#include "pram/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace pram {

TransitionMatrix build_ifpr(const FrequencyTable& freq, const BlockPlan& plan) {
  const int k = freq.k();
  std::vector<int> block_of(static_cast<std::size_t>(k), -1);
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    for (int idx : plan.blocks[b]) {
      if (idx < 0 || idx >= k)
        throw ValidationError("matrix: plan block index out of range");
      if (block_of[static_cast<std::size_t>(idx)] != -1)
        throw ValidationError("matrix: plan blocks overlap");
      block_of[static_cast<std::size_t>(idx)] = static_cast<int>(b);
    }
  }
  for (int i = 0; i < k; ++i) {
    if (block_of[static_cast<std::size_t>(i)] == -1)
      throw ValidationError("matrix: plan blocks do not cover category " +
                            std::to_string(i));
  }

  std::vector<double> p(static_cast<std::size_t>(k) * static_cast<std::size_t>(k),
                        0.0);
  for (int i = 0; i < k; ++i)
    p[static_cast<std::size_t>(i) * k + static_cast<std::size_t>(i)] = 1.0;

  for (const auto& block : plan.blocks) {
    const std::size_t kp = block.size();
    if (kp <= 1) continue;
    if (plan.theta <= 0.0)
      throw ValidationError("matrix: multi-category block with theta == 0");
    for (int i : block) {
      const double ti =
          static_cast<double>(freq.counts[static_cast<std::size_t>(i)]);
      if (plan.theta >= ti)
        throw ValidationError("matrix: theta >= count of in-block category " +
                              std::to_string(i));
      const double stay = 1.0 - plan.theta / ti;
      const double move =
          plan.theta / (static_cast<double>(kp - 1) * ti);
      for (int j : block)
        p[static_cast<std::size_t>(i) * k + static_cast<std::size_t>(j)] =
            (i == j) ? stay : move;
    }
  }
  return TransitionMatrix::validated(k, std::move(p), std::move(block_of));
}

StochasticCheck verify_row_stochastic(const TransitionMatrix& m) {
  StochasticCheck check;
  check.passed = true;
  for (int i = 0; i < m.k; ++i) {
    double sum = 0.0;
    bool in_range = true;
    for (int j = 0; j < m.k; ++j) {
      const double v = m.at(i, j);
      if (!(v >= 0.0 && v <= 1.0)) in_range = false;
      sum += v;
    }
    const double residual = std::abs(sum - 1.0);
    if (residual > check.max_residual) {
      check.max_residual = residual;
      check.worst_row = i;
    }
    if (!in_range || residual > 1e-12) {
      check.passed = false;
      if (!in_range) check.worst_row = i;
    }
  }
  return check;
}

InvarianceCheck verify_invariance(const TransitionMatrix& m,
                                  const FrequencyTable& freq) {
  if (freq.k() != m.k)
    throw ValidationError("invariance: matrix and table sizes differ");
  InvarianceCheck check;
  check.passed = true;
  const double tol = 1e-9 * static_cast<double>(freq.n);
  for (int j = 0; j < m.k; ++j) {
    double expected = 0.0;
    for (int i = 0; i < m.k; ++i)
      expected += static_cast<double>(freq.counts[static_cast<std::size_t>(i)]) *
                  m.at(i, j);
    const double residual = std::abs(
        expected - static_cast<double>(freq.counts[static_cast<std::size_t>(j)]));
    if (residual > check.max_residual) {
      check.max_residual = residual;
      check.worst_column = j;
    }
    if (residual > tol) check.passed = false;
  }
  return check;
}

std::string matrix_csv(const TransitionMatrix& m) {
  std::ostringstream out;
  char buffer[64];
  for (int i = 0; i < m.k; ++i) {
    for (int j = 0; j < m.k; ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", m.at(i, j));
      out << (j ? "," : "") << buffer;
    }
    out << '\n';
  }
  return out.str();
}

std::string matrix_display(const TransitionMatrix& m, int decimals) {
  std::vector<std::string> cells;
  cells.reserve(static_cast<std::size_t>(m.k) * static_cast<std::size_t>(m.k));
  std::size_t width = 1;
  char buffer[64];
  for (int i = 0; i < m.k; ++i) {
    for (int j = 0; j < m.k; ++j) {
      const double v = m.at(i, j);
      if (v == 0.0) {
        cells.emplace_back("0");
      } else if (v == 1.0) {
        cells.emplace_back("1");
      } else {
        std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, v);
        cells.emplace_back(buffer);
      }
      width = std::max(width, cells.back().size());
    }
  }
  std::ostringstream out;
  for (int i = 0; i < m.k; ++i) {
    for (int j = 0; j < m.k; ++j) {
      const std::string& cell =
          cells[static_cast<std::size_t>(i) * m.k + static_cast<std::size_t>(j)];
      if (j) out << ' ';
      out << std::string(width - cell.size(), ' ') << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace pram
