#pragma once

#include <string>

#include "pram/types.hpp"

namespace pram {

/// Builds the inverse-frequency block-diagonal transition matrix for a plan.
/// Within a block of size kp > 1 each category i keeps its value with
/// probability 1 - theta/T_i and moves to each other in-block category with
/// probability theta / ((kp - 1) * T_i). Singleton blocks become identity
/// rows, so a no-op plan (theta == 0) yields the identity matrix. The column
/// sums weighted by the original counts reproduce those counts exactly, so
/// expected released frequencies equal the observed ones.
TransitionMatrix build_ifpr(const FrequencyTable& freq, const BlockPlan& plan);

struct StochasticCheck {
  bool passed = false;
  int worst_row = -1;
  double max_residual = 0.0;
};

struct InvarianceCheck {
  bool passed = false;
  int worst_column = -1;
  double max_residual = 0.0;
};

/// Checks that every row sums to 1 within 1e-12 and entries lie in [0, 1].
StochasticCheck verify_row_stochastic(const TransitionMatrix& m);

/// Checks sum_i T_i * p[i][j] == T_j within 1e-9 * n for every column j.
InvarianceCheck verify_invariance(const TransitionMatrix& m,
                                  const FrequencyTable& freq);

/// One row per line, comma-separated, full precision.
std::string matrix_csv(const TransitionMatrix& m);

/// Aligned display form with entries rounded to `decimals` places; exact
/// zeros and ones print bare.
std::string matrix_display(const TransitionMatrix& m, int decimals = 3);

}  // namespace pram
