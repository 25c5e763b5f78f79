#pragma once

#include <cstdint>
#include <vector>

#include "pram/types.hpp"

namespace pram {

/// Non-negative real stored as mantissa * 2^exponent with the mantissa kept
/// in [0.5, 1). The exponent is a plain integer, so values far below the
/// double underflow threshold stay representable; only sums, products, and
/// ratios are needed and each is exact to double precision.
struct ScaledNonneg {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  static ScaledNonneg from(double v);
  bool is_zero() const { return mantissa == 0.0; }
  double to_double() const;

  friend ScaledNonneg operator+(const ScaledNonneg& a, const ScaledNonneg& b);
  friend ScaledNonneg operator*(const ScaledNonneg& a, const ScaledNonneg& b);

  /// a / b as a plain double. b must be nonzero.
  static double ratio(const ScaledNonneg& a, const ScaledNonneg& b);
};

/// Coefficients of prod_i (1 + beta_i x)^{t_star_i} by degree, in scaled
/// form. coeff[a] is the sum over bounded compositions a_1+...+a_m = a of
/// prod_i C(t_star_i, a_i) beta_i^{a_i}.
struct SigmaSeries {
  std::vector<ScaledNonneg> coeff;
  std::int64_t support = 0;  // largest degree with a nonzero coefficient

  std::int64_t max_degree() const {
    return static_cast<std::int64_t>(coeff.size()) - 1;
  }
  const ScaledNonneg& at(std::int64_t a) const;

  /// coeff[a] / coeff[a-1]; zero when a exceeds the support.
  double ratio(std::int64_t a) const;
};

/// Extracts the odds of landing in the target category for every category in
/// the target's block. Requires that block to contain at least two
/// categories and the target category to hold at least one record.
OddsVector odds_from_matrix(const TransitionMatrix& m,
                            const FrequencyTable& freq, int target_index);

/// Expands prod_i (1 + beta_i x)^{t_star_i} up to degree a_max by repeated
/// binomial multiplication, renormalizing each coefficient after every
/// factor. Only coefficient ratios feed the risk formulas, and those are
/// recovered exactly from the scaled form.
SigmaSeries sigma_coeffs(const OddsVector& odds, std::int64_t a_max);

/// Exact probability of a correct intruder match given that the released
/// data shows a copies of the target category:
///   R1(a) = (1/a) * [1 + (1/beta_1) * coeff[a]/coeff[a-1]]^{-1}.
/// Defined for 1 <= a <= support + 1.
double r1_exact(std::int64_t a, const OddsVector& odds);
double r1_exact(std::int64_t a, const OddsVector& odds, const SigmaSeries& sigma);

/// Closed form of R1(1) for a planned block:
///   (T1 - theta) / (T1 (T1 - theta) + theta^2 sum_{j != target}
///        T_j / ((k1 - 1) T_j - theta)),
/// which never exceeds psi(T1, theta).
double r1_closed_form_1(const FrequencyTable& freq, const BlockPlan& plan);

/// Full risk profile: R1(a) for every attainable a (optionally capped by
/// a_max_cap), the psi bound, the maximum with its argmax, and whether the
/// dominance hypothesis (beta_1 >= every other in-block beta) lets the
/// maximum be certified against the achieved level. A no-op plan reports
/// the single outcome a = T1 with risk 1/T1.
RiskProfile risk_profile(const FrequencyTable& freq, const BlockPlan& plan,
                         const TransitionMatrix& m, std::int64_t a_max_cap = -1);

/// Residual of the inequality showing that a = 1 maximizes R1. Comparing
/// R1(a+1) against R1(1) and clearing denominators gives, with
/// St_a = a! * coeff[a],
///   St_{a+1} - coeff[1] * St_a + a * beta_1 * St_a >= 0
/// whenever beta_1 dominates. Returned scaled by the largest term so the
/// value lies in [-1, 1]; it may be negative when dominance fails.
double check_appendix_criterion(const OddsVector& odds, std::int64_t a);
double check_appendix_criterion(const OddsVector& odds, const SigmaSeries& sigma,
                                std::int64_t a);

}  // namespace pram
