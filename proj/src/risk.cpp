#include "pram/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pram/planner.hpp"

namespace pram {

namespace {

constexpr std::int64_t kMaxShift = 1100;  // beyond double's dynamic range

}  // namespace

ScaledNonneg ScaledNonneg::from(double v) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ValidationError("scaled value: must be finite and non-negative");
  if (v == 0.0) return {};
  int e = 0;
  const double m = std::frexp(v, &e);
  return {m, e};
}

double ScaledNonneg::to_double() const {
  if (is_zero()) return 0.0;
  if (exponent > kMaxShift) return std::numeric_limits<double>::infinity();
  if (exponent < -kMaxShift) return 0.0;
  return std::ldexp(mantissa, static_cast<int>(exponent));
}

ScaledNonneg operator+(const ScaledNonneg& a, const ScaledNonneg& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const ScaledNonneg& hi = a.exponent >= b.exponent ? a : b;
  const ScaledNonneg& lo = a.exponent >= b.exponent ? b : a;
  const std::int64_t shift = hi.exponent - lo.exponent;
  if (shift > kMaxShift) return hi;
  int e = 0;
  const double m =
      std::frexp(hi.mantissa + std::ldexp(lo.mantissa, -static_cast<int>(shift)),
                 &e);
  return {m, hi.exponent + e};
}

ScaledNonneg operator*(const ScaledNonneg& a, const ScaledNonneg& b) {
  if (a.is_zero() || b.is_zero()) return {};
  int e = 0;
  const double m = std::frexp(a.mantissa * b.mantissa, &e);
  return {m, a.exponent + b.exponent + e};
}

double ScaledNonneg::ratio(const ScaledNonneg& a, const ScaledNonneg& b) {
  if (b.is_zero()) throw ValidationError("scaled ratio: division by zero");
  if (a.is_zero()) return 0.0;
  const std::int64_t shift = a.exponent - b.exponent;
  if (shift > kMaxShift) return std::numeric_limits<double>::infinity();
  if (shift < -kMaxShift) return 0.0;
  return std::ldexp(a.mantissa / b.mantissa, static_cast<int>(shift));
}

const ScaledNonneg& SigmaSeries::at(std::int64_t a) const {
  static const ScaledNonneg kZero{};
  if (a < 0 || a > max_degree()) return kZero;
  return coeff[static_cast<std::size_t>(a)];
}

double SigmaSeries::ratio(std::int64_t a) const {
  if (a < 1) throw ValidationError("sigma ratio: degree must be at least 1");
  if (a > support) return 0.0;
  return ScaledNonneg::ratio(at(a), at(a - 1));
}

OddsVector odds_from_matrix(const TransitionMatrix& m, const FrequencyTable& freq,
                            int target_index) {
  if (freq.k() != m.k)
    throw ValidationError("odds: matrix and table sizes differ");
  if (target_index < 0 || target_index >= m.k)
    throw ValidationError("odds: target index out of range");
  if (freq.counts[static_cast<std::size_t>(target_index)] < 1)
    throw ValidationError("odds: target category has no records");

  OddsVector odds;
  odds.members =
      m.block_members(m.block_of[static_cast<std::size_t>(target_index)]);
  if (odds.members.size() < 2)
    throw ValidationError("odds: target sits in a singleton block");

  for (std::size_t pos = 0; pos < odds.members.size(); ++pos) {
    const int i = odds.members[pos];
    if (i == target_index) odds.target_pos = static_cast<int>(pos);
    const double a = m.at(i, target_index);
    if (!(a >= 0.0 && a < 1.0))
      throw ValidationError("odds: transition probability into the target must "
                            "lie in [0, 1)");
    odds.alpha.push_back(a);
    odds.beta.push_back(a / (1.0 - a));
    odds.t_star.push_back(freq.counts[static_cast<std::size_t>(i)] -
                          (i == target_index ? 1 : 0));
  }
  return odds;
}

SigmaSeries sigma_coeffs(const OddsVector& odds, std::int64_t a_max) {
  if (a_max < 0) throw ValidationError("sigma: a_max must be non-negative");
  const std::int64_t degree = std::min(a_max, odds.total_t_star());

  SigmaSeries series;
  series.coeff.assign(static_cast<std::size_t>(degree) + 1, ScaledNonneg{});
  series.coeff[0] = ScaledNonneg::from(1.0);

  std::int64_t top = 0;
  for (std::size_t i = 0; i < odds.beta.size(); ++i) {
    const ScaledNonneg beta = ScaledNonneg::from(odds.beta[i]);
    if (beta.is_zero()) continue;
    for (std::int64_t rep = 0; rep < odds.t_star[i]; ++rep) {
      top = std::min(top + 1, degree);
      for (std::int64_t a = top; a >= 1; --a)
        series.coeff[static_cast<std::size_t>(a)] =
            series.coeff[static_cast<std::size_t>(a)] +
            beta * series.coeff[static_cast<std::size_t>(a - 1)];
    }
  }
  series.support = 0;
  for (std::int64_t a = degree; a >= 0; --a) {
    if (!series.coeff[static_cast<std::size_t>(a)].is_zero()) {
      series.support = a;
      break;
    }
  }
  return series;
}

double r1_exact(std::int64_t a, const OddsVector& odds) {
  const SigmaSeries series =
      sigma_coeffs(odds, std::min(a, odds.total_t_star()));
  return r1_exact(a, odds, series);
}

double r1_exact(std::int64_t a, const OddsVector& odds,
                const SigmaSeries& sigma) {
  if (a < 1) throw ValidationError("risk: released count must be at least 1");
  if (a > sigma.support + 1)
    throw ValidationError("risk: released count " + std::to_string(a) +
                          " is not attainable");
  if (a - 1 > sigma.max_degree())
    throw ValidationError("risk: series too short for the requested count");
  const double beta1 = odds.beta_target();
  const double ratio = sigma.ratio(a);
  if (beta1 == 0.0) return 0.0;
  return 1.0 / (static_cast<double>(a) * (1.0 + ratio / beta1));
}

double r1_closed_form_1(const FrequencyTable& freq, const BlockPlan& plan) {
  if (plan.is_noop())
    throw ValidationError("risk: closed form needs a perturbing plan");
  const std::vector<int>& block = plan.target_block();
  const double t1 = static_cast<double>(
      freq.counts[static_cast<std::size_t>(plan.target_index)]);
  const double theta = plan.theta;
  const double k1m1 = static_cast<double>(block.size()) - 1.0;
  double sum = 0.0;
  for (int j : block) {
    if (j == plan.target_index) continue;
    const double tj = static_cast<double>(freq.counts[static_cast<std::size_t>(j)]);
    sum += tj / (k1m1 * tj - theta);
  }
  const double value =
      (t1 - theta) / (t1 * (t1 - theta) + theta * theta * sum);
  const double bound = psi(freq.counts[static_cast<std::size_t>(plan.target_index)],
                           theta);
  if (value > bound * (1.0 + 1e-12) + 1e-15)
    throw std::logic_error("risk: closed form exceeded its bound");
  return value;
}

RiskProfile risk_profile(const FrequencyTable& freq, const BlockPlan& plan,
                         const TransitionMatrix& m, std::int64_t a_max_cap) {
  RiskProfile profile;
  profile.xi_target = plan.xi_achieved;
  const std::int64_t t1 =
      freq.counts[static_cast<std::size_t>(plan.target_index)];
  if (t1 < 1) throw ValidationError("risk: target category has no records");

  if (plan.is_noop()) {
    const double risk = 1.0 / static_cast<double>(t1);
    profile.r1_by_a[t1] = risk;
    profile.psi_bound = psi(t1, 0.0);
    profile.max_risk = risk;
    profile.argmax_a = t1;
    profile.certified = risk <= plan.xi_achieved + 1e-12;
    return profile;
  }

  const OddsVector odds = odds_from_matrix(m, freq, plan.target_index);
  std::int64_t a_hi = odds.total_t_star() + 1;
  if (a_max_cap >= 1) a_hi = std::min(a_hi, a_max_cap);
  const SigmaSeries series =
      sigma_coeffs(odds, std::min(a_hi, odds.total_t_star()));
  a_hi = std::min(a_hi, series.support + 1);

  profile.psi_bound = psi(t1, plan.theta);
  for (std::int64_t a = 1; a <= a_hi; ++a) {
    const double r = r1_exact(a, odds, series);
    profile.r1_by_a[a] = r;
    if (r > profile.max_risk) {
      profile.max_risk = r;
      profile.argmax_a = a;
    }
  }

  bool dominant = true;
  const double beta1 = odds.beta_target();
  for (std::size_t i = 0; i < odds.beta.size(); ++i) {
    if (static_cast<int>(i) != odds.target_pos && odds.beta[i] > beta1)
      dominant = false;
  }
  profile.certified =
      dominant && profile.max_risk <= plan.xi_achieved + 1e-12;
  return profile;
}

double check_appendix_criterion(const OddsVector& odds, std::int64_t a) {
  const SigmaSeries series =
      sigma_coeffs(odds, std::min(a + 1, odds.total_t_star()));
  return check_appendix_criterion(odds, series, a);
}

double check_appendix_criterion(const OddsVector& odds, const SigmaSeries& sigma,
                                std::int64_t a) {
  if (a < 1) throw ValidationError("criterion: degree must be at least 1");
  if (a > sigma.max_degree())
    throw ValidationError("criterion: series too short for the requested degree");
  // Comparing the risk at a+1 matches against the risk at one match gives,
  // after clearing denominators and dividing by a!,
  //   (a+1) coeff[a+1] + a beta_1 coeff[a] - coeff[1] coeff[a] >= 0.
  const ScaledNonneg gain =
      ScaledNonneg::from(static_cast<double>(a + 1)) * sigma.at(a + 1) +
      ScaledNonneg::from(static_cast<double>(a) * odds.beta_target()) *
          sigma.at(a);
  const ScaledNonneg loss = sigma.at(1) * sigma.at(a);
  if (gain.is_zero() && loss.is_zero()) return 0.0;
  const ScaledNonneg& norm =
      (gain.is_zero() ||
       (!loss.is_zero() &&
        (loss.exponent > gain.exponent ||
         (loss.exponent == gain.exponent && loss.mantissa > gain.mantissa))))
          ? loss
          : gain;
  return ScaledNonneg::ratio(gain, norm) - ScaledNonneg::ratio(loss, norm);
}

}  // namespace pram
