#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "hsi/error.hpp"

/// Adversarial-motion-prior formulas over precomputed discriminator outputs.
namespace hsi::task {

inline constexpr double kDefaultScoreClamp = 1e-4;

inline double clamp_score(double d, double clamp_eps) { return std::clamp(d, clamp_eps, 1.0 - clamp_eps); }

/// -log(1 - D), with D clamped into [eps, 1 - eps].
inline double style_reward(double d_score, double clamp_eps = kDefaultScoreClamp) {
  if (!std::isfinite(d_score)) throw InvalidArgument("style_reward: non-finite score");
  return -std::log1p(-clamp_score(d_score, clamp_eps));
}

/// Empirical discriminator objective:
///   -mean(log D(data)) - mean(log(1 - D(policy))) + w_gp * mean(|grad D(data)|^2).
/// Gradient norms are supplied by the caller.
inline double discriminator_loss(std::span<const double> scores_data, std::span<const double> scores_policy,
                                 std::span<const double> grad_norms_sq, double w_gp,
                                 double clamp_eps = kDefaultScoreClamp) {
  if (scores_data.empty() || scores_policy.empty() || grad_norms_sq.empty()) {
    throw InvalidArgument("discriminator_loss: empty batch");
  }
  double data_term = 0;
  for (double d : scores_data) data_term -= std::log(clamp_score(d, clamp_eps));
  double policy_term = 0;
  for (double d : scores_policy) policy_term -= std::log1p(-clamp_score(d, clamp_eps));
  double gp = 0;
  for (double g : grad_norms_sq) {
    if (!(g >= 0)) throw InvalidArgument("discriminator_loss: negative gradient norm");
    gp += g;
  }
  return data_term / static_cast<double>(scores_data.size()) +
         policy_term / static_cast<double>(scores_policy.size()) +
         w_gp * gp / static_cast<double>(grad_norms_sq.size());
}

/// Linear ramp of the style weight from `start` to `end` over `ramp_steps`.
struct LinearSchedule {
  double start = 0.0;
  double end = 0.3;
  long ramp_steps = 1;

  double operator()(long step) const {
    if (ramp_steps <= 0 || step >= ramp_steps) return end;
    if (step <= 0) return start;
    return start + (end - start) * static_cast<double>(step) / static_cast<double>(ramp_steps);
  }
};

}  // namespace hsi::task
