// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/diffusion/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegen::diffusion {

NoiseSchedule::NoiseSchedule(int steps) {
  if (steps < 2) throw std::invalid_argument("NoiseSchedule: need at least 2 steps");
  const double s = 0.008;
  auto f = [&](double u) {
    const double x = (u / steps + s) / (1.0 + s) * M_PI_2;
    return std::cos(x) * std::cos(x);
  };
  alpha_bar_.resize(steps);
  double acc = 1.0;
  for (int t = 0; t < steps; ++t) {
    const double beta = std::min(1.0 - f(t + 1) / f(t), 0.999);
    acc *= 1.0 - beta;
    alpha_bar_[t] = acc;
  }
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t >= steps())
    throw std::out_of_range("NoiseSchedule: timestep " + std::to_string(t) + " outside [0," +
                            std::to_string(steps()) + ")");
  return alpha_bar_[t];
}

Tensor NoiseSchedule::q_sample(const Tensor& z0, int t, const Tensor& eps) const {
  const double ab = alpha_bar(t);
  if (z0.shape() != eps.shape())
    throw std::invalid_argument("q_sample: z0 " + shape_str(z0.shape()) + " vs eps " +
                                shape_str(eps.shape()));
  return add(scale(z0, std::sqrt(ab)), scale(eps, std::sqrt(1.0 - ab)));
}

}  // namespace scenegen::diffusion
