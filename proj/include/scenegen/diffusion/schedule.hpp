// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/core/ops.hpp"

namespace scenegen::diffusion {

// Cosine alpha-bar schedule. alpha_bar(0) is close to 1, alpha_bar(T-1)
// close to 0, strictly decreasing throughout.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(int steps);

  int steps() const { return static_cast<int>(alpha_bar_.size()); }
  double alpha_bar(int t) const;

  // z_t = sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) eps
  Tensor q_sample(const Tensor& z0, int t, const Tensor& eps) const;

 private:
  std::vector<double> alpha_bar_;
};

}  // namespace scenegen::diffusion
