// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/geometry/splat.hpp"
#include "scenegen/latent/compress.hpp"

namespace scenegen::diffusion {

struct LossWeights {
  double depth = 0.05;
  double latent = 0.1;
  double diffusion = 1.0;
};

// Evenly sampled novel-view subset; count defaults to 3.
std::vector<int> evenly_sampled_views(int frames, int count = 3);

// Min-max normalized inverse depth over the visible pixels, computed in the
// ratio form (Dmax/D - 1)/(Dmax/Dmin - 1) so that a common scale on D
// cancels ratio-by-ratio. depth: (h,w,1). Entries outside `visible` are 0.
Tensor normalized_inverse_depth(const Tensor& depth, const std::vector<std::uint8_t>& visible);

// Scale-free rendered-vs-mono depth loss, summed over visible pixels and
// over the sampled views. Views with fewer than two visible pixels
// contribute zero (and log a warning).
Tensor depth_loss(const geom::RenderedCondition& rendered, const std::vector<int>& view_indices,
                  const std::vector<Tensor>& stub_depths_latent);

// Masked mean squared difference between the compressed spatial condition
// and frozen-encoder targets. Each latent frame's mask comes from the
// visibility of its group's last pixel frame.
Tensor latent_loss(const latent::LatentClip& z_spat, const Tensor& encoded_targets,
                   const std::vector<std::uint8_t>& visibility);

// Squared L2 between predicted and true noise (summed over elements).
Tensor diffusion_loss(const Tensor& eps_hat, const Tensor& eps);

Tensor total_loss(const Tensor& depth, const Tensor& latent, const Tensor& diffusion,
                  const LossWeights& weights);

}  // namespace scenegen::diffusion
