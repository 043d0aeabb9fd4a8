// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/diffusion/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "scenegen/core/log.hpp"
#include "scenegen/core/ops.hpp"

namespace scenegen::diffusion {

std::vector<int> evenly_sampled_views(int frames, int count) {
  if (frames < 1 || count < 1)
    throw std::invalid_argument("evenly_sampled_views: need frames >= 1 and count >= 1");
  count = std::min(count, frames);
  std::vector<int> views;
  if (count == 1) {
    views.push_back(frames / 2);
    return views;
  }
  for (int i = 0; i < count; ++i) {
    const int idx = static_cast<int>(std::lround(double(i) * (frames - 1) / (count - 1)));
    views.push_back(idx);
  }
  return views;
}

namespace {

// Indices of the min/max entries among visible pixels (value-based; the
// choice is a constant of the autodiff graph).
bool visible_extrema(const Tensor& depth, const std::vector<std::uint8_t>& visible,
                     std::int64_t& imin, std::int64_t& imax, std::int64_t& count) {
  imin = imax = -1;
  count = 0;
  for (std::int64_t i = 0; i < depth.size(); ++i) {
    if (!visible[i]) continue;
    ++count;
    if (imin < 0 || depth.at(i) < depth.at(imin)) imin = i;
    if (imax < 0 || depth.at(i) > depth.at(imax)) imax = i;
  }
  return count >= 2 && depth.at(imin) != depth.at(imax);
}

Tensor mask_tensor(const std::vector<std::uint8_t>& visible, const Shape& shape) {
  Tensor m = Tensor::zeros(shape);
  for (std::int64_t i = 0; i < m.size(); ++i) m.data()[i] = visible[i] ? 1.0 : 0.0;
  return m;
}

}  // namespace

Tensor normalized_inverse_depth(const Tensor& depth, const std::vector<std::uint8_t>& visible) {
  if (static_cast<std::int64_t>(visible.size()) != depth.size())
    throw std::invalid_argument("normalized_inverse_depth: mask size mismatch");
  std::int64_t imin, imax, count;
  if (!visible_extrema(depth, visible, imin, imax, count))
    throw std::invalid_argument("normalized_inverse_depth: fewer than two distinct visible depths");
  Tensor mask = mask_tensor(visible, depth.shape());
  // keep divisions finite at masked cells without touching visible values
  Tensor safe = add(mul(depth, mask), sub(Tensor::constant(depth.shape(), 1.0), mask));
  Tensor dmax = select_flat(depth, imax);
  Tensor dmin = select_flat(depth, imin);
  Tensor num = add_scalar(div(broadcast(dmax, depth.shape()), safe), -1.0);
  Tensor denom = add_scalar(div(dmax, dmin), -1.0);  // scalar
  Tensor pi = div(num, broadcast(denom, depth.shape()));
  return mul(pi, mask);
}

Tensor depth_loss(const geom::RenderedCondition& rendered, const std::vector<int>& view_indices,
                  const std::vector<Tensor>& stub_depths_latent) {
  if (view_indices.size() != stub_depths_latent.size())
    throw std::invalid_argument("depth_loss: views and stub depths differ in count");
  const int h = rendered.height, w = rendered.width;
  Tensor total = Tensor::scalar(0.0);
  for (size_t s = 0; s < view_indices.size(); ++s) {
    const int v = view_indices[s];
    if (v < 0 || v >= rendered.frames)
      throw std::invalid_argument("depth_loss: view index " + std::to_string(v) +
                                  " outside rendered clip of " + std::to_string(rendered.frames));
    std::vector<std::uint8_t> visible(
        rendered.visibility.begin() + static_cast<std::int64_t>(v) * h * w,
        rendered.visibility.begin() + static_cast<std::int64_t>(v + 1) * h * w);
    Tensor depth_v = reshape(slice(rendered.depths, 0, v, 1), {h, w, 1});
    std::int64_t imin, imax, count;
    if (!visible_extrema(depth_v, visible, imin, imax, count)) {
      log::warn("depth_loss: view " + std::to_string(v) +
                " has fewer than two distinct visible depths; contributing zero");
      continue;
    }
    const Tensor& stub = stub_depths_latent[s];
    if (stub.shape() != Shape{h, w, 1})
      throw std::invalid_argument("depth_loss: stub depth " + shape_str(stub.shape()) +
                                  " does not match latent grid");
    std::int64_t smin, smax, scount;
    if (!visible_extrema(stub, visible, smin, smax, scount)) {
      log::warn("depth_loss: stub for view " + std::to_string(v) +
                " is degenerate over the visible set; contributing zero");
      continue;
    }
    Tensor pi_rendered = normalized_inverse_depth(depth_v, visible);
    Tensor pi_stub = normalized_inverse_depth(stub, visible);
    Tensor diff = sub(pi_rendered, pi_stub);
    total = add(total, sum(mul(diff, diff)));
  }
  return total;
}

Tensor latent_loss(const latent::LatentClip& z_spat, const Tensor& encoded_targets,
                   const std::vector<std::uint8_t>& visibility) {
  if (z_spat.data.shape() != encoded_targets.shape())
    throw std::invalid_argument("latent_loss: z_spat " + shape_str(z_spat.data.shape()) +
                                " vs targets " + shape_str(encoded_targets.shape()));
  const int n = z_spat.data.dim(0), h = z_spat.data.dim(1), w = z_spat.data.dim(2),
            c = z_spat.data.dim(3);
  if (static_cast<int>(z_spat.frame_map.size()) != n)
    throw std::invalid_argument("latent_loss: frame map does not match latent frames");
  Tensor mask = Tensor::zeros({n, h, w, 1});
  std::int64_t visible_cells = 0;
  for (int j = 0; j < n; ++j) {
    const int anchor = z_spat.frame_map[j].back();
    for (int i = 0; i < h * w; ++i) {
      const bool vis = visibility.empty()
                           ? true
                           : visibility[static_cast<std::int64_t>(anchor) * h * w + i] != 0;
      mask.data()[static_cast<std::int64_t>(j) * h * w + i] = vis ? 1.0 : 0.0;
      if (vis) ++visible_cells;
    }
  }
  if (visible_cells == 0) {
    log::warn("latent_loss: no visible latent cells; contributing zero");
    return Tensor::scalar(0.0);
  }
  Tensor mask_b = broadcast(mask, z_spat.data.shape());
  Tensor diff = mul(sub(z_spat.data, encoded_targets), mask_b);
  return scale(sum(mul(diff, diff)), 1.0 / static_cast<double>(visible_cells * c));
}

Tensor diffusion_loss(const Tensor& eps_hat, const Tensor& eps) { return sse(eps_hat, eps); }

Tensor total_loss(const Tensor& depth, const Tensor& latent, const Tensor& diffusion,
                  const LossWeights& weights) {
  return add(add(scale(depth, weights.depth), scale(latent, weights.latent)),
             scale(diffusion, weights.diffusion));
}

}  // namespace scenegen::diffusion
