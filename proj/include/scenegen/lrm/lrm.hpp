// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/core/nn.hpp"
#include "scenegen/geometry/splat.hpp"
#include "scenegen/synth/scene.hpp"

namespace scenegen::lrm {

struct LrmConfig {
  int image_size = 64;
  int layers = 4;
  int hidden = 128;
  int heads = 4;
  int mlp = 512;
  int patch = 8;
  int feature_channels = 16;

  int grid() const { return image_size / patch; }
  int tokens_per_view() const { return grid() * grid(); }
  void validate() const;
};

// Two posed conditioning views stacked channels-last:
// [rgb(3), mono depth(1), ray direction(3), ray moment(3)] = 10 channels.
struct LrmInput {
  Tensor views;  // (2, H, W, 10)
  std::array<geom::Pose, 2> poses;
  geom::CameraModel camera;
};

LrmInput assemble_lrm_input(const synth::PosedFrame& view0, const synth::PosedFrame& view1,
                            const Tensor& mono_depth0, const Tensor& mono_depth1);

struct LrmOutput {
  Tensor raw_distance;  // (2, H, W, 1), pre-sigmoid
  Tensor features;      // (2, H, W, c)
};

// Feed-forward reconstruction transformer: patchify both views, run one
// joint token sequence through pre-norm blocks, unpatchify to 1+c channels
// per pixel. The final projection is zero-initialized so raw distances
// start at the mid-range depth. Patch position embeddings are shared
// between the views (pose identity is already in the Plucker channels),
// which keeps the view-swap symmetry exact.
class Lrm {
 public:
  Lrm(const LrmConfig& config, std::uint64_t seed);

  LrmOutput forward(const LrmInput& input) const;

  // Average-pools distances and features to the latent grid, then lifts
  // them along per-view rays: K = 2*h*w points with c-dim features.
  geom::FeaturePointCloud to_cloud(const LrmOutput& output, const LrmInput& input,
                                   const geom::DepthRange& range) const;

  // Full-resolution regressed depth near*(1-sigmoid)+far*sigmoid.
  static Tensor regressed_depth(const LrmOutput& output, const geom::DepthRange& range);

  const LrmConfig& config() const { return config_; }
  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }

 private:
  LrmConfig config_;
  ParamMap params_;
  Linear patch_embed_;
  Tensor pos_embedding_;  // (tokens_per_view, hidden)
  std::vector<TransformerBlock> blocks_;
  LayerNorm final_norm_;
  Linear unpatch_;
};

}  // namespace scenegen::lrm
