// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/core/nn.hpp"

namespace scenegen::latent {

// n = 1 + (N-1)/4; throws unless N = 1 (mod 4).
int latent_frame_count(int pixel_frames);

// Latent frame j's source pixel frames: [0] for j=0, then groups of four.
std::vector<std::vector<int>> latent_frame_map(int pixel_frames);

// An n-frame latent video with its pixel-frame provenance.
struct LatentClip {
  Tensor data;  // (n,h,w,c)
  std::vector<std::vector<int>> frame_map;

  int frames() const { return data.defined() ? data.dim(0) : 0; }
};

struct CompressorConfig {
  int channels = 16;
  int hidden = 64;
};

// Causal temporal compressor: latent 0 sees only pixel frame 0 through a
// per-frame head; latent j>=1 sees only its own four-frame group, which is
// stacked along channels and convolved spatially (temporal receptive field
// 4, temporal stride 4).
class CausalCompressor {
 public:
  CausalCompressor(const CompressorConfig& config, std::uint64_t seed);

  // (N,h,w,c) -> LatentClip with n = 1+(N-1)/4 frames.
  LatentClip compress(const Tensor& frames) const;

  const CompressorConfig& config() const { return config_; }
  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }

 private:
  CompressorConfig config_;
  ParamMap params_;
  Tensor first_w1_, first_b1_, first_w2_, first_b2_;
  Tensor group_w1_, group_b1_, group_w2_, group_b2_;
};

}  // namespace scenegen::latent
