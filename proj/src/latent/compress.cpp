// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/latent/compress.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegen::latent {

int latent_frame_count(int pixel_frames) {
  if (pixel_frames < 1 || pixel_frames % 4 != 1)
    throw std::invalid_argument("latent_frame_count: N must satisfy N = 1 (mod 4), got " +
                                std::to_string(pixel_frames));
  return 1 + (pixel_frames - 1) / 4;
}

std::vector<std::vector<int>> latent_frame_map(int pixel_frames) {
  const int n = latent_frame_count(pixel_frames);
  std::vector<std::vector<int>> map(n);
  map[0] = {0};
  for (int j = 1; j < n; ++j)
    for (int f = 4 * (j - 1) + 1; f <= 4 * j; ++f) map[j].push_back(f);
  return map;
}

CausalCompressor::CausalCompressor(const CompressorConfig& config, std::uint64_t seed)
    : config_(config) {
  RandomStream rng(mix_seed(seed, 0xCC));
  const int c = config.channels, m = config.hidden;
  auto conv_param = [&](const std::string& name, int cin, int cout, Tensor& w, Tensor& b) {
    w = Tensor::param({3 * 3 * cin, cout});
    init_normal(w, rng, std::sqrt(2.0 / (3 * 3 * cin)));
    b = Tensor::param({cout});
    params_.add(name + ".weight", w);
    params_.add(name + ".bias", b);
  };
  conv_param("first1", c, m, first_w1_, first_b1_);
  conv_param("first2", m, c, first_w2_, first_b2_);
  conv_param("group1", 4 * c, m, group_w1_, group_b1_);
  conv_param("group2", m, c, group_w2_, group_b2_);
}

LatentClip CausalCompressor::compress(const Tensor& frames) const {
  if (frames.ndim() != 4 || frames.dim(3) != config_.channels)
    throw std::invalid_argument("CausalCompressor: expected (N,h,w," +
                                std::to_string(config_.channels) + "), got " +
                                shape_str(frames.shape()));
  const int N = frames.dim(0);
  const int n = latent_frame_count(N);
  const int c = config_.channels, m = config_.hidden;
  const Conv2dSpec same{3, 3, 1, 1};

  std::vector<Tensor> latents;
  latents.reserve(n);
  {
    Tensor f0 = slice(frames, 0, 0, 1);
    Tensor h = gelu(conv2d(f0, first_w1_, first_b1_, c, m, same));
    latents.push_back(conv2d(h, first_w2_, first_b2_, m, c, same));
  }
  for (int j = 1; j < n; ++j) {
    std::vector<Tensor> group;
    for (int f = 4 * (j - 1) + 1; f <= 4 * j; ++f) group.push_back(slice(frames, 0, f, 1));
    Tensor stacked = concat(group, /*axis=*/3);  // (1,h,w,4c)
    Tensor h = gelu(conv2d(stacked, group_w1_, group_b1_, 4 * c, m, same));
    latents.push_back(conv2d(h, group_w2_, group_b2_, m, c, same));
  }
  LatentClip clip;
  clip.data = latents.size() == 1 ? latents[0] : concat(latents, 0);
  clip.frame_map = latent_frame_map(N);
  return clip;
}

}  // namespace scenegen::latent
