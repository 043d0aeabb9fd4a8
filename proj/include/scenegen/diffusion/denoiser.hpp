// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/core/nn.hpp"

namespace scenegen::diffusion {

struct DenoiserConfig {
  int blocks = 4;
  int hidden = 128;
  int heads = 4;
  int mlp = 256;
  int channels = 16;
  int latent_size = 8;  // latent grid side; cells = latent_size^2

  int control_blocks() const { return blocks / 2; }
  int cells() const { return latent_size * latent_size; }
  void validate() const;
};

// (dim)-vector of interleaved sin/cos features for an integer position.
Tensor sinusoidal_embedding(double position, int dim);

// One spatiotemporal block: spatial attention within each latent frame,
// temporal attention across frames at each cell, then an MLP; pre-norm.
struct FactorizedBlock {
  LayerNorm ln_s, ln_t, ln_m;
  MultiheadSelfAttention attn_s, attn_t;
  Linear fc1, fc2;

  FactorizedBlock() = default;
  FactorizedBlock(int dim, int heads, int mlp, ParamMap& params, const std::string& name,
                  RandomStream& rng);
  // x: (frames, cells, dim)
  Tensor forward(const Tensor& x) const;
};

// Latent video epsilon-predictor over (n,h,w,c) clips with additive
// per-block control residuals (residual i feeds block i's input).
class Denoiser {
 public:
  Denoiser(const DenoiserConfig& config, std::uint64_t seed);

  // control_residuals: empty, or up to `blocks` entries of shape
  // (n, h*w, hidden); undefined entries are treated as zero.
  Tensor forward(const Tensor& z_t, int t, const std::vector<Tensor>& control_residuals = {}) const;

  // Token stream before the blocks (shared with ControlNet construction).
  Tensor embed_tokens(const Tensor& z_t, int t) const;

  const DenoiserConfig& config() const { return config_; }
  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }
  const std::vector<FactorizedBlock>& blocks() const { return blocks_; }
  const Linear& token_embed() const { return token_embed_; }
  const Linear& temb1() const { return temb1_; }
  const Linear& temb2() const { return temb2_; }
  Tensor pos_spatial() const { return pos_spatial_; }

 private:
  DenoiserConfig config_;
  ParamMap params_;
  Linear token_embed_;
  Tensor pos_spatial_;  // learned per-cell embedding, lazily sized? fixed at first use
  Linear temb1_, temb2_;
  std::vector<FactorizedBlock> blocks_;
  LayerNorm final_norm_;
  Linear out_proj_;
};

// Trainable copy of the leading backbone blocks conditioned on an extra
// latent stream; per-block outputs pass through zero-initialized
// projections, so a fresh ControlNet leaves the backbone untouched.
class ControlNet {
 public:
  ControlNet(const Denoiser& backbone, int cond_channels, std::uint64_t seed);

  // z_cond: (n,h,w,cond_channels); z_t: (n,h,w,c). Returns control_blocks()
  // residual tensors shaped (n, h*w, hidden).
  std::vector<Tensor> forward(const Tensor& z_cond, const Tensor& z_t, int t) const;

  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }
  int cond_channels() const { return cond_channels_; }

 private:
  DenoiserConfig config_;
  int cond_channels_ = 0;
  ParamMap params_;
  Linear token_embed_;  // copied from the backbone
  Linear cond_embed_;   // fresh
  Tensor pos_spatial_;  // copied
  Linear temb1_, temb2_;
  std::vector<FactorizedBlock> blocks_;  // copies of the first half
  std::vector<Linear> out_projs_;        // zero-initialized
};

// Elementwise weighted sum of per-net residual lists; lists must agree in
// length and shapes.
std::vector<Tensor> combine_controls(const std::vector<double>& weights,
                                     const std::vector<std::vector<Tensor>>& residual_sets);

// Pads a residual list with undefined (zero) entries up to `blocks`.
std::vector<Tensor> pad_residuals(std::vector<Tensor> residuals, int blocks);

// Copies parameter values of `src` into `dst` entries sharing a name suffix.
void copy_matching_params(const ParamMap& src, ParamMap& dst);

}  // namespace scenegen::diffusion
