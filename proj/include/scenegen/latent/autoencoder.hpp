// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/core/nn.hpp"

namespace scenegen::latent {

struct AutoencoderConfig {
  int image_size = 64;
  int base_channels = 32;
  int latent_channels = 16;

  int latent_size() const { return image_size / 8; }
};

// Deterministic per-frame autoencoder with an 8x spatial bottleneck: a
// frozen-VAE stand-in pretrained on synthetic frames. No sampling head and
// no temporal compression (that belongs to the causal compressor).
class Autoencoder {
 public:
  Autoencoder(const AutoencoderConfig& config, std::uint64_t seed);

  // (N,H,W,3) -> (N,h,w,c); frame-wise and deterministic.
  Tensor encode(const Tensor& frames) const;
  // (N,h,w,c) -> (N,H,W,3)
  Tensor decode(const Tensor& latents) const;

  // Encode/decode through the dataset latent normalization (mean/std are
  // identity until calibrated after pretraining).
  Tensor encode_normalized(const Tensor& frames) const;
  Tensor decode_normalized(const Tensor& latents) const;

  // Per-channel statistics over a pretraining set, so diffusion operates
  // near unit variance.
  void calibrate_latent_stats(const Tensor& frames);

  const AutoencoderConfig& config() const { return config_; }
  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }
  Tensor latent_mean() const { return latent_mean_; }
  Tensor latent_std() const { return latent_std_; }
  // All persistent tensors (parameters + normalization stats).
  ParamMap checkpoint_entries() const;

 private:
  AutoencoderConfig config_;
  ParamMap params_;
  Tensor latent_mean_, latent_std_;  // (c)

  struct Conv {
    Tensor w, b;
    int cin = 0, cout = 0;
    Conv2dSpec spec;
  };
  Conv enc1_, enc2_, enc3_, enc_out_;
  Conv dec_in_, dec1_, dec2_, dec3_, dec_out_;

  Conv make_conv(const std::string& name, int cin, int cout, const Conv2dSpec& spec,
                 RandomStream& rng);
  static Tensor apply(const Conv& conv, const Tensor& x);
};

// Mean PSNR of decode(encode(x)) against x over a frame batch.
double reconstruction_psnr(const Autoencoder& ae, const Tensor& frames);

}  // namespace scenegen::latent
