// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/diffusion/denoiser.hpp"
#include "scenegen/diffusion/losses.hpp"
#include "scenegen/diffusion/schedule.hpp"
#include "scenegen/latent/autoencoder.hpp"
#include "scenegen/latent/replace.hpp"
#include "scenegen/lrm/lrm.hpp"

namespace scenegen::diffusion {

struct ModelConfig {
  int image_size = 64;
  int latent_channels = 16;
  latent::AutoencoderConfig ae;
  latent::CompressorConfig ccn;
  lrm::LrmConfig lrm;
  DenoiserConfig denoiser;
  int schedule_steps = 1000;
  int sample_steps = 50;
  geom::DepthRange depth_range;
  LossWeights loss_weights;
  int sampled_novel_views = 3;

  // conditioning / training ablations
  bool no_spatial_cond = false;
  bool no_temporal_cond = false;
  bool no_depth_input = false;
  bool no_depth_loss = false;
  bool use_gt_depth_cloud = false;

  int latent_size() const { return image_size / 8; }
  void validate() const;
  void sync_submodules();  // propagates shared sizes into the module configs
};

ModelConfig model_config_from_kv(const io::KvFile& kv);
io::KvFile model_config_to_kv(const ModelConfig& config);

// Everything the spatiotemporal-conditioned generator owns: the frozen
// per-frame codec, the reconstruction transformer, the causal compressor,
// the frozen denoising backbone, and the ControlNet branches.
struct ScvgModel {
  ModelConfig config;
  latent::Autoencoder ae;
  latent::CausalCompressor ccn;
  lrm::Lrm recon;
  Denoiser backbone;
  ControlNet control_scvg;
  ControlNet control_depth;
  ControlNet control_semantic;
  NoiseSchedule schedule;

  ScvgModel(const ModelConfig& cfg, std::uint64_t seed);

  struct ConditionInputs {
    synth::PosedFrame spatial0, spatial1;
    Tensor mono0, mono1;  // (H,W,1) stub depths for the spatial pair
    std::vector<geom::Pose> window_poses;  // N = 1 (mod 4), augmented upstream
    Tensor temporal_image;                 // (H,W,3)
    int replaced_latent = 0;
    std::vector<std::pair<int, Tensor>> extra_temporal;  // additional pins
  };

  struct ConditionOutputs {
    latent::SpatiotemporalCondition cond;
    latent::LatentClip z_spat;        // pre-replacement compressed condition
    geom::RenderedCondition rendered; // splatted features/depths/visibility
    lrm::LrmOutput lrm_out;
    bool has_spatial = true;
  };

  // The full conditioning stack: stub depths + Plucker -> LRM -> cloud ->
  // splat over the window poses -> causal compression -> latent replacement.
  ConditionOutputs build_condition(const ConditionInputs& inputs) const;

  // Normalized frozen-codec encodings of the window's anchor frames (the
  // last pixel frame of every latent group): the z0 of the diffusion model
  // and the target of the latent loss.
  Tensor encode_anchor_targets(const std::vector<synth::PosedFrame>& window_frames) const;

  // Pixel-frame indices decoded from an n-frame latent clip.
  std::vector<int> anchor_indices(int window_length) const;
};

}  // namespace scenegen::diffusion
