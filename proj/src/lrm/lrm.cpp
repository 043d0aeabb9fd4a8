// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/lrm/lrm.hpp"

#include <stdexcept>

#include "scenegen/geometry/plucker.hpp"

namespace scenegen::lrm {

void LrmConfig::validate() const {
  if (image_size % patch != 0)
    throw std::invalid_argument("LrmConfig: patch " + std::to_string(patch) +
                                " does not divide image size " + std::to_string(image_size));
  if (layers < 1 || hidden < 1 || heads < 1 || hidden % heads != 0)
    throw std::invalid_argument("LrmConfig: bad transformer dimensions");
}

LrmInput assemble_lrm_input(const synth::PosedFrame& view0, const synth::PosedFrame& view1,
                            const Tensor& mono_depth0, const Tensor& mono_depth1) {
  const auto& cam = view0.camera;
  if (view1.camera.width != cam.width || view1.camera.height != cam.height ||
      view1.camera.fx != cam.fx || view1.camera.fy != cam.fy || view1.camera.cx != cam.cx ||
      view1.camera.cy != cam.cy)
    throw std::invalid_argument("assemble_lrm_input: views must share camera intrinsics");
  const int H = cam.height, W = cam.width;
  auto check_view = [&](const synth::PosedFrame& v, const Tensor& mono) {
    if (v.image.shape() != Shape{H, W, 3})
      throw std::invalid_argument("assemble_lrm_input: image resolution mismatch, got " +
                                  shape_str(v.image.shape()));
    if (mono.shape() != Shape{H, W, 1})
      throw std::invalid_argument("assemble_lrm_input: mono depth resolution mismatch, got " +
                                  shape_str(mono.shape()));
  };
  check_view(view0, mono_depth0);
  check_view(view1, mono_depth1);

  auto per_view = [&](const synth::PosedFrame& v, const Tensor& mono) {
    geom::PluckerMap plucker = geom::compute_plucker_map(cam, v.pose);
    Tensor stacked = concat({v.image, mono, plucker.data}, /*axis=*/2);  // (H,W,10)
    return reshape(stacked, {1, H, W, 10});
  };
  LrmInput input;
  input.views = concat({per_view(view0, mono_depth0), per_view(view1, mono_depth1)}, 0);
  input.poses = {view0.pose, view1.pose};
  input.camera = cam;
  return input;
}

Lrm::Lrm(const LrmConfig& config, std::uint64_t seed) : config_(config) {
  config.validate();
  RandomStream rng(mix_seed(seed, 0x12A));
  const int d = config.hidden, p = config.patch;
  patch_embed_ = Linear(p * p * 10, d, params_, "patch_embed", rng);
  pos_embedding_ = Tensor::param({config.tokens_per_view(), d});
  init_trunc_normal(pos_embedding_, rng, 0.02);
  params_.add("pos_embedding", pos_embedding_);
  for (int i = 0; i < config.layers; ++i)
    blocks_.emplace_back(d, config.heads, config.mlp, params_, "block" + std::to_string(i), rng);
  final_norm_ = LayerNorm(d, params_, "final_norm");
  unpatch_ = Linear(d, p * p * (1 + config.feature_channels), params_, "unpatch", rng, 0.02,
                    /*zero_init=*/true);
}

LrmOutput Lrm::forward(const LrmInput& input) const {
  const int H = config_.image_size, W = config_.image_size, p = config_.patch;
  if (input.views.shape() != Shape{2, H, W, 10})
    throw std::invalid_argument("Lrm::forward: expected views (2," + std::to_string(H) + "," +
                                std::to_string(W) + ",10), got " + shape_str(input.views.shape()));
  const int tokens = config_.tokens_per_view();
  Tensor x = space_to_patches(input.views, p);              // (2, T, p*p*10)
  x = patch_embed_.forward(x);                              // (2, T, d)
  x = add(x, broadcast(pos_embedding_, x.shape()));         // shared across views
  x = reshape(x, {1, 2 * tokens, config_.hidden});          // one joint sequence
  for (const auto& block : blocks_) x = block.forward(x);
  x = final_norm_.forward(x);
  x = reshape(x, {2, tokens, config_.hidden});
  x = unpatch_.forward(x);                                  // (2, T, p*p*17)
  Tensor maps = patches_to_space(x, H, W, p, 1 + config_.feature_channels);
  LrmOutput out;
  out.raw_distance = slice(maps, 3, 0, 1);
  out.features = slice(maps, 3, 1, config_.feature_channels);
  return out;
}

geom::FeaturePointCloud Lrm::to_cloud(const LrmOutput& output, const LrmInput& input,
                                      const geom::DepthRange& range) const {
  const int p = config_.patch;
  const int h = config_.grid(), w = config_.grid();
  const geom::CameraModel latent_cam = input.camera.scaled_to(w, h);
  Tensor raw_lat = avg_pool2d(output.raw_distance, p);  // (2,h,w,1)
  Tensor feat_lat = avg_pool2d(output.features, p);     // (2,h,w,c)

  std::vector<Tensor> point_parts, feat_parts;
  for (int v = 0; v < 2; ++v) {
    geom::RayGrid rays = geom::compute_rays(latent_cam, input.poses[v]);
    Tensor raw_v = reshape(slice(raw_lat, 0, v, 1), {h, w, 1});
    Tensor pts = geom::unproject_with_distance(raw_v, rays, range);  // (h,w,3)
    point_parts.push_back(reshape(pts, {h * w, 3}));
    feat_parts.push_back(
        reshape(slice(feat_lat, 0, v, 1), {h * w, config_.feature_channels}));
  }
  geom::FeaturePointCloud cloud;
  cloud.points = concat(point_parts, 0);
  cloud.features = concat(feat_parts, 0);
  cloud.source_view_ids.assign(2 * h * w, 0);
  for (int i = h * w; i < 2 * h * w; ++i) cloud.source_view_ids[i] = 1;
  return cloud;
}

Tensor Lrm::regressed_depth(const LrmOutput& output, const geom::DepthRange& range) {
  return add_scalar(scale(sigmoid(output.raw_distance), range.far - range.near), range.near);
}

}  // namespace scenegen::lrm
