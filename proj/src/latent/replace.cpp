// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/latent/replace.hpp"

#include <algorithm>
#include <stdexcept>

#include "scenegen/core/ops.hpp"

namespace scenegen::latent {

TemporalAugmentation augment_window_for_temporal(const std::vector<geom::Pose>& poses, int k) {
  const int n0 = static_cast<int>(poses.size());
  if (k < 0 || k >= n0)
    throw std::invalid_argument("augment_window_for_temporal: frame index " + std::to_string(k) +
                                " outside window of " + std::to_string(n0) + " poses");
  TemporalAugmentation aug;
  if (k == 0) {
    aug.poses = poses;
    aug.source_index.resize(n0);
    for (int i = 0; i < n0; ++i) aug.source_index[i] = i;
    aug.replaced_latent = 0;
    aug.duplicates_inserted = 0;
    if ((n0 % 4) != 1)
      throw std::invalid_argument(
          "augment_window_for_temporal: window length must satisfy N = 1 (mod 4), got " +
          std::to_string(n0));
    return aug;
  }
  // Smallest d >= 3 duplicates keeping (n0 + d) = 1 (mod 4); the static run
  // then spans frames [k, k+d].
  int d = 3;
  while ((n0 + d) % 4 != 1) ++d;
  // The run must fully contain one latent group [4j-3, 4j].
  const int j_lo = (k + 3 + 3) / 4;  // ceil((k+3)/4)
  const int j_hi = (k + d) / 4;
  if (j_lo > j_hi)
    throw std::invalid_argument("augment_window_for_temporal: frame " + std::to_string(k) +
                                " does not align to a latent-frame boundary after inserting " +
                                std::to_string(d) + " duplicates (window of " +
                                std::to_string(n0) + ")");
  aug.replaced_latent = j_lo;
  aug.duplicates_inserted = d;
  aug.poses.reserve(n0 + d);
  aug.source_index.reserve(n0 + d);
  for (int i = 0; i <= k; ++i) {
    aug.poses.push_back(poses[i]);
    aug.source_index.push_back(i);
  }
  for (int i = 0; i < d; ++i) {
    aug.poses.push_back(poses[k]);
    aug.source_index.push_back(k);
  }
  for (int i = k + 1; i < n0; ++i) {
    aug.poses.push_back(poses[i]);
    aug.source_index.push_back(i);
  }
  return aug;
}

SpatiotemporalCondition temporal_replace(const LatentClip& z_spat, const Tensor& encoded_temporal,
                                         int replaced_latent_index,
                                         std::vector<std::uint8_t> visibility) {
  SpatiotemporalCondition cond;
  cond.z_st = z_spat;
  cond.visibility = std::move(visibility);
  replace_in_place(cond, encoded_temporal, replaced_latent_index);
  return cond;
}

void replace_in_place(SpatiotemporalCondition& cond, const Tensor& encoded_temporal,
                      int replaced_latent_index) {
  LatentClip& clip = cond.z_st;
  const int n = clip.frames();
  if (replaced_latent_index < 0 || replaced_latent_index >= n)
    throw std::invalid_argument("temporal_replace: latent index " +
                                std::to_string(replaced_latent_index) + " outside clip of " +
                                std::to_string(n) + " frames");
  const int h = clip.data.dim(1), w = clip.data.dim(2), c = clip.data.dim(3);
  Tensor enc = encoded_temporal;
  if (enc.ndim() == 3) enc = reshape(enc, {1, h, w, c});
  if (enc.shape() != Shape{1, h, w, c})
    throw std::invalid_argument("temporal_replace: encoded temporal " +
                                shape_str(encoded_temporal.shape()) +
                                " does not match latent frame shape");
  std::vector<Tensor> parts;
  if (replaced_latent_index > 0) parts.push_back(slice(clip.data, 0, 0, replaced_latent_index));
  parts.push_back(enc);
  if (replaced_latent_index + 1 < n)
    parts.push_back(slice(clip.data, 0, replaced_latent_index + 1, n - replaced_latent_index - 1));
  clip.data = parts.size() == 1 ? parts[0] : concat(parts, 0);
  cond.replaced_indices.push_back(replaced_latent_index);
  std::sort(cond.replaced_indices.begin(), cond.replaced_indices.end());
}

}  // namespace scenegen::latent
