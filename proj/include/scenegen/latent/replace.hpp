// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/geometry/camera.hpp"
#include "scenegen/latent/compress.hpp"

namespace scenegen::latent {

// The compressed spatial condition after temporal latent replacement.
struct SpatiotemporalCondition {
  LatentClip z_st;
  std::vector<int> replaced_indices;
  std::vector<std::uint8_t> visibility;  // (N,h,w) carried for diagnostics
};

// Pose-list augmentation for conditioning at pixel frame k > 0: duplicates
// of pose k are inserted after position k so that one latent group consists
// entirely of the duplicated pose, extending the list until the total frame
// count is back to 1 (mod 4). k = 0 needs no augmentation.
struct TemporalAugmentation {
  std::vector<geom::Pose> poses;  // augmented pose list
  std::vector<int> source_index;  // augmented frame -> original frame index
  int replaced_latent = 0;        // latent frame the duplicates compress into
  int duplicates_inserted = 0;
};

TemporalAugmentation augment_window_for_temporal(const std::vector<geom::Pose>& poses, int k);

// Replaces one latent frame of z_spat with an (h,w,c) or (1,h,w,c) encoded
// temporal image. The result stays on the tape for the other frames.
SpatiotemporalCondition temporal_replace(const LatentClip& z_spat, const Tensor& encoded_temporal,
                                         int replaced_latent_index,
                                         std::vector<std::uint8_t> visibility = {});

// Second (or later) replacement on an existing condition.
void replace_in_place(SpatiotemporalCondition& cond, const Tensor& encoded_temporal,
                      int replaced_latent_index);

}  // namespace scenegen::latent
