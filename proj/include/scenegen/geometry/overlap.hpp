// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "scenegen/geometry/camera.hpp"

namespace scenegen::geom {

// Mean fraction of the candidate's unprojected pixels that land inside the
// image bounds with positive depth, averaged over the window poses. Frustum
// containment only; no occlusion test against the window views.
double frustum_overlap_score(const Tensor& candidate_depth, const Pose& candidate_pose,
                             const CameraModel& camera, const std::vector<Pose>& window_poses);

}  // namespace scenegen::geom
