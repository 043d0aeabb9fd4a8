// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/geometry/overlap.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegen::geom {

double frustum_overlap_score(const Tensor& candidate_depth, const Pose& candidate_pose,
                             const CameraModel& camera, const std::vector<Pose>& window_poses) {
  if (window_poses.empty())
    throw std::invalid_argument("frustum_overlap_score: empty window pose list");
  const Tensor points = unproject_depth_map(candidate_depth, camera, candidate_pose);
  const int H = camera.height, W = camera.width;
  const std::int64_t npts = static_cast<std::int64_t>(H) * W;

  double total = 0.0;
  for (const auto& pose : window_poses) {
    const Eigen::Matrix3d Rt = pose.rotation.transpose();
    const Eigen::Vector3d tr = pose.translation;
    std::int64_t inside = 0;
    for (std::int64_t i = 0; i < npts; ++i) {
      const Eigen::Vector3d p(points.at(3 * i), points.at(3 * i + 1), points.at(3 * i + 2));
      const Eigen::Vector3d pc = Rt * (p - tr);
      if (pc.z() <= 0.0) continue;
      const double u = camera.fx * pc.x() / pc.z() + camera.cx;
      const double v = camera.fy * pc.y() / pc.z() + camera.cy;
      if (u >= 0.0 && u < W && v >= 0.0 && v < H) ++inside;
    }
    total += static_cast<double>(inside) / static_cast<double>(npts);
  }
  return total / static_cast<double>(window_poses.size());
}

}  // namespace scenegen::geom
