// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/geometry/plucker.hpp"

#include <cmath>

namespace scenegen::geom {

Eigen::Vector3d PluckerMap::direction(int v, int u) const {
  const std::int64_t off = (static_cast<std::int64_t>(v) * width + u) * 6;
  return {data.at(off), data.at(off + 1), data.at(off + 2)};
}

Eigen::Vector3d PluckerMap::moment(int v, int u) const {
  const std::int64_t off = (static_cast<std::int64_t>(v) * width + u) * 6;
  return {data.at(off + 3), data.at(off + 4), data.at(off + 5)};
}

PluckerMap compute_plucker_map(const CameraModel& camera, const Pose& pose) {
  camera.validate();
  pose.validate();
  const int H = camera.height, W = camera.width;
  PluckerMap map;
  map.height = H;
  map.width = W;
  map.data = Tensor::zeros({H, W, 6});
  const Eigen::Vector3d o = pose.translation;
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const Eigen::Vector3d dir_cam((u + 0.5 - camera.cx) / camera.fx,
                                    (v + 0.5 - camera.cy) / camera.fy, 1.0);
      // unit-normalize before the cross product
      const Eigen::Vector3d d = (pose.rotation * dir_cam).normalized();
      const Eigen::Vector3d m = o.cross(d);
      const std::int64_t off = (static_cast<std::int64_t>(v) * W + u) * 6;
      for (int i = 0; i < 3; ++i) {
        map.data.data()[off + i] = d(i);
        map.data.data()[off + 3 + i] = m(i);
      }
    }
  return map;
}

double plucker_max_violation(const PluckerMap& map) {
  double worst = 0.0;
  for (int v = 0; v < map.height; ++v)
    for (int u = 0; u < map.width; ++u) {
      const Eigen::Vector3d d = map.direction(v, u);
      const Eigen::Vector3d m = map.moment(v, u);
      worst = std::max(worst, std::abs(d.norm() - 1.0));
      worst = std::max(worst, std::abs(d.dot(m)));
    }
  return worst;
}

}  // namespace scenegen::geom
