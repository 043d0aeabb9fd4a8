// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/geometry/camera.hpp"

namespace scenegen::geom {

// Per-pixel ray lines as (unit direction d, moment m = o x d) in the world
// frame; independent of the point chosen on the ray.
struct PluckerMap {
  Tensor data;  // (H,W,6): [dx,dy,dz, mx,my,mz]
  int height = 0, width = 0;

  Eigen::Vector3d direction(int v, int u) const;
  Eigen::Vector3d moment(int v, int u) const;
};

PluckerMap compute_plucker_map(const CameraModel& camera, const Pose& pose);

// Worst per-pixel violation of |d|=1 and d.m=0 (diagnostic for tests).
double plucker_max_violation(const PluckerMap& map);

}  // namespace scenegen::geom
