// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "scenegen/core/tensor.hpp"

namespace scenegen::geom {

// Pinhole intrinsics. Pixel (u,v) covers [u,u+1)x[v,v+1); its center is
// (u+0.5, v+0.5). Camera frame: +x right, +y down, +z forward.
struct CameraModel {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const;
  // Intrinsics rescaled to a new resolution (e.g. the latent grid).
  CameraModel scaled_to(int new_width, int new_height) const;
};

// Rigid camera-to-world transform; translation is the camera center.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate(double tol = 1e-6) const;
  Eigen::Vector3d to_world(const Eigen::Vector3d& p_cam) const {
    return rotation * p_cam + translation;
  }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& p_world) const {
    return rotation.transpose() * (p_world - translation);
  }
  static Pose identity() { return Pose{}; }
};

// Scene depth bounds used by sigmoid-parameterized unprojection.
struct DepthRange {
  double near = 0.1;
  double far = 20.0;
};

// Per-pixel ray grid in world coordinates; directions are unit length.
struct RayGrid {
  Tensor origins;     // (H,W,3), constant camera center
  Tensor directions;  // (H,W,3), unit vectors
  int height = 0, width = 0;
};

RayGrid compute_rays(const CameraModel& camera, const Pose& pose);

// Lifts a z-depth map to world points: depth is distance along the optical
// axis, not along the ray. depth: (H,W,1). Plain data; no tape.
Tensor unproject_depth_map(const Tensor& depth, const CameraModel& camera, const Pose& pose);

// Alg-style unprojection from a raw distance field: ray length is
// near*(1-sigmoid(raw)) + far*sigmoid(raw), strictly inside (near, far).
// raw: (H,W,1) (may require grad); rays from compute_rays. Returns (H,W,3).
Tensor unproject_with_distance(const Tensor& raw_distance, const RayGrid& rays,
                               const DepthRange& range);

// The scalar depth value for a raw distance (same sigmoid mapping).
double distance_from_raw(double raw, const DepthRange& range);

}  // namespace scenegen::geom
