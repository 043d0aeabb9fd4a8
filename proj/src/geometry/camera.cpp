// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/geometry/camera.hpp"

#include <cmath>
#include <stdexcept>

#include "scenegen/core/ops.hpp"

namespace scenegen::geom {

void CameraModel::validate() const {
  if (fx <= 0 || fy <= 0)
    throw std::invalid_argument("CameraModel: focal lengths must be positive");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("CameraModel: image size must be positive");
  if (cx <= 0 || cx >= width || cy <= 0 || cy >= height)
    throw std::invalid_argument("CameraModel: principal point outside the image");
}

CameraModel CameraModel::scaled_to(int new_width, int new_height) const {
  const double sx = static_cast<double>(new_width) / width;
  const double sy = static_cast<double>(new_height) / height;
  return CameraModel{fx * sx, fy * sy, cx * sx, cy * sy, new_width, new_height};
}

void Pose::validate(double tol) const {
  const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("Pose: rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > tol)
    throw std::invalid_argument("Pose: rotation determinant is not +1");
}

RayGrid compute_rays(const CameraModel& camera, const Pose& pose) {
  camera.validate();
  const int H = camera.height, W = camera.width;
  RayGrid grid;
  grid.height = H;
  grid.width = W;
  grid.origins = Tensor::zeros({H, W, 3});
  grid.directions = Tensor::zeros({H, W, 3});
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const Eigen::Vector3d dir_cam((u + 0.5 - camera.cx) / camera.fx,
                                    (v + 0.5 - camera.cy) / camera.fy, 1.0);
      const Eigen::Vector3d d = (pose.rotation * dir_cam).normalized();
      const std::int64_t off = (static_cast<std::int64_t>(v) * W + u) * 3;
      for (int i = 0; i < 3; ++i) {
        grid.origins.data()[off + i] = pose.translation(i);
        grid.directions.data()[off + i] = d(i);
      }
    }
  return grid;
}

Tensor unproject_depth_map(const Tensor& depth, const CameraModel& camera, const Pose& pose) {
  if (depth.ndim() != 3 || depth.dim(2) != 1 || depth.dim(0) != camera.height ||
      depth.dim(1) != camera.width)
    throw std::invalid_argument("unproject_depth_map: depth " + shape_str(depth.shape()) +
                                " does not match camera " + std::to_string(camera.width) + "x" +
                                std::to_string(camera.height));
  const int H = camera.height, W = camera.width;
  Tensor points = Tensor::zeros({H, W, 3});
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const double z = depth.at(static_cast<std::int64_t>(v) * W + u);
      const Eigen::Vector3d p_cam((u + 0.5 - camera.cx) / camera.fx * z,
                                  (v + 0.5 - camera.cy) / camera.fy * z, z);
      const Eigen::Vector3d p = pose.to_world(p_cam);
      const std::int64_t off = (static_cast<std::int64_t>(v) * W + u) * 3;
      for (int i = 0; i < 3; ++i) points.data()[off + i] = p(i);
    }
  return points;
}

Tensor unproject_with_distance(const Tensor& raw_distance, const RayGrid& rays,
                               const DepthRange& range) {
  if (range.near >= range.far || range.near <= 0)
    throw std::invalid_argument("unproject_with_distance: need far > near > 0, got near=" +
                                std::to_string(range.near) + " far=" + std::to_string(range.far));
  const int H = rays.height, W = rays.width;
  if (raw_distance.ndim() != 3 || raw_distance.dim(0) != H || raw_distance.dim(1) != W ||
      raw_distance.dim(2) != 1)
    throw std::invalid_argument("unproject_with_distance: raw distance " +
                                shape_str(raw_distance.shape()) + " does not match ray grid");
  Tensor w = sigmoid(raw_distance);
  Tensor dist = add_scalar(scale(w, range.far - range.near), range.near);  // (H,W,1)
  // sigmoid saturates for |raw| >~ 40 in double precision; keep the contract
  // that depths are strictly inside (near, far)
  dist = clamp_op(dist, std::nextafter(range.near, range.far),
                  std::nextafter(range.far, range.near));
  Tensor scaled = mul(rays.directions, broadcast(dist, {H, W, 3}));
  return add(rays.origins, scaled);
}

double distance_from_raw(double raw, const DepthRange& range) {
  const double s = 1.0 / (1.0 + std::exp(-raw));
  return range.near * (1.0 - s) + range.far * s;
}

}  // namespace scenegen::geom
