// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "scenegen/geometry/camera.hpp"

namespace scenegen::geom {

// World points carrying latent feature vectors, tagged with the source view
// they were unprojected from. points/features may live on the autodiff tape.
struct FeaturePointCloud {
  Tensor points;                     // (K,3)
  Tensor features;                   // (K,c)
  std::vector<int> source_view_ids;  // size K

  int count() const { return points.defined() ? points.dim(0) : 0; }
  void validate() const;
};

struct ViewTarget {
  CameraModel camera;
  Pose pose;
};

// Nearest-point z-buffer render of a feature cloud into target views.
// Invisible pixels carry exactly-zero features and zero depth.
struct RenderedCondition {
  Tensor features;                      // (N,h,w,c)
  Tensor depths;                        // (N,h,w,1), z-depth of the winner
  std::vector<std::uint8_t> visibility; // N*h*w
  std::vector<std::int64_t> winners;    // N*h*w, point index or -1

  int frames = 0, height = 0, width = 0, channels = 0;

  bool visible(int f, int y, int x) const {
    return visibility[(static_cast<std::int64_t>(f) * height + y) * width + x] != 0;
  }
  std::int64_t winner(int f, int y, int x) const {
    return winners[(static_cast<std::int64_t>(f) * height + y) * width + x];
  }
};

// One pixel per point, nearest depth wins; exact ties broken by lowest
// source_view_id, then lowest point index. Points behind the camera or
// projecting outside the image are discarded. Gradients flow into the
// features and the depth of each pixel's winning point; the winner choice
// itself is treated as constant.
RenderedCondition splat_render(const FeaturePointCloud& cloud,
                               const std::vector<ViewTarget>& targets);

// Plain bilinear resize for (H,W,C) data tensors (no autodiff).
Tensor bilinear_resize(const Tensor& src, int new_height, int new_width);

}  // namespace scenegen::geom
