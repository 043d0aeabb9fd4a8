// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/geometry/splat.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "scenegen/core/ops.hpp"

namespace scenegen::geom {

void FeaturePointCloud::validate() const {
  if (!points.defined() || !features.defined() || points.ndim() != 2 || points.dim(1) != 3 ||
      features.ndim() != 2 || features.dim(0) != points.dim(0))
    throw std::invalid_argument("FeaturePointCloud: inconsistent points/features");
  if (static_cast<int>(source_view_ids.size()) != points.dim(0))
    throw std::invalid_argument("FeaturePointCloud: source_view_ids size mismatch");
}

RenderedCondition splat_render(const FeaturePointCloud& cloud,
                               const std::vector<ViewTarget>& targets) {
  cloud.validate();
  if (cloud.count() == 0) throw std::invalid_argument("splat_render: empty cloud");
  if (targets.empty()) throw std::invalid_argument("splat_render: no target views");
  const int K = cloud.count();
  const int c = cloud.features.dim(1);
  const int N = static_cast<int>(targets.size());
  const int h = targets[0].camera.height, w = targets[0].camera.width;
  for (const auto& t : targets) {
    t.camera.validate();
    if (t.camera.height != h || t.camera.width != w)
      throw std::invalid_argument("splat_render: target resolutions differ");
  }

  RenderedCondition out;
  out.frames = N;
  out.height = h;
  out.width = w;
  out.channels = c;
  const std::int64_t npix = static_cast<std::int64_t>(N) * h * w;
  out.visibility.assign(npix, 0);
  auto winners = std::make_shared<std::vector<std::int64_t>>(npix, -1);
  std::vector<double> best_z(npix, 0.0);

  // Per-view rotation third rows and projection constants.
  auto r3s = std::make_shared<std::vector<Eigen::Vector3d>>();
  auto t3s = std::make_shared<std::vector<double>>();
  for (const auto& tgt : targets) {
    const Eigen::Vector3d r3 = tgt.pose.rotation.col(2);  // row 3 of R^T
    r3s->push_back(r3);
    t3s->push_back(r3.dot(tgt.pose.translation));
  }

  const double* pts = cloud.points.data();
  for (int f = 0; f < N; ++f) {
    const auto& cam = targets[f].camera;
    const auto& pose = targets[f].pose;
    const Eigen::Matrix3d Rt = pose.rotation.transpose();
    const Eigen::Vector3d tr = pose.translation;
    for (int k = 0; k < K; ++k) {
      const Eigen::Vector3d p(pts[3 * k], pts[3 * k + 1], pts[3 * k + 2]);
      const Eigen::Vector3d pc = Rt * (p - tr);
      const double z = pc.z();
      if (z <= 0.0) continue;
      const double u = cam.fx * pc.x() / z + cam.cx;
      const double v = cam.fy * pc.y() / z + cam.cy;
      const int px = static_cast<int>(std::floor(u));
      const int py = static_cast<int>(std::floor(v));
      if (px < 0 || px >= w || py < 0 || py >= h || u < 0 || v < 0) continue;
      const std::int64_t pix = (static_cast<std::int64_t>(f) * h + py) * w + px;
      const std::int64_t cur = (*winners)[pix];
      bool take = false;
      if (cur < 0) {
        take = true;
      } else if (z < best_z[pix]) {
        take = true;
      } else if (z == best_z[pix]) {
        const int vid = cloud.source_view_ids[k];
        const int cvid = cloud.source_view_ids[cur];
        take = vid < cvid || (vid == cvid && k < cur);
      }
      if (take) {
        (*winners)[pix] = k;
        best_z[pix] = z;
        out.visibility[pix] = 1;
      }
    }
  }
  out.winners = *winners;

  // Feature gather with scatter backward.
  {
    Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(npix * c);
    const double* feat = cloud.features.data();
    for (std::int64_t pix = 0; pix < npix; ++pix) {
      const std::int64_t k = (*winners)[pix];
      if (k < 0) continue;
      for (int i = 0; i < c; ++i) vals(pix * c + i) = feat[k * c + i];
    }
    Tensor features_t = cloud.features;
    out.features = make_op({N, h, w, c}, std::move(vals), {features_t},
                           [features_t, winners, npix, c](detail::TensorNode& n) {
                             if (!features_t.requires_grad()) return;
                             features_t.node()->ensure_grad();
                             double* g = features_t.node()->grad.data();
                             for (std::int64_t pix = 0; pix < npix; ++pix) {
                               const std::int64_t k = (*winners)[pix];
                               if (k < 0) continue;
                               for (int i = 0; i < c; ++i) g[k * c + i] += n.grad(pix * c + i);
                             }
                           });
  }

  // Depth of the winning point in the target frame: z = r3 . p - r3 . t.
  {
    Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(npix);
    for (std::int64_t pix = 0; pix < npix; ++pix)
      if ((*winners)[pix] >= 0) vals(pix) = best_z[pix];
    Tensor points_t = cloud.points;
    const int hw = h * w;
    out.depths = make_op({N, h, w, 1}, std::move(vals), {points_t},
                         [points_t, winners, r3s, npix, hw](detail::TensorNode& n) {
                           if (!points_t.requires_grad()) return;
                           points_t.node()->ensure_grad();
                           double* g = points_t.node()->grad.data();
                           for (std::int64_t pix = 0; pix < npix; ++pix) {
                             const std::int64_t k = (*winners)[pix];
                             if (k < 0) continue;
                             const Eigen::Vector3d& r3 = (*r3s)[pix / hw];
                             for (int i = 0; i < 3; ++i) g[k * 3 + i] += n.grad(pix) * r3(i);
                           }
                         });
  }
  return out;
}

Tensor bilinear_resize(const Tensor& src, int new_height, int new_width) {
  if (src.ndim() != 3)
    throw std::invalid_argument("bilinear_resize: need (H,W,C), got " + shape_str(src.shape()));
  const int H = src.dim(0), W = src.dim(1), C = src.dim(2);
  Tensor out = Tensor::zeros({new_height, new_width, C});
  for (int y = 0; y < new_height; ++y)
    for (int x = 0; x < new_width; ++x) {
      // align pixel centers
      const double sy = (y + 0.5) * H / new_height - 0.5;
      const double sx = (x + 0.5) * W / new_width - 0.5;
      const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, H - 1);
      const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, W - 1);
      const int y1 = std::min(y0 + 1, H - 1);
      const int x1 = std::min(x0 + 1, W - 1);
      const double fy = std::clamp(sy - y0, 0.0, 1.0);
      const double fx = std::clamp(sx - x0, 0.0, 1.0);
      for (int ch = 0; ch < C; ++ch) {
        auto at = [&](int yy, int xx) {
          return src.at((static_cast<std::int64_t>(yy) * W + xx) * C + ch);
        };
        const double v = (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x1)) +
                         fy * ((1 - fx) * at(y1, x0) + fx * at(y1, x1));
        out.data()[(static_cast<std::int64_t>(y) * new_width + x) * C + ch] = v;
      }
    }
  return out;
}

}  // namespace scenegen::geom
