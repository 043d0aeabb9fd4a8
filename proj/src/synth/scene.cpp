// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/synth/scene.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scenegen/core/random.hpp"
#include "scenegen/geometry/splat.hpp"

namespace scenegen::synth {

namespace {

struct Hit {
  double s = std::numeric_limits<double>::infinity();  // z-depth parameter
  int axis = 1;             // face normal axis of the hit
  Eigen::Vector3d point;
  const BoxPrimitive* prim = nullptr;
  bool ground = false;
};

// Ray p(s) = o + d*s with d the camera ray scaled so s equals z-depth.
bool intersect_box(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const BoxPrimitive& box,
                   double& s_out, int& axis_out) {
  double tmin = 0.0, tmax = std::numeric_limits<double>::infinity();
  int axis_min = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d(i)) < 1e-12) {
      if (o(i) < box.lo(i) || o(i) > box.hi(i)) return false;
      continue;
    }
    const double inv = 1.0 / d(i);
    double t0 = (box.lo(i) - o(i)) * inv;
    double t1 = (box.hi(i) - o(i)) * inv;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > tmin) {
      tmin = t0;
      axis_min = i;
    }
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return false;
  }
  if (axis_min < 0) return false;  // origin inside the box on all axes
  if (tmin <= 1e-9) return false;  // behind or at the camera
  s_out = tmin;
  axis_out = axis_min;
  return true;
}

bool intersect_ground(const Eigen::Vector3d& o, const Eigen::Vector3d& d, double extent,
                      double& s_out) {
  if (std::abs(d.y()) < 1e-12) return false;
  const double s = -o.y() / d.y();
  if (s <= 1e-9) return false;
  const Eigen::Vector3d p = o + d * s;
  if (std::abs(p.x()) > extent || std::abs(p.z()) > extent) return false;
  s_out = s;
  return true;
}

double checker(const Eigen::Vector3d& p, double freq) {
  const long long parity = static_cast<long long>(std::floor(p.x() * freq)) +
                           static_cast<long long>(std::floor(p.y() * freq)) +
                           static_cast<long long>(std::floor(p.z() * freq));
  return (parity & 1) ? 1.0 : -1.0;
}

double face_shade(int axis) {
  switch (axis) {
    case 0: return 0.86;  // x faces
    case 2: return 0.74;  // z faces
    default: return 1.0;  // y faces (tops)
  }
}

}  // namespace

Eigen::Vector3d semantic_base_color(SemanticClass c) {
  switch (c) {
    case SemanticClass::kGround: return {0.10, 0.55, 0.12};
    case SemanticClass::kBuilding: return {0.46, 0.46, 0.55};
    case SemanticClass::kRoof: return {0.75, 0.13, 0.10};
    case SemanticClass::kObstacle: return {0.85, 0.70, 0.10};
    case SemanticClass::kSky: return {0.46, 0.70, 0.95};
  }
  return {0, 0, 0};
}

SemanticClass classify_palette_color(const Eigen::Vector3d& rgb) {
  // Cosine similarity is insensitive to brightness, which shading and
  // texture modulate.
  double best = -2.0;
  SemanticClass best_c = SemanticClass::kSky;
  const double n = rgb.norm();
  for (int i = 0; i < kSemanticClassCount; ++i) {
    const auto c = static_cast<SemanticClass>(i);
    const Eigen::Vector3d base = semantic_base_color(c);
    const double sim = n < 1e-9 ? 0.0 : rgb.dot(base) / (n * base.norm());
    if (sim > best) {
      best = sim;
      best_c = c;
    }
  }
  return best_c;
}

SceneDescription generate_scene(std::uint64_t seed, const SceneParams& params) {
  if (params.min_primitives < 1 || params.max_primitives < params.min_primitives)
    throw std::invalid_argument("generate_scene: empty primitive count range");
  RandomStream rng(mix_seed(seed, 0x5CE4E));
  SceneDescription scene;
  scene.seed = seed;
  scene.params = params;

  const int count = rng.uniform_int(params.min_primitives, params.max_primitives);
  const double e = params.extent;
  int last_roofless_building = -1;
  for (int i = 0; i < count; ++i) {
    const double kind = rng.uniform();
    BoxPrimitive box;
    box.tint = rng.uniform();
    box.checker_freq = rng.uniform(0.8, 2.2);
    if (kind < 0.25 && last_roofless_building >= 0) {
      // roof slab capping an existing building
      const BoxPrimitive& b = scene.primitives[last_roofless_building];
      box.semantic = SemanticClass::kRoof;
      box.lo = Eigen::Vector3d(b.lo.x() - 0.15, b.hi.y(), b.lo.z() - 0.15);
      box.hi = Eigen::Vector3d(b.hi.x() + 0.15, b.hi.y() + rng.uniform(0.2, 0.45), b.hi.z() + 0.15);
      last_roofless_building = -1;
    } else if (kind < 0.65) {
      box.semantic = SemanticClass::kBuilding;
      const double w = rng.uniform(0.8, 2.2), d = rng.uniform(0.8, 2.2);
      const double h = rng.uniform(1.2, params.max_height - 0.5);
      const double x = rng.uniform(-e + 1.5, e - 1.5), z = rng.uniform(-e + 1.5, e - 1.5);
      box.lo = Eigen::Vector3d(x - w / 2, 0.0, z - d / 2);
      box.hi = Eigen::Vector3d(x + w / 2, h, z + d / 2);
      last_roofless_building = static_cast<int>(scene.primitives.size());
    } else {
      box.semantic = SemanticClass::kObstacle;
      const double w = rng.uniform(0.3, 0.9);
      const double h = rng.uniform(0.3, 0.8);
      const double x = rng.uniform(-e + 1.0, e - 1.0), z = rng.uniform(-e + 1.0, e - 1.0);
      box.lo = Eigen::Vector3d(x - w / 2, 0.0, z - w / 2);
      box.hi = Eigen::Vector3d(x + w / 2, h, z + w / 2);
    }
    scene.primitives.push_back(box);
  }
  return scene;
}

PosedFrame render_view(const SceneDescription& scene, const geom::Pose& pose,
                       const geom::CameraModel& camera, const geom::DepthRange& range) {
  camera.validate();
  pose.validate();
  const int H = camera.height, W = camera.width;
  PosedFrame frame;
  frame.pose = pose;
  frame.camera = camera;
  frame.image = Tensor::zeros({H, W, 3});
  frame.depth = Tensor::zeros({H, W, 1});
  frame.semantic = Tensor::zeros({H, W, 1});

  const Eigen::Vector3d o = pose.translation;
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      // direction scaled so that the ray parameter equals z-depth
      const Eigen::Vector3d dir_cam((u + 0.5 - camera.cx) / camera.fx,
                                    (v + 0.5 - camera.cy) / camera.fy, 1.0);
      const Eigen::Vector3d d = pose.rotation * dir_cam;

      Hit hit;
      double s;
      int axis;
      if (intersect_ground(o, d, scene.params.extent, s) && s < hit.s) {
        hit.s = s;
        hit.axis = 1;
        hit.ground = true;
        hit.prim = nullptr;
      }
      for (const auto& box : scene.primitives)
        if (intersect_box(o, d, box, s, axis) && s < hit.s) {
          hit.s = s;
          hit.axis = axis;
          hit.ground = false;
          hit.prim = &box;
        }

      Eigen::Vector3d color;
      double depth;
      int semantic;
      if (std::isinf(hit.s)) {
        color = semantic_base_color(SemanticClass::kSky);
        depth = range.far;
        semantic = static_cast<int>(SemanticClass::kSky);
      } else {
        hit.point = o + d * hit.s;
        depth = hit.s;
        const SemanticClass cls = hit.ground ? SemanticClass::kGround : hit.prim->semantic;
        semantic = static_cast<int>(cls);
        const double freq = hit.ground ? 0.5 : hit.prim->checker_freq;
        const double tint = hit.ground ? 0.5 : hit.prim->tint;
        const double tex = 1.0 + scene.params.texture_amplitude * checker(hit.point, freq);
        const double shade = face_shade(hit.axis) * (0.85 + 0.15 * tint);
        color = semantic_base_color(cls) * shade * tex;
      }
      const std::int64_t pix = static_cast<std::int64_t>(v) * W + u;
      for (int c = 0; c < 3; ++c)
        frame.image.data()[pix * 3 + c] = std::clamp(color(c), 0.0, 1.0);
      frame.depth.data()[pix] = depth;
      frame.semantic.data()[pix] = static_cast<double>(semantic);
    }
  return frame;
}

geom::Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  const Eigen::Vector3d up(0, 1, 0);
  Eigen::Vector3d f = (target - eye).normalized();
  Eigen::Vector3d x = f.cross(up);
  if (x.norm() < 1e-8) x = Eigen::Vector3d(1, 0, 0);  // looking straight up/down
  x.normalize();
  const Eigen::Vector3d y = f.cross(x).normalized();  // image-down axis
  geom::Pose pose;
  pose.rotation.col(0) = x;
  pose.rotation.col(1) = y;
  pose.rotation.col(2) = f;
  // keep det = +1
  if (pose.rotation.determinant() < 0) pose.rotation.col(0) = -x;
  pose.translation = eye;
  pose.validate(1e-9);
  return pose;
}

Tensor mono_depth_stub(const PosedFrame& frame, std::uint64_t seed,
                       const MonoDepthStubConfig& config) {
  if (!frame.has_depth())
    throw std::invalid_argument("mono_depth_stub: frame carries no ground-truth depth");
  RandomStream rng(mix_seed(seed, 0xDEB7));
  const double s = rng.uniform(config.scale_min, config.scale_max);
  const double t = rng.uniform(config.shift_min, config.shift_max);
  const int H = frame.depth.dim(0), W = frame.depth.dim(1);

  // smooth noise field: low-res uniform grid, bilinearly upsampled
  const int g = config.noise_grid;
  Tensor grid = Tensor::zeros({g, g, 1});
  for (int i = 0; i < g * g; ++i) grid.data()[i] = rng.uniform(-1.0, 1.0);
  Tensor field = geom::bilinear_resize(grid, H, W);

  Tensor out = Tensor::zeros({H, W, 1});
  for (std::int64_t i = 0; i < out.size(); ++i) {
    const double d = frame.depth.at(i);
    out.data()[i] = s * d + t + config.noise_rel * d * field.at(i);
  }
  return out;
}

}  // namespace scenegen::synth
