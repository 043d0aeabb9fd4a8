// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "scenegen/geometry/camera.hpp"

namespace scenegen::synth {

enum class SemanticClass : int {
  kGround = 0,
  kBuilding = 1,
  kRoof = 2,
  kObstacle = 3,
  kSky = 4,
};
constexpr int kSemanticClassCount = 5;

// Palette colors are hue-separated so rendered pixels map back to their
// class by nearest chromaticity even under face shading and texture.
Eigen::Vector3d semantic_base_color(SemanticClass c);
SemanticClass classify_palette_color(const Eigen::Vector3d& rgb);

struct BoxPrimitive {
  Eigen::Vector3d lo, hi;  // axis-aligned corners, lo < hi componentwise
  SemanticClass semantic = SemanticClass::kBuilding;
  double tint = 0.0;           // per-primitive brightness variation in [0,1]
  double checker_freq = 1.0;   // procedural texture frequency
};

struct SceneParams {
  int min_primitives = 6;
  int max_primitives = 12;
  double extent = 8.0;       // ground spans [-extent, extent] in x and z
  double max_height = 4.0;
  double texture_amplitude = 0.06;
};

// A finite textured ground rectangle at y=0 plus generated boxes.
struct SceneDescription {
  std::uint64_t seed = 0;
  SceneParams params;
  std::vector<BoxPrimitive> primitives;
};

SceneDescription generate_scene(std::uint64_t seed, const SceneParams& params);

struct PosedFrame {
  Tensor image;     // (H,W,3) in [0,1]
  Tensor depth;     // (H,W,1) z-depth, world units; may be undefined
  Tensor semantic;  // (H,W,1) class ids as doubles; may be undefined
  geom::Pose pose;
  geom::CameraModel camera;

  bool has_depth() const { return depth.defined(); }
};

// Analytic ray cast: flat shading + checker texture, exact z-depth of the
// nearest hit, semantic id of the nearest hit. Sky pixels carry far depth.
PosedFrame render_view(const SceneDescription& scene, const geom::Pose& pose,
                       const geom::CameraModel& camera, const geom::DepthRange& range = {});

// Camera orientation looking from `eye` toward `target` with image-down
// aligned against world up.
geom::Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target);

struct MonoDepthStubConfig {
  double scale_min = 0.5, scale_max = 2.0;
  double shift_min = 0.0, shift_max = 0.5;
  double noise_rel = 0.02;  // |noise| <= noise_rel * depth
  int noise_grid = 5;
};

// Scale/shift/noise-corrupted copy of the frame's depth map: the stand-in
// for a scale-free monocular depth predictor. Deterministic in seed.
Tensor mono_depth_stub(const PosedFrame& frame, std::uint64_t seed,
                       const MonoDepthStubConfig& config = {});

}  // namespace scenegen::synth
