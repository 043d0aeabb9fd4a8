// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "scenegen/synth/trajectory.hpp"

namespace scenegen::synth {

// One training record: a short clip with everything the losses need.
struct ClipRecord {
  std::vector<PosedFrame> frames;   // image + exact depth + semantics + pose
  std::vector<Tensor> mono_depths;  // stub monocular depth per frame
};

struct ClipDataset {
  geom::CameraModel camera;
  std::uint64_t scene_seed = 0;
  SceneParams scene_params;
  TrajectoryKind trajectory_kind = TrajectoryKind::kOrbit;
  std::vector<ClipRecord> clips;
};

// Slices a trajectory into disjoint clips of frames_per_clip frames
// (frames_per_clip must satisfy n = 1 (mod 4)) and renders each frame.
ClipDataset build_clip_dataset(const SceneDescription& scene, const Trajectory& traj,
                               int frames_per_clip, std::uint64_t seed,
                               const MonoDepthStubConfig& stub_config = {});

// Directory layout (see docs/data_format.md): a root manifest plus one
// subdirectory per clip holding PNG frames, flat-binary depth/mono/semantic
// arrays, and a structured-text pose manifest.
void write_clip_dataset(const std::filesystem::path& dir, const ClipDataset& ds);
ClipDataset read_clip_dataset(const std::filesystem::path& dir);

// Renders the scene layout into per-pose depth and semantic map pairs.
std::vector<std::pair<Tensor, Tensor>> render_layout_maps(const SceneDescription& scene,
                                                          const Trajectory& traj);

}  // namespace scenegen::synth
