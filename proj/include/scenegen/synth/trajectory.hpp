// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/synth/scene.hpp"

namespace scenegen::synth {

enum class TrajectoryKind { kOrbit, kDolly, kLawnmower, kRandomWalk };

TrajectoryKind trajectory_kind_from_string(const std::string& s);
std::string to_string(TrajectoryKind k);

struct TrajectoryParams {
  double step_bound = 0.8;              // max consecutive camera-center distance
  double min_consecutive_overlap = 0.3;
  int resample_attempts = 100;
  // orbit geometry
  double orbit_radius = 6.0;
  double orbit_height = 3.5;
  // lawnmower sweep
  int lawnmower_row_length = 40;
  double lawnmower_height = 5.0;
  double lawnmower_row_step = 0.6;
  double lawnmower_x_step = 0.25;
};

struct Trajectory {
  std::vector<geom::Pose> poses;
  geom::CameraModel camera;
  TrajectoryKind kind = TrajectoryKind::kOrbit;

  int length() const { return static_cast<int>(poses.size()); }
};

// Generates a pose path whose consecutive frames keep at least the
// configured frustum overlap; violating paths are rejected after the
// configured number of resampling attempts.
Trajectory generate_trajectory(TrajectoryKind kind, int length, const SceneDescription& scene,
                               const geom::CameraModel& camera, std::uint64_t seed,
                               const TrajectoryParams& params = {});

// Smallest consecutive-pose overlap along the path (diagnostic).
double min_consecutive_overlap(const Trajectory& traj, const SceneDescription& scene);

}  // namespace scenegen::synth
