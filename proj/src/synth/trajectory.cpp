// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/synth/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "scenegen/core/random.hpp"
#include "scenegen/geometry/overlap.hpp"

namespace scenegen::synth {

TrajectoryKind trajectory_kind_from_string(const std::string& s) {
  if (s == "orbit") return TrajectoryKind::kOrbit;
  if (s == "dolly") return TrajectoryKind::kDolly;
  if (s == "lawnmower") return TrajectoryKind::kLawnmower;
  if (s == "random-walk") return TrajectoryKind::kRandomWalk;
  throw std::invalid_argument("unknown trajectory kind: " + s);
}

std::string to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kOrbit: return "orbit";
    case TrajectoryKind::kDolly: return "dolly";
    case TrajectoryKind::kLawnmower: return "lawnmower";
    case TrajectoryKind::kRandomWalk: return "random-walk";
  }
  return "?";
}

namespace {

double consecutive_overlap(const SceneDescription& scene, const geom::CameraModel& camera,
                           const geom::Pose& a, const geom::Pose& b) {
  // Score with the candidate's own rendered depth, like the scene bank does.
  PosedFrame f = render_view(scene, a, camera);
  return geom::frustum_overlap_score(f.depth, a, camera, {b});
}

}  // namespace

Trajectory generate_trajectory(TrajectoryKind kind, int length, const SceneDescription& scene,
                               const geom::CameraModel& camera, std::uint64_t seed,
                               const TrajectoryParams& params) {
  if (length < 1) throw std::invalid_argument("generate_trajectory: length must be >= 1");
  RandomStream rng(mix_seed(seed, 0x7247));
  Trajectory traj;
  traj.camera = camera;
  traj.kind = kind;
  const double e = scene.params.extent;
  const Eigen::Vector3d center(0.0, 0.8, 0.0);

  switch (kind) {
    case TrajectoryKind::kOrbit: {
      // Angular step small enough to honor the translation step bound.
      const double max_step = 2.0 * std::asin(
          std::min(1.0, params.step_bound / (2.0 * params.orbit_radius)));
      const double dtheta = std::min(2.0 * M_PI / std::max(length, 8), 0.95 * max_step);
      const double theta0 = rng.uniform(0, 2.0 * M_PI);
      for (int i = 0; i < length; ++i) {
        const double th = theta0 + dtheta * i;
        const Eigen::Vector3d eye(params.orbit_radius * std::cos(th), params.orbit_height,
                                  params.orbit_radius * std::sin(th));
        traj.poses.push_back(look_at(eye, center));
      }
      break;
    }
    case TrajectoryKind::kDolly: {
      const double step = std::min(params.step_bound * 0.5, 2.0 * e / (length + 1));
      const Eigen::Vector3d start(rng.uniform(-1.0, 1.0), rng.uniform(1.2, 2.2), -e - 2.0);
      for (int i = 0; i < length; ++i) {
        const Eigen::Vector3d eye = start + Eigen::Vector3d(0, 0, step * i);
        traj.poses.push_back(look_at(eye, eye + Eigen::Vector3d(0, -0.35, 1.0)));
      }
      break;
    }
    case TrajectoryKind::kLawnmower: {
      // Fixed pitched-down orientation; boustrophedon sweep revisits rows.
      const geom::Pose orient = look_at(Eigen::Vector3d(0, params.lawnmower_height, 0),
                                        Eigen::Vector3d(0, 0, 3.5));
      const int row_len = params.lawnmower_row_length;
      for (int i = 0; i < length; ++i) {
        const int row = i / row_len;
        const int k = i % row_len;
        const int kx = (row % 2 == 0) ? k : row_len - 1 - k;  // serpentine
        geom::Pose p = orient;
        p.translation = Eigen::Vector3d(-e + 1.0 + params.lawnmower_x_step * kx,
                                        params.lawnmower_height,
                                        -e + 0.5 + params.lawnmower_row_step * row);
        traj.poses.push_back(p);
      }
      break;
    }
    case TrajectoryKind::kRandomWalk: {
      Eigen::Vector3d eye(rng.uniform(-2, 2), rng.uniform(1.5, 3.0), -0.7 * e);
      traj.poses.push_back(look_at(eye, center));
      for (int i = 1; i < length; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < params.resample_attempts; ++attempt) {
          Eigen::Vector3d step(rng.normal(), 0.3 * rng.normal(), rng.normal());
          step *= 0.3 * params.step_bound;
          Eigen::Vector3d cand = eye + step;
          cand.y() = std::clamp(cand.y(), 1.0, 4.5);
          cand.x() = std::clamp(cand.x(), -e, e);
          cand.z() = std::clamp(cand.z(), -e - 2.0, e);
          const Eigen::Vector3d jitter(0.4 * rng.normal(), 0.2 * rng.normal(),
                                       0.4 * rng.normal());
          geom::Pose pose = look_at(cand, center + jitter);
          if (consecutive_overlap(scene, camera, traj.poses.back(), pose) >=
              params.min_consecutive_overlap) {
            traj.poses.push_back(pose);
            eye = cand;
            placed = true;
            break;
          }
        }
        if (!placed)
          throw std::runtime_error(
              "generate_trajectory: could not satisfy the consecutive-overlap invariant after " +
              std::to_string(params.resample_attempts) + " attempts at step " + std::to_string(i));
      }
      break;
    }
  }
  return traj;
}

double min_consecutive_overlap(const Trajectory& traj, const SceneDescription& scene) {
  double worst = 1.0;
  for (int i = 0; i + 1 < traj.length(); ++i)
    worst = std::min(worst, consecutive_overlap(scene, traj.camera, traj.poses[i],
                                                traj.poses[i + 1]));
  return worst;
}

}  // namespace scenegen::synth
