// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "scenegen/core/io.hpp"
#include "scenegen/geometry/overlap.hpp"
#include "scenegen/geometry/splat.hpp"
#include "scenegen/synth/dataset.hpp"
#include "testutil.hpp"

using namespace scenegen;
using namespace scenegen::synth;

namespace {

geom::CameraModel test_camera(int size = 32) {
  const double f = size * 0.9;
  return geom::CameraModel{f, f, size / 2.0, size / 2.0, size, size};
}

SceneDescription single_box_scene(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                                  SemanticClass cls = SemanticClass::kBuilding) {
  SceneDescription scene;
  scene.params.extent = 10.0;
  scene.params.texture_amplitude = 0.05;
  BoxPrimitive box;
  box.lo = lo;
  box.hi = hi;
  box.semantic = cls;
  box.tint = 0.5;
  box.checker_freq = 1.0;
  scene.primitives.push_back(box);
  return scene;
}

// Independent hit-distance oracle: dense march + bisection on the
// inside-the-union predicate, no shared code with the renderer.
double march_depth(const SceneDescription& scene, const Eigen::Vector3d& o,
                   const Eigen::Vector3d& d, double far) {
  auto inside = [&](double s) {
    const Eigen::Vector3d p = o + d * s;
    if (p.y() <= 0.0 && std::abs(p.x()) <= scene.params.extent &&
        std::abs(p.z()) <= scene.params.extent)
      return true;
    for (const auto& b : scene.primitives)
      if ((p.array() >= b.lo.array()).all() && (p.array() <= b.hi.array()).all()) return true;
    return false;
  };
  const double step = 5e-4;
  double prev = 1e-6;
  for (double s = step; s <= far; s += step) {
    if (inside(s)) {
      double lo = prev, hi = s;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = s;
  }
  return far;
}

}  // namespace

TEST_CASE("generate_scene: deterministic in (seed, params)") {
  SceneParams params;
  SceneDescription a = generate_scene(0, params);
  SceneDescription b = generate_scene(0, params);
  REQUIRE(a.primitives.size() == b.primitives.size());
  for (size_t i = 0; i < a.primitives.size(); ++i) {
    CHECK(a.primitives[i].lo == b.primitives[i].lo);
    CHECK(a.primitives[i].hi == b.primitives[i].hi);
    CHECK(a.primitives[i].semantic == b.primitives[i].semantic);
  }
}

TEST_CASE("generate_scene: forced count and seed sensitivity") {
  SceneParams params;
  params.min_primitives = params.max_primitives = 5;
  CHECK(generate_scene(3, params).primitives.size() == 5);

  SceneDescription s1 = generate_scene(1, params);
  SceneDescription s2 = generate_scene(2, params);
  bool differs = false;
  for (size_t i = 0; i < s1.primitives.size(); ++i)
    if (s1.primitives[i].lo != s2.primitives[i].lo) differs = true;
  CHECK(differs);

  params.min_primitives = 0;
  params.max_primitives = -1;
  CHECK_THROWS_AS(generate_scene(0, params), std::invalid_argument);
}

TEST_CASE("render_view: fronto-parallel face depth is exact") {
  // Box face at z=5, camera at origin looking straight down +z.
  SceneDescription scene = single_box_scene({-3, 0, 5}, {3, 4, 7});
  geom::CameraModel cam = test_camera(24);
  geom::Pose pose;  // identity; +z forward
  pose.translation = Eigen::Vector3d(0, 1.5, 0);
  PosedFrame frame = render_view(scene, pose, cam);
  // center pixel hits the face
  const int c = 12;
  CHECK(frame.depth.at(c * 24 + c) == 5.0);
  CHECK(frame.semantic.at(c * 24 + c) == double(int(SemanticClass::kBuilding)));
}

TEST_CASE("render_view: ground-only scene is one class below the horizon") {
  SceneDescription scene;
  scene.params.extent = 50.0;
  geom::CameraModel cam = test_camera(24);
  geom::Pose pose = look_at({0, 2.0, -5}, {0, 0, 5});
  PosedFrame frame = render_view(scene, pose, cam);
  bool saw_ground = false, saw_sky = false;
  for (int v = 0; v < 24; ++v)
    for (int u = 0; u < 24; ++u) {
      const int cls = static_cast<int>(frame.semantic.at(v * 24 + u));
      CHECK((cls == int(SemanticClass::kGround) || cls == int(SemanticClass::kSky)));
      if (cls == int(SemanticClass::kGround)) saw_ground = true;
      if (cls == int(SemanticClass::kSky)) saw_sky = true;
    }
  CHECK(saw_ground);
  CHECK(saw_sky);
  // scanning each column top to bottom: sky then ground, never interleaved
  for (int u = 0; u < 24; ++u) {
    bool seen_ground = false;
    for (int v = 0; v < 24; ++v) {
      const int cls = static_cast<int>(frame.semantic.at(v * 24 + u));
      if (cls == int(SemanticClass::kGround)) seen_ground = true;
      if (seen_ground) CHECK(cls == int(SemanticClass::kGround));
    }
  }
}

TEST_CASE("render_view: depth matches an independent ray-march oracle") {
  SceneDescription scene = generate_scene(7, SceneParams{});
  geom::CameraModel cam = test_camera(16);
  geom::Pose pose = look_at({6.5, 3.0, -6.5}, {0, 0.5, 0});
  PosedFrame frame = render_view(scene, pose, cam);
  RandomStream rng(5);
  for (int k = 0; k < 12; ++k) {
    const int u = rng.uniform_int(0, 15), v = rng.uniform_int(0, 15);
    const Eigen::Vector3d dir_cam((u + 0.5 - cam.cx) / cam.fx, (v + 0.5 - cam.cy) / cam.fy, 1.0);
    const Eigen::Vector3d d = pose.rotation * dir_cam;
    const double expected = march_depth(scene, pose.translation, d, 20.0);
    CHECK(frame.depth.at(v * 16 + u) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("render + unproject + splat back to the same view round-trips depth") {
  SceneDescription scene = generate_scene(11, SceneParams{});
  geom::CameraModel cam = test_camera(24);
  geom::Pose pose = look_at({5.5, 2.5, -6.0}, {0, 0.5, 0});
  PosedFrame frame = render_view(scene, pose, cam);
  Tensor pts = geom::unproject_depth_map(frame.depth, cam, pose);
  geom::FeaturePointCloud cloud;
  cloud.points = reshape(pts, {24 * 24, 3});
  cloud.features = Tensor::constant({24 * 24, 1}, 1.0);
  cloud.source_view_ids.assign(24 * 24, 0);
  geom::RenderedCondition rc = geom::splat_render(cloud, {{cam, pose}});
  double max_err = 0;
  for (int i = 0; i < 24 * 24; ++i) {
    CHECK(rc.visibility[i] == 1);
    max_err = std::max(max_err, std::abs(rc.depths.at(i) - frame.depth.at(i)));
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("rendered colors classify back to their semantic class") {
  SceneDescription scene = generate_scene(13, SceneParams{});
  geom::CameraModel cam = test_camera(32);
  geom::Pose pose = look_at({6.0, 3.5, -6.0}, {0, 0.5, 0});
  PosedFrame frame = render_view(scene, pose, cam);
  int agree = 0, total = 32 * 32;
  for (int i = 0; i < total; ++i) {
    const Eigen::Vector3d rgb(frame.image.at(3 * i), frame.image.at(3 * i + 1),
                              frame.image.at(3 * i + 2));
    if (static_cast<int>(classify_palette_color(rgb)) == static_cast<int>(frame.semantic.at(i)))
      ++agree;
  }
  CHECK(static_cast<double>(agree) / total > 0.99);
}

TEST_CASE("mono_depth_stub: determinism, pure scale config, correlation") {
  SceneDescription scene = generate_scene(17, SceneParams{});
  geom::CameraModel cam = test_camera(24);
  PosedFrame frame = render_view(scene, look_at({5, 3, -5}, {0, 0.5, 0}), cam);

  Tensor a = mono_depth_stub(frame, 99);
  Tensor b = mono_depth_stub(frame, 99);
  CHECK((a.array() - b.array()).abs().maxCoeff() == 0.0);

  // shift=0, noise=0: output is exactly s * depth for a single s
  MonoDepthStubConfig pure;
  pure.shift_min = pure.shift_max = 0.0;
  pure.noise_rel = 0.0;
  Tensor scaled = mono_depth_stub(frame, 5, pure);
  const double s0 = scaled.at(0) / frame.depth.at(0);
  CHECK(s0 >= 0.5);
  CHECK(s0 <= 2.0);
  for (std::int64_t i = 0; i < scaled.size(); ++i)
    CHECK(scaled.at(i) == doctest::Approx(s0 * frame.depth.at(i)).epsilon(1e-12));

  // default config keeps high correlation with the true depth
  Tensor noisy = mono_depth_stub(frame, 7);
  const auto& x = frame.depth.array();
  const auto& y = noisy.array();
  const double mx = x.mean(), my = y.mean();
  const double corr = ((x - mx) * (y - my)).sum() /
                      std::sqrt((x - mx).square().sum() * (y - my).square().sum());
  CHECK(corr > 0.99);

  PosedFrame no_depth;
  no_depth.image = frame.image;
  CHECK_THROWS_AS(mono_depth_stub(no_depth, 1), std::invalid_argument);
}

TEST_CASE("trajectories: orbit equidistance, length one, step bound") {
  SceneDescription scene = generate_scene(19, SceneParams{});
  geom::CameraModel cam = test_camera(32);
  TrajectoryParams params;

  Trajectory orbit = generate_trajectory(TrajectoryKind::kOrbit, 24, scene, cam, 3, params);
  const Eigen::Vector3d center(0, params.orbit_height, 0);
  for (const auto& p : orbit.poses)
    CHECK(std::abs((p.translation - center).norm() - params.orbit_radius) < 1e-6);

  Trajectory single = generate_trajectory(TrajectoryKind::kDolly, 1, scene, cam, 3, params);
  CHECK(single.length() == 1);

  for (auto kind : {TrajectoryKind::kOrbit, TrajectoryKind::kDolly, TrajectoryKind::kLawnmower,
                    TrajectoryKind::kRandomWalk}) {
    Trajectory t = generate_trajectory(kind, 10, scene, cam, 5, params);
    for (int i = 0; i + 1 < t.length(); ++i)
      CHECK((t.poses[i + 1].translation - t.poses[i].translation).norm() <=
            params.step_bound + 1e-9);
    CHECK(min_consecutive_overlap(t, scene) >= params.min_consecutive_overlap);
  }
}

TEST_CASE("lawnmower: long trajectory revisits earlier regions") {
  SceneDescription scene = generate_scene(23, SceneParams{});
  geom::CameraModel cam = test_camera(32);
  TrajectoryParams params;
  Trajectory t = generate_trajectory(TrajectoryKind::kLawnmower, 200, scene, cam, 5, params);
  REQUIRE(t.length() == 200);
  // serpentine rows: pose i in row 0 returns near x at j = 2*row_len-1-i
  bool found = false;
  for (int i = 0; i < 12 && !found; ++i) {
    const int j = 2 * params.lawnmower_row_length - 1 - i;
    if (j - i <= 60) continue;
    PosedFrame f = render_view(scene, t.poses[i], cam);
    const double score = geom::frustum_overlap_score(f.depth, t.poses[i], cam, {t.poses[j]});
    if (score > 0.5) found = true;
  }
  CHECK(found);
}

TEST_CASE("clip dataset: build, write, read back, completeness") {
  SceneDescription scene = generate_scene(29, SceneParams{});
  geom::CameraModel cam = test_camera(16);
  Trajectory t = generate_trajectory(TrajectoryKind::kOrbit, 10, scene, cam, 7);
  CHECK_THROWS_AS(build_clip_dataset(scene, t, 4, 1), std::invalid_argument);

  ClipDataset ds = build_clip_dataset(scene, t, 5, 1);
  REQUIRE(ds.clips.size() == 2);
  for (const auto& clip : ds.clips) {
    CHECK(clip.frames.size() % 4 == 1);
    REQUIRE(clip.frames.size() == clip.mono_depths.size());
    for (size_t f = 0; f < clip.frames.size(); ++f) {
      CHECK(clip.frames[f].image.defined());
      CHECK(clip.frames[f].depth.defined());
      CHECK(clip.frames[f].semantic.defined());
      CHECK(clip.mono_depths[f].defined());
    }
  }

  const auto dir = std::filesystem::temp_directory_path() / "scenegen_test_dataset";
  std::filesystem::remove_all(dir);
  write_clip_dataset(dir, ds);
  ClipDataset back = read_clip_dataset(dir);
  REQUIRE(back.clips.size() == ds.clips.size());
  CHECK(back.scene_seed == ds.scene_seed);
  CHECK(back.camera.fx == ds.camera.fx);
  for (size_t c = 0; c < ds.clips.size(); ++c)
    for (size_t f = 0; f < ds.clips[c].frames.size(); ++f) {
      const auto& orig = ds.clips[c].frames[f];
      const auto& rt = back.clips[c].frames[f];
      CHECK((rt.image.array() - orig.image.array()).abs().maxCoeff() <= 0.5 / 255 + 1e-12);
      CHECK((rt.depth.array() - orig.depth.array()).abs().maxCoeff() == 0.0);
      CHECK((rt.semantic.array() - orig.semantic.array()).abs().maxCoeff() == 0.0);
      CHECK(rt.pose.rotation.isApprox(orig.pose.rotation, 1e-15));
      CHECK((back.clips[c].mono_depths[f].array() - ds.clips[c].mono_depths[f].array())
                .abs()
                .maxCoeff() == 0.0);
    }
  std::filesystem::remove_all(dir);
}

TEST_CASE("render_layout_maps delegates to render_view") {
  SceneDescription scene = generate_scene(31, SceneParams{});
  geom::CameraModel cam = test_camera(16);
  Trajectory t = generate_trajectory(TrajectoryKind::kDolly, 3, scene, cam, 9);
  auto maps = render_layout_maps(scene, t);
  REQUIRE(maps.size() == 3);
  for (int i = 0; i < 3; ++i) {
    PosedFrame ref = render_view(scene, t.poses[i], cam);
    CHECK((maps[i].first.array() - ref.depth.array()).abs().maxCoeff() == 0.0);
    CHECK((maps[i].second.array() - ref.semantic.array()).abs().maxCoeff() == 0.0);
  }
}
