// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scenegen/core/ops.hpp"
#include "scenegen/geometry/overlap.hpp"
#include "scenegen/geometry/plucker.hpp"
#include "scenegen/geometry/splat.hpp"
#include "testutil.hpp"

using namespace scenegen;
using namespace scenegen::geom;
using sgtest::rand_tensor;

namespace {

Eigen::Matrix3d random_rotation(RandomStream& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

Pose random_pose(RandomStream& rng, double tscale = 3.0) {
  Pose p;
  p.rotation = random_rotation(rng);
  p.translation = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()) * tscale;
  return p;
}

// Brute-force splat: explicit per-pixel argmin over all points with the
// documented tie rule. Completely independent of the z-buffer sweep.
std::vector<std::int64_t> brute_force_winners(const FeaturePointCloud& cloud,
                                              const std::vector<ViewTarget>& targets) {
  const int K = cloud.count();
  const int h = targets[0].camera.height, w = targets[0].camera.width;
  std::vector<std::int64_t> win(targets.size() * h * w, -1);
  for (size_t f = 0; f < targets.size(); ++f) {
    const auto& cam = targets[f].camera;
    const auto& pose = targets[f].pose;
    for (int py = 0; py < h; ++py)
      for (int px = 0; px < w; ++px) {
        std::int64_t best = -1;
        double bz = 0;
        int bvid = 0;
        for (int k = 0; k < K; ++k) {
          const Eigen::Vector3d p(cloud.points.at(3 * k), cloud.points.at(3 * k + 1),
                                  cloud.points.at(3 * k + 2));
          const Eigen::Vector3d pc = pose.to_camera(p);
          if (pc.z() <= 0) continue;
          const double u = cam.fx * pc.x() / pc.z() + cam.cx;
          const double v = cam.fy * pc.y() / pc.z() + cam.cy;
          if (u < 0 || v < 0 || std::floor(u) != px || std::floor(v) != py) continue;
          const int vid = cloud.source_view_ids[k];
          const bool better =
              best < 0 || pc.z() < bz ||
              (pc.z() == bz && (vid < bvid || (vid == bvid && k < best)));
          if (better) {
            best = k;
            bz = pc.z();
            bvid = vid;
          }
        }
        win[(f * h + py) * w + px] = best;
      }
  }
  return win;
}

}  // namespace

TEST_CASE("plucker: identity pose at principal point") {
  CameraModel cam{8, 8, 4.5, 4.5, 9, 9};
  PluckerMap map = compute_plucker_map(cam, Pose::identity());
  // pixel (4,4) has center (4.5,4.5) == principal point
  Eigen::Vector3d d = map.direction(4, 4), m = map.moment(4, 4);
  CHECK(d.isApprox(Eigen::Vector3d(0, 0, 1), 1e-12));
  CHECK(m.norm() == doctest::Approx(0.0));
}

TEST_CASE("plucker: unit-x translation gives moment (0,-1,0) on the axis ray") {
  CameraModel cam{8, 8, 4.5, 4.5, 9, 9};
  Pose pose;
  pose.translation = Eigen::Vector3d(1, 0, 0);
  PluckerMap map = compute_plucker_map(cam, pose);
  Eigen::Vector3d d = map.direction(4, 4), m = map.moment(4, 4);
  CHECK(d.isApprox(Eigen::Vector3d(0, 0, 1), 1e-12));
  CHECK(m.isApprox(Eigen::Vector3d(0, -1, 0), 1e-12));
}

TEST_CASE("plucker invariants over 1000 random camera/pose samples") {
  RandomStream rng(101);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    CameraModel cam{rng.uniform(4, 30), rng.uniform(4, 30), rng.uniform(1, 5), rng.uniform(1, 4),
                    6, 5};
    PluckerMap map = compute_plucker_map(cam, random_pose(rng));
    worst = std::max(worst, plucker_max_violation(map));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("unproject_with_distance: sigmoid depth parameterization") {
  CameraModel cam{8, 8, 4.5, 4.5, 9, 9};
  RayGrid rays = compute_rays(cam, Pose::identity());
  DepthRange range{1.0, 9.0};

  SUBCASE("raw=0 is mid-range") {
    Tensor raw = Tensor::zeros({9, 9, 1});
    Tensor pts = unproject_with_distance(raw, rays, range);
    // central ray: depth (near+far)/2 = 5 along +z
    CHECK(pts.at(((4 * 9) + 4) * 3 + 2) == doctest::Approx(5.0));
  }
  SUBCASE("raw=ln(3) gives depth 7 for near=1, far=9") {
    Tensor raw = Tensor::constant({9, 9, 1}, std::log(3.0));
    Tensor pts = unproject_with_distance(raw, rays, range);
    CHECK(pts.at(((4 * 9) + 4) * 3 + 2) == doctest::Approx(7.0));
  }
  SUBCASE("extreme raws stay strictly inside (near, far)") {
    for (double raw_v : {-1e3, -40.0, -1.0, 1.0, 40.0, 1e3}) {
      Tensor raw = Tensor::constant({9, 9, 1}, raw_v);
      Tensor pts = unproject_with_distance(raw, rays, range);
      const double z = pts.at(((4 * 9) + 4) * 3 + 2);
      CHECK(z > range.near);
      CHECK(z < range.far);
    }
  }
  SUBCASE("near >= far is rejected") {
    Tensor raw = Tensor::zeros({9, 9, 1});
    CHECK_THROWS_AS(unproject_with_distance(raw, rays, DepthRange{5.0, 5.0}),
                    std::invalid_argument);
  }
  SUBCASE("gradcheck through sigmoid unprojection") {
    RandomStream rng(5);
    Tensor raw = rand_tensor({9, 9, 1}, rng);
    raw.set_requires_grad(true);
    auto f = [&]() {
      Tensor pts = unproject_with_distance(raw, rays, range);
      return mean(mul(pts, pts));
    };
    CHECK(sgtest::gradcheck(f, {raw}) < 1e-7);
  }
}

TEST_CASE("splat: single point lands at the pinhole pixel") {
  FeaturePointCloud cloud;
  cloud.points = Tensor::from_vector({1, 3}, {0, 0, 1});
  cloud.features = Tensor::from_vector({1, 2}, {0.25, -1.5});
  cloud.source_view_ids = {0};
  std::vector<ViewTarget> targets{{CameraModel{8, 8, 4, 4, 8, 8}, Pose::identity()}};
  RenderedCondition rc = splat_render(cloud, targets);
  REQUIRE(rc.features.shape() == Shape{1, 8, 8, 2});
  CHECK(rc.visible(0, 4, 4));
  CHECK(rc.winner(0, 4, 4) == 0);
  CHECK(rc.features.at(((4 * 8) + 4) * 2 + 0) == doctest::Approx(0.25));
  CHECK(rc.features.at(((4 * 8) + 4) * 2 + 1) == doctest::Approx(-1.5));
  CHECK(rc.depths.at((4 * 8) + 4) == doctest::Approx(1.0));
  int visible_count = 0;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) visible_count += rc.visible(0, y, x) ? 1 : 0;
  CHECK(visible_count == 1);
}

TEST_CASE("splat: invisible pixels carry exactly-zero features") {
  FeaturePointCloud cloud;
  cloud.points = Tensor::from_vector({1, 3}, {0, 0, 1});
  cloud.features = Tensor::from_vector({1, 2}, {0.7, 0.9});
  cloud.source_view_ids = {0};
  std::vector<ViewTarget> targets{{CameraModel{8, 8, 4, 4, 8, 8}, Pose::identity()}};
  RenderedCondition rc = splat_render(cloud, targets);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      if (rc.visible(0, y, x)) continue;
      CHECK(rc.features.at(((y * 8) + x) * 2 + 0) == 0.0);
      CHECK(rc.features.at(((y * 8) + x) * 2 + 1) == 0.0);
    }
}

TEST_CASE("splat: nearest point wins the z-buffer; ties break by view then index") {
  FeaturePointCloud cloud;
  cloud.points = Tensor::from_vector({2, 3}, {0, 0, 5, 0, 0, 2});
  cloud.features = Tensor::from_vector({2, 1}, {1.0, 2.0});
  cloud.source_view_ids = {0, 0};
  std::vector<ViewTarget> targets{{CameraModel{8, 8, 4, 4, 8, 8}, Pose::identity()}};
  RenderedCondition rc = splat_render(cloud, targets);
  CHECK(rc.winner(0, 4, 4) == 1);  // depth 2 beats depth 5
  CHECK(rc.features.at((4 * 8 + 4) * 1) == doctest::Approx(2.0));

  // exact tie: lower source view id wins, then lower index
  FeaturePointCloud tie;
  tie.points = Tensor::from_vector({3, 3}, {0, 0, 2, 0, 0, 2, 0, 0, 2});
  tie.features = Tensor::from_vector({3, 1}, {1.0, 2.0, 3.0});
  tie.source_view_ids = {1, 0, 0};
  RenderedCondition rc2 = splat_render(tie, targets);
  CHECK(rc2.winner(0, 4, 4) == 1);  // view 0 beats view 1; index 1 beats 2
}

TEST_CASE("splat round-trip: a view's own unprojected depth reproduces itself") {
  CameraModel cam{20, 20, 8, 8, 16, 16};
  RandomStream rng(11);
  Pose pose = random_pose(rng, 1.0);
  // sloped analytic depth map
  Tensor depth = Tensor::zeros({16, 16, 1});
  for (int v = 0; v < 16; ++v)
    for (int u = 0; u < 16; ++u)
      depth.data()[v * 16 + u] = 4.0 + 0.03 * u + 0.05 * v;
  Tensor pts = unproject_depth_map(depth, cam, pose);
  FeaturePointCloud cloud;
  cloud.points = reshape(pts, {16 * 16, 3});
  cloud.features = Tensor::constant({16 * 16, 4}, 1.0);
  cloud.source_view_ids.assign(16 * 16, 0);
  RenderedCondition rc = splat_render(cloud, {{cam, pose}});
  double max_err = 0;
  for (int v = 0; v < 16; ++v)
    for (int u = 0; u < 16; ++u) {
      CHECK(rc.visible(0, v, u));
      max_err = std::max(max_err, std::abs(rc.depths.at(v * 16 + u) - depth.at(v * 16 + u)));
    }
  CHECK(max_err < 1e-5);
}

TEST_CASE("splat matches brute-force argmin winners on random clouds") {
  RandomStream rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const int K = rng.uniform_int(50, 500);
    FeaturePointCloud cloud;
    cloud.points = Tensor::zeros({K, 3});
    for (int k = 0; k < K; ++k) {
      cloud.points.data()[3 * k] = rng.uniform(-4, 4);
      cloud.points.data()[3 * k + 1] = rng.uniform(-4, 4);
      cloud.points.data()[3 * k + 2] = rng.uniform(-2, 10);
    }
    cloud.features = rand_tensor({K, 2}, rng);
    cloud.source_view_ids.resize(K);
    for (int k = 0; k < K; ++k) cloud.source_view_ids[k] = rng.uniform_int(0, 1);
    std::vector<ViewTarget> targets;
    targets.push_back({CameraModel{6, 6, 4, 4, 8, 8}, Pose::identity()});
    targets.push_back({CameraModel{6, 6, 4, 4, 8, 8}, random_pose(rng, 1.5)});
    RenderedCondition rc = splat_render(cloud, targets);
    const auto oracle = brute_force_winners(cloud, targets);
    REQUIRE(rc.winners.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) CHECK(rc.winners[i] == oracle[i]);
  }
}

TEST_CASE("splat gradients reach features and winner depths") {
  RandomStream rng(41);
  const int K = 12;
  FeaturePointCloud cloud;
  Tensor pts = Tensor::zeros({K, 3});
  for (int k = 0; k < K; ++k) {
    pts.data()[3 * k] = rng.uniform(-1.5, 1.5);
    pts.data()[3 * k + 1] = rng.uniform(-1.5, 1.5);
    pts.data()[3 * k + 2] = rng.uniform(2.0, 6.0);
  }
  Tensor feat = rand_tensor({K, 3}, rng);
  pts.set_requires_grad(true);
  feat.set_requires_grad(true);
  std::vector<ViewTarget> targets{{CameraModel{4, 4, 2, 2, 4, 4}, Pose::identity()}};
  RandomStream rng2(43);
  Tensor tgt_feat = rand_tensor({1, 4, 4, 3}, rng2);
  Tensor tgt_depth = rand_tensor({1, 4, 4, 1}, rng2);
  auto f = [&]() {
    FeaturePointCloud c;
    c.points = pts;
    c.features = feat;
    c.source_view_ids.assign(K, 0);
    RenderedCondition rc = splat_render(c, targets);
    return add(sse(rc.features, tgt_feat), sse(rc.depths, tgt_depth));
  };
  CHECK(sgtest::gradcheck(f, {pts, feat}, 1e-6) < 1e-6);
}

TEST_CASE("overlap: identical poses score 1") {
  CameraModel cam{16, 16, 8, 8, 16, 16};
  Tensor depth = Tensor::constant({16, 16, 1}, 5.0);
  Pose pose = Pose::identity();
  CHECK(frustum_overlap_score(depth, pose, cam, {pose, pose, pose}) == doctest::Approx(1.0));
}

TEST_CASE("overlap: opposite-facing window scores 0") {
  CameraModel cam{16, 16, 8, 8, 16, 16};
  Tensor depth = Tensor::constant({16, 16, 1}, 5.0);
  Pose candidate = Pose::identity();
  Pose flipped;  // 180-degree yaw, same position
  flipped.rotation = Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitY()).toRotationMatrix();
  CHECK(frustum_overlap_score(depth, candidate, cam, {flipped}) == doctest::Approx(0.0));
}

TEST_CASE("overlap: half-shifted frustum scores about one half") {
  // 90-degree horizontal FOV: fx = W/2, plane at depth 5 spans x in [-5,5].
  const int W = 64, H = 64;
  CameraModel cam{W / 2.0, W / 2.0, W / 2.0, H / 2.0, W, H};
  Tensor depth = Tensor::constant({H, W, 1}, 5.0);
  Pose candidate = Pose::identity();
  Pose shifted;
  shifted.translation = Eigen::Vector3d(5.0, 0, 0);
  const double score = frustum_overlap_score(depth, candidate, cam, {shifted});
  CHECK(score == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(score - 0.5) < 0.05);
}

TEST_CASE("overlap is invariant under a global rigid transform") {
  RandomStream rng(59);
  CameraModel cam{12, 12, 6, 6, 12, 12};
  Tensor depth = Tensor::zeros({12, 12, 1});
  for (int i = 0; i < 144; ++i) depth.data()[i] = rng.uniform(2.0, 8.0);
  Pose candidate = random_pose(rng, 1.0);
  std::vector<Pose> window{random_pose(rng, 1.0), random_pose(rng, 1.0)};
  const double base = frustum_overlap_score(depth, candidate, cam, window);

  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix3d R = random_rotation(rng);
    Eigen::Vector3d t(rng.normal(), rng.normal(), rng.normal());
    auto apply = [&](const Pose& p) {
      Pose q;
      q.rotation = R * p.rotation;
      q.translation = R * p.translation + t;
      return q;
    };
    std::vector<Pose> w2;
    for (const auto& p : window) w2.push_back(apply(p));
    const double transformed = frustum_overlap_score(depth, apply(candidate), cam, w2);
    CHECK(transformed == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("bilinear resize: constants and shapes") {
  Tensor src = Tensor::constant({3, 5, 2}, 0.75);
  Tensor up = bilinear_resize(src, 9, 15);
  CHECK(up.shape() == Shape{9, 15, 2});
  CHECK((up.array() - 0.75).abs().maxCoeff() < 1e-12);
}
