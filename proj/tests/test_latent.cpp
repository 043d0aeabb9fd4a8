// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scenegen/latent/autoencoder.hpp"
#include "scenegen/latent/compress.hpp"
#include "scenegen/latent/replace.hpp"
#include "testutil.hpp"

using namespace scenegen;
using namespace scenegen::latent;
using sgtest::rand_tensor;

TEST_CASE("autoencoder: latent shape and resolution checks") {
  AutoencoderConfig cfg;
  cfg.image_size = 64;
  cfg.base_channels = 4;
  Autoencoder ae(cfg, 1);
  RandomStream rng(2);
  Tensor frames = sgtest::rand_uniform_tensor({2, 64, 64, 3}, rng, 0, 1);
  Tensor z = ae.encode(frames);
  CHECK(z.shape() == Shape{2, 8, 8, 16});
  Tensor back = ae.decode(z);
  CHECK(back.shape() == Shape{2, 64, 64, 3});

  Tensor bad = Tensor::zeros({1, 60, 64, 3});
  CHECK_THROWS_AS(ae.encode(bad), std::invalid_argument);
  AutoencoderConfig bad_cfg;
  bad_cfg.image_size = 60;
  CHECK_THROWS_AS(Autoencoder(bad_cfg, 1), std::invalid_argument);
}

TEST_CASE("autoencoder: encode is frame-wise (permutation equivariant)") {
  AutoencoderConfig cfg;
  cfg.image_size = 16;
  cfg.base_channels = 3;
  Autoencoder ae(cfg, 5);
  RandomStream rng(7);
  Tensor frames = sgtest::rand_uniform_tensor({3, 16, 16, 3}, rng, 0, 1);
  Tensor z = ae.encode(frames);
  // permute frames 0<->2
  Tensor permuted = Tensor::zeros({3, 16, 16, 3});
  const std::int64_t fs = 16 * 16 * 3;
  const int order[3] = {2, 1, 0};
  for (int f = 0; f < 3; ++f)
    for (std::int64_t i = 0; i < fs; ++i)
      permuted.data()[f * fs + i] = frames.at(order[f] * fs + i);
  Tensor zp = ae.encode(permuted);
  const std::int64_t zs = 2 * 2 * 16;
  for (int f = 0; f < 3; ++f)
    for (std::int64_t i = 0; i < zs; ++i)
      CHECK(zp.at(f * zs + i) == z.at(order[f] * zs + i));
}

TEST_CASE("autoencoder: gradcheck at tiny width") {
  AutoencoderConfig cfg;
  cfg.image_size = 8;
  cfg.base_channels = 2;
  cfg.latent_channels = 3;
  Autoencoder ae(cfg, 11);
  RandomStream rng(13);
  Tensor frames = sgtest::rand_uniform_tensor({1, 8, 8, 3}, rng, 0, 1);
  auto f = [&]() { return mse(ae.decode(ae.encode(frames)), frames); };
  CHECK(sgtest::gradcheck(f, ae.params().tensors(), 1e-5, 6) < 1e-4);
}

TEST_CASE("autoencoder: latent normalization round trip") {
  AutoencoderConfig cfg;
  cfg.image_size = 16;
  cfg.base_channels = 3;
  Autoencoder ae(cfg, 17);
  RandomStream rng(19);
  Tensor frames = sgtest::rand_uniform_tensor({6, 16, 16, 3}, rng, 0, 1);
  ae.calibrate_latent_stats(frames);
  Tensor zn = ae.encode_normalized(frames);
  // normalized latents have near zero mean / unit variance per channel
  const int c = cfg.latent_channels;
  for (int ch = 0; ch < c; ++ch) {
    double s = 0, s2 = 0;
    const std::int64_t cells = zn.size() / c;
    for (std::int64_t i = 0; i < cells; ++i) {
      s += zn.at(i * c + ch);
      s2 += zn.at(i * c + ch) * zn.at(i * c + ch);
    }
    CHECK(std::abs(s / cells) < 1e-9);
    CHECK(s2 / cells == doctest::Approx(1.0).epsilon(1e-6));
  }
  // decode_normalized inverts encode_normalized up to the raw codec error
  Tensor direct = ae.decode(ae.encode(frames));
  Tensor via_norm = ae.decode_normalized(zn);
  CHECK((direct.array() - via_norm.array()).abs().maxCoeff() < 1e-9);
}

TEST_CASE("compression law n = 1+(N-1)/4") {
  CHECK(latent_frame_count(1) == 1);
  CHECK(latent_frame_count(13) == 4);
  CHECK(latent_frame_count(25) == 7);
  CHECK(latent_frame_count(33) == 9);
  CHECK(latent_frame_count(49) == 13);
  CHECK_THROWS_AS(latent_frame_count(12), std::invalid_argument);
  CHECK_THROWS_AS(latent_frame_count(0), std::invalid_argument);

  const auto map = latent_frame_map(13);
  REQUIRE(map.size() == 4);
  CHECK(map[0] == std::vector<int>{0});
  CHECK(map[1] == std::vector<int>{1, 2, 3, 4});
  CHECK(map[2] == std::vector<int>{5, 6, 7, 8});
  CHECK(map[3] == std::vector<int>{9, 10, 11, 12});
}

TEST_CASE("causal compressor: shapes, determinism, N=1") {
  CompressorConfig cfg{4, 8};
  CausalCompressor ccn(cfg, 3);
  RandomStream rng(23);
  Tensor frames = rand_tensor({13, 4, 4, 4}, rng);
  LatentClip clip = ccn.compress(frames);
  CHECK(clip.data.shape() == Shape{4, 4, 4, 4});
  CHECK(clip.frame_map.size() == 4);
  LatentClip again = ccn.compress(frames);
  CHECK((clip.data.array() - again.data.array()).abs().maxCoeff() == 0.0);

  Tensor one = rand_tensor({1, 4, 4, 4}, rng);
  LatentClip single = ccn.compress(one);
  CHECK(single.data.shape() == Shape{1, 4, 4, 4});

  Tensor bad = rand_tensor({12, 4, 4, 4}, rng);
  CHECK_THROWS_AS(ccn.compress(bad), std::invalid_argument);
}

TEST_CASE("causal compressor: causality under perturbation") {
  CompressorConfig cfg{4, 8};
  CausalCompressor ccn(cfg, 5);
  RandomStream rng(29);
  Tensor frames = rand_tensor({13, 4, 4, 4}, rng);
  LatentClip base = ccn.compress(frames);
  const std::int64_t fs = 4 * 4 * 4;

  SUBCASE("perturbing frame 9 leaves latents 0..2 untouched") {
    Tensor frames2 = frames.detach();
    frames2.data()[9 * fs + 5] += 0.37;
    LatentClip pert = ccn.compress(frames2);
    for (int j = 0; j < 3; ++j)
      for (std::int64_t i = 0; i < fs; ++i)
        CHECK(pert.data.at(j * fs + i) == base.data.at(j * fs + i));
    double delta = 0;
    for (std::int64_t i = 0; i < fs; ++i)
      delta = std::max(delta, std::abs(pert.data.at(3 * fs + i) - base.data.at(3 * fs + i)));
    CHECK(delta > 0.0);
  }

  SUBCASE("100 random perturbation trials never touch earlier latents") {
    RandomStream trial_rng(31);
    for (int t = 0; t < 100; ++t) {
      const int f = trial_rng.uniform_int(0, 12);
      const int group = f == 0 ? 0 : (f + 3) / 4;
      Tensor frames2 = frames.detach();
      frames2.data()[f * fs + trial_rng.uniform_int(0, static_cast<int>(fs - 1))] +=
          trial_rng.uniform(0.1, 2.0);
      LatentClip pert = ccn.compress(frames2);
      for (int j = 0; j < group; ++j)
        for (std::int64_t i = 0; i < fs; ++i)
          CHECK(pert.data.at(j * fs + i) == base.data.at(j * fs + i));
    }
  }
}

TEST_CASE("causal compressor: gradcheck") {
  CompressorConfig cfg{2, 4};
  CausalCompressor ccn(cfg, 7);
  RandomStream rng(37);
  Tensor frames = rand_tensor({5, 2, 2, 2}, rng);
  frames.set_requires_grad(true);
  auto params = ccn.params().tensors();
  params.push_back(frames);
  auto f = [&]() {
    LatentClip clip = ccn.compress(frames);
    return mean(mul(clip.data, clip.data));
  };
  CHECK(sgtest::gradcheck(f, params, 1e-5, 10) < 1e-4);
}

TEST_CASE("temporal replace: k=0 semantics") {
  RandomStream rng(41);
  LatentClip z;
  z.data = rand_tensor({4, 2, 2, 3}, rng);
  z.frame_map = latent_frame_map(13);
  Tensor enc = rand_tensor({1, 2, 2, 3}, rng);
  SpatiotemporalCondition cond = temporal_replace(z, enc, 0);
  const std::int64_t fs = 2 * 2 * 3;
  for (std::int64_t i = 0; i < fs; ++i) CHECK(cond.z_st.data.at(i) == enc.at(i));
  for (std::int64_t i = fs; i < z.data.size(); ++i) CHECK(cond.z_st.data.at(i) == z.data.at(i));
  CHECK(cond.replaced_indices == std::vector<int>{0});

  // idempotent: replacing with the clip's own frame 0 reproduces the clip
  Tensor own = Tensor::zeros({1, 2, 2, 3});
  for (std::int64_t i = 0; i < fs; ++i) own.data()[i] = z.data.at(i);
  SpatiotemporalCondition same = temporal_replace(z, own, 0);
  CHECK((same.z_st.data.array() - z.data.array()).abs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(temporal_replace(z, enc, 9), std::invalid_argument);
}

TEST_CASE("augmentation: aligned duplication, frame-map oracle") {
  std::vector<geom::Pose> poses(13);
  for (int i = 0; i < 13; ++i) poses[i].translation = Eigen::Vector3d(i, 0, 0);

  SUBCASE("k=0 leaves the window alone") {
    TemporalAugmentation aug = augment_window_for_temporal(poses, 0);
    CHECK(aug.poses.size() == 13);
    CHECK(aug.replaced_latent == 0);
    CHECK(aug.duplicates_inserted == 0);
  }

  SUBCASE("k=4 with N=13 extends to 17 frames; latent 2 holds the duplicates") {
    TemporalAugmentation aug = augment_window_for_temporal(poses, 4);
    CHECK(aug.poses.size() == 17);
    CHECK(aug.duplicates_inserted == 4);
    CHECK(aug.replaced_latent == 2);
    const auto map = latent_frame_map(static_cast<int>(aug.poses.size()));
    // the replaced latent summarizes exactly the duplicated pose
    for (int f : map[aug.replaced_latent]) {
      CHECK(aug.source_index[f] == 4);
      CHECK(aug.poses[f].translation.x() == 4.0);
    }
    // earlier frames are the original prefix
    for (int f = 0; f <= 4; ++f) CHECK(aug.source_index[f] == f);
  }

  SUBCASE("non-alignable k is rejected") {
    CHECK_THROWS_AS(augment_window_for_temporal(poses, 2), std::invalid_argument);
    CHECK_THROWS_AS(augment_window_for_temporal(poses, 13), std::invalid_argument);
    CHECK_THROWS_AS(augment_window_for_temporal(poses, -1), std::invalid_argument);
  }

  SUBCASE("pinning the last frame of an N=2 (mod 4) base list uses 3 duplicates") {
    std::vector<geom::Pose> base(10);
    for (int i = 0; i < 10; ++i) base[i].translation = Eigen::Vector3d(i, 0, 0);
    TemporalAugmentation aug = augment_window_for_temporal(base, 9);
    CHECK(aug.poses.size() == 13);
    CHECK(aug.duplicates_inserted == 3);
    CHECK(aug.replaced_latent == 3);
    const auto map = latent_frame_map(13);
    for (int f : map[3]) CHECK(aug.source_index[f] == 9);
  }
}

TEST_CASE("replacement locality with two replacements") {
  RandomStream rng(43);
  LatentClip z;
  z.data = rand_tensor({5, 2, 2, 3}, rng);
  z.frame_map = latent_frame_map(17);
  Tensor enc0 = rand_tensor({1, 2, 2, 3}, rng);
  Tensor enc4 = rand_tensor({1, 2, 2, 3}, rng);
  SpatiotemporalCondition cond = temporal_replace(z, enc0, 0);
  replace_in_place(cond, enc4, 4);
  CHECK(cond.replaced_indices == std::vector<int>{0, 4});
  const std::int64_t fs = 2 * 2 * 3;
  for (int j = 0; j < 5; ++j) {
    for (std::int64_t i = 0; i < fs; ++i) {
      const double got = cond.z_st.data.at(j * fs + i);
      if (j == 0)
        CHECK(got == enc0.at(i));
      else if (j == 4)
        CHECK(got == enc4.at(i));
      else
        CHECK(got == z.data.at(j * fs + i));
    }
  }
}
