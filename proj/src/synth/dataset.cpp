// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/synth/dataset.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "scenegen/core/io.hpp"
#include "scenegen/core/random.hpp"

namespace scenegen::synth {

namespace {

std::string pose_to_string(const geom::Pose& p) {
  std::ostringstream os;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) os << io::format_double(p.rotation(r, c)) << " ";
  for (int i = 0; i < 3; ++i)
    os << io::format_double(p.translation(i)) << (i < 2 ? " " : "");
  return os.str();
}

geom::Pose pose_from_string(const std::string& s) {
  std::istringstream is(s);
  geom::Pose p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (!(is >> p.rotation(r, c))) throw std::runtime_error("bad pose record: " + s);
  for (int i = 0; i < 3; ++i)
    if (!(is >> p.translation(i))) throw std::runtime_error("bad pose record: " + s);
  return p;
}

std::string camera_to_string(const geom::CameraModel& c) {
  std::ostringstream os;
  os << io::format_double(c.fx) << " " << io::format_double(c.fy) << " "
     << io::format_double(c.cx) << " " << io::format_double(c.cy) << " " << c.width << " "
     << c.height;
  return os.str();
}

geom::CameraModel camera_from_string(const std::string& s) {
  std::istringstream is(s);
  geom::CameraModel c;
  if (!(is >> c.fx >> c.fy >> c.cx >> c.cy >> c.width >> c.height))
    throw std::runtime_error("bad camera record: " + s);
  return c;
}

std::string clip_dir_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "clip_%04d", i);
  return buf;
}

std::string frame_file(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.%s", stem, i, ext);
  return buf;
}

}  // namespace

ClipDataset build_clip_dataset(const SceneDescription& scene, const Trajectory& traj,
                               int frames_per_clip, std::uint64_t seed,
                               const MonoDepthStubConfig& stub_config) {
  if (frames_per_clip < 1 || frames_per_clip % 4 != 1)
    throw std::invalid_argument("build_clip_dataset: frames_per_clip must satisfy n = 1 (mod 4), got " +
                                std::to_string(frames_per_clip));
  if (traj.length() < frames_per_clip)
    throw std::invalid_argument("build_clip_dataset: trajectory shorter than one clip");
  ClipDataset ds;
  ds.camera = traj.camera;
  ds.scene_seed = scene.seed;
  ds.scene_params = scene.params;
  ds.trajectory_kind = traj.kind;
  const int clip_count = traj.length() / frames_per_clip;
  for (int c = 0; c < clip_count; ++c) {
    ClipRecord rec;
    for (int f = 0; f < frames_per_clip; ++f) {
      const int idx = c * frames_per_clip + f;
      PosedFrame frame = render_view(scene, traj.poses[idx], traj.camera);
      rec.mono_depths.push_back(
          mono_depth_stub(frame, mix_seed(seed, static_cast<std::uint64_t>(idx)), stub_config));
      rec.frames.push_back(std::move(frame));
    }
    ds.clips.push_back(std::move(rec));
  }
  return ds;
}

void write_clip_dataset(const std::filesystem::path& dir, const ClipDataset& ds) {
  std::filesystem::create_directories(dir);
  io::KvFile manifest;
  manifest.set("format", "scenegen-clips-1");
  manifest.set_int("scene_seed", static_cast<std::int64_t>(ds.scene_seed));
  manifest.set("trajectory_kind", to_string(ds.trajectory_kind));
  manifest.set("camera", camera_to_string(ds.camera));
  manifest.set_int("clips", static_cast<std::int64_t>(ds.clips.size()));
  manifest.set_int("frames_per_clip",
                   ds.clips.empty() ? 0 : static_cast<std::int64_t>(ds.clips[0].frames.size()));
  manifest.set_int("scene_min_primitives", ds.scene_params.min_primitives);
  manifest.set_int("scene_max_primitives", ds.scene_params.max_primitives);
  manifest.set_double("scene_extent", ds.scene_params.extent);
  manifest.set_double("scene_max_height", ds.scene_params.max_height);
  manifest.set_double("scene_texture_amplitude", ds.scene_params.texture_amplitude);
  manifest.save(dir / "manifest.txt");

  for (size_t c = 0; c < ds.clips.size(); ++c) {
    const auto& rec = ds.clips[c];
    const auto cdir = dir / clip_dir_name(static_cast<int>(c));
    std::filesystem::create_directories(cdir);
    io::KvFile poses;
    poses.set("camera", camera_to_string(ds.camera));
    poses.set_int("frames", static_cast<std::int64_t>(rec.frames.size()));
    for (size_t f = 0; f < rec.frames.size(); ++f) {
      const auto& frame = rec.frames[f];
      io::write_png(cdir / frame_file("frame", static_cast<int>(f), "png"), frame.image);
      io::write_array(cdir / frame_file("depth", static_cast<int>(f), "arr"), frame.depth);
      io::write_array(cdir / frame_file("mono", static_cast<int>(f), "arr"), rec.mono_depths[f]);
      io::write_array(cdir / frame_file("sem", static_cast<int>(f), "arr"), frame.semantic);
      poses.set("pose_" + std::to_string(f), pose_to_string(frame.pose));
    }
    poses.save(cdir / "poses.txt");
  }
}

ClipDataset read_clip_dataset(const std::filesystem::path& dir) {
  const io::KvFile manifest = io::KvFile::load(dir / "manifest.txt");
  if (manifest.get("format") != "scenegen-clips-1")
    throw std::runtime_error("read_clip_dataset: unknown dataset format in " + dir.string());
  ClipDataset ds;
  ds.scene_seed = static_cast<std::uint64_t>(manifest.get_int("scene_seed"));
  ds.trajectory_kind = trajectory_kind_from_string(manifest.get("trajectory_kind"));
  ds.camera = camera_from_string(manifest.get("camera"));
  ds.scene_params.min_primitives = static_cast<int>(manifest.get_int("scene_min_primitives"));
  ds.scene_params.max_primitives = static_cast<int>(manifest.get_int("scene_max_primitives"));
  ds.scene_params.extent = manifest.get_double("scene_extent");
  ds.scene_params.max_height = manifest.get_double("scene_max_height");
  ds.scene_params.texture_amplitude = manifest.get_double("scene_texture_amplitude");
  const int clips = static_cast<int>(manifest.get_int("clips"));
  for (int c = 0; c < clips; ++c) {
    const auto cdir = dir / clip_dir_name(c);
    const io::KvFile poses = io::KvFile::load(cdir / "poses.txt");
    const int frames = static_cast<int>(poses.get_int("frames"));
    ClipRecord rec;
    for (int f = 0; f < frames; ++f) {
      PosedFrame frame;
      frame.camera = ds.camera;
      frame.pose = pose_from_string(poses.get("pose_" + std::to_string(f)));
      frame.image = io::read_png(cdir / frame_file("frame", f, "png"));
      frame.depth = io::read_array(cdir / frame_file("depth", f, "arr"));
      frame.semantic = io::read_array(cdir / frame_file("sem", f, "arr"));
      rec.mono_depths.push_back(io::read_array(cdir / frame_file("mono", f, "arr")));
      rec.frames.push_back(std::move(frame));
    }
    ds.clips.push_back(std::move(rec));
  }
  return ds;
}

std::vector<std::pair<Tensor, Tensor>> render_layout_maps(const SceneDescription& scene,
                                                          const Trajectory& traj) {
  std::vector<std::pair<Tensor, Tensor>> maps;
  maps.reserve(traj.length());
  for (const auto& pose : traj.poses) {
    PosedFrame f = render_view(scene, pose, traj.camera);
    maps.emplace_back(f.depth, f.semantic);
  }
  return maps;
}

}  // namespace scenegen::synth
