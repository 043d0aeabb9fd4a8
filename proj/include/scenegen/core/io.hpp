// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scenegen/core/tensor.hpp"

namespace scenegen::io {

// ---- PNG (8-bit RGB, non-interlaced) ----
// img is (H,W,3) in [0,1]; values are clamped and quantized on write.
void write_png(const std::filesystem::path& path, const Tensor& img);
Tensor read_png(const std::filesystem::path& path);

// ---- flat binary arrays with a structured-text header ----
// Header: "sgarr 1\ndtype: f64\nshape: d0 d1 ...\nend\n" followed by raw
// little-endian float64 data in row-major order.
void write_array(const std::filesystem::path& path, const Tensor& t);
Tensor read_array(const std::filesystem::path& path);

// ---- ordered key = value text files ----
class KvFile {
 public:
  void set(const std::string& key, const std::string& value);
  void set_int(const std::string& key, std::int64_t v);
  void set_double(const std::string& key, double v);
  void set_bool(const std::string& key, bool v);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws if missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

  std::string serialize() const;
  static KvFile parse(const std::string& text);
  static KvFile load(const std::filesystem::path& path);
  // Atomic: writes a temp file then renames over the target.
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

std::string format_double(double v);  // round-trippable decimal form

// Atomic whole-file write (temp + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace scenegen::io
