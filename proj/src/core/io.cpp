// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/core/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scenegen::io {

namespace {

void put_u32be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

std::uint32_t get_u32be(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

void append_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32be(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                         static_cast<uInt>(body.size()));
  put_u32be(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Tensor& img) {
  if (img.ndim() != 3 || img.dim(2) != 3)
    throw std::invalid_argument("write_png: expected (H,W,3), got " + shape_str(img.shape()));
  const int H = img.dim(0), W = img.dim(1);
  std::string raw;
  raw.reserve(static_cast<size_t>(H) * (1 + 3 * W));
  for (int y = 0; y < H; ++y) {
    raw.push_back('\0');  // filter type 0 (None)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < 3; ++c) {
        double v = img.at((static_cast<std::int64_t>(y) * W + x) * 3 + c);
        v = std::clamp(v, 0.0, 1.0);
        raw.push_back(static_cast<char>(std::lround(v * 255.0)));
      }
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_BEST_SPEED) != Z_OK)
    throw std::runtime_error("write_png: zlib compression failed");
  compressed.resize(bound);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32be(ihdr, static_cast<std::uint32_t>(W));
  put_u32be(ihdr, static_cast<std::uint32_t>(H));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", "");
  write_file_atomic(path, out);
}

Tensor read_png(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() < 8 || std::memcmp(data.data(), "\x89PNG\r\n\x1a\n", 8) != 0)
    throw std::runtime_error("read_png: not a PNG file: " + path.string());
  size_t pos = 8;
  int W = 0, H = 0;
  std::string idat;
  while (pos + 8 <= data.size()) {
    const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
    const std::uint32_t len = get_u32be(p);
    const std::string type = data.substr(pos + 4, 4);
    if (pos + 12 + len > data.size()) throw std::runtime_error("read_png: truncated chunk");
    const char* body = data.data() + pos + 8;
    if (type == "IHDR") {
      W = static_cast<int>(get_u32be(reinterpret_cast<const unsigned char*>(body)));
      H = static_cast<int>(get_u32be(reinterpret_cast<const unsigned char*>(body + 4)));
      const int depth = body[8], color = body[9], interlace = body[12];
      if (depth != 8 || color != 2 || interlace != 0)
        throw std::runtime_error("read_png: unsupported format (need 8-bit RGB non-interlaced)");
    } else if (type == "IDAT") {
      idat.append(body, len);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }
  if (W <= 0 || H <= 0) throw std::runtime_error("read_png: missing IHDR");
  const size_t stride = 1 + static_cast<size_t>(W) * 3;
  std::vector<unsigned char> raw(static_cast<size_t>(H) * stride);
  uLongf rawlen = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &rawlen, reinterpret_cast<const Bytef*>(idat.data()),
                 static_cast<uLong>(idat.size())) != Z_OK ||
      rawlen != raw.size())
    throw std::runtime_error("read_png: zlib decompression failed");

  // Undo per-row filters.
  const int bpp = 3;
  std::vector<unsigned char> img(static_cast<size_t>(H) * W * 3);
  for (int y = 0; y < H; ++y) {
    const unsigned char filter = raw[y * stride];
    const unsigned char* src = raw.data() + y * stride + 1;
    unsigned char* dst = img.data() + static_cast<size_t>(y) * W * 3;
    const unsigned char* prev = y > 0 ? img.data() + static_cast<size_t>(y - 1) * W * 3 : nullptr;
    for (int i = 0; i < W * 3; ++i) {
      const int a = i >= bpp ? dst[i - bpp] : 0;
      const int b = prev ? prev[i] : 0;
      const int c = (prev && i >= bpp) ? prev[i - bpp] : 0;
      int v = src[i];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw std::runtime_error("read_png: unknown filter type");
      }
      dst[i] = static_cast<unsigned char>(v & 0xff);
    }
  }
  Tensor out = Tensor::zeros({H, W, 3});
  for (std::int64_t i = 0; i < out.size(); ++i) out.data()[i] = img[i] / 255.0;
  return out;
}

void write_array(const std::filesystem::path& path, const Tensor& t) {
  std::ostringstream os;
  os << "sgarr 1\ndtype: f64\nshape:";
  for (int d : t.shape()) os << " " << d;
  os << "\nend\n";
  std::string out = os.str();
  const size_t n = static_cast<size_t>(t.size()) * sizeof(double);
  out.append(reinterpret_cast<const char*>(t.data()), n);
  write_file_atomic(path, out);
}

Tensor read_array(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::istringstream is(data);
  std::string line;
  if (!std::getline(is, line) || line != "sgarr 1")
    throw std::runtime_error("read_array: bad magic in " + path.string());
  if (!std::getline(is, line) || line != "dtype: f64")
    throw std::runtime_error("read_array: unsupported dtype in " + path.string());
  if (!std::getline(is, line) || line.rfind("shape:", 0) != 0)
    throw std::runtime_error("read_array: missing shape in " + path.string());
  Shape shape;
  {
    std::istringstream ss(line.substr(6));
    int d;
    while (ss >> d) shape.push_back(d);
  }
  if (!std::getline(is, line) || line != "end")
    throw std::runtime_error("read_array: missing header terminator in " + path.string());
  const size_t offset = static_cast<size_t>(is.tellg());
  const std::int64_t count = shape_size(shape);
  if (data.size() != offset + static_cast<size_t>(count) * sizeof(double))
    throw std::runtime_error("read_array: payload size mismatch in " + path.string());
  Tensor t = Tensor::zeros(shape);
  std::memcpy(t.data(), data.data() + offset, static_cast<size_t>(count) * sizeof(double));
  return t;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void KvFile::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : items_)
    if (k == key) {
      v = value;
      return;
    }
  items_.emplace_back(key, value);
}

void KvFile::set_int(const std::string& key, std::int64_t v) { set(key, std::to_string(v)); }
void KvFile::set_double(const std::string& key, double v) { set(key, format_double(v)); }
void KvFile::set_bool(const std::string& key, bool v) { set(key, v ? "true" : "false"); }

bool KvFile::has(const std::string& key) const {
  for (const auto& [k, _] : items_)
    if (k == key) return true;
  return false;
}

std::string KvFile::get(const std::string& key) const {
  for (const auto& [k, v] : items_)
    if (k == key) return v;
  throw std::out_of_range("KvFile: missing key '" + key + "'");
}

std::string KvFile::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

std::int64_t KvFile::get_int(const std::string& key) const {
  const std::string v = get(key);
  size_t used = 0;
  const std::int64_t r = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("KvFile: key '" + key + "' is not an integer");
  return r;
}

double KvFile::get_double(const std::string& key) const {
  const std::string v = get(key);
  size_t used = 0;
  const double r = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("KvFile: key '" + key + "' is not a number");
  return r;
}

bool KvFile::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("KvFile: key '" + key + "' is not a boolean");
}

std::string KvFile::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : items_) os << k << " = " << v << "\n";
  return os.str();
}

KvFile KvFile::parse(const std::string& text) {
  KvFile f;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("KvFile: malformed line " + std::to_string(lineno) + ": " + line);
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    f.items_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return f;
}

KvFile KvFile::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void KvFile::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_file: cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace scenegen::io
