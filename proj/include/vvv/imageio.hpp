// Copyright 2026 The vvv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Image ingestion (PNG, binary PGM), PNG/PGM/CSV output and candidate
// manifests.
//
// Run directory layout:
//
//   <root>/iter_<k>/cand_<code>/veni.png
//                              /vidi.png
//                              /vidi_aux.csv   (and vidi_aux.png rendering)
//                              /vici.png
//                              /manifest.txt
//
// With several input images each file name gets an "img<i>_" prefix.

#ifndef VVV_IMAGEIO_HPP_
#define VVV_IMAGEIO_HPP_

#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <png.h>
#include <unistd.h>

#include "vvv/codec.hpp"
#include "vvv/image.hpp"
#include "vvv/natural.hpp"
#include "vvv/pipeline.hpp"

namespace vvv {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ImageNotFound : public IoError {
 public:
  using IoError::IoError;
};

class UnsupportedFormat : public IoError {
 public:
  using IoError::IoError;
};

class CorruptImage : public IoError {
 public:
  using IoError::IoError;
};

// ---------------------------------------------------------------------------
// Raw file helpers.

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// partial file.
inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Decoding.

/// Integer luma 0.299 R + 0.587 G + 0.114 B, rounded half up.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

inline bool has_png_signature(std::string_view bytes) {
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 8) return false;
  for (int i = 0; i < 8; ++i) {
    if (static_cast<unsigned char>(bytes[i]) != kSig[i]) return false;
  }
  return true;
}

inline ImageBuffer decode_png(std::string_view bytes, const std::string& origin) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw CorruptImage(origin + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw CorruptImage(origin + ": " + msg);
  }
  const std::size_t w = image.width, h = image.height;
  if (!color) return ImageBuffer(w, h, std::move(buffer));
  std::vector<std::uint8_t> gray(w * h);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luma(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
  }
  return ImageBuffer(w, h, std::move(gray));
}

/// Binary PGM (P5), maxval up to 255. Samples are rescaled to [0, 255]
/// when maxval < 255.
inline ImageBuffer decode_pgm(std::string_view bytes, const std::string& origin) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> std::uint64_t {
    skip_space();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), v);
    if (ec != std::errc() || ptr == bytes.data() + pos) {
      throw CorruptImage(origin + ": malformed PGM header");
    }
    pos = static_cast<std::size_t>(ptr - bytes.data());
    return v;
  };
  const std::uint64_t w = number(), h = number(), maxval = number();
  if (w == 0 || h == 0 || maxval == 0) {
    throw CorruptImage(origin + ": PGM dimensions and maxval must be positive");
  }
  if (maxval > 255) {
    throw UnsupportedFormat(origin + ": 16-bit PGM is not supported");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw CorruptImage(origin + ": malformed PGM header");
  }
  ++pos;
  if (bytes.size() - pos < w * h) {
    throw CorruptImage(origin + ": truncated PGM data");
  }
  std::vector<std::uint8_t> px(w * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(bytes[pos + i]);
    if (v > maxval) throw CorruptImage(origin + ": sample exceeds maxval");
    px[i] = maxval == 255 ? v
                          : static_cast<std::uint8_t>((v * 255u * 2 + maxval) / (2 * maxval));
  }
  return ImageBuffer(w, h, std::move(px));
}

inline ImageBuffer decode_image(std::string_view bytes, const std::string& origin) {
  if (has_png_signature(bytes)) return decode_png(bytes, origin);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    return decode_pgm(bytes, origin);
  }
  throw UnsupportedFormat(origin + ": not a PNG or binary PGM file");
}

inline ImageBuffer load_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw ImageNotFound(path.string() + ": no such file");
  if (!fs::is_regular_file(path, ec)) throw IoError(path.string() + ": not a file");
  return decode_image(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Encoding.

inline std::string encode_png(const ImageBuffer& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.samples().data(), 0,
                                 nullptr)) {
    throw IoError(std::string("png encode: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.samples().data(), 0,
                                 nullptr)) {
    throw IoError(std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

inline std::string encode_pgm(const ImageBuffer& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  out.append(img.samples().begin(), img.samples().end());
  return out;
}

inline void save_png(const ImageBuffer& img, const fs::path& path) {
  write_file_atomic(path, encode_png(img));
}

inline void save_pgm(const ImageBuffer& img, const fs::path& path) {
  write_file_atomic(path, encode_pgm(img));
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string aux_csv(const AuxData& aux) {
  std::string out;
  if (const auto* series = std::get_if<Series>(&aux)) {
    out = "x,value\n";
    for (std::size_t i = 0; i < series->size(); ++i) {
      out += std::to_string(i) + "," + format_double((*series)[i]) + "\n";
    }
  } else if (const auto* grid = std::get_if<SurfaceGrid>(&aux)) {
    for (std::size_t r = 0; r < grid->rows; ++r) {
      for (std::size_t c = 0; c < grid->cols; ++c) {
        if (c) out += ",";
        out += format_double(grid->at(c, r));
      }
      out += "\n";
    }
  } else if (const auto* t = std::get_if<int>(&aux)) {
    out = "threshold\n" + std::to_string(*t) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifests.

/// Flat key=value record describing one candidate. `iteration` doubles as
/// the logical timestamp, which keeps run directories reproducible.
struct Manifest {
  Natural code;
  std::uint64_t iteration = 0;
  PhaseShares shares;
  std::array<std::string, 3> stages;
  std::vector<std::string> param_names;
  Settings settings;
  std::vector<double> values;

  bool operator==(const Manifest&) const = default;
};

namespace detail {

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(sep, start);
    out.emplace_back(text.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline std::uint64_t parse_u64(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw IoError("manifest: bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw IoError("manifest: bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline std::string format_manifest(const Manifest& m) {
  std::ostringstream out;
  out << "code=" << to_text(m.code) << "\n"
      << "iteration=" << m.iteration << "\n"
      << "shares=" << m.shares.veni << "," << m.shares.vidi << "," << m.shares.vici << "\n"
      << "stages=" << m.stages[0] << "," << m.stages[1] << "," << m.stages[2] << "\n"
      << "params=" << detail::join(m.param_names, [](const std::string& s) { return s; })
      << "\n"
      << "indices="
      << detail::join(m.settings.indices, [](std::uint64_t v) { return std::to_string(v); })
      << "\n"
      << "values=" << detail::join(m.values, format_double) << "\n";
  return out.str();
}

inline Manifest parse_manifest(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  for (const auto& line : detail::split(text, '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("manifest: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(std::string("manifest: missing key '") + key + "'");
    return it->second;
  };
  Manifest m;
  try {
    m.code = parse_natural(get("code"));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("manifest: ") + e.what());
  }
  m.iteration = detail::parse_u64(get("iteration"), "iteration");
  const auto shares = detail::split(get("shares"), ',');
  if (shares.size() != 3) throw IoError("manifest: shares must have three entries");
  m.shares = {detail::parse_u64(shares[0], "share"), detail::parse_u64(shares[1], "share"),
              detail::parse_u64(shares[2], "share")};
  const auto stages = detail::split(get("stages"), ',');
  if (stages.size() != 3) throw IoError("manifest: stages must have three entries");
  m.stages = {stages[0], stages[1], stages[2]};
  m.param_names = detail::split(get("params"), ',');
  for (const auto& s : detail::split(get("indices"), ',')) {
    m.settings.indices.push_back(detail::parse_u64(s, "index"));
  }
  for (const auto& s : detail::split(get("values"), ',')) {
    m.values.push_back(detail::parse_double(s, "value"));
  }
  return m;
}

inline void write_manifest(const Manifest& m, const fs::path& path) {
  write_file_atomic(path, format_manifest(m));
}

inline Manifest read_manifest(const fs::path& path) {
  return parse_manifest(read_file(path));
}

/// Writes every phase image, auxiliary CSV and rendering for one candidate,
/// then its manifest. Returns the manifest path.
inline fs::path write_candidate_files(const std::vector<PipelineOutput>& outputs,
                                      const Manifest& manifest, const fs::path& dir) {
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const std::string prefix = outputs.size() == 1 ? "" : "img" + std::to_string(k) + "_";
    for (Phase p : kPhases) {
      const PhaseOutput& out = outputs[k][static_cast<int>(p)];
      const std::string stem = prefix + phase_name(p);
      save_png(out.image, dir / (stem + ".png"));
      if (!std::holds_alternative<std::monostate>(out.aux)) {
        write_file_atomic(dir / (stem + "_aux.csv"), aux_csv(out.aux));
      }
      if (out.rendering) save_png(*out.rendering, dir / (stem + "_aux.png"));
    }
  }
  const fs::path manifest_path = dir / "manifest.txt";
  write_manifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace vvv

#endif  // VVV_IMAGEIO_HPP_
