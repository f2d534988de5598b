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

// Test fixtures and reference implementations. The oracles here are written
// directly from the definitions and share no code with the library's
// filters.

#ifndef VVV_TESTS_SUPPORT_HPP_
#define VVV_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "vvv/image.hpp"

namespace vvv::testing {

inline ImageBuffer RandomImage(std::mt19937& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<std::uint8_t> px(w * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(dist(rng));
  return ImageBuffer(w, h, std::move(px));
}

inline ImageBuffer ConstantImage(std::size_t w, std::size_t h, std::uint8_t v) {
  return ImageBuffer(w, h, v);
}

/// Two Gaussian intensity modes at 60 and 190, half the pixels each.
inline ImageBuffer BimodalImage(std::size_t w = 64, std::size_t h = 64,
                                unsigned seed = 5) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> low(60.0, 12.0), high(190.0, 12.0);
  ImageBuffer img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) {
    double v = (i % 2 == 0) ? low(rng) : high(rng);
    img.samples()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return img;
}

/// Synthetic microscopy-like scene: dark background with a gentle gradient,
/// a handful of bright blobs, and mild noise.
inline ImageBuffer CellScene(std::size_t w = 128, std::size_t h = 128,
                             unsigned seed = 2013) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> pos(0.1, 0.9), rad(5.0, 14.0);
  std::normal_distribution<double> noise(0.0, 6.0);
  struct Blob { double x, y, r; };
  std::vector<Blob> blobs;
  for (int i = 0; i < 9; ++i) {
    blobs.push_back({pos(rng) * static_cast<double>(w),
                     pos(rng) * static_cast<double>(h), rad(rng)});
  }
  ImageBuffer img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double v = 30.0 + 30.0 * static_cast<double>(x) / static_cast<double>(w);
      for (const Blob& b : blobs) {
        const double dx = static_cast<double>(x) - b.x;
        const double dy = static_cast<double>(y) - b.y;
        v += 150.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r));
      }
      v += noise(rng);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return img;
}

// --- Oracles ---------------------------------------------------------------

inline std::size_t Mirror(long i, long n) {
  // -1 -> 0, n -> n-1, repeated with period 2n.
  while (i < 0 || i >= n) i = (i < 0) ? -i - 1 : 2 * n - i - 1;
  return static_cast<std::size_t>(i);
}

/// Full 2-D convolution with the outer product of a freshly computed 1-D
/// Gaussian; unrounded, clamped to [0, 255].
inline std::vector<double> DenseGaussian(const ImageBuffer& img, double sigma) {
  const long r = static_cast<long>(std::ceil(3 * sigma));
  std::vector<double> g;
  double s = 0;
  for (long i = -r; i <= r; ++i) {
    g.push_back(std::exp(-(double)(i * i) / (2 * sigma * sigma)));
    s += g.back();
  }
  const long w = (long)img.width(), h = (long)img.height();
  std::vector<double> out(img.size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0;
      for (long j = -r; j <= r; ++j) {
        for (long i = -r; i <= r; ++i) {
          acc += g[i + r] * g[j + r] / (s * s) *
                 img.at(Mirror(x + i, w), Mirror(y + j, h));
        }
      }
      out[y * w + x] = std::clamp(acc, 0.0, 255.0);
    }
  }
  return out;
}

/// Direct 3x3 correlation with both Sobel kernels; unrounded, clamped.
inline std::vector<double> DenseSobel(const ImageBuffer& img) {
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  const long w = (long)img.width(), h = (long)img.height();
  std::vector<double> out(img.size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double gx = 0, gy = 0;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          double v = img.at(Mirror(x + i, w), Mirror(y + j, h));
          gx += kx[j + 1][i + 1] * v;
          gy += ky[j + 1][i + 1] * v;
        }
      }
      out[y * w + x] = std::clamp(std::hypot(gx, gy), 0.0, 255.0);
    }
  }
  return out;
}

/// Scans all 256 thresholds, evaluating w0 w1 (mu0 - mu1)^2 from the raw
/// pixels; the first (smallest) maximizer wins.
inline int BruteForceOtsu(const ImageBuffer& img) {
  const double n = static_cast<double>(img.size());
  int best_t = -1;
  double best = -1.0;
  for (int t = 0; t < 256; ++t) {
    double c0 = 0, c1 = 0, s0 = 0, s1 = 0;
    for (std::uint8_t v : img.samples()) {
      if (v <= t) { c0 += 1; s0 += v; } else { c1 += 1; s1 += v; }
    }
    double var = 0.0;
    if (c0 > 0 && c1 > 0) {
      const double mu0 = s0 / c0, mu1 = s1 / c1;
      var = (c0 / n) * (c1 / n) * (mu0 - mu1) * (mu0 - mu1);
    }
    if (var > best) {
      best = var;
      best_t = t;
    }
  }
  return best_t;
}

// --- Filesystem -------------------------------------------------------------

inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("vvv_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void WriteFile(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Every regular file under root, keyed by relative path, with its bytes.
inline std::vector<std::pair<std::string, std::string>> Snapshot(
    const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out.emplace_back(std::filesystem::relative(e.path(), root).string(),
                       ReadFile(e.path()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace vvv::testing

#endif  // VVV_TESTS_SUPPORT_HPP_
