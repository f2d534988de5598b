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

// Image operations used as pipeline stages: smoothing and edge filters,
// profile and surface renderings, and thresholding.
//
// All borders are handled by half-sample symmetric reflection.

#ifndef VVV_STAGES_HPP_
#define VVV_STAGES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vvv/image.hpp"
#include "vvv/natural.hpp"

namespace vvv {

inline constexpr double kMaxSigma = 16.0;

inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || sigma > kMaxSigma) {
    throw std::domain_error("gaussian_blur: sigma must be in (0, 16], got " +
                            std::to_string(sigma));
  }
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

/// Separable Gaussian smoothing, horizontal pass then vertical pass, with a
/// single rounding at the end.
inline ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t w = img.width(), h = img.height();

  std::vector<double> horizontal(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::size_t sx =
            reflect_index(static_cast<std::ptrdiff_t>(x) + k, w);
        acc += kernel[static_cast<std::size_t>(k + radius)] * img.at(sx, y);
      }
      horizontal[y * w + x] = acc;
    }
  }

  ImageBuffer out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::size_t sy =
            reflect_index(static_cast<std::ptrdiff_t>(y) + k, h);
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               horizontal[sy * w + x];
      }
      out.at(x, y) = to_gray(acc);
    }
  }
  return out;
}

/// Gradient magnitude sqrt(Gx^2 + Gy^2) with the 3x3 Sobel kernels.
inline ImageBuffer sobel_edges(const ImageBuffer& img) {
  const std::size_t w = img.width(), h = img.height();
  if (w < 3 || h < 3) {
    throw std::invalid_argument("sobel_edges: image must be at least 3x3");
  }
  auto px = [&](std::ptrdiff_t x, std::ptrdiff_t y) -> double {
    return img.at(reflect_index(x, w), reflect_index(y, h));
  };
  ImageBuffer out(w, h);
  for (std::size_t yy = 0; yy < h; ++yy) {
    for (std::size_t xx = 0; xx < w; ++xx) {
      const auto x = static_cast<std::ptrdiff_t>(xx);
      const auto y = static_cast<std::ptrdiff_t>(yy);
      const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      out.at(xx, yy) = to_gray(std::sqrt(gx * gx + gy * gy));
    }
  }
  return out;
}

/// Binary image: 255 where intensity > t, else 0.
inline ImageBuffer fixed_threshold(const ImageBuffer& img, int t) {
  if (t < 0 || t > 255) {
    throw std::out_of_range("fixed_threshold: t must be in [0, 255], got " +
                            std::to_string(t));
  }
  ImageBuffer out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out.samples()[i] = img.samples()[i] > t ? 255 : 0;
  }
  return out;
}

inline std::array<std::uint64_t, 256> histogram(const ImageBuffer& img) {
  std::array<std::uint64_t, 256> hist{};
  for (std::uint8_t v : img.samples()) ++hist[v];
  return hist;
}

struct OtsuResult {
  int threshold = 0;
  ImageBuffer binary;
};

/// Otsu's method: the threshold t maximizing the between-class variance
/// w0(t) w1(t) (mu0(t) - mu1(t))^2, where class 0 holds intensities <= t.
/// Candidates are compared exactly, so ties go to the smallest t.
inline OtsuResult otsu_threshold(const ImageBuffer& img) {
  const auto hist = histogram(img);
  int distinct = 0;
  for (auto c : hist) distinct += c != 0;
  if (distinct < 2) {
    throw std::domain_error(
        "otsu_threshold: image has a single intensity, no two classes exist");
  }

  // With n0, n1 the class counts and s0, s1 the class sums, the objective
  // is proportional to (s0 n1 - s1 n0)^2 / (n0 n1).
  std::uint64_t total_count = 0, total_sum = 0;
  for (int v = 0; v < 256; ++v) {
    total_count += hist[v];
    total_sum += hist[v] * static_cast<std::uint64_t>(v);
  }

  int best_t = 0;
  BigInt best_num = 0, best_den = 1;
  std::uint64_t n0 = 0, s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total_count - n0, s1 = total_sum - s0;
    if (n0 == 0 || n1 == 0) continue;  // objective is zero
    BigInt diff = BigInt(s0) * n1 - BigInt(s1) * n0;
    BigInt num = diff * diff;
    BigInt den = BigInt(n0) * n1;
    if (num * best_den > best_num * den) {
      best_num = std::move(num);
      best_den = std::move(den);
      best_t = t;
    }
  }
  return {best_t, fixed_threshold(img, best_t)};
}

inline std::vector<double> plot_profile(const ImageBuffer& img,
                                        std::size_t row) {
  if (row >= img.height()) {
    throw std::out_of_range("plot_profile: row " + std::to_string(row) +
                            " outside image of height " +
                            std::to_string(img.height()));
  }
  std::vector<double> series(img.width());
  for (std::size_t x = 0; x < img.width(); ++x) series[x] = img.at(x, row);
  return series;
}

/// Line chart of a [0, 255] series: one column per sample, white trace on
/// black, consecutive points joined vertically.
inline ImageBuffer render_profile(const std::vector<double>& series,
                                  std::size_t chart_height = 128) {
  if (series.empty()) throw std::invalid_argument("render_profile: empty series");
  ImageBuffer chart(series.size(), chart_height, 0);
  auto row_of = [&](double v) {
    const double clamped = std::clamp(v, 0.0, 255.0);
    return static_cast<std::size_t>(
        std::floor((255.0 - clamped) * static_cast<double>(chart_height - 1) /
                       255.0 + 0.5));
  };
  std::size_t previous = row_of(series[0]);
  for (std::size_t x = 0; x < series.size(); ++x) {
    const std::size_t r = row_of(series[x]);
    const std::size_t lo = std::min(r, previous), hi = std::max(r, previous);
    for (std::size_t y = lo; y <= hi; ++y) chart.at(x, y) = 255;
    previous = r;
  }
  return chart;
}

struct SurfaceGrid {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<double> heights;  // row-major

  double at(std::size_t c, std::size_t r) const { return heights[r * cols + c]; }

  bool operator==(const SurfaceGrid&) const = default;
};

/// Block-mean downsampling into a ceil(w/d) x ceil(h/d) height grid. Edge
/// blocks average only the pixels they cover.
inline SurfaceGrid surface_grid(const ImageBuffer& img, std::size_t downsample) {
  if (downsample == 0) {
    throw std::invalid_argument("surface_grid: downsample must be >= 1");
  }
  SurfaceGrid g;
  g.cols = (img.width() + downsample - 1) / downsample;
  g.rows = (img.height() + downsample - 1) / downsample;
  g.heights.assign(g.cols * g.rows, 0.0);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      std::uint64_t sum = 0, n = 0;
      for (std::size_t y = r * downsample;
           y < std::min(img.height(), (r + 1) * downsample); ++y) {
        for (std::size_t x = c * downsample;
             x < std::min(img.width(), (c + 1) * downsample); ++x) {
          sum += img.at(x, y);
          ++n;
        }
      }
      g.heights[r * g.cols + c] =
          static_cast<double>(sum) / static_cast<double>(n);
    }
  }
  return g;
}

/// Shaded elevation image of a height grid: height blended with Lambertian
/// shading from a light at the upper left.
inline ImageBuffer render_surface(const SurfaceGrid& g) {
  ImageBuffer out(g.cols, g.rows);
  const double lx = -1.0 / std::sqrt(3.0), ly = -1.0 / std::sqrt(3.0),
               lz = 1.0 / std::sqrt(3.0);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      auto h = [&](std::ptrdiff_t cc, std::ptrdiff_t rr) {
        return g.at(reflect_index(cc, g.cols), reflect_index(rr, g.rows)) / 255.0;
      };
      const auto ci = static_cast<std::ptrdiff_t>(c);
      const auto ri = static_cast<std::ptrdiff_t>(r);
      const double dx = (h(ci + 1, ri) - h(ci - 1, ri)) * 4.0;
      const double dy = (h(ci, ri + 1) - h(ci, ri - 1)) * 4.0;
      const double norm = std::sqrt(dx * dx + dy * dy + 1.0);
      const double lambert =
          std::max(0.0, (-dx * lx - dy * ly + lz) / norm);
      out.at(c, r) = to_gray(255.0 * (0.5 * h(ci, ri) + 0.5 * lambert));
    }
  }
  return out;
}

}  // namespace vvv

#endif  // VVV_STAGES_HPP_
