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

#ifndef VVV_IMAGE_HPP_
#define VVV_IMAGE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vvv {

/// Row-major 8-bit grayscale raster.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : ImageBuffer(width, height,
                    std::vector<std::uint8_t>(width * height, fill)) {}

  ImageBuffer(std::size_t width, std::size_t height,
              std::vector<std::uint8_t> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    if (width == 0 || height == 0) {
      throw std::invalid_argument("image dimensions must be positive");
    }
    if (samples_.size() != width * height) {
      throw std::invalid_argument(
          "image has " + std::to_string(samples_.size()) +
          " samples, expected " + std::to_string(width * height));
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  std::uint8_t at(std::size_t x, std::size_t y) const {
    return samples_[y * width_ + x];
  }
  std::uint8_t& at(std::size_t x, std::size_t y) {
    return samples_[y * width_ + x];
  }

  const std::vector<std::uint8_t>& samples() const { return samples_; }
  std::vector<std::uint8_t>& samples() { return samples_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> samples_;
};

/// Clamps to [0, 255] and rounds half up.
inline std::uint8_t to_gray(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

/// Half-sample symmetric reflection: -1 -> 0, n -> n-1. Valid for any
/// offset, including ones larger than the extent.
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

}  // namespace vvv

#endif  // VVV_IMAGE_HPP_
