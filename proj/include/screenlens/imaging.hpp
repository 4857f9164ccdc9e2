// Copyright 2026 The ScreenLens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace screenlens::imaging {

// Interleaved 8-bit RGB, row-major.
class RasterImage {
public:
  RasterImage(int width, int height, std::vector<std::uint8_t> rgb);
  // Filled with a single colour.
  RasterImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return rgb_; }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

// Single-channel 8-bit plane. GrayImage and BinaryImage share the layout but
// are distinct types; BinaryImage holds only 0 and 255.
template <typename Tag>
class Plane {
public:
  Plane(int width, int height, std::uint8_t fill = 0);
  Plane(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v);

  friend bool operator==(const Plane&, const Plane&) = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

struct GrayTag {};
struct BinaryTag {};
using GrayImage = Plane<GrayTag>;
using BinaryImage = Plane<BinaryTag>;

inline constexpr std::uint8_t kForeground = 255;
inline constexpr std::uint8_t kBackground = 0;

struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  long long area() const noexcept { return static_cast<long long>(w) * h; }
  int right() const noexcept { return x + w; }
  int bottom() const noexcept { return y + h; }
  // True when `other` lies inside this box, edges included.
  bool contains(const BoundingBox& other) const noexcept {
    return other.x >= x && other.y >= y && other.right() <= right() &&
           other.bottom() <= bottom();
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

// Knobs for dilation and box filtering. Defaults: 3x3 kernel, 2 iterations,
// boxes under 64 px² or narrower/shorter than 8 px are dropped.
struct SegmentationParams {
  int kernel_width = 3;
  int kernel_height = 3;
  int iterations = 2;
  long long min_area = 64;
  int min_width = 8;
  int min_height = 8;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct Segment {
  BoundingBox box;
  GrayImage crop;
};

// BT.601 luma, rounded half up.
GrayImage to_grayscale(const RasterImage& img);

std::array<std::uint64_t, 256> histogram(const GrayImage& img);

// Threshold maximising between-class variance with class 0 = {p <= t};
// the smallest maximiser wins ties. A single-intensity image yields that
// intensity.
int otsu_threshold(const GrayImage& img);

// p <= t becomes foreground (255), the rest background.
BinaryImage binarize_inverse(const GrayImage& img, int threshold);

// Rectangular structuring element anchored at (kw/2, kh/2); outside pixels
// count as background.
BinaryImage dilate(const BinaryImage& img, const SegmentationParams& params);

// One tight box per 8-connected foreground component, in no particular order.
std::vector<BoundingBox> connected_components(const BinaryImage& img);

// Drops undersized boxes, then every box contained in another. Of identical
// boxes the earliest survives. Partial overlaps are kept.
std::vector<BoundingBox> filter_innermost(std::span<const BoundingBox> boxes,
                                          const SegmentationParams& params);

// Stable sort by (y, x, w, h): top to bottom, left to right.
std::vector<BoundingBox> scan_order(std::vector<BoundingBox> boxes);

GrayImage crop(const GrayImage& img, const BoundingBox& box);

// Full pre-processing chain. Images of a single intensity have no text
// candidates and produce no segments.
std::vector<Segment> segment(const RasterImage& img, const SegmentationParams& params);

} // namespace screenlens::imaging
