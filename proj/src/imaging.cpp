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

#include "screenlens/imaging.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <type_traits>

#include "screenlens/error.hpp"

namespace screenlens::imaging {
namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1)
    throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                std::to_string(height));
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

// D^2 / P with D = N*S0 - n0*S and P = n0*n1 is proportional to the
// between-class variance. Kept as an exact quotient so ties are exact.
struct Separation {
  unsigned __int128 quotient = 0;
  std::uint64_t remainder = 0;
  std::uint64_t divisor = 1;
};

bool greater(const Separation& a, const Separation& b) {
  if (a.quotient != b.quotient) return a.quotient > b.quotient;
  // remainders are below their divisors, so both products fit in 128 bits
  return static_cast<unsigned __int128>(a.remainder) * b.divisor >
         static_cast<unsigned __int128>(b.remainder) * a.divisor;
}

class DisjointSet {
public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<int> parent_;
};

} // namespace

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (rgb_.size() != checked_area(width, height) * 3)
    throw Error("RGB buffer holds " + std::to_string(rgb_.size()) + " bytes, expected " +
                std::to_string(checked_area(width, height) * 3));
}

RasterImage::RasterImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width_(width), height_(height) {
  const std::size_t n = checked_area(width, height);
  rgb_.reserve(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    rgb_.push_back(r);
    rgb_.push_back(g);
    rgb_.push_back(b);
  }
}

void RasterImage::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const std::size_t i =
      (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  rgb_[i] = r;
  rgb_[i + 1] = g;
  rgb_[i + 2] = b;
}

template <typename Tag>
Plane<Tag>::Plane(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(checked_area(width, height), fill) {
  if constexpr (std::is_same_v<Tag, BinaryTag>) {
    if (fill != kForeground && fill != kBackground) throw Error("binary pixels must be 0 or 255");
  }
}

template <typename Tag>
Plane<Tag>::Plane(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != checked_area(width, height))
    throw Error("pixel buffer holds " + std::to_string(pixels_.size()) + " values, expected " +
                std::to_string(checked_area(width, height)));
  if constexpr (std::is_same_v<Tag, BinaryTag>) {
    for (auto p : pixels_)
      if (p != kForeground && p != kBackground) throw Error("binary pixels must be 0 or 255");
  }
}

template <typename Tag>
void Plane<Tag>::set(int x, int y, std::uint8_t v) {
  if constexpr (std::is_same_v<Tag, BinaryTag>) {
    if (v != kForeground && v != kBackground) throw Error("binary pixels must be 0 or 255");
  }
  pixels_[index(x, y)] = v;
}

template class Plane<GrayTag>;
template class Plane<BinaryTag>;

void SegmentationParams::validate() const {
  if (kernel_width < 1 || kernel_height < 1)
    throw ConfigError("dilation kernel dimensions must be >= 1");
  if (iterations < 0) throw ConfigError("dilation iterations must be >= 0");
  if (min_area < 0 || min_width < 0 || min_height < 0)
    throw ConfigError("minimum box sizes must be >= 0");
}

GrayImage to_grayscale(const RasterImage& img) {
  const auto rgb = img.pixels();
  std::vector<std::uint8_t> out(rgb.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) {
    // 0.299 R + 0.587 G + 0.114 B in thousandths, +500 rounds half up
    const unsigned weighted = 299u * rgb[3 * i] + 587u * rgb[3 * i + 1] + 114u * rgb[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::min(255u, (weighted + 500u) / 1000u));
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

std::array<std::uint64_t, 256> histogram(const GrayImage& img) {
  std::array<std::uint64_t, 256> hist{};
  for (auto p : img.pixels()) ++hist[p];
  return hist;
}

int otsu_threshold(const GrayImage& img) {
  const auto hist = histogram(img);
  const auto total = static_cast<std::uint64_t>(img.size());
  std::uint64_t sum = 0;
  for (int v = 0; v < 256; ++v) sum += hist[v] * static_cast<std::uint64_t>(v);

  int occupied = 0;
  int only = 0;
  for (int v = 0; v < 256; ++v)
    if (hist[v] != 0) {
      ++occupied;
      only = v;
    }
  if (occupied == 1) return only;

  // Thresholds that leave a class empty score zero; the first non-empty
  // split therefore always beats them.
  int best_t = 0;
  Separation best;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total - n0;
    Separation cur;
    if (n0 != 0 && n1 != 0) {
      const auto lhs = static_cast<__int128>(total) * s0;
      const auto rhs = static_cast<__int128>(n0) * sum;
      const auto diff = static_cast<unsigned __int128>(lhs > rhs ? lhs - rhs : rhs - lhs);
      const unsigned __int128 numerator = diff * diff;
      cur.divisor = n0 * n1;
      cur.quotient = numerator / cur.divisor;
      cur.remainder = static_cast<std::uint64_t>(numerator % cur.divisor);
    }
    if (greater(cur, best)) {
      best = cur;
      best_t = t;
    }
  }
  return best_t;
}

BinaryImage binarize_inverse(const GrayImage& img, int threshold) {
  if (threshold < 0 || threshold > 255)
    throw Error("threshold out of range: " + std::to_string(threshold));
  std::vector<std::uint8_t> out(img.size());
  const auto in = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = in[i] <= threshold ? kForeground : kBackground;
  return BinaryImage(img.width(), img.height(), std::move(out));
}

BinaryImage dilate(const BinaryImage& img, const SegmentationParams& params) {
  params.validate();
  const int w = img.width();
  const int h = img.height();
  // Output pixel (x, y) is set when any input pixel in
  // [x - ax, x - ax + kw) x [y - ay, y - ay + kh) is set.
  const int ax = params.kernel_width / 2;
  const int ay = params.kernel_height / 2;

  std::vector<std::uint8_t> cur(img.pixels().begin(), img.pixels().end());
  std::vector<std::uint8_t> tmp(cur.size());
  for (int it = 0; it < params.iterations; ++it) {
    // Rectangular elements are separable: horizontal pass, then vertical.
    for (int y = 0; y < h; ++y) {
      const std::size_t row = static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const int lo = std::max(0, x - ax);
        const int hi = std::min(w - 1, x - ax + params.kernel_width - 1);
        std::uint8_t v = kBackground;
        for (int k = lo; k <= hi && v == kBackground; ++k) v = cur[row + k];
        tmp[row + x] = v;
      }
    }
    for (int y = 0; y < h; ++y) {
      const int lo = std::max(0, y - ay);
      const int hi = std::min(h - 1, y - ay + params.kernel_height - 1);
      for (int x = 0; x < w; ++x) {
        std::uint8_t v = kBackground;
        for (int k = lo; k <= hi && v == kBackground; ++k)
          v = tmp[static_cast<std::size_t>(k) * w + x];
        cur[static_cast<std::size_t>(y) * w + x] = v;
      }
    }
  }
  return BinaryImage(w, h, std::move(cur));
}

std::vector<BoundingBox> connected_components(const BinaryImage& img) {
  const int w = img.width();
  const int h = img.height();
  const auto px = img.pixels();
  std::vector<int> labels(px.size(), -1);
  DisjointSet sets;

  auto label_at = [&](int x, int y) -> int {
    if (x < 0 || x >= w || y < 0) return -1;
    return labels[static_cast<std::size_t>(y) * w + x];
  };

  // First pass: provisional labels from the already-visited neighbours
  // (W, NW, N, NE), recording equivalences.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (px[i] != kForeground) continue;
      int label = -1;
      for (int n : {label_at(x - 1, y), label_at(x - 1, y - 1), label_at(x, y - 1),
                    label_at(x + 1, y - 1)}) {
        if (n < 0) continue;
        if (label < 0)
          label = n;
        else
          sets.unite(label, n);
      }
      labels[i] = label < 0 ? sets.make() : label;
    }
  }

  std::vector<int> slot_of_root;
  std::vector<BoundingBox> boxes;
  struct Extent {
    int x0, y0, x1, y1;
  };
  std::vector<Extent> extents;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels[static_cast<std::size_t>(y) * w + x];
      if (l < 0) continue;
      const int root = sets.find(l);
      if (static_cast<std::size_t>(root) >= slot_of_root.size())
        slot_of_root.resize(root + 1, -1);
      int& slot = slot_of_root[root];
      if (slot < 0) {
        slot = static_cast<int>(extents.size());
        extents.push_back({x, y, x, y});
      } else {
        auto& e = extents[slot];
        e.x0 = std::min(e.x0, x);
        e.x1 = std::max(e.x1, x);
        e.y1 = std::max(e.y1, y);
      }
    }
  }
  boxes.reserve(extents.size());
  for (const auto& e : extents) boxes.push_back({e.x0, e.y0, e.x1 - e.x0 + 1, e.y1 - e.y0 + 1});
  return boxes;
}

std::vector<BoundingBox> filter_innermost(std::span<const BoundingBox> boxes,
                                          const SegmentationParams& params) {
  std::vector<std::size_t> sized;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    if (b.area() >= params.min_area && b.w >= params.min_width && b.h >= params.min_height)
      sized.push_back(i);
  }

  // Containment is transitive, so testing against every sized box gives the
  // same result as testing against the retained ones.
  std::vector<BoundingBox> kept;
  for (std::size_t a : sized) {
    bool inner = false;
    for (std::size_t b : sized) {
      if (a == b || !boxes[b].contains(boxes[a])) continue;
      if (boxes[a] != boxes[b] || b < a) {
        inner = true;
        break;
      }
    }
    if (!inner) kept.push_back(boxes[a]);
  }
  return kept;
}

std::vector<BoundingBox> scan_order(std::vector<BoundingBox> boxes) {
  std::stable_sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
  });
  return boxes;
}

GrayImage crop(const GrayImage& img, const BoundingBox& box) {
  if (box.x < 0 || box.y < 0 || box.w < 1 || box.h < 1 || box.right() > img.width() ||
      box.bottom() > img.height())
    throw Error("crop box outside image");
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(box.area()));
  const auto px = img.pixels();
  for (int y = box.y; y < box.bottom(); ++y) {
    const auto row = px.subspan(static_cast<std::size_t>(y) * img.width() + box.x, box.w);
    out.insert(out.end(), row.begin(), row.end());
  }
  return GrayImage(box.w, box.h, std::move(out));
}

std::vector<Segment> segment(const RasterImage& img, const SegmentationParams& params) {
  params.validate();
  const GrayImage gray = to_grayscale(img);
  const auto hist = histogram(gray);
  if (std::count_if(hist.begin(), hist.end(), [](auto c) { return c != 0; }) <= 1) return {};

  const BinaryImage binary = binarize_inverse(gray, otsu_threshold(gray));
  const BinaryImage grown = dilate(binary, params);
  const auto boxes = scan_order(filter_innermost(connected_components(grown), params));

  std::vector<Segment> segments;
  segments.reserve(boxes.size());
  for (const auto& box : boxes) segments.push_back({box, crop(gray, box)});
  return segments;
}

} // namespace screenlens::imaging
