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

#include "screenlens/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "screenlens/error.hpp"

namespace screenlens::imaging {

RasterImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("image not found: " + path.string());
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode " + path.string() + ": " + e.what());
  }
  if (bgr.empty()) throw IoError("cannot decode image: " + path.string());

  std::vector<std::uint8_t> rgb;
  rgb.reserve(static_cast<std::size_t>(bgr.rows) * bgr.cols * 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      rgb.push_back(row[x][2]);
      rgb.push_back(row[x][1]);
      rgb.push_back(row[x][0]);
    }
  }
  return RasterImage(bgr.cols, bgr.rows, std::move(rgb));
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
  cv::Mat mat(img.height(), img.width(), CV_8UC1,
              const_cast<std::uint8_t*>(img.pixels().data()));
  if (!cv::imwrite(path.string(), mat)) throw IoError("cannot write " + path.string());
}

void write_png(const RasterImage& img, const std::filesystem::path& path) {
  cv::Mat mat(img.height(), img.width(), CV_8UC3);
  const auto rgb = img.pixels();
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * img.width() + x) * 3;
      row[x] = cv::Vec3b(rgb[i + 2], rgb[i + 1], rgb[i]);
    }
  }
  if (!cv::imwrite(path.string(), mat)) throw IoError("cannot write " + path.string());
}

bool is_supported_image(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

} // namespace screenlens::imaging
