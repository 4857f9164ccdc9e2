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

#include <filesystem>

#include "screenlens/imaging.hpp"

// PNG/JPEG decoding and PNG encoding for the pipeline.
namespace screenlens::imaging {

// Throws IoError if the file is missing or cannot be decoded.
RasterImage load_image(const std::filesystem::path& path);

void write_png(const GrayImage& img, const std::filesystem::path& path);
void write_png(const RasterImage& img, const std::filesystem::path& path);

bool is_supported_image(const std::filesystem::path& path);

} // namespace screenlens::imaging
