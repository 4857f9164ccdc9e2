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

// Stand-in for a command-line OCR engine: `mock_ocr [flags] <image> <output-base>`.
// Writes "<output-base>.txt" describing the crop ("seg<W>x<H> ink<N>", N =
// pixels darker than 128, empty for a crop without ink) unless --text
// overrides it.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "screenlens/image_io.hpp"
#include "screenlens/imaging.hpp"

int main(int argc, char** argv) {
  std::string text;
  bool fixed_text = false;
  int exit_code = 0;
  int sleep_ms = 0;
  bool write_output = true;
  std::vector<std::string> positional;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--text" && i + 1 < argc) {
      text = argv[++i];
      fixed_text = true;
    } else if (arg == "--exit" && i + 1 < argc) {
      exit_code = std::atoi(argv[++i]);
    } else if (arg == "--sleep-ms" && i + 1 < argc) {
      sleep_ms = std::atoi(argv[++i]);
    } else if (arg == "--no-output") {
      write_output = false;
    } else {
      positional.push_back(arg);
    }
  }
  if (positional.size() != 2) {
    std::cerr << "usage: mock_ocr [--text T] [--exit N] [--sleep-ms N] [--no-output] <image> <output-base>\n";
    return 64;
  }
  if (sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
  if (exit_code != 0) {
    std::cerr << "mock_ocr: failing on request\n";
    return exit_code;
  }

  if (!fixed_text) {
    try {
      const auto gray = screenlens::imaging::to_grayscale(screenlens::imaging::load_image(positional[0]));
      std::size_t ink = 0;
      for (auto p : gray.pixels()) ink += p < 128 ? 1 : 0;
      if (ink > 0)
        text = "seg" + std::to_string(gray.width()) + "x" + std::to_string(gray.height()) + " ink" +
               std::to_string(ink);
    } catch (const std::exception& e) {
      std::cerr << "mock_ocr: " << e.what() << "\n";
      return 3;
    }
  }
  if (write_output) {
    std::ofstream out(positional[1] + ".txt", std::ios::binary);
    out << text << "\n\f";
  }
  return 0;
}
