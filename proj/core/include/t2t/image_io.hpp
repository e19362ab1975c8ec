/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef T2T_IMAGE_IO_HPP_
#define T2T_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "t2t/image.hpp"

namespace t2t {

// Grayscale little-endian PFM ("Pf", negative scale). Row 0 of the image is
// the first scanline in the file, which PFM defines as the bottom row, so +y
// points up in viewers.
std::vector<std::uint8_t> EncodePfm(const TactileImage& image);

// The decoded image sits on a unit grid at the origin. Throws FormatError
// with the failing byte offset.
TactileImage DecodePfm(std::span<const std::uint8_t> bytes);
// Places the pixels on `grid`; throws ShapeMismatch if the dimensions differ.
TactileImage DecodePfm(std::span<const std::uint8_t> bytes, const PixelGrid& grid);

void WritePfm(const std::filesystem::path& path, const TactileImage& image);
TactileImage ReadPfm(const std::filesystem::path& path);
TactileImage ReadPfm(const std::filesystem::path& path, const PixelGrid& grid);

// Value range mapped onto 0..255 by a PGM preview.
struct PgmScale {
  float min = 0.0f;
  float max = 0.0f;
};

// Binary 8-bit PGM, min-max normalized; a uniform image maps to all zeros.
// Rows are written top (largest y) first.
std::vector<std::uint8_t> EncodePgm(const TactileImage& image, PgmScale* scale = nullptr);

// Equal-sized panels side by side, each normalized on its own, separated by
// `gutter` columns of white. Throws ShapeMismatch for unequal panels and
// InvalidArgument for an empty list or a negative gutter.
std::vector<std::uint8_t> EncodePgmStrip(std::span<const TactileImage> panels, int gutter,
                                         std::vector<PgmScale>* scales = nullptr);

// Width in pixels of a strip of `count` panels.
int StripWidth(int panel_width, int count, int gutter);

}  // namespace t2t

#endif  // T2T_IMAGE_IO_HPP_
