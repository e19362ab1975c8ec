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

#include "t2t/image_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "t2t/errors.hpp"

namespace t2t {

namespace {

struct PfmHeader {
  int rows = 0;
  int cols = 0;
  bool little_endian = true;
  std::size_t data_offset = 0;
};

// Reads one whitespace-delimited token; `pos` ends on the delimiter.
std::string_view Token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  auto space = [](std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (pos < bytes.size() && space(bytes[pos])) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !space(bytes[pos])) ++pos;
  if (start == pos) throw FormatError("pfm: truncated header", start);
  return {reinterpret_cast<const char*>(bytes.data() + start), pos - start};
}

int PositiveInt(std::string_view tok, std::size_t offset) {
  int v = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size() || v <= 0) {
    throw FormatError("pfm: invalid dimension '" + std::string(tok) + "'", offset);
  }
  return v;
}

PfmHeader ParsePfmHeader(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string_view magic = Token(bytes, pos);
  if (magic == "PF") throw FormatError("pfm: color images are not supported", 0);
  if (magic != "Pf") throw FormatError("pfm: bad magic", 0);
  PfmHeader h;
  std::size_t at = pos;
  h.cols = PositiveInt(Token(bytes, pos), at);
  at = pos;
  h.rows = PositiveInt(Token(bytes, pos), at);
  at = pos;
  const std::string scale_tok(Token(bytes, pos));
  double scale = 0.0;
  const auto [end, ec] = std::from_chars(scale_tok.data(), scale_tok.data() + scale_tok.size(), scale);
  if (ec != std::errc{} || end != scale_tok.data() + scale_tok.size() || scale == 0.0 || !std::isfinite(scale)) {
    throw FormatError("pfm: invalid scale '" + scale_tok + "'", at);
  }
  h.little_endian = scale < 0.0;
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size()) throw FormatError("pfm: truncated header", pos);
  h.data_offset = pos + 1;
  return h;
}

std::string PnmHeader(std::string_view magic, int cols, int rows, std::string_view last) {
  return std::string(magic) + "\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n" +
         std::string(last) + "\n";
}

// Normalizes one panel into `out` at column offset `x0` of a strip `width` wide.
PgmScale Blit(const TactileImage& image, std::vector<std::uint8_t>& out, std::size_t base, int width, int x0) {
  const PgmScale s{image.MinValue(), image.MaxValue()};
  const double range = static_cast<double>(s.max) - s.min;
  for (int r = 0; r < image.rows(); ++r) {
    // Top row of the picture is the last image row.
    const std::size_t line = base + static_cast<std::size_t>(image.rows() - 1 - r) * width + x0;
    for (int c = 0; c < image.cols(); ++c) {
      const double v = range > 0.0 ? (image.at(r, c) - s.min) / range : 0.0;
      out[line + c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
  }
  return s;
}

}  // namespace

std::vector<std::uint8_t> EncodePfm(const TactileImage& image) {
  internal::ByteWriter w;
  w.PutBytes(PnmHeader("Pf", image.cols(), image.rows(), "-1.0"));
  w.PutArray<float>(image.data());
  return std::move(w.bytes());
}

TactileImage DecodePfm(std::span<const std::uint8_t> bytes) {
  const PfmHeader h = ParsePfmHeader(bytes);
  return DecodePfm(bytes, PixelGrid{h.rows, h.cols, {0.0, 0.0}, 1.0, 1.0});
}

TactileImage DecodePfm(std::span<const std::uint8_t> bytes, const PixelGrid& grid) {
  const PfmHeader h = ParsePfmHeader(bytes);
  if (h.rows != grid.rows || h.cols != grid.cols) {
    throw ShapeMismatch("pfm is " + std::to_string(h.rows) + "x" + std::to_string(h.cols) +
                        ", expected " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
  }
  internal::ByteReader r(bytes, "pfm");
  r.Skip(h.data_offset);
  std::vector<float> data(grid.size());
  r.GetArray<float>(data);
  r.ExpectEnd();
  if (!h.little_endian) {
    for (float& v : data) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
  }
  return TactileImage(grid, std::move(data));
}

void WritePfm(const std::filesystem::path& path, const TactileImage& image) {
  internal::WriteFileBytes(path, EncodePfm(image));
}

TactileImage ReadPfm(const std::filesystem::path& path) {
  return DecodePfm(internal::ReadFileBytes(path));
}

TactileImage ReadPfm(const std::filesystem::path& path, const PixelGrid& grid) {
  return DecodePfm(internal::ReadFileBytes(path), grid);
}

std::vector<std::uint8_t> EncodePgm(const TactileImage& image, PgmScale* scale) {
  const std::string header = PnmHeader("P5", image.cols(), image.rows(), "255");
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t base = out.size();
  out.resize(base + image.size());
  const PgmScale s = Blit(image, out, base, image.cols(), 0);
  if (scale != nullptr) *scale = s;
  return out;
}

int StripWidth(int panel_width, int count, int gutter) {
  return count * panel_width + (count - 1) * gutter;
}

std::vector<std::uint8_t> EncodePgmStrip(std::span<const TactileImage> panels, int gutter,
                                         std::vector<PgmScale>* scales) {
  if (panels.empty()) throw InvalidArgument("strip needs at least one panel");
  if (gutter < 0) throw InvalidArgument("gutter must be >= 0");
  const int rows = panels[0].rows(), cols = panels[0].cols();
  for (const TactileImage& p : panels) {
    if (p.rows() != rows || p.cols() != cols) throw ShapeMismatch("strip panels must share one size");
  }
  const int width = StripWidth(cols, static_cast<int>(panels.size()), gutter);
  const std::string header = PnmHeader("P5", width, rows, "255");
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t base = out.size();
  out.resize(base + static_cast<std::size_t>(width) * rows, 255);
  if (scales != nullptr) scales->clear();
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const PgmScale s = Blit(panels[i], out, base, width, static_cast<int>(i) * (cols + gutter));
    if (scales != nullptr) scales->push_back(s);
  }
  return out;
}

}  // namespace t2t
