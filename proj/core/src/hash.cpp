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

#include "t2t/hash.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <array>
#include <cstdio>

namespace t2t {

namespace {

std::array<std::uint8_t, 32> Sha256(const void* data, std::size_t size) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  EVP_Digest(data, size, digest.data(), &len, EVP_sha256(), nullptr);
  return digest;
}

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

}  // namespace

std::string Sha256Hex(std::span<const std::uint8_t> bytes) {
  return ToHex(Sha256(bytes.data(), bytes.size()));
}

std::string Sha256Hex(std::string_view bytes) {
  return ToHex(Sha256(bytes.data(), bytes.size()));
}

std::uint64_t Hash64(std::string_view bytes) {
  const auto digest = Sha256(bytes.data(), bytes.size());
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | digest[i];
  return value;
}

std::uint32_t Crc32(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::uint64_t DeriveSeed(std::uint64_t run_seed, std::uint64_t index) {
  // splitmix64 finalizer over a combination of both inputs.
  std::uint64_t z = run_seed ^ (index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace t2t
