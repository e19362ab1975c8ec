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

#ifndef T2T_HASH_HPP_
#define T2T_HASH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace t2t {

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::span<const std::uint8_t> bytes);
std::string Sha256Hex(std::string_view bytes);

// First 8 digest bytes of SHA-256, read little-endian.
std::uint64_t Hash64(std::string_view bytes);

// IEEE CRC-32.
std::uint32_t Crc32(std::span<const std::uint8_t> bytes);

// Deterministic per-item seed derived from a run seed and an item index, so
// serial and parallel generation draw identical streams.
std::uint64_t DeriveSeed(std::uint64_t run_seed, std::uint64_t index);

}  // namespace t2t

#endif  // T2T_HASH_HPP_
