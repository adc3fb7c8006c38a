/*
 * Copyright 2026 The coastsurr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace coastsurr {

struct NamedArray {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  std::int64_t element_count() const noexcept;
};

// On-disk container of named float32 arrays plus a JSON metadata block.
//
// Byte layout (all integers little-endian):
//
//   offset 0   4 bytes   magic "CSTC"
//   offset 4   u32       format version (currently 1)
//   offset 8   u64       header length H in bytes
//   offset 16  H bytes   UTF-8 JSON header
//   16 + H     ...       payload: each array's float32 values, little-endian,
//                        row-major, concatenated in header order
//
// The JSON header is
//   {"format": "coastsurr-tensor-container", "version": 1,
//    "metadata": {...},
//    "arrays": [{"name": str, "dtype": "float32", "shape": [int...],
//                "offset": bytes-from-payload-start, "count": elements}, ...]}
class TensorContainer {
 public:
  static constexpr std::uint32_t kVersion = 1;

  nlohmann::json metadata = nlohmann::json::object();

  void add(std::string name, std::vector<std::int64_t> shape, std::vector<float> data);
  bool has(std::string_view name) const noexcept;
  const NamedArray& get(std::string_view name) const;
  const std::vector<NamedArray>& arrays() const noexcept { return arrays_; }

  std::string serialize() const;
  static TensorContainer deserialize(std::string_view bytes);

  void write(const std::filesystem::path& path) const;
  static TensorContainer read(const std::filesystem::path& path);

 private:
  std::vector<NamedArray> arrays_;
};

}  // namespace coastsurr
