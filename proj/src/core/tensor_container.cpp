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
#include "coastsurr/core/tensor_container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {
namespace {

constexpr char kMagic[4] = {'C', 'S', 'T', 'C'};

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<char>((value >> (8 * b)) & 0xFF));
  }
}

template <typename U>
U get_le(std::string_view in, std::size_t offset) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    value |= static_cast<U>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  }
  return value;
}

}  // namespace

std::int64_t NamedArray::element_count() const noexcept {
  std::int64_t c = 1;
  for (auto d : shape) c *= d;
  return c;
}

void TensorContainer::add(std::string name, std::vector<std::int64_t> shape,
                          std::vector<float> data) {
  NamedArray a{std::move(name), std::move(shape), std::move(data)};
  for (auto d : a.shape) {
    if (d < 0) throw ShapeError("negative dimension in array '" + a.name + "'");
  }
  if (a.element_count() != static_cast<std::int64_t>(a.data.size())) {
    throw ShapeError("array '" + a.name + "' shape does not match its element count");
  }
  if (has(a.name)) throw ShapeError("duplicate array name '" + a.name + "'");
  arrays_.push_back(std::move(a));
}

bool TensorContainer::has(std::string_view name) const noexcept {
  for (const auto& a : arrays_) {
    if (a.name == name) return true;
  }
  return false;
}

const NamedArray& TensorContainer::get(std::string_view name) const {
  for (const auto& a : arrays_) {
    if (a.name == name) return a;
  }
  throw NotFoundError("container has no array named '" + std::string(name) + "'");
}

std::string TensorContainer::serialize() const {
  nlohmann::json header;
  header["format"] = "coastsurr-tensor-container";
  header["version"] = kVersion;
  header["metadata"] = metadata;
  header["arrays"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& a : arrays_) {
    header["arrays"].push_back({{"name", a.name},
                                {"dtype", "float32"},
                                {"shape", a.shape},
                                {"offset", offset},
                                {"count", a.data.size()}});
    offset += a.data.size() * sizeof(float);
  }
  const std::string header_text = header.dump();

  std::string out;
  out.reserve(16 + header_text.size() + offset);
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, header_text.size());
  out += header_text;
  for (const auto& a : arrays_) {
    if constexpr (std::endian::native == std::endian::little) {
      out.append(reinterpret_cast<const char*>(a.data.data()), a.data.size() * sizeof(float));
    } else {
      for (float v : a.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    }
  }
  return out;
}

TensorContainer TensorContainer::deserialize(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError("not a tensor container (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kVersion) {
    throw ParseError("unsupported tensor container version " + std::to_string(version));
  }
  const auto header_len = get_le<std::uint64_t>(bytes, 8);
  if (header_len > bytes.size() - 16) throw ParseError("truncated container header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("container header is not valid JSON: ") + e.what());
  }
  const std::string_view payload = bytes.substr(16 + header_len);

  TensorContainer c;
  c.metadata = header.value("metadata", nlohmann::json::object());
  try {
    for (const auto& entry : header.at("arrays")) {
      if (entry.at("dtype").get<std::string>() != "float32") {
        throw ParseError("unsupported dtype in container");
      }
      const auto offset = entry.at("offset").get<std::uint64_t>();
      const auto count = entry.at("count").get<std::uint64_t>();
      if (offset > payload.size() || count * sizeof(float) > payload.size() - offset) {
        throw ParseError("array '" + entry.at("name").get<std::string>() +
                         "' extends past the end of the payload");
      }
      std::vector<float> data(count);
      if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(data.data(), payload.data() + offset, count * sizeof(float));
      } else {
        for (std::uint64_t k = 0; k < count; ++k) {
          data[k] = std::bit_cast<float>(get_le<std::uint32_t>(payload, offset + 4 * k));
        }
      }
      c.add(entry.at("name").get<std::string>(),
            entry.at("shape").get<std::vector<std::int64_t>>(), std::move(data));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed container header: ") + e.what());
  }
  return c;
}

void TensorContainer::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string bytes = serialize();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

TensorContainer TensorContainer::read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

}  // namespace coastsurr
