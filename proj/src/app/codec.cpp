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
#include "coastsurr/app/codec.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>

#include "coastsurr/core/errors.hpp"

namespace coastsurr::app {

using nlohmann::json;

json rle_encode(const Grid& g) {
  json runs = json::array();
  const auto v = g.values();
  std::size_t k = 0;
  while (k < v.size()) {
    if (v[k] == 0.0f) {
      ++k;
      continue;
    }
    const std::size_t start = k;
    json vals = json::array();
    while (k < v.size() && v[k] != 0.0f) vals.push_back(v[k++]);
    runs.push_back(json::array({start, std::move(vals)}));
  }
  return {{"n", g.n()}, {"runs", std::move(runs)}};
}

Grid rle_decode(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("runs")) {
    throw ParseError("RLE grid needs 'n' and 'runs'");
  }
  if (!j["n"].is_number_integer() || j["n"].get<long long>() <= 0) {
    throw ParseError("RLE 'n' must be a positive integer");
  }
  const int n = j["n"].get<int>();
  Grid g(n);
  const auto total = g.size();
  std::size_t end_prev = 0;
  bool first = true;
  for (const auto& run : j["runs"]) {
    if (!run.is_array() || run.size() != 2 || !run[0].is_number_unsigned() || !run[1].is_array()) {
      throw ParseError("RLE run must be [start, [values...]]");
    }
    const auto start = run[0].get<std::size_t>();
    const auto& vals = run[1];
    if (vals.empty()) throw ParseError("RLE run at " + std::to_string(start) + " is empty");
    if (!first && start <= end_prev) {
      throw ParseError("RLE runs must be sorted and non-adjacent", start);
    }
    if (start + vals.size() > total) throw ParseError("RLE run exceeds the grid", start);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (!vals[k].is_number()) throw ParseError("RLE value is not a number", start + k);
      g.storage()[start + k] = vals[k].get<float>();
    }
    end_prev = start + vals.size();
    first = false;
  }
  return g;
}

namespace {

struct Fnv {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= b[k];
      h *= 1099511628211ull;
    }
  }
};

}  // namespace

std::string model_version(const nn::ParamStore<float>& params) {
  Fnv f;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    f.bytes(p.name.data(), p.name.size());
    for (int d : p.value.shape) {
      const auto d32 = static_cast<std::int32_t>(d);
      f.bytes(&d32, sizeof d32);
    }
    f.bytes(p.value.data.data(), p.value.data.size() * sizeof(float));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
  Fnv f;
  f.bytes(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

}  // namespace coastsurr::app
