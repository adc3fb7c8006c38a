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
#include "coastsurr/core/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "coastsurr/core/errors.hpp"

namespace coastsurr {

ProtectionScenario::ProtectionScenario(std::vector<std::uint8_t> bits, double slr_m)
    : bits_(std::move(bits)), slr_m_(slr_m) {
  for (auto b : bits_) {
    if (b > 1) throw ParseError("scenario bits must be 0 or 1");
  }
  if (!(slr_m_ >= 0.0) || !std::isfinite(slr_m_)) {
    throw ParseError("SLR depth must be a finite non-negative number");
  }
}

std::size_t ProtectionScenario::protected_count() const noexcept {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::string ProtectionScenario::bit_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

ProtectionScenario ProtectionScenario::with_slr(double slr_m) const {
  return ProtectionScenario(bits_, slr_m);
}

std::string format_slr(double slr_m) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), slr_m,
                                 std::chars_format::fixed);
  if (ec != std::errc{}) throw Error("cannot format SLR value");
  std::string text(buf.data(), end);
  if (text.find('.') == std::string::npos) text += ".0";
  return text;
}

std::string encode_scenario(const ProtectionScenario& s) {
  std::string out = s.bit_string();
  out.push_back('_');
  out += s.slr_text_.empty() ? format_slr(s.slr_m_) : s.slr_text_;
  return out;
}

std::vector<std::uint8_t> parse_bits(std::string_view bits, std::size_t olu_count) {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const char c = bits[i];
    if (c != '0' && c != '1') {
      throw ParseError(std::string("unexpected character '") + c + "' in protection bits", i);
    }
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (out.size() != olu_count) {
    throw LengthError("scenario has " + std::to_string(out.size()) + " protection bits, expected " +
                      std::to_string(olu_count));
  }
  return out;
}

ProtectionScenario decode_scenario(std::string_view name, std::size_t olu_count) {
  const auto underscore = name.find('_');
  if (underscore == std::string_view::npos) {
    // Report the first non-bit character, or the end of the string.
    std::size_t pos = 0;
    while (pos < name.size() && (name[pos] == '0' || name[pos] == '1')) ++pos;
    throw ParseError("expected '_' followed by the SLR depth", pos);
  }
  auto bits = parse_bits(name.substr(0, underscore), olu_count);

  const auto slr_text = name.substr(underscore + 1);
  if (slr_text.empty()) throw ParseError("missing SLR depth", underscore + 1);
  bool seen_dot = false;
  for (std::size_t i = 0; i < slr_text.size(); ++i) {
    const char c = slr_text[i];
    const bool dot_ok = c == '.' && !seen_dot && i > 0 && i + 1 < slr_text.size();
    if (dot_ok) {
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') {
      throw ParseError(std::string("unexpected character '") + c + "' in SLR depth",
                       underscore + 1 + i);
    }
  }
  double slr = 0.0;
  auto [ptr, ec] = std::from_chars(slr_text.data(), slr_text.data() + slr_text.size(), slr);
  if (ec != std::errc{} || ptr != slr_text.data() + slr_text.size()) {
    throw ParseError("invalid SLR depth", underscore + 1);
  }
  ProtectionScenario s(std::move(bits), slr);
  s.slr_text_ = std::string(slr_text);
  return s;
}

}  // namespace coastsurr
