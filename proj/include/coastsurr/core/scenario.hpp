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
#include <string>
#include <string_view>
#include <vector>

namespace coastsurr {

/// A shoreline protection configuration: one bit per operational landscape
/// unit (1 = seawall built) plus the sea-level-rise depth in meters.
///
/// The textual form is the bit string, an underscore, and the SLR depth,
/// e.g. "10101010101010101_0.5". The SLR text is kept verbatim when a scenario
/// is parsed so that encode(decode(s)) == s even for inputs like "1.50".
class ProtectionScenario {
 public:
  ProtectionScenario() = default;
  ProtectionScenario(std::vector<std::uint8_t> bits, double slr_m);

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::size_t olu_count() const noexcept { return bits_.size(); }
  double slr_m() const noexcept { return slr_m_; }

  bool is_protected(std::size_t olu) const { return bits_.at(olu) != 0; }
  std::size_t protected_count() const noexcept;

  /// Bit string without the SLR suffix.
  std::string bit_string() const;

  /// Copy with a different SLR depth (drops any preserved SLR text).
  ProtectionScenario with_slr(double slr_m) const;

  bool operator==(const ProtectionScenario& other) const noexcept {
    return bits_ == other.bits_ && slr_m_ == other.slr_m_;
  }

 private:
  friend ProtectionScenario decode_scenario(std::string_view, std::size_t);
  friend std::string encode_scenario(const ProtectionScenario&);

  std::vector<std::uint8_t> bits_;
  double slr_m_ = 0.0;
  std::string slr_text_;  // original decimal text when parsed, else empty
};

/// Shortest decimal that reads back to the same double, with at least one
/// fractional digit: 0.5 -> "0.5", 1 -> "1.0", 1.25 -> "1.25".
std::string format_slr(double slr_m);

std::string encode_scenario(const ProtectionScenario& s);

/// Parses `[01]{olu_count}_<decimal>`. Throws ParseError naming the offending
/// character position, or LengthError when the bit run has the wrong length.
ProtectionScenario decode_scenario(std::string_view name, std::size_t olu_count);

/// Parses a bare bit string (no SLR suffix).
std::vector<std::uint8_t> parse_bits(std::string_view bits, std::size_t olu_count);

}  // namespace coastsurr
