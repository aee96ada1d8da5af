// Copyright 2026 The pdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDP_RNG_HPP_
#define PDP_RNG_HPP_

#include <cstdint>

namespace pdp {

namespace detail {

// SplitMix64 finalizer. Bijective on uint64, passes standard statistical
// batteries when driven by a Weyl sequence.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic splittable random stream. A stream is identified by
// (seed, derivation path); the path is folded into a 64-bit key one
// substream index at a time, so equal (seed, path) always reproduces the
// same draw sequence and distinct paths give independent-quality streams.
// Substream derivation reads only the key, never the draw counter: deriving
// children is pure and does not disturb the parent's sequence.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed)
      : key_(detail::mix64(detail::mix64(seed) ^ kSeedDomain)) {}

  // Stream for path extended by `index`.
  [[nodiscard]] RngStream substream(std::uint64_t index) const {
    return RngStream(detail::mix64(key_ ^ detail::mix64(index ^ kPathDomain)),
                     FromKey{});
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + kDraw * ++counter_); }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in the open interval (0, 1).
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  struct FromKey {};
  RngStream(std::uint64_t key, FromKey) : key_(key) {}

  static constexpr std::uint64_t kSeedDomain = 0x5851f42d4c957f2dULL;
  static constexpr std::uint64_t kPathDomain = 0x14057b7ef767814fULL;
  static constexpr std::uint64_t kDraw = 0x2545f4914f6cdd1dULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pdp

#endif  // PDP_RNG_HPP_
