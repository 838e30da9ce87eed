// Copyright 2026 The wass-smooth Authors
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

#ifndef WASS_SMOOTH_RNG_HPP_
#define WASS_SMOOTH_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace wass_smooth {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/*
 * Identifies one independent random stream. Every random draw in the
 * library is a pure function of an RngStream value: the Philox key is the
 * seed, and the upper half of the 128-bit counter is the stream id, so
 * distinct stream ids never share counter space.
 *
 * Child streams are derived as
 *   substream(i).stream_id = splitmix64(stream_id * phi64 + i + 1)
 * with the seed unchanged.
 */
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream substream(std::uint64_t index) const {
    return {seed, splitmix64(stream_id * 0x9E3779B97F4A7C15ULL + index + 1)};
  }

  friend bool operator==(const RngStream &, const RngStream &) = default;
};

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxEngine(const RngStream &stream)
      : key_{static_cast<std::uint32_t>(stream.seed),
             static_cast<std::uint32_t>(stream.seed >> 32)},
        stream_{static_cast<std::uint32_t>(stream.stream_id),
                static_cast<std::uint32_t>(stream.stream_id >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (used_ >= 2) {
      refill();
    }
    const auto lo = block_[2 * used_];
    const auto hi = block_[2 * used_ + 1];
    ++used_;
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block philox4x32_10(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53U, ctr[0], hi0, lo0);
      mulhilo(0xCD9E8D57U, ctr[2], hi1, lo1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9U;
      key[1] += 0xBB67AE85U;
    }
    return ctr;
  }

  /// Uniform index in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift; the bias is below 2^-64 * n and irrelevant here.
    const unsigned __int128 product =
        static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi,
                      std::uint32_t &lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
  }

  void refill() {
    block_ = philox4x32_10({static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32),
                            stream_[0], stream_[1]},
                           key_);
    ++counter_;
    used_ = 0;
  }

  Key key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint64_t counter_ = 0;
  Block block_{};
  int used_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wass_smooth

#endif  // WASS_SMOOTH_RNG_HPP_
