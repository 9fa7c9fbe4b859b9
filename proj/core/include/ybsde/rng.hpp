/* Copyright 2026 The youngbsde Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Stateless counter-based random numbers (Philox-4x32-10). A draw is a pure
// function of (seed, counter), so a Monte Carlo ensemble can be generated in
// any order, on any number of threads, and still be bit-identical.

#ifndef YBSDE_RNG_HPP_
#define YBSDE_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ybsde::rng {

using Block = std::array<std::uint32_t, 4>;

inline Block philox4x32(Block ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Uniform in the open interval (0, 1) with 53 random bits.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Two independent standard normals keyed by (seed, a, b, c).
/// Box-Muller on the two 53-bit uniforms of one Philox block.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t a,
                                         std::uint32_t b, std::uint32_t c) {
  const Block out = philox4x32(
      {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), b, c},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const double u1 = to_open_unit(out[0], out[1]);
  const double u2 = to_open_unit(out[2], out[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// Uniform (0,1) keyed by (seed, a, b, c).
inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint32_t b,
                      std::uint32_t c) {
  const Block out = philox4x32(
      {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), b, c},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return to_open_unit(out[0], out[1]);
}

/// Fills `out[0..n)` with standard normals for stream (seed, stream, slot).
/// Entry k uses block k/2 of that stream.
template <typename Out>
void fill_normals(std::uint64_t seed, std::uint64_t stream, std::uint32_t slot,
                  std::size_t n, Out&& out) {
  for (std::size_t k = 0; k < n; k += 2) {
    const auto z = normal_pair(seed, stream, slot, static_cast<std::uint32_t>(k / 2));
    out[k] = z[0];
    if (k + 1 < n) out[k + 1] = z[1];
  }
}

}  // namespace ybsde::rng

#endif  // YBSDE_RNG_HPP_
