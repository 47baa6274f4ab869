// Copyright 2026 The braggsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based uniform streams. Every trajectory draws from a stream keyed by
// (seed, trajectory index, auxiliary index), so results never depend on which
// worker runs which trajectory.

#ifndef BRAGGSIM_RNG_HPP
#define BRAGGSIM_RNG_HPP

#include <array>
#include <cstdint>

namespace braggsim {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Stream of doubles in [0, 1) for one (seed, trajectory, aux) triple.
/// Two variates come out of every Philox block.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t aux)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trajectory_(trajectory),
        aux_(aux) {}

  double next() {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
  }

  std::uint64_t blocks_drawn() const { return block_; }

 private:
  void refill() {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32), trajectory_, aux_};
    const auto out = Philox4x32::generate(ctr, key_);
    ++block_;
    const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    buffer_[0] = static_cast<double>(w0 >> 11) * 0x1.0p-53;
    buffer_[1] = static_cast<double>(w1 >> 11) * 0x1.0p-53;
    buffered_ = 2;
  }

  Philox4x32::Key key_;
  std::uint32_t trajectory_;
  std::uint32_t aux_;
  std::uint64_t block_ = 0;
  std::array<double, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace braggsim

#endif  // BRAGGSIM_RNG_HPP
