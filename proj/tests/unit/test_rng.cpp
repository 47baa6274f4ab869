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

#include <doctest.h>

#include <set>

#include "braggsim/rng.hpp"

using braggsim::Philox4x32;
using braggsim::UniformStream;

// Known-answer vectors published with the Random123 library.
TEST_CASE("philox4x32-10 reproduces the Random123 known answers") {
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform streams are keyed by seed, trajectory and auxiliary index") {
  UniformStream a(42, 3, 1), b(42, 3, 1), c(42, 4, 1), d(42, 3, 2), e(43, 3, 1);
  std::set<double> seen;
  for (int k = 0; k < 1000; ++k) {
    const double x = a.next();
    CHECK(x == b.next());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    seen.insert(x);
    CHECK(x != c.next());
    CHECK(x != d.next());
    CHECK(x != e.next());
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("two variates per block") {
  UniformStream s(7, 0, 0);
  CHECK(s.blocks_drawn() == 0);
  s.next();
  CHECK(s.blocks_drawn() == 1);
  s.next();
  CHECK(s.blocks_drawn() == 1);
  s.next();
  CHECK(s.blocks_drawn() == 2);
}

TEST_CASE("uniform stream moments") {
  UniformStream s(2026, 11, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = s.next();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.005));
  CHECK(sq / n - mean * mean == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}
