// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <cmath>

#include "risleak/rng.hpp"

using namespace risleak;

TEST_CASE("substreams are deterministic and disjoint") {
  rng::Stream a(42, rng::StreamTag::Nlos, 3, 1);
  rng::Stream b(42, rng::StreamTag::Nlos, 3, 1);
  rng::Stream c(42, rng::StreamTag::Nlos, 3, 2);
  bool same = true, distinct = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same = same && (x == b.next_u64());
    distinct = distinct || (x != c.next_u64());
  }
  CHECK(same);
  CHECK(distinct);
}

TEST_CASE("uniform stays in range, normal has expected moments") {
  rng::Stream s(1, rng::StreamTag::Generic);
  double mean = 0, var = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = s.normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("complex normal is circularly symmetric with unit variance") {
  rng::Stream s(2, rng::StreamTag::Generic);
  std::complex<double> mean = 0;
  double power = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto z = s.cnormal();
    mean += z;
    power += std::norm(z);
  }
  CHECK(std::abs(mean) / n < 0.01);
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_index covers the range without bias") {
  rng::Stream s(3, rng::StreamTag::Generic);
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) counts[s.uniform_index(7)]++;
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
