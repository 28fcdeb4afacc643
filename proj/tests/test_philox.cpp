#include <doctest.h>

#include <cmath>
#include <set>

#include "viral/philox.hpp"

using namespace viral;

// Known-answer vectors of the Random123 distribution for philox4x32-10.
TEST_CASE("philox known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("stream layout") {
  const std::uint64_t seed = 0x0123456789abcdefull;
  PhiloxStream s(seed, 7);
  const auto block0 = philox4x32_10({0, 0, 7, 0}, {0x89abcdefu, 0x01234567u});
  for (int i = 0; i < 4; ++i) CHECK(s.next_u32() == block0[i]);
  const auto block1 = philox4x32_10({1, 0, 7, 0}, {0x89abcdefu, 0x01234567u});
  CHECK(s.next_u32() == block1[0]);
  CHECK(s.blocks_used() == 2);
}

TEST_CASE("streams and seeds differ") {
  std::set<std::uint32_t> first;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (std::uint64_t stream : {kDynamicsStream, kPositionStream, kExtensionStream}) {
      PhiloxStream s(seed, stream);
      first.insert(s.next_u32());
    }
  CHECK(first.size() == 150);
  CHECK(run_seed(10, 3) == (10u ^ 3u));
}

TEST_CASE("uniform moments and range") {
  PhiloxStream s(42, 0);
  const int N = 400000;
  double m1 = 0.0, m2 = 0.0, m53 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    m1 += u;
    m2 += u * u;
    const double v = s.uniform53();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    m53 += v;
  }
  m1 /= N;
  m2 /= N;
  m53 /= N;
  // 5 standard errors.
  CHECK(std::abs(m1 - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / N));
  CHECK(std::abs(m2 - 1.0 / 3.0) < 5.0 * std::sqrt(4.0 / 45.0 / N));
  CHECK(std::abs(m53 - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / N));
}
