#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>

#include "crossci/rng.hpp"

using namespace crossci;

namespace {
std::array<std::uint32_t, 4> ctr(std::uint32_t a, std::uint32_t b,
                                 std::uint32_t c, std::uint32_t d) {
  return {a, b, c, d};
}
} // namespace

// Known-answer vectors for philox4x32-10 (Random123 test vectors plus
// values from an independent reference implementation).
TEST_CASE("philox known-answer vectors") {
  CHECK(Philox4x32::block(ctr(0, 0, 0, 0), {0, 0}) ==
        ctr(0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u));
  CHECK(Philox4x32::block(ctr(0xffffffffu, 0xffffffffu, 0xffffffffu,
                              0xffffffffu),
                          {0xffffffffu, 0xffffffffu}) ==
        ctr(0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu));
  CHECK(Philox4x32::block(ctr(0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                              0x03707344u),
                          {0xa4093822u, 0x299f31d0u}) ==
        ctr(0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u));
  CHECK(Philox4x32::block(ctr(1, 0, 0, 0), {0, 0}) ==
        ctr(0xf8e4cca4u, 0x5cb200dbu, 0xb1a574ebu, 0x097eff67u));
  CHECK(Philox4x32::block(ctr(0xdeadbeefu, 0x12345678u, 0x9abcdef0u,
                              0x0f0f0f0fu),
                          {0xcafef00du, 0xbaadf00du}) ==
        ctr(0xc7363661u, 0xf6d32fc4u, 0xa25a0a32u, 0x0dd43e79u));
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(1234, 7), b(1234, 7), c(1234, 8), d(1235, 7);
  bool all_equal = true, differs_stream = false, differs_seed = false;
  for (int i = 0; i < 256; ++i) {
    const double va = a.uniform01();
    all_equal = all_equal && va == b.uniform01();
    differs_stream = differs_stream || va != c.uniform01();
    differs_seed = differs_seed || va != d.uniform01();
  }
  CHECK(all_equal);
  CHECK(differs_stream);
  CHECK(differs_seed);
}

TEST_CASE("uniform deviates stay inside the open unit interval") {
  RandomStream rng(99, 0);
  double mn = 1.0, mx = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  CHECK(mn > 0.0);
  CHECK(mx < 1.0);
  // mean of U(0,1): se = 1/sqrt(12 n)
  CHECK(std::fabs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("normal deviates have the right first moments") {
  RandomStream rng(2024, 3);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
