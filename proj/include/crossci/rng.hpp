#ifndef CROSSCI_RNG_HPP
#define CROSSCI_RNG_HPP

#include <array>
#include <cstdint>

namespace crossci {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
/// A (key, counter) pair maps to four 32-bit words; distinct counters
/// give independent outputs, so parallel replications can simply use
/// disjoint stream ids without sharing state.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);
};

/// Buffered stream over Philox blocks. Counter layout:
/// words 0..1 = block index, words 2..3 = stream id; key = seed.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform deviate in the open interval (0, 1), 53-bit resolution.
  double uniform01();

  /// Standard normal deviate via the inverse CDF, so the mapping from
  /// counter position to deviate is fixed across platforms.
  double normal();

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

} // namespace crossci

#endif
