#pragma once

#include <array>
#include <cstdint>

namespace viral {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A stream is identified by (seed, stream id). The 64-bit seed is the key,
// counter words 0-1 hold the block index and words 2-3 the stream id, so
// distinct (seed, stream) pairs never share a counter and any stream can be
// positioned without generating its prefix.
using PhiloxBlock = std::array<std::uint32_t, 4>;

inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += W0;
      key[1] += W1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  // Uniform in (0, 1) at 2^-32 resolution; never returns 0 or 1.
  double uniform() { return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform53() {
    const std::uint64_t hi = next_u32() >> 5, lo = next_u32() >> 6;
    return static_cast<double>((hi << 26) | lo) * 0x1p-53;
  }

  // True with probability p, at 2^-32 resolution.
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill() {
    buf_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                         key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  PhiloxBlock buf_{};
  int pos_ = 4;
};

// Substreams of a run seed.
inline constexpr std::uint64_t kDynamicsStream = 0;
inline constexpr std::uint64_t kPositionStream = 1;
// Continuation of a run past its horizon.
inline constexpr std::uint64_t kExtensionStream = std::uint64_t{1} << 32;

inline std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) { return base_seed ^ run_index; }

}  // namespace viral
