#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sedge {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the key. The 128-bit counter is split into a 64-bit
/// block index (low words) and a 64-bit stream id (high words), so every
/// (seed, stream) pair addresses an independent, reproducible sequence.
/// Stream ids are built with `stream_id(purpose, replicate)`.
///
/// Version tag: "philox4x32-10/v1". Changing the output mapping below is a
/// breaking change for every stored experiment.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kName = "philox4x32-10/v1";

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 2) {
      refill();
    }
    return buffer_[pos_++];
  }

  /// Uniform double in (0, 1], 53 bits of resolution.
  double uniform_open0() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t block_index() const noexcept { return block_; }

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  void refill() noexcept {
    const std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const auto out = block(ctr, key_);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int pos_ = 2;
};

/// What a random stream is used for. The numeric values are part of the
/// stream-splitting contract.
enum class StreamPurpose : std::uint32_t {
  kGraph = 1,
  kLanczosStart = 2,
  kPsiSample = 3,
  kMonteCarlo = 4,
  kTest = 5,
};

constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint32_t replicate) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 32) | replicate;
}

}  // namespace sedge
