#pragma once

#include <array>
#include <cstdint>

namespace rffkim {

/// Philox4x32-10 block function (Salmon et al., counter-based).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Maps 64 random bits to the open interval (0, 1) with 52-bit resolution.
/// Every result is exactly representable, so 0 and 1 are never returned.
inline double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile (Wichura AS241, ~1e-16 relative accuracy).
double normal_quantile(double p);

/// Random stream addressed by (seed, stream id, position).
///
/// The 128-bit Philox counter holds the 64-bit position in the low words and
/// the stream id in the high words; the seed is the key. Two streams with
/// different (seed, stream) pairs never share a counter block.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  /// 64 random bits of block `position` (first half of the block).
  [[nodiscard]] std::uint64_t at(std::uint64_t position) const;

  std::uint64_t next_u64();
  /// Uniform on (0, 1).
  double uniform() { return open_unit(next_u64()); }
  bool bernoulli(double p) { return uniform() < p; }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }
  [[nodiscard]] std::uint64_t position() const { return position_; }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  void refill();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t position_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
};

/// Stream ids reserved for the different consumers of randomness.
namespace streams {
inline constexpr std::uint64_t kDisorder = 0x6469736f72646572ULL;  // "disorder"
inline constexpr std::uint64_t kChain = 0x636861696e000000ULL;     // "chain"
inline constexpr std::uint64_t kTrials = 0x747269616c730000ULL;    // "trials"
}  // namespace streams

}  // namespace rffkim
