#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

namespace seqgap {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based random stream. The state is (key, stream id, block counter);
// two streams with different ids never share counter blocks, and split()
// derives child streams without touching the parent's position. A stream is
// a plain value: copy it to replay, and hand each thread its own.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  // Independent child stream number `index`; deterministic in (this stream's
  // key and id, index) and independent of how much of this stream was used.
  RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_pos();
  // Uniform integer in [0, bound); bound > 0. Unbiased.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller; caches the second variate.
  double gaussian();
  // +1 or -1 with equal probability.
  double sign();

  std::uint64_t seed_key() const { return key_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned buffered_ = 0;
  std::optional<double> spare_gaussian_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace seqgap
