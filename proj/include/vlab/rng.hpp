#pragma once

#include <array>
#include <cstdint>

namespace vlab {

std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Counter-based stream keyed by (seed, replica, step); any position can be
// materialized independently, so parallel replicas never share state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replica, std::uint64_t step, std::uint32_t lane = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // uniform on the open interval (0,1)
  double uniform();
  double normal();
  double exponential();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace vlab
