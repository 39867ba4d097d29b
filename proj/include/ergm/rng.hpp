#pragma once

#include <cstdint>

namespace ergm {

/// Counter-based random stream built on the splitmix64 finalizer.
/// Identical (master_seed, stream_id) pairs reproduce identical draws;
/// distinct stream_ids give streams with unrelated seeds.
class RngStream {
public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : state_(mix(master_seed ^ mix(stream_id ^ 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform on [0, bound). Plain modulo: bias is < bound/2^64 and the
  /// draw count per call is fixed at one, which the coupling code relies on.
  std::uint64_t uniform_index(std::uint64_t bound) {
    return next_u64() % bound;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace ergm
