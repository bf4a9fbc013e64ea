#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace rwhull {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finalizer folded over the parts; used to derive child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

/// Identifies one independent stream under a master seed.
struct StreamId {
    std::uint32_t replication = 0;
    std::uint32_t walk = 0;
};

/// Counter-based stream. The 64-bit key is the master seed, the upper two
/// counter words hold the stream id and the lower two count blocks, so
/// (seed, stream, position) fixes the output on every platform.
/// Single-owner; copy it to fork an identical sequence.
class RngStream {
public:
    static constexpr std::string_view algorithm = "philox4x32-10";

    RngStream(std::uint64_t seed, StreamId id);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via the Marsaglia polar method; the second variate of
    /// each accepted pair is cached.
    double normal();

private:
    void refill();

    PhiloxKey key_{};
    PhiloxCounter counter_{};
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rwhull
