// SPDX-License-Identifier: MIT
//
// Counter-based random streams (Philox4x32-10). A stream is identified by
// (seed, stream id); draws depend only on that pair and the position in the
// stream, so work split across threads reproduces bit-for-bit.
#pragma once

#include <array>
#include <cstdint>

namespace chaosbound {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One application of the 10-round Philox4x32 bijection.
[[nodiscard]] PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Stream-id namespaces. Ids are (tag << 48) | index.
enum class StreamTag : std::uint16_t {
    mc_shard = 1,
    mc_shard_decoupled = 2,
    mc_shard_undecoupled = 3,
    multistart = 4,
    fixture = 5,
    oracle = 6,
    tetrahedral = 7,
};

[[nodiscard]] constexpr std::uint64_t make_stream_id(StreamTag tag, std::uint64_t index) noexcept {
    return (static_cast<std::uint64_t>(tag) << 48) | (index & 0xFFFF'FFFF'FFFFull);
}

class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Unit-rate exponential via -log(1 - U).
    double exponential() noexcept;
    /// Standard normal (Box-Muller, both outputs used).
    double gaussian() noexcept;
    /// +1.0 or -1.0 with equal probability.
    double sign() noexcept;

private:
    void refill() noexcept;

    PhiloxKey key_{};
    PhiloxCounter counter_{};
    PhiloxCounter block_{};
    int used_ = 4;
    double spare_gaussian_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace chaosbound
