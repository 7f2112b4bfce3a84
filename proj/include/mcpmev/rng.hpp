#pragma once

#include <array>
#include <cstdint>

namespace mcpmev::rng {

namespace detail {
// One 10-round Philox-4x32 block. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);
}  // namespace detail

/// Counter-based random stream keyed by (seed, stream_id).
///
/// Identical (seed, stream_id) produce identical sequences on every platform;
/// distinct stream_ids give statistically independent streams. Copyable value
/// type; never share one instance mutably across threads — hand each worker
/// its own stream_id instead.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on [0,1) with 53 random bits.
    double next_double();

    /// Exponential with the given rate (> 0).
    double exponential(double rate);

    /// Sum of `shape` i.i.d. exponentials with the given rate.
    double erlang(int shape, double rate);

    /// Uniform integer in [0, n), n >= 1, rejection-sampled (unbiased).
    std::uint64_t uniform_below(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;  // empty
};

}  // namespace mcpmev::rng
