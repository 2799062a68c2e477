#pragma once

#include <cstdint>

namespace entroscale {

// Counter-based stream: Philox4x32-10 keyed by (seed, stream_id).
// Identical (seed, stream_id, draw index) always yields the identical value,
// independent of what other streams did, which is what makes parallel trial
// reductions reproducible. split(child) derives an unrelated child stream
// without consuming any state from the parent.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    RngStream split(std::uint64_t child) const;

    std::uint64_t next_u64();
    // [0, 1), 53-bit mantissa.
    double next_uniform();
    // (0, 1]; safe to feed into log().
    double next_open_uniform();
    // Standard normal via Box-Muller; one spare cached per pair.
    double next_gaussian();

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_index_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int block_pos_ = 4; // 4 == empty, refill on next draw
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace entroscale
