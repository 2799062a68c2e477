#include "entroscale/rng.hpp"

#include <cmath>

namespace entroscale {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
    std::uint64_t p0 = std::uint64_t(kPhiloxM0) * c[0];
    std::uint64_t p1 = std::uint64_t(kPhiloxM1) * c[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    std::uint32_t n0 = hi1 ^ c[1] ^ k0;
    std::uint32_t n1 = lo1;
    std::uint32_t n2 = hi0 ^ c[3] ^ k1;
    std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}

void philox4x32_10(std::uint64_t block, std::uint64_t stream, std::uint64_t key, std::uint32_t out[4]) {
    std::uint32_t c[4] = {
        std::uint32_t(block), std::uint32_t(block >> 32),
        std::uint32_t(stream), std::uint32_t(stream >> 32)};
    std::uint32_t k0 = std::uint32_t(key);
    std::uint32_t k1 = std::uint32_t(key >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out[0] = c[0];
    out[1] = c[1];
    out[2] = c[2];
    out[3] = c[3];
}

// splitmix64 finalizer; only used to derive child stream ids.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

RngStream RngStream::split(std::uint64_t child) const {
    std::uint64_t id = mix64(stream_id_ ^ (0x9E3779B97F4A7C15ull * (child + 1)));
    return RngStream(seed_, id);
}

void RngStream::refill() {
    philox4x32_10(block_index_, stream_id_, seed_, block_);
    ++block_index_;
    block_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (block_pos_ > 2) refill();
    std::uint64_t lo = block_[block_pos_];
    std::uint64_t hi = block_[block_pos_ + 1];
    block_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::next_uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open_uniform() {
    return double((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_open_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

} // namespace entroscale
