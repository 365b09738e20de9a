#include "npz/rng.hpp"

#include <cmath>
#include <numbers>

#include "npz/error.hpp"

namespace npz {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t root_seed, std::uint32_t path_id, Channel channel)
    : RngStream(root_seed, path_id, static_cast<std::uint32_t>(channel)) {}

RngStream::RngStream(std::uint64_t root_seed, std::uint32_t path_id, std::uint32_t channel_tag)
    : seed_(root_seed), path_(path_id), channel_(channel_tag) {}

std::array<std::uint32_t, 4> RngStream::draw_block() {
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(block_),
                                           static_cast<std::uint32_t>(block_ >> 32), path_,
                                           channel_};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                           static_cast<std::uint32_t>(seed_ >> 32)};
    ++block_;
    return philox4x32(ctr, key);
}

std::uint64_t RngStream::next_u64() {
    if (u64_left_ == 0) {
        const auto b = draw_block();
        u64_buf_[0] = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
        u64_buf_[1] = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
        u64_left_ = 2;
    }
    return u64_buf_[2 - u64_left_--];
}

double RngStream::next_uniform() { return to_open_unit(next_u64()); }

double RngStream::next_normal() {
    if (has_normal_) {
        has_normal_ = false;
        return normal_buf_;
    }
    const auto b = draw_block();
    const double u1 = to_open_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(b[3]) << 32) | b[2]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    normal_buf_ = r * std::sin(phi);
    has_normal_ = true;
    return r * std::cos(phi);
}

double RngStream::next_gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw PreconditionError("gamma shape must be positive and finite");
    }
    if (shape < 1.0) {
        // Boost: G(a) = G(a + 1) * U^(1/a)
        const double g = next_gamma(shape + 1.0);
        return g * std::pow(next_uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_uniform();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace npz
