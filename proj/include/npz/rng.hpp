#pragma once

#include <array>
#include <cstdint>

namespace npz {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Pure function of (counter, key); no hidden state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

enum class Channel : std::uint32_t { W1 = 1, W2 = 2, W3 = 3, Aux = 4 };

// Keyed stream of random draws. Key layout of the reproducibility contract:
//   philox key     = root_seed (low word, high word)
//   philox counter = (block low, block high, path_id, channel)
// where block is the index of the 128-bit block within the stream.
// Distinct (root_seed, path_id, channel) give disjoint counter ranges.
class RngStream {
public:
    RngStream(std::uint64_t root_seed, std::uint32_t path_id, Channel channel);
    RngStream(std::uint64_t root_seed, std::uint32_t path_id, std::uint32_t channel_tag);

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1) with 52-bit resolution.
    double next_uniform();
    // Standard normal via Box-Muller; each block yields two draws.
    double next_normal();
    // Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
    double next_gamma(double shape);

    std::uint64_t root_seed() const noexcept { return seed_; }
    std::uint32_t path_id() const noexcept { return path_; }
    std::uint32_t channel_tag() const noexcept { return channel_; }
    std::uint64_t blocks_used() const noexcept { return block_; }

private:
    std::array<std::uint32_t, 4> draw_block();

    std::uint64_t seed_;
    std::uint32_t path_;
    std::uint32_t channel_;
    std::uint64_t block_ = 0;

    std::array<std::uint64_t, 2> u64_buf_{};
    int u64_left_ = 0;
    double normal_buf_ = 0.0;
    bool has_normal_ = false;
};

// Converts the top 52 bits of a word into a uniform on (0, 1). With 53 bits the
// midpoint offset of the largest word would round up to exactly 1.
inline double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace npz
