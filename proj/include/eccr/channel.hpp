#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eccr/packet.hpp"

namespace eccr {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;
[[nodiscard]] std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) noexcept;
/// Independent stream per (seed, receiver, packet).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::string_view receiver_id,
                                        std::string_view packet_id) noexcept;

struct BitRef {
    std::size_t block = 0;     // 0-based block index
    std::size_t position = 0;  // 1-based position inside the block

    friend auto operator<=>(const BitRef&, const BitRef&) = default;
};

struct CorruptionMask {
    std::set<BitRef> flipped_bits;

    [[nodiscard]] bool empty() const noexcept { return flipped_bits.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return flipped_bits.size(); }
    [[nodiscard]] std::set<std::size_t> touched_blocks() const;

    friend bool operator==(const CorruptionMask&, const CorruptionMask&) = default;
};

[[nodiscard]] CorruptionMask mask_union(std::span<const CorruptionMask> masks);

/// Flips every bit in the mask. Throws std::out_of_range if a bit lies outside the packet.
[[nodiscard]] EncodedPacket apply_mask(const EncodedPacket& packet, const CorruptionMask& mask);

struct BurstSpec {
    std::size_t burst_len_bits = 1;
    std::size_t bursts_per_packet = 1;
    double flip_probability = 1.0;

    /// Throws std::invalid_argument when out of range.
    void validate() const;

    friend bool operator==(const BurstSpec&, const BurstSpec&) = default;
};

struct ReceiverScenario {
    std::string receiver_id;
    BurstSpec burst;
    std::uint64_t rng_seed = 0;
};

struct Corrupted {
    EncodedPacket packet;
    CorruptionMask mask;
};

/// Windows of burst_len_bits placed uniformly over the packet's bit span
/// (clamped to the packet length); each bit inside a window flips with
/// flip_probability. Overlapping windows flip a bit once.
[[nodiscard]] Corrupted apply_burst(const EncodedPacket& packet, const BurstSpec& spec, std::uint64_t seed);

struct BlockRegion {
    std::size_t first_block = 0;
    std::size_t block_count = 0;

    friend bool operator==(const BlockRegion&, const BlockRegion&) = default;
};

/// Places contiguous, pairwise disjoint runs of the given sizes at random
/// positions in [0, total_blocks). Output order matches `sizes`.
/// Throws InfeasibleScenario when the sizes do not fit.
[[nodiscard]] std::vector<BlockRegion> place_regions(std::size_t total_blocks, std::span<const std::size_t> sizes,
                                                     Rng& rng);

/// Block-level corruption for n receivers. Each receiver corrupts
/// corrupt_fraction of the blocks (randomized rounding); a shared run of
/// round(overlap_fraction * count) blocks is common to all receivers and the
/// rest are private, disjoint runs. Inside a corrupted block each bit flips
/// with probability 1/2, with at least one flip per block.
[[nodiscard]] std::vector<CorruptionMask> disjoint_masks(const EncodedPacket& packet, std::size_t n_receivers,
                                                         double corrupt_fraction, double overlap_fraction,
                                                         std::uint64_t seed);

/// Worst-case number of blocks a single burst window can touch.
[[nodiscard]] std::size_t burst_block_span(std::size_t burst_len_bits, std::size_t block_len,
                                           std::size_t total_blocks) noexcept;

/// Throws InfeasibleScenario if n receivers' bursts cannot always be kept block-disjoint.
void check_burst_feasible(std::size_t total_blocks, std::size_t block_len, std::size_t n_receivers,
                          const BurstSpec& spec, double overlap_fraction);

/// Burst windows per receiver, each inside its own block region. With
/// probability overlap_fraction a window lands in a zone shared by all
/// receivers instead of a private one, so overlap_fraction = 0 gives
/// block-disjoint corruption across receivers.
[[nodiscard]] std::vector<CorruptionMask> receiver_bursts(const EncodedPacket& packet, std::size_t n_receivers,
                                                          const BurstSpec& spec, double overlap_fraction,
                                                          std::uint64_t seed);

}  // namespace eccr
