#include "eccr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eccr/errors.hpp"

namespace eccr {

namespace {

std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void require_fraction(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must be in [0,1]");
    }
}

BitRef bit_at(std::size_t index, std::size_t block_len) {
    return {index / block_len, index % block_len + 1};
}

// Flips each bit of [start, start + len) with probability p.
void flip_window(CorruptionMask& mask, std::size_t start, std::size_t len, std::size_t block_len, double p,
                 Rng& rng) {
    if (p <= 0.0) return;
    std::bernoulli_distribution coin(p);
    for (std::size_t i = start; i < start + len; ++i) {
        if (p >= 1.0 || coin(rng)) mask.flipped_bits.insert(bit_at(i, block_len));
    }
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) noexcept {
    return mix64(seed ^ mix64(value));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view receiver_id, std::string_view packet_id) noexcept {
    return combine_seed(combine_seed(seed, fnv1a(receiver_id)), fnv1a(packet_id));
}

std::set<std::size_t> CorruptionMask::touched_blocks() const {
    std::set<std::size_t> out;
    for (const auto& b : flipped_bits) out.insert(b.block);
    return out;
}

CorruptionMask mask_union(std::span<const CorruptionMask> masks) {
    CorruptionMask out;
    for (const auto& m : masks) out.flipped_bits.insert(m.flipped_bits.begin(), m.flipped_bits.end());
    return out;
}

EncodedPacket apply_mask(const EncodedPacket& packet, const CorruptionMask& mask) {
    EncodedPacket out = packet;
    for (const auto& b : mask.flipped_bits) {
        if (b.block >= out.blocks.size()) {
            throw std::out_of_range("mask block " + std::to_string(b.block) + " outside packet");
        }
        out.blocks[b.block].flip(b.position);
    }
    return out;
}

void BurstSpec::validate() const {
    if (burst_len_bits < 1) throw std::invalid_argument("burst_len_bits must be at least 1");
    require_fraction(flip_probability, "flip_probability");
}

Corrupted apply_burst(const EncodedPacket& packet, const BurstSpec& spec, std::uint64_t seed) {
    spec.validate();
    Corrupted out{packet, {}};
    const std::size_t total = packet.total_bits();
    if (total == 0) return out;
    const std::size_t len = std::min(spec.burst_len_bits, total);
    Rng rng(mix64(seed));
    std::uniform_int_distribution<std::size_t> start_dist(0, total - len);
    for (std::size_t b = 0; b < spec.bursts_per_packet; ++b) {
        flip_window(out.mask, start_dist(rng), len, packet.layout.block_len, spec.flip_probability, rng);
    }
    out.packet = apply_mask(packet, out.mask);
    return out;
}

std::vector<BlockRegion> place_regions(std::size_t total_blocks, std::span<const std::size_t> sizes, Rng& rng) {
    const std::size_t used = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (used > total_blocks) {
        throw InfeasibleScenario("regions need " + std::to_string(used) + " blocks but the packet has " +
                                 std::to_string(total_blocks));
    }
    const std::size_t k = sizes.size();
    const std::size_t free_blocks = total_blocks - used;

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    // Stars and bars: k bar positions among free_blocks + k slots.
    std::vector<std::size_t> slots(free_blocks + k);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    std::vector<std::size_t> bars;
    bars.reserve(k);
    std::sample(slots.begin(), slots.end(), std::back_inserter(bars), k, rng);

    std::vector<BlockRegion> out(k);
    std::size_t cursor = 0;
    std::size_t prev_bar = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t gap = i == 0 ? bars[0] : bars[i] - prev_bar - 1;
        prev_bar = bars[i];
        cursor += gap;
        out[order[i]] = {cursor, sizes[order[i]]};
        cursor += sizes[order[i]];
    }
    return out;
}

std::vector<CorruptionMask> disjoint_masks(const EncodedPacket& packet, std::size_t n_receivers,
                                           double corrupt_fraction, double overlap_fraction, std::uint64_t seed) {
    if (n_receivers < 1) throw std::invalid_argument("n_receivers must be at least 1");
    require_fraction(corrupt_fraction, "corrupt_fraction");
    require_fraction(overlap_fraction, "overlap_fraction");

    const std::size_t total = packet.blocks.size();
    const double exact = corrupt_fraction * static_cast<double>(total);
    const auto worst = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    const auto blocks_needed = [&](std::size_t count) {
        const auto shared = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(count)));
        return shared + n_receivers * (count - shared);
    };
    if (blocks_needed(worst) > total) {
        throw InfeasibleScenario("cannot place " + std::to_string(n_receivers) + " receivers x " +
                                 std::to_string(worst) + " corrupted blocks with overlap " +
                                 std::to_string(overlap_fraction) + " in " + std::to_string(total) + " blocks");
    }

    Rng rng(derive_seed(seed, "", packet.packet_id));
    auto count = static_cast<std::size_t>(std::floor(exact + 1e-9));
    if (count < worst && std::bernoulli_distribution(exact - static_cast<double>(count))(rng)) {
        count = worst;
    }
    const auto shared = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(count)));

    std::vector<std::size_t> sizes{shared};
    sizes.insert(sizes.end(), n_receivers, count - shared);
    const auto regions = place_regions(total, sizes, rng);

    const std::size_t block_len = packet.layout.block_len;
    std::vector<CorruptionMask> out(n_receivers);
    for (std::size_t r = 0; r < n_receivers; ++r) {
        Rng bits_rng(derive_seed(seed, "rx" + std::to_string(r), packet.packet_id));
        std::bernoulli_distribution coin(0.5);
        std::uniform_int_distribution<std::size_t> pick(1, block_len);
        for (const auto& region : {regions[0], regions[r + 1]}) {
            for (std::size_t b = region.first_block; b < region.first_block + region.block_count; ++b) {
                bool any = false;
                for (std::size_t pos = 1; pos <= block_len; ++pos) {
                    if (coin(bits_rng)) {
                        out[r].flipped_bits.insert({b, pos});
                        any = true;
                    }
                }
                if (!any) out[r].flipped_bits.insert({b, pick(bits_rng)});
            }
        }
    }
    return out;
}

std::size_t burst_block_span(std::size_t burst_len_bits, std::size_t block_len, std::size_t total_blocks) noexcept {
    if (block_len == 0) return 0;
    const std::size_t len = std::min(burst_len_bits, total_blocks * block_len);
    return std::min(total_blocks, (block_len - 1 + len + block_len - 1) / block_len);
}

void check_burst_feasible(std::size_t total_blocks, std::size_t block_len, std::size_t n_receivers,
                          const BurstSpec& spec, double overlap_fraction) {
    spec.validate();
    require_fraction(overlap_fraction, "overlap_fraction");
    const std::size_t span = burst_block_span(spec.burst_len_bits, block_len, total_blocks);
    const std::size_t windows = n_receivers * spec.bursts_per_packet;
    const std::size_t needed = (overlap_fraction < 1.0 ? windows * span : 0) + (overlap_fraction > 0.0 ? span : 0);
    if (needed > total_blocks) {
        throw InfeasibleScenario(std::to_string(windows) + " burst windows of " +
                                 std::to_string(spec.burst_len_bits) + " bits may need " + std::to_string(needed) +
                                 " disjoint blocks but the packet has " + std::to_string(total_blocks));
    }
}

std::vector<CorruptionMask> receiver_bursts(const EncodedPacket& packet, std::size_t n_receivers,
                                            const BurstSpec& spec, double overlap_fraction, std::uint64_t seed) {
    if (n_receivers < 1) throw std::invalid_argument("n_receivers must be at least 1");
    const std::size_t total_blocks = packet.blocks.size();
    const std::size_t block_len = packet.layout.block_len;
    check_burst_feasible(total_blocks, block_len, n_receivers, spec, overlap_fraction);

    const std::size_t total_bits = total_blocks * block_len;
    const std::size_t len = std::min(spec.burst_len_bits, total_bits);
    const std::size_t max_span = burst_block_span(len, block_len, total_blocks);

    Rng rng(derive_seed(seed, "", packet.packet_id));
    std::bernoulli_distribution shared_coin(overlap_fraction);
    std::uniform_int_distribution<std::size_t> offset_dist(0, block_len - 1);

    struct Window {
        std::size_t receiver;
        bool shared;
        std::size_t offset;  // bit offset inside the region's first block
        std::size_t span;
    };
    std::vector<Window> windows;
    std::vector<std::size_t> sizes{overlap_fraction > 0.0 ? max_span : 0};
    for (std::size_t r = 0; r < n_receivers; ++r) {
        for (std::size_t b = 0; b < spec.bursts_per_packet; ++b) {
            Window w{r, shared_coin(rng), offset_dist(rng), 0};
            if (w.offset + len > max_span * block_len) w.offset = max_span * block_len - len;
            w.span = (w.offset + len + block_len - 1) / block_len;
            sizes.push_back(w.shared ? 0 : w.span);
            windows.push_back(w);
        }
    }
    const auto regions = place_regions(total_blocks, sizes, rng);

    std::vector<CorruptionMask> out(n_receivers);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        Rng bits_rng(combine_seed(derive_seed(seed, "rx" + std::to_string(w.receiver), packet.packet_id), i));
        std::size_t start = 0;
        if (w.shared) {
            const std::size_t zone_bits = regions[0].block_count * block_len;
            start = regions[0].first_block * block_len +
                    std::uniform_int_distribution<std::size_t>(0, zone_bits - len)(bits_rng);
        } else {
            start = regions[i + 1].first_block * block_len + w.offset;
        }
        flip_window(out[w.receiver], start, len, block_len, spec.flip_probability, bits_rng);
    }
    return out;
}

}  // namespace eccr
