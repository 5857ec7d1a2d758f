#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eccr/codec.hpp"
#include "eccr/edge.hpp"
#include "eccr/packet.hpp"

namespace eccr::test {

inline const Payload& hello_world() {
    static const Payload p = parse_payload("72 101 108 108 111 32 87 111 114 108 100 33");
    return p;
}

inline Bits random_bits(std::size_t n, std::mt19937_64& rng) {
    Bits out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 1U);
    return out;
}

inline Payload random_payload(std::size_t n, std::mt19937_64& rng) {
    Payload p;
    p.symbols.resize(n);
    for (auto& s : p.symbols) s = static_cast<std::uint8_t>(rng() & 0xFFU);
    return p;
}

/// A (12,8) block that extracts to `symbol` but fails all four groups
/// (every checking bit inverted, syndrome location 15).
inline Codeword all_groups_failing(std::uint8_t symbol) {
    Codeword cw = encode_block(symbol_to_bits(symbol), symbol_layout());
    for (auto p : symbol_layout().parity_positions) cw.flip(p);
    return cw;
}

/// Report for a received payload where the listed blocks fail every group
/// and the rest are clean.
inline ErrorReport report_with_failures(const std::string& receiver, const std::string& packet_id,
                                        const Payload& received, const std::vector<std::size_t>& failing) {
    EncodedPacket pkt = encode_packet(received, packet_id);
    for (auto i : failing) pkt.blocks[i] = all_groups_failing(received.symbols[i]);
    return receive(pkt, receiver);
}

// The three received copies of "Hello World!" with disjoint corrupted runs.
inline const Payload& lab_copy() {
    static const Payload p = parse_payload("74 86 111 108 111 32 87 111 114 108 100 33");
    return p;
}
inline const Payload& hallway_copy() {
    static const Payload p = parse_payload("72 101 108 108 111 32 87 111 98 108 117 49");
    return p;
}
inline const Payload& library_copy() {
    static const Payload p = parse_payload("72 101 108 108 105 119 32 78 114 108 100 33");
    return p;
}

/// Corrupted runs weigh 0, clean runs 100.
inline std::vector<ErrorReport> voting_example_reports() {
    return {report_with_failures("lab", "hello", lab_copy(), {0, 1, 2}),
            report_with_failures("hallway", "hello", hallway_copy(), {8, 9, 10, 11}),
            report_with_failures("library", "hello", library_copy(), {4, 5, 6, 7})};
}

/// Same copies, but the first three symbols weigh 0 at every receiver.
inline std::vector<ErrorReport> voting_example_reports_zero_head() {
    return {report_with_failures("lab", "hello", lab_copy(), {0, 1, 2}),
            report_with_failures("hallway", "hello", hallway_copy(), {0, 1, 2, 8, 9, 10, 11}),
            report_with_failures("library", "hello", library_copy(), {0, 1, 2, 4, 5, 6, 7})};
}

}  // namespace eccr::test
