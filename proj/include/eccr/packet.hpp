#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eccr/codec.hpp"

namespace eccr {

/// Application payload as a sequence of 8-bit symbols.
struct Payload {
    std::vector<std::uint8_t> symbols;

    [[nodiscard]] std::size_t size() const noexcept { return symbols.size(); }
    friend bool operator==(const Payload&, const Payload&) = default;
};

/// Parses space-separated decimal symbols, e.g. "72 101 108".
[[nodiscard]] Payload parse_payload(std::string_view text);
[[nodiscard]] std::string format_payload(const Payload& payload);

[[nodiscard]] Bits symbol_to_bits(std::uint8_t symbol);
[[nodiscard]] std::uint8_t bits_to_symbol(const Bits& bits);

struct EncodedPacket {
    std::string packet_id;
    std::vector<Codeword> blocks;
    CodeLayout layout;

    [[nodiscard]] std::size_t total_bits() const noexcept { return blocks.size() * layout.block_len; }
    /// Packed size of all blocks back to back.
    [[nodiscard]] std::size_t packed_bytes() const noexcept { return (total_bits() + 7) / 8; }

    friend bool operator==(const EncodedPacket&, const EncodedPacket&) = default;
};

/// One (12,8) block per symbol. Throws std::invalid_argument on an empty payload.
[[nodiscard]] EncodedPacket encode_packet(const Payload& payload, std::string packet_id = "0");

struct DecodedPacket {
    Payload payload;
    std::vector<DetectionOutcome> outcomes;
};

/// Corrects each block independently. Uncorrectable blocks yield whatever
/// symbol their data bits currently hold.
[[nodiscard]] DecodedPacket decode_packet(const EncodedPacket& packet);

}  // namespace eccr
