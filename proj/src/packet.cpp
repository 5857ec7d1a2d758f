#include "eccr/packet.hpp"

#include <charconv>
#include <stdexcept>

namespace eccr {

Payload parse_payload(std::string_view text) {
    Payload out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
        if (i == text.size()) break;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' && text[j] != '\r') ++j;
        const std::string_view token = text.substr(i, j - i);
        unsigned value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size() || value > 255) {
            throw std::invalid_argument("invalid symbol '" + std::string(token) + "' (expected 0..255)");
        }
        out.symbols.push_back(static_cast<std::uint8_t>(value));
        i = j;
    }
    return out;
}

std::string format_payload(const Payload& payload) {
    std::string out;
    for (std::size_t i = 0; i < payload.symbols.size(); ++i) {
        if (i) out.push_back(' ');
        out += std::to_string(payload.symbols[i]);
    }
    return out;
}

Bits symbol_to_bits(std::uint8_t symbol) {
    Bits bits(8);
    for (std::size_t i = 0; i < 8; ++i) bits[i] = (symbol >> (7 - i)) & 1U;
    return bits;
}

std::uint8_t bits_to_symbol(const Bits& bits) {
    if (bits.size() > 8) {
        throw std::invalid_argument("symbol wider than 8 bits");
    }
    unsigned v = 0;
    for (auto b : bits) v = (v << 1) | (b & 1U);
    return static_cast<std::uint8_t>(v);
}

EncodedPacket encode_packet(const Payload& payload, std::string packet_id) {
    if (payload.symbols.empty()) {
        throw std::invalid_argument("payload must not be empty");
    }
    EncodedPacket out{std::move(packet_id), {}, symbol_layout()};
    out.blocks.reserve(payload.size());
    for (auto s : payload.symbols) {
        out.blocks.push_back(encode_block(symbol_to_bits(s), out.layout));
    }
    return out;
}

DecodedPacket decode_packet(const EncodedPacket& packet) {
    DecodedPacket out;
    out.payload.symbols.reserve(packet.blocks.size());
    out.outcomes.reserve(packet.blocks.size());
    for (const auto& block : packet.blocks) {
        auto det = detect_and_correct(block, packet.layout);
        out.payload.symbols.push_back(bits_to_symbol(extract_data(det.codeword, packet.layout)));
        out.outcomes.push_back(std::move(det.outcome));
    }
    return out;
}

}  // namespace eccr
