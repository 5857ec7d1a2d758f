#include "eccr/codec.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace eccr {

namespace {

void require_length(const Codeword& cw, const CodeLayout& layout) {
    if (cw.size() != layout.block_len) {
        throw std::invalid_argument("codeword length " + std::to_string(cw.size()) +
                                    " does not match block length " + std::to_string(layout.block_len));
    }
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

bool CodeLayout::is_parity(std::size_t position) const noexcept {
    return position != 0 && (position & (position - 1)) == 0;
}

CodeLayout derive_layout(std::size_t data_bits) {
    if (data_bits == 0) {
        throw std::invalid_argument("data_bits must be at least 1");
    }
    std::size_t r = 1;
    while (r < 63 && (std::uint64_t{1} << r) < data_bits + r + 1) {
        ++r;
    }
    if ((std::uint64_t{1} << r) < data_bits + r + 1) {
        throw std::invalid_argument("data_bits too large");
    }

    CodeLayout layout;
    layout.data_bits = data_bits;
    layout.check_bits = r;
    layout.block_len = data_bits + r;
    layout.groups.resize(r);
    for (std::size_t pos = 1; pos <= layout.block_len; ++pos) {
        if (layout.is_parity(pos)) {
            layout.parity_positions.push_back(pos);
        } else {
            layout.data_positions.push_back(pos);
        }
        for (std::size_t k = 0; k < r; ++k) {
            if ((pos >> k) & 1U) {
                layout.groups[k].push_back(pos);
            }
        }
    }
    return layout;
}

const CodeLayout& symbol_layout() {
    static const CodeLayout layout = derive_layout(8);
    return layout;
}

Codeword::Codeword(Bits bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
        b &= 1U;
    }
}

void Codeword::check_position(std::size_t position) const {
    if (position == 0 || position > bits_.size()) {
        throw std::out_of_range("bit position " + std::to_string(position) + " outside 1.." +
                                std::to_string(bits_.size()));
    }
}

bool Codeword::bit(std::size_t position) const {
    check_position(position);
    return bits_[position - 1] != 0;
}

void Codeword::set(std::size_t position, bool value) {
    check_position(position);
    bits_[position - 1] = value ? 1 : 0;
}

void Codeword::flip(std::size_t position) {
    check_position(position);
    bits_[position - 1] ^= 1U;
}

std::uint64_t Codeword::position_xor() const noexcept {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) acc ^= i + 1;
    }
    return acc;
}

void Codeword::pack_into(std::span<std::uint8_t> out, std::size_t bit_offset) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        const std::size_t at = bit_offset + i;
        const auto mask = static_cast<std::uint8_t>(0x80U >> (at % 8));
        if (bits_[i]) {
            out[at / 8] |= mask;
        } else {
            out[at / 8] &= static_cast<std::uint8_t>(~mask);
        }
    }
}

Codeword Codeword::unpack_from(std::span<const std::uint8_t> in, std::size_t bit_offset, std::size_t length) {
    if ((bit_offset + length + 7) / 8 > in.size()) {
        throw std::invalid_argument("packed buffer too short");
    }
    Bits bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t at = bit_offset + i;
        bits[i] = (in[at / 8] >> (7 - at % 8)) & 1U;
    }
    return Codeword(std::move(bits));
}

std::string Codeword::to_hex() const {
    std::vector<std::uint8_t> bytes((bits_.size() + 7) / 8, 0);
    pack_into(bytes, 0);
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

Codeword Codeword::from_hex(std::string_view hex, std::size_t length) {
    const std::size_t nbytes = (length + 7) / 8;
    if (hex.size() != nbytes * 2) {
        throw std::invalid_argument("hex block '" + std::string(hex) + "' must have " +
                                    std::to_string(nbytes * 2) + " digits");
    }
    std::vector<std::uint8_t> bytes(nbytes);
    for (std::size_t i = 0; i < nbytes; ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw std::invalid_argument("invalid hex digit in '" + std::string(hex) + "'");
        }
        bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    const std::size_t pad = nbytes * 8 - length;
    if (pad != 0 && (bytes.back() & ((1U << pad) - 1)) != 0) {
        throw std::invalid_argument("non-zero padding bits in '" + std::string(hex) + "'");
    }
    return unpack_from(bytes, 0, length);
}

std::string Syndrome::to_bit_string() const {
    std::string out;
    out.reserve(group_flags.size());
    for (bool f : group_flags) out.push_back(f ? '1' : '0');
    return out;
}

Syndrome Syndrome::from_flags(std::vector<bool> flags) {
    if (flags.size() > 63) {
        throw std::invalid_argument("too many groups");
    }
    Syndrome s;
    for (std::size_t k = 0; k < flags.size(); ++k) {
        if (flags[k]) s.location |= std::uint64_t{1} << k;
    }
    s.group_flags = std::move(flags);
    return s;
}

Syndrome Syndrome::from_bit_string(std::string_view text) {
    std::vector<bool> flags;
    flags.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("group flags must be a string of 0/1, got '" + std::string(text) + "'");
        }
        flags.push_back(c == '1');
    }
    return from_flags(std::move(flags));
}

std::string describe(const DetectionOutcome& outcome) {
    if (std::holds_alternative<Clean>(outcome)) return "clean";
    if (const auto* c = std::get_if<CorrectedSingle>(&outcome)) {
        return "corrected(" + std::to_string(c->position) + ")";
    }
    return "uncorrectable(" + std::to_string(std::get<Uncorrectable>(outcome).syndrome.location) + ")";
}

Codeword encode_block(std::span<const std::uint8_t> data, const CodeLayout& layout) {
    if (data.size() != layout.data_bits) {
        throw std::invalid_argument("data length " + std::to_string(data.size()) + " does not match layout data bits " +
                                    std::to_string(layout.data_bits));
    }
    Codeword cw(layout.block_len);
    for (std::size_t i = 0; i < data.size(); ++i) {
        cw.set(layout.data_positions[i], data[i] & 1U);
    }
    // Parity bit 2^k is the only parity member of group k, so setting it to
    // the XOR of the group's data members gives even parity.
    for (std::size_t k = 0; k < layout.check_bits; ++k) {
        bool parity = false;
        for (std::size_t pos : layout.groups[k]) {
            if (pos != layout.parity_positions[k]) parity ^= cw.bit(pos);
        }
        cw.set(layout.parity_positions[k], parity);
    }
    return cw;
}

Syndrome compute_syndrome(const Codeword& cw, const CodeLayout& layout) {
    require_length(cw, layout);
    std::vector<bool> flags(layout.check_bits, false);
    for (std::size_t k = 0; k < layout.check_bits; ++k) {
        bool acc = false;
        for (std::size_t pos : layout.groups[k]) acc ^= cw.bit(pos);
        flags[k] = acc;
    }
    return Syndrome::from_flags(std::move(flags));
}

Detection detect_and_correct(const Codeword& cw, const CodeLayout& layout) {
    Syndrome s = compute_syndrome(cw, layout);
    if (s.clean()) {
        return {cw, Clean{}};
    }
    if (s.location <= layout.block_len) {
        Codeword fixed = cw;
        const auto pos = static_cast<std::size_t>(s.location);
        fixed.flip(pos);
        return {std::move(fixed), CorrectedSingle{pos}};
    }
    return {cw, Uncorrectable{std::move(s)}};
}

Bits extract_data(const Codeword& cw, const CodeLayout& layout) {
    require_length(cw, layout);
    Bits out;
    out.reserve(layout.data_bits);
    for (std::size_t pos : layout.data_positions) {
        out.push_back(cw.bit(pos) ? 1 : 0);
    }
    return out;
}

}  // namespace eccr
