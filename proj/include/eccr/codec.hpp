#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eccr {

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Geometry of a checking-code block.
///
/// Positions are 1-based. Checking bits sit at the powers of two; group k
/// (0-based here, G_{k+1} in the usual notation) holds every position whose
/// binary representation has bit k set.
struct CodeLayout {
    std::size_t data_bits = 0;
    std::size_t check_bits = 0;
    std::size_t block_len = 0;
    std::vector<std::size_t> parity_positions;
    std::vector<std::size_t> data_positions;
    std::vector<std::vector<std::size_t>> groups;

    [[nodiscard]] bool is_parity(std::size_t position) const noexcept;

    friend bool operator==(const CodeLayout&, const CodeLayout&) = default;
};

/// Smallest r with 2^r >= m + r + 1. Throws std::invalid_argument for m == 0.
[[nodiscard]] CodeLayout derive_layout(std::size_t data_bits);

/// The (12,8) layout used for one 8-bit payload symbol.
[[nodiscard]] const CodeLayout& symbol_layout();

class Codeword {
public:
    Codeword() = default;
    explicit Codeword(std::size_t length) : bits_(length, 0) {}
    explicit Codeword(Bits bits);

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool bit(std::size_t position) const;
    void set(std::size_t position, bool value);
    void flip(std::size_t position);
    [[nodiscard]] const Bits& bits() const noexcept { return bits_; }

    /// XOR of the 1-based positions holding a one.
    [[nodiscard]] std::uint64_t position_xor() const noexcept;

    /// MSB-first packing, final byte zero-padded, lowercase hex.
    [[nodiscard]] std::string to_hex() const;
    [[nodiscard]] static Codeword from_hex(std::string_view hex, std::size_t length);

    /// Packs into `out` starting at bit offset `bit_offset` (MSB-first).
    void pack_into(std::span<std::uint8_t> out, std::size_t bit_offset) const;
    [[nodiscard]] static Codeword unpack_from(std::span<const std::uint8_t> in, std::size_t bit_offset,
                                              std::size_t length);

    friend bool operator==(const Codeword&, const Codeword&) = default;

private:
    void check_position(std::size_t position) const;

    Bits bits_;
};

struct Syndrome {
    std::vector<bool> group_flags;  // true = group parity failed
    std::uint64_t location = 0;

    [[nodiscard]] bool clean() const noexcept { return location == 0; }
    /// Group 1 leftmost, '1' = failed.
    [[nodiscard]] std::string to_bit_string() const;
    [[nodiscard]] static Syndrome from_flags(std::vector<bool> flags);
    [[nodiscard]] static Syndrome from_bit_string(std::string_view text);

    friend bool operator==(const Syndrome&, const Syndrome&) = default;
};

struct Clean {
    friend bool operator==(const Clean&, const Clean&) = default;
};
struct CorrectedSingle {
    std::size_t position = 0;
    friend bool operator==(const CorrectedSingle&, const CorrectedSingle&) = default;
};
struct Uncorrectable {
    Syndrome syndrome;
    friend bool operator==(const Uncorrectable&, const Uncorrectable&) = default;
};

using DetectionOutcome = std::variant<Clean, CorrectedSingle, Uncorrectable>;

[[nodiscard]] inline bool is_uncorrectable(const DetectionOutcome& o) noexcept {
    return std::holds_alternative<Uncorrectable>(o);
}

[[nodiscard]] std::string describe(const DetectionOutcome& outcome);

[[nodiscard]] Codeword encode_block(std::span<const std::uint8_t> data, const CodeLayout& layout);
[[nodiscard]] Syndrome compute_syndrome(const Codeword& cw, const CodeLayout& layout);

struct Detection {
    Codeword codeword;
    DetectionOutcome outcome;
};

/// Location 0 is clean, 1..block_len is trusted as a single-bit error and
/// flipped back, anything larger is left untouched and flagged.
[[nodiscard]] Detection detect_and_correct(const Codeword& cw, const CodeLayout& layout);

[[nodiscard]] Bits extract_data(const Codeword& cw, const CodeLayout& layout);

}  // namespace eccr
