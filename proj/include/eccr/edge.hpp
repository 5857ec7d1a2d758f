#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eccr/codec.hpp"
#include "eccr/packet.hpp"

namespace eccr {

/// Per-block group check results after local correction.
using GroupCheckResult = std::vector<Syndrome>;

/// What one base station forwards to the cloud for one packet.
struct ErrorReport {
    std::string receiver_id;
    std::string packet_id;
    CodeLayout layout;
    std::vector<Codeword> blocks;  // after local correction
    std::vector<DetectionOutcome> outcomes;
    GroupCheckResult group_results;

    [[nodiscard]] std::size_t block_count() const noexcept { return blocks.size(); }

    friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

/// Runs detection and single-bit correction on every block of a received packet.
[[nodiscard]] ErrorReport receive(const EncodedPacket& received, std::string receiver_id);

/// True iff some block could not be corrected locally.
[[nodiscard]] bool should_report(const ErrorReport& report) noexcept;

/// Symbols currently carried by the report's blocks.
[[nodiscard]] Payload report_payload(const ErrorReport& report);

/// Checks the structural invariants; throws std::invalid_argument.
void validate_report(const ErrorReport& report);

// JSON lines: {"receiver_id","packet_id","blocks":[hex],"outcomes":[{kind,position?}],
// "group_flags":[bits]}. "data_bits" is added only for layouts other than (12,8).
[[nodiscard]] std::string to_json_line(const ErrorReport& report);
/// Throws std::invalid_argument on malformed or inconsistent input.
[[nodiscard]] ErrorReport report_from_json_line(std::string_view line);

// Compact binary form:
//   u8 version | u8 data_bits | u16 block count (big endian)
//   u8 len | receiver_id | u8 len | packet_id
//   blocks packed MSB-first, then one r-bit outcome code per block
// Outcome code: 0 = clean, 1..block_len = corrected position, larger = the
// uncorrectable syndrome location. Group results are recomputed on decode.
inline constexpr std::uint8_t kCompactVersion = 1;
inline constexpr std::size_t kCompactFixedHeader = 6;

[[nodiscard]] std::vector<std::uint8_t> serialize_compact(const ErrorReport& report);
[[nodiscard]] ErrorReport deserialize_compact(std::span<const std::uint8_t> bytes);

}  // namespace eccr
