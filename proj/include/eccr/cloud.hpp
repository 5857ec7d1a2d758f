#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eccr/edge.hpp"
#include "eccr/packet.hpp"

namespace eccr {

/// Per-symbol reliability in percent: floor(100 * passing groups / r).
struct SymbolWeights {
    std::vector<int> weights;

    friend bool operator==(const SymbolWeights&, const SymbolWeights&) = default;
};

[[nodiscard]] int block_weight(const Syndrome& group_result);
[[nodiscard]] SymbolWeights assign_weights(const ErrorReport& report);

struct RecoveredPacket {
    std::string packet_id;
    Payload payload;
    std::vector<int> confidence;  // summed weight behind each chosen symbol
    std::vector<std::string> contributors;

    friend bool operator==(const RecoveredPacket&, const RecoveredPacket&) = default;
};

/// Per symbol, the value with the largest summed weight wins. Ties, and
/// positions where every weight is zero, fall back to a plain vote count and
/// then to the value held by the lowest receiver_id.
/// Throws AggregationError if the reports disagree on packet, block count or
/// layout, or repeat a receiver_id.
[[nodiscard]] RecoveredPacket weighted_vote(std::span<const ErrorReport> reports);

enum class RecoveryPath { pass_through, voted };

struct Recovery {
    RecoveredPacket packet;
    RecoveryPath path = RecoveryPath::pass_through;
};

/// Votes when some receiver flagged an uncorrectable block or when the
/// locally decoded payloads disagree; otherwise returns the lowest
/// receiver_id's payload.
[[nodiscard]] Recovery recover(std::string_view packet_id, std::span<const ErrorReport> reports);

[[nodiscard]] std::string to_json_line(const RecoveredPacket& packet);

/// Collects reports that arrive interleaved across packets. All reports for
/// one packet_id are combined under the lock in a single step; different
/// packets can be submitted from any number of threads.
class ReportAggregator {
public:
    explicit ReportAggregator(std::size_t receivers_per_packet);

    /// Returns the recovery once the last expected report for its packet arrives.
    std::optional<Recovery> submit(ErrorReport report);

    /// Recovers every incomplete packet, in order of first arrival.
    std::vector<Recovery> flush();

    [[nodiscard]] std::size_t pending() const;

private:
    struct Group {
        std::size_t arrival = 0;
        std::vector<ErrorReport> reports;
    };

    std::size_t receivers_per_packet_;
    mutable std::mutex mutex_;
    std::map<std::string, Group, std::less<>> groups_;
    std::size_t next_arrival_ = 0;
};

}  // namespace eccr
