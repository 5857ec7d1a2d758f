#include "eccr/cloud.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "eccr/errors.hpp"
#include "json.hpp"

namespace eccr {

namespace {

void check_compatible(std::span<const ErrorReport> reports) {
    if (reports.empty()) throw AggregationError("no reports to combine");
    const auto& first = reports.front();
    if (first.layout.data_bits > 8) throw AggregationError("symbols wider than 8 bits are not supported");
    std::set<std::string_view> seen;
    for (const auto& r : reports) {
        if (r.packet_id != first.packet_id) {
            throw AggregationError("packet_id mismatch: '" + r.packet_id + "' vs '" + first.packet_id + "'");
        }
        if (r.block_count() != first.block_count()) {
            throw AggregationError("block count mismatch for packet " + r.packet_id + ": " +
                                   std::to_string(r.block_count()) + " vs " + std::to_string(first.block_count()));
        }
        if (r.layout != first.layout) throw AggregationError("layout mismatch for packet " + r.packet_id);
        if (r.outcomes.size() != r.block_count() || r.group_results.size() != r.block_count()) {
            throw AggregationError("report from " + r.receiver_id + " is not well formed");
        }
        if (!seen.insert(r.receiver_id).second) {
            throw AggregationError("duplicate receiver_id '" + r.receiver_id + "'");
        }
    }
}

std::vector<std::size_t> by_receiver_id(std::span<const ErrorReport> reports) {
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return reports[a].receiver_id < reports[b].receiver_id; });
    return order;
}

}  // namespace

int block_weight(const Syndrome& group_result) {
    const auto total = group_result.group_flags.size();
    if (total == 0) return 100;
    const auto passing = static_cast<std::size_t>(
        std::count(group_result.group_flags.begin(), group_result.group_flags.end(), false));
    return static_cast<int>(100 * passing / total);
}

SymbolWeights assign_weights(const ErrorReport& report) {
    SymbolWeights out;
    out.weights.reserve(report.group_results.size());
    for (const auto& g : report.group_results) out.weights.push_back(block_weight(g));
    return out;
}

RecoveredPacket weighted_vote(std::span<const ErrorReport> reports) {
    check_compatible(reports);
    const auto order = by_receiver_id(reports);

    std::vector<Payload> values;
    std::vector<SymbolWeights> weights;
    RecoveredPacket out;
    out.packet_id = reports.front().packet_id;
    for (auto i : order) {
        values.push_back(report_payload(reports[i]));
        weights.push_back(assign_weights(reports[i]));
        out.contributors.push_back(reports[i].receiver_id);
    }

    struct Candidate {
        std::uint8_t value;
        int score;
        std::size_t votes;
        std::size_t first;  // rank of the lowest receiver_id proposing it
    };

    const std::size_t n_blocks = reports.front().block_count();
    out.payload.symbols.reserve(n_blocks);
    out.confidence.reserve(n_blocks);
    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < n_blocks; ++k) {
        candidates.clear();
        for (std::size_t r = 0; r < values.size(); ++r) {
            const auto v = values[r].symbols[k];
            auto it = std::find_if(candidates.begin(), candidates.end(), [v](const auto& c) { return c.value == v; });
            if (it == candidates.end()) {
                candidates.push_back({v, weights[r].weights[k], 1, r});
            } else {
                it->score += weights[r].weights[k];
                ++it->votes;
            }
        }
        // Candidates are in receiver_id order, so max_element keeps the
        // lowest receiver on a full tie. With all weights zero every score
        // is zero and the vote count decides.
        const auto best = std::max_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.score != b.score) return a.score < b.score;
            if (a.votes != b.votes) return a.votes < b.votes;
            return a.first > b.first;
        });
        out.payload.symbols.push_back(best->value);
        out.confidence.push_back(best->score);
    }
    return out;
}

Recovery recover(std::string_view packet_id, std::span<const ErrorReport> reports) {
    if (reports.empty()) throw AggregationError("no reports for packet " + std::string(packet_id));
    check_compatible(reports);
    if (reports.front().packet_id != packet_id) {
        throw AggregationError("reports belong to packet '" + reports.front().packet_id + "', not '" +
                               std::string(packet_id) + "'");
    }
    const bool flagged = std::any_of(reports.begin(), reports.end(), [](const auto& r) { return should_report(r); });
    // Locally clean copies that disagree mean some station miscorrected.
    bool disagree = false;
    if (!flagged && reports.size() > 1) {
        const auto first = report_payload(reports.front());
        disagree = std::any_of(reports.begin() + 1, reports.end(),
                               [&](const auto& r) { return report_payload(r) != first; });
    }
    if (flagged || disagree) {
        return {weighted_vote(reports), RecoveryPath::voted};
    }
    const auto& first = reports[by_receiver_id(reports).front()];
    return {RecoveredPacket{first.packet_id, report_payload(first), assign_weights(first).weights, {first.receiver_id}},
            RecoveryPath::pass_through};
}

std::string to_json_line(const RecoveredPacket& packet) {
    nlohmann::ordered_json j;
    j["packet_id"] = packet.packet_id;
    j["payload"] = packet.payload.symbols;
    j["confidence"] = packet.confidence;
    j["contributors"] = packet.contributors;
    return j.dump();
}

ReportAggregator::ReportAggregator(std::size_t receivers_per_packet) : receivers_per_packet_(receivers_per_packet) {
    if (receivers_per_packet == 0) throw std::invalid_argument("receivers_per_packet must be at least 1");
}

std::optional<Recovery> ReportAggregator::submit(ErrorReport report) {
    std::vector<ErrorReport> complete;
    {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = groups_.try_emplace(report.packet_id);
        if (inserted) it->second.arrival = next_arrival_++;
        it->second.reports.push_back(std::move(report));
        if (it->second.reports.size() < receivers_per_packet_) return std::nullopt;
        complete = std::move(it->second.reports);
        groups_.erase(it);
    }
    const std::string id = complete.front().packet_id;
    return recover(id, complete);
}

std::vector<Recovery> ReportAggregator::flush() {
    std::vector<Group> groups;
    {
        std::lock_guard lock(mutex_);
        for (auto& [id, g] : groups_) groups.push_back(std::move(g));
        groups_.clear();
    }
    std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.arrival < b.arrival; });
    std::vector<Recovery> out;
    out.reserve(groups.size());
    for (auto& g : groups) out.push_back(recover(g.reports.front().packet_id, g.reports));
    return out;
}

std::size_t ReportAggregator::pending() const {
    std::lock_guard lock(mutex_);
    return groups_.size();
}

}  // namespace eccr
