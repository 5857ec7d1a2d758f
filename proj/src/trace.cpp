#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "eccr/errors.hpp"
#include "eccr/harness.hpp"
#include "json.hpp"

namespace eccr {

std::string to_json_line(const PacketRecord& record) {
    nlohmann::ordered_json j;
    j["packet_id"] = record.packet_id;
    j["payload"] = record.payload.symbols;
    return j.dump();
}

void trace_export(std::ostream& out, std::span<const TraceRecord> records) {
    for (const auto& rec : records) {
        std::visit([&](const auto& r) { out << to_json_line(r) << '\n'; }, rec);
    }
}

std::vector<TraceRecord> trace_import(std::istream& in) {
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedTrace(number, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw MalformedTrace(number, "expected a JSON object");
        try {
            if (j.contains("blocks")) {
                out.emplace_back(report_from_json_line(line));
            } else if (j.contains("payload")) {
                PacketRecord rec;
                rec.packet_id = j.at("packet_id").get<std::string>();
                for (const auto& v : j.at("payload")) {
                    const auto s = v.get<int>();
                    if (s < 0 || s > 255) throw std::invalid_argument("payload symbol out of range");
                    rec.payload.symbols.push_back(static_cast<std::uint8_t>(s));
                }
                if (rec.payload.symbols.empty()) throw std::invalid_argument("empty payload");
                out.emplace_back(std::move(rec));
            } else {
                throw std::invalid_argument("line is neither a packet nor a report");
            }
        } catch (const std::invalid_argument& e) {
            throw MalformedTrace(number, e.what());
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTrace(number, e.what());
        }
    }
    return out;
}

std::vector<TraceRecord> generate_trace(const ScenarioConfig& config) {
    config.validate();
    const bool noisy = config.burst.burst_len_bits > 0 && config.burst.bursts_per_packet > 0;
    if (noisy) {
        check_burst_feasible(config.payload_len, symbol_layout().block_len, config.n_receivers, config.burst,
                             config.overlap_fraction);
    }
    std::vector<TraceRecord> out;
    const std::uint64_t point = combine_seed(config.master_seed, config.burst.burst_len_bits);
    for (std::size_t i = 0; i < config.packets; ++i) {
        const std::uint64_t seed = combine_seed(point, i);
        Rng rng(combine_seed(seed, 0x7472616365ULL));
        std::uniform_int_distribution<int> symbol(0, 255);
        Payload payload;
        payload.symbols.resize(config.payload_len);
        for (auto& v : payload.symbols) v = static_cast<std::uint8_t>(symbol(rng));
        const auto encoded = encode_packet(payload, std::to_string(i));
        std::vector<CorruptionMask> masks(config.n_receivers);
        if (noisy) masks = receiver_bursts(encoded, config.n_receivers, config.burst, config.overlap_fraction, seed);
        out.emplace_back(PacketRecord{encoded.packet_id, payload});
        for (std::size_t r = 0; r < masks.size(); ++r) {
            out.emplace_back(receive(apply_mask(encoded, masks[r]), "rx" + std::to_string(r)));
        }
    }
    return out;
}

ReplayResult replay(std::span<const TraceRecord> records) {
    std::map<std::string, Payload, std::less<>> truth;
    std::map<std::string, std::size_t, std::less<>> index;
    std::vector<std::vector<ErrorReport>> groups;
    for (const auto& rec : records) {
        if (const auto* p = std::get_if<PacketRecord>(&rec)) {
            truth[p->packet_id] = p->payload;
            continue;
        }
        const auto& report = std::get<ErrorReport>(rec);
        auto [it, inserted] = index.try_emplace(report.packet_id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(report);
    }

    ReplayResult out;
    out.recovered.reserve(groups.size());
    for (const auto& g : groups) {
        out.recovered.push_back(recover(g.front().packet_id, g));
        if (auto t = truth.find(g.front().packet_id); t != truth.end()) {
            ++out.with_truth;
            if (out.recovered.back().packet.payload == t->second) ++out.exact;
        }
    }
    return out;
}

}  // namespace eccr
