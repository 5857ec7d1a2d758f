#include "eccr/edge.hpp"

#include <stdexcept>

#include "json.hpp"

namespace eccr {

namespace {

using ojson = nlohmann::ordered_json;

std::uint64_t outcome_code(const DetectionOutcome& outcome) {
    if (std::holds_alternative<Clean>(outcome)) return 0;
    if (const auto* c = std::get_if<CorrectedSingle>(&outcome)) return c->position;
    return std::get<Uncorrectable>(outcome).syndrome.location;
}

DetectionOutcome outcome_from_code(std::uint64_t code, const CodeLayout& layout) {
    if (code == 0) return Clean{};
    if (code <= layout.block_len) return CorrectedSingle{static_cast<std::size_t>(code)};
    std::vector<bool> flags(layout.check_bits);
    for (std::size_t k = 0; k < layout.check_bits; ++k) flags[k] = (code >> k) & 1U;
    return Uncorrectable{Syndrome::from_flags(std::move(flags))};
}

void append_id(std::vector<std::uint8_t>& out, const std::string& id, const char* what) {
    if (id.size() > 255) throw std::invalid_argument(std::string(what) + " longer than 255 bytes");
    out.push_back(static_cast<std::uint8_t>(id.size()));
    out.insert(out.end(), id.begin(), id.end());
}

}  // namespace

ErrorReport receive(const EncodedPacket& received, std::string receiver_id) {
    ErrorReport report{std::move(receiver_id), received.packet_id, received.layout, {}, {}, {}};
    report.blocks.reserve(received.blocks.size());
    report.outcomes.reserve(received.blocks.size());
    report.group_results.reserve(received.blocks.size());
    for (const auto& block : received.blocks) {
        auto det = detect_and_correct(block, received.layout);
        report.group_results.push_back(compute_syndrome(det.codeword, received.layout));
        report.blocks.push_back(std::move(det.codeword));
        report.outcomes.push_back(std::move(det.outcome));
    }
    return report;
}

bool should_report(const ErrorReport& report) noexcept {
    for (const auto& o : report.outcomes) {
        if (is_uncorrectable(o)) return true;
    }
    return false;
}

Payload report_payload(const ErrorReport& report) {
    Payload out;
    out.symbols.reserve(report.blocks.size());
    for (const auto& block : report.blocks) {
        out.symbols.push_back(bits_to_symbol(extract_data(block, report.layout)));
    }
    return out;
}

void validate_report(const ErrorReport& report) {
    const auto n = report.blocks.size();
    if (report.outcomes.size() != n || report.group_results.size() != n) {
        throw std::invalid_argument("report " + report.packet_id + "/" + report.receiver_id +
                                    ": blocks, outcomes and group flags differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto where = "block " + std::to_string(i) + ": ";
        if (report.blocks[i].size() != report.layout.block_len) {
            throw std::invalid_argument(where + "wrong codeword length");
        }
        if (report.group_results[i].group_flags.size() != report.layout.check_bits) {
            throw std::invalid_argument(where + "expected " + std::to_string(report.layout.check_bits) +
                                        " group flags");
        }
        if (compute_syndrome(report.blocks[i], report.layout) != report.group_results[i]) {
            throw std::invalid_argument(where + "group flags do not match the codeword");
        }
        const auto& outcome = report.outcomes[i];
        if (const auto* u = std::get_if<Uncorrectable>(&outcome)) {
            if (u->syndrome != report.group_results[i] || u->syndrome.location <= report.layout.block_len) {
                throw std::invalid_argument(where + "uncorrectable outcome inconsistent with group flags");
            }
        } else {
            if (!report.group_results[i].clean()) {
                throw std::invalid_argument(where + "clean or corrected block has failing groups");
            }
            if (const auto* c = std::get_if<CorrectedSingle>(&outcome);
                c && (c->position == 0 || c->position > report.layout.block_len)) {
                throw std::invalid_argument(where + "corrected position out of range");
            }
        }
    }
}

std::string to_json_line(const ErrorReport& report) {
    ojson j;
    j["receiver_id"] = report.receiver_id;
    j["packet_id"] = report.packet_id;
    if (report.layout.data_bits != 8) j["data_bits"] = report.layout.data_bits;
    ojson blocks = ojson::array();
    for (const auto& b : report.blocks) blocks.push_back(b.to_hex());
    j["blocks"] = std::move(blocks);
    ojson outcomes = ojson::array();
    for (const auto& o : report.outcomes) {
        ojson entry;
        if (std::holds_alternative<Clean>(o)) {
            entry["kind"] = "clean";
        } else if (const auto* c = std::get_if<CorrectedSingle>(&o)) {
            entry["kind"] = "corrected";
            entry["position"] = c->position;
        } else {
            entry["kind"] = "uncorrectable";
        }
        outcomes.push_back(std::move(entry));
    }
    j["outcomes"] = std::move(outcomes);
    ojson flags = ojson::array();
    for (const auto& s : report.group_results) flags.push_back(s.to_bit_string());
    j["group_flags"] = std::move(flags);
    return j.dump();
}

ErrorReport report_from_json_line(std::string_view line) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) throw std::invalid_argument("report must be a JSON object");
        ErrorReport r;
        r.receiver_id = j.at("receiver_id").get<std::string>();
        r.packet_id = j.at("packet_id").get<std::string>();
        const auto data_bits = j.contains("data_bits") ? j.at("data_bits").get<std::size_t>() : std::size_t{8};
        r.layout = data_bits == 8 ? symbol_layout() : derive_layout(data_bits);

        for (const auto& b : j.at("blocks")) {
            r.blocks.push_back(Codeword::from_hex(b.get<std::string>(), r.layout.block_len));
        }
        for (const auto& flags : j.at("group_flags")) {
            r.group_results.push_back(Syndrome::from_bit_string(flags.get<std::string>()));
        }
        const auto& outcomes = j.at("outcomes");
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto kind = outcomes[i].at("kind").get<std::string>();
            if (kind == "clean") {
                r.outcomes.emplace_back(Clean{});
            } else if (kind == "corrected") {
                r.outcomes.emplace_back(CorrectedSingle{outcomes[i].at("position").get<std::size_t>()});
            } else if (kind == "uncorrectable") {
                if (i >= r.group_results.size()) throw std::invalid_argument("missing group flags");
                r.outcomes.emplace_back(Uncorrectable{r.group_results[i]});
            } else {
                throw std::invalid_argument("unknown outcome kind '" + kind + "'");
            }
        }
        validate_report(r);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad report field: ") + e.what());
    }
}

std::vector<std::uint8_t> serialize_compact(const ErrorReport& report) {
    const auto& layout = report.layout;
    if (layout.data_bits > 255) throw std::invalid_argument("data_bits does not fit the compact header");
    if (report.blocks.size() > 0xFFFF) throw std::invalid_argument("too many blocks for the compact header");
    std::vector<std::uint8_t> out{kCompactVersion, static_cast<std::uint8_t>(layout.data_bits),
                                  static_cast<std::uint8_t>(report.blocks.size() >> 8),
                                  static_cast<std::uint8_t>(report.blocks.size() & 0xFF)};
    append_id(out, report.receiver_id, "receiver_id");
    append_id(out, report.packet_id, "packet_id");

    const std::size_t header = out.size();
    const std::size_t n = report.blocks.size();
    const std::size_t body_bits = n * (layout.block_len + layout.check_bits);
    out.resize(header + (body_bits + 7) / 8, 0);
    std::span<std::uint8_t> body(out.data() + header, out.size() - header);

    std::size_t at = 0;
    for (const auto& block : report.blocks) {
        block.pack_into(body, at);
        at += layout.block_len;
    }
    for (const auto& outcome : report.outcomes) {
        const auto code = outcome_code(outcome);
        for (std::size_t k = 0; k < layout.check_bits; ++k, ++at) {
            if ((code >> (layout.check_bits - 1 - k)) & 1U) body[at / 8] |= static_cast<std::uint8_t>(0x80U >> (at % 8));
        }
    }
    return out;
}

ErrorReport deserialize_compact(std::span<const std::uint8_t> bytes) {
    std::size_t at = 0;
    const auto need = [&](std::size_t count) {
        if (bytes.size() - at < count) throw std::invalid_argument("compact report truncated");
    };
    need(4);
    if (bytes[0] != kCompactVersion) throw std::invalid_argument("unsupported compact report version");
    ErrorReport r;
    r.layout = bytes[1] == 8 ? symbol_layout() : derive_layout(bytes[1]);
    const std::size_t n = static_cast<std::size_t>(bytes[2]) << 8 | bytes[3];
    at = 4;
    for (auto* id : {&r.receiver_id, &r.packet_id}) {
        need(1);
        const std::size_t len = bytes[at++];
        need(len);
        id->assign(reinterpret_cast<const char*>(bytes.data() + at), len);
        at += len;
    }
    const auto& layout = r.layout;
    const std::size_t body_bits = n * (layout.block_len + layout.check_bits);
    if (bytes.size() - at != (body_bits + 7) / 8) throw std::invalid_argument("compact report has wrong body size");
    const auto body = bytes.subspan(at);

    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i, bit += layout.block_len) {
        r.blocks.push_back(Codeword::unpack_from(body, bit, layout.block_len));
        r.group_results.push_back(compute_syndrome(r.blocks.back(), layout));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t code = 0;
        for (std::size_t k = 0; k < layout.check_bits; ++k, ++bit) {
            code = code << 1 | ((body[bit / 8] >> (7 - bit % 8)) & 1U);
        }
        r.outcomes.push_back(outcome_from_code(code, layout));
    }
    validate_report(r);
    return r;
}

}  // namespace eccr
