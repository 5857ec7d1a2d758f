#include "eccr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "eccr/errors.hpp"
#include "json.hpp"

namespace eccr {

namespace {

constexpr std::uint64_t kPayloadStream = 0x7061796c6f6164ULL;

struct PacketResult {
    bool exact = false;
    std::size_t wrong_symbols = 0;
    double recovery_ms = 0.0;
    double report_bytes = 0.0;
    std::size_t corrupted_symbols = 0;
    std::size_t error_bits = 0;
};

struct PacketSetup {
    Payload payload;
    EncodedPacket encoded;
    std::vector<CorruptionMask> masks;
    CorruptionMask footprint;
};

std::uint64_t point_seed(const ScenarioConfig& cfg) {
    return combine_seed(cfg.master_seed, cfg.burst.burst_len_bits);
}

PacketSetup make_packet(const ScenarioConfig& cfg, std::size_t index) {
    const std::uint64_t seed = combine_seed(point_seed(cfg), index);
    Rng rng(combine_seed(seed, kPayloadStream));
    std::uniform_int_distribution<int> symbol(0, 255);

    PacketSetup s;
    s.payload.symbols.resize(cfg.payload_len);
    for (auto& v : s.payload.symbols) v = static_cast<std::uint8_t>(symbol(rng));
    s.encoded = encode_packet(s.payload, std::to_string(index));
    if (cfg.burst.burst_len_bits > 0 && cfg.burst.bursts_per_packet > 0) {
        s.masks = receiver_bursts(s.encoded, cfg.n_receivers, cfg.burst, cfg.overlap_fraction, seed);
    } else {
        s.masks.resize(cfg.n_receivers);
    }
    s.footprint = mask_union(s.masks);
    return s;
}

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled) {
        if (enabled_) start_ = std::chrono::steady_clock::now();
    }
    [[nodiscard]] double elapsed_ms() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_{};
};

Payload standard_receive(const PacketSetup& s) {
    // Raw symbols carry only data bits; flips on checking positions do not exist here.
    const auto& layout = s.encoded.layout;
    Payload out = s.payload;
    for (const auto& b : s.footprint.flipped_bits) {
        const auto it = std::find(layout.data_positions.begin(), layout.data_positions.end(), b.position);
        if (it == layout.data_positions.end()) continue;
        const auto bit = static_cast<unsigned>(it - layout.data_positions.begin());
        out.symbols[b.block] ^= static_cast<std::uint8_t>(0x80U >> bit);
    }
    return out;
}

PacketResult run_packet(const ScenarioConfig& cfg, std::size_t index) {
    const PacketSetup s = make_packet(cfg, index);
    PacketResult res;
    res.error_bits = s.footprint.size();

    const Payload raw = standard_receive(s);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw.symbols[k] != s.payload.symbols[k]) ++res.corrupted_symbols;
    }

    Payload got;
    switch (cfg.mode) {
        case Mode::standard: {
            got = raw;
            break;
        }
        case Mode::checked: {
            const auto rx = apply_mask(s.encoded, s.footprint);
            const Stopwatch watch(cfg.record_timing);
            const auto report = receive(rx, "rx0");
            got = report_payload(report);
            res.recovery_ms = watch.elapsed_ms();
            res.report_bytes = static_cast<double>(serialize_compact(report).size());
            break;
        }
        case Mode::eccr: {
            std::vector<EncodedPacket> received;
            received.reserve(cfg.n_receivers);
            for (const auto& m : s.masks) received.push_back(apply_mask(s.encoded, m));
            std::vector<ErrorReport> reports;
            reports.reserve(cfg.n_receivers);
            const Stopwatch watch(cfg.record_timing);
            for (std::size_t r = 0; r < received.size(); ++r) {
                reports.push_back(receive(received[r], "rx" + std::to_string(r)));
            }
            got = recover(s.encoded.packet_id, reports).packet.payload;
            res.recovery_ms = watch.elapsed_ms();
            std::size_t bytes = 0;
            for (const auto& r : reports) bytes += serialize_compact(r).size();
            res.report_bytes = static_cast<double>(bytes) / static_cast<double>(reports.size());
            break;
        }
    }
    for (std::size_t k = 0; k < got.size(); ++k) {
        if (got.symbols[k] != s.payload.symbols[k]) ++res.wrong_symbols;
    }
    res.exact = res.wrong_symbols == 0;
    return res;
}

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::standard: return "standard";
        case Mode::checked: return "checked";
        case Mode::eccr: return "eccr";
    }
    return "?";
}

Mode parse_mode(std::string_view name) {
    for (auto m : kAllModes) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown mode '" + std::string(name) + "' (standard, checked, eccr)");
}

void ScenarioConfig::validate() const {
    if (packets < 1) throw std::invalid_argument("packets must be at least 1");
    if (n_receivers < 1) throw std::invalid_argument("receivers must be at least 1");
    if (payload_len < 1 || payload_len > 0xFFFF) throw std::invalid_argument("payload length must be in 1..65535");
    if (!(overlap_fraction >= 0.0 && overlap_fraction <= 1.0)) {
        throw std::invalid_argument("overlap must be in [0,1]");
    }
    if (!(burst.flip_probability >= 0.0 && burst.flip_probability <= 1.0)) {
        throw std::invalid_argument("flip_probability must be in [0,1]");
    }
    if (!std::is_sorted(burst_grid.begin(), burst_grid.end())) {
        throw std::invalid_argument("burst grid must be non-decreasing");
    }
}

RunMetrics run_scenario(const ScenarioConfig& config) {
    config.validate();
    if (config.burst.burst_len_bits > 0 && config.burst.bursts_per_packet > 0) {
        check_burst_feasible(config.payload_len, symbol_layout().block_len, config.n_receivers, config.burst,
                             config.overlap_fraction);
    }

    std::vector<PacketResult> results(config.packets);
    const unsigned threads = std::max(1U, std::min<unsigned>(config.threads, static_cast<unsigned>(config.packets)));
    if (threads == 1) {
        for (std::size_t i = 0; i < config.packets; ++i) results[i] = run_packet(config, i);
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < config.packets; i += threads) results[i] = run_packet(config, i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    RunMetrics m;
    m.packets = config.packets;
    std::size_t exact = 0;
    std::size_t wrong = 0;
    std::size_t corrupted = 0;
    std::size_t bits = 0;
    double ms = 0.0;
    double bytes = 0.0;
    for (const auto& r : results) {
        exact += r.exact ? 1 : 0;
        wrong += r.wrong_symbols;
        corrupted += r.corrupted_symbols;
        bits += r.error_bits;
        ms += r.recovery_ms;
        bytes += r.report_bytes;
    }
    const auto n = static_cast<double>(config.packets);
    const auto symbols = n * static_cast<double>(config.payload_len);
    m.decoding_rate = static_cast<double>(exact) / n;
    m.symbol_error_rate = static_cast<double>(wrong) / symbols;
    m.corrupted_symbol_fraction = static_cast<double>(corrupted) / symbols;
    m.mean_error_bits = static_cast<double>(bits) / n;
    m.mean_recovery_ms = ms / n;
    m.report_bytes = bytes / n;
    return m;
}

std::vector<SweepRow> sweep(const ScenarioConfig& config) {
    config.validate();
    std::vector<SweepRow> rows;
    for (auto bits : config.burst_grid) {
        for (auto mode : kAllModes) {
            ScenarioConfig point = config;
            point.mode = mode;
            point.burst.burst_len_bits = bits;
            rows.push_back({mode, bits, run_scenario(point)});
        }
    }
    return rows;
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.mode) << ',' << r.burst_bits << ',' << fixed(r.metrics.decoding_rate, 6) << ','
            << fixed(r.metrics.symbol_error_rate, 6) << ',' << fixed(r.metrics.mean_recovery_ms, 6) << ','
            << fixed(r.metrics.report_bytes, 2) << '\n';
    }
}

std::string metrics_json(const ScenarioConfig& config, const RunMetrics& metrics) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(config.mode);
    j["receivers"] = config.n_receivers;
    j["payload_len"] = config.payload_len;
    j["packets"] = metrics.packets;
    j["burst_bits"] = config.burst.burst_len_bits;
    j["bursts_per_packet"] = config.burst.bursts_per_packet;
    j["flip_probability"] = config.burst.flip_probability;
    j["overlap"] = config.overlap_fraction;
    j["seed"] = config.master_seed;
    j["decoding_rate"] = metrics.decoding_rate;
    j["ser"] = metrics.symbol_error_rate;
    j["mean_ms"] = metrics.mean_recovery_ms;
    j["report_bytes"] = metrics.report_bytes;
    j["corrupted_symbol_fraction"] = metrics.corrupted_symbol_fraction;
    j["mean_error_bits"] = metrics.mean_error_bits;
    return j.dump();
}

ScenarioConfig parse_config(std::string_view json_text, ScenarioConfig base) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
        if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "mode") {
                base.mode = parse_mode(value.get<std::string>());
            } else if (key == "receivers") {
                base.n_receivers = value.get<std::size_t>();
            } else if (key == "payload_len") {
                base.payload_len = value.get<std::size_t>();
            } else if (key == "packets") {
                base.packets = value.get<std::size_t>();
            } else if (key == "burst_bits") {
                if (value.is_array()) {
                    base.burst_grid = value.get<std::vector<std::size_t>>();
                    if (!base.burst_grid.empty()) base.burst.burst_len_bits = base.burst_grid.back();
                } else {
                    base.burst.burst_len_bits = value.get<std::size_t>();
                    base.burst_grid = {base.burst.burst_len_bits};
                }
            } else if (key == "bursts_per_packet") {
                base.burst.bursts_per_packet = value.get<std::size_t>();
            } else if (key == "flip_probability") {
                base.burst.flip_probability = value.get<double>();
            } else if (key == "overlap") {
                base.overlap_fraction = value.get<double>();
            } else if (key == "seed") {
                base.master_seed = value.get<std::uint64_t>();
            } else if (key == "threads") {
                base.threads = value.get<unsigned>();
            } else if (key == "timing") {
                base.record_timing = value.get<bool>();
            } else {
                throw std::invalid_argument("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    return base;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

}  // namespace eccr
