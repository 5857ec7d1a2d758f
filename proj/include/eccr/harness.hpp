#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eccr/channel.hpp"
#include "eccr/cloud.hpp"
#include "eccr/edge.hpp"
#include "eccr/packet.hpp"

namespace eccr {

/// standard: raw symbols, no checking bits, one receiver.
/// checked: checking code with local correction, one receiver.
/// eccr: n receivers, local correction, cloud voting.
enum class Mode { standard, checked, eccr };

[[nodiscard]] std::string_view to_string(Mode mode) noexcept;
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] Mode parse_mode(std::string_view name);

inline constexpr Mode kAllModes[] = {Mode::standard, Mode::checked, Mode::eccr};

// Interference model: every packet gets n_receivers x bursts_per_packet burst
// windows. In eccr mode receiver i sees its own windows only; the single
// receiver of standard and checked mode sees all of them. With
// overlap_fraction = 0 the windows of different receivers never share a block.
struct ScenarioConfig {
    Mode mode = Mode::eccr;
    std::size_t n_receivers = 3;
    std::size_t payload_len = 24;
    std::size_t packets = 1000;
    BurstSpec burst{30, 1, 0.5};  // burst_len_bits == 0 disables interference
    std::vector<std::size_t> burst_grid{4, 8, 12, 16, 24, 32, 40, 44};
    double overlap_fraction = 0.0;
    std::uint64_t master_seed = 1;
    bool record_timing = true;
    unsigned threads = 1;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct RunMetrics {
    std::size_t packets = 0;
    double decoding_rate = 0.0;
    double symbol_error_rate = 0.0;
    double mean_recovery_ms = 0.0;  // detection + weighting + voting only
    double report_bytes = 0.0;      // mean compact report size, 0 in standard mode
    double corrupted_symbol_fraction = 0.0;  // symbols whose data bits the interference hit
    double mean_error_bits = 0.0;            // flipped bits per packet across all windows

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Deterministic per master_seed (timing aside). Throws InfeasibleScenario.
[[nodiscard]] RunMetrics run_scenario(const ScenarioConfig& config);

struct SweepRow {
    Mode mode = Mode::standard;
    std::size_t burst_bits = 0;
    RunMetrics metrics;
};

/// One row per (burst point, mode) over cfg.burst_grid, modes in kAllModes order.
/// The channel realization at a burst point is shared by all modes.
[[nodiscard]] std::vector<SweepRow> sweep(const ScenarioConfig& config);

inline constexpr std::string_view kCsvHeader = "mode,burst_bits,decoding_rate,ser,mean_ms,report_bytes";
void write_csv(std::ostream& out, std::span<const SweepRow> rows);

[[nodiscard]] std::string metrics_json(const ScenarioConfig& config, const RunMetrics& metrics);

/// Reads a JSON config file mirroring ScenarioConfig on top of `base`.
[[nodiscard]] ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});
[[nodiscard]] ScenarioConfig parse_config(std::string_view json_text, ScenarioConfig base = {});

// Traces: JSON lines mixing ground-truth packets {"packet_id","payload"} and
// ErrorReport lines in the edge-station format.
struct PacketRecord {
    std::string packet_id;
    Payload payload;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

using TraceRecord = std::variant<PacketRecord, ErrorReport>;

[[nodiscard]] std::string to_json_line(const PacketRecord& record);
void trace_export(std::ostream& out, std::span<const TraceRecord> records);
/// Throws MalformedTrace with the 1-based line number. Blank lines are skipped.
[[nodiscard]] std::vector<TraceRecord> trace_import(std::istream& in);

/// Ground truth plus every receiver's report for cfg.packets eccr packets.
[[nodiscard]] std::vector<TraceRecord> generate_trace(const ScenarioConfig& config);

struct ReplayResult {
    std::vector<Recovery> recovered;  // in order of first report per packet
    std::size_t with_truth = 0;       // packets that had a ground-truth record
    std::size_t exact = 0;            // of those, recovered exactly
};

/// Recovers every packet that has at least one report.
[[nodiscard]] ReplayResult replay(std::span<const TraceRecord> records);

}  // namespace eccr
