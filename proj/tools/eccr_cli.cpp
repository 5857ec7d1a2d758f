// eccr: command line front end for the codec, simulator and trace replay.
//
// Exit codes: 0 success, 1 usage error, 2 infeasible scenario, 3 malformed trace.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eccr/cloud.hpp"
#include "eccr/errors.hpp"
#include "eccr/harness.hpp"
#include "json.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kMalformed = 3;

struct ScenarioFlags {
    std::string config_path;
    std::string mode;
    std::size_t receivers = 0;
    std::size_t payload_len = 0;
    std::size_t packets = 0;
    std::vector<std::size_t> burst_bits;
    std::size_t bursts = 0;
    double flip_probability = 0.0;
    double overlap = 0.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool no_timing = false;

    CLI::Option* mode_opt = nullptr;
    CLI::Option* receivers_opt = nullptr;
    CLI::Option* payload_opt = nullptr;
    CLI::Option* packets_opt = nullptr;
    CLI::Option* burst_opt = nullptr;
    CLI::Option* bursts_opt = nullptr;
    CLI::Option* flip_opt = nullptr;
    CLI::Option* overlap_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;

    void attach(CLI::App* app, bool with_mode) {
        app->add_option("--config", config_path, "JSON config file (flags override its values)")
            ->check(CLI::ExistingFile);
        if (with_mode) mode_opt = app->add_option("--mode", mode, "standard | checked | eccr");
        receivers_opt = app->add_option("--receivers", receivers, "number of base stations")->check(CLI::PositiveNumber);
        payload_opt = app->add_option("--payload-len", payload_len, "symbols per packet")->check(CLI::PositiveNumber);
        packets_opt = app->add_option("--packets", packets, "packets per run")->check(CLI::PositiveNumber);
        burst_opt = app->add_option("--burst-bits", burst_bits, "burst window length in bits (list for sweep)")
                        ->delimiter(',');
        bursts_opt = app->add_option("--bursts", bursts, "burst windows per receiver and packet");
        flip_opt = app->add_option("--flip-prob", flip_probability, "flip probability inside a burst")
                       ->check(CLI::Range(0.0, 1.0));
        overlap_opt = app->add_option("--overlap", overlap, "chance a burst lands in the shared zone")
                          ->check(CLI::Range(0.0, 1.0));
        seed_opt = app->add_option("--seed", seed, "master seed");
        threads_opt = app->add_option("--threads", threads, "worker threads");
        app->add_flag("--no-timing", no_timing, "report mean_ms as 0 (byte-stable output)");
    }

    [[nodiscard]] eccr::ScenarioConfig build() const {
        eccr::ScenarioConfig cfg;
        if (!config_path.empty()) cfg = eccr::load_config(config_path, cfg);
        if (mode_opt && mode_opt->count()) cfg.mode = eccr::parse_mode(mode);
        if (receivers_opt->count()) cfg.n_receivers = receivers;
        if (payload_opt->count()) cfg.payload_len = payload_len;
        if (packets_opt->count()) cfg.packets = packets;
        if (burst_opt->count()) {
            cfg.burst_grid = burst_bits;
            if (!burst_bits.empty()) cfg.burst.burst_len_bits = burst_bits.back();
        }
        if (bursts_opt->count()) cfg.burst.bursts_per_packet = bursts;
        if (flip_opt->count()) cfg.burst.flip_probability = flip_probability;
        if (overlap_opt->count()) cfg.overlap_fraction = overlap;
        if (seed_opt->count()) cfg.master_seed = seed;
        if (threads_opt->count()) cfg.threads = threads;
        if (no_timing) cfg.record_timing = false;
        cfg.validate();
        return cfg;
    }
};

std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Error checking code + multi-receiver weighted voting for LoRa payloads"};
    app.require_subcommand(1);

    std::string payload_text;
    std::string packet_id = "0";
    auto* encode = app.add_subcommand("encode", "payload symbols -> hex codeword blocks");
    encode->add_option("symbols", payload_text, "decimal symbols, e.g. \"72 101 108\" (stdin if omitted)");
    encode->add_option("--packet-id", packet_id, "packet identifier");

    std::vector<std::string> hex_blocks;
    auto* decode = app.add_subcommand("decode", "hex codeword blocks -> payload and per-block outcomes");
    decode->add_option("blocks", hex_blocks, "(12,8) blocks as hex (stdin if omitted)");

    ScenarioFlags sim_flags;
    std::string trace_out;
    auto* simulate = app.add_subcommand("simulate", "run one scenario, print metrics JSON");
    sim_flags.attach(simulate, true);
    simulate->add_option("--trace", trace_out, "also write the generated packets and reports as a trace");

    ScenarioFlags sweep_flags;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "all modes over a burst grid, CSV output");
    sweep_flags.attach(sweep, false);
    sweep->add_option("--out", sweep_out, "CSV path (stdout if omitted)");

    std::string trace_in;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "recover packets from a JSON-lines trace");
    replay->add_option("trace", trace_in, "trace file (stdin if omitted or '-')");
    replay->add_option("--out", replay_out, "output path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*encode) {
            if (payload_text.empty()) payload_text = read_all(std::cin);
            const auto packet = eccr::encode_packet(eccr::parse_payload(payload_text), packet_id);
            std::string line;
            for (const auto& b : packet.blocks) {
                if (!line.empty()) line.push_back(' ');
                line += b.to_hex();
            }
            std::cout << line << '\n';
        } else if (*decode) {
            // Accepts separate arguments or one quoted, space-separated list.
            std::string text;
            if (hex_blocks.empty()) {
                text = read_all(std::cin);
            } else {
                for (const auto& h : hex_blocks) text += h + ' ';
            }
            std::vector<std::string> tokens;
            std::istringstream in(text);
            for (std::string tok; in >> tok;) tokens.push_back(tok);
            if (tokens.empty()) throw std::invalid_argument("no blocks given");
            eccr::EncodedPacket packet{"0", {}, eccr::symbol_layout()};
            for (const auto& h : tokens) {
                packet.blocks.push_back(eccr::Codeword::from_hex(h, packet.layout.block_len));
            }
            const auto decoded = eccr::decode_packet(packet);
            nlohmann::ordered_json j;
            j["payload"] = decoded.payload.symbols;
            std::vector<std::string> outcomes;
            for (const auto& o : decoded.outcomes) outcomes.push_back(eccr::describe(o));
            j["outcomes"] = outcomes;
            std::cout << j.dump() << '\n';
        } else if (*simulate) {
            const auto cfg = sim_flags.build();
            const auto metrics = eccr::run_scenario(cfg);
            if (!trace_out.empty()) {
                Output out(trace_out);
                const auto records = eccr::generate_trace(cfg);
                eccr::trace_export(out.stream(), records);
            }
            std::cout << eccr::metrics_json(cfg, metrics) << '\n';
        } else if (*sweep) {
            const auto cfg = sweep_flags.build();
            const auto rows = eccr::sweep(cfg);
            Output out(sweep_out);
            eccr::write_csv(out.stream(), rows);
        } else if (*replay) {
            std::vector<eccr::TraceRecord> records;
            if (trace_in.empty() || trace_in == "-") {
                records = eccr::trace_import(std::cin);
            } else {
                std::ifstream in(trace_in);
                if (!in) throw std::invalid_argument("cannot open trace " + trace_in);
                records = eccr::trace_import(in);
            }
            const auto result = eccr::replay(records);
            Output out(replay_out);
            for (const auto& r : result.recovered) out.stream() << eccr::to_json_line(r.packet) << '\n';
            if (result.with_truth > 0) {
                std::cerr << result.exact << "/" << result.with_truth << " packets recovered exactly\n";
            }
        }
    } catch (const eccr::InfeasibleScenario& e) {
        std::cerr << "infeasible scenario: " << e.what() << '\n';
        return kInfeasible;
    } catch (const eccr::MalformedTrace& e) {
        std::cerr << "malformed trace: " << e.what() << '\n';
        return kMalformed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const eccr::AggregationError& e) {
        std::cerr << "malformed trace: " << e.what() << '\n';
        return kMalformed;
    }
    return 0;
}
