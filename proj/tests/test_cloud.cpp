#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "eccr/channel.hpp"
#include "eccr/cloud.hpp"
#include "eccr/errors.hpp"
#include "support.hpp"

using namespace eccr;

namespace {

// Independent scorer: for each position tally (summed weight, votes, lowest
// receiver id) per value from the raw inputs and pick the best by the
// documented precedence.
Payload brute_force_vote(const std::vector<std::string>& ids, const std::vector<Payload>& values,
                         const std::vector<std::vector<int>>& weights) {
    Payload out;
    const std::size_t n = values.front().size();
    for (std::size_t k = 0; k < n; ++k) {
        struct Tally {
            int score = 0;
            int votes = 0;
            std::string lowest = "\x7f";
        };
        std::map<int, Tally> tally;
        for (std::size_t r = 0; r < values.size(); ++r) {
            auto& t = tally[values[r].symbols[k]];
            t.score += weights[r][k];
            ++t.votes;
            t.lowest = std::min(t.lowest, ids[r]);
        }
        int best = -1;
        Tally best_t;
        for (const auto& [v, t] : tally) {
            const bool better = best < 0 || t.score > best_t.score ||
                                (t.score == best_t.score && t.votes > best_t.votes) ||
                                (t.score == best_t.score && t.votes == best_t.votes && t.lowest < best_t.lowest);
            if (better) {
                best = v;
                best_t = t;
            }
        }
        out.symbols.push_back(static_cast<std::uint8_t>(best));
    }
    return out;
}

// A block holding `symbol` whose report weight is `weight`. After local
// correction only syndromes above 12 keep failing groups, so a (12,8) block
// weighs 100, 25 (location 13 or 14) or 0 (location 15). Only checking bits
// are flipped, which leaves the data untouched.
Codeword block_with_weight(std::uint8_t symbol, int weight, std::mt19937_64& rng) {
    Codeword cw = encode_block(symbol_to_bits(symbol), symbol_layout());
    static const std::map<int, std::vector<std::vector<std::size_t>>> patterns{
        {100, {{}}},
        {25, {{1, 4, 8}, {2, 4, 8}}},
        {0, {{1, 2, 4, 8}}},
    };
    const auto& options = patterns.at(weight);
    for (auto p : options[rng() % options.size()]) cw.flip(p);
    return cw;
}

ErrorReport report_from(const std::string& id, const std::string& packet, const std::vector<Codeword>& blocks) {
    EncodedPacket pkt{packet, blocks, symbol_layout()};
    return receive(pkt, id);
}

}  // namespace

TEST_CASE("assign_weights: clean, fully failed and half failed blocks") {
    CHECK(block_weight(Syndrome::from_bit_string("0000")) == 100);
    CHECK(block_weight(Syndrome::from_bit_string("1111")) == 0);
    CHECK(block_weight(Syndrome::from_bit_string("0011")) == 50);
    CHECK(block_weight(Syndrome::from_bit_string("1000")) == 75);
    CHECK(block_weight(Syndrome::from_bit_string("1110")) == 25);
    CHECK(block_weight(Syndrome::from_bit_string("101")) == 33);  // floored

    const auto r = test::report_with_failures("a", "p", test::hello_world(), {1, 4});
    const auto w = assign_weights(r);
    REQUIRE(w.weights.size() == 12);
    CHECK(w.weights[0] == 100);
    CHECK(w.weights[1] == 0);
    CHECK(w.weights[4] == 0);

    // 4 ^ 9 = 13: groups 1, 3 and 4 fail.
    auto pkt = encode_packet(test::hello_world());
    pkt.blocks[2].flip(4);
    pkt.blocks[2].flip(9);
    CHECK(assign_weights(receive(pkt, "a")).weights[2] == 25);
}

TEST_CASE("assign_weights: monotone in failing groups") {
    for (unsigned mask = 0; mask < 16; ++mask) {
        for (unsigned extra = 0; extra < 16; ++extra) {
            std::vector<bool> a(4), b(4);
            for (int k = 0; k < 4; ++k) {
                a[k] = (mask >> k) & 1U;
                b[k] = ((mask | extra) >> k) & 1U;
            }
            REQUIRE(block_weight(Syndrome::from_flags(b)) <= block_weight(Syndrome::from_flags(a)));
        }
    }
}

TEST_CASE("weighted_vote: three disjointly corrupted copies of Hello World!") {
    const auto reports = test::voting_example_reports();
    const auto out = weighted_vote(reports);
    CHECK(format_payload(out.payload) == "72 101 108 108 111 32 87 111 114 108 100 33");
    CHECK(out.contributors == std::vector<std::string>{"hallway", "lab", "library"});
    CHECK(assign_weights(reports[0]).weights ==
          std::vector<int>{0, 0, 0, 100, 100, 100, 100, 100, 100, 100, 100, 100});
    CHECK(out.confidence[0] == 200);
    CHECK(out.confidence[3] == 300);

    // Head symbols weigh zero everywhere: plain majority still recovers 72 101 108.
    const auto zero_head = weighted_vote(test::voting_example_reports_zero_head());
    CHECK(zero_head.payload == test::hello_world());
    CHECK(zero_head.confidence[0] == 0);
}

TEST_CASE("weighted_vote: single report returns its own payload") {
    const auto r = test::report_with_failures("solo", "p", test::lab_copy(), {0, 1, 2});
    const std::vector<ErrorReport> one{r};
    const auto out = weighted_vote(one);
    CHECK(out.payload == test::lab_copy());
    CHECK(out.contributors == std::vector<std::string>{"solo"});
}

TEST_CASE("weighted_vote: ties go to the lowest receiver_id") {
    const auto a = test::report_with_failures("b-station", "p", parse_payload("1 2"), {0});
    const auto b = test::report_with_failures("a-station", "p", parse_payload("9 2"), {0});
    std::vector<ErrorReport> reports{a, b};
    CHECK(weighted_vote(reports).payload.symbols[0] == 9);
    std::reverse(reports.begin(), reports.end());
    CHECK(weighted_vote(reports).payload.symbols[0] == 9);
}

TEST_CASE("weighted_vote: matches the brute-force scorer on random instances") {
    std::mt19937_64 rng(99);
    const std::vector<int> levels{0, 25, 100};
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n_rx = 1 + rng() % 5;
        const std::size_t len = 1 + rng() % 10;
        std::vector<ErrorReport> reports;
        std::vector<std::string> ids;
        std::vector<Payload> values;
        std::vector<std::vector<int>> weights;
        for (std::size_t r = 0; r < n_rx; ++r) {
            std::vector<Codeword> blocks;
            Payload p;
            for (std::size_t k = 0; k < len; ++k) {
                const auto v = static_cast<std::uint8_t>(rng() % 3);  // few values, many collisions
                blocks.push_back(block_with_weight(v, levels[rng() % levels.size()], rng));
                p.symbols.push_back(v);
            }
            const auto id = "rx" + std::to_string((r * 7 + trial) % 11) + "_" + std::to_string(r);
            reports.push_back(report_from(id, "p", blocks));
            ids.push_back(id);
            values.push_back(p);
            weights.push_back(assign_weights(reports.back()).weights);
            REQUIRE(report_payload(reports.back()) == p);
        }
        const auto expected = brute_force_vote(ids, values, weights);
        REQUIRE(weighted_vote(reports).payload == expected);

        // Permutation invariance.
        std::shuffle(reports.begin(), reports.end(), rng);
        REQUIRE(weighted_vote(reports).payload == expected);
    }
}

TEST_CASE("weighted_vote: a weight-100 value beats weaker dissent") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto truth = static_cast<std::uint8_t>(rng() % 256);
        const std::size_t n_rx = 2 + rng() % 4;
        std::vector<ErrorReport> reports;
        reports.push_back(report_from("rx" + std::to_string(rng() % 10), "p",
                                      {encode_block(symbol_to_bits(truth), symbol_layout())}));
        int coalition_max = 0;
        std::map<int, int> coalition;
        for (std::size_t r = 1; r < n_rx; ++r) {
            const auto wrong = static_cast<std::uint8_t>(truth ^ (1 + rng() % 3));
            const int w = std::vector<int>{0, 25}[rng() % 2];
            coalition[wrong] += w;
            coalition_max = std::max(coalition_max, coalition[wrong]);
            reports.push_back(report_from("rx" + std::to_string(10 + r), "p", {block_with_weight(wrong, w, rng)}));
        }
        if (coalition_max >= 100) continue;  // outside the dominance precondition
        REQUIRE(weighted_vote(reports).payload.symbols[0] == truth);
    }
}

TEST_CASE("disjoint recovery over 10,000 randomized scenarios") {
    std::mt19937_64 rng(2718);
    std::size_t checked = 0;
    for (int trial = 0; trial < 10'000; ++trial) {
        const std::size_t n_rx = 2 + rng() % 4;
        const auto sent = encode_packet(test::random_payload(4 + rng() % 28, rng), std::to_string(trial));
        // Whole blocks per receiver, so n_rx disjoint runs always fit.
        const std::size_t len = sent.blocks.size();
        const double f = static_cast<double>(rng() % (len / n_rx + 1)) / static_cast<double>(len);
        const auto masks = disjoint_masks(sent, n_rx, f, 0.0, rng());
        std::vector<ErrorReport> reports;
        for (std::size_t r = 0; r < n_rx; ++r) reports.push_back(receive(apply_mask(sent, masks[r]), "rx" + std::to_string(r)));

        // Precondition: every corrupted copy weighs strictly less than the
        // clean copies that agree with the truth.
        bool holds = true;
        for (std::size_t k = 0; k < sent.blocks.size() && holds; ++k) {
            int clean_sum = 0;
            std::map<std::uint8_t, int> wrong;
            for (const auto& rep : reports) {
                const auto w = assign_weights(rep).weights[k];
                const auto v = report_payload(rep).symbols[k];
                if (rep.blocks[k] == sent.blocks[k]) {
                    clean_sum += w;
                } else {
                    wrong[v] += w;
                }
            }
            for (const auto& [v, w] : wrong) holds = holds && w < clean_sum;
        }
        // Three or more receivers leave at least two clean copies per block.
        if (n_rx >= 3) REQUIRE(holds);
        if (!holds) continue;
        ++checked;
        const auto out = recover(sent.packet_id, reports);
        REQUIRE(out.packet.payload == decode_packet(sent).payload);
    }
    CHECK(checked > 7000);
}

TEST_CASE("recover: pass-through, vote and the shared-error failure mode") {
    const auto sent = encode_packet(test::hello_world(), "p");
    std::vector<ErrorReport> clean{receive(sent, "c"), receive(sent, "a"), receive(sent, "b")};
    const auto pass = recover("p", clean);
    CHECK(pass.path == RecoveryPath::pass_through);
    CHECK(pass.packet.payload == test::hello_world());
    CHECK(pass.packet.contributors == std::vector<std::string>{"a"});

    auto bad = sent;
    bad.blocks[6].flip(4);
    bad.blocks[6].flip(9);
    std::vector<ErrorReport> one_bad{receive(sent, "a"), receive(bad, "b"), receive(sent, "c")};
    const auto voted = recover("p", one_bad);
    CHECK(voted.path == RecoveryPath::voted);
    CHECK(voted.packet.payload == test::hello_world());

    // Every receiver hit identically: the wrong value has no opposition.
    std::vector<ErrorReport> all_bad{receive(bad, "a"), receive(bad, "b"), receive(bad, "c")};
    const auto wrong = recover("p", all_bad);
    CHECK(wrong.path == RecoveryPath::voted);
    CHECK(wrong.packet.payload.symbols[6] != test::hello_world().symbols[6]);
    CHECK(wrong.packet.payload.symbols[6] == report_payload(all_bad[0]).symbols[6]);
}

TEST_CASE("recover: disagreeing locally clean copies are voted") {
    // 1 ^ 2 = 3: the edge silently rewrites data bit 3 and reports the block as corrected.
    const auto sent = encode_packet(test::hello_world(), "p");
    auto miscorrected = sent;
    miscorrected.blocks[0].flip(1);
    miscorrected.blocks[0].flip(2);
    std::vector<ErrorReport> reports{receive(miscorrected, "a"), receive(sent, "b"), receive(sent, "c")};
    REQUIRE_FALSE(should_report(reports[0]));
    REQUIRE(report_payload(reports[0]) != test::hello_world());
    const auto out = recover("p", reports);
    CHECK(out.path == RecoveryPath::voted);
    CHECK(out.packet.payload == test::hello_world());
}

TEST_CASE("recover / weighted_vote: aggregation errors") {
    const auto a = receive(encode_packet(test::hello_world(), "p"), "a");
    const auto other_packet = receive(encode_packet(test::hello_world(), "q"), "b");
    const auto short_packet = receive(encode_packet(parse_payload("1 2"), "p"), "b");
    CHECK_THROWS_AS((void)weighted_vote(std::vector<ErrorReport>{a, other_packet}), AggregationError);
    CHECK_THROWS_AS((void)weighted_vote(std::vector<ErrorReport>{a, short_packet}), AggregationError);
    CHECK_THROWS_AS((void)weighted_vote(std::vector<ErrorReport>{a, a}), AggregationError);
    CHECK_THROWS_AS((void)weighted_vote(std::vector<ErrorReport>{}), AggregationError);
    CHECK_THROWS_AS((void)recover("p", std::vector<ErrorReport>{}), AggregationError);
    CHECK_THROWS_AS((void)recover("zzz", std::vector<ErrorReport>{a}), AggregationError);
}

TEST_CASE("RecoveredPacket JSON line") {
    const RecoveredPacket p{"7", parse_payload("72 33"), {200, 300}, {"a", "b"}};
    CHECK(to_json_line(p) == R"({"packet_id":"7","payload":[72,33],"confidence":[200,300],"contributors":["a","b"]})");
}

TEST_CASE("ReportAggregator: interleaved packets from many threads") {
    constexpr std::size_t kPackets = 400;
    constexpr std::size_t kReceivers = 3;
    std::mt19937_64 rng(55);
    std::vector<Payload> truth;
    std::vector<ErrorReport> all;
    for (std::size_t i = 0; i < kPackets; ++i) {
        truth.push_back(test::random_payload(16, rng));
        const auto sent = encode_packet(truth.back(), std::to_string(i));
        const auto masks = disjoint_masks(sent, kReceivers, 0.3, 0.0, i);
        for (std::size_t r = 0; r < kReceivers; ++r) all.push_back(receive(apply_mask(sent, masks[r]), "rx" + std::to_string(r)));
    }
    std::shuffle(all.begin(), all.end(), rng);

    ReportAggregator agg(kReceivers);
    std::vector<std::vector<Recovery>> done(4);
    {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < 4; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < all.size(); i += 4) {
                    if (auto rec = agg.submit(all[i])) done[t].push_back(std::move(*rec));
                }
            });
        }
    }
    CHECK(agg.pending() == 0);
    std::size_t total = 0;
    for (const auto& d : done) {
        for (const auto& rec : d) {
            ++total;
            CHECK(rec.packet.payload == truth[std::stoul(rec.packet.packet_id)]);
        }
    }
    CHECK(total == kPackets);
}

TEST_CASE("ReportAggregator: flush recovers partial packets in arrival order") {
    ReportAggregator agg(3);
    const auto sent_b = encode_packet(test::hello_world(), "b");
    const auto sent_a = encode_packet(test::lab_copy(), "a");
    CHECK_FALSE(agg.submit(receive(sent_b, "rx0")).has_value());
    CHECK_FALSE(agg.submit(receive(sent_a, "rx0")).has_value());
    CHECK_FALSE(agg.submit(receive(sent_b, "rx1")).has_value());
    CHECK(agg.pending() == 2);
    const auto out = agg.flush();
    REQUIRE(out.size() == 2);
    CHECK(out[0].packet.packet_id == "b");
    CHECK(out[1].packet.packet_id == "a");
    CHECK(agg.pending() == 0);
}
