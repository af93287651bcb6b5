#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "rfidsim/engine.hpp"

using namespace rfidsim;
using namespace testutil;

TEST_CASE("channel resolution by reply count") {
    CHECK(channel_resolve({}).kind == ChannelOutcome::Kind::Silence);

    Frame r = TagReply{TagIdentity{1}};
    auto single = channel_resolve({r});
    REQUIRE(single.kind == ChannelOutcome::Kind::Single);
    CHECK(single.frame == r);

    // two identical replies still collide
    CHECK(channel_resolve({r, r}).kind == ChannelOutcome::Kind::Collision);
    CHECK(channel_resolve({r, Frame{Busy{}}, r}).kind ==
          ChannelOutcome::Kind::Collision);
}

TEST_CASE("frame airtime arithmetic") {
    TimingModel t;
    t.reader_bits_per_sec = 8'000'000;
    t.tag_bits_per_sec = 8'000'000;
    t.frame_overhead_us = 0;

    Frame ten_bytes = TagReply{TagIdentity{0}};  // 1 + 7 + 2 bytes
    CHECK(encode_frame(ten_bytes).size() == 10);
    CHECK(frame_airtime(ten_bytes, LinkDir::TagToReader, t) == 10);

    t.frame_overhead_us = 100;
    CHECK(frame_airtime(ten_bytes, LinkDir::TagToReader, t) == 110);

    // longer frames never get cheaper
    t.frame_overhead_us = 0;
    Frame longer = ReaderAuthToken{TagIdentity{0}, Nonce64{}, AuthToken{}};
    CHECK(frame_airtime(longer, LinkDir::ReaderToTag, t) >=
          frame_airtime(ten_bytes, LinkDir::ReaderToTag, t));
}

TEST_CASE("the 3-tag demo reproduces the worked schedule") {
    Scenario s = demo3_scenario();

    SUBCASE("interleaved auth phase takes 12000 us") {
        RunResult run = run_scenario(s);
        CHECK(run.metrics.auth_time_us == 12000);
        CHECK(run.metrics.queries == 5);
        CHECK(run.metrics.auth_attempts == 3);
        CHECK(run.metrics.auth_verified == 3);
        CHECK(run.metrics.auth_failed == 0);
        CHECK(run.metrics.stay_quiets == 3);
        CHECK(run.metrics.total_time_us ==
              run.metrics.inventory_time_us + run.metrics.auth_time_us);
    }
    SUBCASE("sequential auth phase takes 24000 us") {
        s.mode = ScenarioMode::SeqAuth;
        RunResult run = run_scenario(s);
        CHECK(run.metrics.auth_time_us == 24000);
        CHECK(run.metrics.auth_verified == 3);
    }
}

TEST_CASE("an empty population costs one query and no collisions") {
    Scenario s;
    s.timing = flat_timing();
    RunResult run = run_scenario(s);
    CHECK(run.metrics.queries == 1);
    CHECK(run.metrics.collisions == 0);
    CHECK(run.inventory.found.empty());
    // one 1000 us command plus the silent reply deadline
    CHECK(run.metrics.total_time_us == 1000 + s.timing.reply_deadline_us);
}

TEST_CASE("same seed, same bytes") {
    for (ScenarioMode mode : {ScenarioMode::Inventory, ScenarioMode::SeqAuth,
                              ScenarioMode::InterleavedAuth, ScenarioMode::Mutual}) {
        Scenario s = demo3_scenario();
        s.mode = mode;
        RunResult a = run_scenario(s);
        RunResult b = run_scenario(s);
        CHECK(a.trace.serialize() == b.trace.serialize());
        CHECK(a.metrics.to_json() == b.metrics.to_json());
    }
}

TEST_CASE("event times never decrease") {
    Scenario s = demo3_scenario();
    s.mode = ScenarioMode::Mutual;
    RunResult run = run_scenario(s);
    REQUIRE(!run.trace.events.empty());
    for (size_t i = 1; i < run.trace.events.size(); ++i)
        CHECK(run.trace.events[i - 1].time_us <= run.trace.events[i].time_us);
}

TEST_CASE("metrics are a pure function of the trace") {
    for (ScenarioMode mode : {ScenarioMode::Inventory, ScenarioMode::SeqAuth,
                              ScenarioMode::InterleavedAuth, ScenarioMode::Mutual}) {
        Scenario s = demo3_scenario();
        s.mode = mode;
        RunResult run = run_scenario(s);
        CHECK(recompute_metrics(run.trace, s.power) == run.metrics);
    }
}

TEST_CASE("metrics serialize flat with the canonical field names") {
    Scenario s = demo3_scenario();
    RunResult run = run_scenario(s);
    auto j = nlohmann::json::parse(run.metrics.to_json());
    for (const char* field :
         {"total_time_us", "queries", "collisions", "stay_quiets",
          "auth_attempts", "auth_verified", "auth_failed", "busy_replies",
          "max_tag_current_uA", "inventory_time_us", "auth_time_us"})
        CHECK_MESSAGE(j.contains(field), "missing ", field);
    CHECK(j["queries"] == 5);
    CHECK(j["auth_time_us"] == 12000);
}

TEST_CASE("power check flags compute phases over budget") {
    Scenario s = demo3_scenario();
    s.mode = ScenarioMode::SeqAuth;

    SUBCASE("8 uA compute under a 10 uA budget passes") {
        RunResult run = run_scenario(s);
        PowerReport report = power_check(run.trace, s.power);
        CHECK(report.violations.empty());
        CHECK(report.max_current_uA == 8);
        CHECK(run.metrics.max_tag_current_uA == 8);
    }
    SUBCASE("12 uA compute is flagged on every computing interval") {
        s.power.compute_current_uA = 12;
        RunResult run = run_scenario(s);
        PowerReport report = power_check(run.trace, s.power);
        // one computing interval per tag
        CHECK(report.violations.size() == 3);
        for (const auto& v : report.violations) {
            CHECK(v.phase == "compute");
            CHECK(v.current_uA == 12);
            CHECK(v.end_us - v.start_us == s.timing.aes_latency_us());
        }
        CHECK(report.max_current_uA == 12);
        CHECK(run.metrics.max_tag_current_uA == 12);
    }
}

TEST_CASE("trace lines follow the documented format") {
    Scenario s = demo3_scenario();
    RunResult run = run_scenario(s);
    std::string text = run.trace.serialize();
    REQUIRE(!text.empty());
    CHECK(text.back() == '\n');

    // first line: population marker for the first tag at t=0
    auto eol = text.find('\n');
    CHECK(text.substr(0, eol) == "0 tag:11223344556677 StateChange mode=ready");

    // reader transmissions carry hex plus decoded form
    CHECK(text.find("reader TxStart 01002e3e Inventory{len=0}") !=
          std::string::npos);
}

TEST_CASE("transmissions only overlap inside one reply window") {
    Scenario s = demo3_scenario();
    s.mode = ScenarioMode::Mutual;
    RunResult run = run_scenario(s);

    struct Tx {
        std::string actor;
        uint64_t start = 0, end = 0;
    };
    std::vector<Tx> txs;
    std::map<std::string, uint64_t> open;
    for (const auto& e : run.trace.events) {
        if (e.kind == EventKind::TxStart) open[e.actor] = e.time_us;
        if (e.kind == EventKind::TxEnd)
            txs.push_back({e.actor, open[e.actor], e.time_us});
    }
    REQUIRE(!txs.empty());
    for (size_t i = 0; i < txs.size(); ++i) {
        for (size_t j = i + 1; j < txs.size(); ++j) {
            bool overlap =
                txs[i].start < txs[j].end && txs[j].start < txs[i].end;
            if (!overlap) continue;
            // only tag replies may share a window; the reader never overlaps
            CHECK(txs[i].actor != "reader");
            CHECK(txs[j].actor != "reader");
        }
    }
}

TEST_CASE("busy replies are counted") {
    // challenge a slow tag: the 5000 us latency exceeds the 2000 us deadline
    Scenario s = demo3_scenario();
    Simulator sim(SimConfig{s.timing, s.power, s.seed}, s.tags);
    TagVerdict v = authenticate_tag_challenge(sim, s.tags[0].id);
    CHECK(v.outcome == AuthOutcome::FailedBusy);
    CHECK(sim.metrics().busy_replies == 1);
}

TEST_CASE("garbled injections are recorded by error kind and ignored") {
    Scenario s = demo3_scenario();
    Simulator sim(SimConfig{s.timing, s.power, s.seed}, s.tags);

    auto bytes = encode_frame(StayQuiet{s.tags[0].id});
    bytes.back() ^= 0xFF;
    auto err = sim.inject_raw(bytes);
    REQUIRE(err.has_value());
    CHECK(*err == DecodeError::BadCrc);
    CHECK(sim.trace().serialize().find("garbled") != std::string::npos);
    CHECK(sim.trace().serialize().find("BadCrc") != std::string::npos);

    // the tag ignored the garbled stay-quiet and still answers inventory
    ChannelOutcome out = sim.exchange(Inventory{Prefix{2, 0b00}});
    CHECK(out.kind == ChannelOutcome::Kind::Single);

    // a well-formed injection does take effect
    CHECK_FALSE(sim.inject_raw(encode_frame(StayQuiet{s.tags[0].id})).has_value());
    CHECK(sim.exchange(Inventory{Prefix{2, 0b00}}).kind ==
          ChannelOutcome::Kind::Silence);
}

TEST_CASE("alias-mode tags resolve to key_unknown in auth modes") {
    Scenario s;
    s.timing = flat_timing();
    s.mode = ScenarioMode::SeqAuth;
    s.tags.push_back(
        make_tag("0123456789abcd", "d0d1d2d3d4d5d6d7d8d9dadbdcdddedf"));
    s.tags[0].alias_mode = true;

    RunResult run = run_scenario(s);
    REQUIRE(run.verdicts.size() == 1);
    CHECK(run.verdicts[0].outcome == AuthOutcome::KeyUnknown);
    // the alias, not the true id, is what the reader saw
    CHECK(run.inventory.found[0].value != uint64_t{0x0123456789abcd});
}
