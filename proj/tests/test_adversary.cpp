#include <doctest.h>

#include "helpers.hpp"
#include "rfidsim/adversary.hpp"

using namespace rfidsim;
using namespace testutil;

namespace {

class FixedNonceSource final : public NonceSource {
public:
    explicit FixedNonceSource(Nonce64 nonce) : nonce_(nonce) {}
    Nonce64 next() override { return nonce_; }

private:
    Nonce64 nonce_;
};

}  // namespace

TEST_CASE("replayed tokens never verify against fresh nonces") {
    AttackResult result = replay_attack(demo3_scenario(), 200, 11);
    CHECK(result.trials == 200);
    CHECK(result.successes == 0);
    CHECK(result.notes == "captured_exchanges=3");
    REQUIRE(!result.sample_transcripts.empty());
    CHECK(result.sample_transcripts[0].find("AuthResponse") != std::string::npos);
}

TEST_CASE("forcing the prng to repeat the nonce makes replay succeed") {
    // test of the test: with an identical challenge the recorded token is valid
    Scenario s = demo3_scenario();
    s.mode = ScenarioMode::SeqAuth;
    RunResult recorded = run_scenario(s);
    auto captured = capture_auth_exchanges(recorded.trace);
    REQUIRE(!captured.empty());

    Simulator sim(SimConfig{s.timing, s.power, s.seed});
    const TagConfig& victim = s.tags[0];
    REQUIRE(captured[0].id == victim.id);
    sim.keystore().set(victim.id, victim.key);
    sim.add_responder(make_replay_tag(captured[0].id, captured[0].response));
    sim.set_nonce_source(
        std::make_unique<FixedNonceSource>(captured[0].reader_nonce));

    TagIdentity ids[] = {victim.id};
    auto verdicts = auth_sequential(sim, ids);
    CHECK(verdicts[0].outcome == AuthOutcome::Verified);
}

TEST_CASE("a token replayed under a different id fails") {
    Scenario s = demo3_scenario();
    s.mode = ScenarioMode::SeqAuth;
    RunResult recorded = run_scenario(s);
    auto captured = capture_auth_exchanges(recorded.trace);
    REQUIRE(captured.size() == 3);

    // present tag 0's token from an impostor carrying tag 1's id
    Simulator sim(SimConfig{s.timing, s.power, 99});
    sim.keystore().set(s.tags[1].id, s.tags[1].key);
    sim.add_responder(make_replay_tag(s.tags[1].id, captured[0].response));
    TagIdentity ids[] = {s.tags[1].id};
    auto verdicts = auth_sequential(sim, ids);
    CHECK(verdicts[0].outcome == AuthOutcome::FailedWrongToken);
}

TEST_CASE("random-token clones never verify") {
    Scenario s = demo3_scenario();
    AttackResult result = clone_attack(s, s.tags[0].id, 200, 5);
    CHECK(result.trials == 200);
    CHECK(result.successes == 0);
}

TEST_CASE("a clone holding the real key walks right in") {
    // the shared-key caveat: compromise one key and the system is open
    Scenario s = demo3_scenario();
    Simulator sim(SimConfig{s.timing, s.power, 13});
    sim.keystore().set(s.tags[0].id, s.tags[0].key);
    sim.add_tag(s.tags[0]);  // "bogus" tag with the genuine key
    TagIdentity ids[] = {s.tags[0].id};
    auto verdicts = auth_sequential(sim, ids);
    CHECK(verdicts[0].outcome == AuthOutcome::Verified);
}

TEST_CASE("a clone of an id the keystore never knew yields KeyUnknown") {
    Scenario s = demo3_scenario();
    TagIdentity foreign{0x0f0f0f0f0f0f0f};
    AttackResult result = clone_attack(s, foreign, 50, 5);
    CHECK(result.successes == 0);
    CHECK(result.notes.find("unknown to keystore") != std::string::npos);
    CHECK(result.notes.find("key_unknown=50") != std::string::npos);
}

TEST_CASE("constant ids link every session; aliases link none") {
    Scenario s;
    s.timing = flat_timing();
    s.tags.push_back(
        make_tag("0123456789abcd", "d0d1d2d3d4d5d6d7d8d9dadbdcdddedf"));
    s.tags[0].require_reader_auth = true;

    SUBCASE("alias off: sessions-1 linkages") {
        AttackResult result = tracking_probe(s, 10, 3);
        CHECK(result.successes == 9);
        CHECK(result.notes == "memory_denied=10/10 distinct_ids=1");
    }
    SUBCASE("alias on: no linkages, memory still denied") {
        s.tags[0].alias_mode = true;
        AttackResult result = tracking_probe(s, 100, 3);
        CHECK(result.successes == 0);
        CHECK(result.notes == "memory_denied=100/100 distinct_ids=100");
    }
}

TEST_CASE("honest transcripts never contain key bytes") {
    Scenario s = demo3_scenario();
    for (ScenarioMode mode : {ScenarioMode::SeqAuth, ScenarioMode::Mutual}) {
        s.mode = mode;
        RunResult run = run_scenario(s);
        std::vector<Key128> keys;
        for (const auto& t : s.tags) keys.push_back(t.key);
        CHECK_FALSE(transcript_contains_key(run.trace, keys));
    }
}

TEST_CASE("the key scan does catch a planted key") {
    Key128 key = key_from_hex("00112233445566778899aabbccddeeff");
    Trace trace;
    // a frame whose body happens to carry the key bytes verbatim
    trace.push(0, "tag:deadbeefdead00", EventKind::TxStart,
               to_hex(encode_frame(MemoryData{key.bytes})) + " MemoryData{...}");
    std::vector<Key128> keys{key};
    CHECK(transcript_contains_key(trace, keys));
}

TEST_CASE("attack results serialize as the documented json object") {
    Scenario s = demo3_scenario();
    AttackResult result = clone_attack(s, s.tags[0].id, 3, 1);
    std::string json = result.to_json();
    CHECK(json.find("\"name\": \"clone\"") != std::string::npos);
    CHECK(json.find("\"trials\": 3") != std::string::npos);
    CHECK(json.find("\"successes\": 0") != std::string::npos);
    CHECK(json.find("\"notes\"") != std::string::npos);
    CHECK(json.back() == '\n');
}
