#include <doctest.h>

#include "helpers.hpp"
#include "rfidsim/tag.hpp"

using namespace rfidsim;
using namespace testutil;

namespace {

TagConfig demo_config() {
    return make_tag("11223344556677", "000102030405060708090a0b0c0d0e0f");
}

TagState fresh_state(const TagConfig& config, uint64_t seed = 1) {
    return init_tag_state(config, NoncePrng::from_seed(seed));
}

}  // namespace

TEST_CASE("a ready tag answers the empty-prefix inventory with its id") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    auto res = tag_step(state, config, Inventory{Prefix{0, 0}}, 0, flat_timing());
    REQUIRE(res.reply.has_value());
    CHECK(std::get<TagReply>(*res.reply).id == config.id);
}

TEST_CASE("prefix gating: only matching inventories are answered") {
    TagConfig config = demo_config();  // id starts 0x11 = bits 00010001
    TagState state = fresh_state(config);
    CHECK(tag_step(state, config, Inventory{Prefix{2, 0b00}}, 0, flat_timing())
              .reply.has_value());
    CHECK_FALSE(
        tag_step(state, config, Inventory{Prefix{2, 0b01}}, 0, flat_timing())
            .reply.has_value());
}

TEST_CASE("stay-quiet silences inventory but not addressed commands") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();

    auto quiet = tag_step(state, config, StayQuiet{config.id}, 100, timing);
    CHECK(state.mode == TagMode::Quiet);
    CHECK_FALSE(quiet.reply.has_value());
    CHECK(quiet.state_changes == std::vector<std::string>{"mode=quiet"});

    CHECK_FALSE(tag_step(state, config, Inventory{Prefix{0, 0}}, 200, timing)
                    .reply.has_value());

    // addressed AR still lands: the reader talks to singulated (quieted) tags
    Nonce64 nonce = nonce_from_hex("0102030405060708");
    auto ar = tag_step(state, config, AuthRequestAr{config.id, nonce}, 300, timing);
    CHECK_FALSE(ar.reply.has_value());
    CHECK(state.mode == TagMode::Computing);
    CHECK(state.ready_at_us == 300 + timing.aes_latency_us());
}

TEST_CASE("a tag never reacts to frames addressed elsewhere") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TagIdentity other{0x7777777777};
    TimingModel timing = flat_timing();

    CHECK_FALSE(tag_step(state, config, StayQuiet{other}, 0, timing).reply);
    CHECK(state.mode == TagMode::Ready);
    CHECK_FALSE(tag_step(state, config,
                         AuthRequestAr{other, nonce_from_hex("0000000000000001")},
                         0, timing)
                    .reply);
    CHECK(state.mode == TagMode::Ready);
    CHECK_FALSE(tag_step(state, config, ResponseRequestRr{other}, 0, timing).reply);
    CHECK_FALSE(tag_step(state, config, ReadMemory{other, 0}, 0, timing).reply);
}

TEST_CASE("AR then RR honours the compute latency") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();  // 5000 us latency
    Nonce64 nonce = nonce_from_hex("00112233deadbeef");

    auto ar = tag_step(state, config, AuthRequestAr{config.id, nonce}, 1000, timing);
    CHECK_FALSE(ar.reply.has_value());
    CHECK(state.ready_at_us == 6000);
    CHECK(ar.compute_until_us == 6000);

    // too early: still computing
    auto early = tag_step(state, config, ResponseRequestRr{config.id}, 4000, timing);
    REQUIRE(early.reply.has_value());
    CHECK(std::holds_alternative<Busy>(*early.reply));
    CHECK(state.mode == TagMode::Computing);

    auto done = tag_step(state, config, ResponseRequestRr{config.id}, 6000, timing);
    REQUIRE(done.reply.has_value());
    const auto& resp = std::get<AuthResponse>(*done.reply);
    CHECK(verify_token(config.key, Direction::TagToReader, nonce, config.id,
                       resp.token));
    CHECK(state.mode == TagMode::Ready);
}

TEST_CASE("RR with nothing in flight is answered Busy") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    auto res = tag_step(state, config, ResponseRequestRr{config.id}, 0,
                        flat_timing());
    REQUIRE(res.reply.has_value());
    CHECK(std::holds_alternative<Busy>(*res.reply));
}

TEST_CASE("a second AR overwrites the computation in flight") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();
    Nonce64 n1 = nonce_from_hex("0000000000000001");
    Nonce64 n2 = nonce_from_hex("0000000000000002");

    tag_step(state, config, AuthRequestAr{config.id, n1}, 0, timing);
    tag_step(state, config, AuthRequestAr{config.id, n2}, 2000, timing);
    CHECK(state.ready_at_us == 2000 + timing.aes_latency_us());

    auto res = tag_step(state, config, ResponseRequestRr{config.id},
                        state.ready_at_us, timing);
    REQUIRE(res.reply.has_value());
    CHECK(verify_token(config.key, Direction::TagToReader, n2, config.id,
                       std::get<AuthResponse>(*res.reply).token));
}

TEST_CASE("challenge path: immediate compute only within the deadline") {
    TagConfig config = demo_config();
    Nonce64 nonce = nonce_from_hex("1122334455667788");

    SUBCASE("latency within deadline: token after the compute gap") {
        TimingModel timing = flat_timing();
        timing.aes_cycles = 100;  // 1000 us <= 2000 us deadline
        TagState state = fresh_state(config);
        auto res =
            tag_step(state, config, AuthChallenge{config.id, nonce}, 500, timing);
        REQUIRE(res.reply.has_value());
        CHECK(res.reply_at_us == 1500);
        CHECK(res.compute_until_us == 1500);
        CHECK(verify_token(config.key, Direction::TagToReader, nonce, config.id,
                           std::get<AuthResponse>(*res.reply).token));
    }
    SUBCASE("latency beyond deadline: Busy") {
        TimingModel timing = flat_timing();  // 5000 us > 2000 us deadline
        TagState state = fresh_state(config);
        auto res =
            tag_step(state, config, AuthChallenge{config.id, nonce}, 500, timing);
        REQUIRE(res.reply.has_value());
        CHECK(std::holds_alternative<Busy>(*res.reply));
    }
}

TEST_CASE("reader authentication needs a fresh tag-issued nonce") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();
    Nonce64 reader_nonce = nonce_from_hex("00000000000000aa");

    // obtain the tag nonce through an AR/RR exchange
    tag_step(state, config, AuthRequestAr{config.id, reader_nonce}, 0, timing);
    auto rr = tag_step(state, config, ResponseRequestRr{config.id},
                       state.ready_at_us, timing);
    Nonce64 tag_nonce = std::get<AuthResponse>(*rr.reply).tag_nonce;

    SUBCASE("valid token over the issued nonce is accepted silently") {
        AuthToken tok =
            compute_token(config.key, Direction::ReaderToTag, tag_nonce, config.id);
        auto res = tag_step(state, config,
                            ReaderAuthToken{config.id, tag_nonce, tok}, 9000,
                            timing);
        CHECK_FALSE(res.reply.has_value());
        CHECK(state.reader_authenticated);

        // a replay of the same token in the same session is rejected
        TagState replayed = state;
        auto again = tag_step(replayed, config,
                              ReaderAuthToken{config.id, tag_nonce, tok}, 9500,
                              timing);
        REQUIRE(again.reply.has_value());
        CHECK(std::get<ErrorFrame>(*again.reply).code ==
              static_cast<uint8_t>(ErrorCode::ReaderAuthFailed));
    }
    SUBCASE("wrong key is rejected") {
        Key128 wrong = key_from_hex("ffffffffffffffffffffffffffffffff");
        AuthToken tok =
            compute_token(wrong, Direction::ReaderToTag, tag_nonce, config.id);
        auto res = tag_step(state, config,
                            ReaderAuthToken{config.id, tag_nonce, tok}, 9000,
                            timing);
        REQUIRE(res.reply.has_value());
        CHECK_FALSE(state.reader_authenticated);
    }
    SUBCASE("a nonce the tag never issued is rejected") {
        Nonce64 foreign = nonce_from_hex("1234567812345678");
        AuthToken tok =
            compute_token(config.key, Direction::ReaderToTag, foreign, config.id);
        auto res = tag_step(state, config,
                            ReaderAuthToken{config.id, foreign, tok}, 9000,
                            timing);
        REQUIRE(res.reply.has_value());
        CHECK_FALSE(state.reader_authenticated);
    }
}

TEST_CASE("memory access is gated on reader authentication") {
    TagConfig config = demo_config();
    config.require_reader_auth = true;
    config.memory[3] = {0xde, 0xad, 0xbe, 0xef, 0, 0, 0, 0,
                        0,    0,    0,    0,    0, 0, 0, 0};
    TimingModel timing = flat_timing();

    SUBCASE("denied without reader auth") {
        TagState state = fresh_state(config);
        auto res = tag_step(state, config, ReadMemory{config.id, 3}, 0, timing);
        REQUIRE(res.reply.has_value());
        CHECK(std::get<ErrorFrame>(*res.reply).code ==
              static_cast<uint8_t>(ErrorCode::MemoryDenied));
    }
    SUBCASE("served once authenticated") {
        TagState state = fresh_state(config);
        state.reader_authenticated = true;
        auto res = tag_step(state, config, ReadMemory{config.id, 3}, 0, timing);
        REQUIRE(res.reply.has_value());
        CHECK(std::get<MemoryData>(*res.reply).payload == config.memory[3]);
    }
    SUBCASE("served freely when the gate is off") {
        TagConfig open = config;
        open.require_reader_auth = false;
        TagState state = fresh_state(open);
        auto res = tag_step(state, open, ReadMemory{open.id, 3}, 0, timing);
        REQUIRE(res.reply.has_value());
        CHECK(std::holds_alternative<MemoryData>(*res.reply));
    }
    SUBCASE("out-of-range page") {
        TagState state = fresh_state(config);
        state.reader_authenticated = true;
        auto res = tag_step(state, config, ReadMemory{config.id, 16}, 0, timing);
        REQUIRE(res.reply.has_value());
        CHECK(std::get<ErrorFrame>(*res.reply).code ==
              static_cast<uint8_t>(ErrorCode::BadAddress));
    }
}

TEST_CASE("session reset restores inventory participation") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();

    tag_step(state, config, StayQuiet{config.id}, 0, timing);
    CHECK_FALSE(tag_step(state, config, Inventory{Prefix{0, 0}}, 1, timing).reply);
    tag_session_reset(state, config);
    CHECK(tag_step(state, config, Inventory{Prefix{0, 0}}, 2, timing).reply);
}

TEST_CASE("alias mode draws an independent alias per session") {
    TagConfig config = demo_config();
    config.alias_mode = true;
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();

    auto first = tag_step(state, config, Inventory{Prefix{0, 0}}, 0, timing);
    REQUIRE(first.reply.has_value());
    TagIdentity alias1 = std::get<TagReply>(*first.reply).id;
    CHECK(alias1 != config.id);

    tag_session_reset(state, config);
    auto second = tag_step(state, config, Inventory{Prefix{0, 0}}, 1, timing);
    REQUIRE(second.reply.has_value());
    TagIdentity alias2 = std::get<TagReply>(*second.reply).id;
    CHECK(alias1 != alias2);
}

TEST_CASE("without alias mode the reply id is stable across sessions") {
    TagConfig config = demo_config();
    TagState state = fresh_state(config);
    TimingModel timing = flat_timing();

    for (int s = 0; s < 3; ++s) {
        auto res = tag_step(state, config, Inventory{Prefix{0, 0}},
                            static_cast<uint64_t>(s), timing);
        REQUIRE(res.reply.has_value());
        CHECK(std::get<TagReply>(*res.reply).id == config.id);
        tag_session_reset(state, config);
    }
}
