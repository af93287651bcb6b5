#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rfidsim/engine.hpp"
#include "rfidsim/frame.hpp"
#include "rfidsim/hex.hpp"
#include "rfidsim/scenario.hpp"

namespace testutil {

inline std::vector<uint8_t> hex_bytes(std::string_view h) {
    auto v = rfidsim::from_hex(h);
    if (!v) throw std::runtime_error("bad hex in test: " + std::string(h));
    return *v;
}

inline rfidsim::Key128 key_from_hex(std::string_view h) {
    auto v = hex_bytes(h);
    if (v.size() != 16) throw std::runtime_error("key hex must be 32 chars");
    rfidsim::Key128 k;
    std::copy(v.begin(), v.end(), k.bytes.begin());
    return k;
}

inline rfidsim::Block128 block_from_hex(std::string_view h) {
    auto v = hex_bytes(h);
    if (v.size() != 16) throw std::runtime_error("block hex must be 32 chars");
    rfidsim::Block128 b;
    std::copy(v.begin(), v.end(), b.bytes.begin());
    return b;
}

inline rfidsim::Nonce64 nonce_from_hex(std::string_view h) {
    auto v = hex_bytes(h);
    if (v.size() != 8) throw std::runtime_error("nonce hex must be 16 chars");
    rfidsim::Nonce64 n;
    std::copy(v.begin(), v.end(), n.bytes.begin());
    return n;
}

inline rfidsim::Key128 rand_key(std::mt19937_64& rng) {
    rfidsim::Key128 k;
    for (auto& b : k.bytes) b = static_cast<uint8_t>(rng());
    return k;
}

inline rfidsim::Block128 rand_block(std::mt19937_64& rng) {
    rfidsim::Block128 b;
    for (auto& x : b.bytes) x = static_cast<uint8_t>(rng());
    return b;
}

inline rfidsim::Nonce64 rand_nonce(std::mt19937_64& rng) {
    rfidsim::Nonce64 n;
    for (auto& x : n.bytes) x = static_cast<uint8_t>(rng());
    return n;
}

inline rfidsim::TagIdentity rand_id(std::mt19937_64& rng) {
    return rfidsim::TagIdentity{rng() & rfidsim::TagIdentity::kMax};
}

inline rfidsim::Frame random_frame(std::mt19937_64& rng) {
    switch (rng() % 12) {
        case 0: {
            uint8_t len = static_cast<uint8_t>(rng() % 57);
            uint64_t bits = len == 0 ? 0 : rng() & ((uint64_t{1} << len) - 1);
            return rfidsim::Inventory{rfidsim::Prefix{len, bits}};
        }
        case 1:
            return rfidsim::TagReply{rand_id(rng)};
        case 2:
            return rfidsim::StayQuiet{rand_id(rng)};
        case 3:
            return rfidsim::AuthChallenge{rand_id(rng), rand_nonce(rng)};
        case 4:
            return rfidsim::AuthResponse{rfidsim::AuthToken{rand_block(rng)},
                                         rand_nonce(rng)};
        case 5:
            return rfidsim::AuthRequestAr{rand_id(rng), rand_nonce(rng)};
        case 6:
            return rfidsim::ResponseRequestRr{rand_id(rng)};
        case 7:
            return rfidsim::ReaderAuthToken{rand_id(rng), rand_nonce(rng),
                                            rfidsim::AuthToken{rand_block(rng)}};
        case 8:
            return rfidsim::ReadMemory{rand_id(rng),
                                       static_cast<uint16_t>(rng())};
        case 9: {
            rfidsim::MemoryData m;
            for (auto& b : m.payload) b = static_cast<uint8_t>(rng());
            return m;
        }
        case 10:
            return rfidsim::Busy{};
        default:
            return rfidsim::ErrorFrame{static_cast<uint8_t>(rng())};
    }
}

/// Flat per-frame timing: every frame up to 125 bytes costs exactly
/// 1000 us on the air, and the AES latency is 5000 us.
inline rfidsim::TimingModel flat_timing() {
    rfidsim::TimingModel t;
    t.reader_bits_per_sec = 1'000'000'000;
    t.tag_bits_per_sec = 1'000'000'000;
    t.frame_overhead_us = 999;
    t.tag_clock_hz = 100'000;
    t.aes_cycles = 500;
    t.reply_deadline_us = 2'000;
    return t;
}

inline rfidsim::TagConfig make_tag(std::string_view id_hex,
                                   std::string_view key_hex) {
    rfidsim::TagConfig t;
    auto idb = hex_bytes(id_hex);
    if (idb.size() != 7) throw std::runtime_error("id hex must be 14 chars");
    t.id = rfidsim::TagIdentity::from_bytes(
        std::span<const uint8_t, 7>(idb.data(), 7));
    t.key = key_from_hex(key_hex);
    return t;
}

/// Programmatic twin of scenarios/demo3.json: three tags whose top id
/// bits are 00, 01 and 10, flat 1000 us frames, 5000 us AES latency.
inline rfidsim::Scenario demo3_scenario() {
    rfidsim::Scenario s;
    s.tags = {
        make_tag("11223344556677", "000102030405060708090a0b0c0d0e0f"),
        make_tag("55aa55aa55aa55", "101112131415161718191a1b1c1d1e1f"),
        make_tag("99887766554433", "202122232425262728292a2b2c2d2e2f"),
    };
    s.timing = flat_timing();
    s.mode = rfidsim::ScenarioMode::InterleavedAuth;
    s.seed = 42;
    return s;
}

}  // namespace testutil
