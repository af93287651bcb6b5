#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rfidsim/crypto.hpp"
#include "rfidsim/frame.hpp"
#include "rfidsim/timing.hpp"

namespace rfidsim {

constexpr size_t kMemoryPages = 16;
constexpr size_t kPageBytes = 16;

struct TagConfig {
    TagIdentity id;
    Key128 key;
    std::array<std::array<uint8_t, kPageBytes>, kMemoryPages> memory{};
    bool require_reader_auth = false;
    /// Answer with a per-session random alias instead of the true id.
    bool alias_mode = false;
};

enum class TagMode {
    Ready,
    Quiet,      // silenced for the rest of the inventory round
    Computing,  // token in flight, answers RR once now >= ready_at
};

struct TagState {
    explicit TagState(NoncePrng nonce_prng) : prng(std::move(nonce_prng)) {}

    TagMode mode = TagMode::Ready;
    AuthToken pending_token{};
    Nonce64 pending_tag_nonce{};
    uint64_t ready_at_us = 0;
    std::optional<TagIdentity> session_alias;
    bool reader_authenticated = false;
    std::set<Nonce64> issued_nonces;  // offered to the reader, unconsumed
    std::set<Nonce64> used_nonces;    // consumed by a verified reader token
    NoncePrng prng;                   // per-tag deterministic nonce/alias source
};

/// What the tag does in response to one delivered frame. `reply_at_us` is
/// when the reply transmission starts (later than `now` only for a
/// challenge the tag must first compute on). `compute_until_us` marks a
/// crypto computation running from `now`, for power accounting.
/// `state_changes` are trace notes.
struct TagStepResult {
    std::optional<Frame> reply;
    uint64_t reply_at_us = 0;
    std::optional<uint64_t> compute_until_us;
    std::vector<std::string> state_changes;
};

TagState init_tag_state(const TagConfig& config, NoncePrng prng);

/// Models the tag leaving and re-entering the field: Ready mode, reader
/// auth dropped, nonce history cleared, fresh alias when alias_mode.
void tag_session_reset(TagState& state, const TagConfig& config);

/// The id this tag answers to (session alias when alias_mode).
TagIdentity tag_effective_id(const TagState& state, const TagConfig& config);

/// Deterministic dispatch of one received frame. Quiet suppresses only
/// inventory replies; addressed commands keep working after stay-quiet,
/// which is what lets the reader authenticate singulated tags.
TagStepResult tag_step(TagState& state, const TagConfig& config,
                       const Frame& frame, uint64_t now_us,
                       const TimingModel& timing);

}  // namespace rfidsim
