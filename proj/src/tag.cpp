#include "rfidsim/tag.hpp"

#include <algorithm>

namespace rfidsim {

namespace {

TagIdentity draw_alias(NoncePrng& prng) {
    Nonce64 n = prng.next();
    std::array<uint8_t, 7> b{};
    std::copy_n(n.bytes.begin(), 7, b.begin());
    return TagIdentity::from_bytes(b);
}

std::string computing_note(uint64_t ready_at) {
    return "computing ready_at=" + std::to_string(ready_at);
}

}  // namespace

TagState init_tag_state(const TagConfig& config, NoncePrng prng) {
    TagState state(std::move(prng));
    if (config.alias_mode) state.session_alias = draw_alias(state.prng);
    return state;
}

void tag_session_reset(TagState& state, const TagConfig& config) {
    state.mode = TagMode::Ready;
    state.reader_authenticated = false;
    state.issued_nonces.clear();
    state.used_nonces.clear();
    state.pending_token = AuthToken{};
    state.pending_tag_nonce = Nonce64{};
    state.ready_at_us = 0;
    state.session_alias =
        config.alias_mode ? std::optional(draw_alias(state.prng)) : std::nullopt;
}

TagIdentity tag_effective_id(const TagState& state, const TagConfig& config) {
    return state.session_alias.value_or(config.id);
}

TagStepResult tag_step(TagState& state, const TagConfig& config,
                       const Frame& frame, uint64_t now_us,
                       const TimingModel& timing) {
    TagStepResult out;
    out.reply_at_us = now_us;
    const TagIdentity self = tag_effective_id(state, config);

    auto addressed = [&](TagIdentity target) { return target == self; };

    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Inventory>) {
                if (state.mode == TagMode::Ready &&
                    matches_prefix(self, v.prefix))
                    out.reply = TagReply{self};
            } else if constexpr (std::is_same_v<T, StayQuiet>) {
                if (addressed(v.id) && state.mode != TagMode::Quiet) {
                    state.mode = TagMode::Quiet;
                    out.state_changes.push_back("mode=quiet");
                }
            } else if constexpr (std::is_same_v<T, AuthChallenge>) {
                if (!addressed(v.id)) return;
                if (state.mode == TagMode::Computing) {
                    out.reply = Busy{};
                    return;
                }
                uint64_t latency = timing.aes_latency_us();
                if (latency > timing.reply_deadline_us) {
                    // single-exchange result would miss the reply slot
                    out.reply = Busy{};
                    return;
                }
                Nonce64 tag_nonce = state.prng.next();
                state.issued_nonces.insert(tag_nonce);
                AuthToken token = compute_token(config.key,
                                                Direction::TagToReader, v.nonce,
                                                config.id);
                out.reply = AuthResponse{token, tag_nonce};
                out.reply_at_us = now_us + latency;
                out.compute_until_us = now_us + latency;
                out.state_changes.push_back(computing_note(*out.compute_until_us));
            } else if constexpr (std::is_same_v<T, AuthRequestAr>) {
                if (!addressed(v.id)) return;
                // a second AR overwrites any computation in flight
                state.pending_token = compute_token(
                    config.key, Direction::TagToReader, v.nonce, config.id);
                state.pending_tag_nonce = state.prng.next();
                state.issued_nonces.insert(state.pending_tag_nonce);
                state.mode = TagMode::Computing;
                state.ready_at_us = now_us + timing.aes_latency_us();
                out.compute_until_us = state.ready_at_us;
                out.state_changes.push_back("mode=" + computing_note(state.ready_at_us));
            } else if constexpr (std::is_same_v<T, ResponseRequestRr>) {
                if (!addressed(v.id)) return;
                if (state.mode == TagMode::Computing &&
                    now_us >= state.ready_at_us) {
                    out.reply =
                        AuthResponse{state.pending_token, state.pending_tag_nonce};
                    state.mode = TagMode::Ready;
                    out.state_changes.push_back("mode=ready");
                } else {
                    // still computing, or nothing in flight
                    out.reply = Busy{};
                }
            } else if constexpr (std::is_same_v<T, ReaderAuthToken>) {
                if (!addressed(v.id)) return;
                bool fresh = state.issued_nonces.contains(v.nonce) &&
                             !state.used_nonces.contains(v.nonce);
                if (fresh && verify_token(config.key, Direction::ReaderToTag,
                                          v.nonce, config.id, v.token)) {
                    state.reader_authenticated = true;
                    state.used_nonces.insert(v.nonce);
                    state.issued_nonces.erase(v.nonce);
                    out.state_changes.push_back("reader_authenticated=1");
                } else {
                    out.reply =
                        ErrorFrame{static_cast<uint8_t>(ErrorCode::ReaderAuthFailed)};
                }
            } else if constexpr (std::is_same_v<T, ReadMemory>) {
                if (!addressed(v.id)) return;
                if (v.addr >= kMemoryPages) {
                    out.reply =
                        ErrorFrame{static_cast<uint8_t>(ErrorCode::BadAddress)};
                } else if (!config.require_reader_auth ||
                           state.reader_authenticated) {
                    out.reply = MemoryData{config.memory[v.addr]};
                } else {
                    out.reply =
                        ErrorFrame{static_cast<uint8_t>(ErrorCode::MemoryDenied)};
                }
            } else {
                // tag-originated frame types; a tag ignores them
            }
        },
        frame);
    return out;
}

}  // namespace rfidsim
