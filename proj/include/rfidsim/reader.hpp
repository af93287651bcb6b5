#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfidsim/crypto.hpp"
#include "rfidsim/frame.hpp"

namespace rfidsim {

class Simulator;

/// Back-end database: tag identity -> shared key. An id absent from the
/// store is a first-class input (bogus/foreign tag), not an error.
class Keystore {
public:
    void set(TagIdentity id, const Key128& key) { keys_[id] = key; }
    void remove(TagIdentity id) { keys_.erase(id); }
    const Key128* lookup(TagIdentity id) const {
        auto it = keys_.find(id);
        return it == keys_.end() ? nullptr : &it->second;
    }
    size_t size() const { return keys_.size(); }

private:
    std::map<TagIdentity, Key128> keys_;
};

/// What the reader heard in one reply window.
struct ChannelOutcome {
    enum class Kind { Silence, Single, Collision };
    Kind kind = Kind::Silence;
    std::optional<Frame> frame;  // set iff Single

    static ChannelOutcome silence() { return {Kind::Silence, std::nullopt}; }
    static ChannelOutcome single(Frame f) { return {Kind::Single, std::move(f)}; }
    static ChannelOutcome collision() { return {Kind::Collision, std::nullopt}; }
};

/// 0 replies -> Silence, 1 -> Single, >=2 -> Collision (content lost).
ChannelOutcome channel_resolve(const std::vector<Frame>& replies);

/// Next step the tree walk wants the reader to take.
struct WalkAction {
    enum class Kind { Query, StayQuiet, Done, Stuck };
    Kind kind = Kind::Done;
    Prefix prefix{};   // for Query
    TagIdentity id{};  // for StayQuiet
};

/// Depth-first binary tree walk over id prefixes, 0-branch first. On a
/// collision at prefix p the children are pushed 1-then-0 so p||0 is
/// explored next; found order is therefore lexicographic by id.
class InventoryWalk {
public:
    InventoryWalk() { pending_.push_back(Prefix{}); }

    WalkAction next();

    /// Outcome of the Query most recently handed out by next().
    void report(const ChannelOutcome& outcome);

    const std::vector<TagIdentity>& found() const { return found_; }
    int queries() const { return queries_; }

private:
    std::vector<Prefix> pending_;
    std::vector<TagIdentity> found_;
    std::optional<TagIdentity> quiet_pending_;
    Prefix last_{};
    int queries_ = 0;
    bool stuck_ = false;
};

enum class AuthOutcome {
    Verified,
    FailedWrongToken,
    FailedBusy,
    FailedTimeout,
    FailedCollision,
    KeyUnknown,
    ReaderRejected,
};

const char* auth_outcome_name(AuthOutcome o);

struct TagVerdict {
    TagIdentity id{};
    AuthOutcome outcome = AuthOutcome::FailedTimeout;
};

struct InventoryResult {
    std::vector<TagIdentity> found;
    int queries = 0;
};

/// Full anti-collision round. Throws WalkStuckError on duplicate ids.
InventoryResult run_inventory(Simulator& sim);

/// Single-exchange challenge/response. The tag answers within the reply
/// deadline or replies Busy, which fails the attempt and signals that the
/// split AR/RR path is required.
TagVerdict authenticate_tag_challenge(Simulator& sim, TagIdentity id);

/// AR, wait out the tag's compute latency, RR - one tag at a time.
std::vector<TagVerdict> auth_sequential(Simulator& sim,
                                        std::span<const TagIdentity> ids);

/// All ARs back to back, then RRs in ascending expected-ready order (ties
/// by singulation order), waiting only when the next tag is not ready yet.
/// Verdicts match auth_sequential for the same keys.
std::vector<TagVerdict> auth_interleaved(Simulator& sim,
                                         std::span<const TagIdentity> ids);

/// AR/RR tag authentication followed by a reader token over the
/// tag-issued nonce. Verified only when both directions verify.
std::vector<TagVerdict> auth_mutual(Simulator& sim,
                                    std::span<const TagIdentity> ids);

}  // namespace rfidsim
