#include "rfidsim/reader.hpp"

#include <algorithm>

#include "rfidsim/engine.hpp"

namespace rfidsim {

const char* auth_outcome_name(AuthOutcome o) {
    switch (o) {
        case AuthOutcome::Verified:
            return "verified";
        case AuthOutcome::FailedWrongToken:
            return "failed_wrong_token";
        case AuthOutcome::FailedBusy:
            return "failed_busy";
        case AuthOutcome::FailedTimeout:
            return "failed_timeout";
        case AuthOutcome::FailedCollision:
            return "failed_collision";
        case AuthOutcome::KeyUnknown:
            return "key_unknown";
        case AuthOutcome::ReaderRejected:
            return "reader_rejected";
    }
    return "?";
}

WalkAction InventoryWalk::next() {
    if (stuck_) return WalkAction{WalkAction::Kind::Stuck};
    if (quiet_pending_) {
        WalkAction a{WalkAction::Kind::StayQuiet};
        a.id = *quiet_pending_;
        quiet_pending_.reset();
        return a;
    }
    if (pending_.empty()) return WalkAction{WalkAction::Kind::Done};
    last_ = pending_.back();
    pending_.pop_back();
    ++queries_;
    WalkAction a{WalkAction::Kind::Query};
    a.prefix = last_;
    return a;
}

void InventoryWalk::report(const ChannelOutcome& outcome) {
    switch (outcome.kind) {
        case ChannelOutcome::Kind::Silence:
            break;
        case ChannelOutcome::Kind::Single: {
            if (const auto* reply = std::get_if<TagReply>(&*outcome.frame)) {
                found_.push_back(reply->id);
                quiet_pending_ = reply->id;
            }
            // any other single frame is noise; treat like silence
            break;
        }
        case ChannelOutcome::Kind::Collision: {
            if (last_.len >= 56) {
                stuck_ = true;
                break;
            }
            // 1-branch below 0-branch so the 0 side is explored first
            pending_.push_back(last_.child(1));
            pending_.push_back(last_.child(0));
            break;
        }
    }
}

InventoryResult run_inventory(Simulator& sim) {
    InventoryWalk walk;
    for (;;) {
        WalkAction action = walk.next();
        switch (action.kind) {
            case WalkAction::Kind::Query:
                walk.report(sim.exchange(Inventory{action.prefix}));
                break;
            case WalkAction::Kind::StayQuiet:
                sim.send(StayQuiet{action.id});
                break;
            case WalkAction::Kind::Done:
                return InventoryResult{walk.found(), walk.queries()};
            case WalkAction::Kind::Stuck:
                throw WalkStuckError();
        }
    }
}

namespace {

struct RrOutcome {
    AuthOutcome outcome;
    std::optional<AuthResponse> response;
};

AuthOutcome classify_response(const ChannelOutcome& out, const Key128& key,
                              const Nonce64& nonce, TagIdentity id,
                              std::optional<AuthResponse>* response) {
    switch (out.kind) {
        case ChannelOutcome::Kind::Silence:
            return AuthOutcome::FailedTimeout;
        case ChannelOutcome::Kind::Collision:
            return AuthOutcome::FailedCollision;
        case ChannelOutcome::Kind::Single:
            break;
    }
    if (std::holds_alternative<Busy>(*out.frame)) return AuthOutcome::FailedBusy;
    const auto* resp = std::get_if<AuthResponse>(&*out.frame);
    if (!resp) return AuthOutcome::FailedWrongToken;
    if (response) *response = *resp;
    return verify_token(key, Direction::TagToReader, nonce, id, resp->token)
               ? AuthOutcome::Verified
               : AuthOutcome::FailedWrongToken;
}

/// AR then RR for one tag, waiting out the compute latency in between.
RrOutcome ar_rr_exchange(Simulator& sim, const Key128& key, TagIdentity id,
                         const Nonce64& nonce) {
    sim.send(AuthRequestAr{id, nonce});
    sim.wait_until(sim.now() + sim.timing().aes_latency_us());
    ChannelOutcome out = sim.exchange(ResponseRequestRr{id});
    RrOutcome rr{AuthOutcome::FailedTimeout, std::nullopt};
    rr.outcome = classify_response(out, key, nonce, id, &rr.response);
    return rr;
}

}  // namespace

TagVerdict authenticate_tag_challenge(Simulator& sim, TagIdentity id) {
    const Key128* key = sim.keystore().lookup(id);
    if (!key) {
        TagVerdict v{id, AuthOutcome::KeyUnknown};
        sim.record_verdict(v);
        return v;
    }
    Nonce64 nonce = sim.next_nonce();
    ChannelOutcome out = sim.exchange(AuthChallenge{id, nonce});
    TagVerdict v{id, classify_response(out, *key, nonce, id, nullptr)};
    sim.record_verdict(v);
    return v;
}

std::vector<TagVerdict> auth_sequential(Simulator& sim,
                                        std::span<const TagIdentity> ids) {
    std::vector<TagVerdict> verdicts;
    verdicts.reserve(ids.size());
    for (TagIdentity id : ids) {
        const Key128* key = sim.keystore().lookup(id);
        if (!key) {
            verdicts.push_back({id, AuthOutcome::KeyUnknown});
            sim.record_verdict(verdicts.back());
            continue;
        }
        Nonce64 nonce = sim.next_nonce();
        RrOutcome rr = ar_rr_exchange(sim, *key, id, nonce);
        verdicts.push_back({id, rr.outcome});
        sim.record_verdict(verdicts.back());
    }
    return verdicts;
}

std::vector<TagVerdict> auth_interleaved(Simulator& sim,
                                         std::span<const TagIdentity> ids) {
    struct PendingAuth {
        TagIdentity id;
        const Key128* key;
        Nonce64 nonce;
        uint64_t ready_at;
    };

    std::vector<TagVerdict> verdicts;
    verdicts.reserve(ids.size());
    std::vector<PendingAuth> pending;
    pending.reserve(ids.size());

    for (TagIdentity id : ids) {
        const Key128* key = sim.keystore().lookup(id);
        if (!key) {
            verdicts.push_back({id, AuthOutcome::KeyUnknown});
            sim.record_verdict(verdicts.back());
            continue;
        }
        Nonce64 nonce = sim.next_nonce();
        sim.send(AuthRequestAr{id, nonce});
        pending.push_back(
            {id, key, nonce, sim.now() + sim.timing().aes_latency_us()});
    }

    // collect in ascending readiness; stable keeps singulation order on ties
    std::stable_sort(pending.begin(), pending.end(),
                     [](const PendingAuth& a, const PendingAuth& b) {
                         return a.ready_at < b.ready_at;
                     });

    for (const PendingAuth& p : pending) {
        if (sim.now() < p.ready_at) sim.wait_until(p.ready_at);
        ChannelOutcome out = sim.exchange(ResponseRequestRr{p.id});
        std::optional<AuthResponse> resp;
        verdicts.push_back(
            {p.id, classify_response(out, *p.key, p.nonce, p.id, &resp)});
        sim.record_verdict(verdicts.back());
    }
    return verdicts;
}

std::vector<TagVerdict> auth_mutual(Simulator& sim,
                                    std::span<const TagIdentity> ids) {
    std::vector<TagVerdict> verdicts;
    verdicts.reserve(ids.size());
    for (TagIdentity id : ids) {
        const Key128* key = sim.keystore().lookup(id);
        if (!key) {
            verdicts.push_back({id, AuthOutcome::KeyUnknown});
            sim.record_verdict(verdicts.back());
            continue;
        }
        Nonce64 nonce = sim.next_nonce();
        RrOutcome rr = ar_rr_exchange(sim, *key, id, nonce);
        if (rr.outcome != AuthOutcome::Verified || !rr.response) {
            verdicts.push_back({id, rr.outcome});
            sim.record_verdict(verdicts.back());
            continue;
        }
        // tag verified; now prove the reader against the tag-issued nonce
        AuthToken reader_token = compute_token(*key, Direction::ReaderToTag,
                                               rr.response->tag_nonce, id);
        ChannelOutcome out =
            sim.exchange(ReaderAuthToken{id, rr.response->tag_nonce, reader_token});
        AuthOutcome mutual = out.kind == ChannelOutcome::Kind::Silence
                                 ? AuthOutcome::Verified
                                 : AuthOutcome::ReaderRejected;
        verdicts.push_back({id, mutual});
        sim.record_verdict(verdicts.back());
    }
    return verdicts;
}

}  // namespace rfidsim
