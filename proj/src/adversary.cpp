#include "rfidsim/adversary.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include <json.hpp>

#include "rfidsim/hex.hpp"

namespace rfidsim {

namespace {

constexpr uint8_t kAttackReaderDomain = 0x41;
constexpr uint8_t kCloneDomain = 0x43;

std::optional<Frame> decode_event_frame(const SimEvent& e) {
    auto space = e.detail.find(' ');
    auto bytes = from_hex(e.detail.substr(0, space));
    if (!bytes) return std::nullopt;
    auto decoded = decode_frame(*bytes);
    if (std::holds_alternative<DecodeError>(decoded)) return std::nullopt;
    return std::get<Frame>(decoded);
}

/// Answers challenges with one captured token, forever.
class ReplayTag final : public Responder {
public:
    ReplayTag(TagIdentity id, AuthResponse captured)
        : id_(id), captured_(std::move(captured)) {}

    TagStepResult step(const Frame& frame, uint64_t now_us,
                       const TimingModel&) override {
        TagStepResult out;
        out.reply_at_us = now_us;
        if (const auto* inv = std::get_if<Inventory>(&frame)) {
            if (!quiet_ && matches_prefix(id_, inv->prefix))
                out.reply = TagReply{id_};
        } else if (const auto* sq = std::get_if<StayQuiet>(&frame)) {
            if (sq->id == id_) quiet_ = true;
        } else if (const auto* ch = std::get_if<AuthChallenge>(&frame)) {
            if (ch->id == id_) out.reply = captured_;
        } else if (const auto* rr = std::get_if<ResponseRequestRr>(&frame)) {
            if (rr->id == id_) out.reply = captured_;
        }
        // AR needs no answer; the replayed token is already "computed"
        return out;
    }
    void session_reset() override { quiet_ = false; }
    std::string actor_name() const override { return "tag:" + id_.to_hex(); }

private:
    TagIdentity id_;
    AuthResponse captured_;
    bool quiet_ = false;
};

/// Knows the id, not the key; every challenge gets fresh random bytes.
class CloneTag final : public Responder {
public:
    CloneTag(TagIdentity id, NoncePrng rng) : id_(id), rng_(std::move(rng)) {}

    TagStepResult step(const Frame& frame, uint64_t now_us,
                       const TimingModel&) override {
        TagStepResult out;
        out.reply_at_us = now_us;
        if (const auto* inv = std::get_if<Inventory>(&frame)) {
            if (!quiet_ && matches_prefix(id_, inv->prefix))
                out.reply = TagReply{id_};
        } else if (const auto* sq = std::get_if<StayQuiet>(&frame)) {
            if (sq->id == id_) quiet_ = true;
        } else if (const auto* ch = std::get_if<AuthChallenge>(&frame)) {
            if (ch->id == id_) out.reply = random_response();
        } else if (const auto* rr = std::get_if<ResponseRequestRr>(&frame)) {
            if (rr->id == id_) out.reply = random_response();
        }
        return out;
    }
    void session_reset() override { quiet_ = false; }
    std::string actor_name() const override { return "tag:" + id_.to_hex(); }

private:
    AuthResponse random_response() {
        return AuthResponse{AuthToken{rng_.next_block()}, rng_.next()};
    }

    TagIdentity id_;
    NoncePrng rng_;
    bool quiet_ = false;
};

const TagConfig* find_tag(const Scenario& scenario, TagIdentity id) {
    for (const auto& t : scenario.tags)
        if (t.id == id) return &t;
    return nullptr;
}

}  // namespace

std::string AttackResult::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["trials"] = trials;
    j["successes"] = successes;
    j["notes"] = notes;
    return j.dump(2) + "\n";
}

std::unique_ptr<Responder> make_replay_tag(TagIdentity id,
                                           AuthResponse captured) {
    return std::make_unique<ReplayTag>(id, std::move(captured));
}

std::unique_ptr<Responder> make_clone_tag(TagIdentity id, NoncePrng rng) {
    return std::make_unique<CloneTag>(id, std::move(rng));
}

std::vector<CapturedAuth> capture_auth_exchanges(const Trace& trace) {
    std::vector<CapturedAuth> captured;
    std::map<uint64_t, Nonce64> challenge_by_id;
    std::optional<TagIdentity> last_collect_target;

    for (const auto& e : trace.events) {
        if (e.kind != EventKind::TxStart) continue;
        auto frame = decode_event_frame(e);
        if (!frame) continue;
        if (e.actor == "reader") {
            if (const auto* ar = std::get_if<AuthRequestAr>(&*frame)) {
                challenge_by_id[ar->id.value] = ar->nonce;
                last_collect_target = ar->id;
            } else if (const auto* ch = std::get_if<AuthChallenge>(&*frame)) {
                challenge_by_id[ch->id.value] = ch->nonce;
                last_collect_target = ch->id;
            } else if (const auto* rr = std::get_if<ResponseRequestRr>(&*frame)) {
                last_collect_target = rr->id;
            }
        } else if (const auto* resp = std::get_if<AuthResponse>(&*frame)) {
            if (!last_collect_target) continue;
            auto it = challenge_by_id.find(last_collect_target->value);
            if (it == challenge_by_id.end()) continue;
            captured.push_back(
                CapturedAuth{*last_collect_target, it->second, *resp});
        }
    }
    return captured;
}

AttackResult replay_attack(const Scenario& scenario, uint64_t trials,
                           uint64_t seed) {
    // Listen passively to one honest run first.
    Scenario honest = scenario;
    honest.mode = ScenarioMode::SeqAuth;
    RunResult recorded = run_scenario(honest);
    auto captured = capture_auth_exchanges(recorded.trace);
    if (captured.empty())
        throw ScenarioError(ScenarioError::Kind::Invalid,
                            "replay attack needs a recorded authentication; "
                            "the scenario produced none");

    NoncePrng master = NoncePrng::from_seed(seed);
    AttackResult result;
    result.name = "replay";
    result.trials = trials;

    for (uint64_t t = 0; t < trials; ++t) {
        const CapturedAuth& material = captured[t % captured.size()];
        const TagConfig* victim = find_tag(scenario, material.id);

        Simulator sim(SimConfig{scenario.timing, scenario.power, seed});
        if (victim) sim.keystore().set(victim->id, victim->key);
        sim.add_responder(make_replay_tag(material.id, material.response));
        sim.set_nonce_source(std::make_unique<NoncePrng>(
            master.derive(kAttackReaderDomain, t)));

        TagIdentity ids[] = {material.id};
        auto verdicts = auth_sequential(sim, ids);
        if (!verdicts.empty() && verdicts[0].outcome == AuthOutcome::Verified)
            ++result.successes;
        if (t == 0) result.sample_transcripts.push_back(sim.trace().serialize());
    }
    result.notes = "captured_exchanges=" + std::to_string(captured.size());
    return result;
}

AttackResult clone_attack(const Scenario& scenario, TagIdentity known_id,
                          uint64_t trials, uint64_t seed) {
    const TagConfig* victim = find_tag(scenario, known_id);
    NoncePrng master = NoncePrng::from_seed(seed);

    AttackResult result;
    result.name = "clone";
    result.trials = trials;
    uint64_t key_unknown = 0;

    for (uint64_t t = 0; t < trials; ++t) {
        Simulator sim(SimConfig{scenario.timing, scenario.power, seed});
        if (victim) sim.keystore().set(victim->id, victim->key);
        sim.add_responder(make_clone_tag(known_id, master.derive(kCloneDomain, t)));
        sim.set_nonce_source(std::make_unique<NoncePrng>(
            master.derive(kAttackReaderDomain, t)));

        TagIdentity ids[] = {known_id};
        auto verdicts = auth_sequential(sim, ids);
        if (!verdicts.empty()) {
            if (verdicts[0].outcome == AuthOutcome::Verified) ++result.successes;
            if (verdicts[0].outcome == AuthOutcome::KeyUnknown) ++key_unknown;
        }
        if (t == 0) result.sample_transcripts.push_back(sim.trace().serialize());
    }
    result.notes = "id=" + known_id.to_hex() +
                   (victim ? "" : " (unknown to keystore)") +
                   " key_unknown=" + std::to_string(key_unknown);
    return result;
}

AttackResult tracking_probe(const Scenario& scenario, uint64_t sessions,
                            uint64_t seed) {
    // The probing reader is unauthorized: it never uses a key, only
    // inventory rounds and raw memory read attempts.
    Simulator sim(SimConfig{scenario.timing, scenario.power, seed},
                  scenario.tags);

    AttackResult result;
    result.name = "tracking";
    result.trials = sessions;

    std::set<uint64_t> seen_ids;
    uint64_t denied = 0;
    uint64_t reads = 0;

    for (uint64_t s = 0; s < sessions; ++s) {
        if (s > 0) sim.session_reset_all();
        InventoryResult inv = run_inventory(sim);
        for (TagIdentity observed : inv.found) {
            if (seen_ids.contains(observed.value)) ++result.successes;
        }
        for (TagIdentity observed : inv.found) {
            ++reads;
            ChannelOutcome out = sim.exchange(ReadMemory{observed, 0});
            if (out.kind == ChannelOutcome::Kind::Single) {
                if (const auto* err = std::get_if<ErrorFrame>(&*out.frame)) {
                    if (err->code == static_cast<uint8_t>(ErrorCode::MemoryDenied))
                        ++denied;
                }
            }
            seen_ids.insert(observed.value);
        }
    }

    result.notes = "memory_denied=" + std::to_string(denied) + "/" +
                   std::to_string(reads) +
                   " distinct_ids=" + std::to_string(seen_ids.size());
    return result;
}

bool transcript_contains_key(const Trace& trace,
                             std::span<const Key128> keys) {
    for (const auto& e : trace.events) {
        if (e.kind != EventKind::TxStart) continue;
        auto space = e.detail.find(' ');
        auto bytes = from_hex(e.detail.substr(0, space));
        if (!bytes || bytes->size() < 16) continue;
        for (size_t i = 0; i + 16 <= bytes->size(); ++i) {
            for (const Key128& k : keys) {
                if (std::equal(k.bytes.begin(), k.bytes.end(),
                               bytes->begin() + static_cast<ptrdiff_t>(i)))
                    return true;
            }
        }
    }
    return false;
}

}  // namespace rfidsim
