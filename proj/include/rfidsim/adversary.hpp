#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rfidsim/engine.hpp"
#include "rfidsim/scenario.hpp"

namespace rfidsim {

struct AttackResult {
    std::string name;
    uint64_t trials = 0;
    uint64_t successes = 0;
    std::string notes;
    std::vector<std::string> sample_transcripts;

    /// {name, notes, successes, trials} - sorted keys, 2-space indent.
    std::string to_json() const;
};

/// Bogus tag that answers every challenge with a previously captured
/// token. It has no key; the token is all it knows.
std::unique_ptr<Responder> make_replay_tag(TagIdentity id,
                                           AuthResponse captured);

/// Bogus tag that knows the id but not the key; answers challenges with
/// uniformly random tokens drawn from its own generator.
std::unique_ptr<Responder> make_clone_tag(TagIdentity id, NoncePrng rng);

/// Eavesdropped material from one honest run: everything an attacker on
/// the air interface gets to see and reuse.
struct CapturedAuth {
    TagIdentity id{};
    Nonce64 reader_nonce{};
    AuthResponse response{};
};

/// Scans an honest trace for completed challenge/response exchanges.
std::vector<CapturedAuth> capture_auth_exchanges(const Trace& trace);

/// Replays captured tokens against fresh reader sessions. Fresh nonces
/// make every replay fail verification.
AttackResult replay_attack(const Scenario& scenario, uint64_t trials,
                           uint64_t seed);

/// Random-token forgery against the id's honest keystore entry.
AttackResult clone_attack(const Scenario& scenario, TagIdentity known_id,
                          uint64_t trials, uint64_t seed);

/// Unauthorized reader observing one tag across sessions; counts identity
/// linkages between sessions and memory-read denials.
AttackResult tracking_probe(const Scenario& scenario, uint64_t sessions,
                            uint64_t seed);

/// True iff any 16-byte window of any transmitted frame equals one of the
/// given keys. Honest transcripts must never leak key bytes.
bool transcript_contains_key(const Trace& trace,
                             std::span<const Key128> keys);

}  // namespace rfidsim
