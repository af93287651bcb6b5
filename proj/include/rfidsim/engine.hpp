#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rfidsim/crypto.hpp"
#include "rfidsim/frame.hpp"
#include "rfidsim/reader.hpp"
#include "rfidsim/scenario.hpp"
#include "rfidsim/tag.hpp"
#include "rfidsim/timing.hpp"

namespace rfidsim {

enum class EventKind {
    TxStart,
    TxEnd,
    RxDeliver,
    StateChange,
    Verdict,
};

const char* event_kind_name(EventKind k);

struct SimEvent {
    uint64_t time_us = 0;
    std::string actor;
    EventKind kind = EventKind::StateChange;
    std::string detail;  // hex frame plus decoded form, or a state note
};

/// Time-ordered record of every transmission, state change and verdict.
/// Serialization is one event per line:
///   <time_us> <actor> <kind> <detail>\n
struct Trace {
    std::vector<SimEvent> events;

    void push(uint64_t time_us, std::string actor, EventKind kind,
              std::string detail);
    std::string serialize() const;
};

struct Metrics {
    uint64_t total_time_us = 0;
    uint64_t inventory_time_us = 0;
    uint64_t auth_time_us = 0;
    uint64_t queries = 0;
    uint64_t collisions = 0;
    uint64_t stay_quiets = 0;
    uint64_t auth_attempts = 0;
    uint64_t auth_verified = 0;
    uint64_t auth_failed = 0;
    uint64_t busy_replies = 0;
    uint32_t max_tag_current_uA = 0;

    /// Flat JSON, sorted keys, 2-space indent, LF-terminated.
    std::string to_json() const;

    bool operator==(const Metrics&) const = default;
};

/// Rebuilds every counter from the trace alone (plus the power model for
/// the current figure). Used to prove the metrics are a pure function of
/// the trace.
Metrics recompute_metrics(const Trace& trace, const PowerModel& power);

struct PowerViolation {
    std::string actor;
    uint64_t start_us = 0;
    uint64_t end_us = 0;
    uint32_t current_uA = 0;
    std::string phase;
};

struct PowerReport {
    uint32_t max_current_uA = 0;
    std::vector<PowerViolation> violations;
};

/// Per-tag piecewise-constant current check against the budget. Phase
/// precedence when activities overlap: tx > compute > rx > idle.
PowerReport power_check(const Trace& trace, const PowerModel& power);

/// Anything the reader can talk to over the channel. Honest tags wrap
/// tag_step; attacker machines script their own replies.
class Responder {
public:
    virtual ~Responder() = default;
    virtual TagStepResult step(const Frame& frame, uint64_t now_us,
                               const TimingModel& timing) = 0;
    virtual void session_reset() {}
    virtual std::string actor_name() const = 0;
};

class HonestTag final : public Responder {
public:
    HonestTag(TagConfig config, NoncePrng prng)
        : config_(std::move(config)),
          state_(init_tag_state(config_, std::move(prng))) {}

    TagStepResult step(const Frame& frame, uint64_t now_us,
                       const TimingModel& timing) override {
        return tag_step(state_, config_, frame, now_us, timing);
    }
    void session_reset() override { tag_session_reset(state_, config_); }
    std::string actor_name() const override {
        return "tag:" + config_.id.to_hex();
    }

    const TagState& state() const { return state_; }
    const TagConfig& config() const { return config_; }

private:
    TagConfig config_;
    TagState state_;
};

struct SimConfig {
    TimingModel timing{};
    PowerModel power{};
    uint64_t seed = 0;
};

class WalkStuckError : public std::runtime_error {
public:
    WalkStuckError() : std::runtime_error("inventory walk stuck: a full-length prefix still collides (duplicate ids)") {}
};

/// One deterministic run: a shared half-duplex channel between one reader
/// and a tag population, with a virtual clock in integer microseconds.
/// Engine instances are independent; nothing is shared between them.
class Simulator {
public:
    explicit Simulator(SimConfig config);

    /// Honest population: one HonestTag per config, keystore covering all
    /// of them, per-tag nonce generators derived from the scenario seed.
    Simulator(SimConfig config, const std::vector<TagConfig>& tags);

    void add_tag(const TagConfig& config);
    void add_responder(std::unique_ptr<Responder> responder);

    Keystore& keystore() { return keystore_; }
    const TimingModel& timing() const { return config_.timing; }
    const PowerModel& power() const { return config_.power; }

    uint64_t now() const { return clock_us_; }
    void wait_until(uint64_t time_us);

    /// Reader transmission with no reply window (AR, StayQuiet).
    void send(const Frame& command);

    /// Reader transmission followed by one reply window. Silence costs
    /// the full reply deadline; a reply or collision ends the window when
    /// its transmission ends.
    ChannelOutcome exchange(const Frame& command);

    /// Attacker-controlled raw bytes on the channel. A well-formed frame
    /// is delivered to every responder (replies are lost); a malformed
    /// one is recorded in the trace with its decode error and ignored.
    std::optional<DecodeError> inject_raw(std::span<const uint8_t> bytes);

    /// Reader challenge source. Replaceable so tests can force repeats.
    Nonce64 next_nonce() { return nonce_source_->next(); }
    void set_nonce_source(std::unique_ptr<NonceSource> source) {
        nonce_source_ = std::move(source);
    }

    /// Master generator for deriving independent child generators.
    const NoncePrng& master_prng() const { return master_prng_; }

    void record_verdict(const TagVerdict& verdict);
    void mark(const std::string& note);  // reader StateChange marker

    /// Tags leave and re-enter the field; reader-session state on every
    /// responder is dropped.
    void session_reset_all();

    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }
    Metrics& metrics() { return metrics_; }
    const Metrics& metrics() const { return metrics_; }

    /// Stamps total time and the power figure into the metrics.
    void finalize();

private:
    void transmit_command(const Frame& command);

    SimConfig config_;
    uint64_t clock_us_ = 0;
    std::vector<std::unique_ptr<Responder>> responders_;
    Keystore keystore_;
    NoncePrng master_prng_;
    std::unique_ptr<NonceSource> nonce_source_;
    Trace trace_;
    Metrics metrics_;
};

struct RunResult {
    Trace trace;
    Metrics metrics;
    InventoryResult inventory;
    std::vector<TagVerdict> verdicts;
};

/// Executes the scenario's mode to completion: inventory round first,
/// then the selected authentication driver over the found tags.
RunResult run_scenario(const Scenario& scenario);

}  // namespace rfidsim
