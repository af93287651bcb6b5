#include "rfidsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "rfidsim/hex.hpp"

namespace rfidsim {

namespace {

std::string frame_detail(const Frame& f) {
    return to_hex(encode_frame(f)) + " " + frame_to_string(f);
}

std::optional<Opcode> detail_opcode(const std::string& detail) {
    auto space = detail.find(' ');
    auto hex = detail.substr(0, space);
    auto bytes = from_hex(hex);
    if (!bytes || bytes->empty()) return std::nullopt;
    auto decoded = decode_frame(*bytes);
    if (std::holds_alternative<DecodeError>(decoded)) return std::nullopt;
    return frame_opcode(std::get<Frame>(decoded));
}

constexpr uint8_t kReaderDomain = 0x52;  // reader nonce stream
constexpr uint8_t kTagDomain = 0x54;     // per-tag nonce/alias stream

}  // namespace

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::TxStart:
            return "TxStart";
        case EventKind::TxEnd:
            return "TxEnd";
        case EventKind::RxDeliver:
            return "RxDeliver";
        case EventKind::StateChange:
            return "StateChange";
        case EventKind::Verdict:
            return "Verdict";
    }
    return "?";
}

void Trace::push(uint64_t time_us, std::string actor, EventKind kind,
                 std::string detail) {
    assert(events.empty() || events.back().time_us <= time_us);
    events.push_back(SimEvent{time_us, std::move(actor), kind, std::move(detail)});
}

std::string Trace::serialize() const {
    std::string out;
    for (const auto& e : events) {
        out += std::to_string(e.time_us);
        out += ' ';
        out += e.actor;
        out += ' ';
        out += event_kind_name(e.kind);
        out += ' ';
        out += e.detail;
        out += '\n';
    }
    return out;
}

std::string Metrics::to_json() const {
    nlohmann::json j;
    j["total_time_us"] = total_time_us;
    j["inventory_time_us"] = inventory_time_us;
    j["auth_time_us"] = auth_time_us;
    j["queries"] = queries;
    j["collisions"] = collisions;
    j["stay_quiets"] = stay_quiets;
    j["auth_attempts"] = auth_attempts;
    j["auth_verified"] = auth_verified;
    j["auth_failed"] = auth_failed;
    j["busy_replies"] = busy_replies;
    j["max_tag_current_uA"] = max_tag_current_uA;
    return j.dump(2) + "\n";
}

Metrics recompute_metrics(const Trace& trace, const PowerModel& power) {
    Metrics m;
    uint64_t inventory_done = 0;
    uint64_t auth_done = 0;
    bool has_auth = false;
    for (const auto& e : trace.events) {
        m.total_time_us = std::max(m.total_time_us, e.time_us);
        if (e.actor == "reader") {
            if (e.kind == EventKind::TxStart) {
                auto op = detail_opcode(e.detail);
                if (op == Opcode::Inventory) ++m.queries;
                if (op == Opcode::StayQuiet) ++m.stay_quiets;
            } else if (e.kind == EventKind::RxDeliver) {
                if (e.detail == "collision") ++m.collisions;
            } else if (e.kind == EventKind::StateChange) {
                if (e.detail == "inventory_done") inventory_done = e.time_us;
                if (e.detail == "auth_done") {
                    auth_done = e.time_us;
                    has_auth = true;
                }
            } else if (e.kind == EventKind::Verdict) {
                ++m.auth_attempts;
                if (e.detail.ends_with("outcome=verified"))
                    ++m.auth_verified;
                else
                    ++m.auth_failed;
            }
        } else if (e.kind == EventKind::TxStart) {
            if (detail_opcode(e.detail) == Opcode::Busy) ++m.busy_replies;
        }
    }
    m.inventory_time_us = inventory_done;
    m.auth_time_us = has_auth ? auth_done - inventory_done : 0;
    m.max_tag_current_uA = power_check(trace, power).max_current_uA;
    return m;
}

namespace {

struct Interval {
    uint64_t a = 0;
    uint64_t b = 0;
};

bool covered(const std::vector<Interval>& ivs, uint64_t a, uint64_t b) {
    for (const auto& iv : ivs)
        if (iv.a <= a && b <= iv.b) return true;
    return false;
}

std::optional<uint64_t> parse_ready_at(const std::string& detail) {
    auto pos = detail.find("computing ready_at=");
    if (pos == std::string::npos) return std::nullopt;
    const char* first = detail.data() + pos + std::string_view("computing ready_at=").size();
    const char* last = detail.data() + detail.size();
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) return std::nullopt;
    (void)ptr;
    return value;
}

}  // namespace

PowerReport power_check(const Trace& trace, const PowerModel& power) {
    PowerReport report;
    if (trace.events.empty()) return report;
    uint64_t end_time = trace.events.back().time_us;

    constexpr uint64_t kNoOpen = ~uint64_t{0};
    std::vector<Interval> reader_tx;
    struct TagActivity {
        std::vector<Interval> tx;
        std::vector<Interval> compute;
        uint64_t open_tx = kNoOpen;
    };
    std::map<std::string, TagActivity> tags;

    uint64_t reader_open = kNoOpen;
    for (const auto& e : trace.events) {
        if (e.actor == "reader") {
            if (e.kind == EventKind::TxStart) reader_open = e.time_us;
            if (e.kind == EventKind::TxEnd && reader_open != kNoOpen) {
                reader_tx.push_back({reader_open, e.time_us});
                reader_open = kNoOpen;
            }
            continue;
        }
        TagActivity& act = tags[e.actor];
        if (e.kind == EventKind::TxStart) act.open_tx = e.time_us;
        if (e.kind == EventKind::TxEnd && act.open_tx != kNoOpen) {
            act.tx.push_back({act.open_tx, e.time_us});
            act.open_tx = kNoOpen;
        }
        if (e.kind == EventKind::StateChange) {
            if (auto ready_at = parse_ready_at(e.detail)) {
                uint64_t start = e.time_us;
                uint64_t end = std::min(*ready_at, end_time);
                // a new computation overrides one still in flight
                if (!act.compute.empty() && act.compute.back().b > start)
                    act.compute.back().b = start;
                if (end > start) act.compute.push_back({start, end});
            }
        }
    }

    for (const auto& [actor, act] : tags) {
        std::vector<uint64_t> cuts{0, end_time};
        auto add = [&cuts](const std::vector<Interval>& ivs) {
            for (const auto& iv : ivs) {
                cuts.push_back(iv.a);
                cuts.push_back(iv.b);
            }
        };
        add(act.tx);
        add(act.compute);
        add(reader_tx);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        std::optional<PowerViolation> run;
        auto flush = [&]() {
            if (run) {
                report.violations.push_back(*run);
                run.reset();
            }
        };
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            uint64_t a = cuts[i], b = cuts[i + 1];
            if (b <= a || a >= end_time) continue;
            const char* phase = "idle";
            uint32_t current = power.idle_current_uA;
            if (covered(act.tx, a, b)) {
                phase = "tx";
                current = power.tx_current_uA;
            } else if (covered(act.compute, a, b)) {
                phase = "compute";
                current = power.compute_current_uA;
            } else if (covered(reader_tx, a, b)) {
                phase = "rx";
                current = power.rx_current_uA;
            }
            report.max_current_uA = std::max(report.max_current_uA, current);
            if (current > power.budget_uA) {
                if (run && run->phase == phase && run->end_us == a) {
                    run->end_us = b;
                } else {
                    flush();
                    run = PowerViolation{actor, a, b, current, phase};
                }
            } else {
                flush();
            }
        }
        flush();
    }
    return report;
}

ChannelOutcome channel_resolve(const std::vector<Frame>& replies) {
    if (replies.empty()) return ChannelOutcome::silence();
    if (replies.size() == 1) return ChannelOutcome::single(replies.front());
    return ChannelOutcome::collision();
}

Simulator::Simulator(SimConfig config)
    : config_(config),
      master_prng_(NoncePrng::from_seed(config.seed)),
      nonce_source_(std::make_unique<NoncePrng>(
          NoncePrng::from_seed(config.seed).derive(kReaderDomain, 0))) {}

Simulator::Simulator(SimConfig config, const std::vector<TagConfig>& tags)
    : Simulator(config) {
    for (const auto& t : tags) add_tag(t);
}

void Simulator::add_tag(const TagConfig& config) {
    keystore_.set(config.id, config.key);
    add_responder(std::make_unique<HonestTag>(
        config, master_prng_.derive(kTagDomain, config.id.value)));
}

void Simulator::add_responder(std::unique_ptr<Responder> responder) {
    trace_.push(clock_us_, responder->actor_name(), EventKind::StateChange,
                "mode=ready");
    responders_.push_back(std::move(responder));
}

void Simulator::wait_until(uint64_t time_us) {
    clock_us_ = std::max(clock_us_, time_us);
}

void Simulator::transmit_command(const Frame& command) {
    uint64_t air = frame_airtime(command, LinkDir::ReaderToTag, config_.timing);
    trace_.push(clock_us_, "reader", EventKind::TxStart, frame_detail(command));
    trace_.push(clock_us_ + air, "reader", EventKind::TxEnd, frame_detail(command));
    Opcode op = frame_opcode(command);
    if (op == Opcode::Inventory) ++metrics_.queries;
    if (op == Opcode::StayQuiet) ++metrics_.stay_quiets;
    clock_us_ += air;
}

void Simulator::send(const Frame& command) {
    transmit_command(command);
    for (auto& r : responders_) {
        TagStepResult res = r->step(command, clock_us_, config_.timing);
        for (auto& note : res.state_changes)
            trace_.push(clock_us_, r->actor_name(), EventKind::StateChange,
                        std::move(note));
        // no reply window: anything a responder tries to send is lost
    }
}

ChannelOutcome Simulator::exchange(const Frame& command) {
    transmit_command(command);
    uint64_t arrive = clock_us_;

    struct PendingReply {
        size_t idx;
        Frame frame;
        uint64_t start;
    };
    std::vector<PendingReply> replies;
    for (size_t i = 0; i < responders_.size(); ++i) {
        TagStepResult res = responders_[i]->step(command, arrive, config_.timing);
        for (auto& note : res.state_changes)
            trace_.push(arrive, responders_[i]->actor_name(),
                        EventKind::StateChange, std::move(note));
        if (res.reply &&
            res.reply_at_us <= arrive + config_.timing.reply_deadline_us)
            replies.push_back({i, std::move(*res.reply), res.reply_at_us});
    }

    if (replies.empty()) {
        clock_us_ = arrive + config_.timing.reply_deadline_us;
        trace_.push(clock_us_, "reader", EventKind::RxDeliver, "silence");
        return ChannelOutcome::silence();
    }

    std::vector<SimEvent> window;
    uint64_t window_end = arrive;
    for (const auto& r : replies) {
        uint64_t air = frame_airtime(r.frame, LinkDir::TagToReader, config_.timing);
        const std::string actor = responders_[r.idx]->actor_name();
        window.push_back(
            {r.start, actor, EventKind::TxStart, frame_detail(r.frame)});
        window.push_back(
            {r.start + air, actor, EventKind::TxEnd, frame_detail(r.frame)});
        window_end = std::max(window_end, r.start + air);
        if (frame_opcode(r.frame) == Opcode::Busy) ++metrics_.busy_replies;
    }
    std::stable_sort(window.begin(), window.end(),
                     [](const SimEvent& a, const SimEvent& b) {
                         return a.time_us < b.time_us;
                     });
    for (auto& e : window)
        trace_.push(e.time_us, std::move(e.actor), e.kind, std::move(e.detail));

    clock_us_ = window_end;
    if (replies.size() == 1) {
        trace_.push(clock_us_, "reader", EventKind::RxDeliver,
                    frame_detail(replies.front().frame));
        return ChannelOutcome::single(std::move(replies.front().frame));
    }
    ++metrics_.collisions;
    trace_.push(clock_us_, "reader", EventKind::RxDeliver, "collision");
    return ChannelOutcome::collision();
}

std::optional<DecodeError> Simulator::inject_raw(
    std::span<const uint8_t> bytes) {
    DecodeResult decoded = decode_frame(bytes);
    if (const auto* err = std::get_if<DecodeError>(&decoded)) {
        trace_.push(clock_us_, "reader", EventKind::RxDeliver,
                    "garbled " + to_hex(bytes) + " " + decode_error_name(*err));
        return *err;
    }
    const Frame& frame = std::get<Frame>(decoded);
    for (auto& r : responders_) {
        TagStepResult res = r->step(frame, clock_us_, config_.timing);
        for (auto& note : res.state_changes)
            trace_.push(clock_us_, r->actor_name(), EventKind::StateChange,
                        std::move(note));
    }
    return std::nullopt;
}

void Simulator::record_verdict(const TagVerdict& verdict) {
    trace_.push(clock_us_, "reader", EventKind::Verdict,
                "id=" + verdict.id.to_hex() +
                    " outcome=" + auth_outcome_name(verdict.outcome));
    ++metrics_.auth_attempts;
    if (verdict.outcome == AuthOutcome::Verified)
        ++metrics_.auth_verified;
    else
        ++metrics_.auth_failed;
}

void Simulator::mark(const std::string& note) {
    trace_.push(clock_us_, "reader", EventKind::StateChange, note);
}

void Simulator::session_reset_all() {
    for (auto& r : responders_) {
        r->session_reset();
        trace_.push(clock_us_, r->actor_name(), EventKind::StateChange,
                    "session_reset");
    }
}

void Simulator::finalize() {
    metrics_.total_time_us = clock_us_;
    metrics_.max_tag_current_uA =
        power_check(trace_, config_.power).max_current_uA;
}

RunResult run_scenario(const Scenario& scenario) {
    validate_scenario(scenario);
    Simulator sim(SimConfig{scenario.timing, scenario.power, scenario.seed},
                  scenario.tags);

    RunResult result;
    result.inventory = run_inventory(sim);
    sim.metrics().inventory_time_us = sim.now();
    sim.mark("inventory_done");

    if (scenario.mode != ScenarioMode::Inventory) {
        uint64_t auth_start = sim.now();
        switch (scenario.mode) {
            case ScenarioMode::SeqAuth:
                result.verdicts = auth_sequential(sim, result.inventory.found);
                break;
            case ScenarioMode::InterleavedAuth:
                result.verdicts = auth_interleaved(sim, result.inventory.found);
                break;
            case ScenarioMode::Mutual:
                result.verdicts = auth_mutual(sim, result.inventory.found);
                break;
            case ScenarioMode::Inventory:
                break;
        }
        sim.metrics().auth_time_us = sim.now() - auth_start;
        sim.mark("auth_done");
    }

    sim.finalize();
    result.metrics = sim.metrics();
    result.trace = std::move(sim.trace());
    return result;
}

}  // namespace rfidsim
