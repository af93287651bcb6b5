#include "rfidsim/scenario.hpp"

#include <set>

#include <json.hpp>

#include "rfidsim/hex.hpp"

namespace rfidsim {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::Parse, message);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) parse_fail("unknown field '" + key + "' in " + where);
    }
}

uint64_t require_uint(const json& obj, const std::string& where,
                      const char* field) {
    if (!obj.contains(field))
        parse_fail("missing field '" + std::string(field) + "' in " + where);
    const json& v = obj.at(field);
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer() && v.get<int64_t>() >= 0)
        return static_cast<uint64_t>(v.get<int64_t>());
    parse_fail("field '" + std::string(field) + "' in " + where +
               " must be a non-negative integer");
}

bool optional_bool(const json& obj, const std::string& where, const char* field,
                   bool fallback) {
    if (!obj.contains(field)) return fallback;
    const json& v = obj.at(field);
    if (!v.is_boolean())
        parse_fail("field '" + std::string(field) + "' in " + where +
                   " must be a boolean");
    return v.get<bool>();
}

std::vector<uint8_t> require_hex(const json& obj, const std::string& where,
                                 const char* field, size_t expect_bytes) {
    if (!obj.contains(field))
        parse_fail("missing field '" + std::string(field) + "' in " + where);
    const json& v = obj.at(field);
    if (!v.is_string())
        parse_fail("field '" + std::string(field) + "' in " + where +
                   " must be a hex string");
    auto bytes = from_hex(v.get<std::string>());
    if (!bytes || bytes->size() != expect_bytes)
        throw ScenarioError(ScenarioError::Kind::BadHexLength,
                            "field '" + std::string(field) + "' in " + where +
                                " must be " + std::to_string(2 * expect_bytes) +
                                " hex chars");
    return *bytes;
}

TagConfig parse_tag(const json& t, size_t index) {
    std::string where = "tags[" + std::to_string(index) + "]";
    if (!t.is_object()) parse_fail(where + " must be an object");
    reject_unknown_keys(t, where,
                        {"id", "key", "require_reader_auth", "alias_mode",
                         "memory"});

    TagConfig config;
    auto id_bytes = require_hex(t, where, "id", 7);
    config.id = TagIdentity::from_bytes(std::span<const uint8_t, 7>(id_bytes));
    auto key_bytes = require_hex(t, where, "key", 16);
    std::copy(key_bytes.begin(), key_bytes.end(), config.key.bytes.begin());
    config.require_reader_auth =
        optional_bool(t, where, "require_reader_auth", false);
    config.alias_mode = optional_bool(t, where, "alias_mode", false);

    if (t.contains("memory")) {
        const json& mem = t.at("memory");
        if (!mem.is_array() || mem.size() > kMemoryPages)
            parse_fail("field 'memory' in " + where + " must be an array of at most " +
                       std::to_string(kMemoryPages) + " pages");
        for (size_t p = 0; p < mem.size(); ++p) {
            if (!mem[p].is_string())
                parse_fail("memory page in " + where + " must be a hex string");
            auto page = from_hex(mem[p].get<std::string>());
            if (!page || page->size() != kPageBytes)
                throw ScenarioError(ScenarioError::Kind::BadHexLength,
                                    "memory page in " + where + " must be " +
                                        std::to_string(2 * kPageBytes) +
                                        " hex chars");
            std::copy(page->begin(), page->end(), config.memory[p].begin());
        }
    }
    return config;
}

TimingModel parse_timing(const json& t) {
    if (!t.is_object()) parse_fail("'timing' must be an object");
    reject_unknown_keys(t, "timing",
                        {"reader_bits_per_sec", "tag_bits_per_sec",
                         "frame_overhead_us", "tag_clock_hz", "aes_cycles",
                         "reply_deadline_us"});
    TimingModel m;
    m.reader_bits_per_sec = require_uint(t, "timing", "reader_bits_per_sec");
    m.tag_bits_per_sec = require_uint(t, "timing", "tag_bits_per_sec");
    m.frame_overhead_us = require_uint(t, "timing", "frame_overhead_us");
    m.tag_clock_hz = require_uint(t, "timing", "tag_clock_hz");
    m.aes_cycles = require_uint(t, "timing", "aes_cycles");
    m.reply_deadline_us = require_uint(t, "timing", "reply_deadline_us");
    return m;
}

PowerModel parse_power(const json& p) {
    if (!p.is_object()) parse_fail("'power' must be an object");
    reject_unknown_keys(p, "power",
                        {"idle_current_uA", "rx_current_uA", "tx_current_uA",
                         "compute_current_uA", "budget_uA"});
    PowerModel m;
    m.idle_current_uA =
        static_cast<uint32_t>(require_uint(p, "power", "idle_current_uA"));
    m.rx_current_uA =
        static_cast<uint32_t>(require_uint(p, "power", "rx_current_uA"));
    m.tx_current_uA =
        static_cast<uint32_t>(require_uint(p, "power", "tx_current_uA"));
    m.compute_current_uA =
        static_cast<uint32_t>(require_uint(p, "power", "compute_current_uA"));
    m.budget_uA = static_cast<uint32_t>(require_uint(p, "power", "budget_uA"));
    return m;
}

ScenarioMode parse_mode(const json& v) {
    if (!v.is_string()) parse_fail("'mode' must be a string");
    std::string s = v.get<std::string>();
    if (s == "inventory") return ScenarioMode::Inventory;
    if (s == "seq-auth") return ScenarioMode::SeqAuth;
    if (s == "interleaved-auth") return ScenarioMode::InterleavedAuth;
    if (s == "mutual") return ScenarioMode::Mutual;
    parse_fail("unknown mode '" + s + "'");
}

}  // namespace

const char* mode_name(ScenarioMode m) {
    switch (m) {
        case ScenarioMode::Inventory:
            return "inventory";
        case ScenarioMode::SeqAuth:
            return "seq-auth";
        case ScenarioMode::InterleavedAuth:
            return "interleaved-auth";
        case ScenarioMode::Mutual:
            return "mutual";
    }
    return "?";
}

Scenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        parse_fail(e.what());
    }
    if (!root.is_object()) parse_fail("scenario root must be an object");
    reject_unknown_keys(root, "scenario",
                        {"tags", "timing", "power", "mode", "seed"});

    Scenario scenario;
    if (!root.contains("tags") || !root.at("tags").is_array())
        parse_fail("scenario requires a 'tags' array");
    size_t index = 0;
    for (const json& t : root.at("tags"))
        scenario.tags.push_back(parse_tag(t, index++));

    if (root.contains("timing")) scenario.timing = parse_timing(root.at("timing"));
    if (root.contains("power")) scenario.power = parse_power(root.at("power"));
    if (root.contains("mode")) scenario.mode = parse_mode(root.at("mode"));
    if (root.contains("seed")) scenario.seed = require_uint(root, "scenario", "seed");

    std::set<uint64_t> seen;
    for (const auto& t : scenario.tags)
        if (!seen.insert(t.id.value).second)
            throw ScenarioError(ScenarioError::Kind::DuplicateId,
                                "duplicate tag id " + t.id.to_hex());

    validate_scenario(scenario);
    return scenario;
}

void validate_scenario(const Scenario& scenario) {
    std::set<uint64_t> seen;
    for (const auto& t : scenario.tags)
        if (!seen.insert(t.id.value).second)
            throw ScenarioError(ScenarioError::Kind::DuplicateId,
                                "duplicate tag id " + t.id.to_hex());
    if (!scenario.timing.valid())
        throw ScenarioError(ScenarioError::Kind::Invalid,
                            "timing model requires positive bit rates, clock "
                            "and reply deadline");
}

}  // namespace rfidsim
