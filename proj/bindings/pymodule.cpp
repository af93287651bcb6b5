#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>

#include "rfidsim/adversary.hpp"
#include "rfidsim/engine.hpp"
#include "rfidsim/frame.hpp"
#include "rfidsim/hex.hpp"
#include "rfidsim/scenario.hpp"

namespace py = pybind11;

namespace {

template <size_t N>
std::array<uint8_t, N> take_bytes(const py::bytes& b, const char* what) {
    std::string s = b;
    if (s.size() != N)
        throw py::value_error(std::string(what) + " must be exactly " +
                              std::to_string(N) + " bytes");
    std::array<uint8_t, N> out{};
    std::memcpy(out.data(), s.data(), N);
    return out;
}

rfidsim::Key128 take_key(const py::bytes& b) {
    return rfidsim::Key128{take_bytes<16>(b, "key")};
}

rfidsim::Direction take_direction(int dir) {
    if (dir != 0x01 && dir != 0x02)
        throw py::value_error("direction must be 0x01 (tag->reader) or 0x02 "
                              "(reader->tag)");
    return static_cast<rfidsim::Direction>(dir);
}

rfidsim::TagIdentity take_id(uint64_t id) {
    if (id > rfidsim::TagIdentity::kMax)
        throw py::value_error("tag id exceeds 56 bits");
    return rfidsim::TagIdentity{id};
}

py::bytes to_pybytes(std::span<const uint8_t> data) {
    return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

py::dict metrics_dict(const rfidsim::Metrics& m) {
    py::dict d;
    d["total_time_us"] = m.total_time_us;
    d["inventory_time_us"] = m.inventory_time_us;
    d["auth_time_us"] = m.auth_time_us;
    d["queries"] = m.queries;
    d["collisions"] = m.collisions;
    d["stay_quiets"] = m.stay_quiets;
    d["auth_attempts"] = m.auth_attempts;
    d["auth_verified"] = m.auth_verified;
    d["auth_failed"] = m.auth_failed;
    d["busy_replies"] = m.busy_replies;
    d["max_tag_current_uA"] = m.max_tag_current_uA;
    return d;
}

rfidsim::Scenario load_scenario(const std::string& scenario_json,
                                const std::optional<uint64_t>& seed) {
    rfidsim::Scenario s = rfidsim::parse_scenario(scenario_json);
    if (seed) s.seed = *seed;
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Symmetric-key RFID authentication protocol simulator";

    m.def(
        "aes128_encrypt",
        [](const py::bytes& key, const py::bytes& block) {
            auto ct = rfidsim::aes128_encrypt(
                take_key(key), rfidsim::Block128{take_bytes<16>(block, "block")});
            return to_pybytes(ct.bytes);
        },
        py::arg("key"), py::arg("block"));

    m.def(
        "aes128_decrypt",
        [](const py::bytes& key, const py::bytes& block) {
            auto pt = rfidsim::aes128_decrypt(
                take_key(key), rfidsim::Block128{take_bytes<16>(block, "block")});
            return to_pybytes(pt.bytes);
        },
        py::arg("key"), py::arg("block"));

    m.def(
        "crc16",
        [](const py::bytes& data) {
            std::string s = data;
            return rfidsim::crc16(std::span<const uint8_t>(
                reinterpret_cast<const uint8_t*>(s.data()), s.size()));
        },
        py::arg("data"));

    m.def(
        "compute_token",
        [](const py::bytes& key, int direction, const py::bytes& nonce,
           uint64_t tag_id) {
            auto token = rfidsim::compute_token(
                take_key(key), take_direction(direction),
                rfidsim::Nonce64{take_bytes<8>(nonce, "nonce")},
                take_id(tag_id));
            return to_pybytes(token.block.bytes);
        },
        py::arg("key"), py::arg("direction"), py::arg("nonce"),
        py::arg("tag_id"));

    m.def(
        "verify_token",
        [](const py::bytes& key, int direction, const py::bytes& nonce,
           uint64_t tag_id, const py::bytes& token) {
            return rfidsim::verify_token(
                take_key(key), take_direction(direction),
                rfidsim::Nonce64{take_bytes<8>(nonce, "nonce")},
                take_id(tag_id),
                rfidsim::AuthToken{
                    rfidsim::Block128{take_bytes<16>(token, "token")}});
        },
        py::arg("key"), py::arg("direction"), py::arg("nonce"),
        py::arg("tag_id"), py::arg("token"));

    m.def(
        "nonce_stream",
        [](uint64_t seed, size_t count) {
            rfidsim::NoncePrng prng = rfidsim::NoncePrng::from_seed(seed);
            py::list out;
            for (size_t i = 0; i < count; ++i)
                out.append(to_pybytes(prng.next().bytes));
            return out;
        },
        py::arg("seed"), py::arg("count"));

    m.def(
        "run_scenario",
        [](const std::string& scenario_json, std::optional<uint64_t> seed) {
            rfidsim::RunResult run =
                rfidsim::run_scenario(load_scenario(scenario_json, seed));
            py::dict d;
            d["metrics"] = metrics_dict(run.metrics);
            d["trace"] = run.trace.serialize();
            py::list found;
            for (auto id : run.inventory.found) found.append(id.value);
            d["found"] = found;
            py::dict verdicts;
            for (const auto& v : run.verdicts)
                verdicts[py::str(v.id.to_hex())] =
                    rfidsim::auth_outcome_name(v.outcome);
            d["verdicts"] = verdicts;
            return d;
        },
        py::arg("scenario_json"), py::arg("seed") = std::nullopt);

    m.def(
        "run_attack",
        [](const std::string& name, const std::string& scenario_json,
           uint64_t trials, std::optional<uint64_t> seed) {
            rfidsim::Scenario s = load_scenario(scenario_json, seed);
            rfidsim::AttackResult result;
            if (name == "replay") {
                result = rfidsim::replay_attack(s, trials, s.seed);
            } else if (name == "clone") {
                if (s.tags.empty())
                    throw py::value_error("clone attack needs at least one tag");
                result = rfidsim::clone_attack(s, s.tags.front().id, trials,
                                               s.seed);
            } else if (name == "tracking") {
                result = rfidsim::tracking_probe(s, trials, s.seed);
            } else {
                throw py::value_error("unknown attack '" + name + "'");
            }
            py::dict d;
            d["name"] = result.name;
            d["trials"] = result.trials;
            d["successes"] = result.successes;
            d["notes"] = result.notes;
            return d;
        },
        py::arg("name"), py::arg("scenario_json"), py::arg("trials"),
        py::arg("seed") = std::nullopt);

    m.def(
        "compare_auth",
        [](const std::string& scenario_json, std::optional<uint64_t> seed) {
            rfidsim::Scenario s = load_scenario(scenario_json, seed);
            s.mode = rfidsim::ScenarioMode::SeqAuth;
            auto seq = rfidsim::run_scenario(s);
            s.mode = rfidsim::ScenarioMode::InterleavedAuth;
            auto inter = rfidsim::run_scenario(s);
            py::dict d;
            d["sequential"] = metrics_dict(seq.metrics);
            d["interleaved"] = metrics_dict(inter.metrics);
            return d;
        },
        py::arg("scenario_json"), py::arg("seed") = std::nullopt);

    py::register_exception<rfidsim::ScenarioError>(m, "ScenarioError");
}
