#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfidsim/adversary.hpp"
#include "rfidsim/engine.hpp"
#include "rfidsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenario = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("cannot read " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out.good()) throw IoError("cannot write " + path);
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

int run_command(const std::string& scenario_path, bool seed_set, uint64_t seed,
                const std::string& out_path, const std::string& trace_path,
                const std::string& attack, bool compare, bool trials_set,
                uint64_t trials) {
    rfidsim::Scenario scenario =
        rfidsim::parse_scenario(read_file(scenario_path));
    if (seed_set) scenario.seed = seed;

    if (!attack.empty()) {
        rfidsim::AttackResult result;
        if (attack == "replay") {
            result = rfidsim::replay_attack(scenario, trials_set ? trials : 10000,
                                            scenario.seed);
        } else if (attack == "clone") {
            if (scenario.tags.empty())
                throw rfidsim::ScenarioError(
                    rfidsim::ScenarioError::Kind::Invalid,
                    "clone attack needs at least one tag to impersonate");
            result = rfidsim::clone_attack(scenario, scenario.tags.front().id,
                                           trials_set ? trials : 10000,
                                           scenario.seed);
        } else {
            result = rfidsim::tracking_probe(scenario,
                                             trials_set ? trials : 1000,
                                             scenario.seed);
        }
        emit(result.to_json(), out_path);
        if (!trace_path.empty() && !result.sample_transcripts.empty())
            write_file(trace_path, result.sample_transcripts.front());
        return kExitOk;
    }

    if (compare) {
        rfidsim::Scenario seq = scenario;
        seq.mode = rfidsim::ScenarioMode::SeqAuth;
        rfidsim::Scenario inter = scenario;
        inter.mode = rfidsim::ScenarioMode::InterleavedAuth;

        rfidsim::RunResult seq_run = rfidsim::run_scenario(seq);
        rfidsim::RunResult inter_run = rfidsim::run_scenario(inter);

        uint64_t ts = seq_run.metrics.auth_time_us;
        uint64_t ti = inter_run.metrics.auth_time_us;
        std::printf("mode          auth_time_us\n");
        std::printf("sequential    %llu\n", static_cast<unsigned long long>(ts));
        std::printf("interleaved   %llu\n", static_cast<unsigned long long>(ti));
        if (ts > 0)
            std::printf("ratio         %.4f\n",
                        static_cast<double>(ti) / static_cast<double>(ts));
        else
            std::printf("ratio         n/a\n");

        if (!out_path.empty()) {
            nlohmann::json j;
            j["sequential"] =
                nlohmann::json::parse(seq_run.metrics.to_json());
            j["interleaved"] =
                nlohmann::json::parse(inter_run.metrics.to_json());
            write_file(out_path, j.dump(2) + "\n");
        }
        if (!trace_path.empty())
            write_file(trace_path, inter_run.trace.serialize());
        return kExitOk;
    }

    rfidsim::RunResult run = rfidsim::run_scenario(scenario);
    emit(run.metrics.to_json(), out_path);
    if (!trace_path.empty()) write_file(trace_path, run.trace.serialize());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetric-key RFID authentication protocol simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario, attack or comparison");
    std::string scenario_path;
    std::string out_path;
    std::string trace_path;
    std::string attack;
    uint64_t seed = 0;
    uint64_t trials = 0;
    bool compare = false;

    run->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    auto* seed_opt =
        run->add_option("--seed", seed, "Seed override (replaces the file's)");
    run->add_option("--out", out_path, "Write metrics/attack JSON here");
    run->add_option("--trace", trace_path, "Write the event trace here");
    run->add_option("--attack", attack, "Run an attack instead of the mode")
        ->check(CLI::IsMember({"replay", "clone", "tracking"}));
    run->add_flag("--compare", compare,
                  "Run sequential and interleaved auth, print both totals");
    auto* trials_opt = run->add_option(
        "--trials", trials, "Attack trials / tracking sessions override");

    CLI11_PARSE(app, argc, argv);

    try {
        return run_command(scenario_path, seed_opt->count() > 0, seed, out_path,
                           trace_path, attack, compare, trials_opt->count() > 0,
                           trials);
    } catch (const IoError& e) {
        std::cerr << "rfidsim: error: io: " << e.what() << "\n";
        return kExitIo;
    } catch (const rfidsim::ScenarioError& e) {
        std::cerr << "rfidsim: error: scenario: " << e.what() << "\n";
        return kExitScenario;
    } catch (const rfidsim::WalkStuckError& e) {
        std::cerr << "rfidsim: error: scenario: " << e.what() << "\n";
        return kExitScenario;
    }
}
