#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rfidsim/tag.hpp"
#include "rfidsim/timing.hpp"

namespace rfidsim {

enum class ScenarioMode {
    Inventory,
    SeqAuth,
    InterleavedAuth,
    Mutual,
};

const char* mode_name(ScenarioMode m);

struct Scenario {
    std::vector<TagConfig> tags;
    TimingModel timing{};
    PowerModel power{};
    ScenarioMode mode = ScenarioMode::Inventory;
    uint64_t seed = 0;
};

class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Parse, DuplicateId, BadHexLength, Invalid };

    ScenarioError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Strict parse of the JSON scenario format. Unknown fields are rejected;
/// timing/power defaults apply only when the whole block is omitted; a
/// present block must be complete. Per-tag flags default to false and
/// memory to all-zero pages.
Scenario parse_scenario(std::string_view text);

/// Re-checks the invariants run_scenario relies on (unique ids, sane
/// timing) for scenarios built programmatically.
void validate_scenario(const Scenario& scenario);

}  // namespace rfidsim
