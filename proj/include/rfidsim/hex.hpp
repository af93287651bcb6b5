#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfidsim {

/// Lowercase hex, no separators. All keys, ids, nonces and tokens render
/// through this everywhere (logs, traces, errors).
std::string to_hex(std::span<const uint8_t> bytes);

/// Strict inverse of to_hex: even length, [0-9a-fA-F] only.
std::optional<std::vector<uint8_t>> from_hex(std::string_view text);

}  // namespace rfidsim
