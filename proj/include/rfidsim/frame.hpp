#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rfidsim/crypto.hpp"

namespace rfidsim {

/// MSB-first ID prefix: the `len` most-significant bits of a 56-bit id,
/// stored right-aligned in `bits` (so bits < 2^len).
struct Prefix {
    uint8_t len = 0;
    uint64_t bits = 0;

    Prefix child(int bit) const {
        return Prefix{static_cast<uint8_t>(len + 1),
                      (bits << 1) | static_cast<uint64_t>(bit & 1)};
    }
    auto operator<=>(const Prefix&) const = default;
};

/// True iff the prefix_len most-significant bits of id equal the prefix.
bool matches_prefix(TagIdentity id, const Prefix& prefix);

enum class Opcode : uint8_t {
    Inventory = 0x01,
    TagReply = 0x02,
    StayQuiet = 0x03,
    AuthChallenge = 0x04,
    AuthResponse = 0x05,
    AuthRequestAr = 0x06,
    ResponseRequestRr = 0x07,
    ReaderAuthToken = 0x08,
    ReadMemory = 0x09,
    MemoryData = 0x0A,
    Busy = 0x0B,
    Error = 0x0C,
};

enum class ErrorCode : uint8_t {
    MemoryDenied = 0x01,
    ReaderAuthFailed = 0x02,
    BadAddress = 0x03,
};

struct Inventory {
    Prefix prefix;
    auto operator<=>(const Inventory&) const = default;
};
struct TagReply {
    TagIdentity id;
    auto operator<=>(const TagReply&) const = default;
};
struct StayQuiet {
    TagIdentity id;
    auto operator<=>(const StayQuiet&) const = default;
};
struct AuthChallenge {
    TagIdentity id;
    Nonce64 nonce;
    auto operator<=>(const AuthChallenge&) const = default;
};
/// Carries the tag's token plus a tag-issued nonce the reader may answer
/// with a ReaderAuthToken (mutual authentication).
struct AuthResponse {
    AuthToken token;
    Nonce64 tag_nonce;
    auto operator<=>(const AuthResponse&) const = default;
};
struct AuthRequestAr {
    TagIdentity id;
    Nonce64 nonce;
    auto operator<=>(const AuthRequestAr&) const = default;
};
struct ResponseRequestRr {
    TagIdentity id;
    auto operator<=>(const ResponseRequestRr&) const = default;
};
struct ReaderAuthToken {
    TagIdentity id;
    Nonce64 nonce;
    AuthToken token;
    auto operator<=>(const ReaderAuthToken&) const = default;
};
struct ReadMemory {
    TagIdentity id;
    uint16_t addr = 0;  // page index
    auto operator<=>(const ReadMemory&) const = default;
};
struct MemoryData {
    std::array<uint8_t, 16> payload{};
    auto operator<=>(const MemoryData&) const = default;
};
struct Busy {
    auto operator<=>(const Busy&) const = default;
};
struct ErrorFrame {
    uint8_t code = 0;
    auto operator<=>(const ErrorFrame&) const = default;
};

using Frame =
    std::variant<Inventory, TagReply, StayQuiet, AuthChallenge, AuthResponse,
                 AuthRequestAr, ResponseRequestRr, ReaderAuthToken, ReadMemory,
                 MemoryData, Busy, ErrorFrame>;

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xor-out.
/// crc16("123456789") == 0x29B1.
uint16_t crc16(std::span<const uint8_t> data);

/// opcode(1) || body || crc16(2, big-endian over opcode||body).
std::vector<uint8_t> encode_frame(const Frame& f);

enum class DecodeError {
    BadCrc,
    UnknownOpcode,
    TruncatedBody,
};

using DecodeResult = std::variant<Frame, DecodeError>;

/// Inverse of encode_frame. Checks length, then CRC, then opcode, then
/// body layout; any body length mismatch reports TruncatedBody.
DecodeResult decode_frame(std::span<const uint8_t> bytes);

Opcode frame_opcode(const Frame& f);

/// Target id of an addressed command, if the frame type has one.
std::optional<TagIdentity> frame_target(const Frame& f);

/// Stable human-readable rendering used in traces next to the hex form.
std::string frame_to_string(const Frame& f);

const char* decode_error_name(DecodeError e);

}  // namespace rfidsim
