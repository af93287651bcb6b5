#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>

namespace rfidsim {

/// 56-bit tag identifier, 7 bytes MSB-first on the wire. 0 is legal.
struct TagIdentity {
    static constexpr uint64_t kMax = (uint64_t{1} << 56) - 1;

    uint64_t value = 0;

    std::array<uint8_t, 7> to_bytes() const;
    static TagIdentity from_bytes(std::span<const uint8_t, 7> bytes);

    std::string to_hex() const;  // 14 hex chars

    auto operator<=>(const TagIdentity&) const = default;
};

/// 16-byte shared secret. Never serialized into traces or metrics.
struct Key128 {
    std::array<uint8_t, 16> bytes{};
    auto operator<=>(const Key128&) const = default;
};

struct Block128 {
    std::array<uint8_t, 16> bytes{};
    auto operator<=>(const Block128&) const = default;
};

/// 8-byte challenge. Freshness is tracked per verifier session.
struct Nonce64 {
    std::array<uint8_t, 8> bytes{};
    auto operator<=>(const Nonce64&) const = default;
};

/// AES encryption of direction-tagged challenge material; verifiable only
/// with the matching key.
struct AuthToken {
    Block128 block{};
    auto operator<=>(const AuthToken&) const = default;
};

/// Direction byte bound into the token block. Blocks reflection between
/// the two unilateral exchanges.
enum class Direction : uint8_t {
    TagToReader = 0x01,
    ReaderToTag = 0x02,
};

Block128 aes128_encrypt(const Key128& key, const Block128& pt);
Block128 aes128_decrypt(const Key128& key, const Block128& ct);

/// Source of challenge nonces. Abstract so tests can force repeats.
class NonceSource {
public:
    virtual ~NonceSource() = default;
    virtual Nonce64 next() = 0;
};

/// Deterministic AES-counter nonce generator: nonce i is the first 8 bytes
/// of AES_seedkey(counter block i). The stream is a pure function of the
/// seed key.
class NoncePrng final : public NonceSource {
public:
    explicit NoncePrng(const Key128& seed_key) : key_(seed_key) {}

    /// Seed key carries the 64-bit seed big-endian in its last 8 bytes,
    /// zeros elsewhere; seed 0 gives the all-zero key.
    static NoncePrng from_seed(uint64_t seed);

    Nonce64 next() override;

    /// One full block of keystream (two counter steps). Used where 16
    /// uniform bytes are needed (bogus tokens, subkey derivation).
    Block128 next_block();

    /// Derives an independent child generator. `domain` separates uses
    /// (per-tag nonces, per-trial attack seeds, ...).
    NoncePrng derive(uint8_t domain, uint64_t index) const;

private:
    Key128 key_;
    uint64_t counter_ = 0;
};

/// Token block layout: dir(1) || nonce(8) || id(7), exactly one AES block.
AuthToken compute_token(const Key128& key, Direction dir, const Nonce64& nonce,
                        TagIdentity id);

/// True iff token equals compute_token(key, dir, nonce, id). Comparison is
/// constant-structure: the full block is always examined.
bool verify_token(const Key128& key, Direction dir, const Nonce64& nonce,
                  TagIdentity id, const AuthToken& token);

}  // namespace rfidsim
