#include "rfidsim/crypto.hpp"

#include "rfidsim/hex.hpp"

namespace rfidsim {

namespace {

// FIPS-197 S-box and its inverse.
constexpr uint8_t kSbox[256] = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b,
    0xfe, 0xd7, 0xab, 0x76, 0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0,
    0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0, 0xb7, 0xfd, 0x93, 0x26,
    0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2,
    0xeb, 0x27, 0xb2, 0x75, 0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0,
    0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84, 0x53, 0xd1, 0x00, 0xed,
    0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f,
    0x50, 0x3c, 0x9f, 0xa8, 0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5,
    0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2, 0xcd, 0x0c, 0x13, 0xec,
    0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14,
    0xde, 0x5e, 0x0b, 0xdb, 0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c,
    0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79, 0xe7, 0xc8, 0x37, 0x6d,
    0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f,
    0x4b, 0xbd, 0x8b, 0x8a, 0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e,
    0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e, 0xe1, 0xf8, 0x98, 0x11,
    0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f,
    0xb0, 0x54, 0xbb, 0x16};

constexpr uint8_t kInvSbox[256] = {
    0x52, 0x09, 0x6a, 0xd5, 0x30, 0x36, 0xa5, 0x38, 0xbf, 0x40, 0xa3, 0x9e,
    0x81, 0xf3, 0xd7, 0xfb, 0x7c, 0xe3, 0x39, 0x82, 0x9b, 0x2f, 0xff, 0x87,
    0x34, 0x8e, 0x43, 0x44, 0xc4, 0xde, 0xe9, 0xcb, 0x54, 0x7b, 0x94, 0x32,
    0xa6, 0xc2, 0x23, 0x3d, 0xee, 0x4c, 0x95, 0x0b, 0x42, 0xfa, 0xc3, 0x4e,
    0x08, 0x2e, 0xa1, 0x66, 0x28, 0xd9, 0x24, 0xb2, 0x76, 0x5b, 0xa2, 0x49,
    0x6d, 0x8b, 0xd1, 0x25, 0x72, 0xf8, 0xf6, 0x64, 0x86, 0x68, 0x98, 0x16,
    0xd4, 0xa4, 0x5c, 0xcc, 0x5d, 0x65, 0xb6, 0x92, 0x6c, 0x70, 0x48, 0x50,
    0xfd, 0xed, 0xb9, 0xda, 0x5e, 0x15, 0x46, 0x57, 0xa7, 0x8d, 0x9d, 0x84,
    0x90, 0xd8, 0xab, 0x00, 0x8c, 0xbc, 0xd3, 0x0a, 0xf7, 0xe4, 0x58, 0x05,
    0xb8, 0xb3, 0x45, 0x06, 0xd0, 0x2c, 0x1e, 0x8f, 0xca, 0x3f, 0x0f, 0x02,
    0xc1, 0xaf, 0xbd, 0x03, 0x01, 0x13, 0x8a, 0x6b, 0x3a, 0x91, 0x11, 0x41,
    0x4f, 0x67, 0xdc, 0xea, 0x97, 0xf2, 0xcf, 0xce, 0xf0, 0xb4, 0xe6, 0x73,
    0x96, 0xac, 0x74, 0x22, 0xe7, 0xad, 0x35, 0x85, 0xe2, 0xf9, 0x37, 0xe8,
    0x1c, 0x75, 0xdf, 0x6e, 0x47, 0xf1, 0x1a, 0x71, 0x1d, 0x29, 0xc5, 0x89,
    0x6f, 0xb7, 0x62, 0x0e, 0xaa, 0x18, 0xbe, 0x1b, 0xfc, 0x56, 0x3e, 0x4b,
    0xc6, 0xd2, 0x79, 0x20, 0x9a, 0xdb, 0xc0, 0xfe, 0x78, 0xcd, 0x5a, 0xf4,
    0x1f, 0xdd, 0xa8, 0x33, 0x88, 0x07, 0xc7, 0x31, 0xb1, 0x12, 0x10, 0x59,
    0x27, 0x80, 0xec, 0x5f, 0x60, 0x51, 0x7f, 0xa9, 0x19, 0xb5, 0x4a, 0x0d,
    0x2d, 0xe5, 0x7a, 0x9f, 0x93, 0xc9, 0x9c, 0xef, 0xa0, 0xe0, 0x3b, 0x4d,
    0xae, 0x2a, 0xf5, 0xb0, 0xc8, 0xeb, 0xbb, 0x3c, 0x83, 0x53, 0x99, 0x61,
    0x17, 0x2b, 0x04, 0x7e, 0xba, 0x77, 0xd6, 0x26, 0xe1, 0x69, 0x14, 0x63,
    0x55, 0x21, 0x0c, 0x7d};

constexpr uint8_t kRcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10,
                               0x20, 0x40, 0x80, 0x1b, 0x36};

constexpr int kRounds = 10;

using RoundKeys = std::array<std::array<uint8_t, 16>, kRounds + 1>;

uint8_t xtime(uint8_t x) {
    return static_cast<uint8_t>((x << 1) ^ ((x >> 7) * 0x1b));
}

uint8_t gf_mul(uint8_t a, uint8_t b) {
    uint8_t out = 0;
    while (b) {
        if (b & 1) out ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return out;
}

RoundKeys expand_key(const Key128& key) {
    // 44 words; word i >= 4 is w[i-4] ^ f(w[i-1]).
    std::array<uint8_t, 176> w{};
    for (int i = 0; i < 16; ++i) w[i] = key.bytes[i];
    for (int i = 4; i < 44; ++i) {
        uint8_t prev[4] = {w[4 * (i - 1) + 0], w[4 * (i - 1) + 1],
                           w[4 * (i - 1) + 2], w[4 * (i - 1) + 3]};
        if (i % 4 == 0) {
            // RotWord + SubWord + Rcon
            uint8_t r0 = static_cast<uint8_t>(kSbox[prev[1]] ^ kRcon[i / 4 - 1]);
            uint8_t r1 = kSbox[prev[2]];
            uint8_t r2 = kSbox[prev[3]];
            uint8_t r3 = kSbox[prev[0]];
            prev[0] = r0;
            prev[1] = r1;
            prev[2] = r2;
            prev[3] = r3;
        }
        for (int j = 0; j < 4; ++j)
            w[4 * i + j] = static_cast<uint8_t>(w[4 * (i - 4) + j] ^ prev[j]);
    }
    RoundKeys rk{};
    for (int r = 0; r <= kRounds; ++r)
        for (int i = 0; i < 16; ++i) rk[r][i] = w[16 * r + i];
    return rk;
}

void add_round_key(std::array<uint8_t, 16>& s,
                   const std::array<uint8_t, 16>& rk) {
    for (int i = 0; i < 16; ++i) s[i] ^= rk[i];
}

void sub_bytes(std::array<uint8_t, 16>& s) {
    for (auto& b : s) b = kSbox[b];
}

void inv_sub_bytes(std::array<uint8_t, 16>& s) {
    for (auto& b : s) b = kInvSbox[b];
}

// State is column-major: byte index = 4*col + row.
void shift_rows(std::array<uint8_t, 16>& s) {
    std::array<uint8_t, 16> t = s;
    for (int row = 1; row < 4; ++row)
        for (int col = 0; col < 4; ++col)
            s[4 * col + row] = t[4 * ((col + row) % 4) + row];
}

void inv_shift_rows(std::array<uint8_t, 16>& s) {
    std::array<uint8_t, 16> t = s;
    for (int row = 1; row < 4; ++row)
        for (int col = 0; col < 4; ++col)
            s[4 * ((col + row) % 4) + row] = t[4 * col + row];
}

void mix_columns(std::array<uint8_t, 16>& s) {
    for (int c = 0; c < 4; ++c) {
        uint8_t a0 = s[4 * c + 0], a1 = s[4 * c + 1], a2 = s[4 * c + 2],
                a3 = s[4 * c + 3];
        s[4 * c + 0] = static_cast<uint8_t>(xtime(a0) ^ xtime(a1) ^ a1 ^ a2 ^ a3);
        s[4 * c + 1] = static_cast<uint8_t>(a0 ^ xtime(a1) ^ xtime(a2) ^ a2 ^ a3);
        s[4 * c + 2] = static_cast<uint8_t>(a0 ^ a1 ^ xtime(a2) ^ xtime(a3) ^ a3);
        s[4 * c + 3] = static_cast<uint8_t>(xtime(a0) ^ a0 ^ a1 ^ a2 ^ xtime(a3));
    }
}

void inv_mix_columns(std::array<uint8_t, 16>& s) {
    for (int c = 0; c < 4; ++c) {
        uint8_t a0 = s[4 * c + 0], a1 = s[4 * c + 1], a2 = s[4 * c + 2],
                a3 = s[4 * c + 3];
        s[4 * c + 0] = static_cast<uint8_t>(gf_mul(a0, 0x0e) ^ gf_mul(a1, 0x0b) ^
                                            gf_mul(a2, 0x0d) ^ gf_mul(a3, 0x09));
        s[4 * c + 1] = static_cast<uint8_t>(gf_mul(a0, 0x09) ^ gf_mul(a1, 0x0e) ^
                                            gf_mul(a2, 0x0b) ^ gf_mul(a3, 0x0d));
        s[4 * c + 2] = static_cast<uint8_t>(gf_mul(a0, 0x0d) ^ gf_mul(a1, 0x09) ^
                                            gf_mul(a2, 0x0e) ^ gf_mul(a3, 0x0b));
        s[4 * c + 3] = static_cast<uint8_t>(gf_mul(a0, 0x0b) ^ gf_mul(a1, 0x0d) ^
                                            gf_mul(a2, 0x09) ^ gf_mul(a3, 0x0e));
    }
}

Block128 token_block(Direction dir, const Nonce64& nonce, TagIdentity id) {
    Block128 b;
    b.bytes[0] = static_cast<uint8_t>(dir);
    for (int i = 0; i < 8; ++i) b.bytes[1 + i] = nonce.bytes[i];
    auto idb = id.to_bytes();
    for (int i = 0; i < 7; ++i) b.bytes[9 + i] = idb[i];
    return b;
}

}  // namespace

std::array<uint8_t, 7> TagIdentity::to_bytes() const {
    std::array<uint8_t, 7> out{};
    for (int i = 0; i < 7; ++i)
        out[i] = static_cast<uint8_t>(value >> (8 * (6 - i)));
    return out;
}

TagIdentity TagIdentity::from_bytes(std::span<const uint8_t, 7> bytes) {
    uint64_t v = 0;
    for (uint8_t b : bytes) v = (v << 8) | b;
    return TagIdentity{v};
}

std::string TagIdentity::to_hex() const {
    auto b = to_bytes();
    return rfidsim::to_hex(b);
}

Block128 aes128_encrypt(const Key128& key, const Block128& pt) {
    RoundKeys rk = expand_key(key);
    std::array<uint8_t, 16> s = pt.bytes;
    add_round_key(s, rk[0]);
    for (int r = 1; r < kRounds; ++r) {
        sub_bytes(s);
        shift_rows(s);
        mix_columns(s);
        add_round_key(s, rk[r]);
    }
    sub_bytes(s);
    shift_rows(s);
    add_round_key(s, rk[kRounds]);
    return Block128{s};
}

Block128 aes128_decrypt(const Key128& key, const Block128& ct) {
    RoundKeys rk = expand_key(key);
    std::array<uint8_t, 16> s = ct.bytes;
    add_round_key(s, rk[kRounds]);
    for (int r = kRounds - 1; r >= 1; --r) {
        inv_shift_rows(s);
        inv_sub_bytes(s);
        add_round_key(s, rk[r]);
        inv_mix_columns(s);
    }
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, rk[0]);
    return Block128{s};
}

NoncePrng NoncePrng::from_seed(uint64_t seed) {
    Key128 k;
    for (int i = 0; i < 8; ++i)
        k.bytes[8 + i] = static_cast<uint8_t>(seed >> (8 * (7 - i)));
    return NoncePrng(k);
}

Nonce64 NoncePrng::next() {
    Block128 ctr;
    for (int i = 0; i < 8; ++i)
        ctr.bytes[8 + i] = static_cast<uint8_t>(counter_ >> (8 * (7 - i)));
    ++counter_;
    Block128 ks = aes128_encrypt(key_, ctr);
    Nonce64 n;
    for (int i = 0; i < 8; ++i) n.bytes[i] = ks.bytes[i];
    return n;
}

Block128 NoncePrng::next_block() {
    Nonce64 a = next();
    Nonce64 b = next();
    Block128 out;
    for (int i = 0; i < 8; ++i) {
        out.bytes[i] = a.bytes[i];
        out.bytes[8 + i] = b.bytes[i];
    }
    return out;
}

NoncePrng NoncePrng::derive(uint8_t domain, uint64_t index) const {
    Block128 sep;
    sep.bytes[0] = domain;
    for (int i = 0; i < 8; ++i)
        sep.bytes[8 + i] = static_cast<uint8_t>(index >> (8 * (7 - i)));
    Key128 child;
    child.bytes = aes128_encrypt(key_, sep).bytes;
    return NoncePrng(child);
}

AuthToken compute_token(const Key128& key, Direction dir, const Nonce64& nonce,
                        TagIdentity id) {
    return AuthToken{aes128_encrypt(key, token_block(dir, nonce, id))};
}

bool verify_token(const Key128& key, Direction dir, const Nonce64& nonce,
                  TagIdentity id, const AuthToken& token) {
    AuthToken expected = compute_token(key, dir, nonce, id);
    uint8_t diff = 0;
    for (int i = 0; i < 16; ++i)
        diff |= static_cast<uint8_t>(expected.block.bytes[i] ^
                                     token.block.bytes[i]);
    return diff == 0;
}

}  // namespace rfidsim
