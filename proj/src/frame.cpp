#include "rfidsim/frame.hpp"

#include <sstream>

#include "rfidsim/hex.hpp"

namespace rfidsim {

namespace {

void put_id(std::vector<uint8_t>& out, TagIdentity id) {
    auto b = id.to_bytes();
    out.insert(out.end(), b.begin(), b.end());
}

void put_nonce(std::vector<uint8_t>& out, const Nonce64& n) {
    out.insert(out.end(), n.bytes.begin(), n.bytes.end());
}

void put_block(std::vector<uint8_t>& out, const Block128& b) {
    out.insert(out.end(), b.bytes.begin(), b.bytes.end());
}

/// Cursor over the frame body with hard length checks.
class BodyReader {
public:
    explicit BodyReader(std::span<const uint8_t> body) : body_(body) {}

    bool take(size_t n, std::span<const uint8_t>& out) {
        if (pos_ + n > body_.size()) return false;
        out = body_.subspan(pos_, n);
        pos_ += n;
        return true;
    }
    bool take_id(TagIdentity& id) {
        std::span<const uint8_t> s;
        if (!take(7, s)) return false;
        id = TagIdentity::from_bytes(std::span<const uint8_t, 7>(s));
        return true;
    }
    bool take_nonce(Nonce64& n) {
        std::span<const uint8_t> s;
        if (!take(8, s)) return false;
        std::copy(s.begin(), s.end(), n.bytes.begin());
        return true;
    }
    bool take_block(Block128& b) {
        std::span<const uint8_t> s;
        if (!take(16, s)) return false;
        std::copy(s.begin(), s.end(), b.bytes.begin());
        return true;
    }
    bool exhausted() const { return pos_ == body_.size(); }

private:
    std::span<const uint8_t> body_;
    size_t pos_ = 0;
};

std::vector<uint8_t> prefix_bytes(const Prefix& p) {
    // MSB-first bit packing, zero-padded to a byte boundary.
    size_t nbytes = (p.len + 7) / 8;
    std::vector<uint8_t> out(nbytes, 0);
    uint64_t shifted = p.len == 0 ? 0 : p.bits << (8 * nbytes - p.len);
    for (size_t i = 0; i < nbytes; ++i)
        out[i] = static_cast<uint8_t>(shifted >> (8 * (nbytes - 1 - i)));
    return out;
}

}  // namespace

bool matches_prefix(TagIdentity id, const Prefix& prefix) {
    if (prefix.len == 0) return true;
    return (id.value >> (56 - prefix.len)) == prefix.bits;
}

uint16_t crc16(std::span<const uint8_t> data) {
    uint16_t crc = 0xFFFF;
    for (uint8_t b : data) {
        crc ^= static_cast<uint16_t>(b) << 8;
        for (int i = 0; i < 8; ++i) {
            if (crc & 0x8000)
                crc = static_cast<uint16_t>((crc << 1) ^ 0x1021);
            else
                crc = static_cast<uint16_t>(crc << 1);
        }
    }
    return crc;
}

std::vector<uint8_t> encode_frame(const Frame& f) {
    std::vector<uint8_t> out;
    out.push_back(static_cast<uint8_t>(frame_opcode(f)));
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Inventory>) {
                out.push_back(v.prefix.len);
                auto pb = prefix_bytes(v.prefix);
                out.insert(out.end(), pb.begin(), pb.end());
            } else if constexpr (std::is_same_v<T, TagReply>) {
                put_id(out, v.id);
            } else if constexpr (std::is_same_v<T, StayQuiet>) {
                put_id(out, v.id);
            } else if constexpr (std::is_same_v<T, AuthChallenge>) {
                put_id(out, v.id);
                put_nonce(out, v.nonce);
            } else if constexpr (std::is_same_v<T, AuthResponse>) {
                put_block(out, v.token.block);
                put_nonce(out, v.tag_nonce);
            } else if constexpr (std::is_same_v<T, AuthRequestAr>) {
                put_id(out, v.id);
                put_nonce(out, v.nonce);
            } else if constexpr (std::is_same_v<T, ResponseRequestRr>) {
                put_id(out, v.id);
            } else if constexpr (std::is_same_v<T, ReaderAuthToken>) {
                put_id(out, v.id);
                put_nonce(out, v.nonce);
                put_block(out, v.token.block);
            } else if constexpr (std::is_same_v<T, ReadMemory>) {
                put_id(out, v.id);
                out.push_back(static_cast<uint8_t>(v.addr >> 8));
                out.push_back(static_cast<uint8_t>(v.addr & 0xFF));
            } else if constexpr (std::is_same_v<T, MemoryData>) {
                out.insert(out.end(), v.payload.begin(), v.payload.end());
            } else if constexpr (std::is_same_v<T, Busy>) {
                // empty body
            } else if constexpr (std::is_same_v<T, ErrorFrame>) {
                out.push_back(v.code);
            }
        },
        f);
    uint16_t crc = crc16(out);
    out.push_back(static_cast<uint8_t>(crc >> 8));
    out.push_back(static_cast<uint8_t>(crc & 0xFF));
    return out;
}

DecodeResult decode_frame(std::span<const uint8_t> bytes) {
    if (bytes.size() < 3) return DecodeError::TruncatedBody;
    uint16_t stored = static_cast<uint16_t>(
        (static_cast<uint16_t>(bytes[bytes.size() - 2]) << 8) |
        bytes[bytes.size() - 1]);
    if (crc16(bytes.first(bytes.size() - 2)) != stored)
        return DecodeError::BadCrc;

    uint8_t op = bytes[0];
    BodyReader body(bytes.subspan(1, bytes.size() - 3));

    Frame f;
    switch (static_cast<Opcode>(op)) {
        case Opcode::Inventory: {
            std::span<const uint8_t> len_span;
            if (!body.take(1, len_span)) return DecodeError::TruncatedBody;
            uint8_t len = len_span[0];
            if (len > 56) return DecodeError::TruncatedBody;
            size_t nbytes = (len + 7) / 8;
            std::span<const uint8_t> pb;
            if (!body.take(nbytes, pb)) return DecodeError::TruncatedBody;
            uint64_t raw = 0;
            for (uint8_t b : pb) raw = (raw << 8) | b;
            uint64_t bits = len == 0 ? 0 : raw >> (8 * nbytes - len);
            // reject nonzero padding bits
            if (len % 8 != 0 && nbytes > 0) {
                uint64_t pad_mask = (uint64_t{1} << (8 * nbytes - len)) - 1;
                if (raw & pad_mask) return DecodeError::TruncatedBody;
            }
            f = Inventory{Prefix{len, bits}};
            break;
        }
        case Opcode::TagReply: {
            TagReply v;
            if (!body.take_id(v.id)) return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::StayQuiet: {
            StayQuiet v;
            if (!body.take_id(v.id)) return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::AuthChallenge: {
            AuthChallenge v;
            if (!body.take_id(v.id) || !body.take_nonce(v.nonce))
                return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::AuthResponse: {
            AuthResponse v;
            if (!body.take_block(v.token.block) || !body.take_nonce(v.tag_nonce))
                return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::AuthRequestAr: {
            AuthRequestAr v;
            if (!body.take_id(v.id) || !body.take_nonce(v.nonce))
                return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::ResponseRequestRr: {
            ResponseRequestRr v;
            if (!body.take_id(v.id)) return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::ReaderAuthToken: {
            ReaderAuthToken v;
            if (!body.take_id(v.id) || !body.take_nonce(v.nonce) ||
                !body.take_block(v.token.block))
                return DecodeError::TruncatedBody;
            f = v;
            break;
        }
        case Opcode::ReadMemory: {
            ReadMemory v;
            std::span<const uint8_t> a;
            if (!body.take_id(v.id) || !body.take(2, a))
                return DecodeError::TruncatedBody;
            v.addr = static_cast<uint16_t>((static_cast<uint16_t>(a[0]) << 8) |
                                           a[1]);
            f = v;
            break;
        }
        case Opcode::MemoryData: {
            MemoryData v;
            std::span<const uint8_t> p;
            if (!body.take(16, p)) return DecodeError::TruncatedBody;
            std::copy(p.begin(), p.end(), v.payload.begin());
            f = v;
            break;
        }
        case Opcode::Busy: {
            f = Busy{};
            break;
        }
        case Opcode::Error: {
            ErrorFrame v;
            std::span<const uint8_t> c;
            if (!body.take(1, c)) return DecodeError::TruncatedBody;
            v.code = c[0];
            f = v;
            break;
        }
        default:
            return DecodeError::UnknownOpcode;
    }
    if (!body.exhausted()) return DecodeError::TruncatedBody;
    return f;
}

Opcode frame_opcode(const Frame& f) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Inventory>) return Opcode::Inventory;
            if constexpr (std::is_same_v<T, TagReply>) return Opcode::TagReply;
            if constexpr (std::is_same_v<T, StayQuiet>) return Opcode::StayQuiet;
            if constexpr (std::is_same_v<T, AuthChallenge>)
                return Opcode::AuthChallenge;
            if constexpr (std::is_same_v<T, AuthResponse>)
                return Opcode::AuthResponse;
            if constexpr (std::is_same_v<T, AuthRequestAr>)
                return Opcode::AuthRequestAr;
            if constexpr (std::is_same_v<T, ResponseRequestRr>)
                return Opcode::ResponseRequestRr;
            if constexpr (std::is_same_v<T, ReaderAuthToken>)
                return Opcode::ReaderAuthToken;
            if constexpr (std::is_same_v<T, ReadMemory>)
                return Opcode::ReadMemory;
            if constexpr (std::is_same_v<T, MemoryData>)
                return Opcode::MemoryData;
            if constexpr (std::is_same_v<T, Busy>) return Opcode::Busy;
            if constexpr (std::is_same_v<T, ErrorFrame>) return Opcode::Error;
        },
        f);
}

std::optional<TagIdentity> frame_target(const Frame& f) {
    return std::visit(
        [](const auto& v) -> std::optional<TagIdentity> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StayQuiet> ||
                          std::is_same_v<T, AuthChallenge> ||
                          std::is_same_v<T, AuthRequestAr> ||
                          std::is_same_v<T, ResponseRequestRr> ||
                          std::is_same_v<T, ReaderAuthToken> ||
                          std::is_same_v<T, ReadMemory>)
                return v.id;
            else
                return std::nullopt;
        },
        f);
}

std::string frame_to_string(const Frame& f) {
    std::ostringstream os;
    std::visit(
        [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Inventory>) {
                os << "Inventory{len=" << int(v.prefix.len);
                if (v.prefix.len > 0) {
                    os << ",prefix=";
                    for (int i = v.prefix.len - 1; i >= 0; --i)
                        os << ((v.prefix.bits >> i) & 1);
                }
                os << "}";
            } else if constexpr (std::is_same_v<T, TagReply>) {
                os << "TagReply{id=" << v.id.to_hex() << "}";
            } else if constexpr (std::is_same_v<T, StayQuiet>) {
                os << "StayQuiet{id=" << v.id.to_hex() << "}";
            } else if constexpr (std::is_same_v<T, AuthChallenge>) {
                os << "AuthChallenge{id=" << v.id.to_hex()
                   << ",nonce=" << to_hex(v.nonce.bytes) << "}";
            } else if constexpr (std::is_same_v<T, AuthResponse>) {
                os << "AuthResponse{token=" << to_hex(v.token.block.bytes)
                   << ",tag_nonce=" << to_hex(v.tag_nonce.bytes) << "}";
            } else if constexpr (std::is_same_v<T, AuthRequestAr>) {
                os << "AuthRequestAR{id=" << v.id.to_hex()
                   << ",nonce=" << to_hex(v.nonce.bytes) << "}";
            } else if constexpr (std::is_same_v<T, ResponseRequestRr>) {
                os << "ResponseRequestRR{id=" << v.id.to_hex() << "}";
            } else if constexpr (std::is_same_v<T, ReaderAuthToken>) {
                os << "ReaderAuthToken{id=" << v.id.to_hex()
                   << ",nonce=" << to_hex(v.nonce.bytes)
                   << ",token=" << to_hex(v.token.block.bytes) << "}";
            } else if constexpr (std::is_same_v<T, ReadMemory>) {
                os << "ReadMemory{id=" << v.id.to_hex() << ",addr=" << v.addr
                   << "}";
            } else if constexpr (std::is_same_v<T, MemoryData>) {
                os << "MemoryData{payload=" << to_hex(v.payload) << "}";
            } else if constexpr (std::is_same_v<T, Busy>) {
                os << "Busy{}";
            } else if constexpr (std::is_same_v<T, ErrorFrame>) {
                os << "Error{code=" << int(v.code) << "}";
            }
        },
        f);
    return os.str();
}

const char* decode_error_name(DecodeError e) {
    switch (e) {
        case DecodeError::BadCrc:
            return "BadCrc";
        case DecodeError::UnknownOpcode:
            return "UnknownOpcode";
        case DecodeError::TruncatedBody:
            return "TruncatedBody";
    }
    return "?";
}

}  // namespace rfidsim
