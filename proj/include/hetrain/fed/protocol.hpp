#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hetrain/common/bytes.hpp"
#include "hetrain/nn/train.hpp"

namespace hetrain::fed {

// Wire frames: u32 LE length, one type byte, then the payload. Every payload
// starts with the u32 round counter; receivers reject stale rounds.

inline constexpr uint32_t kProtocolVersion = 1;
inline constexpr uint32_t kMaxFrameBytes = 1u << 30;

enum class MsgType : uint8_t {
    Hello = 1,
    Assign = 2,
    RoundDone = 3,
    Aggregated = 4,
    Finish = 5,
    Error = 6,
};

enum class ErrCode : uint32_t {
    Protocol = 1,
    StaleRound = 2,
    Malformed = 3,
    Busy = 4,
    Internal = 5,
};

struct Hello {
    uint32_t round = 0;
    uint32_t version = kProtocolVersion;
};

struct Assign {
    uint32_t round = 0;
    uint32_t worker_index = 0;
    uint32_t worker_count = 1;
    nn::TrainConfig cfg;           // batch already divided down to floor(B/M)
    std::vector<uint8_t> model;    // HEMODEL1 bytes
    std::vector<uint8_t> dataset;  // HEDATA01 bytes, the worker's partition
};

struct RoundDone {
    uint32_t round = 0;
    std::vector<uint8_t> model;
};

struct Aggregated {
    uint32_t round = 0;
    std::vector<uint8_t> model;
};

struct Finish {
    uint32_t round = 0;
};

struct ErrorMsg {
    uint32_t round = 0;
    ErrCode code = ErrCode::Internal;
    std::string text;
};

using Message = std::variant<Hello, Assign, RoundDone, Aggregated, Finish, ErrorMsg>;

MsgType type_of(const Message& m);
uint32_t round_of(const Message& m);
const char* type_name(MsgType t);

/// Complete frame including the length prefix.
std::vector<uint8_t> encode(const Message& m);

/// Decodes the bytes after the length prefix (type byte + payload).
Message decode(std::span<const uint8_t> body);

// TrainConfig codec shared by Assign and the config round-trip tests.
void config_encode(ByteWriter& w, const nn::TrainConfig& cfg);
nn::TrainConfig config_decode(ByteReader& r);

} // namespace hetrain::fed
