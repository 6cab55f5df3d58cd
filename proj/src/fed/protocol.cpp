#include "hetrain/fed/protocol.hpp"

namespace hetrain::fed {

MsgType type_of(const Message& m) {
    return std::visit(
        [](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, Hello>) return MsgType::Hello;
            if constexpr (std::is_same_v<T, Assign>) return MsgType::Assign;
            if constexpr (std::is_same_v<T, RoundDone>) return MsgType::RoundDone;
            if constexpr (std::is_same_v<T, Aggregated>) return MsgType::Aggregated;
            if constexpr (std::is_same_v<T, Finish>) return MsgType::Finish;
            if constexpr (std::is_same_v<T, ErrorMsg>) return MsgType::Error;
        },
        m);
}

uint32_t round_of(const Message& m) {
    return std::visit([](const auto& msg) { return msg.round; }, m);
}

const char* type_name(MsgType t) {
    switch (t) {
        case MsgType::Hello: return "HELLO";
        case MsgType::Assign: return "ASSIGN";
        case MsgType::RoundDone: return "ROUND_DONE";
        case MsgType::Aggregated: return "AGGREGATED";
        case MsgType::Finish: return "FINISH";
        case MsgType::Error: return "ERROR";
    }
    return "UNKNOWN";
}

void config_encode(ByteWriter& w, const nn::TrainConfig& cfg) {
    w.u32(cfg.rounds);
    w.u32(cfg.batch);
    w.f64(cfg.lr);
    w.u32(cfg.workers);
    w.u32(cfg.local_epochs);
    w.u32(static_cast<uint32_t>(cfg.layer_dims.size()));
    for (uint32_t d : cfg.layer_dims) w.u32(d);
    w.u32(cfg.act_degree);
    w.f64(cfg.act_lo);
    w.f64(cfg.act_hi);
    w.u32(cfg.he.ring_dim);
    w.u32(cfg.he.ct_size);
    w.u32(cfg.he.slot_size);
    w.u32(cfg.he.level_budget);
    w.f64(cfg.he.noise_sigma);
    w.u64(cfg.init_seed);
    w.u64(cfg.shuffle_seed);
    w.u64(cfg.partition_seed);
    w.u32(cfg.round_offset);
    w.u32(cfg.round_deadline_ms);
}

nn::TrainConfig config_decode(ByteReader& r) {
    nn::TrainConfig cfg;
    cfg.rounds = r.u32();
    cfg.batch = r.u32();
    cfg.lr = r.f64();
    cfg.workers = r.u32();
    cfg.local_epochs = r.u32();
    uint32_t dims = r.u32();
    if (dims < 2 || dims > 256) throw FormatError("train config: implausible layer count");
    cfg.layer_dims.resize(dims);
    for (uint32_t& d : cfg.layer_dims) d = r.u32();
    cfg.act_degree = r.u32();
    cfg.act_lo = r.f64();
    cfg.act_hi = r.f64();
    cfg.he.ring_dim = r.u32();
    cfg.he.ct_size = r.u32();
    cfg.he.slot_size = r.u32();
    cfg.he.level_budget = r.u32();
    cfg.he.noise_sigma = r.f64();
    cfg.init_seed = r.u64();
    cfg.shuffle_seed = r.u64();
    cfg.partition_seed = r.u64();
    cfg.round_offset = r.u32();
    cfg.round_deadline_ms = r.u32();
    return cfg;
}

std::vector<uint8_t> encode(const Message& m) {
    ByteWriter body;
    body.u8(static_cast<uint8_t>(type_of(m)));
    body.u32(round_of(m));
    std::visit(
        [&](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, Hello>) {
                body.u32(msg.version);
            } else if constexpr (std::is_same_v<T, Assign>) {
                body.u32(msg.worker_index);
                body.u32(msg.worker_count);
                config_encode(body, msg.cfg);
                body.blob(msg.model);
                body.blob(msg.dataset);
            } else if constexpr (std::is_same_v<T, RoundDone> ||
                                 std::is_same_v<T, Aggregated>) {
                body.blob(msg.model);
            } else if constexpr (std::is_same_v<T, ErrorMsg>) {
                body.u32(static_cast<uint32_t>(msg.code));
                body.str(msg.text);
            }
        },
        m);

    ByteWriter frame;
    frame.u32(static_cast<uint32_t>(body.data().size()));
    frame.bytes(body.data());
    return frame.take();
}

Message decode(std::span<const uint8_t> bodied) {
    ByteReader r(bodied);
    uint8_t type = r.u8();
    uint32_t round = r.u32();
    Message out;
    switch (static_cast<MsgType>(type)) {
        case MsgType::Hello: {
            Hello m{round, r.u32()};
            out = m;
            break;
        }
        case MsgType::Assign: {
            Assign m;
            m.round = round;
            m.worker_index = r.u32();
            m.worker_count = r.u32();
            m.cfg = config_decode(r);
            m.model = r.blob();
            m.dataset = r.blob();
            out = std::move(m);
            break;
        }
        case MsgType::RoundDone: {
            RoundDone m{round, r.blob()};
            out = std::move(m);
            break;
        }
        case MsgType::Aggregated: {
            Aggregated m{round, r.blob()};
            out = std::move(m);
            break;
        }
        case MsgType::Finish: {
            out = Finish{round};
            break;
        }
        case MsgType::Error: {
            ErrorMsg m;
            m.round = round;
            m.code = static_cast<ErrCode>(r.u32());
            m.text = r.str();
            out = std::move(m);
            break;
        }
        default:
            throw FormatError("protocol: unknown message type " + std::to_string(type));
    }
    if (!r.done()) throw FormatError("protocol: trailing bytes in frame");
    return out;
}

} // namespace hetrain::fed
