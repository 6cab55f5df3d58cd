#include "hetrain/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hetrain/common/bytes.hpp"
#include "hetrain/common/rng.hpp"
#include "hetrain/he/serialize.hpp"
#include "hetrain/nn/train.hpp"

namespace hetrain::nn {

NetworkSpec NetworkSpec::mlp(std::span<const uint32_t> dims) {
    if (dims.size() < 2) throw ParamError("network spec: need at least input and output dims");
    NetworkSpec spec;
    for (size_t i = 0; i + 1 < dims.size(); ++i)
        spec.layers.push_back({dims[i], dims[i + 1]});
    return spec;
}

void NetworkSpec::validate(uint32_t slot_size) const {
    if (layers.empty()) throw ParamError("network spec: no layers");
    for (size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].in_dim == 0 || layers[i].out_dim == 0)
            throw ParamError("network spec: zero-sized layer");
        if (layers[i].in_dim > slot_size || layers[i].out_dim > slot_size)
            throw CapacityError("network spec: layer " + std::to_string(i + 1) + " dims " +
                                std::to_string(layers[i].in_dim) + "x" +
                                std::to_string(layers[i].out_dim) + " exceed segment width " +
                                std::to_string(slot_size));
        if (i > 0 && layers[i].in_dim != layers[i - 1].out_dim)
            throw ParamError("network spec: layer dims do not chain");
    }
}

PlainModel init_model(const NetworkSpec& spec, const ActivationPoly& act, uint64_t seed) {
    if (spec.layers.empty()) throw ParamError("init_model: empty network spec");
    std::mt19937_64 rng(seed);
    PlainModel m{spec, act, {}};
    for (const LayerSpec& ls : spec.layers) {
        PlainLayer layer;
        double bound = std::sqrt(6.0 / (static_cast<double>(ls.in_dim) + ls.out_dim));
        layer.w.assign(ls.out_dim, std::vector<double>(ls.in_dim));
        for (auto& row : layer.w)
            for (double& w : row) w = uniform(rng, -bound, bound);
        layer.b.assign(ls.out_dim, 0.0);
        m.layers.push_back(std::move(layer));
    }
    return m;
}

EncryptedModel encrypt_model_unchecked(const he::Context& ctx, const PlainModel& m,
                                       const he::PublicKey& pk) {
    const auto& p = ctx.params();
    m.spec.validate(p.slot_size);
    if (m.layers.size() != m.spec.layers.size())
        throw ParamError("encrypt_model: layer count does not match spec");
    EncryptedModel em{m.spec, m.act, {}};
    for (size_t i = 0; i < m.layers.size(); ++i) {
        EncryptedLayer el;
        el.axis = weight_axis(i + 1);
        el.in_dim = m.spec.layers[i].in_dim;
        el.out_dim = m.spec.layers[i].out_dim;
        el.w_ct = ctx.encrypt(pk, pack::pack2d(m.layers[i].w, el.axis, p.slot_size, p.ct_size));
        el.b_ct = ctx.encrypt(
            pk, pack::pack1d(m.layers[i].b, pack::flip(el.axis), p.slot_size, p.ct_size));
        em.layers.push_back(std::move(el));
    }
    return em;
}

EncryptedModel encrypt_model(const he::Context& ctx, const PlainModel& m,
                             const he::PublicKey& pk) {
    uint32_t depth = audit_train_depth(m.spec, m.act, ctx.params());
    if (depth > ctx.params().level_budget)
        throw LevelExhaustedError(
            "encrypt_model: one training step needs " + std::to_string(depth) +
            " levels but the budget is " + std::to_string(ctx.params().level_budget));
    return encrypt_model_unchecked(ctx, m, pk);
}

PlainModel decrypt_model(const he::Context& ctx, const he::SecretKey& sk,
                         const EncryptedModel& m) {
    const auto& p = ctx.params();
    PlainModel pm{m.spec, m.act, {}};
    for (const EncryptedLayer& el : m.layers) {
        PlainLayer layer;
        layer.w = pack::unpack2d(ctx.decrypt(sk, el.w_ct),
                                 pack::MatLayout{el.out_dim, el.in_dim, el.axis, p.slot_size,
                                                 p.ct_size});
        layer.b = pack::unpack1d(ctx.decrypt(sk, el.b_ct),
                                 pack::VecLayout{el.out_dim, pack::flip(el.axis), p.slot_size,
                                                 p.ct_size});
        pm.layers.push_back(std::move(layer));
    }
    return pm;
}

std::vector<double> forward_plain(const PlainModel& m, std::span<const double> x) {
    std::vector<double> h(x.begin(), x.end());
    for (const PlainLayer& layer : m.layers) {
        std::vector<double> next(layer.w.size());
        for (size_t r = 0; r < layer.w.size(); ++r) {
            double z = layer.b[r];
            for (size_t c = 0; c < h.size(); ++c) z += layer.w[r][c] * h[c];
            next[r] = m.act.eval(z);
        }
        h = std::move(next);
    }
    return h;
}

size_t predict_plain(const PlainModel& m, std::span<const double> x) {
    auto out = forward_plain(m, x);
    return static_cast<size_t>(std::max_element(out.begin(), out.end()) - out.begin());
}

namespace {

constexpr std::string_view kModelMagic = "HEMODEL1";
constexpr uint8_t kModelVersion = 1;

void header_write(ByteWriter& w, const NetworkSpec& spec, const ActivationPoly& act,
                  uint8_t payload_flag) {
    w.raw(kModelMagic);
    w.u8(kModelVersion);
    w.u8(payload_flag);
    w.u32(static_cast<uint32_t>(spec.layers.size()));
    for (size_t i = 0; i < spec.layers.size(); ++i) {
        w.u32(spec.layers[i].in_dim);
        w.u32(spec.layers[i].out_dim);
        w.u8(static_cast<uint8_t>(pack::axis_index(weight_axis(i + 1))));
    }
    w.u32(act.degree());
    w.f64(act.lo);
    w.f64(act.hi);
    w.u32(static_cast<uint32_t>(act.coeffs.size()));
    for (double c : act.coeffs) w.f64(c);
}

struct ModelHeader {
    NetworkSpec spec;
    ActivationPoly act;
    uint8_t payload_flag;
};

ModelHeader header_read(ByteReader& r) {
    r.expect(kModelMagic, "model file");
    uint8_t version = r.u8();
    if (version != kModelVersion)
        throw FormatError("model file: unsupported version " + std::to_string(version));
    ModelHeader h;
    h.payload_flag = r.u8();
    if (h.payload_flag > 1) throw FormatError("model file: unknown payload flag");
    uint32_t k = r.u32();
    if (k == 0 || k > 1024) throw FormatError("model file: implausible layer count");
    for (uint32_t i = 0; i < k; ++i) {
        LayerSpec ls{r.u32(), r.u32()};
        uint8_t axis = r.u8();
        if (axis != pack::axis_index(weight_axis(i + 1)))
            throw FormatError("model file: layer axis violates the k mod 2 rule");
        h.spec.layers.push_back(ls);
    }
    uint32_t degree = r.u32();
    double lo = r.f64(), hi = r.f64();
    uint32_t n_coeffs = r.u32();
    if (n_coeffs != degree + 1) throw FormatError("model file: coefficient count mismatch");
    std::vector<double> coeffs(n_coeffs);
    for (double& c : coeffs) c = r.f64();
    h.act = ActivationPoly::from_coeffs(std::move(coeffs), lo, hi);
    return h;
}

} // namespace

std::vector<uint8_t> model_serialize(const PlainModel& m) {
    ByteWriter w;
    header_write(w, m.spec, m.act, 0);
    for (const PlainLayer& layer : m.layers) {
        for (const auto& row : layer.w)
            for (double v : row) w.f64(v);
        for (double v : layer.b) w.f64(v);
    }
    return w.take();
}

std::vector<uint8_t> model_serialize(const EncryptedModel& m) {
    ByteWriter w;
    header_write(w, m.spec, m.act, 1);
    for (const EncryptedLayer& layer : m.layers) {
        w.blob(he::ct_serialize(layer.w_ct));
        w.blob(he::ct_serialize(layer.b_ct));
    }
    return w.take();
}

std::variant<PlainModel, EncryptedModel> model_deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    ModelHeader h = header_read(r);
    if (h.payload_flag == 0) {
        PlainModel m{h.spec, h.act, {}};
        for (const LayerSpec& ls : h.spec.layers) {
            PlainLayer layer;
            layer.w.assign(ls.out_dim, std::vector<double>(ls.in_dim));
            for (auto& row : layer.w)
                for (double& v : row) v = r.f64();
            layer.b.resize(ls.out_dim);
            for (double& v : layer.b) v = r.f64();
            m.layers.push_back(std::move(layer));
        }
        if (!r.done()) throw FormatError("model file: trailing bytes");
        return m;
    }
    EncryptedModel m{h.spec, h.act, {}};
    for (size_t i = 0; i < h.spec.layers.size(); ++i) {
        EncryptedLayer el;
        el.axis = weight_axis(i + 1);
        el.in_dim = h.spec.layers[i].in_dim;
        el.out_dim = h.spec.layers[i].out_dim;
        auto wb = r.blob();
        el.w_ct = he::ct_deserialize(wb);
        auto bb = r.blob();
        el.b_ct = he::ct_deserialize(bb);
        m.layers.push_back(std::move(el));
    }
    if (!r.done()) throw FormatError("model file: trailing bytes");
    return m;
}

} // namespace hetrain::nn
