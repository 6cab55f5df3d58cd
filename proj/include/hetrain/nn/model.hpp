#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hetrain/he/context.hpp"
#include "hetrain/nn/activation.hpp"
#include "hetrain/pack/packing.hpp"

namespace hetrain::nn {

struct LayerSpec {
    uint32_t in_dim = 0;
    uint32_t out_dim = 0;

    bool operator==(const LayerSpec&) const = default;
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;

    static NetworkSpec mlp(std::span<const uint32_t> dims);

    size_t depth() const { return layers.size(); }
    uint32_t input_dim() const { return layers.front().in_dim; }
    uint32_t output_dim() const { return layers.back().out_dim; }
    void validate(uint32_t slot_size) const;
    bool operator==(const NetworkSpec&) const = default;
};

/// Packing axis of layer k's weights (1-based): 0 for odd k, 1 for even k.
/// The bias and the layer output live on the opposite axis.
inline pack::Axis weight_axis(size_t layer_one_based) {
    return layer_one_based % 2 == 1 ? pack::Axis::Row : pack::Axis::Col;
}

/// Axis the labels must be packed on so Sub(y, a) is layout-valid.
inline pack::Axis label_axis(const NetworkSpec& spec) {
    return pack::flip(weight_axis(spec.depth()));
}

struct PlainLayer {
    std::vector<std::vector<double>> w; // out_dim x in_dim
    std::vector<double> b;              // out_dim
};

struct PlainModel {
    NetworkSpec spec;
    ActivationPoly act;
    std::vector<PlainLayer> layers;
};

struct EncryptedLayer {
    he::Ciphertext w_ct;
    he::Ciphertext b_ct;
    pack::Axis axis = pack::Axis::Row;
    uint32_t in_dim = 0;
    uint32_t out_dim = 0;
};

struct EncryptedModel {
    NetworkSpec spec;
    ActivationPoly act;
    std::vector<EncryptedLayer> layers;
};

/// Glorot-uniform weights (|w| <= sqrt(6/(in+out))), zero biases;
/// deterministic for a seed.
PlainModel init_model(const NetworkSpec& spec, const ActivationPoly& act, uint64_t seed);

/// Packs and encrypts every layer (weights on the k mod 2 axis, bias on the
/// opposite one). Runs the training-depth audit and throws
/// LevelExhaustedError when one train step cannot fit the level budget.
EncryptedModel encrypt_model(const he::Context& ctx, const PlainModel& m,
                             const he::PublicKey& pk);

/// encrypt_model without the depth audit; the audit's own dry runs need it.
EncryptedModel encrypt_model_unchecked(const he::Context& ctx, const PlainModel& m,
                                       const he::PublicKey& pk);

PlainModel decrypt_model(const he::Context& ctx, const he::SecretKey& sk,
                         const EncryptedModel& m);

/// Plain inference with the polynomial activation.
std::vector<double> forward_plain(const PlainModel& m, std::span<const double> x);

/// Argmax over the output units; ties resolve to the lowest class index.
size_t predict_plain(const PlainModel& m, std::span<const double> x);

// Model container ("HEMODEL1"): spec, activation and either plain matrices
// or the per-layer serialized ciphertexts.
std::vector<uint8_t> model_serialize(const PlainModel& m);
std::vector<uint8_t> model_serialize(const EncryptedModel& m);
std::variant<PlainModel, EncryptedModel> model_deserialize(std::span<const uint8_t> bytes);

} // namespace hetrain::nn
