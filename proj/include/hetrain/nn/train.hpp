#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hetrain/nn/model.hpp"

namespace hetrain::nn {

/// One encrypted training sample: features packed on axis 0, one-hot label
/// packed on the axis opposite to the last layer's weights.
struct EncryptedSample {
    he::Ciphertext x;
    he::Ciphertext y;
};

struct TrainConfig {
    uint32_t rounds = 30;
    uint32_t batch = 128;
    double lr = 0.9;
    uint32_t workers = 1;
    uint32_t local_epochs = 1;
    std::vector<uint32_t> layer_dims = {21, 32, 16, 5};
    uint32_t act_degree = 15;
    double act_lo = -8.0;
    double act_hi = 8.0;
    he::HeParams he;
    uint64_t init_seed = 1;
    uint64_t shuffle_seed = 2;
    uint64_t partition_seed = 3;
    /// Global round number of the first local round minus one. Distributed
    /// training sets this so a worker's round t draws the same shuffle
    /// stream as round t of an uninterrupted run.
    uint32_t round_offset = 0;
    uint32_t round_deadline_ms = 4'600'000;

    void validate() const;
    NetworkSpec network() const { return NetworkSpec::mlp(layer_dims); }
};

/// Intermediate ciphertexts of one forward pass: acts[0] is the input,
/// acts[k] the activation of layer k, pres[k-1] its pre-activation.
struct ForwardTrace {
    std::vector<he::Ciphertext> acts;
    std::vector<he::Ciphertext> pres;

    const he::Ciphertext& output() const { return acts.back(); }
};

/// Encrypted feed-forward. The input must be packed on axis 0; each layer
/// computes act(W (x) h (+) b) and flips the packing axis.
ForwardTrace forward(const he::Context& ctx, const EncryptedModel& m,
                     const he::Ciphertext& x_ct);

/// Encrypted batch MSE: (1/B) * sum_i Square(Sub(y_i, a_i)).
he::Ciphertext mse_loss(const he::Context& ctx, std::span<const he::Ciphertext> preds,
                        std::span<const he::Ciphertext> labels);

/// Gradient of the batch MSE at one sample: (2/B) * (a - y), slot-wise.
he::Ciphertext loss_grad(const he::Context& ctx, const he::Ciphertext& pred,
                         const he::Ciphertext& label, uint32_t batch_size);

struct LayerGrads {
    he::Ciphertext dw;
    he::Ciphertext db;
};

/// Encrypted backpropagation over a batch. Per sample the output delta is
/// lgrad * act'(z_K); hidden deltas flow through Mult with the next layer's
/// weights, the axis-appropriate segment sum and the act' factor. Weight
/// gradients are packed outer products summed over the batch.
std::vector<LayerGrads> backward(const he::Context& ctx, const EncryptedModel& m,
                                 std::span<const ForwardTrace> traces,
                                 std::span<const he::Ciphertext> lgrads);

/// W <- Bootstrap(Sub(W, lr * dW)) and the same for biases; every returned
/// parameter is back at the full level budget.
EncryptedModel sgd_update(const he::Context& ctx, const EncryptedModel& m,
                          std::span<const LayerGrads> grads, double lr);

/// Levels one full train step (forward + backward + update) consumes for
/// this network, measured by dry-running the step at increasing budgets.
uint32_t audit_train_depth(const NetworkSpec& spec, const ActivationPoly& act,
                           const he::HeParams& base);

struct RoundStat {
    uint32_t round = 0;        // 1-based training round
    uint64_t iterations = 0;   // cumulative mini-batch steps so far
};

struct TrainResult {
    EncryptedModel model;
    std::vector<RoundStat> trace;
};

/// Called after each round with the current model (e.g. to probe accuracy).
using ProbeFn = std::function<void(const RoundStat&, const EncryptedModel&)>;

/// Mini-batch SGD over the encrypted samples for cfg.rounds rounds with a
/// seeded shuffle per round. Audits the step depth before the first round.
TrainResult train(const he::Context& ctx, EncryptedModel model,
                  std::span<const EncryptedSample> samples, const TrainConfig& cfg,
                  const ProbeFn& probe = {});

} // namespace hetrain::nn
