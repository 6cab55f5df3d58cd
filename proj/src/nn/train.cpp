#include "hetrain/nn/train.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "hetrain/common/rng.hpp"
#include "hetrain/pack/he_linalg.hpp"

namespace hetrain::nn {

void TrainConfig::validate() const {
    if (batch < 1) throw ParamError("train config: batch must be >= 1");
    if (!(lr > 0.0)) throw ParamError("train config: learning rate must be > 0");
    if (workers < 1) throw ParamError("train config: workers must be >= 1");
    if (local_epochs < 1) throw ParamError("train config: local_epochs must be >= 1");
    if (act_degree < 1) throw ParamError("train config: activation degree must be >= 1");
    if (!(act_lo < act_hi)) throw ParamError("train config: activation domain must be ordered");
    he::validate(he);
    NetworkSpec::mlp(layer_dims).validate(he.slot_size);
}

ForwardTrace forward(const he::Context& ctx, const EncryptedModel& m,
                     const he::Ciphertext& x_ct) {
    const uint32_t s = ctx.params().slot_size;
    ForwardTrace trace;
    trace.acts.push_back(x_ct);
    pack::Axis h_axis = pack::Axis::Row;
    for (const EncryptedLayer& layer : m.layers) {
        he::Ciphertext z = pack::he_matvec(ctx, layer.w_ct, layer.axis, trace.acts.back(),
                                           h_axis, s);
        pack::Axis z_axis = pack::flip(layer.axis);
        z = pack::he_bias_add(ctx, z, z_axis, layer.b_ct, z_axis);
        trace.pres.push_back(z);
        trace.acts.push_back(poly_eval_ct(ctx, z, m.act));
        h_axis = z_axis;
    }
    return trace;
}

he::Ciphertext mse_loss(const he::Context& ctx, std::span<const he::Ciphertext> preds,
                        std::span<const he::Ciphertext> labels) {
    if (preds.empty() || preds.size() != labels.size())
        throw ParamError("mse_loss: batch of " + std::to_string(preds.size()) +
                         " predictions vs " + std::to_string(labels.size()) + " labels");
    he::Ciphertext acc = ctx.square(ctx.sub(labels[0], preds[0]));
    for (size_t i = 1; i < preds.size(); ++i)
        acc = ctx.add(acc, ctx.square(ctx.sub(labels[i], preds[i])));
    return ctx.mult_plain(acc, 1.0 / static_cast<double>(preds.size()));
}

he::Ciphertext loss_grad(const he::Context& ctx, const he::Ciphertext& pred,
                         const he::Ciphertext& label, uint32_t batch_size) {
    if (batch_size == 0) throw ParamError("loss_grad: batch size must be >= 1");
    return ctx.mult_plain(ctx.sub(pred, label), 2.0 / static_cast<double>(batch_size));
}

std::vector<LayerGrads> backward(const he::Context& ctx, const EncryptedModel& m,
                                 std::span<const ForwardTrace> traces,
                                 std::span<const he::Ciphertext> lgrads) {
    if (traces.empty() || traces.size() != lgrads.size())
        throw ParamError("backward: trace/gradient batch mismatch");
    const uint32_t s = ctx.params().slot_size;
    const size_t depth = m.layers.size();
    std::vector<LayerGrads> grads(depth);

    for (size_t i = 0; i < traces.size(); ++i) {
        const ForwardTrace& t = traces[i];
        if (t.acts.size() != depth + 1 || t.pres.size() != depth)
            throw LayoutError("backward: forward trace does not match the model");

        he::Ciphertext delta =
            ctx.mult(lgrads[i], poly_eval_ct(ctx, t.pres[depth - 1], m.act.deriv));
        for (size_t k = depth; k-- > 0;) {
            he::Ciphertext dw = ctx.mult(t.acts[k], delta);
            if (i == 0) {
                grads[k].dw = std::move(dw);
                grads[k].db = delta;
            } else {
                grads[k].dw = ctx.add(grads[k].dw, dw);
                grads[k].db = ctx.add(grads[k].db, delta);
            }
            if (k == 0) break;
            he::Ciphertext back = ctx.mult(delta, m.layers[k].w_ct);
            back = m.layers[k].axis == pack::Axis::Row ? pack::sum_rows(ctx, back, s)
                                                       : pack::sum_cols(ctx, back, s);
            delta = ctx.mult(back, poly_eval_ct(ctx, t.pres[k - 1], m.act.deriv));
        }
    }
    return grads;
}

EncryptedModel sgd_update(const he::Context& ctx, const EncryptedModel& m,
                          std::span<const LayerGrads> grads, double lr) {
    if (grads.size() != m.layers.size())
        throw LayoutError("sgd_update: gradient count does not match the model");
    EncryptedModel out = m;
    for (size_t k = 0; k < m.layers.size(); ++k) {
        out.layers[k].w_ct =
            ctx.bootstrap(ctx.sub(m.layers[k].w_ct, ctx.mult_plain(grads[k].dw, lr)));
        out.layers[k].b_ct =
            ctx.bootstrap(ctx.sub(m.layers[k].b_ct, ctx.mult_plain(grads[k].db, lr)));
    }
    return out;
}

namespace {

bool train_step_fits(const NetworkSpec& spec, const ActivationPoly& act,
                     he::HeParams params) {
    he::Context ctx(params);
    std::mt19937_64 rng(0);
    he::KeyPair kp = he::keygen(params, rng);
    PlainModel zero{spec, act, {}};
    for (const LayerSpec& ls : spec.layers)
        zero.layers.push_back({std::vector<std::vector<double>>(
                                   ls.out_dim, std::vector<double>(ls.in_dim, 0.0)),
                               std::vector<double>(ls.out_dim, 0.0)});
    EncryptedModel em = encrypt_model_unchecked(ctx, zero, kp.pk);

    std::vector<double> x(spec.input_dim(), 0.0), y(spec.output_dim(), 0.0);
    he::Ciphertext x_ct = ctx.encrypt(
        kp.pk, pack::pack1d(x, pack::Axis::Row, params.slot_size, params.ct_size));
    he::Ciphertext y_ct = ctx.encrypt(
        kp.pk, pack::pack1d(y, label_axis(spec), params.slot_size, params.ct_size));
    try {
        ForwardTrace trace = forward(ctx, em, x_ct);
        he::Ciphertext lg = loss_grad(ctx, trace.output(), y_ct, 1);
        std::vector<ForwardTrace> traces{std::move(trace)};
        std::vector<he::Ciphertext> lgs{std::move(lg)};
        auto grads = backward(ctx, em, traces, lgs);
        sgd_update(ctx, em, grads, 1.0);
    } catch (const LevelExhaustedError&) {
        return false;
    }
    return true;
}

} // namespace

uint32_t audit_train_depth(const NetworkSpec& spec, const ActivationPoly& act,
                           const he::HeParams& base) {
    spec.validate(base.slot_size);
    he::HeParams probe = base;
    probe.noise_sigma = 0.0;
    uint32_t lo = 1, hi = std::max(base.level_budget, 64u);
    probe.level_budget = hi;
    if (!train_step_fits(spec, act, probe))
        throw LevelExhaustedError("depth audit: one train step needs more than " +
                                  std::to_string(hi) + " levels");
    while (lo < hi) {
        uint32_t mid = lo + (hi - lo) / 2;
        probe.level_budget = mid;
        if (train_step_fits(spec, act, probe))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

TrainResult train(const he::Context& ctx, EncryptedModel model,
                  std::span<const EncryptedSample> samples, const TrainConfig& cfg,
                  const ProbeFn& probe) {
    cfg.validate();
    if (samples.empty()) throw ParamError("train: empty dataset");

    uint32_t depth = audit_train_depth(model.spec, model.act, ctx.params());
    if (depth > ctx.params().level_budget)
        throw LevelExhaustedError("train: one training step needs " + std::to_string(depth) +
                                  " levels but the budget is " +
                                  std::to_string(ctx.params().level_budget));

    TrainResult result{std::move(model), {}};
    uint64_t iterations = 0;

    for (uint32_t round = 1; round <= cfg.rounds; ++round) {
        // Shuffle stream keyed on the global round number so federated
        // workers replay the exact schedule of an uninterrupted run.
        std::mt19937_64 shuffle_rng(seed_mix(cfg.shuffle_seed, cfg.round_offset + round));
        auto order = shuffled_indices(samples.size(), shuffle_rng);
        for (size_t start = 0; start < order.size(); start += cfg.batch) {
            const size_t stop = std::min(order.size(), start + cfg.batch);
            const uint32_t bsz = static_cast<uint32_t>(stop - start);

            std::vector<ForwardTrace> traces;
            std::vector<he::Ciphertext> lgrads;
            traces.reserve(bsz);
            lgrads.reserve(bsz);
            for (size_t i = start; i < stop; ++i) {
                const EncryptedSample& sample = samples[order[i]];
                ForwardTrace t = forward(ctx, result.model, sample.x);
                lgrads.push_back(loss_grad(ctx, t.output(), sample.y, bsz));
                traces.push_back(std::move(t));
            }
            auto grads = backward(ctx, result.model, traces, lgrads);
            result.model = sgd_update(ctx, result.model, grads, cfg.lr);
            ++iterations;
        }
        result.trace.push_back({round, iterations});
        if (probe) probe(result.trace.back(), result.model);
    }
    return result;
}

} // namespace hetrain::nn
