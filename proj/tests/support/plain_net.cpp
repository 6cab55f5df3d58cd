#include "support/plain_net.hpp"

#include <algorithm>
#include <random>

#include "hetrain/common/rng.hpp"

namespace oracle {

double PlainNet::act_eval(double x) const {
    double acc = 0.0;
    for (size_t i = act.size(); i-- > 0;) acc = acc * x + act[i];
    return acc;
}

double PlainNet::dact_eval(double x) const {
    double acc = 0.0;
    for (size_t i = dact.size(); i-- > 0;) acc = acc * x + dact[i];
    return acc;
}

std::vector<std::vector<double>> PlainNet::forward(const std::vector<double>& x) const {
    std::vector<std::vector<double>> acts{x};
    for (const Layer& layer : layers) {
        const auto& h = acts.back();
        std::vector<double> a(layer.w.size());
        for (size_t r = 0; r < layer.w.size(); ++r) {
            double z = layer.b[r];
            for (size_t c = 0; c < h.size(); ++c) z += layer.w[r][c] * h[c];
            a[r] = act_eval(z);
        }
        acts.push_back(std::move(a));
    }
    return acts;
}

std::vector<double> PlainNet::output(const std::vector<double>& x) const {
    return forward(x).back();
}

size_t PlainNet::predict(const std::vector<double>& x) const {
    auto out = output(x);
    return static_cast<size_t>(
        std::max_element(out.begin(), out.end()) - out.begin());
}

double PlainNet::batch_mse(const std::vector<std::vector<double>>& xs,
                           const std::vector<std::vector<double>>& ys) const {
    double total = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        auto out = output(xs[i]);
        for (size_t c = 0; c < out.size(); ++c) {
            double d = ys[i][c] - out[c];
            total += d * d;
        }
    }
    return total / static_cast<double>(xs.size());
}

std::vector<PlainNet::Layer> PlainNet::gradients(const std::vector<std::vector<double>>& xs,
                                                 const std::vector<std::vector<double>>& ys) const {
    std::vector<Layer> grads(layers.size());
    for (size_t k = 0; k < layers.size(); ++k) {
        grads[k].w.assign(layers[k].w.size(), std::vector<double>(layers[k].w[0].size(), 0.0));
        grads[k].b.assign(layers[k].b.size(), 0.0);
    }
    const double scale = 2.0 / static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        // Recompute pre-activations alongside the activations.
        std::vector<std::vector<double>> zs, hs{xs[i]};
        for (const Layer& layer : layers) {
            const auto& h = hs.back();
            std::vector<double> z(layer.w.size()), a(layer.w.size());
            for (size_t r = 0; r < layer.w.size(); ++r) {
                z[r] = layer.b[r];
                for (size_t c = 0; c < h.size(); ++c) z[r] += layer.w[r][c] * h[c];
                a[r] = act_eval(z[r]);
            }
            zs.push_back(std::move(z));
            hs.push_back(std::move(a));
        }
        // delta at the output: dL/dz = 2/B (a - y) * act'(z)
        std::vector<double> delta(hs.back().size());
        for (size_t c = 0; c < delta.size(); ++c)
            delta[c] = scale * (hs.back()[c] - ys[i][c]) * dact_eval(zs.back()[c]);
        for (size_t k = layers.size(); k-- > 0;) {
            for (size_t r = 0; r < layers[k].w.size(); ++r) {
                grads[k].b[r] += delta[r];
                for (size_t c = 0; c < layers[k].w[r].size(); ++c)
                    grads[k].w[r][c] += delta[r] * hs[k][c];
            }
            if (k == 0) break;
            std::vector<double> prev(layers[k].w[0].size(), 0.0);
            for (size_t c = 0; c < prev.size(); ++c) {
                for (size_t r = 0; r < layers[k].w.size(); ++r)
                    prev[c] += layers[k].w[r][c] * delta[r];
                prev[c] *= dact_eval(zs[k - 1][c]);
            }
            delta = std::move(prev);
        }
    }
    return grads;
}

void PlainNet::sgd_step(const std::vector<std::vector<double>>& xs,
                        const std::vector<std::vector<double>>& ys, double lr) {
    auto grads = gradients(xs, ys);
    for (size_t k = 0; k < layers.size(); ++k) {
        for (size_t r = 0; r < layers[k].w.size(); ++r) {
            layers[k].b[r] -= lr * grads[k].b[r];
            for (size_t c = 0; c < layers[k].w[r].size(); ++c)
                layers[k].w[r][c] -= lr * grads[k].w[r][c];
        }
    }
}

void PlainNet::train(const std::vector<std::vector<double>>& xs,
                     const std::vector<std::vector<double>>& ys, uint32_t rounds, uint32_t batch,
                     double lr, uint64_t shuffle_seed) {
    for (uint32_t t = 1; t <= rounds; ++t) {
        std::mt19937_64 rng(hetrain::seed_mix(shuffle_seed, t));
        auto order = hetrain::shuffled_indices(xs.size(), rng);
        for (size_t start = 0; start < order.size(); start += batch) {
            size_t stop = std::min(order.size(), start + batch);
            std::vector<std::vector<double>> bx, by;
            for (size_t i = start; i < stop; ++i) {
                bx.push_back(xs[order[i]]);
                by.push_back(ys[order[i]]);
            }
            sgd_step(bx, by, lr);
        }
    }
}

double PlainNet::accuracy(const std::vector<std::vector<double>>& xs,
                          const std::vector<size_t>& truth) const {
    size_t hits = 0;
    for (size_t i = 0; i < xs.size(); ++i)
        if (predict(xs[i]) == truth[i]) ++hits;
    return xs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(xs.size());
}

} // namespace oracle
