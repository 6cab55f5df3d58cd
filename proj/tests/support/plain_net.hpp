#pragma once

// Test-side plaintext MLP with polynomial activation. Serves as the
// independent oracle for the encrypted forward pass, the finite-difference
// gradient check and the training-parity comparison. Deliberately written
// with bare loops; shares nothing with the packed implementation except the
// polynomial coefficients under test and the seeded shuffle helper.

#include <cstdint>
#include <vector>

namespace oracle {

struct PlainNet {
    struct Layer {
        std::vector<std::vector<double>> w; // out x in
        std::vector<double> b;              // out
    };

    std::vector<Layer> layers;
    std::vector<double> act;  // monomial coefficients, constant first
    std::vector<double> dact; // derivative coefficients

    double act_eval(double x) const;
    double dact_eval(double x) const;

    // Returns activations per layer, index 0 = input.
    std::vector<std::vector<double>> forward(const std::vector<double>& x) const;
    std::vector<double> output(const std::vector<double>& x) const;
    size_t predict(const std::vector<double>& x) const;

    // Mean over the batch of the summed squared output error.
    double batch_mse(const std::vector<std::vector<double>>& xs,
                     const std::vector<std::vector<double>>& ys) const;

    // Analytic MSE gradients for one batch, laid out like the layers.
    std::vector<Layer> gradients(const std::vector<std::vector<double>>& xs,
                                 const std::vector<std::vector<double>>& ys) const;

    void sgd_step(const std::vector<std::vector<double>>& xs,
                  const std::vector<std::vector<double>>& ys, double lr);

    // Mini-batch SGD with the same seeded shuffle schedule as the library.
    void train(const std::vector<std::vector<double>>& xs,
               const std::vector<std::vector<double>>& ys, uint32_t rounds, uint32_t batch,
               double lr, uint64_t shuffle_seed);

    double accuracy(const std::vector<std::vector<double>>& xs,
                    const std::vector<size_t>& truth) const;
};

} // namespace oracle
