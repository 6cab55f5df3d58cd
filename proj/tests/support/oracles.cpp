#include "support/oracles.hpp"

#include <cmath>

namespace oracle {

std::vector<double> sum_cols_ref(const std::vector<double>& slots, uint32_t s) {
    std::vector<double> out(slots.size(), 0.0);
    for (size_t g = 0; g < slots.size() / s; ++g) {
        double sum = 0.0;
        for (uint32_t j = 0; j < s; ++j) sum += slots[g * s + j];
        for (uint32_t j = 0; j < s; ++j) out[g * s + j] = sum;
    }
    return out;
}

std::vector<double> sum_rows_ref(const std::vector<double>& slots, uint32_t s) {
    std::vector<double> out(slots.size(), 0.0);
    const size_t segments = slots.size() / s;
    for (uint32_t j = 0; j < s; ++j) {
        double sum = 0.0;
        for (size_t g = 0; g < segments; ++g) sum += slots[g * s + j];
        for (size_t g = 0; g < segments; ++g) out[g * s + j] = sum;
    }
    return out;
}

std::vector<double> matvec_ref(const std::vector<std::vector<double>>& w,
                               const std::vector<double>& x) {
    std::vector<double> y(w.size(), 0.0);
    for (size_t r = 0; r < w.size(); ++r)
        for (size_t c = 0; c < x.size(); ++c) y[r] += w[r][c] * x[c];
    return y;
}

double silu_ref(double x) { return x / (1.0 + std::exp(-x)); }

double silu_deriv_ref(double x) {
    double sig = 1.0 / (1.0 + std::exp(-x));
    return sig + x * sig * (1.0 - sig);
}

double poly_ref(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

double central_diff(const std::function<double(double)>& f, double x, double eps) {
    return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

} // namespace oracle
