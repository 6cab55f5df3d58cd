#include "hetrain/nn/activation.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hetrain::nn {

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double ActivationPoly::eval(double x) const {
    double acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

double ActivationPoly::eval_deriv(double x) const {
    double acc = 0.0;
    for (size_t i = deriv.size(); i-- > 0;) acc = acc * x + deriv[i];
    return acc;
}

namespace {

std::vector<double> differentiate(const std::vector<double>& coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    std::vector<double> d(coeffs.size() - 1);
    for (size_t j = 0; j + 1 < coeffs.size(); ++j)
        d[j] = static_cast<double>(j + 1) * coeffs[j + 1];
    return d;
}

double max_fit_error(const ActivationPoly& p) {
    double worst = 0.0;
    const int grid = 2001;
    for (int i = 0; i < grid; ++i) {
        double x = p.lo + (p.hi - p.lo) * i / (grid - 1);
        worst = std::max(worst, std::abs(p.eval(x) - silu(x)));
    }
    return worst;
}

// acc(x) <- acc(x) * (a*x + b) + c
void mul_linear_add(std::vector<double>& acc, double a, double b, double c) {
    std::vector<double> out(acc.size() + 1, 0.0);
    for (size_t j = 0; j < acc.size(); ++j) {
        out[j + 1] += acc[j] * a;
        out[j] += acc[j] * b;
    }
    out[0] += c;
    acc = std::move(out);
}

} // namespace

ActivationPoly ActivationPoly::from_coeffs(std::vector<double> coeffs, double lo, double hi) {
    if (coeffs.empty()) throw ParamError("activation poly: empty coefficient list");
    if (!(lo < hi)) throw ParamError("activation poly: domain must satisfy lo < hi");
    ActivationPoly p;
    p.coeffs = std::move(coeffs);
    p.deriv = differentiate(p.coeffs);
    p.lo = lo;
    p.hi = hi;
    p.fit_error = max_fit_error(p);
    return p;
}

ActivationPoly cheb_fit_silu(uint32_t degree, double lo, double hi) {
    if (degree < 1) throw ParamError("cheb_fit_silu: degree must be >= 1");
    if (!(lo < hi)) throw ParamError("cheb_fit_silu: domain must satisfy lo < hi");

    const size_t n = degree + 1;
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    // Chebyshev coefficients from the interpolation nodes.
    std::vector<double> nodes(n), values(n);
    for (size_t k = 0; k < n; ++k) {
        nodes[k] = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) /
                            static_cast<double>(n));
        values[k] = silu(center + half * nodes[k]);
    }
    std::vector<double> cheb(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (size_t k = 0; k < n; ++k)
            sum += values[k] * std::cos(std::numbers::pi * static_cast<double>(j) *
                                        (static_cast<double>(k) + 0.5) / static_cast<double>(n));
        cheb[j] = 2.0 * sum / static_cast<double>(n);
    }
    cheb[0] *= 0.5;

    // T_j(u) -> monomial basis in u via the three-term recurrence.
    std::vector<double> mono(n, 0.0);
    std::vector<double> t_prev{1.0}, t_cur{0.0, 1.0};
    mono[0] += cheb[0];
    if (n > 1)
        for (size_t j = 0; j < t_cur.size(); ++j) mono[j] += cheb[1] * t_cur[j];
    for (size_t j = 2; j < n; ++j) {
        std::vector<double> t_next(j + 1, 0.0);
        for (size_t i = 0; i < t_cur.size(); ++i) t_next[i + 1] += 2.0 * t_cur[i];
        for (size_t i = 0; i < t_prev.size(); ++i) t_next[i] -= t_prev[i];
        for (size_t i = 0; i < t_next.size(); ++i) mono[i] += cheb[j] * t_next[i];
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
    }

    // Compose with u = (x - center) / half to get coefficients in x.
    std::vector<double> in_x{mono[n - 1]};
    for (size_t j = n - 1; j-- > 0;)
        mul_linear_add(in_x, 1.0 / half, -center / half, mono[j]);

    return ActivationPoly::from_coeffs(std::move(in_x), lo, hi);
}

uint32_t poly_eval_levels(uint32_t degree) {
    uint32_t bits = 0;
    uint32_t v = degree + 1;
    while ((1u << bits) < v) ++bits; // ceil(log2(degree + 1))
    return bits + 1;
}

he::Ciphertext poly_eval_ct(const he::Context& ctx, const he::Ciphertext& c,
                            std::span<const double> coeffs) {
    if (coeffs.empty()) throw ParamError("poly_eval_ct: empty coefficient list");
    const uint32_t d = static_cast<uint32_t>(coeffs.size()) - 1;
    const uint32_t need = poly_eval_levels(d);
    if (c.level < need)
        throw LevelExhaustedError("poly_eval_ct: level exhausted (have " +
                                  std::to_string(c.level) + ", need " + std::to_string(need) +
                                  " for degree " + std::to_string(d) + "); bootstrap required");
    if (d == 0) return ctx.add_plain(ctx.mult_plain(c, 0.0), coeffs[0]);

    std::vector<he::Ciphertext> powers(d + 1);
    powers[1] = c;
    for (uint32_t k = 2; k <= d; ++k) powers[k] = ctx.mult(powers[k / 2], powers[k - k / 2]);

    he::Ciphertext acc = ctx.mult_plain(powers[1], coeffs[1]);
    for (uint32_t k = 2; k <= d; ++k)
        acc = ctx.add(acc, ctx.mult_plain(powers[k], coeffs[k]));
    return ctx.add_plain(acc, coeffs[0]);
}

} // namespace hetrain::nn
