#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetrain/he/context.hpp"

namespace hetrain::nn {

double silu(double x);

/// Polynomial activation in monomial basis (constant term first), produced
/// by a Chebyshev fit of SiLU over [lo, hi]. Carries the analytically
/// differentiated coefficients and the measured max fit error on the domain.
struct ActivationPoly {
    std::vector<double> coeffs;
    std::vector<double> deriv;
    double lo = -8.0;
    double hi = 8.0;
    double fit_error = 0.0;

    uint32_t degree() const { return static_cast<uint32_t>(coeffs.size()) - 1; }
    double eval(double x) const;
    double eval_deriv(double x) const;

    /// Builds the poly from raw coefficients (derivative + fit error derived).
    static ActivationPoly from_coeffs(std::vector<double> coeffs, double lo, double hi);
};

/// Chebyshev interpolation of SiLU on [lo, hi] with the given degree,
/// converted to monomial form.
ActivationPoly cheb_fit_silu(uint32_t degree, double lo, double hi);

/// Levels a slot-wise evaluation of a degree-d polynomial needs on its input.
uint32_t poly_eval_levels(uint32_t degree);

/// Slot-wise polynomial evaluation via a balanced power tree: x^k is built
/// from x^(k/2) * x^(k - k/2), so the whole evaluation consumes
/// ceil(log2(d)) + 1 levels regardless of the slot values.
he::Ciphertext poly_eval_ct(const he::Context& ctx, const he::Ciphertext& c,
                            std::span<const double> coeffs);

inline he::Ciphertext poly_eval_ct(const he::Context& ctx, const he::Ciphertext& c,
                                   const ActivationPoly& p) {
    return poly_eval_ct(ctx, c, p.coeffs);
}

} // namespace hetrain::nn
