#pragma once

#include <cmath>
#include <cstdint>

#include "hetrain/common/error.hpp"

namespace hetrain::he {

/// Parameter set of the SIMD ciphertext backend.
///
/// ring_dim is the (power-of-two) ring dimension R, ct_size the number of
/// slots B = R/2, slot_size the segment width S = floor(sqrt(B)). The level
/// budget is the multiplicative depth available before a bootstrap, and
/// noise_sigma the per-op additive slot noise of the reference backend
/// (0 keeps it exact).
struct HeParams {
    uint32_t ring_dim = 2048;
    uint32_t ct_size = 1024;
    uint32_t slot_size = 32;
    uint32_t level_budget = 30;
    double noise_sigma = 0.0;
};

inline bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline void validate(const HeParams& p) {
    if (!is_pow2(p.ring_dim))
        throw ParamError("he params: ring_dim must be a power of two");
    if (p.ct_size != p.ring_dim / 2)
        throw ParamError("he params: ct_size must equal ring_dim/2");
    uint32_t s = static_cast<uint32_t>(std::floor(std::sqrt(static_cast<double>(p.ct_size))));
    if (p.slot_size != s)
        throw ParamError("he params: slot_size must equal floor(sqrt(ct_size))");
    if (p.slot_size == 0 || p.ct_size % p.slot_size != 0)
        throw ParamError("he params: slot_size must divide ct_size");
    if (p.level_budget < 1)
        throw ParamError("he params: level_budget must be >= 1");
    if (p.noise_sigma < 0.0)
        throw ParamError("he params: noise_sigma must be >= 0");
}

inline bool same_shape(const HeParams& a, const HeParams& b) {
    return a.ring_dim == b.ring_dim && a.ct_size == b.ct_size && a.slot_size == b.slot_size;
}

} // namespace hetrain::he
