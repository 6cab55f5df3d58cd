#pragma once

#include <cstdint>
#include <vector>

#include "hetrain/he/keys.hpp"

namespace hetrain::he {

/// A SIMD ciphertext of the reference backend: B slot values, the remaining
/// multiplicative level, and the fingerprint of the key it was encrypted
/// under. Treated as an immutable value by every operation.
struct Ciphertext {
    std::vector<double> slots;
    uint32_t level = 0;
    uint32_t slot_size = 0;
    Fingerprint fp;

    uint32_t size() const { return static_cast<uint32_t>(slots.size()); }
};

} // namespace hetrain::he
