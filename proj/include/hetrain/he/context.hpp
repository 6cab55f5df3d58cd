#pragma once

#include <random>
#include <span>
#include <vector>

#include "hetrain/he/ciphertext.hpp"
#include "hetrain/he/keys.hpp"
#include "hetrain/he/params.hpp"

namespace hetrain::he {

/// Evaluation context of the exact reference backend.
///
/// Slot arithmetic is performed on binary64 values with a multiplicative
/// level counter standing in for CKKS noise growth: ciphertext-ciphertext
/// and ciphertext-plaintext products consume one level, additions and
/// rotations are free, and bootstrap() restores the full budget. With
/// noise_sigma > 0 the context also injects Gaussian slot noise after each
/// operation to approximate the scheme's inexactness.
///
/// All operations return new ciphertexts. A context is cheap to copy; give
/// each thread its own instance (the noise RNG is the only mutable state).
class Context {
public:
    explicit Context(const HeParams& params, uint64_t noise_seed = 0);

    const HeParams& params() const { return params_; }

    /// Encrypts a vector of up to B values, zero-padded to the full width.
    /// The result starts at the full level budget.
    Ciphertext encrypt(const PublicKey& pk, std::span<const double> values) const;

    /// Returns all B slot values. Throws KeyMismatchError unless the secret
    /// key matches the ciphertext's fingerprint.
    std::vector<double> decrypt(const SecretKey& sk, const Ciphertext& c) const;

    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const;

    /// Slot-wise product; costs one level on min(level_a, level_b).
    Ciphertext mult(const Ciphertext& a, const Ciphertext& b) const;

    /// Slot-wise product with a plaintext vector (zero-padded) ; one level.
    Ciphertext mult_plain(const Ciphertext& c, std::span<const double> plain) const;

    /// Broadcast scalar product; one level.
    Ciphertext mult_plain(const Ciphertext& c, double scalar) const;

    /// Slot-wise plaintext addition (zero-padded); level-free.
    Ciphertext add_plain(const Ciphertext& c, std::span<const double> plain) const;

    /// Broadcast scalar addition; level-free.
    Ciphertext add_plain(const Ciphertext& c, double scalar) const;

    /// Cyclic left rotation by k slots (any k, normalized mod B); level-free.
    Ciphertext rotate(const Ciphertext& c, int64_t k) const;

    /// Resets the level to the full budget. Slot values are kept as-is, so
    /// previously accumulated noise is not removed.
    Ciphertext bootstrap(const Ciphertext& c) const;

    Ciphertext square(const Ciphertext& c) const { return mult(c, c); }

private:
    void check_own(const Ciphertext& c, const char* op) const;
    void check_pair(const Ciphertext& a, const Ciphertext& b, const char* op) const;
    void check_level(const Ciphertext& c, uint32_t needed, const char* op) const;
    void maybe_noise(Ciphertext& c) const;

    HeParams params_;
    mutable std::mt19937_64 noise_rng_;
};

} // namespace hetrain::he
