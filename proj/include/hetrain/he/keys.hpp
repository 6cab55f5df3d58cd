#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include "hetrain/he/params.hpp"

namespace hetrain::he {

/// 128-bit digest binding a key token to its parameter set. The reference
/// backend uses it purely for access control (key/ciphertext matching).
struct Fingerprint {
    std::array<uint8_t, 16> bytes{};

    bool operator==(const Fingerprint&) const = default;
    std::string hex() const;
};

struct SecretKey {
    std::array<uint64_t, 2> token{};
    HeParams params;
    Fingerprint fp;
};

struct PublicKey {
    HeParams params;
    Fingerprint fp;
};

struct KeyPair {
    SecretKey sk;
    PublicKey pk;
};

/// Fresh secret key bound to the parameter set. Throws ParamError on an
/// invalid set. The caller owns the RNG so key generation stays seedable.
SecretKey sk_gen(const HeParams& params, std::mt19937_64& rng);

/// Deterministic public key for a secret key (same fingerprint).
PublicKey pk_gen(const SecretKey& sk);

inline KeyPair keygen(const HeParams& params, std::mt19937_64& rng) {
    SecretKey sk = sk_gen(params, rng);
    return {sk, pk_gen(sk)};
}

} // namespace hetrain::he
