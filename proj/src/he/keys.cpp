#include "hetrain/he/keys.hpp"

#include <cstdio>

namespace hetrain::he {

namespace {

// splitmix64 step, used to stretch the key token + params into the digest.
uint64_t mix(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Fingerprint fingerprint_of(const std::array<uint64_t, 2>& token, const HeParams& p) {
    uint64_t state = token[0];
    state ^= mix(state) + token[1];
    state ^= mix(state) + p.ring_dim;
    state ^= mix(state) + p.ct_size;
    state ^= mix(state) + p.slot_size;
    state ^= mix(state) + p.level_budget;
    uint64_t lo = mix(state);
    uint64_t hi = mix(state);
    Fingerprint fp;
    for (int i = 0; i < 8; ++i) {
        fp.bytes[i] = static_cast<uint8_t>(lo >> (8 * i));
        fp.bytes[8 + i] = static_cast<uint8_t>(hi >> (8 * i));
    }
    return fp;
}

} // namespace

std::string Fingerprint::hex() const {
    std::string out;
    out.reserve(32);
    for (uint8_t b : bytes) {
        char buf[3];
        std::snprintf(buf, sizeof(buf), "%02x", b);
        out += buf;
    }
    return out;
}

SecretKey sk_gen(const HeParams& params, std::mt19937_64& rng) {
    validate(params);
    SecretKey sk;
    sk.token = {rng(), rng()};
    sk.params = params;
    sk.fp = fingerprint_of(sk.token, params);
    return sk;
}

PublicKey pk_gen(const SecretKey& sk) {
    validate(sk.params);
    return PublicKey{sk.params, fingerprint_of(sk.token, sk.params)};
}

} // namespace hetrain::he
