#include "hetrain/he/context.hpp"

#include <string>

#include "hetrain/common/rng.hpp"

namespace hetrain::he {

Context::Context(const HeParams& params, uint64_t noise_seed)
    : params_(params), noise_rng_(noise_seed) {
    validate(params_);
}

void Context::check_own(const Ciphertext& c, const char* op) const {
    if (c.size() != params_.ct_size)
        throw IncompatibleError(std::string(op) + ": ciphertext width " +
                                std::to_string(c.size()) + " does not match context B=" +
                                std::to_string(params_.ct_size));
}

void Context::check_pair(const Ciphertext& a, const Ciphertext& b, const char* op) const {
    check_own(a, op);
    check_own(b, op);
    if (!(a.fp == b.fp))
        throw IncompatibleError(std::string(op) + ": operands encrypted under different keys");
    if (a.slot_size != b.slot_size)
        throw IncompatibleError(std::string(op) + ": operands have different segment widths");
}

void Context::check_level(const Ciphertext& c, uint32_t needed, const char* op) const {
    if (c.level < needed)
        throw LevelExhaustedError(std::string(op) + ": level exhausted (have " +
                                  std::to_string(c.level) + ", need " + std::to_string(needed) +
                                  "); bootstrap required");
}

void Context::maybe_noise(Ciphertext& c) const {
    if (params_.noise_sigma <= 0.0) return;
    for (double& s : c.slots) s += gaussian(noise_rng_, 0.0, params_.noise_sigma);
}

Ciphertext Context::encrypt(const PublicKey& pk, std::span<const double> values) const {
    validate(pk.params);
    if (!same_shape(pk.params, params_))
        throw IncompatibleError("encrypt: public key belongs to a different parameter set");
    if (values.size() > params_.ct_size)
        throw CapacityError("encrypt: input of " + std::to_string(values.size()) +
                            " values exceeds ciphertext size " + std::to_string(params_.ct_size));
    Ciphertext c;
    c.slots.assign(params_.ct_size, 0.0);
    std::copy(values.begin(), values.end(), c.slots.begin());
    c.level = params_.level_budget;
    c.slot_size = params_.slot_size;
    c.fp = pk.fp;
    maybe_noise(c);
    return c;
}

std::vector<double> Context::decrypt(const SecretKey& sk, const Ciphertext& c) const {
    check_own(c, "decrypt");
    PublicKey pk = pk_gen(sk);
    if (!(pk.fp == c.fp))
        throw KeyMismatchError("decrypt: secret key does not match ciphertext fingerprint");
    return c.slots;
}

Ciphertext Context::add(const Ciphertext& a, const Ciphertext& b) const {
    check_pair(a, b, "he_add");
    Ciphertext out = a;
    for (size_t i = 0; i < out.slots.size(); ++i) out.slots[i] += b.slots[i];
    out.level = std::min(a.level, b.level);
    maybe_noise(out);
    return out;
}

Ciphertext Context::sub(const Ciphertext& a, const Ciphertext& b) const {
    check_pair(a, b, "he_sub");
    Ciphertext out = a;
    for (size_t i = 0; i < out.slots.size(); ++i) out.slots[i] -= b.slots[i];
    out.level = std::min(a.level, b.level);
    maybe_noise(out);
    return out;
}

Ciphertext Context::mult(const Ciphertext& a, const Ciphertext& b) const {
    check_pair(a, b, "he_mult");
    check_level(a, 1, "he_mult");
    check_level(b, 1, "he_mult");
    Ciphertext out = a;
    for (size_t i = 0; i < out.slots.size(); ++i) out.slots[i] *= b.slots[i];
    out.level = std::min(a.level, b.level) - 1;
    maybe_noise(out);
    return out;
}

Ciphertext Context::mult_plain(const Ciphertext& c, std::span<const double> plain) const {
    check_own(c, "he_mult_plain");
    check_level(c, 1, "he_mult_plain");
    if (plain.size() > params_.ct_size)
        throw CapacityError("he_mult_plain: plaintext longer than ciphertext");
    Ciphertext out = c;
    for (size_t i = 0; i < out.slots.size(); ++i)
        out.slots[i] *= (i < plain.size() ? plain[i] : 0.0);
    out.level = c.level - 1;
    maybe_noise(out);
    return out;
}

Ciphertext Context::mult_plain(const Ciphertext& c, double scalar) const {
    check_own(c, "he_mult_plain");
    check_level(c, 1, "he_mult_plain");
    Ciphertext out = c;
    for (double& s : out.slots) s *= scalar;
    out.level = c.level - 1;
    maybe_noise(out);
    return out;
}

Ciphertext Context::add_plain(const Ciphertext& c, std::span<const double> plain) const {
    check_own(c, "he_add_plain");
    if (plain.size() > params_.ct_size)
        throw CapacityError("he_add_plain: plaintext longer than ciphertext");
    Ciphertext out = c;
    for (size_t i = 0; i < plain.size(); ++i) out.slots[i] += plain[i];
    maybe_noise(out);
    return out;
}

Ciphertext Context::add_plain(const Ciphertext& c, double scalar) const {
    check_own(c, "he_add_plain");
    Ciphertext out = c;
    for (double& s : out.slots) s += scalar;
    maybe_noise(out);
    return out;
}

Ciphertext Context::rotate(const Ciphertext& c, int64_t k) const {
    check_own(c, "rotate");
    const int64_t b = static_cast<int64_t>(params_.ct_size);
    const size_t shift = static_cast<size_t>(((k % b) + b) % b);
    Ciphertext out = c;
    if (shift != 0) {
        for (size_t i = 0; i < c.slots.size(); ++i)
            out.slots[i] = c.slots[(i + shift) % c.slots.size()];
    }
    maybe_noise(out);
    return out;
}

Ciphertext Context::bootstrap(const Ciphertext& c) const {
    check_own(c, "bootstrap");
    Ciphertext out = c;
    out.level = params_.level_budget;
    return out;
}

} // namespace hetrain::he
