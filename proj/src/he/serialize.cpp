#include "hetrain/he/serialize.hpp"

#include "hetrain/common/bytes.hpp"

namespace hetrain::he {

namespace {
constexpr std::string_view kCtMagic = "HESIMD1";
constexpr std::string_view kKeyMagic = "HEKEY001";
constexpr uint8_t kKeyVersion = 1;

void params_write(ByteWriter& w, const HeParams& p) {
    w.u32(p.ring_dim);
    w.u32(p.ct_size);
    w.u32(p.slot_size);
    w.u32(p.level_budget);
    w.f64(p.noise_sigma);
}

HeParams params_read(ByteReader& r) {
    HeParams p;
    p.ring_dim = r.u32();
    p.ct_size = r.u32();
    p.slot_size = r.u32();
    p.level_budget = r.u32();
    p.noise_sigma = r.f64();
    return p;
}
} // namespace

std::vector<uint8_t> ct_serialize(const Ciphertext& c) {
    ByteWriter w;
    w.raw(kCtMagic);
    w.u8(kCtFormatVersion);
    w.u8(kRefBackendId);
    w.u32(c.size());
    w.u32(c.slot_size);
    w.u32(c.level);
    w.bytes(c.fp.bytes);
    for (double s : c.slots) w.f64(s);
    return w.take();
}

Ciphertext ct_deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect(kCtMagic, "ciphertext");
    uint8_t version = r.u8();
    if (version != kCtFormatVersion)
        throw FormatError("ciphertext: unsupported format version " + std::to_string(version));
    uint8_t backend = r.u8();
    if (backend != kRefBackendId)
        throw FormatError("ciphertext: unknown backend id " + std::to_string(backend));
    Ciphertext c;
    uint32_t b = r.u32();
    c.slot_size = r.u32();
    c.level = r.u32();
    auto fp = r.bytes(c.fp.bytes.size());
    std::copy(fp.begin(), fp.end(), c.fp.bytes.begin());
    c.slots.resize(b);
    for (double& s : c.slots) s = r.f64();
    if (!r.done()) throw FormatError("ciphertext: trailing bytes");
    return c;
}

std::vector<uint8_t> sk_serialize(const SecretKey& sk) {
    ByteWriter w;
    w.raw(kKeyMagic);
    w.u8(kKeyVersion);
    w.u8(0);
    params_write(w, sk.params);
    w.bytes(sk.fp.bytes);
    w.u64(sk.token[0]);
    w.u64(sk.token[1]);
    return w.take();
}

std::vector<uint8_t> pk_serialize(const PublicKey& pk) {
    ByteWriter w;
    w.raw(kKeyMagic);
    w.u8(kKeyVersion);
    w.u8(1);
    params_write(w, pk.params);
    w.bytes(pk.fp.bytes);
    return w.take();
}

namespace {
uint8_t key_header(ByteReader& r) {
    r.expect(kKeyMagic, "key file");
    uint8_t version = r.u8();
    if (version != kKeyVersion)
        throw FormatError("key file: unsupported version " + std::to_string(version));
    return r.u8();
}
} // namespace

SecretKey sk_deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    if (key_header(r) != 0) throw FormatError("key file: not a secret key");
    SecretKey sk;
    sk.params = params_read(r);
    auto fp = r.bytes(sk.fp.bytes.size());
    std::copy(fp.begin(), fp.end(), sk.fp.bytes.begin());
    sk.token[0] = r.u64();
    sk.token[1] = r.u64();
    if (!r.done()) throw FormatError("key file: trailing bytes");
    return sk;
}

PublicKey pk_deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    if (key_header(r) != 1) throw FormatError("key file: not a public key");
    PublicKey pk;
    pk.params = params_read(r);
    auto fp = r.bytes(pk.fp.bytes.size());
    std::copy(fp.begin(), fp.end(), pk.fp.bytes.begin());
    if (!r.done()) throw FormatError("key file: trailing bytes");
    return pk;
}

} // namespace hetrain::he
