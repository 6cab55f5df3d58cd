#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetrain/he/ciphertext.hpp"
#include "hetrain/he/keys.hpp"

namespace hetrain::he {

// Ciphertext wire format, little-endian throughout:
//   "HESIMD1"  magic                      7 bytes
//   version    (currently 1)              1 byte
//   backend id (1 = exact reference)      1 byte
//   B          slot count                 u32
//   S          segment width              u32
//   level      remaining mult. budget     u32
//   key fingerprint                       16 bytes
//   slots      B x IEEE-754 binary64      8*B bytes
// Header is 37 bytes; total size 37 + 8*B.

inline constexpr size_t kCtHeaderSize = 37;
inline constexpr uint8_t kCtFormatVersion = 1;
inline constexpr uint8_t kRefBackendId = 1;

std::vector<uint8_t> ct_serialize(const Ciphertext& c);
Ciphertext ct_deserialize(std::span<const uint8_t> bytes);

// Key container ("HEKEY001" magic, kind byte 0 = secret / 1 = public,
// parameter set, fingerprint; secret keys additionally carry the token).

std::vector<uint8_t> sk_serialize(const SecretKey& sk);
std::vector<uint8_t> pk_serialize(const PublicKey& pk);
SecretKey sk_deserialize(std::span<const uint8_t> bytes);
PublicKey pk_deserialize(std::span<const uint8_t> bytes);

} // namespace hetrain::he
