#pragma once

#include <sodium.h>

#include <array>
#include <cstring>
#include <span>
#include <string_view>

#include "bifrost/errors.hpp"
#include "bifrost/rng.hpp"

// Prime-order group layer for the commutative-encryption PSI: ristretto255
// (the prime-order abstraction over the Curve25519 family). Points are kept
// as their canonical 32-byte encodings, so equality of points is equality of
// bytes and hash-map matching works directly on encodings.

namespace bifrost {

inline constexpr std::size_t kPointBytes = 32;
inline constexpr unsigned kPointBits = 256;  // sigma: wire size of one encrypted id

/// Nonzero scalar modulo the prime group order; value bytes never leave the
/// process.
struct GroupScalar {
  std::array<unsigned char, crypto_core_ristretto255_SCALARBYTES> v{};
  bool operator==(const GroupScalar&) const = default;
};

/// Point in canonical encoding.
struct GroupElement {
  std::array<unsigned char, kPointBytes> enc{};
  bool operator==(const GroupElement&) const = default;
};

/// Uniform nonzero scalar, usable as an encryption key.
inline GroupScalar keygen(RandomSource& rng) {
  sodium_ready();
  GroupScalar k;
  unsigned char wide[64];
  do {
    rng.fill(wide, sizeof wide);
    crypto_core_ristretto255_scalar_reduce(k.v.data(), wide);
  } while (sodium_is_zero(k.v.data(), k.v.size()));
  return k;
}

inline GroupScalar scalar_one() {
  GroupScalar k;
  k.v[0] = 1;
  return k;
}

/// Multiplicative inverse modulo the group order.
inline GroupScalar scalar_inverse(const GroupScalar& k) {
  sodium_ready();
  GroupScalar out;
  if (crypto_core_ristretto255_scalar_invert(out.v.data(), k.v.data()) != 0)
    throw Error("cannot invert the zero scalar");
  return out;
}

inline constexpr std::string_view kHashDomainTag = "bifrost.id-to-point.v1";

/// Deterministic uniform map from an id string onto the group,
/// domain-separated from any other use of the hash.
inline GroupElement hash_to_group(std::string_view id) {
  sodium_ready();
  crypto_hash_sha512_state st;
  crypto_hash_sha512_init(&st);
  const unsigned char taglen = static_cast<unsigned char>(kHashDomainTag.size());
  crypto_hash_sha512_update(&st, &taglen, 1);
  crypto_hash_sha512_update(&st, reinterpret_cast<const unsigned char*>(kHashDomainTag.data()),
                            kHashDomainTag.size());
  crypto_hash_sha512_update(&st, reinterpret_cast<const unsigned char*>(id.data()), id.size());
  unsigned char digest[crypto_hash_sha512_BYTES];
  crypto_hash_sha512_final(&st, digest);
  GroupElement p;
  crypto_core_ristretto255_from_hash(p.enc.data(), digest);
  return p;
}

/// Scalar multiplication k*p; the commutative-encryption primitive.
inline GroupElement scalar_mul(const GroupScalar& k, const GroupElement& p) {
  sodium_ready();
  GroupElement out;
  if (crypto_scalarmult_ristretto255(out.enc.data(), k.v.data(), p.enc.data()) != 0)
    throw EncodingError("scalar multiplication rejected its inputs");
  return out;
}

/// Validates and adopts a received 32-byte encoding. Non-canonical bytes and
/// small-order points are rejected.
inline GroupElement decode_point(std::span<const unsigned char> bytes) {
  sodium_ready();
  if (bytes.size() != kPointBytes) throw EncodingError("point encoding must be exactly 32 bytes");
  if (crypto_core_ristretto255_is_valid_point(bytes.data()) != 1)
    throw EncodingError("received bytes are not a canonical group element");
  GroupElement p;
  std::memcpy(p.enc.data(), bytes.data(), kPointBytes);
  return p;
}

inline std::span<const unsigned char, kPointBytes> encode_point(const GroupElement& p) {
  return std::span<const unsigned char, kPointBytes>{p.enc};
}

}  // namespace bifrost
