#pragma once

// One-time-key stream cipher: every octet is shifted by the matching octet of
// a hash-chained keystream, C_i = (M_i + H_i) mod m, with a fresh nonce per
// message.

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include "lwc/chf.hpp"

namespace lwc {

/// Hardware attestation of the device is assumed to have succeeded before any
/// key is used; it is not modeled beyond this flag.
inline constexpr bool kHardwarePreauthenticated = true;

class KeyMaterial {
 public:
  /// Throws InvalidArgument for secrets shorter than 16 octets and
  /// InvalidParams for params with m != 256.
  KeyMaterial(Bytes secret, HashParams params);

  const Bytes& secret() const noexcept { return secret_; }
  const HashParams& params() const noexcept { return params_; }

 private:
  Bytes secret_;
  HashParams params_;
};

struct CipherEnvelope {
  Nonce nonce{};
  std::string params_id;
  Bytes body;

  std::uint64_t length() const noexcept { return body.size(); }
  friend bool operator==(const CipherEnvelope&, const CipherEnvelope&) = default;
};

/// Seedable nonce source; one instance per logical execution context.
class NonceGenerator {
 public:
  explicit NonceGenerator(std::uint64_t seed) : engine_(seed) {}
  Nonce next();

 private:
  std::mt19937_64 engine_;
};

/// First n octets of K_0 || K_1 || ... where K_0 = H(secret || nonce) and
/// K_j = H(K_{j-1} || nonce || j as 8 big-endian octets), all hashed under
/// the key's params with the same nonce.
Bytes keystream(const KeyMaterial& key, const Nonce& nonce, std::size_t n);

CipherEnvelope encrypt(std::span<const std::uint8_t> msg, const KeyMaterial& key,
                       const Nonce& nonce);
CipherEnvelope encrypt(std::span<const std::uint8_t> msg, const KeyMaterial& key,
                       NonceGenerator& nonces);

/// Throws UnknownParameters if env.params_id is not registered. The secret
/// comes from key; the hash profile comes from the envelope.
Bytes decrypt(const CipherEnvelope& env, const KeyMaterial& key);

/// "LWC1" || id length (1) || id || nonce (16) || body length (8, BE) || body.
Bytes encode_envelope(const CipherEnvelope& env);
/// Throws EnvelopeFormat on malformed input.
CipherEnvelope decode_envelope(std::span<const std::uint8_t> wire);

}  // namespace lwc
