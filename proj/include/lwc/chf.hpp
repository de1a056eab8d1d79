#pragma once

// Curve-derived hash: message -> elliptic curve with |disc| in [T, 2T] ->
// leading Dirichlet coefficients of its L-series -> fixed-length digest.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lwc/ec.hpp"

namespace lwc {

using Bytes = std::vector<std::uint8_t>;
using Nonce = std::array<std::uint8_t, 16>;

struct HashParams {
  std::string id;
  std::uint64_t T;
  double alpha;
  double beta;
  std::uint64_t k;  ///< digest length is k + 1 octets
  std::uint32_t m;  ///< keystream modulus

  std::size_t digest_size() const noexcept { return static_cast<std::size_t>(k) + 1; }

  /// Throws InvalidParams if k or the other fields violate the window rules.
  void validate() const;
};

/// Midpoint rule ceil((ln T)^((alpha+beta)/2)) clamped into
/// [ceil((ln T)^alpha), floor((ln T)^beta)]. T is real so callers can pass e^x.
std::uint64_t select_k(double T, double alpha, double beta);

/// Registered profiles: "default" (T = 1e9, alpha = 1, beta = 2, k from
/// select_k) and "digest32" (same window, k = 31).
const HashParams& params_by_id(std::string_view id);
std::vector<std::string> params_ids();

struct Digest {
  Bytes bytes;
  std::string params_id;

  std::string hex() const;
  friend bool operator==(const Digest&, const Digest&) = default;
};

struct DerivedCurve {
  Curve curve;
  Nonce nonce;
  std::uint64_t scan_steps;
};

inline constexpr std::uint64_t kMaxScanSteps = 1'000'000;

/// Deterministic message -> curve map with T <= |disc| <= 2T. Requires T >= 100.
DerivedCurve derive_curve(std::span<const std::uint8_t> message, const Nonce& nonce,
                          std::uint64_t T);

/// Affine (x, y) -> x*p + y; infinity -> p^2.
std::uint64_t point_encode(const ProjectivePoint& pt, std::uint64_t p);

/// Smallest-x affine point on curve mod p (smallest y for that x), or
/// infinity if the reduction has no affine points.
ProjectivePoint distinguished_point(const Curve& curve, std::uint64_t p);

Digest hash(std::span<const std::uint8_t> message, const Nonce& nonce, const HashParams& params);

// Padding and accumulator fold, exposed for tests.
Bytes pad_message(std::span<const std::uint8_t> message);
std::array<std::uint64_t, 2> fold_accumulators(std::span<const std::uint8_t> message,
                                               const Nonce& nonce);

/// Two cyclic passes d_i <- d_i + rotl(d_{i-1}, 1) + i (mod 256), in place.
void diffuse(std::span<std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws InvalidArgument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

}  // namespace lwc
