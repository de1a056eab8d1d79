#include "lwc/chf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "lwc/error.hpp"
#include "lwc/lseries.hpp"

namespace lwc {

namespace {

using i128 = __int128;

// Values within this relative distance of an integer are treated as that
// integer, so ln(e^10)^2 counts as exactly 100.
double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

std::uint64_t load_be64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Admissible b >= 0 for a given a: T <= 4a^3 + 27b^2 <= 2T.
struct BRange {
  std::uint64_t lo;
  std::uint64_t hi;
  bool empty() const { return hi < lo; }
};

BRange b_range(std::uint64_t a, std::uint64_t T) {
  const i128 cube4 = static_cast<i128>(4) * a * a * a;
  const i128 upper = static_cast<i128>(2) * T - cube4;
  if (upper < 0) return {1, 0};
  const auto hi = isqrt(static_cast<std::uint64_t>(upper / 27));
  const i128 lower = static_cast<i128>(T) - cube4;
  std::uint64_t lo = 0;
  if (lower > 0) {
    const auto need = static_cast<std::uint64_t>((lower + 26) / 27);
    lo = isqrt(need);
    if (static_cast<i128>(lo) * lo < need) ++lo;
  }
  return {lo, hi};
}

bool in_window(std::uint64_t a, std::uint64_t b, std::uint64_t T) {
  const i128 abs_delta = static_cast<i128>(4) * a * a * a + static_cast<i128>(27) * b * b;
  return abs_delta != 0 && abs_delta >= T && abs_delta <= static_cast<i128>(2) * T;
}

std::vector<HashParams> build_registry() {
  constexpr std::uint64_t kT = 1'000'000'000;
  HashParams def{"default", kT, 1.0, 2.0, select_k(static_cast<double>(kT), 1.0, 2.0), 256};
  HashParams d32{"digest32", kT, 1.0, 2.0, 31, 256};
  def.validate();
  d32.validate();
  return {def, d32};
}

const std::vector<HashParams>& registry() {
  static const std::vector<HashParams> reg = build_registry();
  return reg;
}

}  // namespace

std::uint64_t select_k(double T, double alpha, double beta) {
  if (!(T >= 3.0)) throw InvalidParams("select_k: T must be >= 3");
  if (!(alpha > 0.0) || !(alpha <= beta)) {
    throw InvalidParams("select_k: need 0 < alpha <= beta");
  }
  const double log_t = std::log(T);
  const double lower = std::ceil(snap(std::pow(log_t, alpha)));
  const double upper = std::floor(snap(std::pow(log_t, beta)));
  if (lower > upper) {
    throw InvalidParams("select_k: empty window [" + std::to_string(lower) + ", " +
                        std::to_string(upper) + "]");
  }
  const double mid = std::ceil(snap(std::pow(log_t, (alpha + beta) / 2.0)));
  return static_cast<std::uint64_t>(std::clamp(mid, lower, upper));
}

void HashParams::validate() const {
  if (T < 100) throw InvalidParams("T must be >= 100");
  if (!(alpha > 0.0) || !(alpha <= beta)) throw InvalidParams("need 0 < alpha <= beta");
  if (m < 2) throw InvalidParams("keystream modulus must be >= 2");
  const double log_t = std::log(static_cast<double>(T));
  const double lower = std::ceil(snap(std::pow(log_t, alpha)));
  const double upper = std::floor(snap(std::pow(log_t, beta)));
  const auto kd = static_cast<double>(k);
  if (kd < lower || kd > upper) {
    throw InvalidParams("k = " + std::to_string(k) + " outside [(ln T)^alpha, (ln T)^beta]");
  }
}

const HashParams& params_by_id(std::string_view id) {
  for (const auto& p : registry()) {
    if (p.id == id) return p;
  }
  throw UnknownParameters("unknown parameter set '" + std::string(id) + "'");
}

std::vector<std::string> params_ids() {
  std::vector<std::string> ids;
  for (const auto& p : registry()) ids.push_back(p.id);
  return ids;
}

std::string Digest::hex() const { return to_hex(bytes); }

Bytes pad_message(std::span<const std::uint8_t> message) {
  Bytes out(message.begin(), message.end());
  const std::uint64_t bit_len = static_cast<std::uint64_t>(message.size()) * 8;
  out.push_back(0x80);
  while ((out.size() + 8) % 16 != 0) out.push_back(0);
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(bit_len >> (8 * i)));
  return out;
}

std::array<std::uint64_t, 2> fold_accumulators(std::span<const std::uint8_t> message,
                                               const Nonce& nonce) {
  const auto n0 = load_be64(nonce.data());
  const auto n1 = load_be64(nonce.data() + 8);
  std::uint64_t acc[2] = {n0, n1};
  std::uint64_t index = 0;
  auto absorb = [&](std::uint64_t word) {
    auto& target = acc[index & 1];
    target = std::rotl(target, 7) ^ word;
    ++index;
  };

  // Full words straight from the message, then the padded tail.
  const std::size_t full = message.size() / 8;
  for (std::size_t w = 0; w < full; ++w) absorb(load_be64(message.data() + 8 * w));
  Bytes tail(message.begin() + static_cast<std::ptrdiff_t>(full * 8), message.end());
  const std::uint64_t bit_len = static_cast<std::uint64_t>(message.size()) * 8;
  tail.push_back(0x80);
  while ((full * 8 + tail.size() + 8) % 16 != 0) tail.push_back(0);
  for (int i = 7; i >= 0; --i) tail.push_back(static_cast<std::uint8_t>(bit_len >> (8 * i)));
  for (std::size_t off = 0; off < tail.size(); off += 8) absorb(load_be64(tail.data() + off));

  acc[0] = std::rotl(acc[0], 7) ^ n1;
  acc[1] = std::rotl(acc[1], 7) ^ n0;
  return {acc[0], acc[1]};
}

DerivedCurve derive_curve(std::span<const std::uint8_t> message, const Nonce& nonce,
                          std::uint64_t T) {
  if (T < 100) throw InvalidArgument("derive_curve: T must be >= 100");
  const auto [acc_a, acc_b] = fold_accumulators(message, nonce);

  // R = ceil((2T/4)^(1/3)): smallest R with 2R^3 >= T.
  auto R = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(T) / 2.0));
  while (R > 1 && static_cast<i128>(2) * (R - 1) * (R - 1) * (R - 1) >= T) --R;
  while (static_cast<i128>(2) * R * R * R < T) ++R;

  std::uint64_t a = acc_a % R;
  auto start_b = [&](std::uint64_t a_val) {
    const auto range = b_range(a_val, T);
    if (range.empty()) return acc_b % R;
    return range.lo + acc_b % (range.hi - range.lo + 1);
  };
  std::uint64_t b = start_b(a);

  std::uint64_t steps = 0;
  std::uint64_t misses = 0;
  while (!in_window(a, b, T)) {
    if (++steps > kMaxScanSteps) {
      throw DerivationFailure("derive_curve: no curve in window after " +
                              std::to_string(kMaxScanSteps) + " steps");
    }
    ++b;
    if (++misses == R) {
      a = (a + 1) % R;
      b = start_b(a);
      misses = 0;
    }
  }

  const bool negate_b = ((acc_a ^ acc_b) >> 63) != 0;
  const auto b_signed = negate_b ? -static_cast<std::int64_t>(b) : static_cast<std::int64_t>(b);
  return {Curve(static_cast<std::int64_t>(a), b_signed), nonce, steps};
}

std::uint64_t point_encode(const ProjectivePoint& pt, std::uint64_t p) {
  if (std::holds_alternative<PointAtInfinity>(pt)) return p * p;
  const auto& aff = std::get<AffinePoint>(pt);
  return aff.x * p + aff.y;
}

ProjectivePoint distinguished_point(const Curve& curve, std::uint64_t p) {
  for (std::uint64_t x = 0; x < p; ++x) {
    const auto fx = curve.rhs_mod(x, p);
    for (std::uint64_t y = 0; y < p; ++y) {
      if (mul_mod(y, y, p) == fx) return AffinePoint{x, y};
    }
  }
  return PointAtInfinity{};
}

void diffuse(std::span<std::uint8_t> bytes) {
  const std::size_t n = bytes.size();
  if (n == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t prev = bytes[(i + n - 1) % n];
      bytes[i] = static_cast<std::uint8_t>(bytes[i] + std::rotl(prev, 1) + (i & 0xff));
    }
  }
}

Digest hash(std::span<const std::uint8_t> message, const Nonce& nonce, const HashParams& params) {
  const auto derived = derive_curve(message, nonce, params.T);
  const auto len = params.digest_size();
  const auto coeffs = dirichlet_coefficients(derived.curve, len);

  Bytes d(len);
  for (std::size_t i = 0; i < len; ++i) {
    // Low octet of the two's-complement value.
    d[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(coeffs.coeffs[i]) & 0xff);
  }

  std::uint64_t q = len + 1;
  while (!is_prime(q) || derived.curve.is_bad_prime(q)) ++q;
  const auto z = point_encode(distinguished_point(derived.curve, q), q);
  for (std::size_t j = 0; j < 8; ++j) d[j % len] ^= static_cast<std::uint8_t>(z >> (8 * j));

  diffuse(d);
  return {std::move(d), params.id};
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw InvalidArgument("hex string has odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InvalidArgument(std::string("invalid hex character '") + c + "'");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace lwc
