#include "lwc/ec.hpp"

#include <array>
#include <stdexcept>
#include <string>

#include "lwc/error.hpp"

namespace lwc {

namespace {

using u128 = unsigned __int128;

void require_field_prime(std::uint64_t p) {
  if (p > kMaxFieldPrime || !is_prime(p)) {
    throw InvalidArgument("modulus " + std::to_string(p) + " is not a prime <= 2^31-1");
  }
}

// Number of affine solutions of y^2 = x^3 + ax + b over F_p.
std::uint64_t affine_count(const Curve& curve, std::uint64_t p) {
  if (p == 2) {
    std::uint64_t n = 0;
    for (std::uint64_t x = 0; x < 2; ++x) {
      const auto fx = curve.rhs_mod(x, 2);
      for (std::uint64_t y = 0; y < 2; ++y) {
        if ((y * y) % 2 == fx) ++n;
      }
    }
    return n;
  }
  const auto chi = quadratic_character_table(p);
  const auto a = reduce_mod(curve.a(), p);
  const auto b = reduce_mod(curve.b(), p);
  std::int64_t sum = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    const auto fx = (x * x % p * x + a * x + b) % p;
    sum += chi[fx];
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(p) + sum);
}

}  // namespace

BigInt discriminant(const BigInt& a, const BigInt& b) {
  return BigInt(-4) * a * a * a - BigInt(27) * b * b;
}

Curve::Curve(std::int64_t a, std::int64_t b) : a_(a), b_(b), delta_(discriminant(a, b)) {
  if (delta_ == 0) {
    throw InvalidArgument("singular curve: discriminant of (" + std::to_string(a) + ", " +
                          std::to_string(b) + ") is zero");
  }
}

bool Curve::is_bad_prime(std::uint64_t p) const { return reduce_mod(delta_, p) == 0; }

std::uint64_t Curve::rhs_mod(std::uint64_t x, std::uint64_t p) const noexcept {
  const auto xr = x % p;
  const auto x3 = mul_mod(mul_mod(xr, xr, p), xr, p);
  return (x3 + mul_mod(reduce_mod(a_, p), xr, p) + reduce_mod(b_, p)) % p;
}

bool on_curve(const Curve& curve, const ProjectivePoint& pt, std::uint64_t p) {
  if (std::holds_alternative<PointAtInfinity>(pt)) return true;
  const auto& [x, y] = std::get<AffinePoint>(pt);
  if (x >= p || y >= p) return false;
  return mul_mod(y, y, p) == curve.rhs_mod(x, p);
}

std::string_view to_string(ReductionKind kind) {
  switch (kind) {
    case ReductionKind::kGood: return "good";
    case ReductionKind::kSplitMultiplicative: return "split-multiplicative";
    case ReductionKind::kNonsplitMultiplicative: return "nonsplit-multiplicative";
    case ReductionKind::kAdditive: return "additive";
  }
  return "?";
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::uint64_t reduce_mod(std::int64_t n, std::uint64_t m) noexcept {
  if (n >= 0) return static_cast<std::uint64_t>(n) % m;
  // -(n+1) avoids overflow at INT64_MIN.
  const auto r = static_cast<std::uint64_t>(-(n + 1)) % m;
  return m - 1 - r;
}

std::uint64_t reduce_mod(const BigInt& n, std::uint64_t m) {
  BigInt r = n % m;
  if (r < 0) r += m;
  return r.convert_to<std::uint64_t>();
}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto q : kBases) {
    if (n % q == 0) return n == q;
  }
  auto d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (auto base : kBases) {
    auto x = pow_mod(base, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint64_t> primes;
  if (bound < 2) return primes;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

int legendre_symbol(std::int64_t n, std::uint64_t p) {
  if (p == 2 || !is_prime(p)) {
    throw InvalidArgument("legendre_symbol: " + std::to_string(p) + " is not an odd prime");
  }
  const auto r = reduce_mod(n, p);
  if (r == 0) return 0;
  return pow_mod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

int legendre_symbol(const BigInt& n, std::uint64_t p) {
  if (p == 2 || !is_prime(p)) {
    throw InvalidArgument("legendre_symbol: " + std::to_string(p) + " is not an odd prime");
  }
  return legendre_symbol(static_cast<std::int64_t>(reduce_mod(n, p)), p);
}

std::vector<std::int8_t> quadratic_character_table(std::uint64_t p) {
  if (p == 2 || p > kMaxFieldPrime || !is_prime(p)) {
    throw InvalidArgument("quadratic_character_table: " + std::to_string(p) +
                          " is not an odd prime <= 2^31-1");
  }
  std::vector<std::int8_t> chi(p, -1);
  chi[0] = 0;
  for (std::uint64_t y = 1; y <= (p - 1) / 2; ++y) chi[y * y % p] = 1;
  return chi;
}

std::uint64_t count_points(const Curve& curve, std::uint64_t p) {
  require_field_prime(p);
  if (curve.is_bad_prime(p)) {
    throw BadReduction("prime " + std::to_string(p) +
                       " divides the discriminant; use reduction_type()");
  }
  return affine_count(curve, p) + 1;
}

std::int64_t trace_ap(const Curve& curve, std::uint64_t p) {
  return static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(count_points(curve, p));
}

ReductionInfo reduction_type(const Curve& curve, std::uint64_t p) {
  require_field_prime(p);
  if (!curve.is_bad_prime(p)) return {p, ReductionKind::kGood, trace_ap(curve, p)};

  const auto a = reduce_mod(curve.a(), p);
  bool found = false;
  for (std::uint64_t x = 0; x < p && !found; ++x) {
    if ((3 * mul_mod(x, x, p) + a) % p != 0) continue;
    const auto fx = curve.rhs_mod(x, p);
    for (std::uint64_t y = 0; y < p; ++y) {
      if ((2 * y) % p == 0 && mul_mod(y, y, p) == fx) {
        found = true;
        break;
      }
    }
  }
  if (!found) {
    throw std::logic_error("no singular point at bad prime " + std::to_string(p));
  }

  // Nonsingular affine points = all affine solutions minus the singular one;
  // adding the point at infinity back makes N_ns equal the affine count.
  const auto nonsingular = affine_count(curve, p);
  const auto a_p = static_cast<std::int64_t>(p) - static_cast<std::int64_t>(nonsingular);
  switch (a_p) {
    case 1: return {p, ReductionKind::kSplitMultiplicative, 1};
    case -1: return {p, ReductionKind::kNonsplitMultiplicative, -1};
    case 0: return {p, ReductionKind::kAdditive, 0};
    default:
      throw std::logic_error("bad-prime trace " + std::to_string(a_p) + " outside {-1,0,1} at p=" +
                             std::to_string(p));
  }
}

TraceTable trace_table(const Curve& curve, std::uint64_t bound) {
  TraceTable table{curve, {}};
  for (auto p : primes_up_to(bound)) table.entries.emplace(p, reduction_type(curve, p));
  return table;
}

}  // namespace lwc
