#pragma once

// Elliptic curves y^2 = x^3 + ax + b over Q, reduced modulo primes.

#include <cstdint>
#include <map>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lwc {

using BigInt = boost::multiprecision::cpp_int;

/// Largest prime modulus accepted by the mod-p routines.
inline constexpr std::uint64_t kMaxFieldPrime = (std::uint64_t{1} << 31) - 1;

/// Exact -4a^3 - 27b^2 (the sign convention used throughout this library).
BigInt discriminant(const BigInt& a, const BigInt& b);

class Curve {
 public:
  /// Throws InvalidArgument if the discriminant vanishes.
  Curve(std::int64_t a, std::int64_t b);

  std::int64_t a() const noexcept { return a_; }
  std::int64_t b() const noexcept { return b_; }
  const BigInt& delta() const noexcept { return delta_; }

  /// True iff p divides the discriminant.
  bool is_bad_prime(std::uint64_t p) const;

  /// Right-hand side x^3 + ax + b reduced into [0, p).
  std::uint64_t rhs_mod(std::uint64_t x, std::uint64_t p) const noexcept;

  friend bool operator==(const Curve& l, const Curve& r) noexcept {
    return l.a_ == r.a_ && l.b_ == r.b_;
  }

 private:
  std::int64_t a_;
  std::int64_t b_;
  BigInt delta_;
};

struct AffinePoint {
  std::uint64_t x;
  std::uint64_t y;
  friend bool operator==(const AffinePoint&, const AffinePoint&) = default;
};

struct PointAtInfinity {
  friend bool operator==(const PointAtInfinity&, const PointAtInfinity&) = default;
};

using ProjectivePoint = std::variant<AffinePoint, PointAtInfinity>;

/// True iff pt lies on curve mod p (the point at infinity always does).
bool on_curve(const Curve& curve, const ProjectivePoint& pt, std::uint64_t p);

enum class ReductionKind { kGood, kSplitMultiplicative, kNonsplitMultiplicative, kAdditive };

std::string_view to_string(ReductionKind kind);

struct ReductionInfo {
  std::uint64_t prime;
  ReductionKind kind;
  std::int64_t a_p;
};

struct TraceTable {
  Curve curve;
  std::map<std::uint64_t, ReductionInfo> entries;
};

// ---- prime utilities ------------------------------------------------------

/// Deterministic for all 64-bit inputs.
bool is_prime(std::uint64_t n) noexcept;

/// All primes <= bound, ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t bound);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept;
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept;

/// n reduced into [0, m) for signed n.
std::uint64_t reduce_mod(std::int64_t n, std::uint64_t m) noexcept;
std::uint64_t reduce_mod(const BigInt& n, std::uint64_t m);

// ---- operations -------------------------------------------------------------

/// Legendre symbol (n/p) by Euler's criterion. Throws InvalidArgument unless
/// p is an odd prime.
int legendre_symbol(std::int64_t n, std::uint64_t p);
int legendre_symbol(const BigInt& n, std::uint64_t p);

/// chi[r] = (r/p) for r in [0, p), built by squaring every residue. p odd prime.
std::vector<std::int8_t> quadratic_character_table(std::uint64_t p);

/// #E(F_p) including the point at infinity. Requires good reduction at p;
/// throws BadReduction otherwise. p = 2 is handled by exhaustive enumeration.
std::uint64_t count_points(const Curve& curve, std::uint64_t p);

/// a_p = p + 1 - #E(F_p) for a good prime p.
std::int64_t trace_ap(const Curve& curve, std::uint64_t p);

/// Reduction type and a_p for any prime. For bad primes the singular point is
/// located by scanning for a common zero of both partial derivatives and
/// a_p = p - N_ns, where N_ns counts nonsingular points plus infinity.
ReductionInfo reduction_type(const Curve& curve, std::uint64_t p);

/// Every prime <= bound with its reduction data.
TraceTable trace_table(const Curve& curve, std::uint64_t bound);

}  // namespace lwc
