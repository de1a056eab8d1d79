#pragma once

// Slow, obviously-correct reference computations shared by unit and
// acceptance tests. None of these call into the library's number theory.

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

inline std::int64_t mod(std::int64_t v, std::int64_t p) {
  const auto r = v % p;
  return r < 0 ? r + p : r;
}

// #E(F_p) by checking every (x, y) pair, plus the point at infinity.
inline std::uint64_t brute_count(std::int64_t a, std::int64_t b, std::int64_t p) {
  std::uint64_t n = 1;
  for (std::int64_t x = 0; x < p; ++x) {
    const auto rhs = mod(mod(x * x % p * x, p) + mod(a, p) * x + mod(b, p), p);
    for (std::int64_t y = 0; y < p; ++y) {
      if (y * y % p == rhs) ++n;
    }
  }
  return n;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline bool divides_delta(std::int64_t a, std::int64_t b, std::int64_t p) {
  // -4a^3 - 27b^2 mod p, kept small.
  const auto am = mod(a, p);
  const auto bm = mod(b, p);
  return mod(-4 * (am * am % p * am % p) - 27 * (bm * bm % p), p) == 0;
}

// a_p for any prime: p + 1 - #E at good primes; at bad primes p minus the
// nonsingular points (affine solutions other than the singular one, plus O).
inline std::int64_t brute_ap(std::int64_t a, std::int64_t b, std::int64_t p) {
  if (!divides_delta(a, b, p)) return p + 1 - static_cast<std::int64_t>(brute_count(a, b, p));
  std::int64_t affine = 0;
  std::int64_t singular = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    const auto rhs = mod(mod(x * x % p * x, p) + mod(a, p) * x + mod(b, p), p);
    const auto deriv = mod(3 * x * x + a, p);
    for (std::int64_t y = 0; y < p; ++y) {
      if (y * y % p != rhs) continue;
      ++affine;
      if (mod(2 * y, p) == 0 && deriv == 0) ++singular;
    }
  }
  return p - (affine - singular + 1);
}

// a_n by trial-division factorization, one prime power at a time.
class CoefficientOracle {
 public:
  CoefficientOracle(std::int64_t a, std::int64_t b) : a_(a), b_(b) {}

  std::int64_t at(std::int64_t n) {
    std::int64_t result = 1;
    for (std::int64_t p = 2; p * p <= n; ++p) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      if (e > 0) result *= prime_power(p, e);
    }
    if (n > 1) result *= prime_power(n, 1);
    return result;
  }

 private:
  std::int64_t ap(std::int64_t p) {
    auto it = cache_.find(p);
    if (it == cache_.end()) it = cache_.emplace(p, brute_ap(a_, b_, p)).first;
    return it->second;
  }

  std::int64_t prime_power(std::int64_t p, int e) {
    const auto t = ap(p);
    if (divides_delta(a_, b_, p)) {
      std::int64_t v = 1;
      for (int i = 0; i < e; ++i) v *= t;
      return v;
    }
    std::int64_t prev = 1;
    std::int64_t cur = t;
    for (int i = 1; i < e; ++i) {
      const auto next = t * cur - p * prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }

  std::int64_t a_;
  std::int64_t b_;
  std::map<std::int64_t, std::int64_t> cache_;
};

}  // namespace oracle
