#include "lwc/lseries.hpp"

#include <cmath>
#include <string>

#include "lwc/error.hpp"

namespace lwc {

namespace {

void require_bound(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("coefficient bound must be >= 1");
}

// Power-series inverse of a polynomial with constant term 1, truncated to
// `terms` coefficients.
std::vector<std::int64_t> invert_series(const std::vector<std::int64_t>& poly, std::size_t terms) {
  std::vector<std::int64_t> inv(terms, 0);
  inv[0] = 1;
  for (std::size_t k = 1; k < terms; ++k) {
    std::int64_t acc = 0;
    for (std::size_t j = 1; j < poly.size() && j <= k; ++j) acc += poly[j] * inv[k - j];
    inv[k] = -acc;
  }
  return inv;
}

}  // namespace

CoefficientVector dirichlet_coefficients(const Curve& curve, std::uint64_t n) {
  require_bound(n);
  std::vector<std::int64_t> a(n + 1, 0);
  a[1] = 1;

  // Smallest prime factor sieve.
  std::vector<std::uint64_t> spf(n + 1, 0);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (spf[i] != 0) continue;
    for (std::uint64_t j = i; j <= n; j += i) {
      if (spf[j] == 0) spf[j] = i;
    }
  }

  for (std::uint64_t p = 2; p <= n; ++p) {
    if (spf[p] != p) continue;
    const auto info = reduction_type(curve, p);
    const auto ap = info.a_p;
    const auto pi = static_cast<std::int64_t>(p);
    a[p] = ap;
    std::uint64_t prev = 1;
    std::uint64_t cur = p;
    while (cur <= n / p) {
      const auto next = cur * p;
      if (info.kind == ReductionKind::kGood) {
        a[next] = ap * a[cur] - pi * a[prev];
      } else {
        a[next] = ap * a[cur];
      }
      prev = cur;
      cur = next;
    }
  }

  for (std::uint64_t m = 2; m <= n; ++m) {
    const auto p = spf[m];
    std::uint64_t pk = 1;
    std::uint64_t rest = m;
    while (rest % p == 0) {
      rest /= p;
      pk *= p;
    }
    if (rest != 1) a[m] = a[pk] * a[rest];
  }

  return {curve, n, std::vector<std::int64_t>(a.begin() + 1, a.end())};
}

CoefficientVector euler_expand(const Curve& curve, std::uint64_t n) {
  require_bound(n);
  // series[m] is the coefficient of m^-s of the running product.
  std::vector<std::int64_t> series(n + 1, 0);
  series[1] = 1;

  for (auto p : primes_up_to(n)) {
    const auto info = reduction_type(curve, p);
    const auto pi = static_cast<std::int64_t>(p);
    // Local factor as a polynomial in X = p^-s.
    std::vector<std::int64_t> local;
    if (info.kind == ReductionKind::kGood) {
      local = {1, -info.a_p, pi};
    } else {
      local = {1, -info.a_p};
    }
    std::size_t terms = 1;
    for (std::uint64_t pk = p; pk <= n; pk *= p) {
      ++terms;
      if (pk > n / p) break;
    }
    const auto euler = invert_series(local, terms);

    std::vector<std::int64_t> next(n + 1, 0);
    for (std::uint64_t m = 1; m <= n; ++m) {
      if (series[m] == 0) continue;
      std::uint64_t pk = 1;
      for (std::size_t k = 0; k < terms && m <= n / pk; ++k) {
        next[m * pk] += series[m] * euler[k];
        if (pk > n / p) break;
        pk *= p;
      }
    }
    series.swap(next);
  }

  return {curve, n, std::vector<std::int64_t>(series.begin() + 1, series.end())};
}

PartialSum l_series_partial(const Curve& curve, double s, std::uint64_t n) {
  if (!(s > 1.5)) {
    throw OutOfDomain("l_series_partial: s = " + std::to_string(s) +
                      " outside the region s > 1.5");
  }
  const auto coeffs = dirichlet_coefficients(curve, n);
  double value = 0.0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    value += static_cast<double>(coeffs.at(k)) * std::pow(static_cast<double>(k), -s);
  }
  return {s, n, value};
}

}  // namespace lwc
