#pragma once

#include <cstdint>
#include <vector>

#include "lwc/ec.hpp"

namespace lwc {

/// Dirichlet coefficients a_1..a_N of L(s, E). coeffs[n-1] holds a_n.
struct CoefficientVector {
  Curve curve;
  std::uint64_t bound;
  std::vector<std::int64_t> coeffs;

  std::int64_t at(std::uint64_t n) const { return coeffs.at(n - 1); }
};

struct PartialSum {
  double s;
  std::uint64_t bound;
  double value;
};

/// a_p from reduction data, extended to prime powers by the local recursion
/// and to all n by multiplicativity.
CoefficientVector dirichlet_coefficients(const Curve& curve, std::uint64_t n);

/// Same coefficients by formally multiplying the truncated Euler factors.
CoefficientVector euler_expand(const Curve& curve, std::uint64_t n);

/// Sum of a_n n^-s for n <= N in ascending order. Requires s > 1.5.
PartialSum l_series_partial(const Curve& curve, double s, std::uint64_t n);

}  // namespace lwc
