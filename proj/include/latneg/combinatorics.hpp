#ifndef LATNEG_COMBINATORICS_HPP
#define LATNEG_COMBINATORICS_HPP

#include <cstdint>
#include <limits>
#include <string>

#include "latneg/errors.hpp"

namespace latneg {

using uint128 = unsigned __int128;

/// Binomial coefficient in 128-bit integer arithmetic with explicit
/// overflow detection. Intermediate products stay exact because the
/// multiplicative recurrence divides out i at each step.
inline uint128 binom_u128(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  uint128 r = 1;
  constexpr uint128 max = ~uint128{0};
  for (std::int64_t i = 1; i <= k; ++i) {
    const uint128 m = static_cast<uint128>(n - k + i);
    if (r > max / m)
      fail(errc::overflow, "binomial(" + std::to_string(n) + "," +
                               std::to_string(k) + ") exceeds 128 bits");
    r = r * m / static_cast<uint128>(i);
  }
  return r;
}

inline double u128_to_double(uint128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return static_cast<double>(hi) * 18446744073709551616.0 +
         static_cast<double>(lo);
}

inline double binom(std::int64_t n, std::int64_t k) {
  return u128_to_double(binom_u128(n, k));
}

inline std::uint64_t binom_u64(std::int64_t n, std::int64_t k) {
  const uint128 v = binom_u128(n, k);
  if (v > std::numeric_limits<std::uint64_t>::max())
    fail(errc::overflow, "binomial(" + std::to_string(n) + "," +
                             std::to_string(k) + ") exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

// Direct product form, for n too large for exact integers but k small.
inline double binom_prod(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (std::int64_t i = 1; i <= k; ++i)
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace latneg

#endif
