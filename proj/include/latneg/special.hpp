#ifndef LATNEG_SPECIAL_HPP
#define LATNEG_SPECIAL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "latneg/combinatorics.hpp"
#include "latneg/errors.hpp"
#include "latneg/kahan.hpp"

namespace latneg {

/// Laguerre polynomial L_k(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
inline double laguerre(int k, double x) {
  require(k >= 0, errc::bad_input, "laguerre degree must be >= 0");
  if (k == 0) return 1.0;
  double lm = 1.0;       // L_0
  double l = 1.0 - x;    // L_1
  for (int n = 1; n < k; ++n) {
    const double ln = ((2.0 * n + 1.0 - x) * l - n * lm) / (n + 1.0);
    lm = l;
    l = ln;
  }
  return l;
}

/// Generalized Laguerre polynomial L_N^{(m)}(x), integer m >= 0.
inline double generalized_laguerre(int N, int m, double x) {
  require(N >= 0 && m >= 0, errc::bad_input,
          "generalized_laguerre needs N, m >= 0");
  if (N == 0) return 1.0;
  double lm = 1.0;
  double l = 1.0 + m - x;
  for (int n = 1; n < N; ++n) {
    const double ln = ((2.0 * n + 1.0 + m - x) * l - (n + m) * lm) / (n + 1.0);
    lm = l;
    l = ln;
  }
  return l;
}

/// |J_N| for `size` modes: the multiset count binom(N+size-1, N).
inline std::uint64_t sector_size(int size, int N) {
  require(size >= 1 && N >= 0, errc::bad_input, "bad sector parameters");
  return binom_u64(N + size - 1, N);
}

/// Closed form for sum_{alpha in J_N} alpha_1 = binom(N+size-1, size).
inline std::uint64_t sector_first_coordinate_sum(int size, int N) {
  require(size >= 1 && N >= 0, errc::bad_input, "bad sector parameters");
  if (N == 0) return 0;
  return binom_u64(N + size - 1, size);
}

/// Enumerates every composition of N into `size` non-negative parts exactly
/// once. Order: starts at (N,0,...,0) and moves weight rightward with the
/// last coordinate acting as the fast odometer digit; deterministic, and
/// documented because downstream caching keys on it. Copyable, so a sweep
/// can be partitioned by saving iterator state.
class SectorIterator {
public:
  SectorIterator(int size, int N) : alpha_(size, 0), valid_(true) {
    require(size >= 1 && N >= 0, errc::bad_input, "bad sector parameters");
    alpha_[0] = N;
    n_ = N;
  }

  bool valid() const { return valid_; }
  const std::vector<int>& value() const { return alpha_; }

  void advance() {
    const int size = static_cast<int>(alpha_.size());
    if (size == 1 || alpha_[size - 1] == n_) {
      valid_ = false;
      return;
    }
    int i = size - 2;
    while (alpha_[i] == 0) --i;
    const int carry = alpha_[size - 1];
    alpha_[size - 1] = 0;
    alpha_[i] -= 1;
    alpha_[i + 1] = carry + 1;
  }

private:
  std::vector<int> alpha_;
  int n_ = 0;
  bool valid_ = true;
};

inline std::vector<std::vector<int>> enumerate_sector(int size, int N) {
  std::vector<std::vector<int>> out;
  out.reserve(sector_size(size, N));
  for (SectorIterator it(size, N); it.valid(); it.advance())
    out.push_back(it.value());
  return out;
}

/// Left-hand side of the multi-variable Laguerre identity,
/// sum over J_N of prod_k L_{alpha_k}(x_k), by explicit enumeration.
/// Equals generalized_laguerre(N, |xs|-1, sum x) — test oracle path.
inline double laguerre_product_sum(const std::vector<double>& xs, int N) {
  require(!xs.empty(), errc::bad_input, "laguerre_product_sum needs inputs");
  const int size = static_cast<int>(xs.size());
  KahanSum acc;
  for (SectorIterator it(size, N); it.valid(); it.advance()) {
    double prod = 1.0;
    for (int k = 0; k < size; ++k) prod *= laguerre(it.value()[k], xs[k]);
    acc += prod;
  }
  return acc.value();
}

/// Partial sum of sum_{n>=k} binom(n,k) zeta^{n-k} L_n(x); converges to the
/// Erdelyi multiplication closed form for |zeta| < 1.
inline double erdelyi_lhs(int k, double zeta, double x, int terms) {
  require(std::abs(zeta) < 1.0, errc::divergence,
          "Erdelyi series diverges for |zeta| >= 1");
  require(k >= 0 && terms >= 1, errc::bad_input, "bad series parameters");
  KahanSum acc;
  double zpow = 1.0;  // zeta^(n-k)
  for (int n = k; n < k + terms; ++n) {
    acc += binom_prod(n, k) * zpow * laguerre(n, x);
    zpow *= zeta;
  }
  return acc.value();
}

inline double erdelyi_closed_form(int k, double zeta, double x) {
  require(std::abs(zeta) < 1.0, errc::divergence,
          "Erdelyi closed form needs |zeta| < 1");
  const double om = 1.0 - zeta;
  return std::exp(-zeta * x / om) / std::pow(om, k + 1) * laguerre(k, x / om);
}

}  // namespace latneg

#endif
