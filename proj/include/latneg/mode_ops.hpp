#ifndef LATNEG_MODE_OPS_HPP
#define LATNEG_MODE_OPS_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "latneg/combinatorics.hpp"
#include "latneg/errors.hpp"
#include "latneg/kahan.hpp"
#include "latneg/special.hpp"

namespace latneg {

/// Scaled-mode operator rho_a^(l): the trace-class operator whose
/// characteristic function is the l-th Fock state's, evaluated at
/// sqrt(a) z. Diagonal in the Fock basis; eigenvalues may be negative.
struct ScaledModeOperator {
  double a = 1.0;
  int ell = 0;
  double zeta = 0.0;  // (a-1)/(a+1), in (-1,1)
};

inline ScaledModeOperator make_scaled_mode(double a, int ell) {
  require(a > 0.0, errc::bad_input, "scale a must be positive");
  require(ell >= 0, errc::bad_input, "mode index must be >= 0");
  return {a, ell, (a - 1.0) / (a + 1.0)};
}

struct TruncationPolicy {
  int n_max = 40;         // per-mode Fock cutoff (indices 0..n_max kept)
  double tail_eps = 1e-9; // admissible total tail mass
};

/// sigma_{j,l}(x) = binom(l,j) (-x)^j (1+x)^{l-j}. Sums to 1 over j.
inline double sigma_weight(int j, int ell, double x) {
  require(j >= 0 && j <= ell, errc::index_out_of_range, "sigma index");
  return binom(ell, j) * std::pow(-x, j) * std::pow(1.0 + x, ell - j);
}

/// omega_{n,j,l}(x) = binom(n, l-j) x^{n-(l-j)} (1-x)^{l-j+1} for
/// n >= l-j, else 0. Geometric-weight family; sums to 1 over n.
inline double omega_weight(int n, int j, int ell, double x) {
  require(j >= 0 && j <= ell, errc::index_out_of_range, "omega index");
  const int m = ell - j;
  if (n < m) return 0.0;
  return binom_prod(n, m) * std::pow(x, n - m) * std::pow(1.0 - x, m + 1);
}

/// n-th diagonal eigenvalue of rho_a^(l), compensated over j.
inline double mode_eigenvalue(const ScaledModeOperator& op, int n) {
  require(n >= 0, errc::bad_input, "Fock index must be >= 0");
  KahanSum acc;
  for (int j = 0; j <= op.ell; ++j)
    acc += sigma_weight(j, op.ell, op.zeta) * omega_weight(n, j, op.ell, op.zeta);
  return acc.value();
}

/// Trace-norm bound g_a(l): a^l for a >= 1, (1/a)^{l+1} for a < 1.
inline double trace_norm_bound(double a, int ell) {
  require(a > 0.0, errc::bad_input, "scale a must be positive");
  return a >= 1.0 ? std::pow(a, ell) : std::pow(1.0 / a, ell + 1);
}

/// Certified bound on sum_{n > n_max} |lambda_n|. Uses that the term
/// ratio of each omega series, (n+1)/(n+1-m) |zeta|, is monotone
/// decreasing in n; once it is r < 1 the remaining mass is bounded by
/// the last kept term times r/(1-r). Returns +inf when n_max is too
/// small for the ratio argument to apply.
inline double mode_tail_bound(const ScaledModeOperator& op, int n_max) {
  require(n_max >= op.ell, errc::bad_input, "cutoff below mode index");
  const double az = std::abs(op.zeta);
  if (az == 0.0) return 0.0;  // finitely supported
  KahanSum tail;
  for (int j = 0; j <= op.ell; ++j) {
    const int m = op.ell - j;
    const double r =
        (static_cast<double>(n_max) + 1.0) / (n_max + 1.0 - m) * az;
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    const double last = binom_prod(n_max, m) * std::pow(az, n_max - m) *
                        std::pow(1.0 - op.zeta, m + 1);
    tail += std::abs(sigma_weight(j, op.ell, op.zeta)) * last * r / (1.0 - r);
  }
  return tail.value();
}

struct TruncatedNorm {
  double value = 0.0;  // sum_{n <= n_max} |lambda_n|
  double tail = 0.0;   // certified bound on the discarded mass
};

inline TruncatedNorm truncated_trace_norm(const ScaledModeOperator& op,
                                          const TruncationPolicy& policy) {
  require(policy.n_max >= op.ell, errc::bad_input,
          "policy cutoff below mode index");
  KahanSum acc;
  for (int n = 0; n <= policy.n_max; ++n)
    acc += std::abs(mode_eigenvalue(op, n));
  TruncatedNorm out{acc.value(), mode_tail_bound(op, policy.n_max)};
  if (!(out.tail <= policy.tail_eps))
    fail(errc::insufficient_truncation,
         "trace-norm tail bound " + std::to_string(out.tail) +
             " exceeds budget " + std::to_string(policy.tail_eps));
  return out;
}

/// Closed-form characteristic function L_l(a|z|^2/2) e^{-a|z|^2/4}.
inline double mode_char_function(const ScaledModeOperator& op,
                                 std::complex<double> z) {
  const double r2 = std::norm(z);
  return laguerre(op.ell, op.a * r2 / 2.0) * std::exp(-op.a * r2 / 4.0);
}

}  // namespace latneg

#endif
