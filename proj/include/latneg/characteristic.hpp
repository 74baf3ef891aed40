#ifndef LATNEG_CHARACTERISTIC_HPP
#define LATNEG_CHARACTERISTIC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "latneg/errors.hpp"
#include "latneg/special.hpp"
#include "latneg/spectral.hpp"

namespace latneg {

/// Stacked real vector (Re f, Im f) of a complex test function on Lambda.
inline Eigen::VectorXd stack_real(const Eigen::VectorXcd& f) {
  Eigen::VectorXd t(2 * f.size());
  t.head(f.size()) = f.real();
  t.tail(f.size()) = f.imag();
  return t;
}

/// Rotated test function V f = gamma^{-1/2} O^T Re f + i gamma^{1/2} O^T Im f.
/// Satisfies ||Vf||^2 = <ftilde, M ftilde> and |(Vf)_k|^2 = the k-th
/// spectral quadratic form, which keeps every evaluation at O(|Lambda|^2).
inline Eigen::VectorXcd rotate(const SpectralFrame& frame,
                               const Eigen::VectorXcd& f) {
  require(f.size() == frame.size(), errc::bad_input,
          "test function size mismatch");
  const Eigen::VectorXd g = frame.gamma();
  const Eigen::VectorXd re =
      g.cwiseInverse().cwiseSqrt().asDiagonal() *
      (frame.orthogonal().transpose() * f.real());
  const Eigen::VectorXd im =
      g.cwiseSqrt().asDiagonal() * (frame.orthogonal().transpose() * f.imag());
  return re + std::complex<double>(0, 1) * im;
}

/// exp(-<ftilde, Gamma ftilde>/2) with the symmetric part of Gamma.
inline double gaussian_char(const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXcd& f) {
  const Eigen::VectorXd t = stack_real(f);
  require(2 * f.size() == gamma.rows() && gamma.rows() == gamma.cols(),
          errc::bad_input, "covariance size mismatch");
  const double q = 0.5 * t.dot((gamma + gamma.transpose()) * t) / 2.0;
  return std::exp(-q);
}

/// Characteristic function of the eigenstate with occupation vector alpha:
/// e^{-<ftilde,M ftilde>/4} prod_k L_{alpha_k}(|(Vf)_k|^2 / 2).
inline double eigenstate_char(const SpectralFrame& frame,
                              const std::vector<int>& alpha,
                              const Eigen::VectorXcd& f) {
  require(static_cast<Eigen::Index>(alpha.size()) == frame.size(),
          errc::bad_input, "occupation vector size mismatch");
  const Eigen::VectorXcd vf = rotate(frame, f);
  double prod = 1.0;
  double q = 0.0;
  for (Eigen::Index k = 0; k < vf.size(); ++k) {
    const double w = std::norm(vf[k]);
    q += w;
    prod *= laguerre(alpha[k], w / 2.0);
  }
  return std::exp(-q / 4.0) * prod;
}

/// Weyl expectation at the partial transpose of the N-modes ensemble:
/// (1/|J_N|) Q_N(<ftilde, Mtilde ftilde>/2) e^{-<ftilde, Mtilde ftilde>/4}.
inline double ensemble_pt_char(const CorrelationFrame& cf, int N,
                               const Eigen::VectorXcd& f) {
  require(N >= 0, errc::bad_input, "N must be >= 0");
  const Eigen::VectorXd t = stack_real(f);
  require(t.size() == cf.Mtilde().rows(), errc::bad_input,
          "test function size mismatch");
  const double q = t.dot(cf.Mtilde() * t);
  const int vol = static_cast<int>(cf.frame().size());
  const double card = u128_to_double(binom_u128(N + vol - 1, N));
  return generalized_laguerre(N, vol - 1, q / 2.0) * std::exp(-q / 4.0) / card;
}

}  // namespace latneg

#endif
