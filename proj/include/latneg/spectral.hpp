#ifndef LATNEG_SPECTRAL_HPP
#define LATNEG_SPECTRAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "latneg/errors.hpp"
#include "latneg/kahan.hpp"
#include "latneg/lattice.hpp"

namespace latneg {

/// Eigendecomposition h = O diag(gamma2) O^T with gamma2 ascending, plus
/// spectral calculus for the fractional powers used everywhere downstream.
/// Immutable after construction and safe to share across workers.
class SpectralFrame {
public:
  explicit SpectralFrame(const Eigen::MatrixXd& h) : h_(h) {
    const double scale = std::max(h.norm(), 1.0);
    require(h.rows() == h.cols(), errc::bad_input, "h must be square");
    require((h - h.transpose()).norm() <= 1e-12 * scale, errc::bad_input,
            "h must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    require(es.info() == Eigen::Success, errc::numerical_degeneracy,
            "eigendecomposition failed");
    gamma2_ = es.eigenvalues();
    O_ = es.eigenvectors();
    require(gamma2_.minCoeff() > 0.0, errc::not_positive_definite,
            "h has a non-positive eigenvalue");
    // Spectrum is a.s. simple for disordered input; deterministic input
    // (banded mode) may be degenerate and is still processed.
    for (Eigen::Index i = 0; i + 1 < gamma2_.size(); ++i)
      if (gamma2_[i + 1] - gamma2_[i] < 1e-8 * scale) near_degenerate_ = true;
    require((O_ * gamma2_.asDiagonal() * O_.transpose() - h).norm() <=
                1e-10 * scale,
            errc::numerical_degeneracy, "spectral reconstruction off");
    half_ = power(0.5);
    inv_half_ = power(-0.5);
    quarter_ = power(0.25);
    inv_quarter_ = power(-0.25);
  }

  Eigen::Index size() const { return gamma2_.size(); }
  const Eigen::MatrixXd& h() const { return h_; }
  const Eigen::MatrixXd& orthogonal() const { return O_; }
  const Eigen::VectorXd& gamma2() const { return gamma2_; }
  Eigen::VectorXd gamma() const { return gamma2_.cwiseSqrt(); }
  bool near_degenerate() const { return near_degenerate_; }

  /// h^s = O diag(gamma2^s) O^T, re-symmetrized to suppress round-off.
  Eigen::MatrixXd power(double s) const {
    Eigen::VectorXd pw(gamma2_.size());
    for (Eigen::Index i = 0; i < gamma2_.size(); ++i)
      pw[i] = std::pow(gamma2_[i], s);
    Eigen::MatrixXd x = O_ * pw.asDiagonal() * O_.transpose();
    return 0.5 * (x + x.transpose());
  }

  // cached powers for the hot paths
  const Eigen::MatrixXd& half() const { return half_; }
  const Eigen::MatrixXd& inv_half() const { return inv_half_; }
  const Eigen::MatrixXd& quarter() const { return quarter_; }
  const Eigen::MatrixXd& inv_quarter() const { return inv_quarter_; }

private:
  Eigen::MatrixXd h_, O_;
  Eigen::VectorXd gamma2_;
  Eigen::MatrixXd half_, inv_half_, quarter_, inv_quarter_;
  bool near_degenerate_ = false;
};

inline SpectralFrame eigendecompose(const Eigen::MatrixXd& h) {
  return SpectralFrame(h);
}

/// M = diag(h^{-1/2}, h^{1/2}), the sign matrix P of the subregion, and
/// the partially transposed correlation matrix Mtilde.
class CorrelationFrame {
public:
  CorrelationFrame(const SpectralFrame& frame, const Region& region)
      : frame_(frame) {
    const auto n = frame.size();
    require(region.volume() == n, errc::invalid_region,
            "region volume does not match frame");
    p_ = Eigen::VectorXd::Ones(n);
    for (auto idx : region.members()) p_[idx] = -1.0;
    M_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    M_.topLeftCorner(n, n) = frame.inv_half();
    M_.bottomRightCorner(n, n) = frame.half();
    Mtilde_ = M_;
    Mtilde_.bottomRightCorner(n, n) =
        p_.asDiagonal() * frame.half() * p_.asDiagonal();
  }

  const SpectralFrame& frame() const { return frame_; }
  const Eigen::VectorXd& p() const { return p_; }
  const Eigen::MatrixXd& M() const { return M_; }
  const Eigen::MatrixXd& Mtilde() const { return Mtilde_; }

  Eigen::MatrixXd J() const {
    const auto n = frame_.size();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    j.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return j;
  }

  /// Ground-state correlation matrix Gamma_0 = (M - iJ)/2, on demand.
  Eigen::MatrixXcd ground_correlation() const {
    return 0.5 * (M_.cast<std::complex<double>>() -
                  std::complex<double>(0, 1) * J().cast<std::complex<double>>());
  }

private:
  SpectralFrame frame_;
  Eigen::VectorXd p_;
  Eigen::MatrixXd M_, Mtilde_;
};

inline CorrelationFrame build_correlation_frame(const SpectralFrame& frame,
                                                const Region& region) {
  return CorrelationFrame(frame, region);
}

struct SymplecticSpectrum {
  Eigen::VectorXd d;     // symplectic eigenvalues of Mtilde, ascending
  Eigen::VectorXd zeta;  // (d-1)/(d+1)
  Eigen::MatrixXd Z;     // h^{1/4} P h^{-1/2} P h^{1/4}
};

/// Symplectic eigenvalues through the |Lambda|-dimensional SPD matrix Z;
/// d_k are the square roots of its eigenvalues. Half the dimension of the
/// Hermitian route, which is kept as the cross-check oracle below.
inline SymplecticSpectrum symplectic_eigenvalues(const CorrelationFrame& cf) {
  const auto& fr = cf.frame();
  const Eigen::MatrixXd pd = cf.p().asDiagonal();
  Eigen::MatrixXd z =
      fr.quarter() * pd * fr.inv_half() * pd * fr.quarter();
  z = 0.5 * (z + z.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z);
  require(es.info() == Eigen::Success &&
              es.eigenvalues().minCoeff() > 1e-12,
          errc::numerical_degeneracy, "Z is not positive definite");
  SymplecticSpectrum s;
  s.Z = z;
  s.d = es.eigenvalues().cwiseSqrt();
  s.zeta = (s.d.array() - 1.0) / (s.d.array() + 1.0);
  return s;
}

/// Positive eigenvalues of the Hermitian i Mtilde^{1/2} J Mtilde^{1/2}.
/// Test-only route; must agree with symplectic_eigenvalues to 1e-8.
inline Eigen::VectorXd symplectic_cross_check(const CorrelationFrame& cf) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cf.Mtilde());
  require(es.info() == Eigen::Success &&
              es.eigenvalues().minCoeff() > 0.0,
          errc::not_positive_definite, "Mtilde not positive definite");
  const Eigen::MatrixXd sq = es.operatorSqrt();
  const Eigen::MatrixXcd herm =
      std::complex<double>(0, 1) *
      (sq * cf.J() * sq).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hes(herm);
  const Eigen::VectorXd ev = hes.eigenvalues();
  std::vector<double> pos;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > 0.0) pos.push_back(ev[i]);
  require(pos.size() == static_cast<std::size_t>(cf.frame().size()),
          errc::cross_check_failure,
          "expected |Lambda| positive symplectic eigenvalues");
  Eigen::VectorXd out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) out[i] = pos[i];
  return out;
}

struct DecayFit {
  double C = 0.0;        // prefactor of C e^{-mu r}
  double mu = 0.0;       // decay rate
  double residual = 0.0; // RMS of log-linear fit residuals
  bool ok = false;       // false: degenerate data or non-decaying fit
  std::vector<double> mean_by_distance;  // disorder mean of |<dx,h^{-1/2}dy>|
};

/// Disorder-averaged decay of the eigencorrelator |<delta_x, h^{-1/2}
/// delta_y>| against l1 distance, fit log-linearly over distances >= 1.
/// `springs_for` supplies the realization stream (pure function of r).
inline DecayFit eigencorrelator_decay(
    const LatticeBox& box, const DisorderSpec& spec, int realizations,
    const std::function<Eigen::VectorXd(std::uint64_t)>& springs_for) {
  require(realizations >= 1, errc::bad_input, "need at least 1 realization");
  const auto n = box.size();
  int max_dist = 0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j)
      max_dist = std::max(max_dist, box.l1_distance(i, j));
  std::vector<KahanSum> sums(max_dist + 1);
  std::vector<std::int64_t> counts(max_dist + 1, 0);
  for (int r = 0; r < realizations; ++r) {
    const Eigen::VectorXd k = springs_for(static_cast<std::uint64_t>(r));
    SpectralFrame fr(build_single_particle(box, spec.lambda, k));
    const Eigen::MatrixXd c = fr.inv_half();
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j) {
        const int dist = box.l1_distance(i, j);
        sums[dist] += std::abs(c(i, j));
        counts[dist] += 1;
      }
  }
  DecayFit fit;
  fit.mean_by_distance.assign(max_dist + 1, 0.0);
  for (int dist = 1; dist <= max_dist; ++dist)
    if (counts[dist] > 0)
      fit.mean_by_distance[dist] = sums[dist].value() / counts[dist];
  // least squares on log(mean) vs distance
  std::vector<std::pair<double, double>> pts;
  for (int dist = 1; dist <= max_dist; ++dist)
    if (fit.mean_by_distance[dist] > 0.0)
      pts.emplace_back(dist, std::log(fit.mean_by_distance[dist]));
  if (pts.size() < 2) return fit;  // degenerate (e.g. lambda = 0), flagged
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  fit.mu = -slope;
  fit.C = std::exp(icept);
  KahanSum rss;
  for (auto [x, y] : pts) {
    const double e = y - (icept + slope * x);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss.value() / m);
  fit.ok = fit.mu > 0.0;
  return fit;
}

inline DecayFit eigencorrelator_decay(const LatticeBox& box,
                                      const DisorderSpec& spec,
                                      int realizations) {
  return eigencorrelator_decay(
      box, spec, realizations,
      [&](std::uint64_t r) { return sample_springs(spec, box, r); });
}

/// Count of x in Z^d with |x|_1 = r.
inline double l1_shell_count(int d, int r) {
  if (d == 1) return r == 0 ? 1.0 : 2.0;
  double total = 0.0;
  for (int j = -r; j <= r; ++j)
    total += l1_shell_count(d - 1, r - std::abs(j));
  return total;
}

/// Ctilde = C (4 d lambda + k_max)^{1/2} (sum_{x in Z^d} e^{-mu|x|})^2,
/// the computable area-law constant; lattice sum truncated once shell
/// terms drop below 1e-12.
inline double effective_area_constant(const DecayFit& fit, int d,
                                      double lambda, double k_max) {
  require(fit.mu > 0.0, errc::unavailable_constant,
          "decay fit has no positive decay rate");
  KahanSum s;
  for (int r = 0;; ++r) {
    const double term = l1_shell_count(d, r) * std::exp(-fit.mu * r);
    if (r > 0 && term < 1e-12) break;
    s += term;
    require(r < 100000, errc::unavailable_constant, "lattice sum too slow");
  }
  const double lat = s.value();
  return fit.C * std::sqrt(4.0 * d * lambda + k_max) * lat * lat;
}

}  // namespace latneg

#endif
