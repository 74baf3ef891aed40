#ifndef LATNEG_FOCK_ORACLE_HPP
#define LATNEG_FOCK_ORACLE_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "latneg/errors.hpp"
#include "latneg/lattice.hpp"

namespace latneg {

struct OracleTolerances {
  double char_tol = 1e-6;
  double state_tol = 1e-6;
  double norm_tol = 1e-6;
};

/// Standard truncated ladder matrices: a|n> = sqrt(n)|n-1>.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ladder_matrices(int n_cut) {
  require(n_cut >= 2, errc::bad_input, "n_cut must be >= 2");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_cut, n_cut);
  for (int n = 1; n < n_cut; ++n) a(n - 1, n) = std::sqrt(double(n));
  return {a, a.transpose()};
}

/// Brute-force verification path: everything rebuilt as matrices and
/// vectors on a truncated Fock space, with no reuse of the analytic
/// modules. Sites are reordered so the subregion occupies the leading
/// tensor factors; the permutation is applied to h before its (private)
/// eigendecomposition, so mode labels still follow gamma ascending.
class FockOracle {
public:
  FockOracle(const LatticeBox& box, const Region& region,
             const Eigen::MatrixXd& h, int n_cut,
             OracleTolerances tol = {})
      : sites_(static_cast<int>(box.size())),
        region_size_(static_cast<int>(region.size())),
        n_cut_(n_cut),
        tol_(tol) {
    require(n_cut >= 2, errc::bad_input, "n_cut must be >= 2");
    dim_ = 1;
    for (int s = 0; s < sites_; ++s) {
      dim_ *= n_cut_;
      require(dim_ <= 20000, errc::bad_input,
              "truncated Fock dimension beyond the oracle guard");
    }
    order_.clear();
    order_.insert(order_.end(), region.members().begin(),
                  region.members().end());
    for (std::int64_t i = 0; i < box.size(); ++i)
      if (!region.contains(i)) order_.push_back(i);
    h_.resize(sites_, sites_);
    for (int i = 0; i < sites_; ++i)
      for (int j = 0; j < sites_; ++j) h_(i, j) = h(order_[i], order_[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_);
    require(es.info() == Eigen::Success &&
                es.eigenvalues().minCoeff() > 0.0,
            errc::not_positive_definite, "oracle needs positive definite h");
    gamma_ = es.eigenvalues().cwiseSqrt();
    O_ = es.eigenvectors();
    auto [a, ad] = ladder_matrices(n_cut_);
    a_ = a;
    ad_ = ad;
    q_ = (a_ + ad_) / std::sqrt(2.0);
    p2_ = -0.5 * (a_ - ad_) * (a_ - ad_);
  }

  std::int64_t dim() const { return dim_; }
  int n_cut() const { return n_cut_; }
  int sites() const { return sites_; }
  const Eigen::VectorXd& gamma() const { return gamma_; }

  // --- matrix-free applications on state vectors ----------------------

  template <typename Scalar>
  Eigen::Vector<Scalar, Eigen::Dynamic> apply_site(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& op,
      int site, const Eigen::Vector<Scalar, Eigen::Dynamic>& v) const {
    Eigen::Vector<Scalar, Eigen::Dynamic> out =
        Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(dim_);
    std::int64_t inner = 1;  // stride of this site's digit
    for (int s = site + 1; s < sites_; ++s) inner *= n_cut_;
    const std::int64_t block = inner * n_cut_;
    for (std::int64_t base = 0; base < dim_; base += block)
      for (std::int64_t off = 0; off < inner; ++off)
        for (int r = 0; r < n_cut_; ++r) {
          Scalar acc{};
          for (int c = 0; c < n_cut_; ++c)
            acc += op(r, c) * v[base + c * inner + off];
          out[base + r * inner + off] = acc;
        }
    return out;
  }

  Eigen::VectorXd apply_hamiltonian(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int x = 0; x < sites_; ++x) {
      Eigen::MatrixXd local = p2_ + h_(x, x) * q_ * q_;
      out += apply_site<double>(local, x, v);
    }
    for (int x = 0; x < sites_; ++x)
      for (int y = x + 1; y < sites_; ++y)
        if (h_(x, y) != 0.0)
          out += 2.0 * h_(x, y) *
                 apply_site<double>(q_, x, apply_site<double>(q_, y, v));
    return out;
  }

  Eigen::VectorXd apply_b(int k, const Eigen::VectorXd& v, bool dagger) const {
    const double cp = 0.5 * (std::sqrt(gamma_[k]) + 1.0 / std::sqrt(gamma_[k]));
    const double cm = 0.5 * (std::sqrt(gamma_[k]) - 1.0 / std::sqrt(gamma_[k]));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int x = 0; x < sites_; ++x) {
      const double w = O_(x, k);
      if (w == 0.0) continue;
      const Eigen::MatrixXd lead = dagger ? ad_ : a_;
      const Eigen::MatrixXd sub = dagger ? a_ : ad_;
      out += w * (cp * apply_site<double>(lead, x, v) +
                  cm * apply_site<double>(sub, x, v));
    }
    return out;
  }

  /// Ground state by Lanczos with full reorthogonalization; cached.
  const Eigen::VectorXd& ground_state() const {
    if (psi0_.size() == dim_) return psi0_;
    const int max_iter = std::min<std::int64_t>(dim_, 400);
    std::vector<Eigen::VectorXd> basis;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
    for (std::int64_t i = 0; i < dim_; ++i)
      v[i] = 1.0 / (1.0 + 0.25 * static_cast<double>(i % 97));
    v.normalize();
    std::vector<double> alpha, beta;
    double prev = std::numeric_limits<double>::infinity();
    Eigen::VectorXd ritz;
    for (int it = 0; it < max_iter; ++it) {
      basis.push_back(v);
      Eigen::VectorXd w = apply_hamiltonian(v);
      alpha.push_back(v.dot(w));
      for (const auto& b : basis) w -= b.dot(w) * b;
      for (const auto& b : basis) w -= b.dot(w) * b;  // second pass
      const double nb = w.norm();
      const int m = static_cast<int>(alpha.size());
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(tri);
      const double theta = tes.eigenvalues()[0];
      const bool settled = std::abs(theta - prev) <=
                           1e-14 * std::max(1.0, std::abs(theta));
      prev = theta;
      if (settled || nb < 1e-13 || it + 1 == max_iter) {
        ritz = Eigen::VectorXd::Zero(dim_);
        for (int i = 0; i < m; ++i)
          ritz += tes.eigenvectors()(i, 0) * basis[i];
        ritz.normalize();
        break;
      }
      beta.push_back(nb);
      v = w / nb;
    }
    if (ritz.sum() < 0.0) ritz = -ritz;  // fix the global sign
    psi0_ = ritz;
    ground_energy_ = psi0_.dot(apply_hamiltonian(psi0_));
    return psi0_;
  }

  double ground_energy() const {
    ground_state();
    return ground_energy_;
  }

  /// prod_k (b_k^dag)^{alpha_k} psi_0 / sqrt(alpha_k!).
  Eigen::VectorXd eigenstate(const std::vector<int>& alpha) const {
    require(static_cast<int>(alpha.size()) == sites_, errc::bad_input,
            "occupation vector size mismatch");
    Eigen::VectorXd v = ground_state();
    for (int k = 0; k < sites_; ++k) {
      double fact = 1.0;
      for (int j = 0; j < alpha[k]; ++j) {
        v = apply_b(k, v, /*dagger=*/true);
        fact *= (j + 1);
      }
      v /= std::sqrt(fact);
    }
    require(std::abs(v.norm() - 1.0) <= 1e-3, errc::truncation_leak,
            "eigenstate leaked into the truncated levels");
    return v;
  }

  // --- dense constructions (small instances only) ---------------------

  Eigen::MatrixXd kron_sites(const std::vector<Eigen::MatrixXd>& per_site) const {
    Eigen::MatrixXd out = per_site[0];
    for (int s = 1; s < sites_; ++s) {
      Eigen::MatrixXd next(out.rows() * n_cut_, out.cols() * n_cut_);
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
          next.block(i * n_cut_, j * n_cut_, n_cut_, n_cut_) =
              out(i, j) * per_site[s];
      out = std::move(next);
    }
    return out;
  }

  void check_dense_guard() const {
    require(dim_ <= 10000, errc::bad_input,
            "dense oracle matrices restricted to dimension <= 1e4");
  }

  Eigen::MatrixXd hamiltonian_matrix() const {
    check_dense_guard();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_cut_, n_cut_);
    for (int x = 0; x < sites_; ++x) {
      std::vector<Eigen::MatrixXd> f(sites_, id);
      f[x] = p2_ + h_(x, x) * q_ * q_;
      out += kron_sites(f);
    }
    for (int x = 0; x < sites_; ++x)
      for (int y = x + 1; y < sites_; ++y) {
        if (h_(x, y) == 0.0) continue;
        std::vector<Eigen::MatrixXd> f(sites_, id);
        f[x] = q_;
        f[y] = q_;
        out += 2.0 * h_(x, y) * kron_sites(f);
      }
    return out;
  }

  Eigen::MatrixXd b_matrix(int k, bool dagger) const {
    check_dense_guard();
    const double cp = 0.5 * (std::sqrt(gamma_[k]) + 1.0 / std::sqrt(gamma_[k]));
    const double cm = 0.5 * (std::sqrt(gamma_[k]) - 1.0 / std::sqrt(gamma_[k]));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_cut_, n_cut_);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int x = 0; x < sites_; ++x) {
      std::vector<Eigen::MatrixXd> f(sites_, id);
      f[x] = dagger ? (cp * ad_ + cm * a_) : (cp * a_ + cm * ad_);
      out += O_(x, k) * kron_sites(f);
    }
    return out;
  }

  /// Uniform mixture (1/|J_N|) sum over the N-modes sector.
  Eigen::MatrixXd ensemble_density(int N) const {
    check_dense_guard();
    const auto sector = compositions(sites_, N);
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim_, dim_);
    for (const auto& alpha : sector) {
      const Eigen::VectorXd psi = eigenstate(alpha);
      rho += psi * psi.transpose();
    }
    return rho / static_cast<double>(sector.size());
  }

  /// Index relabeling <i1 i2|rho^T1|j1 j2> = <j1 i2|rho|i1 j2> with the
  /// subregion occupying the leading tensor factors.
  Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& rho) const {
    std::int64_t da = 1;
    for (int s = 0; s < region_size_; ++s) da *= n_cut_;
    const std::int64_t db = dim_ / da;
    Eigen::MatrixXd out(dim_, dim_);
    for (std::int64_t i1 = 0; i1 < da; ++i1)
      for (std::int64_t i2 = 0; i2 < db; ++i2)
        for (std::int64_t j1 = 0; j1 < da; ++j1)
          for (std::int64_t j2 = 0; j2 < db; ++j2)
            out(i1 * db + i2, j1 * db + j2) = rho(j1 * db + i2, i1 * db + j2);
    return out;
  }

  double trace_norm(const Eigen::MatrixXd& m) const {
    require((m - m.transpose()).norm() <= 1e-10 * std::max(1.0, m.norm()),
            errc::bad_input, "trace norm expects a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().cwiseAbs().sum();
  }

  double log_negativity(int N) const {
    return std::log(trace_norm(partial_transpose(ensemble_density(N))));
  }

  double energy_expectation(int N) const {
    const auto sector = compositions(sites_, N);
    double sum = 0.0;
    for (const auto& alpha : sector) {
      const Eigen::VectorXd psi = eigenstate(alpha);
      sum += psi.dot(apply_hamiltonian(psi));
    }
    return sum / static_cast<double>(sector.size());
  }

  // --- Weyl operators -------------------------------------------------

  Eigen::MatrixXcd weyl_site_matrix(std::complex<double> z) const {
    const std::complex<double> i01(0.0, 1.0);
    Eigen::MatrixXcd gen =
        (i01 / std::sqrt(2.0)) *
        (std::conj(z) * a_.cast<std::complex<double>>() +
         z * ad_.cast<std::complex<double>>());
    return gen.exp();
  }

  /// Dense W(f) = tensor of per-site displacements; f in original site order.
  Eigen::MatrixXcd weyl_matrix(const Eigen::VectorXcd& f) const {
    check_dense_guard();
    require(f.size() == sites_, errc::bad_input, "f size mismatch");
    Eigen::MatrixXcd out = weyl_site_matrix(f[order_[0]]);
    for (int s = 1; s < sites_; ++s) {
      const Eigen::MatrixXcd ws = weyl_site_matrix(f[order_[s]]);
      Eigen::MatrixXcd next(out.rows() * n_cut_, out.cols() * n_cut_);
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
          next.block(i * n_cut_, j * n_cut_, n_cut_, n_cut_) = out(i, j) * ws;
      out = std::move(next);
    }
    return out;
  }

  /// <psi_alpha, W(f) psi_alpha> without materializing W; works at the
  /// larger vector-path sizes.
  std::complex<double> weyl_expectation(const Eigen::VectorXcd& f,
                                        const std::vector<int>& alpha) const {
    require(f.size() == sites_, errc::bad_input, "f size mismatch");
    const Eigen::VectorXcd psi =
        eigenstate(alpha).cast<std::complex<double>>();
    Eigen::VectorXcd w = psi;
    for (int s = 0; s < sites_; ++s)
      w = apply_site<std::complex<double>>(weyl_site_matrix(f[order_[s]]), s, w);
    return psi.dot(w);
  }

  static std::vector<std::vector<int>> compositions(int size, int N) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(size, 0);
    // local enumerator, deliberately independent of the analytic modules
    auto rec = [&](auto&& self, int pos, int rest) -> void {
      if (pos == size - 1) {
        cur[pos] = rest;
        out.push_back(cur);
        return;
      }
      for (int v = rest; v >= 0; --v) {
        cur[pos] = v;
        self(self, pos + 1, rest - v);
      }
    };
    rec(rec, 0, N);
    return out;
  }

private:
  int sites_, region_size_, n_cut_;
  OracleTolerances tol_;
  std::int64_t dim_ = 0;
  std::vector<std::int64_t> order_;  // internal position -> original site
  Eigen::MatrixXd h_, O_;
  Eigen::VectorXd gamma_;
  Eigen::MatrixXd a_, ad_, q_, p2_;
  mutable Eigen::VectorXd psi0_;
  mutable double ground_energy_ = 0.0;
};

}  // namespace latneg

#endif
