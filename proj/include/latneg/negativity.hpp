#ifndef LATNEG_NEGATIVITY_HPP
#define LATNEG_NEGATIVITY_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "latneg/errors.hpp"
#include "latneg/kahan.hpp"
#include "latneg/mode_ops.hpp"
#include "latneg/special.hpp"
#include "latneg/spectral.hpp"

namespace latneg {

/// Either the pure N-modes ensemble (weights absent) or the weighted
/// average sum_L omega_L rho_L with L = 0..N.
struct EnsembleSpec {
  int N = 0;
  std::optional<std::vector<double>> weights;

  void validate() const {
    require(N >= 0, errc::bad_input, "N must be >= 0");
    if (weights) {
      require(static_cast<int>(weights->size()) == N + 1, errc::bad_input,
              "weights must have N+1 entries");
      KahanSum s;
      for (double w : *weights) {
        require(w >= 0.0, errc::bad_input, "weights must be non-negative");
        s += w;
      }
      require(std::abs(s.value() - 1.0) <= 1e-12, errc::bad_input,
              "weights must sum to 1");
    }
  }
};

struct NegativityReport {
  double log_negativity = 0.0;  // natural log
  double trace_norm = 0.0;
  double tail_bound = 0.0;
  double trace_check = 0.0;  // sum of eigenvalues, should be 1
  double product_bound = std::numeric_limits<double>::quiet_NaN();
  double h_bound = std::numeric_limits<double>::quiet_NaN();
  int n_max = 0;
  int N = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

inline unsigned worker_count() {
  if (const char* env = std::getenv("NEG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

/// Per-mode eigenvalue tables T_k[m][n] of rho_{d_k}^{(m)}, m <= N,
/// n <= n_max, plus the certified worst-case tail and absolute mass per
/// mode. Built once; the enumeration loop is then multiplication-only.
class ModeTables {
public:
  ModeTables(const SymplecticSpectrum& symp, int n_top, int n_max)
      : n_max_(n_max) {
    require(n_max >= n_top, errc::bad_input, "n_max must cover mode index");
    const int vol = static_cast<int>(symp.d.size());
    t_.resize(vol);
    tail_.assign(vol, 0.0);
    mass_.assign(vol, 0.0);
    for (int k = 0; k < vol; ++k) {
      t_[k].assign(n_top + 1, std::vector<double>(n_max + 1, 0.0));
      for (int m = 0; m <= n_top; ++m) {
        const auto op = make_scaled_mode(symp.d[k], m);
        KahanSum abs_mass;
        for (int n = 0; n <= n_max; ++n) {
          t_[k][m][n] = mode_eigenvalue(op, n);
          abs_mass += std::abs(t_[k][m][n]);
        }
        const double tail = mode_tail_bound(op, n_max);
        tail_[k] = std::max(tail_[k], tail);
        mass_[k] = std::max(mass_[k], abs_mass.value() + tail);
      }
    }
  }

  double value(int k, int m, int n) const { return t_[k][m][n]; }
  double tail(int k) const { return tail_[k]; }
  double mass(int k) const { return mass_[k]; }
  int n_max() const { return n_max_; }
  int modes() const { return static_cast<int>(t_.size()); }

private:
  int n_max_;
  std::vector<std::vector<std::vector<double>>> t_;
  std::vector<double> tail_, mass_;
};

/// Diagonalized partial transpose of rho_N (or rho_{omega,N}): the
/// eigenvalue at Fock index vector nvec is a weighted sum over occupation
/// vectors of products of per-mode table entries.
class PartialTransposeSpectrum {
public:
  PartialTransposeSpectrum(const SymplecticSpectrum& symp,
                           const EnsembleSpec& spec,
                           const TruncationPolicy& policy)
      : symp_(symp),
        spec_(spec),
        policy_(policy),
        tables_(symp, spec.N, policy.n_max) {
    spec.validate();
    const int vol = static_cast<int>(symp.d.size());
    if (spec.weights) {
      for (int L = 0; L <= spec.N; ++L) {
        const double w = (*spec.weights)[L];
        if (w == 0.0) continue;
        const double coef = w / u128_to_double(binom_u128(L + vol - 1, L));
        for (SectorIterator it(vol, L); it.valid(); it.advance())
          terms_.emplace_back(coef, it.value());
      }
    } else {
      const double coef =
          1.0 / u128_to_double(binom_u128(spec.N + vol - 1, spec.N));
      for (SectorIterator it(vol, spec.N); it.valid(); it.advance())
        terms_.emplace_back(coef, it.value());
    }
  }

  int modes() const { return tables_.modes(); }
  const ModeTables& tables() const { return tables_; }
  const SymplecticSpectrum& spectrum() const { return symp_; }

  double eigenvalue(std::span<const int> nvec) const {
    require(static_cast<int>(nvec.size()) == modes(), errc::bad_input,
            "index vector size mismatch");
    KahanSum acc;
    for (const auto& [coef, alpha] : terms_) {
      double prod = coef;
      for (int k = 0; k < modes(); ++k)
        prod *= tables_.value(k, alpha[k], nvec[k]);
      acc += prod;
    }
    return acc.value();
  }

  /// Rigorous bound on the absolute mass at indices with some n_k > n_max:
  /// sum_k tail_k * prod_{j != k} mass_j, using per-mode certified tails.
  double global_tail_bound() const {
    KahanSum total;
    for (int k = 0; k < modes(); ++k) {
      double prod = tables_.tail(k);
      for (int j = 0; j < modes(); ++j)
        if (j != k) prod *= tables_.mass(j);
      total += prod;
    }
    return total.value();
  }

  struct Enumeration {
    double abs_sum = 0.0;
    double sum = 0.0;
    double min_value = 0.0;
    std::vector<int> argmin;
  };

  /// Full sweep over nvec in {0..n_max}^modes. Partitioned on the first
  /// coordinate; each block is summed sequentially with compensation and
  /// blocks are merged in order, so the result is independent of the
  /// worker count.
  Enumeration enumerate(double budget = 1e8) const {
    const int vol = modes();
    const int width = policy_.n_max + 1;
    if (std::pow(static_cast<double>(width), vol) > budget)
      fail(errc::enumeration_too_large,
           "enumeration over " + std::to_string(width) + "^" +
               std::to_string(vol) +
               " indices exceeds the budget; use bounds-only mode");
    struct Block {
      KahanSum abs, sum;
      double min_value = std::numeric_limits<double>::infinity();
      std::vector<int> argmin;
    };
    std::vector<Block> blocks(width);
    std::atomic<int> next{0};
    auto work = [&]() {
      std::vector<double> tensor;
      std::vector<int> nvec(vol, 0);
      for (;;) {
        const int b = next.fetch_add(1);
        if (b >= width) return;
        Block& blk = blocks[b];
        if (vol == 1) {
          const double v = eigenvalue(std::vector<int>{b});
          blk.abs += std::abs(v);
          blk.sum += v;
          blk.min_value = v;
          blk.argmin = {b};
          continue;
        }
        const std::size_t block_size =
            static_cast<std::size_t>(std::pow(width, vol - 1));
        tensor.assign(block_size, 0.0);
        // accumulate sum_alpha coef * prod_k T_k[alpha_k][n_k] with n_1 = b
        for (const auto& [coef, alpha] : terms_)
          fill(tensor, alpha, coef * tables_.value(0, alpha[0], b));
        for (std::size_t idx = 0; idx < block_size; ++idx) {
          const double v = tensor[idx];
          blk.abs += std::abs(v);
          blk.sum += v;
          if (v < blk.min_value) {
            blk.min_value = v;
            std::size_t rem = idx;
            nvec[0] = b;
            for (int k = vol - 1; k >= 1; --k) {
              nvec[k] = static_cast<int>(rem % width);
              rem /= width;
            }
            blk.argmin = nvec;
          }
        }
      }
    };
    const unsigned workers =
        std::min<unsigned>(worker_count(), static_cast<unsigned>(width));
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    Enumeration out;
    KahanSum abs, sum;
    out.min_value = std::numeric_limits<double>::infinity();
    for (const Block& blk : blocks) {
      abs += blk.abs.value();
      sum += blk.sum.value();
      if (blk.min_value < out.min_value) {
        out.min_value = blk.min_value;
        out.argmin = blk.argmin;
      }
    }
    out.abs_sum = abs.value();
    out.sum = sum.value();
    return out;
  }

  NegativityReport report(double budget = 1e8) const {
    const Enumeration e = enumerate(budget);
    NegativityReport r;
    r.tail_bound = global_tail_bound();
    if (!(r.tail_bound <= policy_.tail_eps))
      fail(errc::insufficient_truncation,
           "global tail bound " + std::to_string(r.tail_bound) +
               " exceeds budget " + std::to_string(policy_.tail_eps));
    r.trace_norm = e.abs_sum;
    r.trace_check = e.sum;
    r.log_negativity = std::log(e.abs_sum);
    r.n_max = policy_.n_max;
    r.N = spec_.N;
    return r;
  }

  /// Negative-eigenvalue witness. Example-4.2 candidate indices are tried
  /// first (n_k = 0 where d_k > 1, smallest admissible even index where
  /// d_k < 1); falls back to the full scan within the truncation window.
  std::optional<std::vector<int>> peres_witness(double budget = 1e8) const {
    const int vol = modes();
    std::vector<std::vector<int>> cand(vol);
    for (int k = 0; k < vol; ++k) {
      const double d = symp_.d[k];
      const double zeta = symp_.zeta[k];
      if (d > 1.0) {
        cand[k] = {0};
      } else if (d < 1.0) {
        const double thr = zeta * zeta / (1.0 - zeta * zeta);
        int n0 = static_cast<int>(std::ceil(thr)) + 1;
        if (n0 % 2 != 0) ++n0;
        if (n0 > policy_.n_max) n0 = policy_.n_max - policy_.n_max % 2;
        cand[k] = {n0};
        if (n0 + 2 <= policy_.n_max) cand[k].push_back(n0 + 2);
      } else {
        for (int n = 0; n <= std::min(spec_.N, policy_.n_max); ++n)
          cand[k].push_back(n);
      }
    }
    std::vector<int> pick(vol, 0);
    std::optional<std::vector<int>> found;
    auto visit = [&](auto&& self, int k) -> void {
      if (found) return;
      if (k == vol) {
        if (eigenvalue(pick) < -1e-14) found = pick;
        return;
      }
      for (int n : cand[k]) {
        pick[k] = n;
        self(self, k + 1);
      }
    };
    visit(visit, 0);
    if (found) return found;
    const Enumeration e = enumerate(budget);
    if (e.min_value < -1e-14) return e.argmin;
    return std::nullopt;
  }

private:
  void fill(std::vector<double>& tensor, const std::vector<int>& alpha,
            double coef) const {
    const int vol = modes();
    const int width = policy_.n_max + 1;
    // iterative outer product over modes 1..vol-1
    fill_rec(tensor.data(), tensor.size(), alpha, 1, vol, width, coef);
  }

  void fill_rec(double* out, std::size_t len, const std::vector<int>& alpha,
                int k, int vol, int width, double coef) const {
    if (k == vol - 1) {
      for (int n = 0; n < width; ++n)
        out[n] += coef * tables_.value(k, alpha[k], n);
      return;
    }
    const std::size_t stride = len / width;
    for (int n = 0; n < width; ++n)
      fill_rec(out + n * stride, stride, alpha, k + 1, vol, width,
               coef * tables_.value(k, alpha[k], n));
  }

  SymplecticSpectrum symp_;
  EnsembleSpec spec_;
  TruncationPolicy policy_;
  ModeTables tables_;
  std::vector<std::pair<double, std::vector<int>>> terms_;
};

/// N = 0 closed form: sum over d_k < 1 of log(1/d_k).
inline double ground_state_negativity_closed_form(
    const SymplecticSpectrum& symp) {
  KahanSum s;
  for (Eigen::Index k = 0; k < symp.d.size(); ++k)
    if (symp.d[k] < 1.0) s += -std::log(symp.d[k]);
  return s.value();
}

/// Product bound sum_k log g_{d_k}(N); also valid for weighted ensembles.
inline double product_bound(const EnsembleSpec& spec,
                            const SymplecticSpectrum& symp) {
  spec.validate();
  KahanSum s;
  for (Eigen::Index k = 0; k < symp.d.size(); ++k)
    s += std::log(trace_norm_bound(symp.d[k], spec.N));
  return s.value();
}

/// (2N+1) ||h^{1/2}|| sum_{x in region, y outside} |<dx, h^{-1/2} dy>|.
inline double h_bound(const SpectralFrame& frame, const Region& region,
                      int N) {
  require(N >= 0, errc::bad_input, "N must be >= 0");
  require(region.volume() == frame.size(), errc::invalid_region,
          "region volume mismatch");
  const double hnorm = std::sqrt(frame.gamma2().maxCoeff());
  const Eigen::MatrixXd& c = frame.inv_half();
  KahanSum s;
  for (auto x : region.members())
    for (Eigen::Index y = 0; y < frame.size(); ++y)
      if (!region.contains(y)) s += std::abs(c(x, y));
  return (2.0 * N + 1.0) * hnorm * s.value();
}

inline NegativityReport exact_log_negativity(const EnsembleSpec& spec,
                                             const SymplecticSpectrum& symp,
                                             const TruncationPolicy& policy,
                                             double budget = 1e8) {
  PartialTransposeSpectrum pts(symp, spec, policy);
  NegativityReport r = pts.report(budget);
  r.product_bound = product_bound(spec, symp);
  return r;
}

inline NegativityReport mixed_log_negativity(const std::vector<double>& weights,
                                             const SymplecticSpectrum& symp,
                                             const TruncationPolicy& policy,
                                             double budget = 1e8) {
  EnsembleSpec spec;
  spec.N = static_cast<int>(weights.size()) - 1;
  spec.weights = weights;
  return exact_log_negativity(spec, symp, policy, budget);
}

/// Expected energy of the harmonic Hamiltonian at rho_N:
/// (1 + 2N/|Lambda|) sum_k gamma_k.
inline double ensemble_energy(const SpectralFrame& frame, int N) {
  require(N >= 0, errc::bad_input, "N must be >= 0");
  const double vol = static_cast<double>(frame.size());
  return (1.0 + 2.0 * N / vol) * frame.gamma().sum();
}

}  // namespace latneg

#endif
