#ifndef LATNEG_LATTICE_HPP
#define LATNEG_LATTICE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "latneg/errors.hpp"

namespace latneg {

/// d-dimensional box of Z^d with lexicographically ordered sites.
/// Site ordering is part of the stable API: every downstream index
/// convention (matrix rows, Fock tensor factors, CSV columns) keys on it.
class LatticeBox {
public:
  LatticeBox(int d, int lo, int hi) : d_(d), lo_(lo), hi_(hi) {
    require(d >= 1, errc::invalid_geometry, "dimension must be >= 1");
    require(lo < hi, errc::invalid_geometry, "box extents need lo < hi");
    side_ = hi - lo + 1;
    std::int64_t n = 1;
    for (int i = 0; i < d; ++i) n *= side_;
    size_ = n;
    sites_.resize(size_, std::vector<int>(d_, lo_));
    for (std::int64_t idx = 1; idx < size_; ++idx) {
      sites_[idx] = sites_[idx - 1];
      // lexicographic: last coordinate is the fastest odometer digit
      for (int i = d_ - 1; i >= 0; --i) {
        if (++sites_[idx][i] <= hi_) break;
        sites_[idx][i] = lo_;
      }
    }
  }

  int dim() const { return d_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  std::int64_t size() const { return size_; }
  const std::vector<int>& site(std::int64_t idx) const { return sites_[idx]; }

  std::int64_t index_of(const std::vector<int>& x) const {
    std::int64_t idx = 0;
    for (int i = 0; i < d_; ++i) {
      require(x[i] >= lo_ && x[i] <= hi_, errc::invalid_geometry,
              "site outside box");
      idx = idx * side_ + (x[i] - lo_);
    }
    return idx;
  }

  int l1_distance(std::int64_t i, std::int64_t j) const {
    int r = 0;
    for (int c = 0; c < d_; ++c) r += std::abs(sites_[i][c] - sites_[j][c]);
    return r;
  }

  /// Nearest-neighbor pairs {i,j}, i < j, each undirected edge once.
  std::vector<std::pair<std::int64_t, std::int64_t>> edges() const {
    std::vector<std::pair<std::int64_t, std::int64_t>> e;
    for (std::int64_t i = 0; i < size_; ++i) {
      for (int c = 0; c < d_; ++c) {
        if (sites_[i][c] < hi_) {
          auto y = sites_[i];
          ++y[c];
          e.emplace_back(i, index_of(y));
        }
      }
    }
    return e;
  }

private:
  int d_, lo_, hi_, side_;
  std::int64_t size_ = 0;
  std::vector<std::vector<int>> sites_;
};

/// Subregion of a box, kept as a sorted index list plus a membership mask.
class Region {
public:
  Region(const LatticeBox& box, std::vector<std::int64_t> members)
      : volume_(box.size()), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()),
                   members_.end());
    mask_.assign(volume_, false);
    for (auto idx : members_) {
      require(idx >= 0 && idx < volume_, errc::invalid_region,
              "region index outside box");
      mask_[idx] = true;
    }
  }

  static Region empty(const LatticeBox& box) { return Region(box, {}); }

  static Region full(const LatticeBox& box) {
    std::vector<std::int64_t> all(box.size());
    for (std::int64_t i = 0; i < box.size(); ++i) all[i] = i;
    return Region(box, all);
  }

  const std::vector<std::int64_t>& members() const { return members_; }
  bool contains(std::int64_t idx) const { return mask_[idx]; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(members_.size());
  }
  std::int64_t volume() const { return volume_; }

private:
  std::int64_t volume_;
  std::vector<std::int64_t> members_;
  std::vector<bool> mask_;
};

/// Interior boundary: sites of the region with a nearest neighbor outside.
inline std::vector<std::int64_t> boundary(const LatticeBox& box,
                                          const Region& region) {
  require(region.volume() == box.size(), errc::invalid_region,
          "region built for a different box");
  std::vector<std::int64_t> b;
  for (auto i : region.members()) {
    auto x = box.site(i);
    bool hit = false;
    for (int c = 0; c < box.dim() && !hit; ++c) {
      for (int s : {-1, +1}) {
        auto y = x;
        y[c] += s;
        if (y[c] < box.lo() || y[c] > box.hi()) continue;
        if (!region.contains(box.index_of(y))) {
          hit = true;
          break;
        }
      }
    }
    if (hit) b.push_back(i);
  }
  return b;
}

/// Graph Laplacian of the nearest-neighbor graph with free boundary:
/// diagonal = vertex degree, -1 on edges. Satisfies 0 <= h0 <= 4d.
inline Eigen::MatrixXd build_laplacian(const LatticeBox& box) {
  const auto n = box.size();
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : box.edges()) {
    h0(i, i) += 1.0;
    h0(j, j) += 1.0;
    h0(i, j) -= 1.0;
    h0(j, i) -= 1.0;
  }
  return h0;
}

struct DisorderSpec {
  double lambda = 1.0;
  double k_max = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(lambda > 0.0, errc::bad_input, "lambda must be positive");
    require(k_max > 0.0, errc::bad_input, "k_max must be positive");
  }
};

/// i.i.d. uniform spring constants on [0, k_max]. Realization r draws from
/// stream (seed, r), so a disorder sweep is reproducible no matter how the
/// realizations are scheduled across workers.
inline Eigen::VectorXd sample_springs(const DisorderSpec& spec,
                                      const LatticeBox& box,
                                      std::uint64_t realization = 0) {
  spec.validate();
  std::seed_seq seq{static_cast<std::uint64_t>(spec.seed), realization};
  std::mt19937_64 eng(seq);
  Eigen::VectorXd k(box.size());
  for (std::int64_t i = 0; i < box.size(); ++i) {
    // 53-bit mantissa draw; bit-stable across platforms unlike
    // uniform_real_distribution
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    k[i] = u * spec.k_max;
  }
  return k;
}

/// One-particle operator h = lambda*h0 + diag(k).
inline Eigen::MatrixXd build_single_particle(const LatticeBox& box,
                                             double lambda,
                                             const Eigen::VectorXd& k) {
  require(k.size() == box.size(), errc::bad_input,
          "spring vector size mismatch");
  Eigen::MatrixXd h = lambda * build_laplacian(box);
  h.diagonal() += k;
  return h;
}

}  // namespace latneg

#endif
