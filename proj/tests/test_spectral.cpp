#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latneg/lattice.hpp"
#include "latneg/spectral.hpp"

using namespace latneg;

namespace {

Eigen::MatrixXd hand_frame() {
  Eigen::MatrixXd h(2, 2);
  h << 2, -1, -1, 2;
  return h;
}

Eigen::MatrixXd random_spd(int n, std::mt19937& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = g(gen);
  return b * b.transpose() + 0.2 * Eigen::MatrixXd::Identity(n, n);
}

Region random_region(int n, std::mt19937& gen) {
  LatticeBox chain(1, 0, n - 1);
  std::vector<std::int64_t> members;
  for (int i = 0; i < n; ++i)
    if (gen() % 2) members.push_back(i);
  if (members.empty()) members.push_back(0);
  if (members.size() == static_cast<std::size_t>(n)) members.pop_back();
  return Region(chain, members);
}

}  // namespace

TEST_CASE("eigendecomposition of the 2x2 hand frame") {
  SpectralFrame fr(hand_frame());
  REQUIRE(fr.gamma2()[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(fr.gamma2()[1] == Catch::Approx(3.0).margin(1e-12));
  const double c = 1.0 / std::sqrt(2.0);
  REQUIRE(std::abs(std::abs(fr.orthogonal()(0, 0)) - c) <= 1e-12);
  REQUIRE(std::abs(std::abs(fr.orthogonal()(1, 1)) - c) <= 1e-12);
}

TEST_CASE("eigendecomposition basics") {
  SpectralFrame id(Eigen::MatrixXd::Identity(3, 3));
  REQUIRE((id.gamma2() - Eigen::VectorXd::Ones(3)).norm() <= 1e-14);
  REQUIRE(id.near_degenerate());

  // 3-site chain with unit springs: eigenvalues of h0 + I
  LatticeBox chain(1, 0, 2);
  SpectralFrame fr(build_single_particle(chain, 1.0,
                                         Eigen::VectorXd::Ones(3)));
  REQUIRE(fr.gamma2()[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(fr.gamma2()[1] == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(fr.gamma2()[2] == Catch::Approx(4.0).margin(1e-12));

  Eigen::MatrixXd neg(2, 2);
  neg << 1, 0, 0, -1;
  REQUIRE_THROWS_AS(SpectralFrame(neg), error);
}

TEST_CASE("fractional powers") {
  Eigen::MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  SpectralFrame fr(d);
  Eigen::MatrixXd r = fr.power(0.5);
  REQUIRE(r(0, 0) == Catch::Approx(2.0));
  REQUIRE(r(1, 1) == Catch::Approx(3.0));

  std::mt19937 gen(2);
  Eigen::MatrixXd h = random_spd(5, gen);
  SpectralFrame g(h);
  REQUIRE((g.half() * g.half() - h).norm() <= 1e-10 * h.norm());
  REQUIRE((g.half() * g.inv_half() - Eigen::MatrixXd::Identity(5, 5)).norm() <=
          1e-10);
  REQUIRE((g.quarter() * g.quarter() - g.half()).norm() <= 1e-10);
}

TEST_CASE("correlation frame assembly") {
  LatticeBox chain(1, 0, 1);
  SpectralFrame fr(hand_frame());

  CorrelationFrame none(fr, Region::empty(chain));
  REQUIRE((none.Mtilde() - none.M()).norm() == 0.0);
  REQUIRE((none.p() - Eigen::VectorXd::Ones(2)).norm() == 0.0);

  CorrelationFrame all(fr, Region::full(chain));
  REQUIRE((all.Mtilde() - all.M()).norm() <= 1e-14);

  CorrelationFrame half(fr, Region(chain, {0}));
  REQUIRE(half.p()[0] == -1.0);
  REQUIRE(half.p()[1] == 1.0);
  // momentum block picks up the sign flip on off-diagonal entries
  REQUIRE(half.Mtilde()(2, 3) == Catch::Approx(-half.M()(2, 3)));
  REQUIRE(half.Mtilde()(2, 2) == Catch::Approx(half.M()(2, 2)));
  // position block untouched
  REQUIRE((half.Mtilde().topLeftCorner(2, 2) - half.M().topLeftCorner(2, 2))
              .norm() == 0.0);
}

TEST_CASE("symplectic eigenvalues of the hand frame") {
  LatticeBox chain(1, 0, 1);
  SpectralFrame fr(hand_frame());
  CorrelationFrame cf(fr, Region(chain, {0}));
  auto s = symplectic_eigenvalues(cf);
  REQUIRE(s.Z.trace() == Catch::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-12));
  REQUIRE(s.Z.determinant() == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(s.d[0] == Catch::Approx(std::pow(3.0, -0.25)).epsilon(1e-12));
  REQUIRE(s.d[1] == Catch::Approx(std::pow(3.0, 0.25)).epsilon(1e-12));

  auto cross = symplectic_cross_check(cf);
  REQUIRE((cross - s.d).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("decoupled sites give trivial symplectic spectrum") {
  LatticeBox chain(1, 0, 2);
  Eigen::MatrixXd h = Eigen::VectorXd::LinSpaced(3, 0.5, 2.5).asDiagonal();
  SpectralFrame fr(h);
  CorrelationFrame cf(fr, Region(chain, {1}));
  auto s = symplectic_eigenvalues(cf);
  REQUIRE((s.d - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);

  CorrelationFrame empty(fr, Region::empty(chain));
  auto s0 = symplectic_eigenvalues(empty);
  REQUIRE((s0.d - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("symplectic spectrum properties on random frames") {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 5);
    SpectralFrame fr(random_spd(n, gen));
    CorrelationFrame cf(fr, random_region(n, gen));
    auto s = symplectic_eigenvalues(cf);

    // inversion symmetry of spec(Z)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.Z);
    std::vector<double> z(es.eigenvalues().data(),
                          es.eigenvalues().data() + n);
    std::vector<double> zinv;
    for (double v : z) zinv.push_back(1.0 / v);
    std::sort(zinv.begin(), zinv.end());
    for (int i = 0; i < n; ++i)
      REQUIRE(std::abs(z[i] - zinv[i]) <= 1e-8 * std::max(1.0, z[i]));

    // det Z = prod d^2 = 1
    REQUIRE(std::abs(s.Z.determinant() - 1.0) <= 1e-8);

    // both routes agree
    auto cross = symplectic_cross_check(cf);
    REQUIRE((cross - s.d).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("eigencorrelator decay fit") {
  LatticeBox chain(1, 0, 29);
  DisorderSpec spec{1.0, 8.0, 99};

  auto fit = eigencorrelator_decay(chain, spec, 60);
  REQUIRE(fit.ok);
  REQUIRE(fit.mu > 0.0);
  REQUIRE(fit.C > 0.0);
  // amplitudes really decrease across the fitted range
  REQUIRE(fit.mean_by_distance[1] > fit.mean_by_distance[10]);
  REQUIRE(fit.mean_by_distance[10] > fit.mean_by_distance[25]);

  // a single distance class cannot support a two-parameter fit
  LatticeBox two(1, 0, 1);
  auto deg = eigencorrelator_decay(two, spec, 2);
  REQUIRE_FALSE(deg.ok);
}

TEST_CASE("decay fit is a pure function of its inputs") {
  LatticeBox chain(1, 0, 19);
  DisorderSpec spec{1.0, 8.0, 7};
  auto a = eigencorrelator_decay(chain, spec, 8);
  auto b = eigencorrelator_decay(chain, spec, 8);
  REQUIRE(a.mu == b.mu);
  REQUIRE(a.C == b.C);
  REQUIRE(a.residual == b.residual);
}

TEST_CASE("effective area constant") {
  DecayFit fit;
  fit.C = 2.0;
  fit.mu = std::log(2.0);
  fit.ok = true;
  // d=1: lattice sum is (1+e^-mu)/(1-e^-mu) = 3
  const double want = 2.0 * std::sqrt(4.0 * 1.0 * 1.0 + 8.0) * 9.0;
  REQUIRE(effective_area_constant(fit, 1, 1.0, 8.0) ==
          Catch::Approx(want).epsilon(1e-9));

  // mu -> large: lattice sum -> 1
  fit.mu = 60.0;
  REQUIRE(effective_area_constant(fit, 1, 1.0, 8.0) ==
          Catch::Approx(2.0 * std::sqrt(12.0)).epsilon(1e-9));

  // linear in C
  fit.mu = 1.0;
  DecayFit doubled = fit;
  doubled.C = 2.0 * fit.C;
  REQUIRE(effective_area_constant(doubled, 2, 0.5, 1.0) ==
          Catch::Approx(2.0 * effective_area_constant(fit, 2, 0.5, 1.0)));

  DecayFit bad;
  bad.mu = -0.1;
  REQUIRE_THROWS_AS(effective_area_constant(bad, 1, 1.0, 1.0), error);
}
