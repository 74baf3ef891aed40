#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include "latneg/negativity.hpp"

using namespace latneg;

namespace {

Eigen::MatrixXd hand_frame() {
  Eigen::MatrixXd h(2, 2);
  h << 2, -1, -1, 2;
  return h;
}

SymplecticSpectrum hand_spectrum() {
  LatticeBox chain(1, 0, 1);
  SpectralFrame fr(hand_frame());
  CorrelationFrame cf(fr, Region(chain, {0}));
  return symplectic_eigenvalues(cf);
}

// independent oracle in long double, straight from the defining sums
long double brute_mode_eigenvalue(long double d, int ell, int n) {
  const long double z = (d - 1.0L) / (d + 1.0L);
  long double total = 0.0L;
  for (int j = 0; j <= ell; ++j) {
    const int m = ell - j;
    if (n < m) continue;
    long double sig = powl(-z, j) * powl(1.0L + z, m);
    long double om = powl(z, n - m) * powl(1.0L - z, m + 1);
    long double bl = 1.0L, bn = 1.0L;
    for (int i = 1; i <= j; ++i) bl = bl * (ell - i + 1) / i;
    for (int i = 1; i <= m; ++i) bn = bn * (n - i + 1) / i;
    total += bl * sig * bn * om;
  }
  return total;
}

// full spectrum sweep for two modes without any library machinery
struct BruteResult {
  double abs_sum, sum;
};

BruteResult brute_two_mode(const Eigen::VectorXd& d, int N, int n_max) {
  std::vector<std::vector<int>> sector;
  for (int a = 0; a <= N; ++a) sector.push_back({a, N - a});
  long double abs_sum = 0.0L, sum = 0.0L;
  for (int n1 = 0; n1 <= n_max; ++n1)
    for (int n2 = 0; n2 <= n_max; ++n2) {
      long double v = 0.0L;
      for (const auto& alpha : sector)
        v += brute_mode_eigenvalue(d[0], alpha[0], n1) *
             brute_mode_eigenvalue(d[1], alpha[1], n2);
      v /= static_cast<long double>(sector.size());
      abs_sum += fabsl(v);
      sum += v;
    }
  return {static_cast<double>(abs_sum), static_cast<double>(sum)};
}

}  // namespace

TEST_CASE("ensemble spec validation") {
  EnsembleSpec ok{2, std::nullopt};
  ok.validate();
  EnsembleSpec w{1, std::vector<double>{0.25, 0.75}};
  w.validate();
  REQUIRE_THROWS_AS((EnsembleSpec{-1, std::nullopt}.validate()), error);
  REQUIRE_THROWS_AS((EnsembleSpec{1, std::vector<double>{0.5}}.validate()),
                    error);
  REQUIRE_THROWS_AS(
      (EnsembleSpec{1, std::vector<double>{0.5, 0.6}}.validate()), error);
  REQUIRE_THROWS_AS(
      (EnsembleSpec{1, std::vector<double>{-0.1, 1.1}}.validate()), error);
}

TEST_CASE("ground state negativity matches the closed form") {
  auto symp = hand_spectrum();
  const double closed = ground_state_negativity_closed_form(symp);
  REQUIRE(closed == Catch::Approx(0.25 * std::log(3.0)).epsilon(1e-12));

  TruncationPolicy policy{80, 1e-9};
  auto r = exact_log_negativity(EnsembleSpec{0, std::nullopt}, symp, policy);
  REQUIRE(std::abs(r.log_negativity - closed) <= 1e-8);
  REQUIRE(std::abs(r.trace_check - 1.0) <= r.tail_bound + 1e-12);
}

TEST_CASE("excited ensembles agree with a long-double re-derivation") {
  auto symp = hand_spectrum();
  TruncationPolicy policy{80, 1e-8};
  for (int N : {1, 2, 3}) {
    auto r = exact_log_negativity(EnsembleSpec{N, std::nullopt}, symp, policy);
    auto brute = brute_two_mode(symp.d, N, policy.n_max);
    REQUIRE(r.trace_norm == Catch::Approx(brute.abs_sum).epsilon(1e-12));
    REQUIRE(std::abs(r.trace_check - brute.sum) <= 1e-13);
    REQUIRE(r.log_negativity == Catch::Approx(std::log(brute.abs_sum)));
    REQUIRE(std::abs(r.trace_check - 1.0) <= r.tail_bound + 1e-12);
  }
}

TEST_CASE("frozen regression values for the fixed two-site frame") {
  // dense truncated-Fock reference at cutoff 30, computed once and frozen
  auto symp = hand_spectrum();
  TruncationPolicy policy{80, 1e-9};
  auto n1 = exact_log_negativity(EnsembleSpec{1, std::nullopt}, symp, policy);
  REQUIRE(n1.log_negativity == Catch::Approx(0.274653078680700).margin(1e-6));
  auto n2 = exact_log_negativity(EnsembleSpec{2, std::nullopt}, symp, policy);
  REQUIRE(n2.log_negativity == Catch::Approx(0.392279485590971).margin(1e-6));
}

TEST_CASE("point weights reproduce the pure ensemble") {
  auto symp = hand_spectrum();
  TruncationPolicy policy{60, 1e-7};
  auto pure = exact_log_negativity(EnsembleSpec{2, std::nullopt}, symp, policy);
  auto mixed = mixed_log_negativity({0.0, 0.0, 1.0}, symp, policy);
  REQUIRE(mixed.trace_norm == pure.trace_norm);
  REQUIRE(mixed.log_negativity == pure.log_negativity);

  // genuine mixture lands between the pure values it averages
  auto n0 = exact_log_negativity(EnsembleSpec{0, std::nullopt}, symp, policy);
  auto half = mixed_log_negativity({0.5, 0.0, 0.5}, symp, policy);
  REQUIRE(half.trace_norm <= 0.5 * (n0.trace_norm + pure.trace_norm) + 1e-12);
  REQUIRE(std::abs(half.trace_check - 1.0) <= half.tail_bound + 1e-12);
}

TEST_CASE("region and its complement give the same spectrum") {
  LatticeBox chain(1, 0, 3);
  DisorderSpec dspec{1.0, 2.0, 5};
  SpectralFrame fr(
      build_single_particle(chain, dspec.lambda, sample_springs(dspec, chain)));
  auto s1 = symplectic_eigenvalues(CorrelationFrame(fr, Region(chain, {0, 1})));
  auto s2 = symplectic_eigenvalues(CorrelationFrame(fr, Region(chain, {2, 3})));
  REQUIRE((s1.d - s2.d).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("decoupled sites carry no negativity") {
  LatticeBox chain(1, 0, 2);
  Eigen::MatrixXd h = Eigen::VectorXd::LinSpaced(3, 0.5, 2.5).asDiagonal();
  SpectralFrame fr(h);
  auto symp = symplectic_eigenvalues(CorrelationFrame(fr, Region(chain, {0})));
  TruncationPolicy policy{6, 1e-9};
  for (int N : {0, 1, 2}) {
    auto r = exact_log_negativity(EnsembleSpec{N, std::nullopt}, symp, policy);
    REQUIRE(std::abs(r.log_negativity) <= 1e-12);
    REQUIRE(r.trace_norm == Catch::Approx(1.0).margin(1e-12));
    PartialTransposeSpectrum pts(symp, EnsembleSpec{N, std::nullopt}, policy);
    REQUIRE_FALSE(pts.peres_witness().has_value());
  }
}

TEST_CASE("negative eigenvalue witness") {
  auto symp = hand_spectrum();
  TruncationPolicy policy{60, 1e-7};
  for (int N : {0, 1, 2}) {
    PartialTransposeSpectrum pts(symp, EnsembleSpec{N, std::nullopt}, policy);
    auto w = pts.peres_witness();
    REQUIRE(w.has_value());
    REQUIRE(pts.eigenvalue(*w) < 0.0);
  }
}

TEST_CASE("tail accounting") {
  auto symp = hand_spectrum();
  EnsembleSpec spec{1, std::nullopt};
  PartialTransposeSpectrum wide(symp, spec, TruncationPolicy{100, 1e-9});
  PartialTransposeSpectrum narrow(symp, spec, TruncationPolicy{20, 1e-9});
  REQUIRE(wide.global_tail_bound() < narrow.global_tail_bound());

  // the certified tail really covers the mass between the two windows
  auto wide_e = wide.enumerate();
  auto narrow_e = narrow.enumerate();
  REQUIRE(wide_e.abs_sum - narrow_e.abs_sum <=
          narrow.global_tail_bound() + 1e-15);

  try {
    PartialTransposeSpectrum(symp, spec, TruncationPolicy{10, 1e-30}).report();
    FAIL("expected a truncation failure");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::insufficient_truncation);
  }
}

TEST_CASE("enumeration budget is enforced") {
  auto symp = hand_spectrum();
  PartialTransposeSpectrum pts(symp, EnsembleSpec{1, std::nullopt},
                               TruncationPolicy{99, 1e-7});
  try {
    pts.enumerate(100.0);
    FAIL("expected a budget failure");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::enumeration_too_large);
  }
}

TEST_CASE("results do not depend on the worker count") {
  LatticeBox chain(1, 0, 2);
  DisorderSpec dspec{1.0, 2.0, 13};
  SpectralFrame fr(
      build_single_particle(chain, dspec.lambda, sample_springs(dspec, chain)));
  auto symp = symplectic_eigenvalues(CorrelationFrame(fr, Region(chain, {0})));
  PartialTransposeSpectrum pts(symp, EnsembleSpec{2, std::nullopt},
                               TruncationPolicy{40, 1e-6});
  setenv("NEG_THREADS", "1", 1);
  REQUIRE(worker_count() == 1);
  auto one = pts.enumerate();
  setenv("NEG_THREADS", "4", 1);
  REQUIRE(worker_count() == 4);
  auto four = pts.enumerate();
  unsetenv("NEG_THREADS");
  REQUIRE(one.abs_sum == four.abs_sum);
  REQUIRE(one.sum == four.sum);
  REQUIRE(one.min_value == four.min_value);
  REQUIRE(one.argmin == four.argmin);
}

TEST_CASE("product bound") {
  auto symp = hand_spectrum();
  REQUIRE(product_bound(EnsembleSpec{1, std::nullopt}, symp) ==
          Catch::Approx(0.75 * std::log(3.0)).epsilon(1e-12));
  // (2N+1)/2 sum_{z > 1} log z scaling in N
  const double base = product_bound(EnsembleSpec{0, std::nullopt}, symp);
  for (int N : {1, 2, 5})
    REQUIRE(product_bound(EnsembleSpec{N, std::nullopt}, symp) ==
            Catch::Approx((2.0 * N + 1.0) * base).epsilon(1e-12));
  // and it really bounds the computed negativity
  TruncationPolicy policy{80, 1e-8};
  for (int N : {0, 1, 2}) {
    auto r = exact_log_negativity(EnsembleSpec{N, std::nullopt}, symp, policy);
    REQUIRE(r.log_negativity <= r.product_bound + 1e-12);
  }
}

TEST_CASE("surface bound") {
  LatticeBox chain(1, 0, 1);
  SpectralFrame fr(hand_frame());
  Region left(chain, {0});
  REQUIRE(h_bound(fr, left, 0) ==
          Catch::Approx(0.5 * (std::sqrt(3.0) - 1.0)).epsilon(1e-12));
  REQUIRE(h_bound(fr, left, 2) == Catch::Approx(5.0 * h_bound(fr, left, 0)));

  // bound dominates the exact value on disordered chains
  LatticeBox longer(1, 0, 3);
  DisorderSpec dspec{1.0, 2.0, 3};
  for (std::uint64_t r = 0; r < 3; ++r) {
    SpectralFrame dfr(build_single_particle(longer, dspec.lambda,
                                            sample_springs(dspec, longer, r)));
    Region half(longer, {0, 1});
    auto symp = symplectic_eigenvalues(CorrelationFrame(dfr, half));
    for (int N : {0, 1}) {
      auto rep = exact_log_negativity(EnsembleSpec{N, std::nullopt}, symp,
                                      TruncationPolicy{60, 1e-6});
      REQUIRE(rep.log_negativity <= h_bound(dfr, half, N) + 1e-12);
    }
  }
}

TEST_CASE("ensemble energy") {
  SpectralFrame fr(hand_frame());
  const double base = 1.0 + std::sqrt(3.0);
  REQUIRE(ensemble_energy(fr, 0) == Catch::Approx(base).epsilon(1e-12));
  REQUIRE(ensemble_energy(fr, 3) == Catch::Approx(4.0 * base).epsilon(1e-12));
  REQUIRE_THROWS_AS(ensemble_energy(fr, -1), error);
}
