#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "kickho/error.hpp"
#include "kickho/fock.hpp"
#include "kickho/propagation.hpp"

using namespace kickho;

namespace {

StateVector fock_state(std::size_t n, std::size_t k) {
  ComplexVector a = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  a(static_cast<Eigen::Index>(k)) = 1.0;
  return StateVector(FockBasis(n), a);
}

}  // namespace

TEST_SUITE("propagation") {
  TEST_CASE("vacuum") {
    const auto v = vacuum_state(FockBasis(20));
    CHECK(mean_excitation(v) == 0.5);
    CHECK(v.norm() == 1.0);
    CHECK(overlap(v, v) == cplx(1.0, 0.0));
    CHECK(leakage(v, 0.1) == 0.0);
    CHECK(leakage(v, 0.9) == 0.0);
  }

  TEST_CASE("state construction guards") {
    CHECK_THROWS_AS(StateVector(FockBasis(4), ComplexVector::Ones(3)), DimensionError);
    CHECK_THROWS_AS(StateVector(FockBasis(4), ComplexVector::Ones(4)), NumericError);
    CHECK_THROWS_AS(leakage(vacuum_state(FockBasis(4)), 0.0), DomainError);
    CHECK_THROWS_AS(leakage(vacuum_state(FockBasis(4)), 1.0), DomainError);
    CHECK_THROWS_AS(overlap(vacuum_state(FockBasis(4)), vacuum_state(FockBasis(5))), DimensionError);
  }

  TEST_CASE("displaced vacuum is a coherent state") {
    CHECK(displaced_vacuum(FockBasis(40), 0.0, 0.0).amplitudes() ==
          vacuum_state(FockBasis(40)).amplitudes());
    const cplx beta(1.2, 2.0);
    const auto s = displaced_vacuum(FockBasis(64), beta.real(), beta.imag());
    CHECK(mean_excitation(s) == doctest::Approx(std::norm(beta) + 0.5).epsilon(1e-10));
    CHECK(s.norm() <= 1.0 + 1e-15);
    CHECK(s.norm() >= 1.0 - 1e-8);
    cplx c = std::exp(-std::norm(beta) / 2.0);
    double worst = 0.0;
    for (int n = 0; n < 64; ++n) {
      if (n > 0) c *= beta / std::sqrt(static_cast<double>(n));
      worst = std::max(worst, std::abs(s.amplitudes()(n) - c));
    }
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(displaced_vacuum(FockBasis(16), 3.0, 3.0), InsufficientBasisError);
    CHECK(mean_excitation(make_state(InitialState::displaced(1.2, 2.0), FockBasis(64))) ==
          mean_excitation(s));
  }

  TEST_CASE("mean excitation") {
    CHECK(mean_excitation(fock_state(5, 1)) == 1.5);
    ComplexVector a = ComplexVector::Zero(5);
    a(0) = a(2) = 1.0 / std::sqrt(2.0);
    CHECK(mean_excitation(StateVector(FockBasis(5), a)) == doctest::Approx(1.5).epsilon(1e-15));
  }

  TEST_CASE("leakage counts the top levels") {
    CHECK(leakage(fock_state(50, 49), 0.1) == 1.0);
    CHECK(leakage(fock_state(50, 45), 0.1) == 1.0);
    CHECK(leakage(fock_state(50, 44), 0.1) == 0.0);
    // ceil(0.1 * 55) = 6 levels: 49..54
    CHECK(leakage(fock_state(55, 49), 0.1) == 1.0);
  }

  TEST_CASE("free evolution") {
    const auto p = build_params(0.0, 6, 0.464);
    const auto u = floquet_operator(p, FockBasis(12));
    const auto vac = apply_floquet(vacuum_state(FockBasis(12)), u);
    CHECK(vac.amplitudes() == vacuum_state(FockBasis(12)).amplitudes());
    for (std::size_t n = 0; n < 12; ++n) {
      const auto out = apply_floquet(fock_state(12, n), u);
      const cplx expect = std::polar(1.0, -p.alpha() * static_cast<double>(n));
      CHECK(std::abs(out.amplitudes()(static_cast<Eigen::Index>(n)) - expect) < 1e-15);
    }
    const auto curve = heating_curve(p, FockBasis(80), 200,
                                     displaced_vacuum(FockBasis(80), 1.3, 3.0));
    for (double e : curve.energies) CHECK(std::abs(e - curve.energies[0]) < 1e-12);
    CHECK_THROWS_AS(apply_floquet(vacuum_state(FockBasis(11)), u), DimensionError);
  }

  TEST_CASE("norm is conserved over 600 kicks") {
    const auto u = floquet_operator(build_params(2.0, 6, 0.464), FockBasis(300));
    auto s = vacuum_state(FockBasis(300));
    for (int k = 1; k <= 600; ++k) {
      s = apply_floquet(s, u);
      if (k % 100 == 0) CHECK(std::abs(s.norm() - 1.0) < k * 1e-12);
    }
    CHECK(std::abs(s.norm() - 1.0) < 1e-8);
  }

  TEST_CASE("heating curve bookkeeping") {
    const auto init = vacuum_state(FockBasis(256));
    const auto curve = heating_curve(build_params(2.0, 6, 0.464), FockBasis(256), 30, init);
    REQUIRE(curve.energies.size() == 31);
    REQUIRE(curve.leakage_series.size() == 31);
    CHECK(curve.energies[0] == mean_excitation(init));
    for (double l : curve.leakage_series) CHECK(l >= 0.0);
    CHECK(curve.max_leakage < 1e-6);
    CHECK(curve.converged);
    CHECK(curve.energies.back() > curve.energies.front());
    CHECK_THROWS_AS(heating_curve(build_params(2.0, 6, 0.464), FockBasis(16), -1,
                                  vacuum_state(FockBasis(16))),
                    DomainError);
  }

  TEST_CASE("leakage marks a truncated run as unconverged") {
    const auto curve = heating_curve(build_params(2.0, 6, 0.464), FockBasis(24), 100,
                                     vacuum_state(FockBasis(24)));
    CHECK(curve.max_leakage > 1e-6);
    CHECK_FALSE(curve.converged);
  }

  TEST_CASE("relative change") {
    CHECK(relative_change({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(relative_change({1.0, 2.0}, {1.0, 2.2}) == doctest::Approx(0.2 / 2.2).epsilon(1e-12));
    CHECK_THROWS_AS(relative_change({1.0}, {1.0, 2.0}), DimensionError);
  }

  TEST_CASE("automatic basis doubling") {
    const auto r = converged_heating_curve(build_params(2.0, 6, 0.464), 20, InitialState::vacuum(),
                                           {64, 512});
    CHECK(r.converged);
    CHECK(r.doubling_change < 1e-6);
    REQUIRE(r.tried.size() >= 2);
    for (std::size_t i = 1; i < r.tried.size(); ++i) CHECK(r.tried[i] == 2 * r.tried[i - 1]);
    CHECK(r.curve.basis_size == r.tried[r.tried.size() - 2]);
    CHECK(r.curve.max_leakage < 1e-6);

    const auto capped = converged_heating_curve(build_params(2.0, 6, 0.464), 100,
                                                InitialState::vacuum(), {16, 32});
    CHECK_FALSE(capped.converged);
  }
}
