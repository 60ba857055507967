#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kickho/error.hpp"
#include "kickho/params.hpp"

using namespace kickho;

TEST_SUITE("params") {
  TEST_CASE("reduced parameters of the standard configuration") {
    const auto p = build_params(2.0, 6, 0.464);
    CHECK(p.alpha() == std::numbers::pi / 3.0);
    CHECK(p.ktilde() == doctest::Approx(2.0 / (2.0 * 0.464 * 0.464)).epsilon(1e-15));
    CHECK(p.ktilde() == doctest::Approx(4.6445).epsilon(1e-4));
    CHECK_FALSE(p.quasicrystal());
  }

  TEST_CASE("zero kick and quasicrystal flag") {
    const auto free = build_params(0.0, 4, 0.5);
    CHECK(free.alpha() == std::numbers::pi / 2.0);
    CHECK(free.ktilde() == 0.0);
    CHECK(build_params(2.0, 5, 0.4).quasicrystal());
    CHECK(build_params(2.0, 5, 0.4).alpha() == 2.0 * std::numbers::pi / 5.0);
    for (int q : {3, 4, 6}) CHECK_FALSE(build_params(1.0, q, 0.3).quasicrystal());
    for (int q : {5, 7, 8, 12}) CHECK(build_params(1.0, q, 0.3).quasicrystal());
  }

  TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(build_params(2.0, 2, 0.464), DomainError);
    CHECK_THROWS_AS(build_params(2.0, 6, 0.0), DomainError);
    CHECK_THROWS_AS(build_params(2.0, 6, -0.1), DomainError);
    CHECK_THROWS_AS(build_params(-1.0, 6, 0.464), DomainError);
    CHECK_THROWS_AS(build_params(2.0, 6.5, 0.464), DomainError);
    CHECK_THROWS_AS(build_params(std::nan(""), 6, 0.464), DomainError);
    CHECK(build_params(2.0, 6.0, 0.464) == build_params(2.0, 6, 0.464));
  }

  TEST_CASE("physical parameters map to the reduced set") {
    PhysicalParams p;
    p.A = 2.0;
    p.tau = 2.0 * std::numbers::pi / 6.0;
    const auto s = params_from_physical(p);
    CHECK(s.K() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.q() == 6);
    CHECK(s.eta() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    p.A = 0.0;
    CHECK(params_from_physical(p).K() == 0.0);

    p.tau = 1.0;
    CHECK_THROWS_AS(params_from_physical(p), NonResonantError);
    p.tau = 2.0 * std::numbers::pi / 6.0;
    p.m = 0.0;
    CHECK_THROWS_AS(params_from_physical(p), DomainError);
  }

  TEST_CASE("round trip and mass rescaling") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(0.2, 5.0);
    std::uniform_int_distribution<int> qs(3, 12);
    for (int trial = 0; trial < 100; ++trial) {
      PhysicalParams p;
      p.m = pos(rng);
      p.nu = pos(rng);
      p.k = pos(rng);
      p.A = pos(rng);
      p.hbar = pos(rng);
      const int q = qs(rng);
      p.tau = 2.0 * std::numbers::pi / (q * p.nu);
      const auto s = params_from_physical(p);
      const double K = p.A * p.k * p.k / (p.m * p.nu);
      const double eta = p.k * std::sqrt(p.hbar / (2.0 * p.m * p.nu));
      CHECK(s.q() == q);
      CHECK(std::abs(s.K() - K) <= 1e-14 * K);
      CHECK(std::abs(s.eta() - eta) <= 1e-14 * eta);
      const auto again = build_params(s.K(), s.q(), s.eta());
      CHECK(again == s);

      const double c = pos(rng);
      PhysicalParams scaled = p;
      scaled.m *= c;
      scaled.A *= c;
      const auto t = params_from_physical(scaled);
      CHECK(std::abs(t.K() - s.K()) <= 1e-13 * s.K());
      CHECK(std::abs(t.eta() - s.eta() / std::sqrt(c)) <= 1e-13 * s.eta());
    }
  }
}
