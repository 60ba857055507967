#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "kickho/error.hpp"
#include "kickho/husimi.hpp"

using namespace kickho;

TEST_SUITE("husimi") {
  TEST_CASE("coherent overlaps") {
    const auto vac = vacuum_state(FockBasis(40));
    CHECK(std::abs(coherent_overlap(vac, 0.0) - 1.0) < 1e-15);
    ComplexVector one = ComplexVector::Zero(40);
    one(1) = 1.0;
    CHECK(std::abs(coherent_overlap(StateVector(FockBasis(40), one), 0.0)) < 1e-15);

    for (cplx beta : {cplx(0.5, 0.0), cplx(-1.0, 2.0), cplx(2.5, -1.5)}) {
      CHECK(std::abs(coherent_overlap(vac, beta) - std::exp(-std::norm(beta) / 2)) < 1e-14);
      // <beta|gamma> = exp(-|beta|^2/2 - |gamma|^2/2 + conj(beta) gamma)
      const cplx gamma(1.2, 2.0);
      const auto g = displaced_vacuum(FockBasis(80), gamma.real(), gamma.imag());
      const cplx expect =
          std::exp(-std::norm(beta) / 2 - std::norm(gamma) / 2 + std::conj(beta) * gamma);
      CHECK(std::abs(coherent_overlap(g, beta) - expect) < 1e-12);
    }
    CHECK(coherent_overlap_reliable(cplx(2.0, 0.0), 16));
    CHECK_FALSE(coherent_overlap_reliable(cplx(2.1, 0.0), 16));
  }

  TEST_CASE("vacuum Husimi function") {
    const auto field = husimi_grid(vacuum_state(FockBasis(60)), square_grid(5.0, 0.1));
    CHECK(field.grid().n1 == 101);
    CHECK(field.value(50, 50) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    const auto& v = field.values();
    CHECK(*std::max_element(v.begin(), v.end()) == field.value(50, 50));
    CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; }));
    CHECK(field.total_mass() >= 0.9);
    CHECK(field.total_mass() <= 1.0001);
    // Gaussian mass within |beta| <= 2 is 1 - exp(-4)
    CHECK(localization_fraction(field, 2.0) >= 0.98);
    CHECK(mass_beyond(field, 2.0) == doctest::Approx(1.0 - localization_fraction(field, 2.0)));
    CHECK(is_localized(field, {}));
    CHECK_THROWS_AS(localization_fraction(field, 6.0), DomainError);
    CHECK_THROWS_AS(localization_fraction(field, 0.0), DomainError);
  }

  TEST_CASE("uniform field gives the area ratio") {
    const auto grid = square_grid(2.0, 0.01);
    const HusimiField flat(grid, std::vector<double>(grid.n1 * grid.n2, 1.0));
    const double disc = std::numbers::pi * 1.0 * 1.0;
    CHECK(localization_fraction(flat, 1.0) == doctest::Approx(disc / 16.0).epsilon(5e-3));
    CHECK_THROWS_AS(HusimiField(grid, std::vector<double>(3, 1.0)), DimensionError);
  }

  TEST_CASE("displaced vacuum is a translated vacuum") {
    const auto grid = square_grid(6.0, 0.1);
    const auto vac = husimi_grid(vacuum_state(FockBasis(120)), grid);
    const auto moved = husimi_grid(displaced_vacuum(FockBasis(120), 1.2, -0.7), grid, 3);
    // shift by (12, -7) nodes
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n1; ++i) {
      for (std::size_t j = 0; j < grid.n2; ++j) {
        const long si = static_cast<long>(i) - 12;
        const long sj = static_cast<long>(j) + 7;
        if (si < 0 || sj < 0 || si >= static_cast<long>(grid.n1) || sj >= static_cast<long>(grid.n2))
          continue;
        worst = std::max(worst, std::abs(moved.value(i, j) -
                                         vac.value(static_cast<std::size_t>(si),
                                                   static_cast<std::size_t>(sj))));
      }
    }
    CHECK(worst < 1e-6);
    const auto& v = moved.values();
    const auto top = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    CHECK(grid.x1(top / grid.n2) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(grid.x2(top % grid.n2) == doctest::Approx(-0.7).epsilon(1e-12));
  }

  TEST_CASE("threads do not change the field") {
    const auto s = displaced_vacuum(FockBasis(80), 1.3, 3.0);
    const auto grid = square_grid(7.0, 0.2);
    CHECK(husimi_grid(s, grid, 1).values() == husimi_grid(s, grid, 4).values());
  }

  TEST_CASE("grid validation") {
    HusimiGrid bad;
    bad.n1 = 1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = HusimiGrid{};
    bad.x1_max = bad.x1_min;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(square_grid(-1.0, 0.1), DomainError);
  }

  TEST_CASE("classifier threshold") {
    const auto grid = square_grid(8.0, 0.1);
    const auto far = husimi_grid(displaced_vacuum(FockBasis(120), 4.0, 0.0), grid);
    CHECK(localization_fraction(far, 1.5) < 1e-3);
    CHECK_FALSE(is_localized(far, {}));
    CHECK(mass_beyond(far, 3.0) > 0.8);
  }
}
