#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "kickho/error.hpp"
#include "kickho/spectral.hpp"
#include "oracles.hpp"

using namespace kickho;
using namespace std::complex_literals;

namespace {

// exp(-iH) with H = [[s(eta - eta0), g/2], [g/2, -s(eta - eta0)]]; the two
// eigenphases are -+sqrt(s^2 (eta - eta0)^2 + g^2/4), so the gap is g at eta0.
struct LandauZener {
  double slope = 2.0;
  double gap = 0.05;
  double eta0 = 0.4637;

  UnitaryFamily family() const {
    return [*this](double eta) {
      Eigen::Matrix2cd h;
      const double d = slope * (eta - eta0);
      h << d, gap / 2, gap / 2, -d;
      return FloquetOperator(FockBasis(2), oracle::expm(-1i * h.cast<cplx>()));
    };
  }
};

StateVector uniform_state(std::size_t n) {
  return StateVector(FockBasis(n), ComplexVector::Constant(static_cast<Eigen::Index>(n),
                                                           1.0 / std::sqrt(static_cast<double>(n))));
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("phase helpers") {
    CHECK(wrap_phase(std::numbers::pi) == std::numbers::pi);
    CHECK(wrap_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_phase(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
    CHECK(circular_distance(3.1, -3.1) == doctest::Approx(2 * std::numbers::pi - 6.2));
    CHECK(circular_distance(0.2, 0.5) == doctest::Approx(0.3));
    const auto g = make_grid(0.44, 0.49, 5e-4);
    CHECK(g.size() == 101);
    CHECK(g.front() == 0.44);
    CHECK(g.back() == doctest::Approx(0.49).epsilon(1e-14));
    CHECK_THROWS_AS(make_grid(0.5, 0.4, 0.01), DomainError);
  }

  TEST_CASE("free oscillator spectrum") {
    for (int q : {6, 7}) {
      const auto p = build_params(0.0, q, 0.464);
      const auto spec = diagonalize(floquet_operator(p, FockBasis(30)));
      REQUIRE(spec.phases.size() == 30);
      std::vector<int> seen(30, 0);
      for (int j = 0; j < 30; ++j) {
        const auto col = spec.eigenvectors.col(j);
        Eigen::Index k = 0;
        col.cwiseAbs().maxCoeff(&k);
        ++seen[static_cast<std::size_t>(k)];
        CHECK(std::abs(col(k) - 1.0) < 1e-12);
        CHECK(circular_distance(spec.phases[j], -p.alpha() * static_cast<double>(k)) < 1e-12);
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      const auto one = overlap_filter(spec, vacuum_state(FockBasis(30)), 1e-3);
      REQUIRE(one.size() == 1);
      CHECK(one[0].phase == 0.0);
    }
  }

  TEST_CASE("kicked spectrum contracts") {
    const auto spec = diagonalize(floquet_operator(build_params(2.0, 6, 0.464), FockBasis(300)));
    CHECK(*std::max_element(spec.residuals.begin(), spec.residuals.end()) < 1e-8);
    CHECK(spec.max_modulus_defect < 1e-8);
    CHECK(spec.orthonormality_defect < 1e-8);
    CHECK(std::is_sorted(spec.phases.begin(), spec.phases.end()));
    for (double phi : spec.phases) {
      CHECK(phi > -std::numbers::pi);
      CHECK(phi <= std::numbers::pi);
    }
    for (int par : spec.parity) CHECK((par == 0 || par == 1));

    const auto vac = vacuum_state(FockBasis(300));
    const auto ov = overlaps(spec, vac);
    double total = 0.0;
    for (double x : ov) total += x;
    CHECK(std::abs(total - 1.0) < 1e-8);

    // the two partners of the crossing near phase 1.35 are both visible
    const auto seen = overlap_filter(spec, vac, 1e-2);
    const auto near = std::count_if(seen.begin(), seen.end(), [](const FilteredLevel& l) {
      return std::abs(l.phase - 1.35) < 0.1;
    });
    CHECK(near >= 2);

    std::size_t previous = spec.phases.size();
    for (double t : {1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.2}) {
      const auto kept = overlap_filter(spec, vac, t);
      CHECK(kept.size() <= previous);
      for (const auto& l : kept) CHECK(l.overlap >= t);
      CHECK(std::is_sorted(kept.begin(), kept.end(),
                           [](const auto& a, const auto& b) { return a.phase < b.phase; }));
      previous = kept.size();
    }
    CHECK_THROWS_AS(overlap_filter(spec, vac, 1.0 + 1e-9), DomainError);
    CHECK_THROWS_AS(overlap_filter(spec, vac, 0.0), DomainError);
  }

  TEST_CASE("sweep is ordered, matches single points and is thread independent") {
    const auto grid = make_grid(0.455, 0.47, 0.0025);
    const auto one = eta_sweep(2.0, 6, FockBasis(120), grid, InitialState::vacuum(), 1e-3, 1);
    const auto three = eta_sweep(2.0, 6, FockBasis(120), grid, InitialState::vacuum(), 1e-3, 3);
    REQUIRE(one.points.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(one.points[i].eta == grid[i]);
      REQUIRE(one.points[i].levels.size() == three.points[i].levels.size());
      for (std::size_t j = 0; j < one.points[i].levels.size(); ++j) {
        CHECK(one.points[i].levels[j].phase == three.points[i].levels[j].phase);
        CHECK(one.points[i].levels[j].overlap == three.points[i].levels[j].overlap);
      }
      CHECK(std::abs(one.points[i].completeness - 1.0) < 1e-8);
    }
    const auto single =
        diagonalize(floquet_operator(build_params(2.0, 6, grid[2]), FockBasis(120)));
    const auto direct = overlap_filter(single, vacuum_state(FockBasis(120)), 1e-3);
    REQUIRE(direct.size() == one.points[2].levels.size());
    for (std::size_t j = 0; j < direct.size(); ++j)
      CHECK(direct[j].phase == one.points[2].levels[j].phase);
    CHECK(one.failed_etas().empty());
  }

  TEST_CASE("a failing point is recorded and the sweep continues") {
    const LandauZener lz;
    const auto inner = lz.family();
    const UnitaryFamily flaky = [inner](double eta) {
      if (eta > 0.45 && eta < 0.47) throw NumericError("synthetic failure");
      return inner(eta);
    };
    const auto ld = eta_sweep(flaky, {0.44, 0.46, 0.48}, uniform_state(2), 1e-3);
    CHECK(ld.failed_etas() == std::vector<double>{0.46});
    CHECK(ld.points[1].failed);
    CHECK(ld.points[1].error.find("synthetic") != std::string::npos);
    CHECK(ld.points[0].levels.size() == 2);
    CHECK(ld.points[2].levels.size() == 2);
    const auto branches = track_bands(ld);
    for (const auto& b : branches) CHECK(b.first_point() == b.last_point());
  }

  TEST_CASE("free levels form constant branches without crossings") {
    const auto family = kicked_oscillator_family(0.0, 16, FockBasis(14));
    const auto ld = eta_sweep(family, make_grid(0.4, 0.5, 0.01), uniform_state(14), 1e-3);
    const auto branches = track_bands(ld);
    CHECK(branches.size() == 14);
    for (const auto& b : branches) {
      CHECK(b.nodes.size() == ld.points.size());
      const double phi = ld.points[0].levels[b.nodes[0].level].phase;
      for (const auto& n : b.nodes) CHECK(ld.points[n.point].levels[n.level].phase == phi);
    }
    CHECK(find_avoided_crossings(ld, branches, family).empty());
  }

  TEST_CASE("synthetic Landau-Zener crossing is recovered") {
    const LandauZener lz;
    const auto family = lz.family();
    const auto ld = eta_sweep(family, make_grid(0.40, 0.52, 0.005), uniform_state(2), 1e-6);
    const auto branches = track_bands(ld);
    REQUIRE(branches.size() == 2);
    for (const auto& b : branches) CHECK(b.nodes.size() == ld.points.size());

    CrossingSearch search;
    search.refine_tol = 1e-6;
    const auto found = find_avoided_crossings(ld, branches, family, search);
    REQUIRE(found.size() == 1);
    const auto& x = found[0];
    CHECK(x.refined);
    CHECK_FALSE(x.degenerate);
    CHECK(std::abs(x.eta_center - lz.eta0) < 0.01 * lz.eta0);
    CHECK(std::abs(x.eta_center - lz.eta0) < 1e-5);
    CHECK(std::abs(x.min_gap - lz.gap) < 0.01 * lz.gap);
    CHECK(std::abs(x.phase_center) < 1e-6);
    CHECK(x.phase_a < x.phase_b);

    // adiabatic continuation keeps the ordering while the character swaps
    const std::vector<ComplexVector> pair{x.state_a, x.state_b};
    const auto left = continue_states(family, pair, x.eta_center, 0.40, 1e-3);
    const auto right = continue_states(family, pair, x.eta_center, 0.52, 1e-3);
    REQUIRE(left.size() == 2);
    CHECK(left[0].phase < left[1].phase);
    CHECK(right[0].phase < right[1].phase);
    CHECK(left[0].min_step_overlap > 0.9);
    const double first_left = std::norm(left[0].vector(0));
    const double first_right = std::norm(right[0].vector(0));
    CHECK(first_left < 0.1);
    CHECK(first_right > 0.9);
  }

  TEST_CASE("prominence and gap limits filter candidates") {
    LandauZener lz;
    lz.slope = 10.0;
    lz.gap = 0.3;
    const auto family = lz.family();
    const auto ld = eta_sweep(family, make_grid(0.40, 0.52, 0.005), uniform_state(2), 1e-6);
    const auto branches = track_bands(ld);
    CrossingSearch wide;
    wide.max_gap = 0.5;
    CHECK(find_avoided_crossings(ld, branches, family, wide).size() == 1);
    CrossingSearch narrow;
    narrow.max_gap = 0.2;
    CHECK(find_avoided_crossings(ld, branches, family, narrow).empty());
    wide.prominence = 10.0;
    CHECK(find_avoided_crossings(ld, branches, family, wide).empty());
  }

  TEST_CASE("convergence report") {
    const auto free = convergence_report(build_params(0.0, 6, 0.464), {40, 60, 80},
                                         InitialState::displaced(1.0, 0.5), 1e-3);
    REQUIRE(free.saturated_at.has_value());
    CHECK(*free.saturated_at == 40);
    for (const auto& s : free.steps) CHECK(s.max_drift < 1e-12);

    const auto kicked = convergence_report(build_params(2.0, 6, 0.464), {100, 150},
                                           InitialState::vacuum(), 1e-2);
    REQUIRE(kicked.steps.size() == 1);
    CHECK(kicked.steps[0].from == 100);
    CHECK(kicked.steps[0].to == 150);
    CHECK(kicked.steps[0].matched > 0);
    CHECK_THROWS_AS(convergence_report(build_params(2.0, 6, 0.464), {150, 100},
                                       InitialState::vacuum(), 1e-2),
                    DomainError);
  }
}
