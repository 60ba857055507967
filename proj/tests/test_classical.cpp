#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

#include "doctest.h"
#include "kickho/classical.hpp"
#include "kickho/error.hpp"

using namespace kickho;

TEST_SUITE("classical") {
  TEST_CASE("zero kicks returns the start") {
    const auto t = iterate_trajectory({0.3, -0.2}, build_params(2.0, 6, 0.464), 0);
    REQUIRE(t.points.size() == 1);
    CHECK(t.points[0] == PhasePoint(0.3, -0.2));
    CHECK_FALSE(t.escaped);
    CHECK_THROWS_AS(iterate_trajectory({0, 0}, build_params(2.0, 6, 0.464), -1), DomainError);
  }

  TEST_CASE("non-finite points are rejected") {
    CHECK_THROWS_AS(PhasePoint(std::nan(""), 0.0), DomainError);
    CHECK_THROWS_AS(PhasePoint(0.0, INFINITY), DomainError);
  }

  TEST_CASE("free rotation closes after q steps") {
    const auto p6 = build_params(0.0, 6, 0.464);
    const auto t = iterate_trajectory({1.0, 0.0}, p6, 6);
    CHECK(std::abs(t.points[6].v() - 1.0) < 1e-10);
    CHECK(std::abs(t.points[6].u()) < 1e-10);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    for (int q : {3, 4, 5, 6, 7}) {
      const auto p = build_params(0.0, q, 0.3);
      for (int trial = 0; trial < 20; ++trial) {
        const PhasePoint start(coord(rng), coord(rng));
        const auto path = iterate_trajectory(start, p, q);
        CHECK(std::abs(path.points.back().v() - start.v()) < 1e-10);
        CHECK(std::abs(path.points.back().u() - start.u()) < 1e-10);
        for (const auto& pt : path.points) {
          const double e0 = scaled_energy(start, 0.3);
          CHECK(std::abs(scaled_energy(pt, 0.3) - e0) <= 1e-12 * e0);
        }
      }
    }
  }

  TEST_CASE("map is area preserving") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-30.0, 30.0);
    const double h = 1e-6;
    for (int q : {4, 5, 6}) {
      const auto p = build_params(2.0, q, 0.464);
      for (int trial = 0; trial < 100; ++trial) {
        const double v = coord(rng);
        const double u = coord(rng);
        auto f = [&](double a, double b) { return web_map_step({a, b}, p); };
        const auto vp = f(v + h, u), vm = f(v - h, u);
        const auto up = f(v, u + h), um = f(v, u - h);
        const double j11 = (vp.v() - vm.v()) / (2 * h);
        const double j21 = (vp.u() - vm.u()) / (2 * h);
        const double j12 = (up.v() - um.v()) / (2 * h);
        const double j22 = (up.u() - um.u()) / (2 * h);
        CHECK(std::abs(j11 * j22 - j12 * j21 - 1.0) < 1e-6);
      }
    }
  }

  TEST_CASE("scaled energy") {
    CHECK(scaled_energy({0.0, 0.0}, 0.464) == 0.0);
    for (double eta : {0.1, 0.464, 2.0}) CHECK(scaled_energy({2 * eta, 0.0}, eta) == doctest::Approx(1.0));
  }

  TEST_CASE("vacuum ensemble moments and determinism") {
    const auto a = sample_vacuum_ensemble(0.464, 100000, 42);
    const auto b = sample_vacuum_ensemble(0.464, 100000, 42);
    CHECK(a.points() == b.points());
    CHECK(sample_vacuum_ensemble(0.464, 10, 43).points() != sample_vacuum_ensemble(0.464, 10, 42).points());
    double sv = 0.0, sv2 = 0.0, su2 = 0.0, e = 0.0;
    for (const auto& pt : a.points()) {
      sv += pt.v();
      sv2 += pt.v() * pt.v();
      su2 += pt.u() * pt.u();
      e += scaled_energy(pt, 0.464);
    }
    const double n = static_cast<double>(a.size());
    const double var = sv2 / n - (sv / n) * (sv / n);
    const double target = 0.464 * 0.464;
    CHECK(std::abs(var - target) <= 0.03 * target);
    CHECK(std::abs(su2 / n - target) <= 0.03 * target);
    // mean energy of two squared unit Gaussians over 4: 0.5 with std 0.5/sqrt(n)
    CHECK(std::abs(e / n - 0.5) < 5.0 * 0.5 / std::sqrt(n));
    CHECK_THROWS_AS(sample_vacuum_ensemble(0.464, 0, 1), DomainError);
  }

  TEST_CASE("ensemble heating curve") {
    const auto ens = sample_vacuum_ensemble(0.464, 2000, 5);
    const auto free = ensemble_heating_curve(ens, build_params(0.0, 6, 0.464), 50);
    REQUIRE(free.energies.size() == 51);
    for (double x : free.energies) CHECK(x == doctest::Approx(free.energies[0]).epsilon(1e-12));
    CHECK(std::abs(free.energies[0] - 0.5) < 0.05);

    const auto kicked = ensemble_heating_curve(ens, build_params(2.0, 6, 0.464), 100, 1);
    const auto parallel = ensemble_heating_curve(ens, build_params(2.0, 6, 0.464), 100, 3);
    CHECK(kicked.energies == parallel.energies);
    CHECK(kicked.energies.size() == 101);
    CHECK(kicked.escaped == 0);
  }

  TEST_CASE("occupancy histogram") {
    HistogramGrid g{-1.0, 1.0, -1.0, 1.0, 5, 5};
    const std::vector<PhasePoint> none;
    const auto empty = occupancy_histogram(none, g);
    for (auto c : empty.counts()) CHECK(c == 0);

    const std::vector<PhasePoint> centre{{0.0, 0.0}};
    const auto one = occupancy_histogram(centre, g);
    CHECK(one.count(2, 2) == 1);
    CHECK(one.occupied_cells() == 1);

    const auto traj = iterate_trajectory({0.005, 0.005}, build_params(2.0, 6, 0.464), 40000);
    HistogramGrid wide{-60, 60, -60, 60, 120, 120};
    const auto h = occupancy_histogram(traj.points, wide);
    std::uint64_t sum = 0;
    for (auto c : h.counts()) sum += c;
    CHECK(sum + h.overflow() == traj.points.size());
    CHECK(h.recorded() == traj.points.size());
    bool beyond_cell = false;
    for (std::size_t i = 0; i < wide.nv; ++i) {
      for (std::size_t j = 0; j < wide.nu; ++j) {
        if (h.count(i, j) > 0 && (std::abs(h.v_center(i)) > 2 * std::numbers::pi ||
                                  std::abs(h.u_center(j)) > 2 * std::numbers::pi)) {
          beyond_cell = true;
        }
      }
    }
    CHECK(beyond_cell);
  }

  TEST_CASE("square web occupancy is symmetric under quarter turns") {
    const auto p = build_params(1.0, 4, 0.5);
    const auto traj = iterate_trajectory({std::numbers::pi, 0.01}, p, 200000);
    // one cell per web period, origin at a cell centre
    constexpr std::size_t n = 31;
    const double ext = 31.0 * std::numbers::pi;
    HistogramGrid g{-ext, ext, -ext, ext, n, n};
    const auto h = occupancy_histogram(traj.points, g);
    std::set<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (h.count(i, j) > 0) cells.emplace(i, j);
    REQUIRE(cells.size() > 20);
    std::size_t hit = 0;
    for (const auto& [i, j] : cells) {
      // (v, u) -> (-u, v)
      if (cells.count({n - 1 - j, i})) ++hit;
    }
    CHECK(static_cast<double>(hit) >= 0.9 * static_cast<double>(cells.size()));
  }
}
