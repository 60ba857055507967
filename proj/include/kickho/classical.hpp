#ifndef KICKHO_CLASSICAL_HPP
#define KICKHO_CLASSICAL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kickho/params.hpp"

namespace kickho {

// Scaled classical coordinates v = k x, u = k p / (m nu).
class PhasePoint {
 public:
  /// Throws DomainError on NaN or infinite coordinates.
  PhasePoint(double v, double u);
  PhasePoint() : PhasePoint(0.0, 0.0) {}

  double v() const noexcept { return v_; }
  double u() const noexcept { return u_; }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

 private:
  double v_;
  double u_;
};

/// One stroboscopic period: kick u += K sin v, then rotate by alpha.
/// Returns nullopt if the image is not finite.
std::optional<PhasePoint> try_web_map_step(const PhasePoint& pt, const SystemParams& params) noexcept;

/// Total on finite images; throws NumericError if the step overflows.
PhasePoint web_map_step(const PhasePoint& pt, const SystemParams& params);

struct Trajectory {
  std::vector<PhasePoint> points;
  // Set when the orbit left the finite range; points.back() is then the last
  // finite iterate and escaped_at its index.
  bool escaped = false;
  std::size_t escaped_at = 0;
};

Trajectory iterate_trajectory(const PhasePoint& start, const SystemParams& params,
                              std::int64_t n_kicks);

class Ensemble {
 public:
  Ensemble(std::vector<PhasePoint> points, std::uint64_t seed);

  const std::vector<PhasePoint>& points() const noexcept { return points_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<PhasePoint> points_;
  std::uint64_t seed_;
};

/// Gaussian cloud with the vacuum's second moments: std eta in v and u.
Ensemble sample_vacuum_ensemble(double eta, std::size_t size, std::uint64_t seed);

/// Oscillator energy in units of hbar*nu: (v^2 + u^2) / (4 eta^2).
double scaled_energy(const PhasePoint& pt, double eta);

struct ClassicalHeatingCurve {
  std::vector<double> energies;  // length n_kicks + 1
  std::size_t escaped = 0;       // points dropped from the mean after escaping
};

/// Ensemble-averaged scaled energy after each kick. Escaped points are
/// excluded from every entry. Summation order is fixed, so results do not
/// depend on the worker count.
ClassicalHeatingCurve ensemble_heating_curve(const Ensemble& ensemble, const SystemParams& params,
                                             std::int64_t n_kicks, unsigned threads = 1);

struct HistogramGrid {
  double v_min = -1.0;
  double v_max = 1.0;
  double u_min = -1.0;
  double u_max = 1.0;
  std::size_t nv = 1;
  std::size_t nu = 1;
};

class OccupancyHistogram {
 public:
  /// Throws DomainError on non-finite or empty bounds, or zero bin counts.
  explicit OccupancyHistogram(const HistogramGrid& grid);

  void add(const PhasePoint& pt);

  const HistogramGrid& grid() const noexcept { return grid_; }
  /// Row-major, index iv * nu + iu.
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t count(std::size_t iv, std::size_t iu) const { return counts_.at(iv * grid_.nu + iu); }
  std::uint64_t overflow() const noexcept { return overflow_; }
  std::uint64_t recorded() const noexcept { return recorded_; }
  std::size_t occupied_cells() const;

  double v_center(std::size_t iv) const;
  double u_center(std::size_t iu) const;

 private:
  HistogramGrid grid_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t overflow_ = 0;
  std::uint64_t recorded_ = 0;
};

OccupancyHistogram occupancy_histogram(std::span<const PhasePoint> trajectory,
                                       const HistogramGrid& grid);

}  // namespace kickho

#endif
