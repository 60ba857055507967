#include "kickho/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kickho/error.hpp"
#include "kickho/parallel.hpp"

namespace kickho {

namespace {

// Neumaier-compensated accumulator; results are independent of how the
// ensemble is split as long as chunks are combined in a fixed order.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

constexpr std::size_t kEnsembleChunk = 512;

}  // namespace

PhasePoint::PhasePoint(double v, double u) : v_(v), u_(u) {
  if (!std::isfinite(v) || !std::isfinite(u)) {
    std::ostringstream os;
    os << "phase point must be finite (got v=" << v << ", u=" << u << ")";
    throw DomainError(os.str());
  }
}

std::optional<PhasePoint> try_web_map_step(const PhasePoint& pt,
                                           const SystemParams& params) noexcept {
  const double alpha = params.alpha();
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const double v = pt.v();
  const double kicked_u = pt.u() + params.K() * std::sin(v);
  const double v_next = v * c + kicked_u * s;
  const double u_next = -v * s + kicked_u * c;
  if (!std::isfinite(v_next) || !std::isfinite(u_next)) return std::nullopt;
  return PhasePoint(v_next, u_next);
}

PhasePoint web_map_step(const PhasePoint& pt, const SystemParams& params) {
  auto next = try_web_map_step(pt, params);
  if (!next) throw NumericError("web map step produced a non-finite point");
  return *next;
}

Trajectory iterate_trajectory(const PhasePoint& start, const SystemParams& params,
                              std::int64_t n_kicks) {
  if (n_kicks < 0) throw DomainError("n_kicks must be >= 0");
  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(n_kicks) + 1);
  traj.points.push_back(start);
  for (std::int64_t i = 0; i < n_kicks; ++i) {
    auto next = try_web_map_step(traj.points.back(), params);
    if (!next) {
      traj.escaped = true;
      traj.escaped_at = traj.points.size() - 1;
      break;
    }
    traj.points.push_back(*next);
  }
  return traj;
}

Ensemble::Ensemble(std::vector<PhasePoint> points, std::uint64_t seed)
    : points_(std::move(points)), seed_(seed) {
  if (points_.empty()) throw DomainError("ensemble must contain at least one point");
}

Ensemble sample_vacuum_ensemble(double eta, std::size_t size, std::uint64_t seed) {
  if (!std::isfinite(eta) || eta <= 0.0) throw DomainError("eta must be finite and > 0");
  if (size == 0) throw DomainError("ensemble size must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, eta);
  std::vector<PhasePoint> points;
  points.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double v = gauss(rng);
    const double u = gauss(rng);
    points.emplace_back(v, u);
  }
  return Ensemble(std::move(points), seed);
}

double scaled_energy(const PhasePoint& pt, double eta) {
  if (!(eta > 0.0)) throw DomainError("eta must be > 0");
  return (pt.v() * pt.v() + pt.u() * pt.u()) / (4.0 * eta * eta);
}

ClassicalHeatingCurve ensemble_heating_curve(const Ensemble& ensemble, const SystemParams& params,
                                             std::int64_t n_kicks, unsigned threads) {
  if (n_kicks < 0) throw DomainError("n_kicks must be >= 0");
  const std::size_t length = static_cast<std::size_t>(n_kicks) + 1;
  const auto& points = ensemble.points();
  const std::size_t n_chunks = (points.size() + kEnsembleChunk - 1) / kEnsembleChunk;
  const double eta = params.eta();

  struct ChunkResult {
    std::vector<CompensatedSum> sums;
    std::size_t kept = 0;
    std::size_t escaped = 0;
  };
  std::vector<ChunkResult> chunks(n_chunks);

  parallel_for(n_chunks, threads, [&](std::size_t c) {
    ChunkResult& out = chunks[c];
    out.sums.assign(length, CompensatedSum{});
    std::vector<double> energies(length);
    const std::size_t begin = c * kEnsembleChunk;
    const std::size_t end = std::min(points.size(), begin + kEnsembleChunk);
    for (std::size_t p = begin; p < end; ++p) {
      PhasePoint pt = points[p];
      energies[0] = scaled_energy(pt, eta);
      bool escaped = false;
      for (std::size_t k = 1; k < length; ++k) {
        auto next = try_web_map_step(pt, params);
        if (!next) {
          escaped = true;
          break;
        }
        pt = *next;
        energies[k] = scaled_energy(pt, eta);
        if (!std::isfinite(energies[k])) {
          escaped = true;
          break;
        }
      }
      if (escaped) {
        ++out.escaped;
        continue;
      }
      ++out.kept;
      for (std::size_t k = 0; k < length; ++k) out.sums[k].add(energies[k]);
    }
  });

  ClassicalHeatingCurve curve;
  curve.energies.assign(length, 0.0);
  std::size_t kept = 0;
  std::vector<CompensatedSum> total(length);
  for (const auto& chunk : chunks) {
    kept += chunk.kept;
    curve.escaped += chunk.escaped;
    for (std::size_t k = 0; k < length; ++k) total[k].add(chunk.sums[k].value());
  }
  if (kept == 0) throw NumericError("every ensemble member escaped to non-finite values");
  for (std::size_t k = 0; k < length; ++k)
    curve.energies[k] = total[k].value() / static_cast<double>(kept);
  return curve;
}

OccupancyHistogram::OccupancyHistogram(const HistogramGrid& grid) : grid_(grid) {
  const bool finite = std::isfinite(grid.v_min) && std::isfinite(grid.v_max) &&
                      std::isfinite(grid.u_min) && std::isfinite(grid.u_max);
  if (!finite || !(grid.v_max > grid.v_min) || !(grid.u_max > grid.u_min))
    throw DomainError("histogram bounds must be finite with max > min");
  if (grid.nv == 0 || grid.nu == 0) throw DomainError("histogram bin counts must be >= 1");
  counts_.assign(grid.nv * grid.nu, 0);
}

void OccupancyHistogram::add(const PhasePoint& pt) {
  ++recorded_;
  const double fv = (pt.v() - grid_.v_min) / (grid_.v_max - grid_.v_min);
  const double fu = (pt.u() - grid_.u_min) / (grid_.u_max - grid_.u_min);
  if (fv < 0.0 || fv > 1.0 || fu < 0.0 || fu > 1.0) {
    ++overflow_;
    return;
  }
  // The upper edge belongs to the last bin.
  const auto iv = std::min(grid_.nv - 1, static_cast<std::size_t>(fv * static_cast<double>(grid_.nv)));
  const auto iu = std::min(grid_.nu - 1, static_cast<std::size_t>(fu * static_cast<double>(grid_.nu)));
  ++counts_[iv * grid_.nu + iu];
}

std::size_t OccupancyHistogram::occupied_cells() const {
  return static_cast<std::size_t>(
      std::count_if(counts_.begin(), counts_.end(), [](std::uint64_t c) { return c > 0; }));
}

double OccupancyHistogram::v_center(std::size_t iv) const {
  const double w = (grid_.v_max - grid_.v_min) / static_cast<double>(grid_.nv);
  return grid_.v_min + (static_cast<double>(iv) + 0.5) * w;
}

double OccupancyHistogram::u_center(std::size_t iu) const {
  const double w = (grid_.u_max - grid_.u_min) / static_cast<double>(grid_.nu);
  return grid_.u_min + (static_cast<double>(iu) + 0.5) * w;
}

OccupancyHistogram occupancy_histogram(std::span<const PhasePoint> trajectory,
                                       const HistogramGrid& grid) {
  OccupancyHistogram hist(grid);
  for (const auto& pt : trajectory) hist.add(pt);
  return hist;
}

}  // namespace kickho
