#include "kickho/husimi.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kickho/error.hpp"
#include "kickho/parallel.hpp"

namespace kickho {

cplx coherent_overlap(const StateVector& state, cplx beta) {
  const auto& c = state.amplitudes();
  const double b2 = std::norm(beta);
  const cplx step = std::conj(beta);
  cplx sum = 0.0;
  if (b2 < 1400.0) {
    // Poisson amplitudes never exceed 1, so the forward product cannot overflow.
    cplx t = std::exp(-0.5 * b2);
    sum += t * c(0);
    for (Eigen::Index n = 1; n < c.size(); ++n) {
      t *= step / std::sqrt(static_cast<double>(n));
      sum += t * c(n);
    }
    return sum;
  }
  // exp(-|beta|^2/2) underflows: build each term from its logarithm.
  const double log_r = std::log(std::abs(beta));
  const double theta = std::arg(beta);
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const double nd = static_cast<double>(n);
    const double log_mag = -0.5 * b2 + nd * log_r - 0.5 * std::lgamma(nd + 1.0);
    sum += std::polar(std::exp(log_mag), -nd * theta) * c(n);
  }
  return sum;
}

void HusimiGrid::validate() const {
  const bool finite = std::isfinite(x1_min) && std::isfinite(x1_max) && std::isfinite(x2_min) &&
                      std::isfinite(x2_max);
  if (!finite || !(x1_max > x1_min) || !(x2_max > x2_min))
    throw DomainError("Husimi grid bounds must be finite with max > min");
  if (n1 < 2 || n2 < 2) throw DomainError("Husimi grid needs at least two nodes per axis");
}

HusimiField::HusimiField(HusimiGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.n1 * grid_.n2)
    throw DimensionError("Husimi values do not match grid size");
}

double HusimiField::total_mass() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * cell_area();
}

HusimiField husimi_grid(const StateVector& state, const HusimiGrid& grid, unsigned threads) {
  grid.validate();
  std::vector<double> values(grid.n1 * grid.n2);
  parallel_for(grid.n1, threads, [&](std::size_t i) {
    const double x1 = grid.x1(i);
    for (std::size_t j = 0; j < grid.n2; ++j) {
      const cplx a = coherent_overlap(state, cplx(x1, grid.x2(j)));
      values[i * grid.n2 + j] = std::norm(a) / std::numbers::pi;
    }
  });
  return HusimiField(grid, std::move(values));
}

namespace {

struct MassSplit {
  double inside = 0.0;
  double total = 0.0;
};

MassSplit split_mass(const HusimiField& field, double radius) {
  const auto& g = field.grid();
  MassSplit out;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < g.n1; ++i) {
    const double x1 = g.x1(i);
    for (std::size_t j = 0; j < g.n2; ++j) {
      const double x2 = g.x2(j);
      const double q = field.value(i, j);
      out.total += q;
      if (x1 * x1 + x2 * x2 <= r2) out.inside += q;
    }
  }
  return out;
}

}  // namespace

double localization_fraction(const HusimiField& field, double radius) {
  if (!(radius > 0.0)) throw DomainError("localization radius must be > 0");
  const auto& g = field.grid();
  if (g.x1_min > -radius || g.x1_max < radius || g.x2_min > -radius || g.x2_max < radius) {
    std::ostringstream os;
    os << "grid does not cover the disc of radius " << radius;
    throw DomainError(os.str());
  }
  const auto m = split_mass(field, radius);
  if (!(m.total > 0.0)) throw NumericError("Husimi field carries no mass");
  return m.inside / m.total;
}

double mass_beyond(const HusimiField& field, double radius) {
  if (!(radius >= 0.0)) throw DomainError("radius must be >= 0");
  const auto m = split_mass(field, radius);
  if (!(m.total > 0.0)) throw NumericError("Husimi field carries no mass");
  return (m.total - m.inside) / m.total;
}

bool is_localized(const HusimiField& field, const LocalizationClassifier& classifier) {
  return localization_fraction(field, classifier.radius) > classifier.threshold;
}

HusimiGrid square_grid(double extent, double spacing) {
  if (!(extent > 0.0) || !(spacing > 0.0)) throw DomainError("grid extent and spacing must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(2.0 * extent / spacing)) + 1;
  return HusimiGrid{-extent, extent, -extent, extent, n, n};
}

}  // namespace kickho
