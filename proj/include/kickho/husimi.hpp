#ifndef KICKHO_HUSIMI_HPP
#define KICKHO_HUSIMI_HPP

#include <cstddef>
#include <vector>

#include "kickho/propagation.hpp"

namespace kickho {

/// <beta|psi> with |beta> the coherent state e^{-|beta|^2/2} sum beta^n/sqrt(n!) |n>.
/// Accurate while |beta|^2 stays below about N/4; see coherent_overlap_reliable.
cplx coherent_overlap(const StateVector& state, cplx beta);

inline bool coherent_overlap_reliable(cplx beta, std::size_t basis_size) {
  return std::norm(beta) <= static_cast<double>(basis_size) / 4.0;
}

/// Node grid in (x1, x2) = (v/2eta, u/2eta) = (Re beta, Im beta); both end
/// points are nodes.
struct HusimiGrid {
  double x1_min = -5.0;
  double x1_max = 5.0;
  double x2_min = -5.0;
  double x2_max = 5.0;
  std::size_t n1 = 101;
  std::size_t n2 = 101;

  double dx1() const { return (x1_max - x1_min) / static_cast<double>(n1 - 1); }
  double dx2() const { return (x2_max - x2_min) / static_cast<double>(n2 - 1); }
  double x1(std::size_t i) const { return x1_min + static_cast<double>(i) * dx1(); }
  double x2(std::size_t j) const { return x2_min + static_cast<double>(j) * dx2(); }
  /// Throws DomainError unless bounds are finite, ordered and n1, n2 >= 2.
  void validate() const;
};

/// Q(beta) = |<beta|psi>|^2 / pi on a grid, row-major in (i1, i2).
class HusimiField {
 public:
  HusimiField(HusimiGrid grid, std::vector<double> values);

  const HusimiGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value(std::size_t i1, std::size_t i2) const { return values_.at(i1 * grid_.n2 + i2); }
  double cell_area() const { return grid_.dx1() * grid_.dx2(); }
  /// Riemann sum times cell area; close to 1 when the grid covers the state.
  double total_mass() const;

 private:
  HusimiGrid grid_;
  std::vector<double> values_;
};

HusimiField husimi_grid(const StateVector& state, const HusimiGrid& grid, unsigned threads = 1);

/// Share of the grid's Q mass with |beta| <= radius. Throws DomainError when
/// the disc is not contained in the grid.
double localization_fraction(const HusimiField& field, double radius);

/// Share of the grid's Q mass with |beta| > radius (no coverage requirement).
double mass_beyond(const HusimiField& field, double radius);

struct LocalizationClassifier {
  double radius = 1.5;
  /// A state counts as localized when localization_fraction(radius) exceeds this.
  double threshold = 0.1;
};

bool is_localized(const HusimiField& field, const LocalizationClassifier& classifier);

/// Square grid [-extent, extent]^2 with the given node spacing.
HusimiGrid square_grid(double extent, double spacing);

}  // namespace kickho

#endif
