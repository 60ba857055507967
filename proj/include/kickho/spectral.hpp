#ifndef KICKHO_SPECTRAL_HPP
#define KICKHO_SPECTRAL_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kickho/fock.hpp"
#include "kickho/husimi.hpp"
#include "kickho/propagation.hpp"

namespace kickho {

inline constexpr double kResidualTolerance = 1e-8;
inline constexpr double kDegeneracyGap = 1e-10;
inline constexpr double kContinuationOverlap = 0.5;
inline constexpr double kSaturationDrift = 1e-6;

/// Maps an angle to (-pi, pi].
double wrap_phase(double phi);

/// Distance between two angles on the circle, in [0, pi].
double circular_distance(double a, double b);

/// Eigenphases phi_j with U e_j = exp(+i phi_j) e_j, sorted ascending.
struct QuasienergySpectrum {
  FockBasis basis;
  std::vector<double> phases;
  ComplexMatrix eigenvectors;      // column j belongs to phases[j]
  std::vector<double> residuals;   // |U e_j - exp(i phi_j) e_j|
  std::vector<int> parity;         // 0 even, 1 odd, -1 no definite parity
  double max_modulus_defect = 0.0;
  double orthonormality_defect = 0.0;
};

/// Complete eigendecomposition through the complex Schur form, one parity
/// block at a time when the operator allows it. Throws NumericError (with
/// eta, K, q, N when known) if any residual or eigenvalue modulus misses
/// kResidualTolerance.
QuasienergySpectrum diagonalize(const FloquetOperator& u);

/// |<e_j|psi0>|^2 for every eigenstate, in spectrum order.
std::vector<double> overlaps(const QuasienergySpectrum& spectrum, const StateVector& psi0);

struct FilteredLevel {
  double phase = 0.0;
  double overlap = 0.0;  // |<e|psi0>|^2
  std::size_t index = 0; // column in the source spectrum
  ComplexVector vector;
};

/// Levels with overlap >= threshold, sorted by phase. Throws DomainError
/// unless 0 < threshold < 1.
std::vector<FilteredLevel> overlap_filter(const QuasienergySpectrum& spectrum,
                                          const StateVector& psi0, double threshold);

/// One-parameter family of Floquet operators sharing a basis.
using UnitaryFamily = std::function<FloquetOperator(double eta)>;

UnitaryFamily kicked_oscillator_family(double K, int q, FockBasis basis);

struct SweepPoint {
  double eta = 0.0;
  std::vector<FilteredLevel> levels;
  double completeness = 0.0;  // sum over all eigenstates of |<e|psi0>|^2
  bool failed = false;
  std::string error;
};

struct LevelDynamics {
  std::vector<double> eta_grid;
  std::vector<SweepPoint> points;  // same order as eta_grid
  double threshold = 0.0;
  StateVector psi0;
  std::string psi0_description;

  std::vector<double> failed_etas() const;
};

/// Diagonalizes and filters every grid point independently. A failing point
/// is recorded and the sweep continues. Output order follows the grid, and
/// BLAS runs single-threaded inside the sweep, so results are bitwise
/// independent of `threads`.
LevelDynamics eta_sweep(const UnitaryFamily& family, const std::vector<double>& eta_grid,
                        const StateVector& psi0, double threshold, unsigned threads = 1,
                        std::string psi0_description = {});

LevelDynamics eta_sweep(double K, int q, FockBasis basis, const std::vector<double>& eta_grid,
                        const InitialState& psi0, double threshold, unsigned threads = 1);

/// Evenly spaced grid from `from` to `to` inclusive (up to rounding of the last step).
std::vector<double> make_grid(double from, double to, double step);

struct BranchNode {
  std::size_t point = 0;         // index into LevelDynamics::points
  std::size_t level = 0;         // first level of the (possibly merged) group
  std::size_t multiplicity = 1;  // levels merged as exactly degenerate
};

struct Branch {
  std::vector<BranchNode> nodes;  // consecutive sweep points
  /// Started because the best continuation overlap was below
  /// kContinuationOverlap while still non-negligible.
  bool ambiguous_start = false;

  std::size_t first_point() const { return nodes.front().point; }
  std::size_t last_point() const { return nodes.back().point; }
};

/// Links levels at neighbouring grid points by eigenvector overlap: pairs are
/// taken greedily in order of decreasing |<e(eta_i)|e(eta_i+1)>| and only
/// accepted above kContinuationOverlap. Levels closer than kDegeneracyGap are
/// tracked as one group. Failed sweep points end every branch.
std::vector<Branch> track_bands(const LevelDynamics& dynamics);

struct CrossingSearch {
  double refine_tol = 1e-5;
  /// The gap must grow to at least prominence * minimum on both sides.
  double prominence = 2.0;
  double max_gap = 0.25;
  /// Both partners need this overlap with psi0 at the grid minimum.
  double min_partner_overlap = 0.0;
  bool refine = true;
  unsigned threads = 1;
};

struct AvoidedCrossing {
  double eta_center = 0.0;
  double phase_center = 0.0;  // circular mean of the two phases at closest approach
  double min_gap = 0.0;
  std::size_t branch_a = 0;
  std::size_t branch_b = 0;
  double phase_a = 0.0;       // lower partner at the centre
  double phase_b = 0.0;       // upper partner at the centre
  double overlap_a = 0.0;     // |<partner|psi0>|^2 at the centre
  double overlap_b = 0.0;
  ComplexVector state_a;
  ComplexVector state_b;
  /// Branch states at the grid point of smallest gap, ordered like state_a/state_b.
  double eta_tracked = 0.0;
  ComplexVector tracked_a;
  ComplexVector tracked_b;
  bool refined = false;       // golden-section search converged inside its bracket
  bool degenerate = false;    // gap below kDegeneracyGap: not an avoided crossing
  double subspace_weight = 1.0;
};

/// Local minima of the circular gap between every pair of branches, refined
/// by golden-section search in eta (re-diagonalizing `family`). The two states
/// followed during refinement are those with the largest weight in the span
/// of the grid-point partners.
std::vector<AvoidedCrossing> find_avoided_crossings(const LevelDynamics& dynamics,
                                                    const std::vector<Branch>& branches,
                                                    const UnitaryFamily& family,
                                                    const CrossingSearch& search = {});

struct ContinuedState {
  double eta = 0.0;
  double phase = 0.0;
  ComplexVector vector;
  double min_step_overlap = 1.0;  // weakest link along the path
};

/// Follows eigenstates from eta_from to eta_to in steps no larger than
/// max_step, each time picking the eigenvector with the largest overlap with
/// the previous one (distinct states, greedy).
std::vector<ContinuedState> continue_states(const UnitaryFamily& family,
                                            const std::vector<ComplexVector>& states,
                                            double eta_from, double eta_to, double max_step);

struct PartnerProfile {
  double eta = 0.0;
  double phase = 0.0;
  double localization = 0.0;  // Husimi mass fraction within the classifier radius
  double outer_mass = 0.0;    // Husimi mass fraction beyond outer_radius
  double psi0_overlap = 0.0;
  bool localized = false;
  double min_step_overlap = 1.0;
  ComplexVector vector;
};

struct ClassificationOptions {
  double max_step = 2.5e-4;
  LocalizationClassifier classifier{};
  double outer_radius = 3.0;
  double grid_extent = 14.0;
  double grid_spacing = 0.1;
  unsigned threads = 1;
};

struct CrossingClassification {
  PartnerProfile a_left, b_left, a_right, b_right;
  /// The localization ordering of the two partners differs between the ends.
  bool exchanged = false;
};

/// Continues both tracked branch states of a crossing from eta_tracked to
/// eta_left and eta_right and characterizes them by their Husimi functions.
CrossingClassification classify_crossing(const AvoidedCrossing& crossing,
                                         const UnitaryFamily& family, const StateVector& psi0,
                                         double eta_left, double eta_right,
                                         const ClassificationOptions& options = {});

struct ConvergenceStep {
  std::size_t from = 0;
  std::size_t to = 0;
  double max_drift = 0.0;
  std::size_t matched = 0;
  double min_match_overlap = 1.0;
};

struct ConvergenceReport {
  std::vector<std::size_t> sizes;
  std::vector<ConvergenceStep> steps;
  std::optional<std::size_t> saturated_at;
  /// For reports on fixed reference states: the matched phase per size.
  std::vector<std::vector<double>> tracked_phases;
};

/// Matches the filtered levels at each size to the eigenvectors at the next
/// size by overlap on the common leading subspace and records the largest
/// phase drift. Saturated at the first size whose drift is below
/// kSaturationDrift.
ConvergenceReport convergence_report(const SystemParams& params,
                                     const std::vector<std::size_t>& sizes,
                                     const InitialState& psi0, double threshold);

/// Same, but every size is matched against the fixed `references`.
ConvergenceReport convergence_report(const SystemParams& params,
                                     const std::vector<std::size_t>& sizes,
                                     const std::vector<ComplexVector>& references);

}  // namespace kickho

#endif
