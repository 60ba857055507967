#ifndef KICKHO_PROPAGATION_HPP
#define KICKHO_PROPAGATION_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kickho/fock.hpp"

namespace kickho {

inline constexpr double kNormTolerance = 1e-8;
inline constexpr double kLeakageTolerance = 1e-6;
inline constexpr double kDoublingTolerance = 1e-6;
inline constexpr double kLeakageFraction = 0.1;

/// Normalized amplitudes in a Fock basis; the norm is checked against
/// kNormTolerance on construction.
class StateVector {
 public:
  StateVector(FockBasis basis, ComplexVector amplitudes);

  const FockBasis& basis() const noexcept { return basis_; }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t size() const noexcept { return basis_.size(); }
  double norm() const { return amplitudes_.norm(); }

 private:
  FockBasis basis_;
  ComplexVector amplitudes_;
};

/// How an initial state is specified in configs and sweeps. Displaced states
/// are centred at beta = x1 + i x2, i.e. (x1, x2) = (v/2eta, u/2eta).
struct InitialState {
  enum class Kind { Vacuum, Displaced };
  Kind kind = Kind::Vacuum;
  double x1 = 0.0;
  double x2 = 0.0;

  static InitialState vacuum() { return {}; }
  static InitialState displaced(double x1, double x2) { return {Kind::Displaced, x1, x2}; }
  std::string describe() const;
  /// Expected <a^dag a>, used to size the starting basis.
  double mean_number() const { return kind == Kind::Vacuum ? 0.0 : x1 * x1 + x2 * x2; }
};

StateVector vacuum_state(FockBasis basis);

/// Coherent state |beta>, beta = x1 + i x2, truncated and renormalized.
/// Throws InsufficientBasisError if |beta|^2 > N/4 or the truncated norm
/// deficit exceeds kNormTolerance.
StateVector displaced_vacuum(FockBasis basis, double x1, double x2);

StateVector make_state(const InitialState& init, FockBasis basis);

/// <a|b>
cplx overlap(const StateVector& a, const StateVector& b);

/// Throws DimensionError on basis mismatch and NumericError if the norm
/// drifts by more than kNormTolerance.
StateVector apply_floquet(const StateVector& state, const FloquetOperator& u);

/// <a^dag a> + 1/2, the oscillator energy in units of hbar*nu.
double mean_excitation(const StateVector& state);

/// Population in the top ceil(top_fraction * N) levels.
double leakage(const StateVector& state, double top_fraction);

struct HeatingCurve {
  SystemParams params;
  std::size_t basis_size = 0;
  std::int64_t n_kicks = 0;
  std::vector<double> energies;        // n_kicks + 1 entries, hbar*nu units
  std::vector<double> leakage_series;  // top-decile population per kick
  double max_leakage = 0.0;
  /// False once leakage exceeded kLeakageTolerance at any kick.
  bool converged = true;
};

/// Energies are recorded after each full cycle (kick, then free rotation).
HeatingCurve heating_curve(const FloquetOperator& u, std::int64_t n_kicks,
                           const StateVector& initial);
HeatingCurve heating_curve(const SystemParams& params, FockBasis basis, std::int64_t n_kicks,
                           const StateVector& initial);

struct BasisPolicy {
  std::size_t start = 256;
  std::size_t cap = 2048;
};

struct ConvergedHeatingCurve {
  HeatingCurve curve;                    // at the accepted basis size
  std::vector<std::size_t> tried;        // basis sizes evaluated, ascending
  double doubling_change = 0.0;          // max relative change against 2N
  bool converged = false;
};

/// Relative max-norm difference between two energy series.
double relative_change(const std::vector<double>& a, const std::vector<double>& b);

/// Doubles N until the curve at N keeps leakage below kLeakageTolerance and
/// agrees with the curve at 2N to kDoublingTolerance, or 2N would exceed
/// the cap. The starting size is raised to at least 4 * (mean number + 1)
/// and to what the initial state needs.
ConvergedHeatingCurve converged_heating_curve(const SystemParams& params, std::int64_t n_kicks,
                                              const InitialState& initial,
                                              const BasisPolicy& policy = {});

}  // namespace kickho

#endif
