#include "kickho/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kickho/error.hpp"

namespace kickho {

StateVector::StateVector(FockBasis basis, ComplexVector amplitudes)
    : basis_(basis), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(basis_.size()))
    throw DimensionError("state amplitudes do not match basis size");
  const double n = amplitudes_.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "state norm " << n << " differs from 1 by more than " << kNormTolerance;
    throw NumericError(os.str());
  }
}

std::string InitialState::describe() const {
  if (kind == Kind::Vacuum) return "vacuum";
  std::ostringstream os;
  os.precision(17);
  os << "displaced " << x1 << " " << x2;
  return os.str();
}

StateVector vacuum_state(FockBasis basis) {
  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(basis.size()));
  amps(0) = 1.0;
  return StateVector(basis, std::move(amps));
}

StateVector displaced_vacuum(FockBasis basis, double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) throw DomainError("displacement must be finite");
  const cplx beta(x1, x2);
  const double b2 = std::norm(beta);
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (b2 > static_cast<double>(basis.size()) / 4.0) {
    std::ostringstream os;
    os << "insufficient basis: |beta|^2 = " << b2 << " exceeds N/4 = "
       << static_cast<double>(basis.size()) / 4.0;
    throw InsufficientBasisError(os.str());
  }
  ComplexVector amps(n);
  amps(0) = std::exp(-0.5 * b2);
  for (Eigen::Index k = 1; k < n; ++k) amps(k) = amps(k - 1) * beta / std::sqrt(static_cast<double>(k));
  const double kept = amps.squaredNorm();
  if (1.0 - kept > kNormTolerance) {
    std::ostringstream os;
    os << "insufficient basis: truncated coherent state keeps only " << kept << " of its norm";
    throw InsufficientBasisError(os.str());
  }
  amps /= std::sqrt(kept);
  return StateVector(basis, std::move(amps));
}

StateVector make_state(const InitialState& init, FockBasis basis) {
  if (init.kind == InitialState::Kind::Vacuum) return vacuum_state(basis);
  return displaced_vacuum(basis, init.x1, init.x2);
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw DimensionError("overlap of states in different bases");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the first argument
}

StateVector apply_floquet(const StateVector& state, const FloquetOperator& u) {
  if (state.size() != u.size()) {
    std::ostringstream os;
    os << "state of dimension " << state.size() << " does not match operator of dimension "
       << u.size();
    throw DimensionError(os.str());
  }
  return StateVector(state.basis(), u.apply(state.amplitudes()));
}

double mean_excitation(const StateVector& state) {
  const auto& c = state.amplitudes();
  double sum = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) sum += (static_cast<double>(k) + 0.5) * std::norm(c(k));
  return sum;
}

double leakage(const StateVector& state, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction < 1.0))
    throw DomainError("leakage fraction must lie in (0, 1)");
  const auto n = static_cast<Eigen::Index>(state.size());
  const auto top = static_cast<Eigen::Index>(std::ceil(top_fraction * static_cast<double>(n)));
  return state.amplitudes().tail(std::min(top, n)).squaredNorm();
}

HeatingCurve heating_curve(const FloquetOperator& u, std::int64_t n_kicks,
                           const StateVector& initial) {
  if (n_kicks < 0) throw DomainError("n_kicks must be >= 0");
  if (!u.params()) throw DomainError("heating curve needs an operator built from system parameters");
  if (initial.size() != u.size()) throw DimensionError("initial state does not match operator basis");
  HeatingCurve curve{*u.params(), u.size(), n_kicks, {}, {}, 0.0, true};
  const auto length = static_cast<std::size_t>(n_kicks) + 1;
  curve.energies.reserve(length);
  curve.leakage_series.reserve(length);

  ComplexVector psi = initial.amplitudes();
  const auto record = [&](const ComplexVector& amps) {
    double e = 0.0;
    for (Eigen::Index k = 0; k < amps.size(); ++k) e += (static_cast<double>(k) + 0.5) * std::norm(amps(k));
    const auto top = static_cast<Eigen::Index>(std::ceil(kLeakageFraction * static_cast<double>(amps.size())));
    const double leak = amps.tail(top).squaredNorm();
    curve.energies.push_back(e);
    curve.leakage_series.push_back(leak);
    curve.max_leakage = std::max(curve.max_leakage, leak);
  };
  record(psi);
  for (std::int64_t k = 0; k < n_kicks; ++k) {
    psi = u.apply(psi);
    record(psi);
  }
  const double drift = std::abs(psi.norm() - 1.0);
  if (!(drift <= kNormTolerance)) {
    std::ostringstream os;
    os << "norm drifted by " << drift << " after " << n_kicks << " kicks";
    throw NumericError(os.str());
  }
  curve.converged = curve.max_leakage <= kLeakageTolerance;
  return curve;
}

HeatingCurve heating_curve(const SystemParams& params, FockBasis basis, std::int64_t n_kicks,
                           const StateVector& initial) {
  return heating_curve(floquet_operator(params, basis), n_kicks, initial);
}

double relative_change(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("energy series lengths differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

ConvergedHeatingCurve converged_heating_curve(const SystemParams& params, std::int64_t n_kicks,
                                              const InitialState& initial,
                                              const BasisPolicy& policy) {
  std::size_t n = std::max<std::size_t>(policy.start, 2);
  const auto floor_size = static_cast<std::size_t>(std::ceil(4.0 * (initial.mean_number() + 1.0)));
  n = std::max(n, floor_size);
  if (n > policy.cap) {
    std::ostringstream os;
    os << "starting basis size " << n << " exceeds the cap " << policy.cap;
    throw InsufficientBasisError(os.str());
  }

  std::vector<std::size_t> tried;
  auto run = [&](std::size_t size) {
    tried.push_back(size);
    FockBasis basis(size);
    return heating_curve(params, basis, n_kicks, make_state(initial, basis));
  };

  HeatingCurve current = run(n);
  double change = 0.0;
  for (;;) {
    if (2 * n > policy.cap)
      return ConvergedHeatingCurve{std::move(current), std::move(tried), change, false};
    HeatingCurve doubled = run(2 * n);
    change = relative_change(current.energies, doubled.energies);
    if (current.converged && change < kDoublingTolerance)
      return ConvergedHeatingCurve{std::move(current), std::move(tried), change, true};
    n *= 2;
    current = std::move(doubled);
  }
}

}  // namespace kickho
