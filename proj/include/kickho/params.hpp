#ifndef KICKHO_PARAMS_HPP
#define KICKHO_PARAMS_HPP

namespace kickho {

/// Reduced parameters of the kicked oscillator. Only (K, q, eta) are stored;
/// alpha and the quantum kick strength are always recomputed from them.
class SystemParams {
 public:
  /// Throws DomainError unless K >= 0, q >= 3 and eta > 0 (all finite).
  SystemParams(double K, int q, double eta);

  double K() const noexcept { return K_; }
  int q() const noexcept { return q_; }
  double eta() const noexcept { return eta_; }
  /// Kick-to-oscillator phase 2*pi/q.
  double alpha() const noexcept;
  /// Quantum kick strength K / (2 eta^2).
  double ktilde() const noexcept;
  /// q outside {3, 4, 6}: the web has quasicrystal rather than crystal symmetry.
  bool quasicrystal() const noexcept;

  SystemParams with_eta(double eta) const { return SystemParams(K_, q_, eta); }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  double K_;
  int q_;
  double eta_;
};

SystemParams build_params(double K, int q, double eta);

/// Overload accepting a real-valued q; non-integer values are rejected.
SystemParams build_params(double K, double q, double eta);

/// Trap-level quantities in any consistent unit system.
struct PhysicalParams {
  double m = 1.0;     // particle mass
  double nu = 1.0;    // trap angular frequency
  double tau = 1.0;   // kick period
  double k = 1.0;     // wave vector of the kick potential
  double A = 0.0;     // kick potential depth
  double hbar = 1.0;
};

/// Relative tolerance on 2*pi/(nu*tau) being an integer.
inline constexpr double kResonanceTolerance = 1e-9;

/// K = A k^2/(m nu), eta = k sqrt(hbar/(2 m nu)), q = round(2 pi/(nu tau)).
/// Throws DomainError for non-positive fields (A may be zero) and
/// NonResonantError when nu*tau is not 2*pi over an integer.
SystemParams params_from_physical(const PhysicalParams& p);

}  // namespace kickho

#endif
