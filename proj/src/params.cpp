#include "kickho/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kickho/error.hpp"

namespace kickho {

SystemParams::SystemParams(double K, int q, double eta) : K_(K), q_(q), eta_(eta) {
  if (!std::isfinite(K) || K < 0.0) {
    std::ostringstream os;
    os << "K must be finite and >= 0 (got " << K << ")";
    throw DomainError(os.str());
  }
  if (q < 3) {
    std::ostringstream os;
    os << "q must be an integer >= 3 (got " << q << ")";
    throw DomainError(os.str());
  }
  if (!std::isfinite(eta) || eta <= 0.0) {
    std::ostringstream os;
    os << "eta must be finite and > 0 (got " << eta << ")";
    throw DomainError(os.str());
  }
}

double SystemParams::alpha() const noexcept {
  return 2.0 * std::numbers::pi / static_cast<double>(q_);
}

double SystemParams::ktilde() const noexcept { return K_ / (2.0 * eta_ * eta_); }

bool SystemParams::quasicrystal() const noexcept {
  return !(q_ == 3 || q_ == 4 || q_ == 6);
}

SystemParams build_params(double K, int q, double eta) { return SystemParams(K, q, eta); }

SystemParams build_params(double K, double q, double eta) {
  if (!std::isfinite(q) || q != std::floor(q)) {
    std::ostringstream os;
    os << "q must be an integer >= 3 (got " << q << ")";
    throw DomainError(os.str());
  }
  if (q < 3.0 || q > 1e9) {
    std::ostringstream os;
    os << "q must be an integer >= 3 (got " << q << ")";
    throw DomainError(os.str());
  }
  return SystemParams(K, static_cast<int>(q), eta);
}

SystemParams params_from_physical(const PhysicalParams& p) {
  auto require_positive = [](double x, const char* name) {
    if (!std::isfinite(x) || x <= 0.0) {
      std::ostringstream os;
      os << "physical parameter " << name << " must be finite and > 0 (got " << x << ")";
      throw DomainError(os.str());
    }
  };
  require_positive(p.m, "m");
  require_positive(p.nu, "nu");
  require_positive(p.tau, "tau");
  require_positive(p.k, "k");
  require_positive(p.hbar, "hbar");
  // A = 0 is the unkicked oracle case.
  if (!std::isfinite(p.A) || p.A < 0.0) {
    std::ostringstream os;
    os << "physical parameter A must be finite and >= 0 (got " << p.A << ")";
    throw DomainError(os.str());
  }

  const double ratio = 2.0 * std::numbers::pi / (p.nu * p.tau);
  const double q = std::round(ratio);
  if (std::abs(ratio - q) > kResonanceTolerance * q) {
    std::ostringstream os;
    os.precision(17);
    os << "non-resonant kicking: 2*pi/(nu*tau) = " << ratio
       << " is not an integer within relative tolerance " << kResonanceTolerance;
    throw NonResonantError(os.str());
  }
  if (q < 3.0) {
    std::ostringstream os;
    os << "resonance index q = " << q << " is below 3";
    throw DomainError(os.str());
  }

  const double K = p.A * p.k * p.k / (p.m * p.nu);
  const double eta = p.k * std::sqrt(p.hbar / (2.0 * p.m * p.nu));
  return SystemParams(K, static_cast<int>(q), eta);
}

}  // namespace kickho
