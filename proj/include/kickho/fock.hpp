#ifndef KICKHO_FOCK_HPP
#define KICKHO_FOCK_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kickho/linalg.hpp"
#include "kickho/params.hpp"

namespace kickho {

/// Oscillator eigenbasis truncated to levels 0..size-1.
class FockBasis {
 public:
  /// Throws DomainError if size < 2.
  explicit FockBasis(std::size_t size);
  std::size_t size() const noexcept { return size_; }
  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  std::size_t size_;
};

/// <m| exp(i eta (a + a^dag)) |n> from the associated-Laguerre closed form,
/// evaluated by a rescaled recurrence so that no factorial is ever formed.
/// Throws DomainError on negative indices or eta < 0.
cplx displacement_element(long m, long n, double eta);

/// Projection of cos[eta (a + a^dag)] onto the first N Fock states.
///
/// The elements are exact (they do not depend on N), so the matrix for a
/// larger basis contains the smaller one as its leading block. Exponentiating
/// this projection is not the same as projecting the exponential; truncation
/// error therefore shows up as population reaching the top of the basis, never
/// as a loss of unitarity.
class HermitianCosineOperator {
 public:
  HermitianCosineOperator(FockBasis basis, double eta, RealMatrix elements);

  const FockBasis& basis() const noexcept { return basis_; }
  double eta() const noexcept { return eta_; }
  const RealMatrix& elements() const noexcept { return elements_; }

 private:
  FockBasis basis_;
  double eta_;
  RealMatrix elements_;
};

HermitianCosineOperator cosine_operator(double eta, FockBasis basis);

/// exp(-i ktilde C) from the eigendecomposition of each parity block of C.
ComplexMatrix kick_operator(double ktilde, const HermitianCosineOperator& c);

/// Entries exp(-i alpha n).
ComplexVector free_phases(double alpha, FockBasis basis);

/// Indices of one parity sector: 0,2,4,... (parity 0) or 1,3,5,... (parity 1).
std::vector<std::size_t> parity_indices(std::size_t n, int parity);

/// One-period propagator. When every element connecting even and odd levels
/// is exactly zero (always true for operators built by floquet_operator) the
/// two parity blocks are kept alongside the full matrix and used for
/// propagation and diagonalization.
class FloquetOperator {
 public:
  FloquetOperator(FockBasis basis, ComplexMatrix matrix,
                  std::optional<SystemParams> params = std::nullopt);

  const FockBasis& basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return basis_.size(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const std::optional<SystemParams>& params() const noexcept { return params_; }

  bool parity_blocked() const noexcept { return parity_blocked_; }
  /// Block of parity 0 (even levels) or 1 (odd levels). Only valid when
  /// parity_blocked().
  const ComplexMatrix& block(int parity) const { return blocks_.at(static_cast<std::size_t>(parity)); }

  /// U psi, using the parity blocks when available.
  ComplexVector apply(const ComplexVector& psi) const;

 private:
  FockBasis basis_;
  ComplexMatrix matrix_;
  std::optional<SystemParams> params_;
  bool parity_blocked_ = false;
  std::array<ComplexMatrix, 2> blocks_;
};

/// U = diag(exp(-i alpha n)) exp(-i ktilde C): kick first, then free rotation.
FloquetOperator floquet_operator(const SystemParams& params, FockBasis basis);

// Binary operator cache. Layout, little-endian:
//   char[4] "KHOU", u32 version, u32 N, u32 q, f64 K, f64 eta, f64 ktilde,
//   then N*N (re, im) f64 pairs in row-major order.
inline constexpr std::array<char, 4> kOperatorMagic{'K', 'H', 'O', 'U'};
inline constexpr std::uint32_t kOperatorFormatVersion = 1;

void save_operator(const FloquetOperator& op, const std::string& path);
/// Throws IoError on unreadable files, wrong magic, unknown version, or
/// inconsistent header fields.
FloquetOperator load_operator(const std::string& path);

}  // namespace kickho

#endif
