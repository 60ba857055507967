#include "kickho/fock.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kickho/error.hpp"

namespace kickho {

namespace {

// Runs the recurrence for
//   h_n = exp(-x/2) eta^d sqrt(n!/(n+d)!) L_n^(d)(x),   x = eta^2,
// which is |<n+d| exp(i eta (a + a^dag)) |n>| up to the phase i^d:
//   h_{n+1} sqrt((n+1)(n+1+d)) = (2n+1+d-x) h_n - sqrt(n(n+d)) h_{n-1}.
// Values are carried as mantissa * 2^exponent so that tiny starting values
// (large d) neither underflow nor lose precision before they grow.
class ScaledLaguerre {
 public:
  ScaledLaguerre(long d, double eta) : d_(static_cast<double>(d)), x_(eta * eta) {
    if (eta == 0.0) {
      zero_ = d != 0;
      cur_ = 1.0;
      return;
    }
    const double log_h0 = -0.5 * x_ + d_ * std::log(eta) - 0.5 * std::lgamma(d_ + 1.0);
    exponent_ = static_cast<long>(std::floor(log_h0 / std::numbers::ln2));
    cur_ = std::exp(log_h0 - static_cast<double>(exponent_) * std::numbers::ln2);
  }

  double value() const { return zero_ ? 0.0 : std::ldexp(cur_, static_cast<int>(exponent_)); }

  void advance() {
    if (zero_) return;
    if (x_ == 0.0) return;  // identity: every diagonal element is 1
    const double n = static_cast<double>(n_);
    const double next =
        ((2.0 * n + 1.0 + d_ - x_) * cur_ - std::sqrt(n * (n + d_)) * prev_) /
        std::sqrt((n + 1.0) * (n + 1.0 + d_));
    prev_ = cur_;
    cur_ = next;
    ++n_;
    const double mag = std::max(std::abs(cur_), std::abs(prev_));
    if (mag > kHigh) {
      rescale(-kShift);
    } else if (mag < kLow && mag > 0.0) {
      rescale(kShift);
    }
  }

 private:
  static constexpr int kShift = 600;
  static constexpr double kHigh = 0x1p+600;
  static constexpr double kLow = 0x1p-600;

  void rescale(int shift) {
    cur_ = std::ldexp(cur_, shift);
    prev_ = std::ldexp(prev_, shift);
    exponent_ -= shift;
  }

  double d_;
  double x_;
  bool zero_ = false;
  long n_ = 0;
  long exponent_ = 0;
  double cur_ = 0.0;
  double prev_ = 0.0;
};

// i^d
cplx i_power(long d) {
  switch (d % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::string kick_context(double eta, double ktilde, std::size_t n) {
  std::ostringstream os;
  os.precision(17);
  os << "kick operator (eta=" << eta << ", ktilde=" << ktilde << ", N=" << n << ")";
  return os.str();
}

}  // namespace

FockBasis::FockBasis(std::size_t size) : size_(size) {
  if (size < 2) {
    std::ostringstream os;
    os << "Fock basis size must be >= 2 (got " << size << ")";
    throw DomainError(os.str());
  }
}

cplx displacement_element(long m, long n, double eta) {
  if (m < 0 || n < 0) throw DomainError("Fock indices must be non-negative");
  if (!std::isfinite(eta) || eta < 0.0) throw DomainError("eta must be finite and >= 0");
  const long lo = std::min(m, n);
  const long d = std::abs(m - n);
  ScaledLaguerre rec(d, eta);
  for (long k = 0; k < lo; ++k) rec.advance();
  return i_power(d) * rec.value();
}

HermitianCosineOperator::HermitianCosineOperator(FockBasis basis, double eta, RealMatrix elements)
    : basis_(basis), eta_(eta), elements_(std::move(elements)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (elements_.rows() != n || elements_.cols() != n)
    throw DimensionError("cosine operator matrix does not match basis size");
}

HermitianCosineOperator cosine_operator(double eta, FockBasis basis) {
  if (!std::isfinite(eta) || eta < 0.0) throw DomainError("eta must be finite and >= 0");
  const auto n = static_cast<long>(basis.size());
  RealMatrix c = RealMatrix::Zero(n, n);
  // Real part of i^d h_n: only even level differences survive.
  for (long d = 0; d < n; d += 2) {
    const double sign = (d / 2) % 2 == 0 ? 1.0 : -1.0;
    ScaledLaguerre rec(d, eta);
    for (long k = 0; k + d < n; ++k) {
      const double value = sign * rec.value();
      c(k + d, k) = value;
      c(k, k + d) = value;
      rec.advance();
    }
  }
  return HermitianCosineOperator(basis, eta, std::move(c));
}

std::vector<std::size_t> parity_indices(std::size_t n, int parity) {
  std::vector<std::size_t> idx;
  idx.reserve(n / 2 + 1);
  for (std::size_t i = static_cast<std::size_t>(parity); i < n; i += 2) idx.push_back(i);
  return idx;
}

namespace {

RealMatrix extract_block(const RealMatrix& a, const std::vector<std::size_t>& idx) {
  const auto m = static_cast<Eigen::Index>(idx.size());
  RealMatrix out(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      out(i, j) = a(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
  return out;
}

// exp(-i ktilde C_block) for one parity block.
ComplexMatrix kick_block(double ktilde, const RealMatrix& c_block, const std::string& context) {
  const auto eig = linalg::symmetric_eigen(c_block, context);
  const RealVector theta = -ktilde * eig.values;
  const RealVector cs = theta.array().cos();
  const RealVector sn = theta.array().sin();
  const RealMatrix re = (eig.vectors * cs.asDiagonal()) * eig.vectors.transpose();
  const RealMatrix im = (eig.vectors * sn.asDiagonal()) * eig.vectors.transpose();
  ComplexMatrix out(c_block.rows(), c_block.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

std::array<ComplexMatrix, 2> kick_blocks(double ktilde, const HermitianCosineOperator& c) {
  const std::size_t n = c.basis().size();
  const auto context = kick_context(c.eta(), ktilde, n);
  std::array<ComplexMatrix, 2> blocks;
  for (int p = 0; p < 2; ++p) {
    if (ktilde == 0.0) {
      const auto m = static_cast<Eigen::Index>(parity_indices(n, p).size());
      blocks[static_cast<std::size_t>(p)] = ComplexMatrix::Identity(m, m);
      continue;
    }
    blocks[static_cast<std::size_t>(p)] =
        kick_block(ktilde, extract_block(c.elements(), parity_indices(n, p)), context);
  }
  return blocks;
}

ComplexMatrix assemble(const std::array<ComplexMatrix, 2>& blocks, std::size_t n) {
  ComplexMatrix full = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (int p = 0; p < 2; ++p) {
    const auto idx = parity_indices(n, p);
    const auto& b = blocks[static_cast<std::size_t>(p)];
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t i = 0; i < idx.size(); ++i)
        full(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j])) =
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return full;
}

bool has_parity_structure(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = (j + 1) % 2; i < m.rows(); i += 2)
      if (m(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

}  // namespace

ComplexMatrix kick_operator(double ktilde, const HermitianCosineOperator& c) {
  if (!std::isfinite(ktilde)) throw DomainError("ktilde must be finite");
  return assemble(kick_blocks(ktilde, c), c.basis().size());
}

ComplexVector free_phases(double alpha, FockBasis basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexVector out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = std::polar(1.0, -alpha * static_cast<double>(k));
  return out;
}

FloquetOperator::FloquetOperator(FockBasis basis, ComplexMatrix matrix,
                                 std::optional<SystemParams> params)
    : basis_(basis), matrix_(std::move(matrix)), params_(params) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw DimensionError("Floquet matrix does not match basis size");
  parity_blocked_ = has_parity_structure(matrix_);
  if (parity_blocked_) {
    for (int p = 0; p < 2; ++p) {
      const auto idx = parity_indices(basis_.size(), p);
      const auto m = static_cast<Eigen::Index>(idx.size());
      ComplexMatrix b(m, m);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          b(i, j) = matrix_(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
      blocks_[static_cast<std::size_t>(p)] = std::move(b);
    }
  }
}

ComplexVector FloquetOperator::apply(const ComplexVector& psi) const {
  if (psi.size() != matrix_.rows()) {
    std::ostringstream os;
    os << "state of dimension " << psi.size() << " does not match operator of dimension "
       << matrix_.rows();
    throw DimensionError(os.str());
  }
  if (!parity_blocked_) return matrix_ * psi;
  const Eigen::Index n = psi.size();
  ComplexVector out(n);
  for (int p = 0; p < 2; ++p) {
    const Eigen::Index m = blocks_[static_cast<std::size_t>(p)].rows();
    ComplexVector sub(m);
    for (Eigen::Index i = 0; i < m; ++i) sub(i) = psi(2 * i + p);
    bool empty = true;
    for (Eigen::Index i = 0; i < m && empty; ++i) empty = sub(i) == cplx(0.0, 0.0);
    if (empty) {
      for (Eigen::Index i = 0; i < m; ++i) out(2 * i + p) = 0.0;
      continue;
    }
    const ComplexVector res = blocks_[static_cast<std::size_t>(p)] * sub;
    for (Eigen::Index i = 0; i < m; ++i) out(2 * i + p) = res(i);
  }
  return out;
}

FloquetOperator floquet_operator(const SystemParams& params, FockBasis basis) {
  const auto c = cosine_operator(params.eta(), basis);
  auto blocks = kick_blocks(params.ktilde(), c);
  const ComplexVector phases = free_phases(params.alpha(), basis);
  for (int p = 0; p < 2; ++p) {
    auto& b = blocks[static_cast<std::size_t>(p)];
    for (Eigen::Index i = 0; i < b.rows(); ++i) b.row(i) *= phases(2 * i + p);
  }
  return FloquetOperator(basis, assemble(blocks, basis.size()), params);
}

}  // namespace kickho
