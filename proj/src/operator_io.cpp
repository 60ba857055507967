#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kickho/error.hpp"
#include "kickho/fock.hpp"

namespace kickho {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw IoError("truncated operator file: " + path);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_operator(const FloquetOperator& op, const std::string& path) {
  if (!op.params()) throw DomainError("only operators built from system parameters can be saved");
  const auto& p = *op.params();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kOperatorMagic.data(), kOperatorMagic.size());
  put_le<std::uint32_t>(out, kOperatorFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(op.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.q()));
  put_le<double>(out, p.K());
  put_le<double>(out, p.eta());
  put_le<double>(out, p.ktilde());
  const auto& m = op.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_le<double>(out, m(i, j).real());
      put_le<double>(out, m(i, j).imag());
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

FloquetOperator load_operator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kOperatorMagic)
    throw IoError("not a kicked-oscillator operator file (bad magic): " + path);
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kOperatorFormatVersion) {
    std::ostringstream os;
    os << "unsupported operator file version " << version << ": " << path;
    throw IoError(os.str());
  }
  const auto n = get_le<std::uint32_t>(in, path);
  const auto q = get_le<std::uint32_t>(in, path);
  const auto K = get_le<double>(in, path);
  const auto eta = get_le<double>(in, path);
  const auto ktilde = get_le<double>(in, path);

  std::optional<SystemParams> params;
  try {
    params = SystemParams(K, static_cast<int>(q), eta);
    FockBasis check(n);
  } catch (const Error& e) {
    throw IoError("invalid operator header in " + path + ": " + e.what());
  }
  if (std::abs(params->ktilde() - ktilde) > 1e-12 * std::max(1.0, std::abs(ktilde)))
    throw IoError("operator header is inconsistent (ktilde != K/(2 eta^2)): " + path);

  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = get_le<double>(in, path);
      const double im = get_le<double>(in, path);
      m(i, j) = cplx(re, im);
    }
  }
  return FloquetOperator(FockBasis(n), std::move(m), params);
}

}  // namespace kickho
