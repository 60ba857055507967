#ifndef KICKHO_CLI_CAPI_HANDLES_HPP
#define KICKHO_CLI_CAPI_HANDLES_HPP

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kickho/kickho.h"

namespace kickho::cli {

/// A failed library call, carrying its status code.
class ApiError : public std::runtime_error {
 public:
  ApiError(kickho_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  kickho_status status() const noexcept { return status_; }

 private:
  kickho_status status_;
};

inline void check(kickho_status status) {
  if (status != KICKHO_OK) throw ApiError(status, kickho_last_error());
}

template <class T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};

template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, HandleDeleter<T, Free>>;

using Trajectory = Handle<kickho_trajectory, kickho_trajectory_free>;
using Histogram = Handle<kickho_histogram, kickho_histogram_free>;
using Floquet = Handle<kickho_floquet, kickho_floquet_free>;
using State = Handle<kickho_state, kickho_state_free>;
using Heating = Handle<kickho_heating, kickho_heating_free>;
using Spectrum = Handle<kickho_spectrum, kickho_spectrum_free>;
using Sweep = Handle<kickho_sweep, kickho_sweep_free>;
using Crossings = Handle<kickho_crossings, kickho_crossings_free>;
using Husimi = Handle<kickho_husimi, kickho_husimi_free>;
using Convergence = Handle<kickho_convergence, kickho_convergence_free>;

/// Calls `create(args..., &raw)` and takes ownership of the result.
template <class H, class F, class... Args>
H make(F create, Args... args) {
  typename H::pointer raw = nullptr;
  check(create(args..., &raw));
  return H(raw);
}

}  // namespace kickho::cli

#endif
