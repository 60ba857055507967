#include "kickho/kickho.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "kickho/classical.hpp"
#include "kickho/error.hpp"
#include "kickho/fock.hpp"
#include "kickho/husimi.hpp"
#include "kickho/parallel.hpp"
#include "kickho/params.hpp"
#include "kickho/propagation.hpp"
#include "kickho/spectral.hpp"

using namespace kickho;

struct kickho_trajectory {
  Trajectory t;
};

struct kickho_histogram {
  OccupancyHistogram h;
};

struct kickho_floquet {
  FloquetOperator u;
};

struct kickho_state {
  StateVector s;
};

struct kickho_heating {
  HeatingCurve curve;
  double doubling_change = 0.0;
  std::size_t tried = 1;
  bool converged = false;
};

struct kickho_spectrum {
  QuasienergySpectrum s;
};

struct kickho_sweep {
  UnitaryFamily family;
  LevelDynamics dynamics;
  std::vector<Branch> branches;
};

struct kickho_crossings {
  UnitaryFamily family;
  StateVector psi0;
  std::vector<AvoidedCrossing> list;
};

struct kickho_husimi {
  HusimiField f;
};

struct kickho_convergence {
  ConvergenceReport r;
};

namespace {

thread_local std::string last_error;

struct NullArgument : std::exception {};

struct BufferTooSmall : std::exception {
  std::size_t needed;
  explicit BufferTooSmall(std::size_t n) : needed(n) {}
};

template <class T>
T& deref(T* p) {
  if (p == nullptr) throw NullArgument();
  return *p;
}

template <class F>
kickho_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return KICKHO_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<kickho_status>(static_cast<int>(e.code()));
  } catch (const NullArgument&) {
    last_error = "required pointer argument is null";
    return KICKHO_ERR_NULL_ARGUMENT;
  } catch (const BufferTooSmall& e) {
    last_error = "output buffer too small: need " + std::to_string(e.needed) + " entries";
    return KICKHO_ERR_BUFFER_TOO_SMALL;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return KICKHO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return KICKHO_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return KICKHO_ERR_INTERNAL;
  }
}

void require_capacity(std::size_t capacity, std::size_t needed) {
  if (capacity < needed) throw BufferTooSmall(needed);
}

SystemParams to_params(const kickho_params* p) {
  const auto& v = deref(p);
  return build_params(v.K, v.q, v.eta);
}

InitialState to_initial(const kickho_initial* init) {
  if (init == nullptr) return InitialState::vacuum();
  switch (init->kind) {
    case KICKHO_INITIAL_VACUUM:
      return InitialState::vacuum();
    case KICKHO_INITIAL_DISPLACED:
      return InitialState::displaced(init->x1, init->x2);
    default:
      throw DomainError("unknown initial state kind " + std::to_string(init->kind));
  }
}

void write_complex(const ComplexVector& v, double* re_im, std::size_t capacity) {
  const auto n = static_cast<std::size_t>(v.size());
  require_capacity(capacity, 2 * n);
  deref(re_im);
  for (std::size_t i = 0; i < n; ++i) {
    re_im[2 * i] = v[static_cast<Eigen::Index>(i)].real();
    re_im[2 * i + 1] = v[static_cast<Eigen::Index>(i)].imag();
  }
}

void write_doubles(const std::vector<double>& v, double* out, std::size_t capacity) {
  require_capacity(capacity, v.size());
  deref(out);
  std::copy(v.begin(), v.end(), out);
}

template <class Handle, class... Args>
void emit(Handle** out, Args&&... args) {
  deref(out);
  *out = nullptr;
  *out = new Handle{std::forward<Args>(args)...};
}

kickho_partner_profile to_profile(const PartnerProfile& p) {
  return {p.eta, p.phase, p.localization, p.outer_mass, p.psi0_overlap, p.min_step_overlap,
          p.localized ? 1 : 0};
}

}  // namespace

extern "C" {

const char* kickho_version(void) { return KICKHO_VERSION_STRING; }

const char* kickho_status_string(kickho_status status) {
  switch (status) {
    case KICKHO_OK: return "ok";
    case KICKHO_ERR_DOMAIN: return "domain error";
    case KICKHO_ERR_NONRESONANT: return "non-resonant parameters";
    case KICKHO_ERR_NUMERIC: return "numerical failure";
    case KICKHO_ERR_DIMENSION: return "dimension mismatch";
    case KICKHO_ERR_INSUFFICIENT_BASIS: return "insufficient basis";
    case KICKHO_ERR_IO: return "i/o error";
    case KICKHO_ERR_NULL_ARGUMENT: return "null argument";
    case KICKHO_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case KICKHO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kickho_last_error(void) { return last_error.c_str(); }

unsigned kickho_default_threads(void) { return default_thread_count(); }

kickho_status kickho_params_check(const kickho_params* p, double* alpha, double* ktilde,
                                  int* quasicrystal) {
  return guarded([&] {
    const auto sp = to_params(p);
    if (alpha) *alpha = sp.alpha();
    if (ktilde) *ktilde = sp.ktilde();
    if (quasicrystal) *quasicrystal = sp.quasicrystal() ? 1 : 0;
  });
}

kickho_status kickho_params_from_physical(const kickho_physical* phys, kickho_params* out) {
  return guarded([&] {
    const auto& v = deref(phys);
    deref(out);
    const auto sp = params_from_physical({v.m, v.nu, v.tau, v.k, v.A, v.hbar});
    *out = {sp.K(), sp.q(), sp.eta()};
  });
}

kickho_status kickho_web_map_step(const kickho_params* p, double v, double u, double* v_out,
                                  double* u_out) {
  return guarded([&] {
    deref(v_out);
    deref(u_out);
    const auto next = web_map_step(PhasePoint(v, u), to_params(p));
    *v_out = next.v();
    *u_out = next.u();
  });
}

kickho_status kickho_trajectory_create(const kickho_params* p, double v0, double u0,
                                       int64_t n_kicks, kickho_trajectory** out) {
  return guarded([&] {
    emit(out, iterate_trajectory(PhasePoint(v0, u0), to_params(p), n_kicks));
  });
}

size_t kickho_trajectory_length(const kickho_trajectory* t) {
  return t ? t->t.points.size() : 0;
}

int kickho_trajectory_escaped(const kickho_trajectory* t) { return t && t->t.escaped ? 1 : 0; }

kickho_status kickho_trajectory_points(const kickho_trajectory* t, double* v, double* u,
                                       size_t capacity) {
  return guarded([&] {
    const auto& pts = deref(t).t.points;
    require_capacity(capacity, pts.size());
    deref(v);
    deref(u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      v[i] = pts[i].v();
      u[i] = pts[i].u();
    }
  });
}

void kickho_trajectory_free(kickho_trajectory* t) { delete t; }

kickho_status kickho_histogram_create(const kickho_trajectory* t,
                                      const kickho_histogram_grid* grid, kickho_histogram** out) {
  return guarded([&] {
    const auto& g = deref(grid);
    emit(out, occupancy_histogram(deref(t).t.points,
                                  HistogramGrid{g.v_min, g.v_max, g.u_min, g.u_max, g.nv, g.nu}));
  });
}

kickho_status kickho_histogram_counts(const kickho_histogram* h, uint64_t* counts,
                                      size_t capacity) {
  return guarded([&] {
    const auto& c = deref(h).h.counts();
    require_capacity(capacity, c.size());
    deref(counts);
    std::copy(c.begin(), c.end(), counts);
  });
}

kickho_status kickho_histogram_summary(const kickho_histogram* h, uint64_t* recorded,
                                       uint64_t* overflow, size_t* occupied) {
  return guarded([&] {
    const auto& hist = deref(h).h;
    if (recorded) *recorded = hist.recorded();
    if (overflow) *overflow = hist.overflow();
    if (occupied) *occupied = hist.occupied_cells();
  });
}

void kickho_histogram_free(kickho_histogram* h) { delete h; }

kickho_status kickho_classical_heating(const kickho_params* p, size_t ensemble_size,
                                       uint64_t seed, int64_t n_kicks, unsigned threads,
                                       double* energies, size_t capacity, size_t* escaped) {
  return guarded([&] {
    const auto sp = to_params(p);
    if (n_kicks < 0) throw DomainError("n_kicks must be non-negative");
    require_capacity(capacity, static_cast<std::size_t>(n_kicks) + 1);
    const auto ensemble = sample_vacuum_ensemble(sp.eta(), ensemble_size, seed);
    const auto curve = ensemble_heating_curve(ensemble, sp, n_kicks, threads);
    write_doubles(curve.energies, energies, capacity);
    if (escaped) *escaped = curve.escaped;
  });
}

kickho_status kickho_floquet_create(const kickho_params* p, size_t basis_size,
                                    kickho_floquet** out) {
  return guarded([&] { emit(out, floquet_operator(to_params(p), FockBasis(basis_size))); });
}

size_t kickho_floquet_size(const kickho_floquet* u) { return u ? u->u.size() : 0; }

kickho_status kickho_floquet_params(const kickho_floquet* u, kickho_params* out) {
  return guarded([&] {
    const auto& params = deref(u).u.params();
    deref(out);
    if (!params) throw DomainError("operator carries no parameters");
    *out = {params->K(), params->q(), params->eta()};
  });
}

kickho_status kickho_floquet_matrix(const kickho_floquet* u, double* re_im, size_t capacity) {
  return guarded([&] {
    const auto& m = deref(u).u.matrix();
    const auto n = static_cast<std::size_t>(m.rows());
    require_capacity(capacity, 2 * n * n);
    deref(re_im);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const cplx z = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        re_im[2 * (r * n + c)] = z.real();
        re_im[2 * (r * n + c) + 1] = z.imag();
      }
    }
  });
}

kickho_status kickho_floquet_save(const kickho_floquet* u, const char* path) {
  return guarded([&] { save_operator(deref(u).u, std::string(&deref(path))); });
}

kickho_status kickho_floquet_load(const char* path, kickho_floquet** out) {
  return guarded([&] { emit(out, load_operator(std::string(&deref(path)))); });
}

void kickho_floquet_free(kickho_floquet* u) { delete u; }

kickho_status kickho_state_create(const kickho_initial* init, size_t basis_size,
                                  kickho_state** out) {
  return guarded([&] { emit(out, make_state(to_initial(init), FockBasis(basis_size))); });
}

kickho_status kickho_state_from_amplitudes(const double* re_im, size_t basis_size,
                                           kickho_state** out) {
  return guarded([&] {
    deref(re_im);
    const FockBasis basis(basis_size);
    ComplexVector amps(static_cast<Eigen::Index>(basis_size));
    for (std::size_t i = 0; i < basis_size; ++i) {
      amps[static_cast<Eigen::Index>(i)] = cplx(re_im[2 * i], re_im[2 * i + 1]);
    }
    emit(out, StateVector(basis, std::move(amps)));
  });
}

size_t kickho_state_size(const kickho_state* s) { return s ? s->s.size() : 0; }

kickho_status kickho_state_amplitudes(const kickho_state* s, double* re_im, size_t capacity) {
  return guarded([&] { write_complex(deref(s).s.amplitudes(), re_im, capacity); });
}

kickho_status kickho_state_apply(kickho_state* s, const kickho_floquet* u) {
  return guarded([&] {
    auto& st = deref(s);
    st.s = apply_floquet(st.s, deref(u).u);
  });
}

kickho_status kickho_state_mean_excitation(const kickho_state* s, double* out) {
  return guarded([&] {
    const double e = mean_excitation(deref(s).s);
    deref(out) = e;
  });
}

kickho_status kickho_state_leakage(const kickho_state* s, double top_fraction, double* out) {
  return guarded([&] {
    const double l = leakage(deref(s).s, top_fraction);
    deref(out) = l;
  });
}

void kickho_state_free(kickho_state* s) { delete s; }

kickho_status kickho_heating_run(const kickho_floquet* u, int64_t n_kicks,
                                 const kickho_state* initial, kickho_heating** out) {
  return guarded([&] {
    auto curve = heating_curve(deref(u).u, n_kicks, deref(initial).s);
    const bool ok = curve.converged;
    emit(out, std::move(curve), 0.0, std::size_t{1}, ok);
  });
}

kickho_status kickho_heating_run_auto(const kickho_params* p, int64_t n_kicks,
                                      const kickho_initial* initial, size_t start, size_t cap,
                                      kickho_heating** out) {
  return guarded([&] {
    auto r = converged_heating_curve(to_params(p), n_kicks, to_initial(initial),
                                     BasisPolicy{start, cap});
    emit(out, std::move(r.curve), r.doubling_change, r.tried.size(), r.converged);
  });
}

kickho_status kickho_heating_info_get(const kickho_heating* h, kickho_heating_info* out) {
  return guarded([&] {
    const auto& hc = deref(h);
    deref(out) = {hc.curve.basis_size, hc.curve.n_kicks, hc.curve.max_leakage,
                  hc.converged ? 1 : 0, hc.doubling_change, hc.tried};
  });
}

kickho_status kickho_heating_energies(const kickho_heating* h, double* out, size_t capacity) {
  return guarded([&] { write_doubles(deref(h).curve.energies, out, capacity); });
}

kickho_status kickho_heating_leakage(const kickho_heating* h, double* out, size_t capacity) {
  return guarded([&] { write_doubles(deref(h).curve.leakage_series, out, capacity); });
}

void kickho_heating_free(kickho_heating* h) { delete h; }

kickho_status kickho_spectrum_create(const kickho_floquet* u, kickho_spectrum** out) {
  return guarded([&] { emit(out, diagonalize(deref(u).u)); });
}

size_t kickho_spectrum_size(const kickho_spectrum* s) { return s ? s->s.phases.size() : 0; }

kickho_status kickho_spectrum_phases(const kickho_spectrum* s, double* out, size_t capacity) {
  return guarded([&] { write_doubles(deref(s).s.phases, out, capacity); });
}

kickho_status kickho_spectrum_eigenvector(const kickho_spectrum* s, size_t index, double* re_im,
                                          size_t capacity) {
  return guarded([&] {
    const auto& sp = deref(s).s;
    if (index >= sp.phases.size()) throw DomainError("eigenvector index out of range");
    write_complex(sp.eigenvectors.col(static_cast<Eigen::Index>(index)), re_im, capacity);
  });
}

kickho_status kickho_spectrum_overlaps(const kickho_spectrum* s, const kickho_state* psi0,
                                       double* out, size_t capacity) {
  return guarded([&] { write_doubles(overlaps(deref(s).s, deref(psi0).s), out, capacity); });
}

double kickho_spectrum_max_residual(const kickho_spectrum* s) {
  if (s == nullptr || s->s.residuals.empty()) return 0.0;
  return *std::max_element(s->s.residuals.begin(), s->s.residuals.end());
}

void kickho_spectrum_free(kickho_spectrum* s) { delete s; }

kickho_status kickho_sweep_run(double K, int q, size_t basis_size, const double* etas,
                               size_t n_eta, const kickho_initial* psi0, double threshold,
                               unsigned threads, kickho_sweep** out) {
  return guarded([&] {
    deref(etas);
    const FockBasis basis(basis_size);
    const auto init = to_initial(psi0);
    auto family = kicked_oscillator_family(K, q, basis);
    auto dynamics = eta_sweep(family, std::vector<double>(etas, etas + n_eta),
                              make_state(init, basis), threshold, threads, init.describe());
    auto branches = track_bands(dynamics);
    emit(out, std::move(family), std::move(dynamics), std::move(branches));
  });
}

size_t kickho_sweep_points(const kickho_sweep* s) { return s ? s->dynamics.points.size() : 0; }

kickho_status kickho_sweep_point(const kickho_sweep* s, size_t i, double* eta, size_t* n_levels,
                                 int* failed) {
  return guarded([&] {
    const auto& pts = deref(s).dynamics.points;
    if (i >= pts.size()) throw DomainError("sweep point index out of range");
    if (eta) *eta = pts[i].eta;
    if (n_levels) *n_levels = pts[i].levels.size();
    if (failed) *failed = pts[i].failed ? 1 : 0;
  });
}

kickho_status kickho_sweep_levels(const kickho_sweep* s, size_t i, double* phases,
                                  double* overlaps_out, size_t capacity) {
  return guarded([&] {
    const auto& pts = deref(s).dynamics.points;
    if (i >= pts.size()) throw DomainError("sweep point index out of range");
    const auto& levels = pts[i].levels;
    require_capacity(capacity, levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (phases) phases[l] = levels[l].phase;
      if (overlaps_out) overlaps_out[l] = levels[l].overlap;
    }
  });
}

kickho_status kickho_sweep_branch_count(const kickho_sweep* s, size_t* out) {
  return guarded([&] { deref(out) = deref(s).branches.size(); });
}

kickho_status kickho_sweep_branch_ids(const kickho_sweep* s, size_t i, size_t* ids,
                                      size_t capacity) {
  return guarded([&] {
    const auto& sw = deref(s);
    const auto& pts = sw.dynamics.points;
    if (i >= pts.size()) throw DomainError("sweep point index out of range");
    const auto& levels = pts[i].levels;
    require_capacity(capacity, levels.size());
    deref(ids);
    std::vector<std::size_t> assigned(levels.size(), SIZE_MAX);
    for (std::size_t b = 0; b < sw.branches.size(); ++b) {
      const auto& br = sw.branches[b];
      if (i < br.first_point() || i > br.last_point()) continue;
      const auto& node = br.nodes[i - br.first_point()];
      for (std::size_t m = 0; m < node.multiplicity; ++m) {
        // merged levels are consecutive in phase, possibly wrapping around
        assigned[(node.level + m) % levels.size()] = b;
      }
    }
    std::copy(assigned.begin(), assigned.end(), ids);
  });
}

void kickho_sweep_free(kickho_sweep* s) { delete s; }

void kickho_crossing_options_default(kickho_crossing_options* out) {
  if (out == nullptr) return;
  const CrossingSearch d;
  *out = {d.refine_tol, d.prominence, d.max_gap, d.min_partner_overlap, d.refine ? 1 : 0,
          d.threads};
}

void kickho_classify_options_default(kickho_classify_options* out) {
  if (out == nullptr) return;
  const ClassificationOptions d;
  *out = {d.max_step,     d.classifier.radius, d.classifier.threshold, d.outer_radius,
          d.grid_extent, d.grid_spacing,      d.threads};
}

kickho_status kickho_crossings_find(const kickho_sweep* sweep,
                                    const kickho_crossing_options* options,
                                    kickho_crossings** out) {
  return guarded([&] {
    const auto& sw = deref(sweep);
    CrossingSearch search;
    if (options) {
      search = {options->refine_tol, options->prominence, options->max_gap,
                options->min_partner_overlap, options->refine != 0, options->threads};
    }
    auto list = find_avoided_crossings(sw.dynamics, sw.branches, sw.family, search);
    emit(out, sw.family, sw.dynamics.psi0, std::move(list));
  });
}

size_t kickho_crossings_count(const kickho_crossings* c) { return c ? c->list.size() : 0; }

kickho_status kickho_crossings_get(const kickho_crossings* c, size_t i,
                                   kickho_crossing_info* out) {
  return guarded([&] {
    const auto& list = deref(c).list;
    if (i >= list.size()) throw DomainError("crossing index out of range");
    const auto& x = list[i];
    deref(out) = {x.eta_center, x.phase_center, x.min_gap,         x.phase_a,
                  x.phase_b,    x.overlap_a,    x.overlap_b,       x.subspace_weight,
                  x.eta_tracked, x.refined ? 1 : 0, x.degenerate ? 1 : 0};
  });
}

kickho_status kickho_crossings_state(const kickho_crossings* c, size_t i, int which,
                                     double* re_im, size_t capacity) {
  return guarded([&] {
    const auto& list = deref(c).list;
    if (i >= list.size()) throw DomainError("crossing index out of range");
    if (which != 0 && which != 1) throw DomainError("partner must be 0 or 1");
    write_complex(which == 0 ? list[i].state_a : list[i].state_b, re_im, capacity);
  });
}

kickho_status kickho_crossings_classify(const kickho_crossings* c, size_t i, double eta_left,
                                        double eta_right, const kickho_classify_options* options,
                                        kickho_classification* out) {
  return guarded([&] {
    const auto& cs = deref(c);
    if (i >= cs.list.size()) throw DomainError("crossing index out of range");
    deref(out);
    ClassificationOptions opts;
    if (options) {
      opts.max_step = options->max_step;
      opts.classifier = {options->radius, options->threshold};
      opts.outer_radius = options->outer_radius;
      opts.grid_extent = options->grid_extent;
      opts.grid_spacing = options->grid_spacing;
      opts.threads = options->threads;
    }
    const auto r = classify_crossing(cs.list[i], cs.family, cs.psi0, eta_left, eta_right, opts);
    *out = {to_profile(r.a_left), to_profile(r.b_left), to_profile(r.a_right),
            to_profile(r.b_right), r.exchanged ? 1 : 0};
  });
}

void kickho_crossings_free(kickho_crossings* c) { delete c; }

kickho_status kickho_husimi_create(const kickho_state* s, const kickho_husimi_grid* grid,
                                   unsigned threads, kickho_husimi** out) {
  return guarded([&] {
    const auto& g = deref(grid);
    emit(out, husimi_grid(deref(s).s,
                          HusimiGrid{g.x1_min, g.x1_max, g.x2_min, g.x2_max, g.n1, g.n2},
                          threads));
  });
}

kickho_status kickho_husimi_values(const kickho_husimi* h, double* out, size_t capacity) {
  return guarded([&] { write_doubles(deref(h).f.values(), out, capacity); });
}

double kickho_husimi_total_mass(const kickho_husimi* h) { return h ? h->f.total_mass() : 0.0; }

kickho_status kickho_husimi_localization(const kickho_husimi* h, double radius, double* out) {
  return guarded([&] {
    const double v = localization_fraction(deref(h).f, radius);
    deref(out) = v;
  });
}

kickho_status kickho_husimi_mass_beyond(const kickho_husimi* h, double radius, double* out) {
  return guarded([&] {
    const double v = mass_beyond(deref(h).f, radius);
    deref(out) = v;
  });
}

void kickho_husimi_free(kickho_husimi* h) { delete h; }

kickho_status kickho_convergence_run(const kickho_params* p, const size_t* sizes, size_t n_sizes,
                                     const kickho_initial* psi0, double threshold,
                                     kickho_convergence** out) {
  return guarded([&] {
    deref(sizes);
    emit(out, convergence_report(to_params(p), std::vector<std::size_t>(sizes, sizes + n_sizes),
                                 to_initial(psi0), threshold));
  });
}

kickho_status kickho_convergence_run_crossing(const kickho_params* p, const size_t* sizes,
                                              size_t n_sizes, const kickho_crossings* c, size_t i,
                                              kickho_convergence** out) {
  return guarded([&] {
    deref(sizes);
    const auto& list = deref(c).list;
    if (i >= list.size()) throw DomainError("crossing index out of range");
    const auto params = to_params(p).with_eta(list[i].eta_center);
    emit(out, convergence_report(params, std::vector<std::size_t>(sizes, sizes + n_sizes),
                                 std::vector<ComplexVector>{list[i].state_a, list[i].state_b}));
  });
}

kickho_status kickho_convergence_run_states(const kickho_params* p, const size_t* sizes,
                                            size_t n_sizes, const double* const* states_re_im,
                                            const size_t* lengths, size_t n_states,
                                            kickho_convergence** out) {
  return guarded([&] {
    deref(sizes);
    deref(states_re_im);
    deref(lengths);
    std::vector<ComplexVector> refs;
    for (std::size_t r = 0; r < n_states; ++r) {
      const double* v = states_re_im[r];
      if (v == nullptr) throw NullArgument();
      ComplexVector ref(static_cast<Eigen::Index>(lengths[r]));
      for (std::size_t k = 0; k < lengths[r]; ++k) {
        ref[static_cast<Eigen::Index>(k)] = cplx(v[2 * k], v[2 * k + 1]);
      }
      refs.push_back(std::move(ref));
    }
    emit(out, convergence_report(to_params(p), std::vector<std::size_t>(sizes, sizes + n_sizes),
                                 refs));
  });
}

kickho_status kickho_convergence_tracked_phase(const kickho_convergence* r, size_t k, size_t ref,
                                               double* out) {
  return guarded([&] {
    const auto& tp = deref(r).r.tracked_phases;
    if (k >= tp.size() || ref >= tp[k].size()) throw DomainError("tracked phase index out of range");
    deref(out) = tp[k][ref];
  });
}

size_t kickho_convergence_steps(const kickho_convergence* r) { return r ? r->r.steps.size() : 0; }

kickho_status kickho_convergence_step_get(const kickho_convergence* r, size_t i,
                                          kickho_convergence_step* out) {
  return guarded([&] {
    const auto& steps = deref(r).r.steps;
    if (i >= steps.size()) throw DomainError("step index out of range");
    const auto& s = steps[i];
    deref(out) = {s.from, s.to, s.max_drift, s.matched, s.min_match_overlap};
  });
}

int kickho_convergence_saturated(const kickho_convergence* r, size_t* size) {
  if (r == nullptr || !r->r.saturated_at) return 0;
  if (size) *size = *r->r.saturated_at;
  return 1;
}

void kickho_convergence_free(kickho_convergence* r) { delete r; }

}  // extern "C"
