#include "kickho/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>

#include "kickho/error.hpp"
#include "kickho/parallel.hpp"

namespace kickho {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAmbiguousOverlap = 0.1;

class BlasThreadGuard {
 public:
  explicit BlasThreadGuard(int n) : previous_(linalg::set_blas_threads(n)) {}
  ~BlasThreadGuard() { linalg::set_blas_threads(previous_); }
  BlasThreadGuard(const BlasThreadGuard&) = delete;
  BlasThreadGuard& operator=(const BlasThreadGuard&) = delete;

 private:
  int previous_;
};

std::string operator_context(const FloquetOperator& u) {
  std::ostringstream os;
  os.precision(10);
  if (const auto& p = u.params()) {
    os << "eta=" << p->eta() << " K=" << p->K() << " q=" << p->q() << " N=" << u.size();
  } else {
    os << "N=" << u.size();
  }
  return os.str();
}

// Fixes the arbitrary phase of an eigenvector: its largest component becomes
// real and positive.
void normalize_phase(Eigen::Ref<ComplexVector> v) {
  Eigen::Index k = 0;
  v.cwiseAbs2().maxCoeff(&k);
  const cplx c = v[k];
  if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

struct BlockEigen {
  std::vector<double> phases;
  ComplexMatrix vectors;
  std::vector<double> residuals;
  double modulus_defect = 0.0;
  double orthonormality_defect = 0.0;
};

BlockEigen block_eigen(const ComplexMatrix& b, const std::string& context) {
  const auto schur = linalg::complex_schur(b, context);
  const Eigen::Index n = b.rows();
  BlockEigen out;
  out.vectors = schur.z;
  out.phases.resize(static_cast<std::size_t>(n));
  out.residuals.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx lambda = schur.t(j, j);
    out.modulus_defect = std::max(out.modulus_defect, std::abs(std::abs(lambda) - 1.0));
    const double phi = wrap_phase(std::arg(lambda));
    out.phases[static_cast<std::size_t>(j)] = phi;
    normalize_phase(out.vectors.col(j));
  }
  const ComplexMatrix image = b * out.vectors;
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx e = std::polar(1.0, out.phases[static_cast<std::size_t>(j)]);
    out.residuals[static_cast<std::size_t>(j)] = (image.col(j) - e * out.vectors.col(j)).norm();
  }
  out.orthonormality_defect = linalg::unitarity_defect(out.vectors);
  return out;
}

double common_overlap(const ComplexVector& a, const ComplexVector& b) {
  const Eigen::Index m = std::min(a.size(), b.size());
  return std::norm(a.head(m).dot(b.head(m)));
}

struct Group {
  std::vector<std::size_t> levels;
};

std::vector<Group> degenerate_groups(const SweepPoint& point) {
  std::vector<Group> groups;
  for (std::size_t l = 0; l < point.levels.size(); ++l) {
    if (!groups.empty() &&
        circular_distance(point.levels[groups.back().levels.back()].phase,
                          point.levels[l].phase) < kDegeneracyGap) {
      groups.back().levels.push_back(l);
    } else {
      groups.push_back({{l}});
    }
  }
  if (groups.size() > 1 &&
      circular_distance(point.levels.back().phase, point.levels.front().phase) <
          kDegeneracyGap) {
    auto& first = groups.front().levels;
    first.insert(first.begin(), groups.back().levels.begin(), groups.back().levels.end());
    groups.pop_back();
  }
  return groups;
}

double group_overlap(const SweepPoint& pa, const Group& a, const SweepPoint& pb, const Group& b) {
  double s = 0.0;
  for (std::size_t i : a.levels) {
    for (std::size_t j : b.levels) s += common_overlap(pa.levels[i].vector, pb.levels[j].vector);
  }
  return std::sqrt(s / static_cast<double>(std::min(a.levels.size(), b.levels.size())));
}

struct PairEval {
  double gap = 0.0;
  double phase_a = 0.0;
  double phase_b = 0.0;
  ComplexVector a;
  ComplexVector b;
  double weight = 0.0;
};

// The two eigenstates with the largest weight in span{va, vb}; a is the one
// from which b lies counter-clockwise by less than pi.
PairEval pair_eval(const UnitaryFamily& family, double eta, const ComplexVector& va,
                   const ComplexVector& vb) {
  const auto spectrum = diagonalize(family(eta));
  const auto& z = spectrum.eigenvectors;
  const std::size_t n = spectrum.phases.size();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexVector col = z.col(static_cast<Eigen::Index>(j));
    w[j] = common_overlap(col, va) + common_overlap(col, vb);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                    [&](std::size_t x, std::size_t y) { return w[x] > w[y] || (w[x] == w[y] && x < y); });
  std::size_t ia = order[0];
  std::size_t ib = order[1];
  if (wrap_phase(spectrum.phases[ib] - spectrum.phases[ia]) < 0.0) std::swap(ia, ib);
  PairEval out;
  out.phase_a = spectrum.phases[ia];
  out.phase_b = spectrum.phases[ib];
  out.gap = circular_distance(out.phase_a, out.phase_b);
  out.a = z.col(static_cast<Eigen::Index>(ia));
  out.b = z.col(static_cast<Eigen::Index>(ib));
  out.weight = std::min(w[ia], w[ib]);
  return out;
}

double circular_midpoint(double a, double b) { return wrap_phase(a + 0.5 * wrap_phase(b - a)); }

double psi0_overlap(const ComplexVector& v, const StateVector& psi0) {
  if (v.size() != psi0.amplitudes().size()) {
    throw DimensionError("eigenvector and initial state live in different bases");
  }
  return std::norm(v.dot(psi0.amplitudes()));
}

struct Candidate {
  std::size_t branch_a;
  std::size_t branch_b;
  std::size_t point;
  std::size_t level_a;
  std::size_t level_b;
  double gap;
};

AvoidedCrossing resolve_candidate(const LevelDynamics& dynamics, const UnitaryFamily& family,
                                  const CrossingSearch& search, const Candidate& c) {
  const auto& pt = dynamics.points[c.point];
  const auto& la = pt.levels[c.level_a];
  const auto& lb = pt.levels[c.level_b];
  AvoidedCrossing out;
  out.branch_a = c.branch_a;
  out.branch_b = c.branch_b;
  out.eta_center = pt.eta;
  out.min_gap = c.gap;
  const bool a_first = wrap_phase(lb.phase - la.phase) >= 0.0;
  const auto& lo_level = a_first ? la : lb;
  const auto& hi_level = a_first ? lb : la;
  out.phase_a = lo_level.phase;
  out.phase_b = hi_level.phase;
  out.overlap_a = lo_level.overlap;
  out.overlap_b = hi_level.overlap;
  out.state_a = lo_level.vector;
  out.state_b = hi_level.vector;
  out.eta_tracked = pt.eta;
  out.tracked_a = lo_level.vector;
  out.tracked_b = hi_level.vector;
  out.phase_center = circular_midpoint(out.phase_a, out.phase_b);
  out.degenerate = c.gap < kDegeneracyGap;
  if (out.degenerate || !search.refine) return out;

  const double lo = dynamics.eta_grid[c.point - 1];
  const double hi = dynamics.eta_grid[c.point + 1];
  const ComplexVector& va = la.vector;
  const ComplexVector& vb = lb.vector;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x = b - g * (b - a);
  double y = a + g * (b - a);
  double fx = pair_eval(family, x, va, vb).gap;
  double fy = pair_eval(family, y, va, vb).gap;
  while (b - a > search.refine_tol) {
    if (fx < fy) {
      b = y;
      y = x;
      fy = fx;
      x = b - g * (b - a);
      fx = pair_eval(family, x, va, vb).gap;
    } else {
      a = x;
      x = y;
      fx = fy;
      y = a + g * (b - a);
      fy = pair_eval(family, y, va, vb).gap;
    }
  }
  const double eta = 0.5 * (a + b);
  const auto best = pair_eval(family, eta, va, vb);
  out.eta_center = eta;
  out.min_gap = best.gap;
  out.phase_a = best.phase_a;
  out.phase_b = best.phase_b;
  out.phase_center = circular_midpoint(best.phase_a, best.phase_b);
  out.state_a = best.a;
  out.state_b = best.b;
  out.overlap_a = psi0_overlap(best.a, dynamics.psi0);
  out.overlap_b = psi0_overlap(best.b, dynamics.psi0);
  out.subspace_weight = best.weight;
  const double margin = 2.0 * search.refine_tol;
  out.refined = eta - lo > margin && hi - eta > margin;
  out.degenerate = best.gap < kDegeneracyGap;
  return out;
}

PartnerProfile profile(const ContinuedState& s, const StateVector& psi0,
                       const ClassificationOptions& options) {
  PartnerProfile p;
  p.eta = s.eta;
  p.phase = s.phase;
  p.min_step_overlap = s.min_step_overlap;
  p.vector = s.vector;
  p.psi0_overlap = psi0_overlap(s.vector, psi0);
  const StateVector state(psi0.basis(), s.vector);
  const auto field = husimi_grid(state, square_grid(options.grid_extent, options.grid_spacing),
                                 options.threads);
  p.localization = localization_fraction(field, options.classifier.radius);
  p.outer_mass = mass_beyond(field, options.outer_radius);
  p.localized = p.localization > options.classifier.threshold;
  return p;
}

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw DomainError("convergence report needs at least two basis sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw DomainError("basis sizes must be strictly increasing");
  }
}

}  // namespace

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) throw DomainError("phase must be finite");
  double r = std::remainder(phi, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

double circular_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

QuasienergySpectrum diagonalize(const FloquetOperator& u) {
  const std::size_t n = u.size();
  const std::string context = operator_context(u);
  std::vector<double> phases;
  std::vector<int> parity;
  std::vector<double> residuals;
  ComplexMatrix vectors = ComplexMatrix::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  double modulus_defect = 0.0;
  double ortho_defect = 0.0;

  auto absorb = [&](const BlockEigen& be, const std::vector<std::size_t>& rows, int par) {
    for (std::size_t j = 0; j < be.phases.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(phases.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        vectors(static_cast<Eigen::Index>(rows[r]), col) =
            be.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      }
      phases.push_back(be.phases[j]);
      residuals.push_back(be.residuals[j]);
      parity.push_back(par);
    }
    modulus_defect = std::max(modulus_defect, be.modulus_defect);
    ortho_defect = std::max(ortho_defect, be.orthonormality_defect);
  };

  if (u.parity_blocked()) {
    for (int p = 0; p < 2; ++p) {
      absorb(block_eigen(u.block(p), context), parity_indices(n, p), p);
    }
  } else {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    absorb(block_eigen(u.matrix(), context), rows, -1);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return phases[x] < phases[y]; });

  QuasienergySpectrum out{u.basis(), {}, ComplexMatrix(vectors.rows(), vectors.cols()), {}, {},
                          modulus_defect, ortho_defect};
  out.phases.reserve(n);
  out.residuals.reserve(n);
  out.parity.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.phases.push_back(phases[order[j]]);
    out.residuals.push_back(residuals[order[j]]);
    out.parity.push_back(parity[order[j]]);
    out.eigenvectors.col(static_cast<Eigen::Index>(j)) =
        vectors.col(static_cast<Eigen::Index>(order[j]));
  }

  const double max_residual = *std::max_element(out.residuals.begin(), out.residuals.end());
  if (!(max_residual <= kResidualTolerance) || !(modulus_defect <= kResidualTolerance)) {
    std::ostringstream os;
    os << "eigendecomposition failed its accuracy check (" << context
       << "): max residual " << max_residual << ", max |lambda|-1 " << modulus_defect;
    throw NumericError(os.str());
  }
  return out;
}

std::vector<double> overlaps(const QuasienergySpectrum& spectrum, const StateVector& psi0) {
  if (psi0.basis() != spectrum.basis) {
    throw DimensionError("initial state and spectrum live in different bases");
  }
  const ComplexVector c = spectrum.eigenvectors.adjoint() * psi0.amplitudes();
  std::vector<double> out(static_cast<std::size_t>(c.size()));
  for (Eigen::Index j = 0; j < c.size(); ++j) out[static_cast<std::size_t>(j)] = std::norm(c[j]);
  return out;
}

std::vector<FilteredLevel> overlap_filter(const QuasienergySpectrum& spectrum,
                                          const StateVector& psi0, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("overlap threshold must lie in (0, 1)");
  }
  const auto ov = overlaps(spectrum, psi0);
  std::vector<FilteredLevel> out;
  for (std::size_t j = 0; j < ov.size(); ++j) {
    if (ov[j] >= threshold) {
      out.push_back({spectrum.phases[j], ov[j], j,
                     spectrum.eigenvectors.col(static_cast<Eigen::Index>(j))});
    }
  }
  return out;
}

UnitaryFamily kicked_oscillator_family(double K, int q, FockBasis basis) {
  build_params(K, q, 1.0);
  return [K, q, basis](double eta) { return floquet_operator(build_params(K, q, eta), basis); };
}

std::vector<double> LevelDynamics::failed_etas() const {
  std::vector<double> out;
  for (const auto& p : points) {
    if (p.failed) out.push_back(p.eta);
  }
  return out;
}

LevelDynamics eta_sweep(const UnitaryFamily& family, const std::vector<double>& eta_grid,
                        const StateVector& psi0, double threshold, unsigned threads,
                        std::string psi0_description) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("overlap threshold must lie in (0, 1)");
  }
  if (eta_grid.empty()) throw DomainError("eta grid is empty");
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (!std::isfinite(eta_grid[i]) || !(eta_grid[i] > 0.0)) {
      throw DomainError("eta grid values must be positive and finite");
    }
    if (i > 0 && !(eta_grid[i] > eta_grid[i - 1])) {
      throw DomainError("eta grid must be strictly increasing");
    }
  }
  LevelDynamics out{eta_grid, std::vector<SweepPoint>(eta_grid.size()), threshold, psi0,
                    std::move(psi0_description)};
  BlasThreadGuard guard(1);
  parallel_for(eta_grid.size(), threads, [&](std::size_t i) {
    SweepPoint& point = out.points[i];
    point.eta = eta_grid[i];
    try {
      const auto spectrum = diagonalize(family(eta_grid[i]));
      const auto ov = overlaps(spectrum, psi0);
      double total = 0.0;
      for (double o : ov) total += o;
      point.completeness = total;
      if (std::abs(total - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os << "eigenbasis incomplete at eta=" << eta_grid[i] << ": sum of overlaps " << total;
        throw NumericError(os.str());
      }
      point.levels = overlap_filter(spectrum, psi0, threshold);
    } catch (const Error& e) {
      point.failed = true;
      point.levels.clear();
      point.error = e.what();
    }
  });
  return out;
}

LevelDynamics eta_sweep(double K, int q, FockBasis basis, const std::vector<double>& eta_grid,
                        const InitialState& psi0, double threshold, unsigned threads) {
  return eta_sweep(kicked_oscillator_family(K, q, basis), eta_grid, make_state(psi0, basis),
                   threshold, threads, psi0.describe());
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(step) || !(step > 0.0) ||
      !(to >= from)) {
    throw DomainError("grid needs finite from <= to and a positive step");
  }
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = from + static_cast<double>(i) * step;
  return out;
}

std::vector<Branch> track_bands(const LevelDynamics& dynamics) {
  std::vector<Branch> branches;
  std::vector<Group> prev_groups;
  std::vector<std::size_t> prev_branch;
  for (std::size_t i = 0; i < dynamics.points.size(); ++i) {
    const auto& point = dynamics.points[i];
    if (point.failed) {
      prev_groups.clear();
      prev_branch.clear();
      continue;
    }
    const auto groups = degenerate_groups(point);
    std::vector<std::size_t> branch_of(groups.size(), SIZE_MAX);
    std::vector<double> best(groups.size(), 0.0);
    if (!prev_groups.empty()) {
      const auto& prev = dynamics.points[i - 1];
      struct Link {
        double overlap;
        std::size_t from;
        std::size_t to;
      };
      std::vector<Link> links;
      for (std::size_t a = 0; a < prev_groups.size(); ++a) {
        for (std::size_t b = 0; b < groups.size(); ++b) {
          const double o = group_overlap(prev, prev_groups[a], point, groups[b]);
          best[b] = std::max(best[b], o);
          if (o >= kContinuationOverlap) links.push_back({o, a, b});
        }
      }
      std::stable_sort(links.begin(), links.end(),
                       [](const Link& x, const Link& y) { return x.overlap > y.overlap; });
      std::vector<bool> used(prev_groups.size(), false);
      for (const auto& l : links) {
        if (used[l.from] || branch_of[l.to] != SIZE_MAX) continue;
        used[l.from] = true;
        branch_of[l.to] = prev_branch[l.from];
      }
    }
    for (std::size_t b = 0; b < groups.size(); ++b) {
      const BranchNode node{i, groups[b].levels.front(), groups[b].levels.size()};
      if (branch_of[b] == SIZE_MAX) {
        Branch br;
        br.ambiguous_start = best[b] >= kAmbiguousOverlap;
        br.nodes.push_back(node);
        branch_of[b] = branches.size();
        branches.push_back(std::move(br));
      } else {
        branches[branch_of[b]].nodes.push_back(node);
      }
    }
    prev_groups = groups;
    prev_branch = branch_of;
  }
  return branches;
}

std::vector<AvoidedCrossing> find_avoided_crossings(const LevelDynamics& dynamics,
                                                    const std::vector<Branch>& branches,
                                                    const UnitaryFamily& family,
                                                    const CrossingSearch& search) {
  if (!(search.prominence >= 1.0)) throw DomainError("prominence must be at least 1");
  if (!(search.max_gap > 0.0)) throw DomainError("max_gap must be positive");
  if (!(search.refine_tol > 0.0)) throw DomainError("refine_tol must be positive");

  std::vector<Candidate> candidates;
  std::vector<double> gaps;
  for (std::size_t x = 0; x < branches.size(); ++x) {
    const auto& bx = branches[x];
    for (std::size_t y = x + 1; y < branches.size(); ++y) {
      const auto& by = branches[y];
      const std::size_t lo = std::max(bx.first_point(), by.first_point());
      const std::size_t hi = std::min(bx.last_point(), by.last_point());
      if (hi < lo + 2) continue;
      const std::size_t ox = lo - bx.first_point();
      const std::size_t oy = lo - by.first_point();
      const std::size_t len = hi - lo + 1;
      gaps.resize(len);
      for (std::size_t k = 0; k < len; ++k) {
        const auto& pt = dynamics.points[lo + k];
        gaps[k] = circular_distance(pt.levels[bx.nodes[ox + k].level].phase,
                                    pt.levels[by.nodes[oy + k].level].phase);
      }
      double left_max = gaps[0];
      std::vector<double> right_max(len);
      right_max[len - 1] = gaps[len - 1];
      for (std::size_t k = len - 1; k-- > 0;) right_max[k] = std::max(right_max[k + 1], gaps[k]);
      for (std::size_t k = 1; k + 1 < len; ++k) {
        const double g = gaps[k];
        const bool minimum = g <= gaps[k - 1] && g <= gaps[k + 1] &&
                             (g < gaps[k - 1] || g < gaps[k + 1]);
        if (minimum && g <= search.max_gap && left_max >= search.prominence * g &&
            right_max[k + 1] >= search.prominence * g) {
          const auto& pt = dynamics.points[lo + k];
          const std::size_t la = bx.nodes[ox + k].level;
          const std::size_t lb = by.nodes[oy + k].level;
          if (std::min(pt.levels[la].overlap, pt.levels[lb].overlap) >=
              search.min_partner_overlap) {
            candidates.push_back({x, y, lo + k, la, lb, g});
          }
        }
        left_max = std::max(left_max, g);
      }
    }
  }

  std::vector<AvoidedCrossing> out(candidates.size());
  {
    BlasThreadGuard guard(1);
    parallel_for(candidates.size(), search.threads, [&](std::size_t i) {
      out[i] = resolve_candidate(dynamics, family, search, candidates[i]);
    });
  }
  std::stable_sort(out.begin(), out.end(), [](const AvoidedCrossing& a, const AvoidedCrossing& b) {
    return a.eta_center < b.eta_center ||
           (a.eta_center == b.eta_center && a.phase_center < b.phase_center);
  });
  return out;
}

std::vector<ContinuedState> continue_states(const UnitaryFamily& family,
                                            const std::vector<ComplexVector>& states,
                                            double eta_from, double eta_to, double max_step) {
  if (!(max_step > 0.0)) throw DomainError("continuation step must be positive");
  if (states.empty()) throw DomainError("no states to continue");
  std::vector<ContinuedState> current;
  for (const auto& v : states) current.push_back({eta_from, 0.0, v, 1.0});
  const auto steps =
      std::max<long>(1, static_cast<long>(std::ceil(std::abs(eta_to - eta_from) / max_step - 1e-9)));
  for (long s = 1; s <= steps; ++s) {
    const double eta = eta_from + (eta_to - eta_from) * static_cast<double>(s) /
                                      static_cast<double>(steps);
    const auto spectrum = diagonalize(family(eta));
    const auto n = static_cast<std::size_t>(spectrum.eigenvectors.cols());
    if (n < current.size()) throw DimensionError("more states to continue than eigenstates");
    struct Link {
      double overlap;
      std::size_t state;
      std::size_t eig;
    };
    std::vector<Link> links;
    for (std::size_t k = 0; k < current.size(); ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        const double o = common_overlap(current[k].vector,
                                        spectrum.eigenvectors.col(static_cast<Eigen::Index>(j)));
        links.push_back({o, k, j});
      }
    }
    std::stable_sort(links.begin(), links.end(),
                     [](const Link& x, const Link& y) { return x.overlap > y.overlap; });
    std::vector<bool> done(current.size(), false);
    std::vector<bool> taken(n, false);
    std::size_t assigned = 0;
    for (const auto& l : links) {
      if (assigned == current.size()) break;
      if (done[l.state] || taken[l.eig]) continue;
      done[l.state] = true;
      taken[l.eig] = true;
      ++assigned;
      auto& c = current[l.state];
      c.eta = eta;
      c.phase = spectrum.phases[l.eig];
      c.vector = spectrum.eigenvectors.col(static_cast<Eigen::Index>(l.eig));
      c.min_step_overlap = std::min(c.min_step_overlap, std::sqrt(l.overlap));
    }
  }
  return current;
}

CrossingClassification classify_crossing(const AvoidedCrossing& crossing,
                                         const UnitaryFamily& family, const StateVector& psi0,
                                         double eta_left, double eta_right,
                                         const ClassificationOptions& options) {
  if (!(eta_left < crossing.eta_tracked && crossing.eta_tracked < eta_right)) {
    throw DomainError("classification ends must bracket the crossing");
  }
  const std::vector<ComplexVector> pair{crossing.tracked_a, crossing.tracked_b};
  const auto left = continue_states(family, pair, crossing.eta_tracked, eta_left, options.max_step);
  const auto right =
      continue_states(family, pair, crossing.eta_tracked, eta_right, options.max_step);
  CrossingClassification out;
  out.a_left = profile(left[0], psi0, options);
  out.b_left = profile(left[1], psi0, options);
  out.a_right = profile(right[0], psi0, options);
  out.b_right = profile(right[1], psi0, options);
  out.exchanged = (out.a_left.localization > out.b_left.localization) !=
                  (out.a_right.localization > out.b_right.localization);
  return out;
}

ConvergenceReport convergence_report(const SystemParams& params,
                                     const std::vector<std::size_t>& sizes,
                                     const InitialState& psi0, double threshold) {
  check_sizes(sizes);
  ConvergenceReport report;
  report.sizes = sizes;
  std::vector<FilteredLevel> previous;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const FockBasis basis(sizes[i]);
    const auto spectrum = diagonalize(floquet_operator(params, basis));
    if (i > 0) {
      ConvergenceStep step{sizes[i - 1], sizes[i], 0.0, 0, 1.0};
      for (const auto& level : previous) {
        double best = -1.0;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < spectrum.phases.size(); ++j) {
          const double o = common_overlap(level.vector,
                                          spectrum.eigenvectors.col(static_cast<Eigen::Index>(j)));
          if (o > best) {
            best = o;
            best_j = j;
          }
        }
        step.min_match_overlap = std::min(step.min_match_overlap, best);
        if (best >= kContinuationOverlap) ++step.matched;
        step.max_drift =
            std::max(step.max_drift, circular_distance(level.phase, spectrum.phases[best_j]));
      }
      report.steps.push_back(step);
    }
    previous = overlap_filter(spectrum, make_state(psi0, basis), threshold);
  }
  for (const auto& s : report.steps) {
    if (s.max_drift < kSaturationDrift) {
      report.saturated_at = s.from;
      break;
    }
  }
  return report;
}

ConvergenceReport convergence_report(const SystemParams& params,
                                     const std::vector<std::size_t>& sizes,
                                     const std::vector<ComplexVector>& references) {
  check_sizes(sizes);
  if (references.empty()) throw DomainError("no reference states given");
  ConvergenceReport report;
  report.sizes = sizes;
  std::vector<double> match_quality;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto spectrum = diagonalize(floquet_operator(params, FockBasis(sizes[i])));
    std::vector<double> phases;
    double worst = 1.0;
    std::size_t matched = 0;
    for (const auto& ref : references) {
      double best = -1.0;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < spectrum.phases.size(); ++j) {
        const double o =
            common_overlap(ref, spectrum.eigenvectors.col(static_cast<Eigen::Index>(j)));
        if (o > best) {
          best = o;
          best_j = j;
        }
      }
      worst = std::min(worst, best);
      if (best >= kContinuationOverlap) ++matched;
      phases.push_back(spectrum.phases[best_j]);
    }
    report.tracked_phases.push_back(std::move(phases));
    match_quality.push_back(worst);
    if (i > 0) {
      ConvergenceStep step{sizes[i - 1], sizes[i], 0.0, matched,
                           std::min(match_quality[i - 1], worst)};
      for (std::size_t r = 0; r < references.size(); ++r) {
        step.max_drift = std::max(step.max_drift, circular_distance(report.tracked_phases[i - 1][r],
                                                                    report.tracked_phases[i][r]));
      }
      report.steps.push_back(step);
    }
  }
  for (const auto& s : report.steps) {
    if (s.max_drift < kSaturationDrift) {
      report.saturated_at = s.from;
      break;
    }
  }
  return report;
}

}  // namespace kickho
