#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "capi_handles.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "output.hpp"

namespace kickho::cli {

namespace {

using nlohmann::json;

struct Context {
  Config config;
  std::ostream& out;
  std::ostream& err;
  unsigned threads = 1;
};

using CommandFn = int (*)(Context&);

struct Command {
  std::string name;
  std::string description;
  std::vector<KeySpec> keys;
  CommandFn run;
};

std::vector<KeySpec> join(std::initializer_list<std::vector<KeySpec>> parts) {
  std::vector<KeySpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<KeySpec> system_keys(const std::string& eta) {
  std::vector<KeySpec> keys{{"K", "2.0", "stochasticity parameter"},
                            {"q", "6", "resonance order (kick period 2*pi/(q nu))"}};
  if (!eta.empty()) keys.push_back({"eta", eta, "Lamb-Dicke parameter"});
  return keys;
}

std::vector<KeySpec> initial_keys() {
  return {{"initial", "vacuum", "initial state: vacuum or displaced"},
          {"x1", "0", "displaced-state centre, Re beta = v/(2 eta)"},
          {"x2", "0", "displaced-state centre, Im beta = u/(2 eta)"}};
}

std::vector<KeySpec> grid_keys(const std::string& from, const std::string& to,
                               const std::string& step) {
  return {{"eta-from", from, "first eta of the grid"},
          {"eta-to", to, "last eta of the grid"},
          {"eta-step", step, "eta spacing"}};
}

std::vector<KeySpec> common_keys(const std::string& out) {
  return {{"out", out, "main CSV output path"},
          {"plot", "false", "also write a gnuplot script next to the CSV", true},
          {"threads", "", "worker threads (default: KICKHO_THREADS, else all cores)"}};
}

int q_of(const Config& c) {
  const long q = c.integer("q");
  if (q < std::numeric_limits<int>::min() || q > std::numeric_limits<int>::max()) {
    throw ConfigError("invalid value for 'q': out of range");
  }
  return static_cast<int>(q);
}

kickho_params params_of(const Config& c, double eta) {
  kickho_params p{c.real("K"), q_of(c), eta};
  if (kickho_params_check(&p, nullptr, nullptr, nullptr) != KICKHO_OK) {
    throw ConfigError(std::string("invalid parameters: ") + kickho_last_error());
  }
  return p;
}

kickho_initial initial_of(const Config& c) {
  const auto& kind = c.raw("initial");
  if (kind == "vacuum") return {KICKHO_INITIAL_VACUUM, 0.0, 0.0};
  if (kind == "displaced") return {KICKHO_INITIAL_DISPLACED, c.real("x1"), c.real("x2")};
  throw ConfigError("invalid value for 'initial': \"" + kind + "\" (expected vacuum or displaced)");
}

long at_least(const Config& c, const std::string& key, long min) {
  const long v = c.integer(key);
  if (v < min) {
    throw ConfigError("invalid value for '" + key + "': must be >= " + std::to_string(min));
  }
  return v;
}

double unit_interval(const Config& c, const std::string& key) {
  const double v = c.real(key);
  if (!(v > 0.0 && v < 1.0)) throw ConfigError("invalid value for '" + key + "': must lie in (0, 1)");
  return v;
}

std::vector<double> eta_grid(const Config& c) {
  const double from = c.positive("eta-from");
  const double to = c.positive("eta-to");
  const double step = c.positive("eta-step");
  if (!(to >= from)) throw ConfigError("invalid value for 'eta-to': must be >= eta-from");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = from + static_cast<double>(i) * step;
  return out;
}

unsigned resolve_threads(const Config& c) {
  std::string text = c.raw("threads");
  std::string key = "threads";
  if (text.empty()) {
    const char* env = std::getenv("KICKHO_THREADS");
    if (env == nullptr || *env == '\0') return std::max(1u, kickho_default_threads());
    text = env;
    key = "KICKHO_THREADS";
  }
  const long n = parse_integer(key, text);
  if (n < 1 || n > 4096) throw ConfigError("invalid value for '" + key + "': must be in 1..4096");
  return static_cast<unsigned>(n);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
  return out;
}

Provenance provenance(const Context& ctx, std::vector<std::string> notes) {
  auto config = ctx.config.resolved();
  for (auto& [k, v] : config) {
    if (k == "threads") v = std::to_string(ctx.threads);
  }
  return {ctx.config.command(), kickho_version(), std::move(config), std::move(notes)};
}

struct PlotSpec {
  PlotKind kind;
  std::string title;
  std::size_t xcol;
  std::size_t ycol;
};

void write_outputs(const Context& ctx, const std::string& path, const Provenance& prov,
                   const Table& table, const json& summary, const PlotSpec& plot) {
  write_csv(path, prov, table);
  write_sidecar(path + ".json", prov, table, summary);
  if (ctx.config.flag("plot")) {
    write_plot_script(path + ".gp", path, plot.kind, plot.title, table.columns, plot.xcol,
                      plot.ycol);
  }
  ctx.out << "wrote " << path << " (" << table.rows.size() << " rows)\n";
}

const char* kPhaseConvention =
    "phase convention: U|e> = exp(+i phase)|e>, phase in (-pi, pi]";

// ---------------------------------------------------------------- heat

int cmd_heat(Context& ctx) {
  const auto& c = ctx.config;
  const auto p = params_of(c, c.positive("eta"));
  const long kicks = at_least(c, "kicks", 0);
  const auto init = initial_of(c);
  const auto fixed = c.size_or_auto("basis");
  const long start = at_least(c, "basis-start", 2);
  const long cap = at_least(c, "basis-cap", start);

  Heating h;
  if (fixed) {
    const auto n = static_cast<std::size_t>(*fixed);
    auto u = make<Floquet>(kickho_floquet_create, &p, n);
    auto s = make<State>(kickho_state_create, &init, n);
    h = make<Heating>(kickho_heating_run, u.get(), static_cast<int64_t>(kicks), s.get());
  } else {
    h = make<Heating>(kickho_heating_run_auto, &p, static_cast<int64_t>(kicks), &init,
                      static_cast<std::size_t>(start), static_cast<std::size_t>(cap));
  }
  kickho_heating_info info{};
  check(kickho_heating_info_get(h.get(), &info));
  const auto len = static_cast<std::size_t>(kicks) + 1;
  std::vector<double> energy(len), leak(len);
  check(kickho_heating_energies(h.get(), energy.data(), len));
  check(kickho_heating_leakage(h.get(), leak.data(), len));

  Table table{{"kick", "energy", "leakage"}, {}};
  for (std::size_t k = 0; k < len; ++k) {
    table.rows.push_back({static_cast<double>(k), energy[k], leak[k]});
  }
  const auto prov = provenance(
      ctx, {"N = " + std::to_string(info.basis_size),
            "energy = <a^dag a> + 1/2 in units of hbar*nu, recorded after kick and free rotation",
            "max_leakage = " + format_real(info.max_leakage),
            "doubling_change = " + format_real(info.doubling_change),
            std::string("converged = ") + (info.converged ? "true" : "false")});
  const json summary{{"N", info.basis_size},
                     {"max_leakage", info.max_leakage},
                     {"doubling_change", info.doubling_change},
                     {"sizes_tried", info.sizes_tried},
                     {"converged", info.converged != 0},
                     {"final_energy", energy.back()}};
  write_outputs(ctx, c.raw("out"), prov, table, summary,
                {PlotKind::Lines, "mean energy vs kicks", 0, 1});
  if (!info.converged) {
    ctx.err << "heat: basis did not converge (max leakage " << info.max_leakage
            << ", doubling change " << info.doubling_change << ")\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- classical

int cmd_classical(Context& ctx) {
  const auto& c = ctx.config;
  const auto p = params_of(c, c.positive("eta"));
  const long kicks = at_least(c, "kicks", 0);
  const long ensemble = at_least(c, "ensemble", 1);
  const long seed = at_least(c, "seed", 0);
  const long traj_kicks = at_least(c, "trajectory-kicks", 0);
  const long bins = at_least(c, "bins", 1);
  const double v0 = c.real("v0");
  const double u0 = c.real("u0");

  const auto len = static_cast<std::size_t>(kicks) + 1;
  std::vector<double> energy(len);
  std::size_t escaped = 0;
  check(kickho_classical_heating(&p, static_cast<std::size_t>(ensemble),
                                 static_cast<uint64_t>(seed), kicks, ctx.threads, energy.data(),
                                 len, &escaped));

  auto traj = make<Trajectory>(kickho_trajectory_create, &p, v0, u0,
                               static_cast<int64_t>(traj_kicks));
  const std::size_t npts = kickho_trajectory_length(traj.get());
  std::vector<double> v(npts), u(npts);
  check(kickho_trajectory_points(traj.get(), v.data(), u.data(), npts));
  double max_abs = 0.0;
  double max_r2 = 0.0;
  for (std::size_t i = 0; i < npts; ++i) {
    max_abs = std::max({max_abs, std::abs(v[i]), std::abs(u[i])});
    max_r2 = std::max(max_r2, v[i] * v[i] + u[i] * u[i]);
  }
  double range = 0.0;
  if (c.raw("range") == "auto") {
    range = max_abs > 0.0 ? max_abs * 1.0001 : 1.0;
  } else {
    range = c.positive("range");
  }
  const kickho_histogram_grid grid{-range, range, -range, range,
                                   static_cast<std::size_t>(bins), static_cast<std::size_t>(bins)};
  auto hist = make<Histogram>(kickho_histogram_create, traj.get(), &grid);
  std::vector<uint64_t> counts(grid.nv * grid.nu);
  check(kickho_histogram_counts(hist.get(), counts.data(), counts.size()));
  uint64_t recorded = 0, overflow = 0;
  std::size_t occupied = 0;
  check(kickho_histogram_summary(hist.get(), &recorded, &overflow, &occupied));

  const double web_radius2 = std::pow(4.0 * std::numbers::pi, 2);
  const bool escaped_traj = kickho_trajectory_escaped(traj.get()) != 0;
  const auto prov = provenance(
      ctx, {"energy = (v^2 + u^2)/(4 eta^2) averaged over the ensemble, escaped points excluded",
            "ensemble_escaped = " + std::to_string(escaped),
            "trajectory_points = " + std::to_string(npts),
            "trajectory_max_radius2 = " + format_real(max_r2),
            "histogram_range = " + format_real(range),
            "histogram_occupied = " + std::to_string(occupied),
            "histogram_overflow = " + std::to_string(overflow)});

  const std::string path = c.raw("out");
  Table main{{"kick", "energy"}, {}};
  for (std::size_t k = 0; k < len; ++k) main.rows.push_back({static_cast<double>(k), energy[k]});
  const json summary{{"ensemble_escaped", escaped},
                     {"final_energy", energy.back()},
                     {"trajectory_points", npts},
                     {"trajectory_escaped", escaped_traj},
                     {"trajectory_max_radius2", max_r2},
                     {"reached_4pi", max_r2 > web_radius2},
                     {"histogram_occupied", occupied},
                     {"histogram_overflow", overflow},
                     {"histogram_recorded", recorded}};
  write_outputs(ctx, path, prov, main, summary,
                {PlotKind::Lines, "classical ensemble energy", 0, 1});

  Table tt{{"kick", "v", "u"}, {}};
  for (std::size_t i = 0; i < npts; ++i) tt.rows.push_back({static_cast<double>(i), v[i], u[i]});
  const auto tpath = derived_path(path, "trajectory");
  write_csv(tpath, prov, tt);
  if (c.flag("plot")) {
    write_plot_script(tpath + ".gp", tpath, PlotKind::Points, "single trajectory", tt.columns, 1, 2);
  }
  ctx.out << "wrote " << tpath << " (" << tt.rows.size() << " rows)\n";

  Table ht{{"v", "u", "count"}, {}};
  const double dv = (grid.v_max - grid.v_min) / static_cast<double>(grid.nv);
  const double du = (grid.u_max - grid.u_min) / static_cast<double>(grid.nu);
  for (std::size_t iv = 0; iv < grid.nv; ++iv) {
    for (std::size_t iu = 0; iu < grid.nu; ++iu) {
      ht.rows.push_back({grid.v_min + (static_cast<double>(iv) + 0.5) * dv,
                         grid.u_min + (static_cast<double>(iu) + 0.5) * du,
                         static_cast<double>(counts[iv * grid.nu + iu])});
    }
  }
  const auto hpath = derived_path(path, "histogram");
  write_csv(hpath, prov, ht);
  if (c.flag("plot")) {
    write_plot_script(hpath + ".gp", hpath, PlotKind::Grid, "trajectory occupancy", ht.columns, 0, 1);
  }
  ctx.out << "wrote " << hpath << " (" << ht.rows.size() << " rows)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = eta_grid(c);
  params_of(c, grid.front());
  const auto init = initial_of(c);
  const long n = at_least(c, "basis", 2);
  const double threshold = unit_interval(c, "threshold");

  auto sweep = make<Sweep>(kickho_sweep_run, c.real("K"), q_of(c), static_cast<std::size_t>(n),
                           grid.data(), grid.size(), &init, threshold, ctx.threads);
  Table table{{"eta", "phase", "overlap", "branch"}, {}};
  std::vector<double> failed;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double eta = 0.0;
    std::size_t levels = 0;
    int fail = 0;
    check(kickho_sweep_point(sweep.get(), i, &eta, &levels, &fail));
    if (fail) {
      failed.push_back(eta);
      continue;
    }
    std::vector<double> ph(levels), ov(levels);
    std::vector<std::size_t> br(levels);
    check(kickho_sweep_levels(sweep.get(), i, ph.data(), ov.data(), levels));
    check(kickho_sweep_branch_ids(sweep.get(), i, br.data(), levels));
    for (std::size_t l = 0; l < levels; ++l) {
      table.rows.push_back({eta, ph[l], ov[l], static_cast<double>(br[l])});
    }
  }
  std::size_t branches = 0;
  check(kickho_sweep_branch_count(sweep.get(), &branches));
  std::vector<std::string> notes{kPhaseConvention, "N = " + std::to_string(n),
                                 "overlap = |<e|psi0>|^2",
                                 "branches = " + std::to_string(branches)};
  if (!failed.empty()) notes.push_back("failed eta = " + join_numbers(failed));
  const json summary{{"N", n},
                     {"points", grid.size()},
                     {"branches", branches},
                     {"failed_eta", failed},
                     {"phase_convention", "exp(+i phase)"}};
  write_outputs(ctx, c.raw("out"), provenance(ctx, notes), table, summary,
                {PlotKind::Points, "filtered quasienergies", 0, 1});
  if (!failed.empty()) {
    ctx.err << "sweep: " << failed.size() << " eta values failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- crossings

int cmd_crossings(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = eta_grid(c);
  const auto p = params_of(c, grid.front());
  const auto init = initial_of(c);
  const long n = at_least(c, "basis", 2);
  const double visible = unit_interval(c, "threshold");
  const double track = unit_interval(c, "track-threshold");
  if (track > visible) throw ConfigError("invalid value for 'track-threshold': must not exceed threshold");

  kickho_crossing_options opts;
  kickho_crossing_options_default(&opts);
  opts.refine_tol = c.positive("refine-tol");
  opts.prominence = c.real("prominence");
  opts.max_gap = c.positive("max-gap");
  opts.min_partner_overlap = visible;
  opts.refine = c.flag("refine") ? 1 : 0;
  opts.threads = ctx.threads;

  auto sweep = make<Sweep>(kickho_sweep_run, p.K, p.q, static_cast<std::size_t>(n), grid.data(),
                           grid.size(), &init, track, ctx.threads);
  auto found = make<Crossings>(kickho_crossings_find, sweep.get(), &opts);
  const std::size_t count = kickho_crossings_count(found.get());

  const bool classify = c.flag("classify");
  kickho_classify_options copts;
  kickho_classify_options_default(&copts);
  copts.max_step = c.positive("continuation-step");
  copts.radius = c.positive("radius");
  copts.threshold = unit_interval(c, "localization-threshold");
  copts.outer_radius = c.positive("outer-radius");
  copts.threads = ctx.threads;
  const double offset = c.positive("classify-offset");

  Table table{{"eta_center", "phase_center", "min_gap", "phase_a", "phase_b", "overlap_a",
               "overlap_b", "refined", "degenerate"},
              {}};
  if (classify) {
    for (const char* col : {"loc_a_left", "loc_b_left", "loc_a_right", "loc_b_right",
                            "outer_a_left", "outer_b_left", "outer_a_right", "outer_b_right",
                            "exchanged"}) {
      table.columns.push_back(col);
    }
  }
  json list = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    kickho_crossing_info x{};
    check(kickho_crossings_get(found.get(), i, &x));
    std::vector<double> row{x.eta_center, x.phase_center, x.min_gap,
                            x.phase_a,    x.phase_b,      x.overlap_a,
                            x.overlap_b,  static_cast<double>(x.refined),
                            static_cast<double>(x.degenerate)};
    json item{{"eta_center", x.eta_center}, {"phase_center", x.phase_center},
              {"min_gap", x.min_gap},       {"refined", x.refined != 0},
              {"degenerate", x.degenerate != 0}};
    if (classify) {
      kickho_classification r{};
      check(kickho_crossings_classify(found.get(), i, x.eta_tracked - offset, x.eta_tracked + offset,
                                      &copts, &r));
      row.insert(row.end(), {r.a_left.localization, r.b_left.localization,
                             r.a_right.localization, r.b_right.localization,
                             r.a_left.outer_mass, r.b_left.outer_mass, r.a_right.outer_mass,
                             r.b_right.outer_mass, static_cast<double>(r.exchanged)});
      item["exchanged"] = r.exchanged != 0;
    }
    table.rows.push_back(std::move(row));
    list.push_back(std::move(item));
  }
  const auto prov = provenance(
      ctx, {kPhaseConvention, "N = " + std::to_string(n),
            "gap = circular distance of the two phases; a is the lower partner",
            "crossings = " + std::to_string(count)});
  write_outputs(ctx, c.raw("out"), prov, table, json{{"N", n}, {"crossings", list}},
                {PlotKind::Points, "avoided crossings", 0, 1});
  return kExitOk;
}

// ---------------------------------------------------------------- husimi

int cmd_husimi(Context& ctx) {
  const auto& c = ctx.config;
  const auto p = params_of(c, c.positive("eta"));
  const auto init = initial_of(c);
  const auto n = static_cast<std::size_t>(at_least(c, "basis", 2));
  const double extent = c.positive("extent");
  const double spacing = c.positive("spacing");
  const double radius = c.positive("radius");
  const double outer = c.positive("outer-radius");
  const auto& which = c.raw("state");

  auto psi0 = make<State>(kickho_state_create, &init, n);
  State target;
  std::vector<std::string> notes{"N = " + std::to_string(n), "coordinates x1 = v/(2 eta), x2 = u/(2 eta)"};
  json summary{{"N", n}};
  if (which == "initial") {
    target = std::move(psi0);
  } else if (which == "eigen") {
    const double threshold = unit_interval(c, "threshold");
    const double want = c.real("target-phase");
    auto u = make<Floquet>(kickho_floquet_create, &p, n);
    auto spec = make<Spectrum>(kickho_spectrum_create, u.get());
    std::vector<double> phases(n), ov(n);
    check(kickho_spectrum_phases(spec.get(), phases.data(), n));
    check(kickho_spectrum_overlaps(spec.get(), psi0.get(), ov.data(), n));
    std::size_t best = n;
    double best_d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ov[j] < threshold) continue;
      const double d = std::abs(std::remainder(phases[j] - want, 2.0 * std::numbers::pi));
      if (best == n || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == n) {
      throw ApiError(KICKHO_ERR_NUMERIC, "no eigenstate has overlap >= threshold with the initial state");
    }
    std::vector<double> amps(2 * n);
    check(kickho_spectrum_eigenvector(spec.get(), best, amps.data(), amps.size()));
    target = make<State>(kickho_state_from_amplitudes, amps.data(), n);
    notes.push_back(kPhaseConvention);
    notes.push_back("eigenstate phase = " + format_real(phases[best]));
    notes.push_back("eigenstate overlap = " + format_real(ov[best]));
    summary["phase"] = phases[best];
    summary["overlap"] = ov[best];
  } else {
    throw ConfigError("invalid value for 'state': \"" + which + "\" (expected initial or eigen)");
  }

  const auto nodes = static_cast<std::size_t>(std::llround(2.0 * extent / spacing)) + 1;
  const kickho_husimi_grid grid{-extent, extent, -extent, extent, nodes, nodes};
  auto field = make<Husimi>(kickho_husimi_create, target.get(), &grid, ctx.threads);
  std::vector<double> values(nodes * nodes);
  check(kickho_husimi_values(field.get(), values.data(), values.size()));
  double loc = 0.0, beyond = 0.0;
  check(kickho_husimi_localization(field.get(), radius, &loc));
  check(kickho_husimi_mass_beyond(field.get(), outer, &beyond));
  const double mass = kickho_husimi_total_mass(field.get());
  notes.push_back("localization_fraction = " + format_real(loc));
  notes.push_back("mass_beyond_outer_radius = " + format_real(beyond));
  notes.push_back("total_mass = " + format_real(mass));
  summary["localization_fraction"] = loc;
  summary["mass_beyond_outer_radius"] = beyond;
  summary["total_mass"] = mass;

  Table table{{"x1", "x2", "value"}, {}};
  const double d = 2.0 * extent / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      table.rows.push_back({-extent + static_cast<double>(i) * d,
                            -extent + static_cast<double>(j) * d, values[i * nodes + j]});
    }
  }
  write_outputs(ctx, c.raw("out"), provenance(ctx, notes), table, summary,
                {PlotKind::Grid, "Husimi Q", 0, 1});
  return kExitOk;
}

// ---------------------------------------------------------------- etascan

struct ScanPoint {
  double energy = 0.0;
  double leakage = 0.0;
  std::size_t basis = 0;
  bool converged = false;
};

int cmd_etascan(Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = eta_grid(c);
  for (double eta : {grid.front(), grid.back()}) params_of(c, eta);
  const long kicks = at_least(c, "kicks", 0);
  const auto init = initial_of(c);
  const auto fixed = c.size_or_auto("basis");
  const long start = at_least(c, "basis-start", 2);
  const long cap = at_least(c, "basis-cap", start);

  std::vector<ScanPoint> points(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        const auto p = params_of(c, grid[i]);
        Heating h;
        if (fixed) {
          const auto n = static_cast<std::size_t>(*fixed);
          auto u = make<Floquet>(kickho_floquet_create, &p, n);
          auto s = make<State>(kickho_state_create, &init, n);
          h = make<Heating>(kickho_heating_run, u.get(), static_cast<int64_t>(kicks), s.get());
        } else {
          h = make<Heating>(kickho_heating_run_auto, &p, static_cast<int64_t>(kicks), &init,
                            static_cast<std::size_t>(start), static_cast<std::size_t>(cap));
        }
        kickho_heating_info info{};
        check(kickho_heating_info_get(h.get(), &info));
        std::vector<double> e(static_cast<std::size_t>(kicks) + 1);
        check(kickho_heating_energies(h.get(), e.data(), e.size()));
        points[i] = {e.back(), info.max_leakage, info.basis_size, info.converged != 0};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = grid.size();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned workers = std::min<unsigned>(ctx.threads, static_cast<unsigned>(grid.size()));
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  const std::string energy_col = "energy_after_" + std::to_string(kicks);
  Table table{{"eta", energy_col, "max_leakage", "basis", "converged"}, {}};
  std::vector<double> energies;
  std::size_t unconverged = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& pt = points[i];
    table.rows.push_back({grid[i], pt.energy, pt.leakage, static_cast<double>(pt.basis),
                          pt.converged ? 1.0 : 0.0});
    energies.push_back(pt.energy);
    if (!pt.converged) ++unconverged;
  }
  const double med = median(energies);
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < energies.size(); ++i) {
    if (energies[i] > energies[i - 1] && energies[i] > energies[i + 1] && energies[i] > 3.0 * med) {
      peaks.push_back(grid[i]);
    }
  }
  const auto prov = provenance(
      ctx, {"energy = <a^dag a> + 1/2 in units of hbar*nu", "median energy = " + format_real(med),
            "maxima above 3x median at eta = " + join_numbers(peaks),
            "unconverged points = " + std::to_string(unconverged)});
  const json summary{{"median", med}, {"peaks_above_3x_median", peaks}, {"unconverged", unconverged}};
  write_outputs(ctx, c.raw("out"), prov, table, summary, {PlotKind::Lines, "energy vs eta", 0, 1});
  if (unconverged > 0) {
    ctx.err << "etascan: " << unconverged << " eta values exceeded the leakage tolerance\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- converge

int cmd_converge(Context& ctx) {
  const auto& c = ctx.config;
  const auto p = params_of(c, c.positive("eta"));
  const auto init = initial_of(c);
  const double threshold = unit_interval(c, "threshold");
  std::vector<std::size_t> sizes;
  for (long s : c.integer_list("sizes")) {
    if (s < 2) throw ConfigError("invalid value for 'sizes': every size must be >= 2");
    sizes.push_back(static_cast<std::size_t>(s));
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw ConfigError("invalid value for 'sizes': must increase");
  }
  if (sizes.size() < 2) throw ConfigError("invalid value for 'sizes': need at least two sizes");
  const long kicks = at_least(c, "kicks", 0);

  std::vector<std::string> notes{kPhaseConvention};
  json summary = json::object();
  Convergence report;
  const bool focus = !c.raw("focus-phase").empty();
  if (!focus) {
    report = make<Convergence>(kickho_convergence_run, &p, sizes.data(), sizes.size(), &init,
                               threshold);
    notes.push_back("levels: all with overlap >= threshold at each size");
  } else {
    const double want = c.real("focus-phase");
    const std::size_t n = sizes.back();
    auto u = make<Floquet>(kickho_floquet_create, &p, n);
    auto spec = make<Spectrum>(kickho_spectrum_create, u.get());
    auto psi0 = make<State>(kickho_state_create, &init, n);
    std::vector<double> phases(n), ov(n);
    check(kickho_spectrum_phases(spec.get(), phases.data(), n));
    check(kickho_spectrum_overlaps(spec.get(), psi0.get(), ov.data(), n));
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n; ++j) {
      if (ov[j] >= threshold) idx.push_back(j);
    }
    if (idx.size() < 2) throw ApiError(KICKHO_ERR_NUMERIC, "fewer than two levels above threshold");
    auto dist = [&](std::size_t j) {
      return std::abs(std::remainder(phases[j] - want, 2.0 * std::numbers::pi));
    };
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(),
                      [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    std::vector<std::vector<double>> refs(2, std::vector<double>(2 * n));
    for (int r = 0; r < 2; ++r) {
      check(kickho_spectrum_eigenvector(spec.get(), idx[r], refs[r].data(), refs[r].size()));
    }
    const double* ptrs[2] = {refs[0].data(), refs[1].data()};
    const std::size_t lengths[2] = {n, n};
    report = make<Convergence>(kickho_convergence_run_states, &p, sizes.data(), sizes.size(),
                               ptrs, lengths, std::size_t{2});
    notes.push_back("levels: the two nearest focus-phase at N = " + std::to_string(n) +
                    " (phases " + format_real(phases[idx[0]]) + ", " +
                    format_real(phases[idx[1]]) + ")");
    json tracked = json::array();
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      double a = 0.0, b = 0.0;
      check(kickho_convergence_tracked_phase(report.get(), k, 0, &a));
      check(kickho_convergence_tracked_phase(report.get(), k, 1, &b));
      tracked.push_back({{"N", sizes[k]}, {"phases", {a, b}}});
    }
    summary["tracked"] = tracked;
  }

  Table table{{"from", "to", "max_drift", "matched", "min_match_overlap"}, {}};
  std::vector<double> drifts;
  for (std::size_t i = 0; i < kickho_convergence_steps(report.get()); ++i) {
    kickho_convergence_step s{};
    check(kickho_convergence_step_get(report.get(), i, &s));
    table.rows.push_back({static_cast<double>(s.from), static_cast<double>(s.to), s.max_drift,
                          static_cast<double>(s.matched), s.min_match_overlap});
    drifts.push_back(s.max_drift);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < drifts.size(); ++i) monotone = monotone && drifts[i] < drifts[i - 1];
  std::size_t saturated = 0;
  const bool is_saturated = kickho_convergence_saturated(report.get(), &saturated) != 0;
  notes.push_back(std::string("monotone drift = ") + (monotone ? "true" : "false"));
  notes.push_back("saturated at N = " + (is_saturated ? std::to_string(saturated) : std::string("none")));
  summary["monotone"] = monotone;
  summary["saturated_at"] = is_saturated ? json(saturated) : json(nullptr);
  summary["drifts"] = drifts;

  int code = kExitOk;
  if (kicks > 0) {
    const long start = at_least(c, "basis-start", 2);
    const long cap = at_least(c, "basis-cap", start);
    auto h = make<Heating>(kickho_heating_run_auto, &p, static_cast<int64_t>(kicks), &init,
                           static_cast<std::size_t>(start), static_cast<std::size_t>(cap));
    kickho_heating_info info{};
    check(kickho_heating_info_get(h.get(), &info));
    notes.push_back("heating N = " + std::to_string(info.basis_size) +
                    ", doubling change = " + format_real(info.doubling_change) +
                    ", converged = " + (info.converged ? "true" : "false"));
    summary["heating"] = {{"N", info.basis_size},
                          {"doubling_change", info.doubling_change},
                          {"max_leakage", info.max_leakage},
                          {"converged", info.converged != 0}};
    if (!info.converged) {
      ctx.err << "converge: heating curve failed the basis-doubling check\n";
      code = kExitFailure;
    }
  }
  write_outputs(ctx, c.raw("out"), provenance(ctx, notes), table, summary,
                {PlotKind::Lines, "eigenphase drift vs basis size", 1, 2});
  return code;
}

std::vector<Command> commands() {
  return {
      {"heat", "quantum mean energy vs kick number",
       join({system_keys("0.464"), initial_keys(),
             {{"kicks", "100", "number of kicks"},
              {"basis", "auto", "Fock basis size, or auto for the doubling policy"},
              {"basis-start", "256", "first size tried by the auto policy"},
              {"basis-cap", "2048", "largest size the auto policy may use"}},
             common_keys("heat.csv")}),
       cmd_heat},
      {"classical", "classical ensemble heating, a long trajectory and its occupancy histogram",
       join({system_keys("0.464"),
             {{"kicks", "100", "kicks for the ensemble energy curve"},
              {"ensemble", "10000", "ensemble size"},
              {"seed", "1", "random seed for the ensemble"},
              {"v0", "0.005", "trajectory start v"},
              {"u0", "0.005", "trajectory start u"},
              {"trajectory-kicks", "40000", "trajectory length in kicks"},
              {"bins", "200", "histogram bins per axis"},
              {"range", "auto", "histogram half-width, or auto to cover the trajectory"}},
             common_keys("classical.csv")}),
       cmd_classical},
      {"sweep", "overlap-filtered quasienergies across an eta grid",
       join({system_keys(""), grid_keys("0.44", "0.49", "0.0005"), initial_keys(),
             {{"basis", "300", "Fock basis size"},
              {"threshold", "0.001", "minimum overlap with the initial state"}},
             common_keys("sweep.csv")}),
       cmd_sweep},
      {"crossings", "avoided crossings among overlap-tracked branches",
       join({system_keys(""), grid_keys("0.44", "0.49", "0.0005"), initial_keys(),
             {{"basis", "300", "Fock basis size"},
              {"threshold", "0.01", "both partners need this overlap at the gap minimum"},
              {"track-threshold", "0.0001", "overlap filter used for branch tracking"},
              {"prominence", "2", "gap must grow by this factor on both sides"},
              {"max-gap", "0.2", "largest gap considered"},
              {"refine", "true", "golden-section refinement of each minimum", true},
              {"refine-tol", "1e-5", "refinement tolerance in eta"},
              {"classify", "false", "continue partners and classify them by Husimi mass", true},
              {"classify-offset", "0.005", "classify this far either side of the tracked grid minimum"},
              {"continuation-step", "0.00025", "largest eta step when continuing partners"},
              {"radius", "1.5", "localization radius in |beta|"},
              {"localization-threshold", "0.1", "localized when the fraction exceeds this"},
              {"outer-radius", "3", "report Husimi mass beyond this |beta|"}},
             common_keys("crossings.csv")}),
       cmd_crossings},
      {"husimi", "Husimi Q of the initial state or of a Floquet eigenstate",
       join({system_keys("0.464"), initial_keys(),
             {{"basis", "300", "Fock basis size"},
              {"state", "eigen", "initial or eigen"},
              {"target-phase", "1.35", "eigen: pick the filtered level nearest this phase"},
              {"threshold", "0.01", "eigen: minimum overlap with the initial state"},
              {"extent", "10", "grid half-width in x1 and x2"},
              {"spacing", "0.1", "grid spacing"},
              {"radius", "1.5", "localization radius in |beta|"},
              {"outer-radius", "3", "report mass beyond this |beta|"}},
             common_keys("husimi.csv")}),
       cmd_husimi},
      {"etascan", "mean energy after a fixed number of kicks across an eta grid",
       join({system_keys(""), grid_keys("0.40", "0.70", "0.002"), initial_keys(),
             {{"kicks", "600", "number of kicks"},
              {"basis", "1024", "Fock basis size, or auto"},
              {"basis-start", "256", "first size tried by the auto policy"},
              {"basis-cap", "2048", "largest size the auto policy may use"}},
             common_keys("etascan.csv")}),
       cmd_etascan},
      {"converge", "eigenphase drift under basis enlargement",
       join({system_keys("0.464"), initial_keys(),
             {{"sizes", "200,300,400", "increasing basis sizes"},
              {"threshold", "0.01", "minimum overlap with the initial state"},
              {"focus-phase", "", "track only the two filtered levels nearest this phase"},
              {"kicks", "0", "if > 0 also run the heating doubling check"},
              {"basis-start", "256", "first size tried by the heating check"},
              {"basis-cap", "2048", "largest size for the heating check"}},
             common_keys("converge.csv")}),
       cmd_converge},
  };
}

int exit_code_for(kickho_status status) {
  return status == KICKHO_ERR_DOMAIN || status == KICKHO_ERR_NONRESONANT ? kExitConfig
                                                                         : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  CLI::App app{"kicked harmonic oscillator: heating, spectra and phase-space structure", "kickho"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kickho_version()));

  struct Bound {
    CLI::App* sub;
    std::string config_path;
    std::vector<std::string> values;
    std::vector<bool> flags;
    std::vector<CLI::Option*> options;
  };
  std::vector<Bound> bound(cmds.size());
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto& b = bound[i];
    b.sub = app.add_subcommand(cmds[i].name, cmds[i].description);
    b.sub->add_option("--config", b.config_path, "flat key = value file; flags override it");
    b.values.resize(cmds[i].keys.size());
    b.flags.assign(cmds[i].keys.size(), false);
    for (std::size_t k = 0; k < cmds[i].keys.size(); ++k) {
      const auto& key = cmds[i].keys[k];
      const std::string help = key.help + " [" + key.default_value + "]";
      if (key.is_flag) {
        b.options.push_back(b.sub->add_option("--" + key.name, b.values[k], help)
                                ->expected(0, 1));
      } else {
        b.options.push_back(b.sub->add_option("--" + key.name, b.values[k], help));
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kickho_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto& b = bound[i];
    if (!b.sub->parsed()) continue;
    const std::string& name = cmds[i].name;
    try {
      Context ctx{Config(name, cmds[i].keys), out, err};
      if (!b.config_path.empty()) ctx.config.load_file(b.config_path);
      for (std::size_t k = 0; k < cmds[i].keys.size(); ++k) {
        if (b.options[k]->count() == 0) continue;
        std::string v = b.values[k];
        if (cmds[i].keys[k].is_flag && v.empty()) v = "true";
        ctx.config.set(cmds[i].keys[k].name, v);
      }
      ctx.config.flag("plot");
      ctx.threads = resolve_threads(ctx.config);
      return cmds[i].run(ctx);
    } catch (const ConfigError& e) {
      err << name << ": " << e.what() << "\n";
      return kExitConfig;
    } catch (const ApiError& e) {
      err << name << ": " << kickho_status_string(e.status()) << ": " << e.what() << "\n";
      return exit_code_for(e.status());
    } catch (const OutputError& e) {
      err << name << ": " << e.what() << "\n";
      return kExitFailure;
    } catch (const std::exception& e) {
      err << name << ": " << e.what() << "\n";
      return kExitFailure;
    }
  }
  err << "error: no subcommand given\n";
  return kExitConfig;
}

}  // namespace kickho::cli
