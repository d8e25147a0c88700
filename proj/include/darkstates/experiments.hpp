#pragma once

// Orchestration: one (configuration, seed) cell end to end, and ensemble sweeps over the
// parameter axes of the size, layer, disorder, cavity-length and shell experiments.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "darkstates/analysis.hpp"
#include "darkstates/disorder.hpp"
#include "darkstates/eigensolve.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/geometry.hpp"
#include "darkstates/hamiltonian.hpp"

namespace darkstates {

enum class SolverRoute { standing_wave, hermitian };

struct RunConfig {
  LatticeSpec lattice;
  double lz = 300.0;
  double epsilon = 1.0;
  DisorderSpec disorder;  // seed is supplied per cell
  double target_rabi = 0.2;
  double threshold = kDarkThreshold;
  ShellSpec shell;
  std::optional<double> g0_override;  // bypasses calibration (e.g. 0 for the decoupled limit)
  SolverRoute route = SolverRoute::standing_wave;

  CavityConfig cavity() const { return make_cavity(lattice, lz, epsilon); }
};

struct RunLimits {
  std::size_t max_dimension = 16000;
  bool allow_large = false;
};

inline std::size_t projected_mode_count(const RunConfig& config) {
  if (!config.shell.m_max) return config.lattice.mode_count();
  return shell_mode_count(*config.shell.m_max);
}

inline std::size_t projected_dimension(const RunConfig& config) {
  return config.lattice.molecule_count() + projected_mode_count(config);
}

/// Peak bytes held by matrices during one solve (workspace vectors of length O(n) ignored).
inline double projected_bytes(const RunConfig& config) {
  const auto n = static_cast<double>(projected_dimension(config));
  const auto nm = static_cast<double>(config.lattice.molecule_count());
  const auto np = static_cast<double>(projected_mode_count(config));
  if (config.route == SolverRoute::standing_wave) return 8.0 * (2.0 * n * n + nm * np);
  return 16.0 * (4.0 * n * n);  // matrix, eigenvectors and zheevd work/rwork
}

/// Warns when the Rabi splitting exceeds 10% of the doubly excited energy scale.
inline std::optional<std::string> rwa_guard(const RunConfig& config) {
  const double omega_c0 = lowest_mode_energy(config.cavity());
  const double limit = 0.1 * (config.disorder.mean_energy + omega_c0);
  if (config.target_rabi > limit) {
    std::ostringstream os;
    os << "RWA guard: Rabi splitting " << config.target_rabi << " eV exceeds 10% of "
       << "(hbar w_e + hbar w_c0) = " << limit << " eV";
    return os.str();
  }
  return std::nullopt;
}

inline void validate(const RunConfig& config) {
  validate(config.lattice, config.cavity());
  validate(config.disorder);
  if (!(config.target_rabi >= 0.0)) throw ConfigError("target_rabi must be >= 0");
  if (!(config.threshold > 0.0 && config.threshold < 1.0))
    throw ConfigError("dark threshold must lie in (0, 1)");
  if (config.shell.m_max) {
    const int half = std::min((config.lattice.nx - 1) / 2, (config.lattice.ny - 1) / 2);
    if (*config.shell.m_max < 0 || *config.shell.m_max > half)
      throw ConfigError("shell m_max = " + std::to_string(*config.shell.m_max) +
                        " outside the mode grid [0, " + std::to_string(half) + "]");
  }
}

inline void check_budget(const RunConfig& config, const RunLimits& limits) {
  const std::size_t dim = projected_dimension(config);
  if (dim > limits.max_dimension && !limits.allow_large)
    throw BudgetError("matrix dimension " + std::to_string(dim) + " exceeds the budget of " +
                      std::to_string(limits.max_dimension) + " (about " +
                      std::to_string(static_cast<long long>(projected_bytes(config) / 1e9)) +
                      " GB); pass --allow-large to override");
}

struct PropertyReport {
  double max_residual = 0.0;
  double frobenius = 0.0;
  bool residual_ok = false;
  bool trace_ok = false;
  double photon_sum_error = 0.0;
  bool photon_sum_ok = false;
  bool pr_bounds_ok = false;

  bool all_ok() const { return residual_ok && trace_ok && photon_sum_ok && pr_bounds_ok; }
};

struct RunOutput {
  std::size_t dimension = 0;
  std::size_t n_molecules = 0;
  std::size_t n_modes = 0;
  CouplingCalibration calibration;
  double omega_c0 = 0.0;
  double shell_e_min = std::numeric_limits<double>::quiet_NaN();
  double shell_e_max = std::numeric_limits<double>::quiet_NaN();
  RealizationSummary summary;
  std::optional<double> k0_gap;
  PropertyReport checks;
  std::vector<StateRecord> records;
  std::vector<PhotonMode> modes;
  std::vector<double> molecular_energies;
};

namespace detail {

template <class H, class T>
PropertyReport check_properties(const H& h, const EigenSystem<T>& eigen,
                                const std::vector<StateRecord>& records,
                                const RealizationSummary& summary) {
  PropertyReport rep;
  rep.frobenius = frobenius_norm(h);
  rep.max_residual = max_residual(h, eigen);
  rep.residual_ok = rep.max_residual <= 1e-8 * rep.frobenius;
  rep.trace_ok = trace_check(h, eigen);
  const auto m = static_cast<double>(eigen.n_modes);
  rep.photon_sum_error = std::abs(summary.photon_fraction_sum - m);
  rep.photon_sum_ok = rep.photon_sum_error <= 1e-8 * std::max(m, 1.0);
  const auto n = static_cast<double>(eigen.n_molecules);
  rep.pr_bounds_ok = true;
  for (const auto& r : records) {
    if (r.classification != StateClass::dark) continue;
    // round-off slack only: PR of a unit vector is 1 <= PR <= N exactly
    if (!(r.pr >= 1.0 - 1e-9 && r.pr <= n * (1.0 + 1e-9))) rep.pr_bounds_ok = false;
  }
  return rep;
}

template <class H>
void analyse(RunOutput& out, const H& h, const RunConfig& config) {
  const auto eigen = diagonalize(h);
  out.records = classify_states(eigen, out.modes, config.threshold);
  out.summary = summarize(out.records);
  out.k0_gap = k0_polariton_gap(eigen, out.modes, config.disorder.mean_energy);
  out.checks = check_properties(h, eigen, out.records, out.summary);
}

}  // namespace detail

/// One disorder realization: sample, calibrate, assemble, diagonalize, analyse, check.
inline RunOutput run_single(const RunConfig& config, std::uint64_t seed,
                            const RunLimits& limits = {}) {
  validate(config);
  check_budget(config, limits);
  const CavityConfig cavity = config.cavity();
  DisorderSpec spec = config.disorder;
  spec.seed = seed;

  RunOutput out;
  const auto realization = sample_realization(spec, config.lattice);
  const auto sites = displaced_sites(molecule_positions(config.lattice, cavity), realization);
  out.n_molecules = sites.size();
  if (config.g0_override) {
    out.calibration = {config.target_rabi, eta_factor(sites, cavity.lz), *config.g0_override};
  } else {
    out.calibration = calibrate(config.target_rabi, sites.size(), eta_factor(sites, cavity.lz));
  }
  out.modes = shell_filter(wavevector_grid(config.lattice, cavity), config.shell);
  out.n_modes = out.modes.size();
  out.dimension = out.n_molecules + out.n_modes;
  out.omega_c0 = lowest_mode_energy(cavity);
  if (!out.modes.empty()) {
    const auto [lo, hi] = std::minmax_element(out.modes.begin(), out.modes.end(),
                                              [](const auto& a, const auto& b) { return a.omega < b.omega; });
    out.shell_e_min = lo->omega;
    out.shell_e_max = hi->omega;
  }
  out.molecular_energies = realization.energies;

  const double mean_energy = config.disorder.mean_energy;
  if (config.route == SolverRoute::standing_wave) {
    const auto h = assemble_standing_wave(realization, sites, out.modes, out.calibration, cavity, mean_energy);
    detail::analyse(out, h, config);
  } else {
    const auto h = assemble(realization, sites, out.modes, out.calibration, cavity, mean_energy);
    detail::analyse(out, h, config);
  }
  return out;
}

// --- plans and sweeps -------------------------------------------------------------------

enum class SweepKind {
  size_sweep,
  layer_sweep,
  disorder_sweep,
  cavity_length_sweep,
  shell_sweep,
  dispersion,
  single_run
};

inline const char* to_string(SweepKind k) {
  switch (k) {
    case SweepKind::size_sweep: return "size_sweep";
    case SweepKind::layer_sweep: return "layer_sweep";
    case SweepKind::disorder_sweep: return "disorder_sweep";
    case SweepKind::cavity_length_sweep: return "cavity_length_sweep";
    case SweepKind::shell_sweep: return "shell_sweep";
    case SweepKind::dispersion: return "dispersion";
    case SweepKind::single_run: return "single_run";
  }
  return "unknown";
}

inline std::optional<SweepKind> parse_sweep_kind(const std::string& s) {
  for (auto k : {SweepKind::size_sweep, SweepKind::layer_sweep, SweepKind::disorder_sweep,
                 SweepKind::cavity_length_sweep, SweepKind::shell_sweep, SweepKind::dispersion,
                 SweepKind::single_run})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

/// Name of the physical quantity varied along the primary axis.
inline const char* axis_name(SweepKind k) {
  switch (k) {
    case SweepKind::size_sweep: return "n_side";
    case SweepKind::layer_sweep: return "n_z";
    case SweepKind::disorder_sweep: return "sigma_e";
    case SweepKind::cavity_length_sweep: return "l_z";
    case SweepKind::shell_sweep: return "m_max";
    case SweepKind::dispersion:
    case SweepKind::single_run: return "none";
  }
  return "none";
}

inline constexpr std::size_t kDefaultSeedCount = 10;
inline constexpr std::uint64_t kDefaultBaseSeed = 20240601;

inline std::vector<std::uint64_t> default_seeds(std::uint64_t base_seed = kDefaultBaseSeed,
                                                std::size_t count = kDefaultSeedCount) {
  DisorderSpec base;
  base.seed = base_seed;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < count; ++i) seeds.push_back(resample_with_seed(base, i).seed);
  return seeds;
}

struct ExperimentPlan {
  std::string name;
  SweepKind kind = SweepKind::single_run;
  std::vector<double> axis;
  std::vector<int> sizes;  // optional nx = ny values crossed with the axis (not for size_sweep)
  RunConfig base;
  std::vector<std::uint64_t> seeds = default_seeds();
  double fit_min_molecules = 2000.0;
  std::size_t dispersion_per_band = 25;
};

inline bool integral_axis(SweepKind k) {
  return k == SweepKind::size_sweep || k == SweepKind::layer_sweep || k == SweepKind::shell_sweep;
}

/// Axis used when a plan omits one: the desk-scale analogs of the published sweeps.
inline std::vector<double> default_axis(SweepKind k) {
  switch (k) {
    case SweepKind::size_sweep: return {11, 21, 31, 41, 51, 71};
    case SweepKind::layer_sweep: return {1, 3, 5, 7, 9};
    case SweepKind::disorder_sweep: return {0.005, 0.01, 0.02};
    case SweepKind::cavity_length_sweep: return {260, 300, 340};
    case SweepKind::shell_sweep: return {0, 5, 10, 20};
    case SweepKind::dispersion:
    case SweepKind::single_run: return {0.0};
  }
  return {0.0};
}

/// In-plane side N_x = N_y used when a plan omits the lattice.
inline int default_side(SweepKind k) {
  switch (k) {
    case SweepKind::layer_sweep: return 21;
    case SweepKind::disorder_sweep:
    case SweepKind::cavity_length_sweep: return 31;
    case SweepKind::shell_sweep:
    case SweepKind::dispersion: return 41;
    case SweepKind::size_sweep:
    case SweepKind::single_run: return 21;
  }
  return 21;
}

/// Configuration of one (axis value, size) group.
inline RunConfig configure(const ExperimentPlan& plan, double axis_value, std::optional<int> size) {
  RunConfig c = plan.base;
  if (size) c.lattice.nx = c.lattice.ny = *size;
  switch (plan.kind) {
    case SweepKind::size_sweep: c.lattice.nx = c.lattice.ny = static_cast<int>(axis_value); break;
    case SweepKind::layer_sweep: c.lattice.nz = static_cast<int>(axis_value); break;
    case SweepKind::disorder_sweep: c.disorder.sigma_e = axis_value; break;
    case SweepKind::cavity_length_sweep: c.lz = axis_value; break;
    case SweepKind::shell_sweep: c.shell.m_max = static_cast<int>(axis_value); break;
    case SweepKind::dispersion:
    case SweepKind::single_run: break;
  }
  return c;
}

struct GroupKey {
  double axis_value = 0.0;
  std::optional<int> size;
};

inline std::vector<GroupKey> plan_groups(const ExperimentPlan& plan) {
  std::vector<GroupKey> groups;
  const bool sized = !plan.sizes.empty() && plan.kind != SweepKind::size_sweep;
  for (double v : plan.axis) {
    if (!sized) {
      groups.push_back({v, std::nullopt});
      continue;
    }
    for (int s : plan.sizes) groups.push_back({v, s});
  }
  return groups;
}

/// Validates the plan and every configuration it generates. Returns RWA warnings.
inline std::vector<std::string> validate(const ExperimentPlan& plan) {
  if (plan.axis.empty()) throw ConfigError("plan axis must be non-empty");
  if (plan.seeds.empty()) throw ConfigError("plan needs at least one seed");
  if (plan.axis.size() > 1) {
    const bool up = plan.axis[1] > plan.axis[0];
    for (std::size_t i = 1; i < plan.axis.size(); ++i) {
      if (up ? !(plan.axis[i] > plan.axis[i - 1]) : !(plan.axis[i] < plan.axis[i - 1]))
        throw ConfigError(std::string("plan axis ") + axis_name(plan.kind) + " must be strictly monotone");
    }
  }
  if (integral_axis(plan.kind))
    for (double v : plan.axis)
      if (v != std::floor(v)) throw ConfigError(std::string("plan axis ") + axis_name(plan.kind) + " must hold integers");
  for (std::size_t i = 0; i < plan.seeds.size(); ++i)
    for (std::size_t j = i + 1; j < plan.seeds.size(); ++j)
      if (plan.seeds[i] == plan.seeds[j]) throw ConfigError("plan seeds must be distinct");
  std::vector<std::string> warnings;
  for (const auto& g : plan_groups(plan)) {
    const RunConfig c = configure(plan, g.axis_value, g.size);
    validate(c);
    if (c.disorder.sigma_e == 0.0 && plan.kind == SweepKind::disorder_sweep)
      throw ConfigError("disorder sweep: sigma_e = 0 leaves the dark manifold degenerate; PR is undefined");
    if (auto w = rwa_guard(c)) {
      if (std::find(warnings.begin(), warnings.end(), *w) == warnings.end()) warnings.push_back(*w);
    }
  }
  return warnings;
}

enum class CellStatus { ok, failed };

struct CellResult {
  double axis_value = 0.0;
  int size = 0;  // nx (= ny for square lattices)
  int nz = 1;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  CellStatus status = CellStatus::ok;
  std::string message;
  std::size_t dimension = 0;
  std::size_t n_molecules = 0;
  std::size_t n_modes = 0;
  std::size_t dark_count = 0;
  std::size_t bright_count = 0;
  double dark_pr_mean = std::numeric_limits<double>::quiet_NaN();
  double k0_gap = std::numeric_limits<double>::quiet_NaN();
  double omega_c0 = std::numeric_limits<double>::quiet_NaN();
  double shell_e_min = std::numeric_limits<double>::quiet_NaN();
  double shell_e_max = std::numeric_limits<double>::quiet_NaN();
  double g0 = 0.0;
  double eta = 0.0;
  PropertyReport checks;
  double runtime_s = 0.0;  // manifest only; never part of the tabular results
};

struct GroupResult {
  double axis_value = 0.0;
  int size = 0;
  std::size_t n_molecules = 0;
  EnsembleStat stat;
  std::vector<std::size_t> cells;  // indices into SweepResult::cells, in seed order
  std::size_t failed = 0;
};

struct FitRecord {
  std::string label;
  std::optional<LinearFit> fit;
  std::string note;
};

struct DispersionData {
  double exciton_energy = 0.0;
  std::vector<DispersionRow> rows;
  std::vector<std::pair<double, double>> bare;  // (|k|, hbar w) per distinct |k|
  std::vector<double> molecular_energies;
};

struct SweepResult {
  ExperimentPlan plan;
  std::vector<CellResult> cells;
  std::vector<GroupResult> groups;
  std::vector<FitRecord> fits;
  std::vector<std::string> warnings;
  std::optional<DispersionData> dispersion;
};

/// Results of identical (configuration, seed) cells, shared across sweeps.
class CellCache {
 public:
  std::optional<CellResult> find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = cells_.find(key);
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }
  void store(const std::string& key, const CellResult& cell) {
    std::lock_guard lock(mutex_);
    cells_.emplace(key, cell);
  }
  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return cells_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, CellResult> cells_;
};

/// Canonical text of everything that determines a cell's numbers.
inline std::string cell_key(const RunConfig& c, std::uint64_t seed) {
  std::ostringstream os;
  os << std::setprecision(17) << c.lattice.nx << ',' << c.lattice.ny << ',' << c.lattice.nz << ','
     << c.lattice.ax << ',' << c.lattice.ay << ',' << c.lattice.az << ',' << c.lz << ',' << c.epsilon
     << ',' << c.disorder.mean_energy << ',' << c.disorder.sigma_e << ',' << c.disorder.orientational
     << ',' << c.disorder.positional_fraction << ',' << c.target_rabi << ',' << c.threshold << ','
     << (c.shell.m_max ? *c.shell.m_max : -1) << ','
     << (c.g0_override ? *c.g0_override : std::numeric_limits<double>::quiet_NaN()) << ','
     << static_cast<int>(c.route) << ',' << seed;
  return os.str();
}

struct SweepOptions {
  unsigned workers = 1;
  int solver_threads = 1;
  RunLimits limits;
  CellCache* cache = nullptr;
  std::function<void(const CellResult&, std::size_t done, std::size_t total)> progress;
};

inline CellResult make_cell(const RunConfig& config, double axis_value, std::size_t seed_index,
                            std::uint64_t seed) {
  CellResult cell;
  cell.axis_value = axis_value;
  cell.size = config.lattice.nx;
  cell.nz = config.lattice.nz;
  cell.seed_index = seed_index;
  cell.seed = seed;
  cell.dimension = projected_dimension(config);
  cell.n_molecules = config.lattice.molecule_count();
  cell.n_modes = projected_mode_count(config);
  return cell;
}

inline void fill_cell(CellResult& cell, const RunOutput& out) {
  cell.dimension = out.dimension;
  cell.n_molecules = out.n_molecules;
  cell.n_modes = out.n_modes;
  cell.dark_count = out.summary.dark_count;
  cell.bright_count = out.summary.bright_count;
  cell.dark_pr_mean = out.summary.dark_pr_mean;
  cell.k0_gap = out.k0_gap.value_or(std::numeric_limits<double>::quiet_NaN());
  cell.omega_c0 = out.omega_c0;
  cell.shell_e_min = out.shell_e_min;
  cell.shell_e_max = out.shell_e_max;
  cell.g0 = out.calibration.g0;
  cell.eta = out.calibration.eta;
  cell.checks = out.checks;
}

inline DispersionData dispersion_data(const RunOutput& out, double exciton_energy, std::size_t per_band) {
  DispersionData d;
  d.exciton_energy = exciton_energy;
  d.rows = dispersion_table(out.records, exciton_energy, per_band);
  std::map<double, double> bare;
  for (const auto& m : out.modes) bare.emplace(m.k(), m.omega);
  d.bare.assign(bare.begin(), bare.end());
  d.molecular_energies = out.molecular_energies;
  return d;
}

/// Dispersion table of one configuration and seed.
inline DispersionData dispersion_run(const RunConfig& config, std::uint64_t seed,
                                     std::size_t per_band = 25, const RunLimits& limits = {}) {
  const auto out = run_single(config, seed, limits);
  return dispersion_data(out, config.disorder.mean_energy, per_band);
}

/// Executes every (group, seed) cell on a bounded worker pool and merges results by cell
/// key; the outcome does not depend on the worker count.
inline SweepResult run_sweep(const ExperimentPlan& plan, const SweepOptions& options = {}) {
  SweepResult result;
  result.plan = plan;
  result.warnings = validate(plan);

  const bool dispersion = plan.kind == SweepKind::dispersion;
  const std::size_t n_seeds = dispersion ? 1 : plan.seeds.size();
  struct Task {
    RunConfig config;
    std::size_t cell;
  };
  std::vector<Task> tasks;
  for (const auto& g : plan_groups(plan)) {
    const RunConfig config = configure(plan, g.axis_value, g.size);
    GroupResult group;
    group.axis_value = g.axis_value;
    group.size = config.lattice.nx;
    group.n_molecules = config.lattice.molecule_count();
    for (std::size_t s = 0; s < n_seeds; ++s) {
      group.cells.push_back(result.cells.size());
      tasks.push_back({config, result.cells.size()});
      result.cells.push_back(make_cell(config, g.axis_value, s, plan.seeds[s]));
    }
    result.groups.push_back(std::move(group));
  }

  set_solver_threads(options.solver_threads);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::optional<RunOutput> dispersion_output;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      auto& cell = result.cells[tasks[t].cell];
      const auto& config = tasks[t].config;
      const std::string key = cell_key(config, cell.seed);
      const auto start = std::chrono::steady_clock::now();
      std::optional<CellResult> cached;
      if (options.cache && !dispersion) cached = options.cache->find(key);
      if (cached) {
        // the key ignores the sweep kind, so keep this plan's axis value
        const double axis_value = cell.axis_value;
        cell = *cached;
        cell.axis_value = axis_value;
      } else {
        try {
          auto out = run_single(config, cell.seed, options.limits);
          fill_cell(cell, out);
          if (dispersion) dispersion_output = std::move(out);
        } catch (const Error& e) {
          cell.status = CellStatus::failed;
          cell.message = e.what();
        } catch (const std::bad_alloc&) {
          cell.status = CellStatus::failed;
          cell.message = "out of memory";
        }
        cell.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (options.cache && !dispersion && cell.status == CellStatus::ok) options.cache->store(key, cell);
      }
      const std::size_t finished = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(cell, finished, tasks.size());
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (auto& group : result.groups) {
    std::vector<double> means;
    std::vector<std::size_t> counts;
    for (std::size_t idx : group.cells) {
      const auto& cell = result.cells[idx];
      if (cell.status == CellStatus::failed) {
        ++group.failed;
        continue;
      }
      means.push_back(cell.dark_pr_mean);
      counts.push_back(cell.dark_count);
    }
    group.stat = ensemble_stat(means, counts);
  }

  const auto fit_groups = [&](const std::string& label, const std::vector<const GroupResult*>& gs) {
    std::vector<FitPoint> pts;
    for (const auto* g : gs)
      if (g->stat.n_realizations > 0) pts.push_back({static_cast<double>(g->n_molecules), g->stat.mean});
    FitRecord rec{label, std::nullopt, {}};
    try {
      rec.fit = linear_fit(pts, plan.fit_min_molecules);
    } catch (const DomainError& e) {
      rec.note = e.what();
    }
    result.fits.push_back(std::move(rec));
  };
  if (plan.kind == SweepKind::size_sweep) {
    std::vector<const GroupResult*> gs;
    for (const auto& g : result.groups) gs.push_back(&g);
    fit_groups("pr_vs_n", gs);
  } else if (plan.sizes.size() > 1) {
    for (double v : plan.axis) {
      std::vector<const GroupResult*> gs;
      for (const auto& g : result.groups)
        if (g.axis_value == v) gs.push_back(&g);
      std::ostringstream label;
      label << axis_name(plan.kind) << '=' << std::setprecision(17) << v;
      fit_groups(label.str(), gs);
    }
  }

  if (dispersion && dispersion_output)
    result.dispersion = dispersion_data(*dispersion_output, plan.base.disorder.mean_energy,
                                        plan.dispersion_per_band);
  return result;
}

}  // namespace darkstates
