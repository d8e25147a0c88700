#pragma once

// Post-processing of eigensystems: photon fractions, dark/bright classification,
// participation ratios, dispersion tables, ensemble statistics and linear fits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "darkstates/eigensolve.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/geometry.hpp"

namespace darkstates {

inline constexpr double kDarkThreshold = 0.05;

namespace detail {
inline double sq(double v) { return v * v; }
inline double sq(const cplx& v) { return std::norm(v); }
}  // namespace detail

template <class T>
double photon_fraction(std::span<const T> photonic) {
  double acc = 0.0;
  for (const auto& b : photonic) acc += detail::sq(b);
  return acc;
}

/// (sum |a|^2)^2 / sum |a|^4, scale invariant; amplitudes are not renormalized.
template <class T>
double participation_ratio(std::span<const T> molecular) {
  double s2 = 0.0;
  double s4 = 0.0;
  for (const auto& a : molecular) {
    const double w = detail::sq(a);
    s2 += w;
    s4 += w * w;
  }
  if (!(s2 > 0.0)) throw DomainError("participation_ratio: molecular amplitudes vanish");
  return s2 * s2 / s4;
}

enum class StateClass { dark, bright };

struct ModeLabel {
  int mx = 0;
  int my = 0;
  Polarization pol = Polarization::s;
  double k = 0.0;
};

struct StateRecord {
  double energy = 0.0;
  double photon_fraction = 0.0;
  double pr = std::numeric_limits<double>::quiet_NaN();  // NaN when the molecular part vanishes
  std::size_t assigned_index = 0;
  ModeLabel assigned_mode;
  StateClass classification = StateClass::dark;
};

inline StateClass classify(double fraction, double threshold = kDarkThreshold) {
  return fraction < threshold ? StateClass::dark : StateClass::bright;
}

/// |b(k, lambda)|^2 of eigenstate `state` on plane-wave mode `mode`.
template <class T>
double mode_weight(const EigenSystem<T>& eigen, std::size_t state, std::size_t mode) {
  const auto b = eigen.photonic(state);
  if (eigen.basis.is_identity()) return detail::sq(b[mode]);
  const auto& col = eigen.basis.columns[mode];
  if (col.role == BasisRole::single) return detail::sq(b[mode]);
  return 0.5 * (detail::sq(b[mode]) + detail::sq(b[col.partner]));
}

template <class T>
std::vector<StateRecord> classify_states(const EigenSystem<T>& eigen,
                                         const std::vector<PhotonMode>& modes,
                                         double threshold = kDarkThreshold) {
  if (modes.size() != eigen.n_modes)
    throw DomainError("classify_states: mode list does not match the eigensystem");
  std::vector<StateRecord> records(eigen.dim());
  std::vector<double> weights(eigen.n_modes);
  for (std::size_t j = 0; j < eigen.dim(); ++j) {
    auto& rec = records[j];
    rec.energy = eigen.eigenvalues[j];
    const auto a = eigen.molecular(j);
    const auto b = eigen.photonic(j);
    rec.photon_fraction = photon_fraction(b);
    rec.classification = classify(rec.photon_fraction, threshold);
    double s2 = 0.0;
    for (const auto& v : a) s2 += detail::sq(v);
    if (s2 > 0.0) rec.pr = participation_ratio(a);
    if (eigen.n_modes == 0) continue;
    if constexpr (std::is_same_v<T, double>) {
      if (!eigen.basis.is_identity()) {
        eigen.basis.plane_wave_weights(b, weights);
      } else {
        for (std::size_t m = 0; m < eigen.n_modes; ++m) weights[m] = b[m] * b[m];
      }
    } else {
      for (std::size_t m = 0; m < eigen.n_modes; ++m) weights[m] = std::norm(b[m]);
    }
    // first maximum wins, so ties resolve to the earlier mode in grid order
    const auto best = static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin());
    rec.assigned_index = best;
    rec.assigned_mode = {modes[best].mx, modes[best].my, modes[best].pol, modes[best].k()};
  }
  return records;
}

/// Aggregate over one realization's records.
struct RealizationSummary {
  std::size_t dark_count = 0;
  std::size_t bright_count = 0;
  double dark_pr_mean = std::numeric_limits<double>::quiet_NaN();
  double photon_fraction_sum = 0.0;
  double pr_min = std::numeric_limits<double>::quiet_NaN();
  double pr_max = std::numeric_limits<double>::quiet_NaN();
};

inline RealizationSummary summarize(const std::vector<StateRecord>& records) {
  RealizationSummary s;
  double pr_sum = 0.0;
  for (const auto& r : records) {
    s.photon_fraction_sum += r.photon_fraction;
    if (r.classification == StateClass::bright) {
      ++s.bright_count;
      continue;
    }
    ++s.dark_count;
    pr_sum += r.pr;
    s.pr_min = s.dark_count == 1 ? r.pr : std::min(s.pr_min, r.pr);
    s.pr_max = s.dark_count == 1 ? r.pr : std::max(s.pr_max, r.pr);
  }
  if (s.dark_count > 0) s.dark_pr_mean = pr_sum / static_cast<double>(s.dark_count);
  return s;
}

struct EnsembleStat {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = 0.0;     // sample standard deviation across realizations
  double stderr_ = 0.0;  // std / sqrt(n)
  std::size_t n_realizations = 0;  // realizations contributing to the mean
  std::size_t n_empty = 0;         // realizations without any dark state
  std::vector<std::size_t> n_states_per_realization;
};

/// Mean and sample std of per-realization values. NaN entries mark realizations without
/// dark states; they are counted in n_empty and excluded from the moments.
inline EnsembleStat ensemble_stat(std::span<const double> per_realization,
                                  std::span<const std::size_t> counts = {}) {
  EnsembleStat st;
  st.n_states_per_realization.assign(counts.begin(), counts.end());
  double sum = 0.0;
  for (double v : per_realization) {
    if (std::isnan(v)) {
      ++st.n_empty;
      continue;
    }
    sum += v;
    ++st.n_realizations;
  }
  if (st.n_realizations == 0) return st;
  st.mean = sum / static_cast<double>(st.n_realizations);
  if (st.n_realizations > 1) {
    double ss = 0.0;
    for (double v : per_realization)
      if (!std::isnan(v)) ss += (v - st.mean) * (v - st.mean);
    st.std = std::sqrt(ss / static_cast<double>(st.n_realizations - 1));
    st.stderr_ = st.std / std::sqrt(static_cast<double>(st.n_realizations));
  }
  return st;
}

/// Mean over realizations of the per-realization mean dark-state PR.
inline EnsembleStat dark_pr_stat(const std::vector<std::vector<StateRecord>>& realizations) {
  if (realizations.empty()) throw DomainError("dark_pr_stat: no realizations");
  std::vector<double> means;
  std::vector<std::size_t> counts;
  for (const auto& recs : realizations) {
    const auto s = summarize(recs);
    means.push_back(s.dark_pr_mean);
    counts.push_back(s.dark_count);
  }
  return ensemble_stat(means, counts);
}

/// Mean and standard error of the paired differences b_i - a_i.
struct PairedDifference {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

inline PairedDifference paired_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("paired_difference: length mismatch");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isnan(a[i]) && !std::isnan(b[i])) d.push_back(b[i] - a[i]);
  const auto st = ensemble_stat(d);
  return {st.mean, st.stderr_, st.n_realizations};
}

// --- polariton gap ----------------------------------------------------------------------

/// Gap between the upper and lower polariton of the k = 0 modes: per polarization, the
/// states with the largest weight on that mode below and above `reference` (normally the
/// mean molecular energy); the result is averaged over polarizations. Empty when the mode
/// list has no k = 0 mode.
template <class T>
std::optional<double> k0_polariton_gap(const EigenSystem<T>& eigen,
                                       const std::vector<PhotonMode>& modes, double reference) {
  double total = 0.0;
  int count = 0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (modes[m].mx != 0 || modes[m].my != 0) continue;
    double best_lo = -1.0;
    double best_hi = -1.0;
    double e_lo = 0.0;
    double e_hi = 0.0;
    for (std::size_t j = 0; j < eigen.dim(); ++j) {
      const double w = mode_weight(eigen, j, m);
      const double e = eigen.eigenvalues[j];
      if (e < reference) {
        if (w > best_lo) best_lo = w, e_lo = e;
      } else if (w > best_hi) {
        best_hi = w, e_hi = e;
      }
    }
    if (best_lo < 0.0 || best_hi < 0.0) continue;
    total += e_hi - e_lo;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return total / count;
}

// --- dispersion -------------------------------------------------------------------------

enum class Band { lower, upper };

inline const char* to_string(Band b) { return b == Band::lower ? "LP" : "UP"; }

struct DispersionRow {
  double k = 0.0;
  double energy = 0.0;
  double photon_fraction = 0.0;
  Band band = Band::lower;
};

/// Bright states split into lower/upper bands at `exciton_energy`. Within each band, every
/// distinct |k| keeps its `per_band` lowest-energy states (0 keeps all). Rows are ordered by
/// band, then |k|, then energy.
inline std::vector<DispersionRow> dispersion_table(const std::vector<StateRecord>& records,
                                                   double exciton_energy, std::size_t per_band = 25) {
  std::vector<DispersionRow> rows;
  for (const auto& r : records) {
    if (r.classification != StateClass::bright) continue;
    const Band band = r.energy < exciton_energy ? Band::lower : Band::upper;
    rows.push_back({r.assigned_mode.k, r.energy, r.photon_fraction, band});
  }
  std::sort(rows.begin(), rows.end(), [](const DispersionRow& a, const DispersionRow& b) {
    if (a.band != b.band) return a.band == Band::lower;
    if (a.k != b.k) return a.k < b.k;
    return a.energy < b.energy;
  });
  if (per_band == 0) return rows;
  std::vector<DispersionRow> out;
  std::size_t run = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool same = i > 0 && rows[i].band == rows[i - 1].band && rows[i].k == rows[i - 1].k;
    run = same ? run + 1 : 0;
    if (run < per_band) out.push_back(rows[i]);
  }
  return out;
}

// --- fits -------------------------------------------------------------------------------

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
};

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Ordinary least squares over points with x >= x_min.
inline LinearFit linear_fit(std::span<const FitPoint> points, double x_min = 2000.0) {
  std::vector<FitPoint> use;
  for (const auto& p : points)
    if (p.x >= x_min && !std::isnan(p.y)) use.push_back(p);
  if (use.size() < 2)
    throw DomainError("linear_fit: need at least 2 points with x >= " + std::to_string(x_min) +
                      " (got " + std::to_string(use.size()) + ")");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : use) mx += p.x, my += p.y;
  mx /= static_cast<double>(use.size());
  my /= static_cast<double>(use.size());
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : use) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  if (!(sxx > 0.0)) throw DomainError("linear_fit: all qualifying x values coincide");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.n_points = use.size();
  return fit;
}

}  // namespace darkstates
