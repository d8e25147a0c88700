#pragma once

// Closed-form limits the solver must reproduce: a detuned two-level Jaynes-Cummings pair,
// the Tavis-Cummings k=0 limit, and the decoupled limit.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "darkstates/constants.hpp"
#include "darkstates/experiments.hpp"

namespace darkstates {

struct OracleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

template <class H>
std::vector<double> spectrum(const H& h) {
  return diagonalize(h).eigenvalues;
}

/// Identical sites, x-dipoles, zero energetic disorder, k=0 modes only.
inline RunConfig tavis_cummings_config(int side, double lz) {
  RunConfig c;
  c.lattice.nx = c.lattice.ny = side;
  c.lz = lz;
  c.disorder.sigma_e = 0.0;
  c.disorder.orientational = false;
  c.shell.m_max = 0;
  return c;
}

struct TcSystem {
  std::vector<double> eigenvalues;
  double g = 0.0;  // single-molecule coupling magnitude to the k=0 p mode
  double omega_c = 0.0;
  std::size_t n = 0;
};

inline TcSystem tavis_cummings(const RunConfig& c, SolverRoute route) {
  const CavityConfig cavity = c.cavity();
  DisorderSpec spec = c.disorder;
  const auto realization = sample_realization(spec, c.lattice);
  const auto sites = molecule_positions(c.lattice, cavity);
  const auto calib = calibrate(c.target_rabi, sites.size(), eta_factor(sites, cavity.lz));
  const auto modes = shell_filter(wavevector_grid(c.lattice, cavity), c.shell);
  TcSystem out;
  out.n = sites.size();
  out.omega_c = lowest_mode_energy(cavity);
  for (const auto& m : modes)
    if (m.pol == Polarization::p)
      out.g = std::abs(coupling_element(sites[0], realization.dipoles[0], m, calib, cavity, spec.mean_energy));
  out.eigenvalues = route == SolverRoute::standing_wave
                        ? spectrum(assemble_standing_wave(realization, sites, modes, calib, cavity, spec.mean_energy))
                        : spectrum(assemble(realization, sites, modes, calib, cavity, spec.mean_energy));
  return out;
}

inline std::size_t count_near(const std::vector<double>& values, double target, double tol) {
  std::size_t n = 0;
  for (double v : values)
    if (std::abs(v - target) <= tol) ++n;
  return n;
}

}  // namespace detail

/// Cavity length that puts the lowest mode exactly at `energy` (vacuum, epsilon = 1).
inline double resonant_length(double energy, double epsilon = 1.0) {
  return kHbarC * kPi / (std::sqrt(epsilon) * energy);
}

inline std::vector<OracleCheck> run_oracles() {
  std::vector<OracleCheck> checks;

  {  // 2x2 Jaynes-Cummings, explicit matrix
    const double we = 2.0, wc = 2.0664, g = 0.1;
    HamiltonianMatrix h;
    h.n_molecules = 1;
    h.n_modes = 1;
    h.data = {cplx(we), cplx(g), cplx(g), cplx(wc)};
    const auto ev = detail::spectrum(h);
    const double mid = 0.5 * (we + wc), half = std::sqrt(0.25 * (wc - we) * (wc - we) + g * g);
    const double err = std::max(std::abs(ev[0] - (mid - half)), std::abs(ev[1] - (mid + half)));
    checks.push_back({"jaynes_cummings_2x2", err <= 1e-10,
                      "eigenvalues " + detail::fmt(ev[0]) + ", " + detail::fmt(ev[1]) + "; max error " + detail::fmt(err)});
  }

  for (auto route : {SolverRoute::standing_wave, SolverRoute::hermitian}) {
    const std::string tag = route == SolverRoute::standing_wave ? "standing_wave" : "hermitian";
    {  // detuned
      const auto c = detail::tavis_cummings_config(15, 300.0);
      const auto tc = detail::tavis_cummings(c, route);
      const double we = c.disorder.mean_energy;
      const std::size_t at_we = detail::count_near(tc.eigenvalues, we, 1e-10);
      const std::size_t at_wc = detail::count_near(tc.eigenvalues, tc.omega_c, 1e-10);
      const double mid = 0.5 * (we + tc.omega_c);
      const double half = std::sqrt(0.25 * (tc.omega_c - we) * (tc.omega_c - we) + tc.g * tc.g * tc.n);
      const double lp = tc.eigenvalues.front(), up = tc.eigenvalues.back();
      const double err = std::max(std::abs(lp - (mid - half)), std::abs(up - (mid + half)));
      checks.push_back({"tavis_cummings_dark_manifold_" + tag, at_we == tc.n - 1,
                        std::to_string(at_we) + " eigenvalues at hbar w_e (expected " + std::to_string(tc.n - 1) + ")"});
      checks.push_back({"tavis_cummings_uncoupled_mode_" + tag, at_wc == 1,
                        std::to_string(at_wc) + " eigenvalue(s) at hbar w_c (expected 1)"});
      checks.push_back({"tavis_cummings_detuned_polaritons_" + tag, err <= 1e-8,
                        "LP " + detail::fmt(lp) + ", UP " + detail::fmt(up) + "; max error " + detail::fmt(err)});
    }
    {  // resonant splitting
      const auto c = detail::tavis_cummings_config(15, resonant_length(2.0));
      const auto tc = detail::tavis_cummings(c, route);
      const double split = tc.eigenvalues.back() - tc.eigenvalues.front();
      const double expect = 2.0 * tc.g * std::sqrt(static_cast<double>(tc.n));
      checks.push_back({"tavis_cummings_resonant_splitting_" + tag, std::abs(split - expect) <= 1e-8,
                        "splitting " + detail::fmt(split) + " vs 2 g sqrt(N) = " + detail::fmt(expect)});
    }
  }

  {  // decoupled
    RunConfig c;
    c.lattice.nx = c.lattice.ny = 5;
    c.g0_override = 0.0;
    const auto out = run_single(c, 7);
    bool binary = true;
    for (const auto& r : out.records)
      if (r.photon_fraction != 0.0 && r.photon_fraction != 1.0) binary = false;
    const bool counts = out.summary.dark_count == out.n_molecules && out.summary.bright_count == out.n_modes;
    checks.push_back({"decoupled_limit", binary && counts,
                      "dark " + std::to_string(out.summary.dark_count) + " / N = " + std::to_string(out.n_molecules) +
                          ", bright " + std::to_string(out.summary.bright_count) + " / M = " +
                          std::to_string(out.n_modes) + (binary ? "" : ", fractional photon weight found")});
  }
  return checks;
}

}  // namespace darkstates
