#pragma once

// Coupling calibration and assembly of the single-excitation Hamiltonian
//
//   H = sum_r E_r |e_r><e_r| + sum_j w_j |c_j><c_j| + sum_{r,j} (h_rj |e_r><c_j| + h.c.)
//
// with h_rj = -g0 sqrt(w_j / w_e) exp(i k_j . r) (mu_r . e_j(z_r)). Two layouts are provided:
// the plain-wave complex Hermitian matrix, and an exactly equivalent real symmetric matrix
// obtained by pairing every mode k with its partner -k into standing waves.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "darkstates/disorder.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/geometry.hpp"

namespace darkstates {

using cplx = std::complex<double>;

struct CouplingCalibration {
  double target_rabi = 0.0;  // eV
  double eta = 0.0;
  double g0 = 0.0;  // single-molecule coupling at w = w_e, eV
};

/// sqrt(<sin^2(pi z / lz)>_z / 3) over the given molecule heights.
inline double eta_factor(std::span<const double> z_coords, double lz) {
  if (z_coords.empty()) throw DomainError("eta_factor: no molecules");
  double acc = 0.0;
  for (double z : z_coords) {
    if (!(z >= 0.0 && z <= lz)) throw DomainError("eta_factor: z outside [0, lz]");
    const double s = std::sin(kPi * z / lz);
    acc += s * s;
  }
  return std::sqrt(acc / static_cast<double>(z_coords.size()) / 3.0);
}

inline double eta_factor(const std::vector<MoleculeSite>& sites, double lz) {
  std::vector<double> z;
  z.reserve(sites.size());
  for (const auto& s : sites) z.push_back(s.position[2]);
  return eta_factor(z, lz);
}

/// Single-molecule coupling that reproduces the collective Rabi splitting target_rabi.
inline CouplingCalibration calibrate(double target_rabi, std::size_t n_molecules, double eta) {
  if (n_molecules < 1) throw ConfigError("calibrate: need at least one molecule");
  if (!(target_rabi >= 0.0)) throw ConfigError("calibrate: target Rabi splitting must be >= 0");
  if (!(eta > 0.0))
    throw ConfigError("calibrate: eta = 0 (all molecules at field nodes), coupling cannot be calibrated");
  return {target_rabi, eta, target_rabi / (2.0 * eta * std::sqrt(static_cast<double>(n_molecules)))};
}

/// Plain dot product, neither vector conjugated.
inline cplx dot(const Vec3& mu, const CVec3& e) { return mu[0] * e[0] + mu[1] * e[1] + mu[2] * e[2]; }

inline cplx coupling_element(const MoleculeSite& site, const Vec3& dipole, const PhotonMode& mode,
                             const CouplingCalibration& calib, const CavityConfig& cavity,
                             double mean_energy) {
  const double prefactor = -calib.g0 * std::sqrt(mode.omega / mean_energy);
  const double phase = mode.kx * site.position[0] + mode.ky * site.position[1];
  return prefactor * std::polar(1.0, phase) *
         dot(dipole, polarization_vector(mode, site.position[2], cavity));
}

/// Evaluates coupling elements with per-mode prefactors and per-layer field vectors cached.
class CouplingEvaluator {
 public:
  CouplingEvaluator(const std::vector<MoleculeSite>& sites, const Realization& realization,
                    const std::vector<PhotonMode>& modes, const CouplingCalibration& calib,
                    const CavityConfig& cavity, double mean_energy)
      : sites_(sites), realization_(realization), modes_(modes) {
    if (realization.dipoles.size() != sites.size())
      throw DomainError("coupling: realization size does not match site count");
    for (const auto& s : sites) {
      const double z = s.position[2];
      if (std::find(heights_.begin(), heights_.end(), z) == heights_.end()) heights_.push_back(z);
    }
    layer_.reserve(sites.size());
    for (const auto& s : sites)
      layer_.push_back(static_cast<std::size_t>(
          std::find(heights_.begin(), heights_.end(), s.position[2]) - heights_.begin()));
    prefactor_.reserve(modes.size());
    field_.resize(heights_.size() * modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
      prefactor_.push_back(-calib.g0 * std::sqrt(modes[j].omega / mean_energy));
      for (std::size_t l = 0; l < heights_.size(); ++l)
        field_[l * modes.size() + j] = polarization_vector(modes[j], heights_[l], cavity);
    }
  }

  cplx operator()(std::size_t r, std::size_t j) const {
    const auto& pos = sites_[r].position;
    const auto& mode = modes_[j];
    const double phase = mode.kx * pos[0] + mode.ky * pos[1];
    return prefactor_[j] * std::polar(1.0, phase) *
           dot(realization_.dipoles[r], field_[layer_[r] * modes_.size() + j]);
  }

 private:
  const std::vector<MoleculeSite>& sites_;
  const Realization& realization_;
  const std::vector<PhotonMode>& modes_;
  std::vector<double> heights_;
  std::vector<std::size_t> layer_;
  std::vector<double> prefactor_;
  std::vector<CVec3> field_;
};

/// Dense complex Hermitian matrix, column-major. Rows [0, N) are molecules in site order,
/// rows [N, N + M) photon modes in mode order.
struct HamiltonianMatrix {
  std::size_t n_molecules = 0;
  std::size_t n_modes = 0;
  std::vector<cplx> data;

  std::size_t dim() const { return n_molecules + n_modes; }
  cplx& operator()(std::size_t i, std::size_t j) { return data[i + j * dim()]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data[i + j * dim()]; }
};

inline HamiltonianMatrix assemble(const Realization& realization,
                                  const std::vector<MoleculeSite>& sites,
                                  const std::vector<PhotonMode>& modes,
                                  const CouplingCalibration& calib, const CavityConfig& cavity,
                                  double mean_energy) {
  if (realization.energies.size() != sites.size())
    throw DomainError("assemble: realization has " + std::to_string(realization.energies.size()) +
                      " molecules but " + std::to_string(sites.size()) + " sites were given");
  HamiltonianMatrix h;
  h.n_molecules = sites.size();
  h.n_modes = modes.size();
  const std::size_t n = h.dim();
  h.data.assign(n * n, cplx{});
  for (std::size_t r = 0; r < h.n_molecules; ++r) h(r, r) = realization.energies[r];
  for (std::size_t j = 0; j < h.n_modes; ++j) h(h.n_molecules + j, h.n_molecules + j) = modes[j].omega;
  const CouplingEvaluator coupling(sites, realization, modes, calib, cavity, mean_energy);
  for (std::size_t j = 0; j < h.n_modes; ++j) {
    for (std::size_t r = 0; r < h.n_molecules; ++r) {
      const cplx v = coupling(r, j);
      h(r, h.n_molecules + j) = v;
      h(h.n_molecules + j, r) = std::conj(v);
    }
  }
  return h;
}

// --- standing-wave basis --------------------------------------------------------------
//
// For a real dipole, mu.e_{-k,s} = conj(mu.e_{k,s}) and mu.e_{-k,p} = -conj(mu.e_{k,p}), so
// with sigma = +1 (s) or -1 (p) the couplings obey h_{r,-k} = sigma conj(h_{r,k}). The states
//   |c1> = (|k> + sigma|-k>)/sqrt2,   |c2> = -i(|k> - sigma|-k>)/sqrt2
// then couple with real amplitudes sqrt2 Re h_{r,k} and sqrt2 Im h_{r,k}. Unpaired modes
// (k = 0) are made real by a fixed phase: i for s, 1 for p.

enum class BasisRole { single, cos_like, sin_like };

struct BasisColumn {
  BasisRole role = BasisRole::single;
  std::size_t partner = 0;   // the other plane-wave member of the pair (self when single)
  double sigma = 1.0;        // +1 s, -1 p
  cplx phase{1.0, 0.0};      // |c> = phase |k> for single columns
};

/// Maps each real photon column back to plane-wave modes. Column j of a pair sits at the
/// index of the plane-wave mode it replaces; cos_like at the lower index.
struct PhotonBasis {
  std::vector<BasisColumn> columns;

  std::size_t size() const { return columns.size(); }
  bool is_identity() const { return columns.empty(); }

  /// Plane-wave amplitudes b(k, lambda) from standing-wave amplitudes.
  std::vector<cplx> plane_wave_amplitudes(std::span<const double> standing) const {
    std::vector<cplx> out(standing.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto& c = columns[j];
      if (c.role == BasisRole::single) {
        out[j] = c.phase * standing[j];
      } else if (c.role == BasisRole::cos_like) {
        const double u = standing[j];
        const double v = standing[c.partner];
        out[j] = cplx{u, -v} * inv_sqrt2;
        out[c.partner] = c.sigma * cplx{u, v} * inv_sqrt2;
      }
    }
    return out;
  }

  /// |b(k, lambda)|^2 per plane-wave mode, without forming complex amplitudes.
  void plane_wave_weights(std::span<const double> standing, std::span<double> out) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto& c = columns[j];
      if (c.role == BasisRole::single) {
        out[j] = standing[j] * standing[j];
      } else if (c.role == BasisRole::cos_like) {
        const double w = 0.5 * (standing[j] * standing[j] + standing[c.partner] * standing[c.partner]);
        out[j] = w;
        out[c.partner] = w;
      }
    }
  }
};

inline PhotonBasis standing_wave_basis(const std::vector<PhotonMode>& modes) {
  std::map<std::tuple<int, int, int>, std::size_t> lookup;
  for (std::size_t j = 0; j < modes.size(); ++j)
    lookup[{modes[j].mx, modes[j].my, static_cast<int>(modes[j].pol)}] = j;
  PhotonBasis basis;
  basis.columns.resize(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto& m = modes[j];
    auto it = lookup.find({-m.mx, -m.my, static_cast<int>(m.pol)});
    if (it == lookup.end())
      throw DomainError("standing_wave_basis: mode list is not symmetric under k -> -k");
    const std::size_t partner = it->second;
    auto& col = basis.columns[j];
    col.partner = partner;
    col.sigma = m.pol == Polarization::s ? 1.0 : -1.0;
    if (partner == j) {
      col.role = BasisRole::single;
      col.phase = m.pol == Polarization::s ? cplx{0.0, 1.0} : cplx{1.0, 0.0};
    } else {
      col.role = j < partner ? BasisRole::cos_like : BasisRole::sin_like;
    }
  }
  return basis;
}

/// Real symmetric Hamiltonian in the standing-wave basis, stored in block form:
/// diagonal energies plus the dense N x M coupling block (column-major).
struct StandingWaveHamiltonian {
  std::size_t n_molecules = 0;
  std::size_t n_modes = 0;
  std::vector<double> diagonal;
  std::vector<double> coupling;
  PhotonBasis basis;
  double max_discarded_imag = 0.0;  // should be round-off only

  std::size_t dim() const { return n_molecules + n_modes; }
  double c(std::size_t r, std::size_t j) const { return coupling[r + j * n_molecules]; }

  /// Full dense column-major matrix (both triangles filled).
  std::vector<double> dense() const {
    const std::size_t n = dim();
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i + i * n] = diagonal[i];
    for (std::size_t j = 0; j < n_modes; ++j) {
      const std::size_t col = n_molecules + j;
      for (std::size_t r = 0; r < n_molecules; ++r) {
        const double v = c(r, j);
        a[r + col * n] = v;
        a[col + r * n] = v;
      }
    }
    return a;
  }

  double trace() const {
    double t = 0.0;
    for (double d : diagonal) t += d;
    return t;
  }

  double frobenius_norm() const {
    double acc = 0.0;
    for (double d : diagonal) acc += d * d;
    for (double v : coupling) acc += 2.0 * v * v;
    return std::sqrt(acc);
  }
};

inline StandingWaveHamiltonian assemble_standing_wave(const Realization& realization,
                                                      const std::vector<MoleculeSite>& sites,
                                                      const std::vector<PhotonMode>& modes,
                                                      const CouplingCalibration& calib,
                                                      const CavityConfig& cavity,
                                                      double mean_energy) {
  if (realization.energies.size() != sites.size())
    throw DomainError("assemble: realization size does not match site count");
  StandingWaveHamiltonian h;
  h.n_molecules = sites.size();
  h.n_modes = modes.size();
  h.basis = standing_wave_basis(modes);
  h.diagonal.reserve(h.dim());
  h.diagonal.insert(h.diagonal.end(), realization.energies.begin(), realization.energies.end());
  for (const auto& m : modes) h.diagonal.push_back(m.omega);
  h.coupling.assign(h.n_molecules * h.n_modes, 0.0);

  const CouplingEvaluator coupling(sites, realization, modes, calib, cavity, mean_energy);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  double discarded = 0.0;
  for (std::size_t j = 0; j < h.n_modes; ++j) {
    const auto& col = h.basis.columns[j];
    if (col.role == BasisRole::sin_like) continue;  // filled together with its cos_like partner
    double* out1 = h.coupling.data() + j * h.n_molecules;
    if (col.role == BasisRole::single) {
      for (std::size_t r = 0; r < h.n_molecules; ++r) {
        const cplx v = col.phase * coupling(r, j);
        out1[r] = v.real();
        discarded = std::max(discarded, std::abs(v.imag()));
      }
      continue;
    }
    double* out2 = h.coupling.data() + col.partner * h.n_molecules;
    for (std::size_t r = 0; r < h.n_molecules; ++r) {
      const cplx hk = coupling(r, j);
      const cplx hm = coupling(r, col.partner);
      const cplx v1 = (hk + col.sigma * hm) * inv_sqrt2;
      const cplx v2 = cplx{0.0, -1.0} * (hk - col.sigma * hm) * inv_sqrt2;
      out1[r] = v1.real();
      out2[r] = v2.real();
      discarded = std::max({discarded, std::abs(v1.imag()), std::abs(v2.imag())});
    }
  }
  h.max_discarded_imag = discarded;
  return h;
}

// --- shells -----------------------------------------------------------------------------

/// Shell selector: modes with max(|mx|, |my|) == m_max, or every mode when empty.
struct ShellSpec {
  std::optional<int> m_max;
};

inline std::size_t shell_mode_count(int m_max) { return m_max == 0 ? 2 : 16 * static_cast<std::size_t>(m_max); }

inline std::vector<PhotonMode> shell_filter(const std::vector<PhotonMode>& modes, ShellSpec shell) {
  if (!shell.m_max) return modes;
  int half_x = 0;
  int half_y = 0;
  for (const auto& m : modes) {
    half_x = std::max(half_x, std::abs(m.mx));
    half_y = std::max(half_y, std::abs(m.my));
  }
  const int m_max = *shell.m_max;
  if (m_max < 0 || m_max > std::min(half_x, half_y))
    throw ConfigError("shell m_max = " + std::to_string(m_max) + " outside [0, " +
                      std::to_string(std::min(half_x, half_y)) + "]");
  std::vector<PhotonMode> out;
  out.reserve(shell_mode_count(m_max));
  for (const auto& m : modes)
    if (std::max(std::abs(m.mx), std::abs(m.my)) == m_max) out.push_back(m);
  return out;
}

}  // namespace darkstates
