#pragma once

// Cavity geometry, the lowest-band photon mode basis and molecule placement.
// Lengths are in nm, energies in eV.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "darkstates/constants.hpp"
#include "darkstates/errors.hpp"

namespace darkstates {

using Vec3 = std::array<double, 3>;
using CVec3 = std::array<std::complex<double>, 3>;

struct LatticeSpec {
  int nx = 1;
  int ny = 1;
  int nz = 1;
  double ax = 10.0;
  double ay = 10.0;
  double az = 10.0;

  std::size_t molecule_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t wavevector_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t mode_count() const { return 2 * wavevector_count(); }
};

struct CavityConfig {
  double lz = 300.0;
  double epsilon = 1.0;
  double lx = 0.0;  // derived: ax * (nx - 1)
  double ly = 0.0;  // derived: ay * (ny - 1)
};

inline void validate(const LatticeSpec& lattice) {
  if (lattice.nx < 1 || lattice.ny < 1 || lattice.nz < 1)
    throw ConfigError("lattice counts must be >= 1");
  if (lattice.nx % 2 == 0 || lattice.ny % 2 == 0)
    throw ConfigError("lattice nx and ny must be odd (got nx=" + std::to_string(lattice.nx) +
                      ", ny=" + std::to_string(lattice.ny) + ")");
  if (!(lattice.ax > 0.0) || !(lattice.ay > 0.0) || !(lattice.az > 0.0))
    throw ConfigError("lattice spacings must be positive");
}

inline void validate(const CavityConfig& cavity) {
  if (!(cavity.lz > 0.0)) throw ConfigError("cavity lz must be positive");
  if (!(cavity.epsilon >= 1.0)) throw ConfigError("cavity epsilon must be >= 1");
}

/// Validates both and checks that the molecular stack fits between the mirrors.
inline void validate(const LatticeSpec& lattice, const CavityConfig& cavity) {
  validate(lattice);
  validate(cavity);
  if (lattice.nz * lattice.az >= cavity.lz)
    throw ConfigError("molecular stack nz*az = " + std::to_string(lattice.nz * lattice.az) +
                      " nm does not fit inside lz = " + std::to_string(cavity.lz) + " nm");
}

/// In-plane cavity lengths are set to just contain the lattice.
inline CavityConfig make_cavity(const LatticeSpec& lattice, double lz, double epsilon = 1.0) {
  CavityConfig cavity;
  cavity.lz = lz;
  cavity.epsilon = epsilon;
  cavity.lx = lattice.ax * (lattice.nx - 1);
  cavity.ly = lattice.ay * (lattice.ny - 1);
  return cavity;
}

/// hbar * omega of the lowest band at in-plane wavevector magnitude k (nm^-1).
inline double mode_frequency(double k_mag, const CavityConfig& cavity) {
  if (!(k_mag >= 0.0)) throw DomainError("mode_frequency: k must be non-negative");
  const double kz = kPi / cavity.lz;
  return kHbarC / std::sqrt(cavity.epsilon) * std::sqrt(k_mag * k_mag + kz * kz);
}

inline double lowest_mode_energy(const CavityConfig& cavity) {
  return kHbarC * kPi / (std::sqrt(cavity.epsilon) * cavity.lz);
}

enum class Polarization { s = 0, p = 1 };

inline const char* to_string(Polarization pol) { return pol == Polarization::s ? "s" : "p"; }

struct PhotonMode {
  int mx = 0;
  int my = 0;
  Polarization pol = Polarization::s;
  double kx = 0.0;
  double ky = 0.0;
  double omega = 0.0;  // hbar * omega in eV

  double k() const { return std::hypot(kx, ky); }
};

/// Builds the 2*nx*ny lowest-band modes ordered by (mx, my, polarization), s before p.
inline std::vector<PhotonMode> wavevector_grid(const LatticeSpec& lattice,
                                               const CavityConfig& cavity) {
  validate(lattice);
  validate(cavity);
  const int hx = (lattice.nx - 1) / 2;
  const int hy = (lattice.ny - 1) / 2;
  std::vector<PhotonMode> modes;
  modes.reserve(lattice.mode_count());
  for (int mx = -hx; mx <= hx; ++mx) {
    for (int my = -hy; my <= hy; ++my) {
      const double kx = hx == 0 ? 0.0 : 2.0 * kPi * mx / cavity.lx;
      const double ky = hy == 0 ? 0.0 : 2.0 * kPi * my / cavity.ly;
      const double omega = mode_frequency(std::hypot(kx, ky), cavity);
      for (auto pol : {Polarization::s, Polarization::p}) modes.push_back({mx, my, pol, kx, ky, omega});
    }
  }
  return modes;
}

/// Field profile e_{k,lambda}(z) of the lowest band. For k = 0 the s mode points along y
/// and the p mode along x.
inline CVec3 polarization_vector(const PhotonMode& mode, double z, const CavityConfig& cavity) {
  if (!(z >= 0.0 && z <= cavity.lz))
    throw DomainError("polarization_vector: z = " + std::to_string(z) + " outside [0, lz]");
  using cd = std::complex<double>;
  const double arg = kPi * z / cavity.lz;
  const double sn = std::sin(arg);
  const double k = mode.k();
  if (k == 0.0) {
    if (mode.pol == Polarization::s) return {cd{}, cd{0.0, sn}, cd{}};
    return {cd{sn, 0.0}, cd{}, cd{}};
  }
  const double khx = mode.kx / k;
  const double khy = mode.ky / k;
  if (mode.pol == Polarization::s) {
    // i sin(pi z / lz) (k_hat x z_hat), k_hat x z_hat = (khy, -khx, 0)
    return {cd{0.0, sn * khy}, cd{0.0, -sn * khx}, cd{}};
  }
  const double kz = kPi / cavity.lz;
  const double ratio = kz / std::hypot(k, kz);  // omega_{c,0} / omega_{c,k}
  const double cs = std::cos(arg);
  const double longit = k / kz;  // k lz / pi
  return {cd{ratio * sn * khx, 0.0}, cd{ratio * sn * khy, 0.0}, cd{0.0, -ratio * longit * cs}};
}

struct MoleculeSite {
  std::size_t index = 0;
  Vec3 position{};
};

/// Flat site index for lattice coordinates, matching the (nx, ny, nz) lexicographic order.
inline std::size_t site_index(const LatticeSpec& lattice, int ix, int iy, int iz) {
  return (static_cast<std::size_t>(ix) * lattice.ny + iy) * lattice.nz + iz;
}

inline std::vector<MoleculeSite> molecule_positions(const LatticeSpec& lattice,
                                                    const CavityConfig& cavity) {
  validate(lattice);
  std::vector<MoleculeSite> sites;
  sites.reserve(lattice.molecule_count());
  const double half_x = 0.5 * lattice.ax * (lattice.nx - 1);
  const double half_y = 0.5 * lattice.ay * (lattice.ny - 1);
  for (int ix = 0; ix < lattice.nx; ++ix) {
    for (int iy = 0; iy < lattice.ny; ++iy) {
      for (int iz = 0; iz < lattice.nz; ++iz) {
        const double x = ix * lattice.ax - half_x;
        const double y = iy * lattice.ay - half_y;
        const double z = 0.5 * cavity.lz + (0.5 - 0.5 * lattice.nz + iz) * lattice.az;
        sites.push_back({sites.size(), {x, y, z}});
      }
    }
  }
  return sites;
}

}  // namespace darkstates
