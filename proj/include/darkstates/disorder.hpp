#pragma once

// Static energetic, orientational and (optional) in-plane positional disorder. All draws
// are addressed by (seed, site index, field) so a realization does not depend on the order
// or the number of threads used to produce it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "darkstates/errors.hpp"
#include "darkstates/geometry.hpp"
#include "darkstates/philox.hpp"

namespace darkstates {

struct DisorderSpec {
  double mean_energy = 2.0;  // hbar omega_e, eV
  double sigma_e = 0.01;     // eV
  bool orientational = true;
  double positional_fraction = 0.0;  // of the lattice spacing, in [0, 0.5]
  std::uint64_t seed = 0;
};

inline void validate(const DisorderSpec& spec) {
  if (!(spec.mean_energy > 0.0)) throw ConfigError("disorder mean_energy must be positive");
  if (!(spec.sigma_e >= 0.0)) throw ConfigError("disorder sigma_e must be >= 0");
  if (!(spec.positional_fraction >= 0.0 && spec.positional_fraction <= 0.5))
    throw ConfigError("disorder positional_fraction must lie in [0, 0.5]");
}

struct Realization {
  std::vector<double> energies;                  // hbar omega_{e,r}, eV
  std::vector<Vec3> dipoles;                     // unit transition dipoles
  std::vector<std::array<double, 2>> offsets;    // in-plane displacements, nm

  std::size_t size() const { return energies.size(); }
};

/// Derived seed for ensemble member `offset`. Injective in offset for a fixed base seed.
inline DisorderSpec resample_with_seed(DisorderSpec spec, std::uint64_t offset) {
  spec.seed = mix64(spec.seed + (offset + 1) * 0x9E3779B97F4A7C15ULL);
  return spec;
}

namespace detail {

inline void sample_range(const DisorderSpec& spec, const LatticeSpec& lattice, Realization& out,
                         std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    out.energies[i] = spec.mean_energy + spec.sigma_e * standard_normal(spec.seed, i, Field::energy);
    if (spec.orientational) {
      const auto u = uniform_pair(spec.seed, i, Field::orientation);
      const double cos_theta = 2.0 * u.first - 1.0;
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
      const double phi = 2.0 * kPi * u.second;
      Vec3 d{sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
      const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      for (auto& c : d) c /= norm;
      out.dipoles[i] = d;
    } else {
      out.dipoles[i] = {1.0, 0.0, 0.0};
    }
    if (spec.positional_fraction > 0.0) {
      const auto u = uniform_pair(spec.seed, i, Field::position);
      out.offsets[i] = {spec.positional_fraction * lattice.ax * (2.0 * u.first - 1.0),
                        spec.positional_fraction * lattice.ay * (2.0 * u.second - 1.0)};
    } else {
      out.offsets[i] = {0.0, 0.0};
    }
  }
}

}  // namespace detail

inline Realization sample_realization(const DisorderSpec& spec, const LatticeSpec& lattice,
                                      unsigned threads = 1) {
  validate(spec);
  validate(lattice);
  const std::size_t n = lattice.molecule_count();
  Realization out;
  out.energies.resize(n);
  out.dipoles.resize(n);
  out.offsets.resize(n);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    detail::sample_range(spec, lattice, out, 0, n);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] { detail::sample_range(spec, lattice, out, begin, end); });
    }
  }  // joined here
  return out;
}

/// Sites shifted by the realization's in-plane offsets. z is never displaced.
inline std::vector<MoleculeSite> displaced_sites(std::vector<MoleculeSite> sites,
                                                 const Realization& realization) {
  if (realization.offsets.size() != sites.size())
    throw DomainError("displaced_sites: realization size does not match site count");
  for (auto& site : sites) {
    site.position[0] += realization.offsets[site.index][0];
    site.position[1] += realization.offsets[site.index][1];
  }
  return sites;
}

}  // namespace darkstates
