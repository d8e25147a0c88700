#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <set>

#include "darkstates/geometry.hpp"

using namespace darkstates;

namespace {

constexpr double kHc = 197.3269804;
const double kPiRef = std::acos(-1.0);

LatticeSpec square(int n, int nz = 1) {
  LatticeSpec l;
  l.nx = l.ny = n;
  l.nz = nz;
  return l;
}

double norm2(const CVec3& v) { return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]); }

}  // namespace

TEST(Constants, HbarC) { EXPECT_EQ(kHbarC, kHc); }

TEST(WavevectorGrid, ThreeByThree) {
  const auto l = square(3);
  const auto c = make_cavity(l, 300.0);
  EXPECT_DOUBLE_EQ(c.lx, 20.0);
  const auto modes = wavevector_grid(l, c);
  ASSERT_EQ(modes.size(), 18u);
  std::set<double> kx;
  std::set<std::pair<int, int>> ms;
  for (const auto& m : modes) {
    kx.insert(m.kx);
    ms.insert({m.mx, m.my});
    EXPECT_GE(m.mx, -1);
    EXPECT_LE(m.mx, 1);
  }
  EXPECT_EQ(ms.size(), 9u);
  ASSERT_EQ(kx.size(), 3u);
  EXPECT_NEAR(*kx.begin(), -2.0 * kPiRef / 20.0, 1e-15);
  EXPECT_EQ(*std::next(kx.begin()), 0.0);
  EXPECT_NEAR(*kx.rbegin(), 2.0 * kPiRef / 20.0, 1e-15);
}

TEST(WavevectorGrid, OrderingIsLexicographicWithSBeforeP) {
  const auto l = square(5);
  const auto modes = wavevector_grid(l, make_cavity(l, 300.0));
  for (std::size_t i = 1; i < modes.size(); ++i) {
    const auto a = std::make_tuple(modes[i - 1].mx, modes[i - 1].my, static_cast<int>(modes[i - 1].pol));
    const auto b = std::make_tuple(modes[i].mx, modes[i].my, static_cast<int>(modes[i].pol));
    EXPECT_LT(a, b);
  }
  EXPECT_EQ(modes[0].pol, Polarization::s);
  EXPECT_EQ(modes[1].pol, Polarization::p);
  EXPECT_EQ(modes[0].omega, modes[1].omega);
}

TEST(WavevectorGrid, SingleSite) {
  const auto l = square(1);
  const auto modes = wavevector_grid(l, make_cavity(l, 300.0));
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_EQ(modes[0].k(), 0.0);
  EXPECT_EQ(modes[1].k(), 0.0);
}

TEST(WavevectorGrid, LargeGridCounts) {
  const auto l = square(101);
  const auto modes = wavevector_grid(l, make_cavity(l, 300.0));
  EXPECT_EQ(modes.size(), 20402u);
  EXPECT_EQ(l.wavevector_count(), 10201u);
}

TEST(WavevectorGrid, MaxKDependsOnlyOnSpacing) {
  double kmax[2];
  int idx = 0;
  for (int n : {21, 41}) {
    const auto l = square(n);
    const auto modes = wavevector_grid(l, make_cavity(l, 300.0));
    double best = 0.0;
    for (const auto& m : modes) best = std::max(best, std::abs(m.kx));
    kmax[idx++] = best;
  }
  EXPECT_NEAR(kmax[0], kmax[1], 1e-14);
  EXPECT_NEAR(kmax[0], kPiRef / 10.0, 1e-14);
}

TEST(WavevectorGrid, RejectsEvenSides) {
  LatticeSpec l = square(4);
  EXPECT_THROW(wavevector_grid(l, CavityConfig{}), ConfigError);
  l.nx = 3;
  l.ny = 6;
  EXPECT_THROW(validate(l), ConfigError);
}

TEST(ModeFrequency, LowestModes) {
  CavityConfig c;
  c.lz = 300.0;
  // hbar c pi / L_z = 2.06640 eV
  EXPECT_NEAR(mode_frequency(0.0, c), kHc * kPiRef / 300.0, 1e-12);
  EXPECT_NEAR(mode_frequency(0.0, c), 2.06, 0.01);
  EXPECT_NEAR(mode_frequency(0.0, c), 2.066, 0.005);
  EXPECT_DOUBLE_EQ(mode_frequency(0.0, c), lowest_mode_energy(c));
  c.lz = 260.0;
  EXPECT_NEAR(mode_frequency(0.0, c), 2.384, 5e-4);
  c.lz = 340.0;
  EXPECT_NEAR(mode_frequency(0.0, c), 1.823, 5e-4);
  c.lz = 300.0;
  c.epsilon = 4.0;
  EXPECT_NEAR(mode_frequency(0.0, c), kHc * kPiRef / (2.0 * 300.0), 1e-12);
}

TEST(ModeFrequency, StrictlyIncreasingAndPolarizationIndependent) {
  CavityConfig c;
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double w = mode_frequency(0.003 * i, c);
    EXPECT_GT(w, prev);
    prev = w;
  }
  EXPECT_THROW(mode_frequency(-1.0, c), DomainError);
}

TEST(PolarizationVector, PaperConventions) {
  CavityConfig c;
  PhotonMode p0{0, 0, Polarization::p, 0.0, 0.0, 0.0};
  const auto e = polarization_vector(p0, c.lz / 2, c);
  EXPECT_NEAR(e[0].real(), 1.0, 1e-15);
  EXPECT_EQ(e[0].imag(), 0.0);
  EXPECT_EQ(std::abs(e[1]), 0.0);
  EXPECT_EQ(std::abs(e[2]), 0.0);

  PhotonMode s0{0, 0, Polarization::s, 0.0, 0.0, 0.0};
  const auto es0 = polarization_vector(s0, c.lz / 2, c);
  EXPECT_NEAR(es0[1].imag(), 1.0, 1e-15);

  PhotonMode sx{1, 0, Polarization::s, 0.1, 0.0, 0.0};
  const auto es = polarization_vector(sx, c.lz / 2, c);
  EXPECT_NEAR(std::abs(es[0]), 0.0, 1e-15);
  EXPECT_NEAR(es[1].real(), 0.0, 1e-15);
  EXPECT_NEAR(es[1].imag(), -1.0, 1e-15);
  EXPECT_NEAR(std::abs(es[2]), 0.0, 1e-15);
}

TEST(PolarizationVector, SVanishesAtMirrors) {
  CavityConfig c;
  PhotonMode s{2, -1, Polarization::s, 0.2, -0.1, 0.0};
  for (double z : {0.0, c.lz}) EXPECT_NEAR(norm2(polarization_vector(s, z, c)), 0.0, 1e-30);
  EXPECT_THROW(polarization_vector(s, -1e-9, c), DomainError);
  EXPECT_THROW(polarization_vector(s, c.lz + 1e-9, c), DomainError);
}

TEST(PolarizationVector, PModeClosedForm) {
  CavityConfig c;
  const double kx = 0.03, ky = -0.04, k = 0.05, z = 70.0;
  PhotonMode p{1, -1, Polarization::p, kx, ky, 0.0};
  const auto e = polarization_vector(p, z, c);
  const double ratio = mode_frequency(0.0, c) / mode_frequency(k, c);
  const double sn = std::sin(kPiRef * z / c.lz), cs = std::cos(kPiRef * z / c.lz);
  EXPECT_NEAR(e[0].real(), ratio * sn * kx / k, 1e-14);
  EXPECT_NEAR(e[1].real(), ratio * sn * ky / k, 1e-14);
  EXPECT_NEAR(e[2].imag(), -ratio * k * c.lz / kPiRef * cs, 1e-13);
  EXPECT_EQ(e[2].real(), 0.0);
}

TEST(PolarizationVector, ZAverageOfSquaredNormIsHalf) {
  const auto l = square(11);
  const auto c = make_cavity(l, 300.0);
  for (const auto& m : wavevector_grid(l, c)) {
    const int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += norm2(polarization_vector(m, c.lz * (i + 0.5) / n, c));
    EXPECT_NEAR(acc / n, 0.5, 1e-3);
    // magnitude bound
    const double kz = kPiRef / c.lz;
    const double ratio = kz / std::hypot(m.k(), kz);
    const double bound = std::max(1.0, ratio * std::max(1.0, m.k() / kz));
    for (double z : {0.0, 10.0, 150.0, 299.0})
      EXPECT_LE(std::sqrt(norm2(polarization_vector(m, z, c))), bound + 1e-12);
  }
}

TEST(MoleculePositions, Coordinates) {
  LatticeSpec l = square(3);
  const auto c = make_cavity(l, 300.0);
  const auto sites = molecule_positions(l, c);
  ASSERT_EQ(sites.size(), 9u);
  std::set<double> xs;
  for (const auto& s : sites) {
    xs.insert(s.position[0]);
    EXPECT_EQ(s.position[2], 150.0);
  }
  EXPECT_EQ(xs, (std::set<double>{-10.0, 0.0, 10.0}));
  EXPECT_EQ(sites[1].position[1], 0.0);  // (0, 1, 0)
  EXPECT_EQ(sites[3].position[0], 0.0);  // (1, 0, 0)
}

TEST(MoleculePositions, TwoLayers) {
  LatticeSpec l = square(1, 2);
  const auto sites = molecule_positions(l, make_cavity(l, 300.0));
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_DOUBLE_EQ(sites[0].position[2], 145.0);
  EXPECT_DOUBLE_EQ(sites[1].position[2], 155.0);
}

TEST(MoleculePositions, CenteredMeans) {
  for (int nz : {1, 4, 7}) {
    LatticeSpec l = square(9, nz);
    l.ax = 7.5;
    const auto c = make_cavity(l, 300.0);
    const auto sites = molecule_positions(l, c);
    double mx = 0, my = 0, mz = 0;
    for (const auto& s : sites) mx += s.position[0], my += s.position[1], mz += s.position[2];
    const double n = static_cast<double>(sites.size());
    EXPECT_LT(std::abs(mx / n), 1e-9);
    EXPECT_LT(std::abs(my / n), 1e-9);
    EXPECT_LT(std::abs(mz / n - 150.0), 1e-9);
    for (std::size_t i = 0; i < sites.size(); ++i) EXPECT_EQ(sites[i].index, i);
  }
}

TEST(MoleculePositions, LayersDoNotChangeModes) {
  const auto c = make_cavity(square(7), 300.0);
  const auto a = wavevector_grid(square(7, 1), c);
  const auto b = wavevector_grid(square(7, 5), c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].omega, b[i].omega);
}

TEST(Validation, CavityAndStack) {
  CavityConfig c;
  c.lz = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
  c.lz = 300.0;
  c.epsilon = 0.5;
  EXPECT_THROW(validate(c), ConfigError);
  LatticeSpec l = square(3, 29);
  EXPECT_NO_THROW(validate(l, make_cavity(l, 300.0)));
  l.nz = 30;
  EXPECT_THROW(validate(l, make_cavity(l, 300.0)), ConfigError);
  l = square(3);
  l.ax = 0.0;
  EXPECT_THROW(validate(l), ConfigError);
}
