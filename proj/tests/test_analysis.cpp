#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "darkstates/analysis.hpp"

using namespace darkstates;

namespace {

struct Solved {
  std::vector<PhotonMode> modes;
  EigenSystem<double> eigen;
  std::vector<StateRecord> records;
  std::size_t n = 0;
};

Solved solve(int side, double sigma, std::uint64_t seed, double g0_scale = 1.0) {
  LatticeSpec l;
  l.nx = l.ny = side;
  const auto cavity = make_cavity(l, 300.0);
  DisorderSpec spec;
  spec.sigma_e = sigma;
  spec.seed = seed;
  const auto real = sample_realization(spec, l);
  const auto sites = molecule_positions(l, cavity);
  Solved s;
  s.modes = wavevector_grid(l, cavity);
  auto calib = calibrate(0.2, sites.size(), eta_factor(sites, cavity.lz));
  calib.g0 *= g0_scale;
  s.eigen = diagonalize(assemble_standing_wave(real, sites, s.modes, calib, cavity, 2.0));
  s.records = classify_states(s.eigen, s.modes);
  s.n = sites.size();
  return s;
}

StateRecord dark(double pr) {
  StateRecord r;
  r.pr = pr;
  r.classification = StateClass::dark;
  return r;
}

}  // namespace

TEST(ParticipationRatio, Examples) {
  const std::size_t n = 64;
  std::vector<double> uniform(n, 1.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(participation_ratio<double>(uniform), 64.0, 1e-12);
  std::vector<double> local(n, 0.0);
  local[17] = 1.0;
  EXPECT_EQ(participation_ratio<double>(local), 1.0);
  std::vector<double> two{std::sqrt(0.8), std::sqrt(0.2)};
  EXPECT_NEAR(participation_ratio<double>(two), 1.4706, 5e-5);
  EXPECT_NEAR(participation_ratio<double>(two), 1.0 / 0.68, 1e-12);
}

TEST(ParticipationRatio, ScaleInvariantAndBounded) {
  std::vector<cplx> a{{0.3, 0.1}, {-0.2, 0.4}, {0.05, 0.0}, {0.0, -0.6}};
  std::vector<cplx> b;
  for (auto v : a) b.push_back(7.0 * v);
  const double pa = participation_ratio<cplx>(a);
  EXPECT_NEAR(participation_ratio<cplx>(b), pa, 1e-12);
  EXPECT_GE(pa, 1.0);
  EXPECT_LE(pa, 4.0);
  std::vector<double> zero(5, 0.0);
  EXPECT_THROW(participation_ratio<double>(zero), DomainError);
}

TEST(PhotonFraction, Examples) {
  std::vector<double> b{0.0, 0.0};
  EXPECT_EQ(photon_fraction<double>(b), 0.0);
  std::vector<double> half{std::sqrt(0.25), std::sqrt(0.25)};
  EXPECT_NEAR(photon_fraction<double>(half), 0.5, 1e-15);
}

TEST(Classify, ThresholdIsStrict) {
  EXPECT_EQ(classify(0.049999), StateClass::dark);
  EXPECT_EQ(classify(0.05), StateClass::bright);
  EXPECT_EQ(classify(0.0), StateClass::dark);
  EXPECT_EQ(classify(0.2, 0.3), StateClass::dark);
}

TEST(ClassifyStates, DecoupledLimit) {
  const auto s = solve(5, 0.01, 3, 0.0);
  const auto sum = summarize(s.records);
  EXPECT_EQ(sum.dark_count, s.n);
  EXPECT_EQ(sum.bright_count, s.modes.size());
  for (const auto& r : s.records)
    if (r.classification == StateClass::dark) {
      EXPECT_NEAR(r.pr, 1.0, 1e-12);
    }
}

TEST(ClassifyStates, SumRulesOnCoupledSystem) {
  const auto s = solve(9, 0.01, 21);
  const auto sum = summarize(s.records);
  EXPECT_EQ(sum.dark_count + sum.bright_count, s.n + s.modes.size());
  EXPECT_NEAR(sum.photon_fraction_sum, static_cast<double>(s.modes.size()), 1e-8);
  for (const auto& r : s.records) {
    EXPECT_GE(r.photon_fraction, -1e-12);
    EXPECT_LE(r.photon_fraction, 1.0 + 1e-12);
    if (r.classification == StateClass::dark) {
      EXPECT_GE(r.pr, 1.0 - 1e-9);
      EXPECT_LE(r.pr, static_cast<double>(s.n) + 1e-9);
    }
  }
  EXPECT_GT(sum.dark_count, 0u);
  EXPECT_LE(sum.pr_min, sum.dark_pr_mean);
  EXPECT_GE(sum.pr_max, sum.dark_pr_mean);
}

TEST(ClassifyStates, AssignedModeMaximizesPlaneWaveWeight) {
  const auto s = solve(5, 0.01, 4);
  for (std::size_t j = 0; j < s.eigen.dim(); ++j) {
    const auto& r = s.records[j];
    const double w = mode_weight(s.eigen, j, r.assigned_index);
    for (std::size_t m = 0; m < s.modes.size(); ++m) EXPECT_LE(mode_weight(s.eigen, j, m), w + 1e-15);
    EXPECT_EQ(r.assigned_mode.mx, s.modes[r.assigned_index].mx);
  }
}

TEST(Ensemble, DarkPrStatExamples) {
  const auto st = dark_pr_stat({{dark(2.0)}, {dark(4.0)}});
  EXPECT_DOUBLE_EQ(st.mean, 3.0);
  EXPECT_DOUBLE_EQ(st.std, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(st.stderr_, 1.0);
  EXPECT_EQ(st.n_realizations, 2u);

  const auto one = dark_pr_stat({{dark(2.0), dark(4.0)}});
  EXPECT_DOUBLE_EQ(one.mean, 3.0);
  EXPECT_EQ(one.std, 0.0);
  EXPECT_EQ(one.n_realizations, 1u);

  const auto pair = dark_pr_stat({{dark(3.0)}, {dark(5.0)}});
  EXPECT_DOUBLE_EQ(pair.mean, 4.0);
  EXPECT_DOUBLE_EQ(pair.std, std::sqrt(2.0));
}

TEST(Ensemble, RealizationWithoutDarkStates) {
  StateRecord bright;
  bright.classification = StateClass::bright;
  bright.photon_fraction = 1.0;
  const auto st = dark_pr_stat({{dark(2.0)}, {bright}, {dark(6.0)}});
  EXPECT_EQ(st.n_empty, 1u);
  EXPECT_EQ(st.n_realizations, 2u);
  EXPECT_DOUBLE_EQ(st.mean, 4.0);
  EXPECT_THROW(dark_pr_stat({}), DomainError);
}

TEST(Ensemble, PairedDifference) {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b{1.5, 2.5, 3.5, 5.5};
  const auto d = paired_difference(a, b);
  EXPECT_DOUBLE_EQ(d.mean, 0.75);
  EXPECT_EQ(d.n, 4u);
  EXPECT_NEAR(d.stderr_, 0.5 / 2.0, 1e-15);  // diffs {0.5,0.5,0.5,1.5}: std 0.5
  EXPECT_THROW(paired_difference(a, std::vector<double>{1.0}), DomainError);
}

TEST(Dispersion, DecoupledRowsFollowBareModes) {
  const auto s = solve(7, 0.01, 2, 0.0);
  const auto rows = dispersion_table(s.records, 2.0, 0);
  ASSERT_EQ(rows.size(), s.modes.size());
  LatticeSpec l;
  l.nx = l.ny = 7;
  const auto cavity = make_cavity(l, 300.0);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.energy, mode_frequency(r.k, cavity), 1e-12);
    EXPECT_EQ(r.band, Band::upper);  // every bare mode lies above 2 eV at lz = 300
    EXPECT_NEAR(r.photon_fraction, 1.0, 1e-12);
  }
}

TEST(Dispersion, CoupledBandsAndOrdering) {
  const auto s = solve(9, 0.01, 2);
  const auto rows = dispersion_table(s.records, 2.0, 3);
  bool has_lp = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].band == Band::lower) {
      has_lp = true;
      EXPECT_LT(rows[i].energy, 2.0);
    }
    if (i > 0) {
      const auto& p = rows[i - 1];
      const auto& c = rows[i];
      const bool ordered = p.band != c.band ? p.band == Band::lower
                                            : (p.k != c.k ? p.k < c.k : p.energy <= c.energy);
      EXPECT_TRUE(ordered) << i;
    }
  }
  EXPECT_TRUE(has_lp);
  // per-band cap
  std::size_t run = 1, worst = 1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    run = rows[i].band == rows[i - 1].band && rows[i].k == rows[i - 1].k ? run + 1 : 1;
    worst = std::max(worst, run);
  }
  EXPECT_LE(worst, 3u);
}

TEST(LinearFit, Examples) {
  const std::vector<FitPoint> pts{{2000, 21.4}, {4000, 42.8}, {6000, 64.2}};
  const auto f = linear_fit(pts);
  EXPECT_NEAR(f.slope, 0.0107, 1e-15);
  EXPECT_NEAR(f.intercept, 0.0, 1e-10);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_EQ(f.n_points, 3u);

  const std::vector<FitPoint> flat{{2500, 5.0}, {3500, 5.0}, {9000, 5.0}};
  EXPECT_EQ(linear_fit(flat).slope, 0.0);

  // points below the threshold are ignored
  const std::vector<FitPoint> mixed{{121, 99.0}, {2000, 1.0}, {3000, 2.0}};
  EXPECT_DOUBLE_EQ(linear_fit(mixed).slope, 0.001);

  const std::vector<FitPoint> few{{121, 1.0}, {441, 2.0}, {2500, 3.0}};
  EXPECT_THROW(linear_fit(few), DomainError);
  EXPECT_NO_THROW(linear_fit(few, 100.0));
}

TEST(K0Gap, TwoIndependentTwoLevelSystems) {
  // two stacked molecules: the x dipole couples only to the k = 0 p mode, the y dipole only
  // to the k = 0 s mode, so each polarization is a detuned two-level problem
  LatticeSpec l;
  l.nx = l.ny = 1;
  l.nz = 2;
  const auto cavity = make_cavity(l, 300.0);
  Realization real;
  real.energies = {2.0, 2.0};
  real.dipoles = {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}};
  real.offsets = {{0.0, 0.0}, {0.0, 0.0}};
  const auto sites = molecule_positions(l, cavity);
  const auto modes = wavevector_grid(l, cavity);
  const CouplingCalibration calib{0.1, 0.5, 0.05};
  const double wc = lowest_mode_energy(cavity);
  const double h = calib.g0 * std::sqrt(wc / 2.0) * std::sin(kPi * sites[0].position[2] / 300.0);
  const double expected = std::sqrt((wc - 2.0) * (wc - 2.0) + 4.0 * h * h);
  const auto eigen = diagonalize(assemble_standing_wave(real, sites, modes, calib, cavity, 2.0));
  const auto gap = k0_polariton_gap(eigen, modes, 2.0);
  ASSERT_TRUE(gap.has_value());
  EXPECT_NEAR(*gap, expected, 1e-12);
}
