#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spinchain/exact.hpp"
#include "spinchain/meanfield.hpp"

using namespace spinchain;
namespace mf = spinchain::meanfield;

namespace {

ChainSpec make_spec(int n, int spin2, double alpha, double j0, double b,
                    Boundary boundary) {
  ChainSpec spec;
  spec.n_sites = n;
  spec.spin2 = spin2;
  spec.alpha = alpha;
  spec.j0 = j0;
  spec.b = b;
  spec.boundary = boundary;
  return spec;
}

mf::SpinConfiguration half_spin_config(const std::vector<int>& eps,
                                       const std::vector<int>& xi) {
  mf::SpinConfiguration config;
  config.lengths.assign(eps.size(), 0.5);
  config.eps = eps;
  config.xi = xi;
  return config;
}

std::vector<double> expand_table(const mf::LevelTable& table) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < table.energy.size(); ++i)
    for (long c = 0; c < std::llround(table.degeneracy[i]); ++c)
      flat.push_back(table.energy[i]);
  return flat;
}

double binomial(int n, int k) {
  double acc = 1;
  for (int i = 1; i <= k; ++i) acc *= double(n - k + i) / i;
  return acc;
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("effective couplings of hand-computed patterns") {
  const ChainSpec spec = make_spec(4, 1, 1.0, 1.0, 0.0, Boundary::Open);

  const auto uniform = mf::effective_couplings(
      spec, half_spin_config({1, 1, 1, 1}, {1, 1, 1, 1}));
  CHECK(std::abs(uniform.j_mu - 13.0 / 12) < 1e-14);
  CHECK(uniform.b_slope == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(uniform.stable());

  const auto alternating = mf::effective_couplings(
      spec, half_spin_config({1, -1, 1, -1}, {1, 1, 1, 1}));
  CHECK(std::abs(alternating.j_mu + 7.0 / 12) < 1e-14);
  CHECK_FALSE(alternating.stable());

  const auto one_flip = mf::effective_couplings(
      spec, half_spin_config({1, 1, 1, 1}, {1, -1, 1, 1}));
  CHECK(one_flip.b_slope == doctest::Approx(0.5).epsilon(1e-14));

  // slopes run through (N - 2k)/N as xi flips accumulate
  const auto two_flips = mf::effective_couplings(
      spec, half_spin_config({1, 1, 1, 1}, {-1, 1, -1, 1}));
  CHECK(std::abs(two_flips.b_slope) < 1e-15);
}

TEST_CASE("configuration counters") {
  const mf::SpinConfiguration config =
      half_spin_config({1, -1, -1, 1}, {1, -1, 1, 1});
  CHECK(config.domain_walls() == 2);
  CHECK(config.inverted_count() == 2);
  CHECK(config.flipped_count() == 1);

  const ChainSpec spec = make_spec(3, 2, 1.0, 1.0, 0.0, Boundary::Open);
  const mf::SpinConfiguration uniform = mf::uniform_configuration(spec);
  CHECK(uniform.lengths == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(uniform.domain_walls() == 0);
}

TEST_CASE("landscape energy closed form") {
  CHECK(mf::landscape_energy(0.7, 1.2, 0.0) == doctest::Approx(-1.2));
  CHECK(mf::landscape_energy(0.7, 1.2, std::numbers::pi / 2) ==
        doctest::Approx(-0.7));
  CHECK(mf::landscape_energy(1.0, 1.0, std::numbers::pi / 3) ==
        doctest::Approx(-1.25).epsilon(1e-14));
}

TEST_CASE("semiclassical branch: closed form, continuity, curvature jump") {
  mf::EffectiveCouplings couplings;
  couplings.j_mu = 1.0;
  couplings.b_slope = 1.0;
  const mf::SemiclassicalLevel level = mf::semiclassical_level(couplings);
  CHECK(level.branch == mf::Branch::Minimum);
  CHECK(level.b_c == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(level.value(0.0) == doctest::Approx(-1.0));
  CHECK(level.value(2.0) == doctest::Approx(-2.0));
  CHECK(level.value(3.0) == doctest::Approx(-3.0));

  // continuity and one continuous derivative across the bifurcation
  const double h = 1e-5;
  CHECK(std::abs(level.value(2.0 - 1e-9) - level.value(2.0 + 1e-9)) < 1e-8);
  const double d_below = (level.value(2.0 - h) - level.value(2.0 - 3 * h)) / (2 * h);
  const double d_above = (level.value(2.0 + 3 * h) - level.value(2.0 + h)) / (2 * h);
  CHECK(std::abs(d_below - d_above) < 1e-4);

  // curvature jumps by slope^2 / (2 j)
  CHECK(level.curvature_jump() == doctest::Approx(0.5).epsilon(1e-14));
  const auto second = [&](double b) {
    return (level.value(b + h) - 2 * level.value(b) + level.value(b - h)) /
           (h * h);
  };
  const double fd_jump = second(2.0 + 10 * h) - second(2.0 - 10 * h);
  CHECK(std::abs(fd_jump - level.curvature_jump()) < 1e-3);

  mf::EffectiveCouplings flipped;
  flipped.j_mu = -1.0;
  flipped.b_slope = -1.0;
  const mf::SemiclassicalLevel maximum = mf::semiclassical_level(flipped);
  CHECK(maximum.branch == mf::Branch::Maximum);
  CHECK(maximum.value(0.0) == doctest::Approx(1.0));
  CHECK(maximum.value(1.0) == doctest::Approx(1.25));
  CHECK(maximum.value(3.0) == doctest::Approx(3.0));

  const auto reject = [](double j, double slope) {
    mf::EffectiveCouplings c;
    c.j_mu = j;
    c.b_slope = slope;
    CHECK_THROWS_AS(mf::semiclassical_level(c), std::invalid_argument);
  };
  reject(1.0, -0.5);
  reject(-1.0, 0.5);
  reject(0.0, 1.0);
  reject(1.0, 0.0);
}

TEST_CASE("two-site level reproduces the bifurcation at b_c = J0") {
  const ChainSpec spec = make_spec(2, 1, 2.0, 1.0, 0.0, Boundary::Open);
  const auto couplings =
      mf::effective_couplings(spec, mf::uniform_configuration(spec));
  CHECK(couplings.j_mu == doctest::Approx(0.5).epsilon(1e-15));
  const mf::SemiclassicalLevel level = mf::semiclassical_level(couplings);
  CHECK(level.b_c == doctest::Approx(1.0).epsilon(1e-14));
  // 2SN = 2: total energies
  CHECK(mf::total_energy(spec, level, 0.0) == doctest::Approx(-1.0));
  CHECK(mf::total_energy(spec, level, 1.0) == doctest::Approx(-2.0));
}

TEST_CASE("landscape minimizer count flips at the bifurcation") {
  const auto interior_minima = [](double j, double beta) {
    const int steps = 6284;
    std::vector<double> values(steps + 1);
    for (int i = 0; i <= steps; ++i) {
      const double phi = -std::numbers::pi + 2 * std::numbers::pi * i / steps;
      values[i] = mf::landscape_energy(j, beta, phi);
    }
    std::vector<double> at;
    for (int i = 1; i < steps; ++i)
      if (values[i] < values[i - 1] && values[i] < values[i + 1])
        at.push_back(-std::numbers::pi + 2 * std::numbers::pi * i / steps);
    return at;
  };

  const auto two = interior_minima(1.0, 0.5);
  REQUIRE(two.size() == 2);
  const double expected = std::acos(0.25);
  CHECK(std::abs(two[0] + expected) < 2e-3);
  CHECK(std::abs(two[1] - expected) < 2e-3);

  const auto one = interior_minima(1.0, 3.0);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0]) < 2e-3);
}

TEST_CASE("enumeration counts and order") {
  const ChainSpec spec = make_spec(3, 1, 1.0, 1.0, 0.0, Boundary::Open);
  std::vector<mf::SpinConfiguration> seen;
  long visits = 0;
  mf::enumerate_configs(spec, mf::ConfigMode::EpsOnly,
                        [&](const mf::SpinConfiguration& c,
                            const mf::EffectiveCouplings&) {
                          if (seen.size() < 2) seen.push_back(c);
                          ++visits;
                        });
  CHECK(visits == 8);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0].eps == std::vector<int>{1, 1, 1});
  CHECK(seen[1].eps == std::vector<int>{1, 1, -1});  // site 0 most significant

  visits = 0;
  mf::enumerate_configs(spec, mf::ConfigMode::EpsXi,
                        [&](const auto&, const auto&) { ++visits; });
  CHECK(visits == 64);

  visits = 0;
  mf::enumerate_configs(spec, mf::ConfigMode::FullLengths,
                        [&](const auto&, const auto&) { ++visits; });
  CHECK(visits == 64);  // spin 1/2 has a single admissible length

  const ChainSpec spin_one = make_spec(2, 2, 1.0, 1.0, 0.0, Boundary::Open);
  visits = 0;
  mf::enumerate_configs(spin_one, mf::ConfigMode::FullLengths,
                        [&](const auto&, const auto&) { ++visits; });
  CHECK(visits == 64);  // (4 orientations x 2 lengths)^2
}

TEST_CASE("enumeration symmetry reductions") {
  const ChainSpec spec = make_spec(4, 1, 1.0, 1.0, 0.0, Boundary::Open);

  mf::EnumerateOptions z2;
  z2.reduce_global_flip = true;
  long visits = 0;
  mf::enumerate_configs(spec, mf::ConfigMode::EpsOnly,
                        [&](const mf::SpinConfiguration& c,
                            const mf::EffectiveCouplings&) {
                          CHECK(c.eps[0] == 1);
                          ++visits;
                        },
                        z2);
  CHECK(visits == 8);

  mf::EnumerateOptions mirror;
  mirror.reduce_mirror = true;
  visits = 0;
  mf::enumerate_configs(spec, mf::ConfigMode::EpsOnly,
                        [&](const auto&, const auto&) { ++visits; },
                        mirror);
  CHECK(visits == 10);  // 16 strings, 4 palindromes: (16 + 4)/2 orbits

  mf::EnumerateOptions tight;
  tight.budget = 10;
  CHECK_THROWS_AS(
      mf::enumerate_configs(make_spec(5, 1, 1.0, 1.0, 0.0, Boundary::Open),
                            mf::ConfigMode::EpsOnly,
                            [](const auto&, const auto&) {}, tight),
      BudgetError);
  CHECK_THROWS_AS(
      mf::enumerate_configs(make_spec(30, 1, 1.0, 1.0, 0.0, Boundary::Open),
                            mf::ConfigMode::EpsXi,
                            [](const auto&, const auto&) {}),
      BudgetError);
}

TEST_CASE("mirror reflection leaves the coupling invariant") {
  const ChainSpec spec = make_spec(6, 1, 1.3, 1.0, 0.0, Boundary::Open);
  mf::enumerate_configs(
      spec, mf::ConfigMode::EpsOnly,
      [&](const mf::SpinConfiguration& config, const mf::EffectiveCouplings& c) {
        mf::SpinConfiguration reversed = config;
        std::reverse(reversed.eps.begin(), reversed.eps.end());
        std::reverse(reversed.xi.begin(), reversed.xi.end());
        std::reverse(reversed.lengths.begin(), reversed.lengths.end());
        const auto rc = mf::effective_couplings(spec, reversed);
        CHECK(std::abs(rc.j_mu - c.j_mu) < 1e-12);
        CHECK(std::abs(rc.b_slope - c.b_slope) < 1e-12);
      });
}

TEST_CASE("distinct coupling classes of tiny chains") {
  const ChainSpec two = make_spec(2, 1, 2.0, 1.0, 0.0, Boundary::Open);
  const auto classes2 = mf::level_classes(two, mf::ConfigMode::EpsOnly);
  REQUIRE(classes2.size() == 2);
  std::map<double, double> by_j;
  for (const auto& c : classes2) by_j[c.j_mu] = c.multiplicity;
  CHECK(by_j.count(0.5) == 1);
  CHECK(by_j.count(-0.5) == 1);
  CHECK(by_j[0.5] == 2);
  CHECK(by_j[-0.5] == 2);

  const ChainSpec three = make_spec(3, 1, kAlphaInf, 1.0, 0.0, Boundary::Open);
  const auto classes3 = mf::level_classes(three, mf::ConfigMode::EpsOnly);
  std::map<long, double> mult_by_key;
  for (const auto& c : classes3)
    mult_by_key[std::lround(c.j_mu * 3)] += c.multiplicity;
  CHECK(mult_by_key[2] == 2);
  CHECK(mult_by_key[0] == 4);
  CHECK(mult_by_key[-2] == 2);
}

TEST_CASE("nearest-neighbour and flat level tables") {
  const mf::LevelTable ising3 = mf::ising_levels(3, 1.0);
  REQUIRE(ising3.energy.size() == 3);
  CHECK(ising3.energy == std::vector<double>{-2, 0, 2});
  CHECK(ising3.degeneracy == std::vector<double>{2, 4, 2});

  const mf::LevelTable ising11 = mf::ising_levels(11, 1.0);
  CHECK(ising11.energy.front() == doctest::Approx(-10.0));
  CHECK(ising11.energy.back() == doctest::Approx(10.0));

  double total = 0;
  for (double d : mf::ising_levels(20, 1.0).degeneracy) total += d;
  CHECK(total == doctest::Approx(std::pow(2.0, 20)).epsilon(1e-15));

  const mf::LevelTable lmg4 = mf::lmg_levels(4, 1.0);
  REQUIRE(lmg4.energy.size() == 3);
  CHECK(lmg4.energy == std::vector<double>{-6, 0, 2});
  CHECK(lmg4.degeneracy == std::vector<double>{2, 8, 6});

  const mf::LevelTable lmg5 = mf::lmg_levels(5, 1.0);
  REQUIRE(lmg5.energy.size() == 3);
  CHECK(lmg5.energy == std::vector<double>{-10, -2, 2});
  // quadratic level positions: consecutive gaps shrink linearly
  CHECK(lmg5.energy[1] - lmg5.energy[0] == doctest::Approx(8.0));
  CHECK(lmg5.energy[2] - lmg5.energy[1] == doctest::Approx(4.0));

  total = 0;
  for (double d : mf::lmg_levels(12, 1.0).degeneracy) total += d;
  CHECK(total == doctest::Approx(std::pow(2.0, 12)).epsilon(1e-15));
}

TEST_CASE("limit spectra match exact diagonalization") {
  // zero field, several interaction shapes and spin lengths
  for (int spin2 : {1, 2}) {
    for (double alpha : {0.0, 1.0, 2.0, kAlphaInf}) {
      const ChainSpec spec = make_spec(3, spin2, alpha, 0.9, 0.0, Boundary::Open);
      const std::vector<double> mf_values = mf::ferro_spectrum_b0(spec);
      const Eigen::VectorXd ed = exact::spectrum(spec);
      REQUIRE(static_cast<Eigen::Index>(mf_values.size()) == ed.size());
      double worst = 0;
      for (Eigen::Index i = 0; i < ed.size(); ++i)
        worst = std::max(worst, std::abs(mf_values[i] - ed[i]));
      CAPTURE(spin2);
      CAPTURE(alpha);
      CHECK(worst < 1e-10);
    }
  }

  // zero coupling
  const ChainSpec para = make_spec(2, 3, 2.0, 0.0, 0.8, Boundary::Open);
  const std::vector<double> mf_values = mf::para_spectrum_j0(para);
  const Eigen::VectorXd ed = exact::spectrum(para);
  REQUIRE(static_cast<Eigen::Index>(mf_values.size()) == ed.size());
  for (Eigen::Index i = 0; i < ed.size(); ++i)
    CHECK(std::abs(mf_values[i] - ed[i]) < 1e-10);
}

TEST_CASE("limit spectra hand examples") {
  const ChainSpec three = make_spec(3, 1, 2.0, 0.0, 1.0, Boundary::Open);
  CHECK(mf::para_spectrum_j0(three) ==
        std::vector<double>{-3, -1, -1, -1, 1, 1, 1, 3});

  const ChainSpec single = make_spec(1, 5, 2.0, 0.0, 1.0, Boundary::Open);
  CHECK(mf::para_spectrum_j0(single) ==
        std::vector<double>{-5, -3, -1, 1, 3, 5});

  const ChainSpec pair = make_spec(2, 2, 2.0, 1.0, 0.0, Boundary::Open);
  const std::vector<double> ferro = mf::ferro_spectrum_b0(pair);
  const std::vector<double> expected{-2, -2, 0, 0, 0, 0, 0, 2, 2};
  REQUIRE(ferro.size() == expected.size());
  for (std::size_t i = 0; i < ferro.size(); ++i)
    CHECK(std::abs(ferro[i] - expected[i]) < 1e-12);

  // the nearest-neighbour table describes the full enumeration
  const ChainSpec ising = make_spec(11, 1, kAlphaInf, 1.0, 0.0, Boundary::Open);
  const std::vector<double> flat = expand_table(mf::ising_levels(11, 1.0));
  const std::vector<double> enumerated = mf::ferro_spectrum_b0(ising);
  REQUIRE(flat.size() == enumerated.size());
  for (std::size_t i = 0; i < flat.size(); ++i)
    CHECK(std::abs(flat[i] - enumerated[i]) < 1e-12);
}

TEST_CASE("counting function") {
  const std::vector<double> levels = expand_table(mf::ising_levels(3, 1.0));
  CHECK(mf::counting_function(levels, -3.0) == 0.0);
  CHECK(mf::counting_function(levels, -2.0) == doctest::Approx(0.25));
  CHECK(mf::counting_function(levels, 0.0) == doctest::Approx(0.75));
  CHECK(mf::counting_function(levels, 2.0) == 1.0);
  CHECK(mf::counting_function(levels, 5.0) == 1.0);

  double last = -0.1;
  for (double e = -3; e <= 3; e += 0.05) {
    const double value = mf::counting_function(levels, e);
    CHECK(value >= last);
    last = value;
  }
  CHECK_THROWS_AS(mf::counting_function({}, 0.0), std::invalid_argument);
}

TEST_CASE("aligned and alternating boundary sums") {
  const ChainSpec open4 = make_spec(4, 1, 1.0, 1.0, 0.0, Boundary::Open);
  const CouplingPair pair = mf::effective_boundary_couplings(open4);
  CHECK(std::abs(pair.ferro - 13.0 / 12) < 1e-14);
  CHECK(std::abs(pair.anti + 7.0 / 12) < 1e-14);

  ChainSpec inf2 = open4;
  inf2.n_sites = kSitesInf;
  inf2.alpha = 2.0;
  const CouplingPair limit = mf::effective_boundary_couplings(inf2);
  CHECK(std::abs(limit.ferro - zeta_value(2.0)) < 1e-10);
  CHECK(std::abs(limit.anti + eta_value(2.0)) < 1e-10);

  ChainSpec heavy_tail = inf2;
  heavy_tail.alpha = 0.5;
  const CouplingPair half = mf::effective_boundary_couplings(heavy_tail);
  CHECK(std::isnan(half.ferro));
  CHECK(std::abs(half.anti + 0.6048986434216303) < 1e-9);

  ChainSpec ring = open4;
  ring.boundary = Boundary::Periodic;
  CHECK_THROWS_AS(mf::effective_boundary_couplings(ring),
                  std::invalid_argument);
}

TEST_CASE("deviation from the exact ground state") {
  const ChainSpec spec = make_spec(2, 1, 2.0, 1.0, 0.0, Boundary::Open);
  const auto points = mf::deviation(spec, {0.0, 1.0});
  REQUIRE(points.size() == 2);
  CHECK(std::abs(points[0].d) < 1e-12);
  CHECK(std::abs(points[1].exact_energy + std::sqrt(5.0)) < 1e-12);
  CHECK(std::abs(points[1].variational_energy + 2.0) < 1e-12);
  const double expected = (std::sqrt(5.0) - 2.0) / std::sqrt(5.0);
  CHECK(std::abs(points[1].d - expected) < 1e-10);
}

TEST_CASE("deviation stays nonnegative and thread-stable") {
  const ChainSpec spec = make_spec(4, 1, 1.5, 1.0, 0.0, Boundary::Open);
  const std::vector<double> grid = log_grid(0.1, 10.0, 7);
  const auto one = mf::deviation(spec, grid, 1);
  const auto three = mf::deviation(spec, grid, 3);
  REQUIRE(one.size() == grid.size());
  for (std::size_t p = 0; p < one.size(); ++p) {
    CAPTURE(p);
    CHECK(one[p].d >= -1e-12);
    CHECK(one[p].d == three[p].d);
  }
}

TEST_CASE("deviation error paths") {
  // all levels collapse to zero energy when both couplings vanish
  const ChainSpec free = make_spec(2, 1, 2.0, 0.0, 0.0, Boundary::Open);
  CHECK_THROWS_AS(mf::deviation(free, {0.0}), std::domain_error);
}

TEST_CASE("bifurcation histogram bookkeeping") {
  const ChainSpec spec = make_spec(8, 1, 1.7, 1.0, 0.0, Boundary::Open);
  const mf::BifurcationHistogram hist = mf::bifurcation_histogram(spec);

  // weights: stable pairs plus skipped ones cover the 2^N x 2^N product
  double placed = 0;
  for (double c : hist.count_configs) placed += c;
  CHECK(placed == doctest::Approx(hist.total_configs).epsilon(1e-15));
  CHECK(hist.total_configs + hist.skipped_configs ==
        doctest::Approx(std::pow(4.0, 8)).epsilon(1e-15));

  // guard bins stay empty, edges form a geometric ladder
  CHECK(hist.count_pairs.front() == 0.0);
  CHECK(hist.count_pairs.back() == 0.0);
  const double ratio = std::pow(10.0, 1.0 / hist.bins_per_decade);
  for (std::size_t i = 1; i < hist.edges.size(); ++i)
    CHECK(hist.edges[i] / hist.edges[i - 1] ==
          doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("bifurcation histogram matches a direct class cross product") {
  for (double alpha : {0.0, 1.7, kAlphaInf}) {
    const ChainSpec spec = make_spec(8, 1, alpha, 1.0, 0.0, Boundary::Open);
    const mf::BifurcationHistogram hist = mf::bifurcation_histogram(spec);

    // j classes through the generic enumeration, slopes from binomials
    const auto classes = mf::level_classes(spec, mf::ConfigMode::EpsOnly);
    std::map<int, std::pair<double, double>> manual;
    for (const auto& jc : classes) {
      for (int k = 0; k <= spec.n_sites; ++k) {
        const double slope =
            (spec.n_sites - 2.0 * k) / spec.n_sites;
        if (jc.j_mu <= 0.0 || slope <= 0.0) continue;
        const double bc = 2.0 * std::abs(jc.j_mu) / slope;
        const int idx = static_cast<int>(
            std::floor(hist.bins_per_decade * std::log10(bc)));
        manual[idx].first += jc.multiplicity * binomial(spec.n_sites, k);
        manual[idx].second += 1.0;
      }
    }

    CAPTURE(alpha);
    REQUIRE(!manual.empty());
    const int lo = manual.begin()->first - 1;
    REQUIRE(hist.count_pairs.size() ==
            static_cast<std::size_t>(manual.rbegin()->first + 1 - lo + 1));
    for (const auto& [idx, counts] : manual) {
      CAPTURE(idx);
      CHECK(hist.count_configs[idx - lo] == counts.first);
      CHECK(hist.count_pairs[idx - lo] == counts.second);
    }
  }
}

TEST_CASE("uniform nearest-neighbour chain bifurcates at 2 J0 (N-1)/N") {
  const ChainSpec spec = make_spec(20, 1, kAlphaInf, 1.0, 0.0, Boundary::Open);
  const mf::BifurcationHistogram hist = mf::bifurcation_histogram(spec);
  const double bc = 1.9;
  std::size_t bin = 0;
  while (bin + 1 < hist.edges.size() && hist.edges[bin + 1] <= bc) ++bin;
  CHECK(hist.count_pairs[bin] >= 1.0);
  const double peak_center = std::sqrt(hist.edges[hist.peak_bin] *
                                       hist.edges[hist.peak_bin + 1]);
  CHECK(peak_center > 1.0);
  CHECK(peak_center < 4.0);
}

}  // TEST_SUITE("meanfield")
