#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/spinwaves.hpp"
#include "spinchain/sublattice.hpp"

using namespace spinchain;
namespace sl = spinchain::sublattice;

namespace {

ChainSpec ring_spec(int n, int spin2, double alpha, double j0, double b) {
  ChainSpec spec;
  spec.n_sites = n;
  spec.spin2 = spin2;
  spec.alpha = alpha;
  spec.j0 = j0;
  spec.b = b;
  spec.boundary = Boundary::Periodic;
  return spec;
}

int index_of_momentum(const std::vector<double>& grid, double k) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - k) < 1e-12) return static_cast<int>(i);
  REQUIRE_MESSAGE(false, "momentum not on grid");
  return -1;
}

double fold(double k) {
  while (k >= std::numbers::pi - 1e-12) k -= 2 * std::numbers::pi;
  while (k < -std::numbers::pi - 1e-12) k += 2 * std::numbers::pi;
  return k;
}

}  // namespace

TEST_SUITE("sublattice") {

TEST_CASE("parity-split ring sums") {
  const sl::SublatticeSums four = sl::sublattice_sums(4, 1.0);
  CHECK(four.m_b == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(four.m_c == doctest::Approx(0.5).epsilon(1e-15));

  const sl::SublatticeSums two = sl::sublattice_sums(2, 3.0);
  CHECK(two.m_b == 1.0);
  CHECK(two.m_c == 0.0);

  // the parity split recombines to the aligned ring sum
  for (int n : {2, 4, 6, 10}) {
    for (double alpha : {0.8, 1.5, kAlphaInf}) {
      const sl::SublatticeSums sums = sl::sublattice_sums(n, alpha);
      const double j_e = spinwaves::effective_couplings_periodic(
                             ring_spec(n, 1, alpha, 1.0, 0.0))
                             .ferro;
      CAPTURE(n);
      CAPTURE(alpha);
      CHECK(std::abs(sums.m_b + sums.m_c - 2.0 * j_e) < 1e-14);
    }
  }

  const sl::SublatticeSums limit = sl::sublattice_sums(kSitesInf, 2.0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(limit.m_b - pi2 / 4) < 1e-12);
  CHECK(std::abs(limit.m_c - pi2 / 12) < 1e-12);

  const sl::SublatticeSums nn = sl::sublattice_sums(kSitesInf, kAlphaInf);
  CHECK(nn.m_b == 2.0);
  CHECK(nn.m_c == 0.0);

  // divergent pieces come back NaN instead of throwing
  const sl::SublatticeSums pole = sl::sublattice_sums(kSitesInf, 1.0);
  CHECK(doctest::IsNaN(pole.m_b));
  CHECK(doctest::IsNaN(pole.m_c));
  const sl::SublatticeSums heavy = sl::sublattice_sums(kSitesInf, 0.9);
  CHECK(std::isfinite(heavy.m_b));
  CHECK(doctest::IsNaN(heavy.m_c));
  const sl::SublatticeSums flat = sl::sublattice_sums(kSitesInf, 0.0);
  CHECK(flat.m_b == 0.0);

  CHECK_THROWS_AS(sl::sublattice_sums(5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sl::sublattice_sums(4, -0.5), std::domain_error);
  CHECK_THROWS_AS(
      sl::sublattice_sums(4, std::numeric_limits<double>::quiet_NaN()),
      std::domain_error);
}

TEST_CASE("Newton iteration lands on the expected roots") {
  const ChainSpec spec = ring_spec(6, 1, 1.5, 1.0, 1.0);
  const double j_e =
      spinwaves::effective_couplings_periodic(spec).ferro;

  // ordered, symmetric seed: both angles settle on acos(B / 2 J_e)
  const sl::SublatticeConfig ordered =
      sl::stationary_angles(spec, 1.2, 1.2);
  CHECK(ordered.residual < 1e-10);
  CHECK(std::abs(ordered.phi_b - ordered.phi_c) < 1e-9);
  CHECK(std::abs(ordered.phi_b - std::acos(1.0 / (2 * j_e))) < 1e-9);
  CHECK(ordered.iterations < 100);

  // a pi/2 tilt is already stationary at zero field
  ChainSpec free = spec;
  free.b = 0.0;
  const sl::SublatticeConfig zero_field = sl::stationary_angles(
      free, std::numbers::pi / 2, std::numbers::pi / 2);
  CHECK(zero_field.iterations == 0);
  CHECK(zero_field.residual < 1e-15);

  // above the critical field the tilt vanishes
  ChainSpec high = spec;
  high.b = 4.0;
  const sl::SublatticeConfig polarized =
      sl::stationary_angles(high, 0.3, 0.3);
  CHECK(std::abs(polarized.phi_b) < 1e-8);
  CHECK(std::abs(polarized.phi_c) < 1e-8);

  // the staggered pattern is stationary for an antialigned coupling
  const ChainSpec af = ring_spec(6, 1, 2.0, -1.0, 0.0);
  const sl::SublatticeConfig neel = sl::stationary_angles(
      af, std::numbers::pi / 2, -std::numbers::pi / 2);
  CHECK(neel.iterations == 0);

  CHECK_THROWS_AS(sl::stationary_angles(spec, 0.3, 0.3, 1e-10, 1),
                  std::runtime_error);
  CHECK_THROWS_AS(sl::stationary_angles(spec, 0.3, 0.3, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sl::stationary_angles(spec, 0.3, 0.3, 1e-10, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      sl::stationary_angles(ring_spec(5, 1, 1.5, 1.0, 1.0), 0.3, 0.3),
      std::invalid_argument);
  ChainSpec open = spec;
  open.boundary = Boundary::Open;
  CHECK_THROWS_AS(sl::stationary_angles(open, 0.3, 0.3),
                  std::invalid_argument);
  ChainSpec heavy = spec;
  heavy.n_sites = kSitesInf;
  heavy.alpha = 0.9;
  CHECK_THROWS_AS(sl::stationary_angles(heavy, 0.3, 0.3), std::domain_error);
}

TEST_CASE("block construction guards") {
  const ChainSpec spec = ring_spec(6, 1, 1.5, 1.0, 1.0);
  sl::SublatticeConfig config = sl::stationary_angles(spec, 1.2, 1.2);

  sl::SublatticeConfig wrong = config;
  wrong.m_b += 0.1;
  CHECK_THROWS_AS(sl::bdg_block(spec, wrong, 0.0), std::invalid_argument);
  wrong = config;
  wrong.n_sites = 8;
  CHECK_THROWS_AS(sl::bdg_block(spec, wrong, 0.0), std::invalid_argument);
  wrong = config;
  wrong.phi_b += 0.2;
  CHECK_THROWS_AS(sl::bdg_block(spec, wrong, 0.0), std::invalid_argument);
}

TEST_CASE("zone-center kernels and block symmetry") {
  const ChainSpec spec = ring_spec(6, 1, 1.5, 1.0, 1.0);
  const sl::SublatticeConfig config = sl::stationary_angles(spec, 1.2, 1.2);
  const sl::SublatticeSums sums = sl::sublattice_sums(6, 1.5);
  const sl::BdgBlock blk = sl::bdg_block(spec, config, 0.0);

  CHECK((blk.h - blk.h.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const double cb = std::cos(config.phi_b);
  const double cc = std::cos(config.phi_c);
  CHECK(blk.h(0, 2) == doctest::Approx(-cb * cb * sums.m_c).epsilon(1e-13));
  CHECK(blk.h(1, 3) == doctest::Approx(-cc * cc * sums.m_c).epsilon(1e-13));
  CHECK(blk.h(0, 1) == doctest::Approx(-cb * cc * sums.m_b).epsilon(1e-13));
  CHECK(blk.h(0, 3) == doctest::Approx(blk.h(0, 1)).epsilon(1e-15));

  // A - P leaves the diagonal frequencies, here the ordered-side constant
  const double omega_b = blk.h(0, 0) - blk.h(0, 2);
  const double omega_c = blk.h(1, 1) - blk.h(1, 3);
  const double j_e = (sums.m_b + sums.m_c) / 2;
  CHECK(omega_b == doctest::Approx(4.0 * j_e).epsilon(1e-12));
  CHECK(omega_c == doctest::Approx(omega_b).epsilon(1e-13));
}

TEST_CASE("two-site block reproduces both closed-form regimes") {
  for (double b : {0.5, 2.0}) {
    const ChainSpec spec = ring_spec(2, 1, 3.0, 1.0, b);
    const double seed = b < 1.0 ? 1.2 : 0.2;
    const sl::SublatticeConfig config =
        sl::stationary_angles(spec, seed, seed);
    const sl::BandStructure bands = sl::bdg_bands(spec, config);
    REQUIRE(bands.k.size() == 1);
    CHECK(bands.k[0] == 0.0);
    REQUIRE(bands.all_stable);

    const spinwaves::DickeForms forms =
        spinwaves::dicke_limit_check(1, b, 1.0);
    CAPTURE(b);
    CHECK(std::abs(bands.bands(0, 0) - forms.eps_minus) < 1e-10);
    CHECK(std::abs(bands.bands(0, 1) - forms.eps_plus) < 1e-10);
  }
}

TEST_CASE("folding the reduced zone recovers the single-band curve") {
  for (int n : {4, 6, 8, 16}) {
    for (double alpha : {1.0, 2.0, 3.0}) {
      const double b_c = spinwaves::critical_field(
          ring_spec(n, 1, alpha, 1.0, 0.0), spinwaves::Kind::Uniform);
      for (double b : {0.3 * b_c, 0.9 * b_c, 1.3 * b_c}) {
        const ChainSpec spec = ring_spec(n, 1, alpha, 1.0, b);
        const double seed = b < b_c ? 1.2 : 0.2;
        const sl::SublatticeConfig config =
            sl::stationary_angles(spec, seed, seed);
        const sl::BandStructure reduced = sl::bdg_bands(spec, config);
        const spinwaves::DispersionCurve full =
            spinwaves::dispersion(spec, spinwaves::Kind::Uniform);
        REQUIRE(full.all_stable);
        REQUIRE(reduced.all_stable);

        for (std::size_t i = 0; i < reduced.k.size(); ++i) {
          const double half = reduced.k[i] / 2;
          double lo = full.energy[index_of_momentum(full.k, fold(half))];
          double hi = full.energy[index_of_momentum(
              full.k, fold(half + std::numbers::pi))];
          if (lo > hi) std::swap(lo, hi);
          CAPTURE(n);
          CAPTURE(alpha);
          CAPTURE(b);
          CAPTURE(reduced.k[i]);
          CHECK(std::abs(reduced.bands(static_cast<Eigen::Index>(i), 0) - lo) <
                1e-9);
          CHECK(std::abs(reduced.bands(static_cast<Eigen::Index>(i), 1) - hi) <
                1e-9);
        }
      }
    }
  }
}

TEST_CASE("particle-hole eigenvalues pair up around zero") {
  const Eigen::Vector4d eta_diag(1.0, 1.0, -1.0, -1.0);
  for (double b : {0.8, 2.0, 4.0}) {
    const ChainSpec spec = ring_spec(8, 1, 2.0, 1.0, b);
    const double b_c = spinwaves::critical_field(spec, spinwaves::Kind::Uniform);
    const double seed = b < b_c ? 1.2 : 0.2;
    const sl::SublatticeConfig config = sl::stationary_angles(spec, seed, seed);
    for (double k : {0.0, std::numbers::pi / 2, -std::numbers::pi}) {
      const sl::BdgBlock blk = sl::bdg_block(spec, config, k);
      REQUIRE(blk.stable);

      const Eigen::Matrix4d dyn = eta_diag.asDiagonal() * blk.h;
      const Eigen::EigenSolver<Eigen::Matrix4d> solver(dyn);
      const double scale = std::max(1.0, blk.h.cwiseAbs().maxCoeff());
      std::vector<double> lambdas;
      for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(solver.eigenvalues()[i].imag()) < 1e-10 * scale);
        lambdas.push_back(solver.eigenvalues()[i].real());
      }
      std::sort(lambdas.begin(), lambdas.end());
      CAPTURE(b);
      CAPTURE(k);
      // +- pairs, and the positive pair is the reported band pair
      CHECK(std::abs(lambdas[0] + lambdas[3]) < 1e-10 * scale);
      CHECK(std::abs(lambdas[1] + lambdas[2]) < 1e-10 * scale);
      CHECK(std::abs(lambdas[2] - blk.bands[0]) < 1e-10 * scale);
      CHECK(std::abs(lambdas[3] - blk.bands[1]) < 1e-10 * scale);
    }
  }
}

TEST_CASE("polarized saddle below the critical field is flagged") {
  const ChainSpec spec = ring_spec(6, 1, 1.5, 1.0, 1.0);
  const sl::SublatticeConfig saddle = sl::stationary_angles(spec, 0.0, 0.0);
  CHECK(saddle.residual < 1e-12);

  const sl::BandStructure bands = sl::bdg_bands(spec, saddle);
  CHECK_FALSE(bands.all_stable);
  const int center = index_of_momentum(bands.k, 0.0);
  CHECK(bands.stable[center] == 0);
  CHECK(doctest::IsNaN(bands.bands(center, 0)));
  CHECK(doctest::IsNaN(bands.bands(center, 1)));
}

TEST_CASE("staggered pattern of the antialigned ring carries flat bands") {
  const ChainSpec spec = ring_spec(6, 1, 2.0, -1.0, 0.0);
  const sl::SublatticeConfig neel = sl::stationary_angles(
      spec, std::numbers::pi / 2, -std::numbers::pi / 2);
  const sl::SublatticeSums sums = sl::sublattice_sums(6, 2.0);
  const double expected = 2.0 * (sums.m_b - sums.m_c);

  const sl::BandStructure bands = sl::bdg_bands(spec, neel);
  REQUIRE(bands.all_stable);
  for (Eigen::Index i = 0; i < bands.bands.rows(); ++i) {
    CHECK(bands.bands(i, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(bands.bands(i, 1) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("thermodynamic kernels agree with a large ring") {
  for (double alpha : {2.0, 3.0}) {
    const double tol = alpha == 2.0 ? 5e-3 : 1e-5;
    ChainSpec inf = ring_spec(2, 1, alpha, 1.0, 1.0);
    inf.n_sites = kSitesInf;
    const ChainSpec big = ring_spec(4000, 1, alpha, 1.0, 1.0);

    const sl::SublatticeConfig inf_cfg = sl::stationary_angles(inf, 1.2, 1.2);
    const sl::SublatticeConfig big_cfg = sl::stationary_angles(big, 1.2, 1.2);
    CHECK(std::abs(inf_cfg.phi_b - big_cfg.phi_b) < tol);

    for (double k : {0.0, 0.7, -2.1}) {
      const sl::BdgBlock a = sl::bdg_block(inf, inf_cfg, k);
      const sl::BdgBlock b = sl::bdg_block(big, big_cfg, k);
      REQUIRE(a.stable);
      REQUIRE(b.stable);
      CAPTURE(alpha);
      CAPTURE(k);
      CHECK(std::abs(a.h(0, 1) - b.h(0, 1)) < tol);  // odd-parity kernel
      CHECK(std::abs(a.h(0, 2) - b.h(0, 2)) < tol);  // even-parity kernel
      CHECK(std::abs(a.bands[0] - b.bands[0]) < tol);
      CHECK(std::abs(a.bands[1] - b.bands[1]) < tol);
    }
  }

  ChainSpec inf = ring_spec(2, 1, 2.0, 1.0, 1.0);
  inf.n_sites = kSitesInf;
  const sl::SublatticeConfig cfg = sl::stationary_angles(inf, 1.2, 1.2);
  const sl::BandStructure bands = sl::bdg_bands(inf, cfg, 256);
  CHECK(bands.k.size() == 256);
  CHECK(bands.all_stable);
  CHECK_THROWS_AS(sl::bdg_bands(inf, cfg, 1), std::invalid_argument);
}

}  // TEST_SUITE("sublattice")
