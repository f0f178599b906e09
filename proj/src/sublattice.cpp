#include "spinchain/sublattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinchain::sublattice {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_ring(const ChainSpec& spec) {
  spec.validate();
  if (spec.thermodynamic()) return;
  if (spec.boundary != Boundary::Periodic)
    throw std::invalid_argument("sublattice treatment needs a periodic chain");
  if (spec.n_sites % 2 != 0)
    throw std::invalid_argument("sublattice treatment needs an even ring");
}

struct Stationarity {
  double g_b = 0, g_c = 0;   // coupled stationarity equations
  double j_bb = 0, j_cc = 0; // Jacobian, symmetric with off entry j_bc
  double j_bc = 0;
};

Stationarity stationarity(double j0s, double b, const SublatticeSums& sums,
                          double phi_b, double phi_c) {
  const double sb = std::sin(phi_b), cb = std::cos(phi_b);
  const double sc = std::sin(phi_c), cc = std::cos(phi_c);
  const double field_b = sums.m_b * sc + sums.m_c * sb;
  const double field_c = sums.m_b * sb + sums.m_c * sc;
  Stationarity st;
  st.g_b = -j0s * cb * field_b + b * sb;
  st.g_c = -j0s * cc * field_c + b * sc;
  st.j_bb = j0s * sb * field_b - j0s * sums.m_c * cb * cb + b * cb;
  st.j_cc = j0s * sc * field_c - j0s * sums.m_c * cc * cc + b * cc;
  st.j_bc = -j0s * sums.m_b * cb * cc;
  return st;
}

struct Kernels {
  double p_bb = 0, p_cc = 0, off = 0;
};

// k-resolved quadratic kernels shared by the hopping and pairing blocks.
// Phases carry the physical displacement k r / 2, which keeps the 2 Re
// projection exact on the reduced grid for every even ring.
Kernels kernels(const ChainSpec& spec, double cb, double cc, double k) {
  double even = 0, odd = 0;
  if (spec.thermodynamic()) {
    if (std::isinf(spec.alpha)) {
      odd = 2.0 * std::cos(k / 2);
    } else {
      even = std::pow(2.0, 1.0 - spec.alpha) *
             clausen_truncated(spec.alpha, k, kSitesInf);
      const std::complex<double> phi = lerch_unit_circle(k, spec.alpha, 0.5);
      const std::complex<double> half_phase(std::cos(k / 2), std::sin(k / 2));
      odd = 2.0 * std::pow(2.0, -spec.alpha) * (half_phase * phi).real();
    }
  } else if (spec.n_sites == 2) {
    odd = std::cos(k / 2);
  } else {
    // Even displacements of I0_N are exactly 2 * I0_{N/2}.
    even = std::pow(2.0, 1.0 - spec.alpha) *
           clausen_truncated(spec.alpha, k, spec.n_sites / 2);
    for (int r : index_set(spec.n_sites, true))
      if (r % 2 != 0) odd += std::cos(k * r / 2.0) * inv_power(r, spec.alpha);
  }
  const double j0s = spec.coupling_scale();
  Kernels kr;
  kr.p_bb = -j0s * cb * cb * even;
  kr.p_cc = -j0s * cc * cc * even;
  kr.off = -j0s * cb * cc * odd;
  return kr;
}

SublatticeSums checked_sums(const ChainSpec& spec, const char* who) {
  const SublatticeSums sums = sublattice_sums(spec.n_sites, spec.alpha);
  if (!std::isfinite(sums.m_b) || !std::isfinite(sums.m_c))
    throw std::domain_error(std::string(who) +
                            ": sublattice sums diverge, need alpha > 1");
  return sums;
}

}  // namespace

SublatticeSums sublattice_sums(int n, double alpha) {
  if (std::isnan(alpha) || alpha < 0)
    throw std::domain_error("sublattice_sums: alpha must be >= 0");
  SublatticeSums s;
  if (n == kSitesInf) {
    const double odd_factor = 1.0 - std::pow(2.0, -alpha);
    s.m_b =
        alpha == 1 ? kNan : 2.0 * odd_factor * detail::zeta_extended(alpha);
    s.m_c = alpha > 1 ? std::pow(2.0, 1.0 - alpha) * zeta_value(alpha) : kNan;
    return s;
  }
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("sublattice_sums: even ring required");
  for (int r : index_set(n, true))
    (r % 2 != 0 ? s.m_b : s.m_c) += inv_power(r, alpha);
  return s;
}

SublatticeConfig stationary_angles(const ChainSpec& spec, double phi_b0,
                                   double phi_c0, double tol, int max_iter) {
  require_ring(spec);
  if (!(tol > 0))
    throw std::invalid_argument("stationary_angles: tol must be > 0");
  if (max_iter < 1)
    throw std::invalid_argument("stationary_angles: max_iter must be >= 1");

  const SublatticeSums sums = checked_sums(spec, "stationary_angles");
  const double j0s = spec.coupling_scale();

  SublatticeConfig cfg;
  cfg.m_b = sums.m_b;
  cfg.m_c = sums.m_c;
  cfg.n_sites = spec.n_sites;
  cfg.phi_b = phi_b0;
  cfg.phi_c = phi_c0;

  for (int it = 0; it <= max_iter; ++it) {
    const Stationarity st =
        stationarity(j0s, spec.b, sums, cfg.phi_b, cfg.phi_c);
    cfg.residual = std::max(std::abs(st.g_b), std::abs(st.g_c));
    cfg.iterations = it;
    if (cfg.residual < tol) return cfg;
    if (it == max_iter) break;

    const double det = st.j_bb * st.j_cc - st.j_bc * st.j_bc;
    const double scale = std::max(
        {std::abs(st.j_bb), std::abs(st.j_cc), std::abs(st.j_bc), 1e-300});
    if (!(std::abs(det) > 1e-14 * scale * scale))
      throw std::runtime_error("stationary_angles: singular Jacobian");
    cfg.phi_b -= (st.j_cc * st.g_b - st.j_bc * st.g_c) / det;
    cfg.phi_c -= (st.j_bb * st.g_c - st.j_bc * st.g_b) / det;
  }
  throw std::runtime_error("stationary_angles: no convergence after " +
                           std::to_string(max_iter) + " steps, residual " +
                           std::to_string(cfg.residual));
}

BdgBlock bdg_block(const ChainSpec& spec, const SublatticeConfig& config,
                   double k) {
  require_ring(spec);
  const SublatticeSums sums = checked_sums(spec, "bdg_block");
  if (config.n_sites != spec.n_sites ||
      std::abs(config.m_b - sums.m_b) > 1e-9 ||
      std::abs(config.m_c - sums.m_c) > 1e-9)
    throw std::invalid_argument("bdg_block: config does not match spec");

  const double j0s = spec.coupling_scale();
  const Stationarity st =
      stationarity(j0s, spec.b, sums, config.phi_b, config.phi_c);
  if (!(std::max(std::abs(st.g_b), std::abs(st.g_c)) < 1e-8))
    throw std::invalid_argument("bdg_block: config is not stationary");

  const double sb = std::sin(config.phi_b), cb = std::cos(config.phi_b);
  const double sc = std::sin(config.phi_c), cc = std::cos(config.phi_c);
  const double omega_b =
      2.0 * j0s * sb * (sums.m_b * sc + sums.m_c * sb) + 2.0 * spec.b * cb;
  const double omega_c =
      2.0 * j0s * sc * (sums.m_b * sb + sums.m_c * sc) + 2.0 * spec.b * cc;
  const Kernels kr = kernels(spec, cb, cc, k);

  BdgBlock blk;
  blk.k = k;
  Eigen::Matrix2d a;
  a << omega_b + kr.p_bb, kr.off, kr.off, omega_c + kr.p_cc;
  Eigen::Matrix2d p;
  p << kr.p_bb, kr.off, kr.off, kr.p_cc;
  blk.h.topLeftCorner<2, 2>() = a;
  blk.h.topRightCorner<2, 2>() = p;
  blk.h.bottomLeftCorner<2, 2>() = p;
  blk.h.bottomRightCorner<2, 2>() = a;

  // Squared bands are the eigenvalues of (A + P)(A - P), and A - P is
  // diag(omega_b, omega_c) by construction.
  const Eigen::Matrix2d m2 =
      (a + p) * Eigen::Vector2d(omega_b, omega_c).asDiagonal();
  const double tr = m2.trace();
  const double disc = 0.25 * tr * tr - m2.determinant();
  const double scale2 = std::max(m2.cwiseAbs().maxCoeff(), 1e-300);
  const double omega_scale =
      std::max({std::abs(omega_b), std::abs(omega_c), std::abs(kr.p_bb),
                std::abs(kr.p_cc), std::abs(kr.off), 1e-300});

  bool ok = omega_b >= -1e-12 * omega_scale && omega_c >= -1e-12 * omega_scale;
  double lo = kNan, hi = kNan;
  if (disc >= -1e-12 * scale2 * scale2) {
    const double root = std::sqrt(std::max(disc, 0.0));
    lo = 0.5 * tr - root;
    hi = 0.5 * tr + root;
    if (lo < -1e-12 * scale2) ok = false;
  } else {
    ok = false;
  }
  blk.stable = ok;
  if (ok)
    blk.bands << std::sqrt(std::max(lo, 0.0)), std::sqrt(std::max(hi, 0.0));
  else
    blk.bands << kNan, kNan;
  return blk;
}

BandStructure bdg_bands(const ChainSpec& spec, const SublatticeConfig& config,
                        int inf_points) {
  require_ring(spec);
  BandStructure bs;
  bs.config = config;
  if (spec.thermodynamic()) {
    if (inf_points < 2)
      throw std::invalid_argument("bdg_bands: inf_points must be >= 2");
    bs.k = linear_grid(-std::numbers::pi, std::numbers::pi, inf_points);
  } else if (spec.n_sites == 2) {
    bs.k = {0.0};
  } else {
    bs.k = momentum_grid(spec.n_sites / 2);
  }
  const auto rows = static_cast<Eigen::Index>(bs.k.size());
  bs.bands.resize(rows, 2);
  bs.stable.assign(bs.k.size(), 0);
  bs.all_stable = true;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const BdgBlock blk = bdg_block(spec, config, bs.k[static_cast<std::size_t>(i)]);
    bs.bands(i, 0) = blk.bands[0];
    bs.bands(i, 1) = blk.bands[1];
    bs.stable[static_cast<std::size_t>(i)] = blk.stable ? 1 : 0;
    if (!blk.stable) bs.all_stable = false;
  }
  return bs;
}

}  // namespace spinchain::sublattice
