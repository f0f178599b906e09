#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spinchain/model.hpp"

namespace spinchain::sublattice {

/// Ring sum split by displacement parity: m_b collects the odd displacements
/// of I0_N (inter-sublattice), m_c the even ones (intra-sublattice), both
/// weighted 1/|r|^alpha. m_b + m_c = 2 Je_p / J0 exactly.
struct SublatticeSums {
  double m_b = 0;
  double m_c = 0;
};

/// Requires an even ring, or n = kSitesInf for the closed forms
/// 2(1 - 2^-alpha) zeta(alpha) and 2^(1-alpha) zeta(alpha). Divergent pieces
/// come back NaN, mirroring zeta_eta.
SublatticeSums sublattice_sums(int n, double alpha);

/// Stationary point of the two-angle landscape. Angles are measured from the
/// field axis, matching the single-angle treatment.
struct SublatticeConfig {
  double phi_b = 0;
  double phi_c = 0;
  double m_b = 0;
  double m_c = 0;
  int n_sites = 0;
  double residual = 0;  // max-norm of the stationarity equations at exit
  int iterations = 0;
};

/// Newton iteration with the analytic Jacobian, started from (phi_b0, phi_c0).
/// Lands on whichever root the seed basin selects. Throws std::runtime_error
/// when the residual is still above tol after max_iter steps or the Jacobian
/// degenerates along the way.
SublatticeConfig stationary_angles(const ChainSpec& spec, double phi_b0,
                                   double phi_c0, double tol = 1e-10,
                                   int max_iter = 100);

/// Quadratic fluctuation block at one reduced-zone momentum. k is in
/// unit-cell units on [-pi, pi); the physical momentum is k/2. h is the real
/// symmetric particle-hole matrix [[A, P], [P, A]] in the basis
/// (b_k, c_k, b_-k^+, c_-k^+). bands holds the two excitation energies of
/// eta.h in ascending order; eigenvalues within roundoff of zero count as
/// zero, and a genuinely negative or complex pair clears `stable` and leaves
/// NaN bands.
struct BdgBlock {
  double k = 0;
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  Eigen::Vector2d bands = Eigen::Vector2d::Zero();
  bool stable = false;
};

BdgBlock bdg_block(const ChainSpec& spec, const SublatticeConfig& config,
                   double k);

struct BandStructure {
  SublatticeConfig config;
  std::vector<double> k;   // reduced-zone grid, unit-cell units, ascending
  Eigen::MatrixX2d bands;  // one row per momentum
  std::vector<char> stable;
  bool all_stable = false;
};

/// Bands over the reduced zone: the N/2-point momentum grid for a finite
/// ring, inf_points uniform samples of [-pi, pi] for the thermodynamic
/// chain.
BandStructure bdg_bands(const ChainSpec& spec, const SublatticeConfig& config,
                        int inf_points = 1024);

}  // namespace spinchain::sublattice
