#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/model.hpp"

namespace spinchain::exact {

/// Hamiltonian in the frame rotated by pi/2 about the x axis, which maps the
/// field term onto the z axis and leaves the matrix real symmetric in the S_z
/// product basis. Site i occupies the i-th base-(2S+1) digit of the state
/// index, site 0 least significant.
struct DenseHamiltonian {
  ChainSpec spec;
  std::int64_t dim = 0;
  Eigen::MatrixXd matrix;

  /// Magnetization m_i of a basis state at the given site, in units of hbar.
  double magnetization(std::int64_t state, int site) const;
};

/// Builds the dense matrix. Throws BudgetError when (2S+1)^N exceeds the
/// budget and std::invalid_argument for a thermodynamic spec.
DenseHamiltonian build_hamiltonian(const ChainSpec& spec,
                                   std::int64_t budget = kDimBudget);

/// All eigenvalues in ascending order.
Eigen::VectorXd spectrum(const DenseHamiltonian& h);
Eigen::VectorXd spectrum(const ChainSpec& spec, std::int64_t budget = kDimBudget);

double ground_state_energy(const ChainSpec& spec, std::int64_t budget = kDimBudget);

struct SpectrumSeries {
  std::vector<double> b_grid;
  /// One row per grid point, eigenvalues ascending along the row.
  Eigen::MatrixXd levels;
  Eigen::VectorXd ground_energy;
};

/// Spectra over a field grid. The coupling part is built once; each grid
/// point only replaces the diagonal. Rows are written to preassigned slots,
/// so the result is independent of the thread count.
SpectrumSeries spectrum_sweep(const ChainSpec& spec,
                              const std::vector<double>& b_grid,
                              int threads = 1,
                              std::int64_t budget = kDimBudget);

/// Groups near-degenerate eigenvalues of an ascending spectrum into
/// (representative value, count) pairs. A negative tol selects the default
/// 1e-9 times the spectral width.
std::vector<std::pair<double, std::int64_t>> degeneracy_groups(
    const Eigen::VectorXd& values, double tol = -1.0);

/// Max |H v - lambda v|_inf over `samples` eigenpairs spread across the
/// spectrum, relative to max(1, |lambda|_max). Solves with eigenvectors, so
/// keep the dimension moderate.
double residual_check(const DenseHamiltonian& h, int samples = 8);

}  // namespace spinchain::exact
