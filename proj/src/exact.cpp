#include "spinchain/exact.hpp"

#include <cmath>
#include <stdexcept>

#include "spinchain/parallel.hpp"

namespace spinchain::exact {
namespace {

std::vector<std::int64_t> digit_strides(int n_sites, int local_dim) {
  std::vector<std::int64_t> strides(n_sites);
  std::int64_t p = 1;
  for (int i = 0; i < n_sites; ++i) {
    strides[i] = p;
    p *= local_dim;
  }
  return strides;
}

/// <m+dir| S_+ or S_- |m> for dir = +1 / -1, zero outside the ladder.
double ladder_element(double s, int digit, int dir, int local_dim) {
  const int target = digit + dir;
  if (target < 0 || target >= local_dim) return 0.0;
  const double m = digit - s;
  return std::sqrt(s * (s + 1.0) - m * (m + dir));
}

struct PairCoupling {
  int i, j;
  double strength;
};

std::vector<PairCoupling> nonzero_pairs(const Eigen::MatrixXd& j) {
  std::vector<PairCoupling> pairs;
  for (int i = 0; i < j.rows(); ++i)
    for (int col = i + 1; col < j.cols(); ++col)
      if (j(i, col) != 0.0) pairs.push_back({i, col, j(i, col)});
  return pairs;
}

Eigen::VectorXd solve_ascending(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  return solver.eigenvalues();
}

}  // namespace

double DenseHamiltonian::magnetization(std::int64_t state, int site) const {
  const int q = spec.local_dim();
  std::int64_t p = 1;
  for (int i = 0; i < site; ++i) p *= q;
  const auto digit = static_cast<int>((state / p) % q);
  return digit - spec.spin();
}

DenseHamiltonian build_hamiltonian(const ChainSpec& spec, std::int64_t budget) {
  spec.validate();
  if (spec.thermodynamic())
    throw std::invalid_argument("exact diagonalization needs a finite chain");
  const std::int64_t dim = spec.hilbert_dim(budget);
  const int n = spec.n_sites;
  const int q = spec.local_dim();
  const double s = spec.spin();
  const auto strides = digit_strides(n, q);
  const auto pairs = nonzero_pairs(coupling_matrix(spec));

  DenseHamiltonian h;
  h.spec = spec;
  h.dim = dim;
  h.matrix = Eigen::MatrixXd::Zero(dim, dim);

  std::vector<int> digits(n);
  for (std::int64_t state = 0; state < dim; ++state) {
    std::int64_t rest = state;
    double total_m = 0.0;
    for (int i = 0; i < n; ++i) {
      digits[i] = static_cast<int>(rest % q);
      rest /= q;
      total_m += digits[i] - s;
    }
    h.matrix(state, state) = -2.0 * spec.b * total_m;

    // -(2/S) J_ij S_x S_x with S_x = (S_+ + S_-)/2 gives four ladder
    // products per pair, each with weight -(J_ij/2S).
    for (const auto& pc : pairs) {
      const double base = -pc.strength / (2.0 * s);
      for (int di : {-1, 1}) {
        const double ci = ladder_element(s, digits[pc.i], di, q);
        if (ci == 0.0) continue;
        for (int dj : {-1, 1}) {
          const double cj = ladder_element(s, digits[pc.j], dj, q);
          if (cj == 0.0) continue;
          const std::int64_t target =
              state + di * strides[pc.i] + dj * strides[pc.j];
          h.matrix(target, state) += base * ci * cj;
        }
      }
    }
  }
  return h;
}

Eigen::VectorXd spectrum(const DenseHamiltonian& h) {
  return solve_ascending(h.matrix);
}

Eigen::VectorXd spectrum(const ChainSpec& spec, std::int64_t budget) {
  return spectrum(build_hamiltonian(spec, budget));
}

double ground_state_energy(const ChainSpec& spec, std::int64_t budget) {
  return spectrum(spec, budget)[0];
}

SpectrumSeries spectrum_sweep(const ChainSpec& spec,
                              const std::vector<double>& b_grid,
                              int threads, std::int64_t budget) {
  if (b_grid.empty()) throw std::invalid_argument("empty field grid");
  for (std::size_t i = 1; i < b_grid.size(); ++i)
    if (!(b_grid[i] > b_grid[i - 1]))
      throw std::invalid_argument("field grid must be strictly ascending");

  ChainSpec base = spec;
  base.b = 0.0;
  const DenseHamiltonian h0 = build_hamiltonian(base, budget);

  Eigen::VectorXd total_m(h0.dim);
  for (std::int64_t state = 0; state < h0.dim; ++state) {
    double sum = 0.0;
    for (int i = 0; i < spec.n_sites; ++i) sum += h0.magnetization(state, i);
    total_m[state] = sum;
  }

  SpectrumSeries series;
  series.b_grid = b_grid;
  const auto n_points = static_cast<int>(b_grid.size());
  series.levels.resize(n_points, h0.dim);
  series.ground_energy.resize(n_points);

  parallel_for(n_points, threads, [&](int p) {
    Eigen::MatrixXd m = h0.matrix;
    m.diagonal() -= 2.0 * b_grid[p] * total_m;
    const Eigen::VectorXd values = solve_ascending(m);
    series.levels.row(p) = values.transpose();
    series.ground_energy[p] = values[0];
  });
  return series;
}

std::vector<std::pair<double, std::int64_t>> degeneracy_groups(
    const Eigen::VectorXd& values, double tol) {
  std::vector<std::pair<double, std::int64_t>> groups;
  if (values.size() == 0) return groups;
  if (tol < 0) {
    const double width = values[values.size() - 1] - values[0];
    tol = 1e-9 * std::max(width, 1e-30);
  }
  double sum = values[0];
  std::int64_t count = 1;
  double last = values[0];
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] - last > tol) {
      groups.emplace_back(sum / count, count);
      sum = 0.0;
      count = 0;
    }
    sum += values[i];
    ++count;
    last = values[i];
  }
  groups.emplace_back(sum / count, count);
  return groups;
}

double residual_check(const DenseHamiltonian& h, int samples) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const auto dim = static_cast<int>(h.dim);
  samples = std::min(samples, dim);
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    const int idx = samples == 1 ? 0 : t * (dim - 1) / (samples - 1);
    const Eigen::VectorXd v = vectors.col(idx);
    const double r =
        (h.matrix * v - values[idx] * v).cwiseAbs().maxCoeff();
    worst = std::max(worst, r);
  }
  const double scale =
      std::max(1.0, std::max(std::abs(values[0]), std::abs(values[dim - 1])));
  return worst / scale;
}

}  // namespace spinchain::exact
