#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinchain {

/// Sentinel exponent selecting the nearest-neighbor (Ising) coupling limit.
inline constexpr double kAlphaInf = std::numeric_limits<double>::infinity();

/// Sentinel site count selecting thermodynamic-limit formulas where defined.
inline constexpr int kSitesInf = std::numeric_limits<int>::max();

/// Default cap on the Hilbert dimension accepted by exact diagonalization.
inline constexpr std::int64_t kDimBudget = 20000;

/// Default cap on the number of enumerated mean-field configurations.
inline constexpr std::int64_t kEnumBudget = std::int64_t{1} << 26;

/// Thrown when a computation would exceed a configured resource budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Boundary { Open, Periodic };

std::string to_string(Boundary boundary);
Boundary boundary_from_string(const std::string& name);

/// Problem definition for one chain: sites, spin length, coupling law, field.
struct ChainSpec {
  int n_sites = 2;
  int spin2 = 1;  // twice the spin length, so S = spin2 / 2
  double alpha = kAlphaInf;
  double j0 = 1.0;
  double b = 0.0;
  Boundary boundary = Boundary::Open;
  bool kac_rescale = false;

  double spin() const { return 0.5 * spin2; }
  int local_dim() const { return spin2 + 1; }
  bool thermodynamic() const { return n_sites == kSitesInf; }

  /// J0 after the optional Kac rescaling by 1/N.
  double coupling_scale() const;

  /// (2S+1)^N, rejecting anything above `budget` with a BudgetError.
  std::int64_t hilbert_dim(std::int64_t budget = kDimBudget) const;

  /// Throws std::invalid_argument on any malformed field combination.
  void validate() const;
};

/// Symmetric ring index set I_N (or I_N^0 when zero is excluded).
/// Even n runs from -n/2 to n/2-1, odd n from -(n-1)/2 to (n-1)/2.
std::vector<int> index_set(int n, bool exclude_zero);

/// Quantized momenta 2*pi*m/n over m in I_n, ascending.
std::vector<double> momentum_grid(int n);

/// Shortest displacement between sites i and j on a ring of n sites.
int ring_distance(int n_sites, int i, int j);

/// |d|^-alpha with the convention that alpha = inf keeps only |d| = 1.
double inv_power(double distance, double alpha);

/// Pairwise coupling matrix J_ij = J0 / d(i,j)^alpha, zero diagonal.
/// d is |i-j| for the open chain and the ring distance on the periodic one;
/// the antipodal pair of an even ring enters at full weight, one ordered
/// displacement from each endpoint.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coupling_matrix(
    const ChainSpec& spec) {
  spec.validate();
  if (spec.thermodynamic())
    throw std::invalid_argument("coupling_matrix: finite chain required");
  const int n = spec.n_sites;
  const double j0 = spec.coupling_scale();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> j =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int jj = i + 1; jj < n; ++jj) {
      const int d = spec.boundary == Boundary::Periodic ? ring_distance(n, i, jj)
                                                        : jj - i;
      const Scalar value = static_cast<Scalar>(j0 * inv_power(d, spec.alpha));
      j(i, jj) = value;
      j(jj, i) = value;
    }
  }
  return j;
}

/// Thermodynamic-limit coupling bundle.
struct ThermoCouplings {
  double zeta_alpha = 0;  // NaN when alpha <= 1 (divergent)
  double eta_alpha = 0;
  double j_e_inf = 0;  // J0 * zeta(alpha)
  double j_a_inf = 0;  // -J0 * eta(alpha)
  double c_n = 1;      // finite-size compensation 1 - 1/N
};

/// eta by accelerated alternating summation; zeta = eta / (1 - 2^(1-alpha))
/// for alpha > 1 and NaN otherwise. eta(0) is exactly 1/2.
ThermoCouplings zeta_eta(double alpha, double tol = 1e-12);

/// zeta_eta evaluated with the spec's J0 and N filled in.
ThermoCouplings thermo_couplings(const ChainSpec& spec, double tol = 1e-12);

/// Riemann zeta for alpha > 1; throws std::domain_error otherwise.
double zeta_value(double alpha);

/// Dirichlet eta for alpha >= 0.
double eta_value(double alpha, double tol = 1e-12);

/// Truncated Clausen-type sum C_alpha^(N)(k) = (1/2) sum_{r in I_N^0} cos(kr)/|r|^alpha.
/// n = kSitesInf evaluates the limit Re[Li_alpha(e^{ik})]; that mode needs
/// alpha > 1 when k is a multiple of 2*pi.
double clausen_truncated(double alpha, double k, int n);

/// Li_s(e^{i*theta}) for theta not a multiple of 2*pi.
/// Accuracy degrades for non-integer s within ~1e-4 of an integer >= 2.
std::complex<double> polylog_unit_circle(double s, double theta);

struct LerchSum {
  std::complex<double> value;
  double tail_bound;  // estimate of the truncation error magnitude
  long terms;
};

/// Partial sum sum_{m=0}^{n_terms-1} e^{ikm}/(m+a)^alpha with a tail estimate.
LerchSum lerch_truncated(double k, double alpha, double a, long n_terms);

/// Converged Lerch value Phi(e^{ik}, alpha, a) for half-integer a >= 1/2,
/// alpha > 1, via polylogarithm identities.
std::complex<double> lerch_unit_circle(double k, double alpha, double a);

/// Ferro/antiferro lattice-sum pair shared by the boundary-specific couplings.
struct CouplingPair {
  double ferro = 0;
  double anti = 0;
};

std::vector<double> linear_grid(double lo, double hi, int points);
std::vector<double> log_grid(double lo, double hi, int points);

namespace detail {

/// zeta on the whole real line except s = 1, via reflection for s < 0.
double zeta_extended(double s);

}  // namespace detail

}  // namespace spinchain
