#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spinchain/model.hpp"

namespace spinchain::meanfield {

/// Product ansatz over tilted spins. Site i carries a length l_i and two
/// signs selecting one of four orientations through sin(phi_i) = eps_i
/// sin(phi) and cos(phi_i) = xi_i cos(phi), so the family covers
/// {phi, -phi, pi-phi, pi+phi}.
struct SpinConfiguration {
  std::vector<double> lengths;
  std::vector<int> eps;
  std::vector<int> xi;

  int domain_walls() const;    // adjacent eps disagreements
  int inverted_count() const;  // sites with eps = -1
  int flipped_count() const;   // sites with xi = -1
};

/// All lengths S, all signs +1.
SpinConfiguration uniform_configuration(const ChainSpec& spec);

/// Parameters of one configuration's double well, per elementary spin:
/// E(phi) = -j_mu sin^2(phi) - (b_slope * B) cos(phi). |b_slope| <= 1.
struct EffectiveCouplings {
  double j_mu = 0.0;
  double b_slope = 0.0;
  double multiplicity = 1.0;
  bool stable() const { return j_mu > 0.0 && b_slope > 0.0; }
};

EffectiveCouplings effective_couplings(const ChainSpec& spec,
                                       const SpinConfiguration& config);

double landscape_energy(double j_mu, double b_mu, double phi);

enum class Branch { Minimum, Maximum };

/// One extremal branch of a double well as a function of the field:
/// quadratic in B below the bifurcation at b_c = 2|j_mu|/|b_slope|, linear
/// beyond. Value and first derivative are continuous across b_c; the second
/// derivative jumps by b_slope^2/(2 j_mu).
struct SemiclassicalLevel {
  EffectiveCouplings couplings;
  Branch branch = Branch::Minimum;
  double b_c = 0.0;

  /// Extremal energy per elementary spin at field b.
  double value(double b) const;
  double curvature_jump() const;
};

/// Builds the branch for an equal-sign (j_mu, b_slope) pair: the minimum for
/// a positive pair, the maximum for a negative one. Zero or mixed-sign pairs
/// do not describe a level and are rejected with std::invalid_argument.
SemiclassicalLevel semiclassical_level(const EffectiveCouplings& couplings);

/// 2SN times the per-spin branch value.
double total_energy(const ChainSpec& spec, const SemiclassicalLevel& level,
                    double b);

enum class ConfigMode { EpsOnly, EpsXi, FullLengths };

struct EnumerateOptions {
  /// Keep only configurations whose eps string starts with +1 (one per
  /// global-flip orbit; halves the count exactly).
  bool reduce_global_flip = false;
  /// Keep only configurations not lexicographically above their site
  /// reversal (one per mirror orbit).
  bool reduce_mirror = false;
  std::int64_t budget = kEnumBudget;
};

using ConfigVisitor =
    std::function<void(const SpinConfiguration&, const EffectiveCouplings&)>;

/// Streams configurations in lexicographic order (site 0 most significant;
/// per site the digit orders eps then xi then length). EpsOnly walks 2^N
/// sign patterns, EpsXi 4^N, FullLengths adds the per-site length choices.
void enumerate_configs(const ChainSpec& spec, ConfigMode mode,
                       const ConfigVisitor& visit,
                       const EnumerateOptions& options = {});

/// Distinct (j_mu, b_slope) pairs over the enumeration, with multiplicities.
/// Keys are exact where the sums are rational (S=1/2 with alpha 0 or INF)
/// and quantized at 1e-12 otherwise, so near-degenerate pairs stay separate.
std::vector<EffectiveCouplings> level_classes(const ChainSpec& spec,
                                              ConfigMode mode,
                                              const EnumerateOptions& options = {});

/// Total-energy table, ascending, equal energies merged.
struct LevelTable {
  std::vector<double> energy;
  std::vector<double> degeneracy;
};

/// Nearest-neighbour open-chain levels -j0(n-1-2r) with degeneracy
/// 2 C(n-1, r), r counting domain walls.
LevelTable ising_levels(int n, double j0);

/// Flat-interaction levels -(j0/2)[(n-2s)^2 - n] with degeneracy C(n, s),
/// s counting inverted spins.
LevelTable lmg_levels(int n, double j0);

/// Zero-field total energies -(2 J0/S) sum_{i<j} m_i m_j / d_ij^alpha over
/// all per-site magnetization assignments, ascending.
std::vector<double> ferro_spectrum_b0(const ChainSpec& spec,
                                      std::int64_t budget = kDimBudget);

/// Zero-coupling total energies -2B sum_i m_i, ascending.
std::vector<double> para_spectrum_j0(const ChainSpec& spec,
                                     std::int64_t budget = kDimBudget);

/// Fraction of levels <= e. The boundary level counts.
double counting_function(const std::vector<double>& levels, double e);

/// Open-chain aligned and alternating sums (J_e, J_a); thermodynamic specs
/// get the zeta/eta limits, with NaN for a divergent aligned sum.
CouplingPair effective_boundary_couplings(const ChainSpec& spec);

struct DeviationPoint {
  double b = 0.0;
  double d = 0.0;
  double exact_energy = 0.0;
  double variational_energy = 0.0;
};

/// Relative deviation d(B) = (E_min - E0)/|E0| between the best stable
/// semiclassical level and the exact ground energy, per grid point.
std::vector<DeviationPoint> deviation(const ChainSpec& spec,
                                      const std::vector<double>& b_grid,
                                      int threads = 1,
                                      std::int64_t dim_budget = kDimBudget,
                                      std::int64_t enum_budget = kEnumBudget);

/// Log-binned counts of bifurcation fields b_c = 2|j_mu|/|b_slope|. Bin
/// edges sit on the absolute grid 10^(i/bins_per_decade) so peak positions
/// are comparable across runs; the fitted range gets one empty guard bin on
/// each side. Configurations with j_mu = 0 or b_slope = 0 never contribute;
/// stable_only additionally restricts to positive equal-sign pairs.
struct BifurcationHistogram {
  std::vector<double> edges;
  std::vector<double> count_configs;  // weighted by configuration multiplicity
  std::vector<double> count_pairs;    // one count per distinct (j, slope) pair
  int bins_per_decade = 10;
  bool stable_only = true;
  double total_configs = 0.0;
  double skipped_configs = 0.0;
  int peak_bin = -1;        // argmax of count_pairs
  double decay_slope = 0.0; // log-log fit over the decade above the peak
};

BifurcationHistogram bifurcation_histogram(const ChainSpec& spec,
                                           int bins_per_decade = 10,
                                           bool stable_only = true,
                                           std::int64_t budget = kEnumBudget);

}  // namespace spinchain::meanfield
