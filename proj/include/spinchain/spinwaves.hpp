#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spinchain/model.hpp"

namespace spinchain::spinwaves {

/// Ring sums (J_e^p, J_a^p) over signed displacements r in I_N^0;
/// thermodynamic specs map to (J0 zeta(alpha), -J0 eta(alpha)).
/// Throws std::domain_error when the aligned sum diverges (N=INF, alpha<=1).
CouplingPair effective_couplings_periodic(const ChainSpec& spec);

struct LandscapeValue {
  double energy = 0.0;
  Eigen::VectorXd gradient;
};

/// Ring mean-field energy per elementary spin of a per-site tilt profile,
/// with the exact analytic gradient.
LandscapeValue mean_field_energy_periodic(const ChainSpec& spec,
                                          const Eigen::VectorXd& phi);

enum class Kind { Uniform, Alternating };
enum class Regime { Ordered, Polarized };

struct StationaryAngle {
  Kind kind = Kind::Uniform;
  double phi_c = 0.0;
  Regime regime = Regime::Polarized;
  double j_eff_p = 0.0;       // J_e^p for uniform, J_a^p for alternating
  double critical_field = 0.0;
};

/// Extremal tilt of the uniform (all phi_c) or alternating (+-phi_c) pattern
/// at the spec's field. Uniform demands J_e^p > 0 and tracks the minimum;
/// alternating demands J_a^p < 0 and tracks the maximum. On finite rings the
/// expanded profile is checked to be stationary to 1e-10.
StationaryAngle stationary_angle(const ChainSpec& spec, Kind kind);

/// 2 J_e^p (uniform) or -2 J_a^p (alternating).
double critical_field(const ChainSpec& spec, Kind kind);

/// Quadratic-fluctuation spectrum around the stationary pattern. Modes with
/// F^2 < G^2 or F <= 0 carry stable = false and report the magnitude of the
/// imaginary part in energy_imag instead of being clamped.
struct DispersionCurve {
  StationaryAngle angle;
  std::vector<double> k;
  Eigen::VectorXd g;
  Eigen::VectorXd f;
  Eigen::VectorXd energy;       // 2 sqrt(F^2 - G^2) where real, else 0
  Eigen::VectorXd energy_imag;  // 2 sqrt(G^2 - F^2) where complex, else 0
  Eigen::VectorXd theta;        // Bogoliubov angle, NaN where undefined
  std::vector<char> stable;
  bool all_stable = false;
  double e0 = 0.0;           // F(k) = G(k) - e0
  double mean_energy = 0.0;  // E^p at the stationary angle, per spin
  int gap_index = -1;        // position of the smallest real mode
  double gap = 0.0;
  double corr_length = 0.0;  // 1/sqrt(gap), INF at closure
};

DispersionCurve dispersion(const ChainSpec& spec, Kind kind,
                           int inf_points = 1024);

struct GapPoint {
  double b = 0.0;
  double gap = 0.0;
  double corr_length = 0.0;
  bool stable = false;
};

struct GapScan {
  std::vector<GapPoint> points;
  double critical_field = 0.0;
  /// Least-squares log-log slope of gap vs |B - B_c| over the decade nearest
  /// B_c, excluding gaps below 1e-8; NaN when fewer than two points qualify.
  double fitted_exponent = 0.0;
};

GapScan gap_scan(const ChainSpec& spec, Kind kind,
                 const std::vector<double>& b_grid);

/// Two-mode closed forms of the N=2 ring: 2 sqrt(B(B -+ j0)) for B >= j0,
/// 2 sqrt(j0^2 -+ B^2) below, plus the mean-field ground offset.
struct DickeForms {
  double eps_minus = 0.0;
  double eps_plus = 0.0;
  double ground_offset = 0.0;
};

DickeForms dicke_limit_check(int spin2, double b, double j0);

/// The two zero-field stationary patterns that interleave the uniform and
/// alternating ones on an even ring: a tilted one (cos phi = 0) whose
/// quadratic form is already diagonal, and a staggered one (sin phi = 0)
/// whose transformed quadratic form has F = G and hence a flat zero band.
struct IntermediateConfig {
  double tilted_energy = 0.0;      // -J_a^p per elementary spin
  double tilted_diag_coeff = 0.0;  // 4 J_a^p, negative for J0 > 0
  double staggered_energy = 0.0;
  double staggered_max_band = 0.0;
  bool staggered_flat = false;
};

IntermediateConfig intermediate_config(const ChainSpec& spec);

}  // namespace spinchain::spinwaves
