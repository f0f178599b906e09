#include "spinchain/spinwaves.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinchain::spinwaves {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ring_coupling(const ChainSpec& spec, Kind kind) {
  const double j0 = spec.coupling_scale();
  if (spec.thermodynamic()) {
    if (kind == Kind::Uniform) return j0 * zeta_value(spec.alpha);
    return -j0 * eta_value(spec.alpha);
  }
  double sum = 0.0;
  for (int r : index_set(spec.n_sites, true)) {
    const double term = inv_power(std::abs(r), spec.alpha);
    sum += (kind == Kind::Alternating && r % 2) ? -term : term;
  }
  return j0 * sum / 2.0;
}

std::vector<double> dispersion_grid(const ChainSpec& spec, int inf_points) {
  if (!spec.thermodynamic()) return momentum_grid(spec.n_sites);
  if (inf_points < 2)
    throw std::invalid_argument("continuum sampling needs at least 2 points");
  return linear_grid(-std::numbers::pi, std::numbers::pi, inf_points);
}

double fit_exponent(const std::vector<GapPoint>& points, double b_c) {
  std::vector<std::pair<double, double>> usable;  // (|B - B_c|, gap)
  for (const auto& p : points)
    if (p.gap >= 1e-8 && p.b != b_c)
      usable.emplace_back(std::abs(p.b - b_c), p.gap);
  if (usable.size() < 2) return kNaN;

  // Fit one side of B_c at a time; pick the side with more points inside
  // the decade nearest B_c (ties go to the upper side).
  double best_slope = kNaN;
  std::size_t best_count = 0;
  for (int side = 0; side < 2; ++side) {
    double nearest = kInf;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (p.gap < 1e-8 || p.b == b_c) continue;
      if ((side == 0) != (p.b > b_c)) continue;
      nearest = std::min(nearest, std::abs(p.b - b_c));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (const auto& p : points) {
      if (p.gap < 1e-8 || p.b == b_c) continue;
      if ((side == 0) != (p.b > b_c)) continue;
      const double dist = std::abs(p.b - b_c);
      if (dist > 10.0 * nearest) continue;
      const double x = std::log(dist);
      const double y = std::log(p.gap);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    if (count >= 2 && count > best_count) {
      best_count = count;
      best_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }
  }
  return best_slope;
}

}  // namespace

CouplingPair effective_couplings_periodic(const ChainSpec& spec) {
  spec.validate();
  if (spec.thermodynamic() && !(spec.alpha > 1.0))
    throw std::domain_error(
        "aligned ring sum diverges in the thermodynamic limit for alpha <= 1");
  return {ring_coupling(spec, Kind::Uniform),
          ring_coupling(spec, Kind::Alternating)};
}

LandscapeValue mean_field_energy_periodic(const ChainSpec& spec,
                                          const Eigen::VectorXd& phi) {
  spec.validate();
  if (spec.thermodynamic())
    throw std::invalid_argument("per-site landscape needs a finite ring");
  if (spec.boundary != Boundary::Periodic)
    throw std::invalid_argument("per-site landscape is a ring construct");
  if (phi.size() != spec.n_sites)
    throw std::invalid_argument("angle profile size differs from chain size");

  const int n = spec.n_sites;
  const Eigen::MatrixXd w = coupling_matrix(spec);
  const Eigen::ArrayXd sines = phi.array().sin();
  const Eigen::ArrayXd cosines = phi.array().cos();
  const Eigen::ArrayXd coupled = (w * sines.matrix()).array();

  LandscapeValue out;
  out.energy = (-0.5 * (sines * coupled).sum() - spec.b * cosines.sum()) / n;
  out.gradient = ((-cosines * coupled + spec.b * sines) / n).matrix();
  return out;
}

StationaryAngle stationary_angle(const ChainSpec& spec, Kind kind) {
  spec.validate();
  if (kind == Kind::Alternating && !spec.thermodynamic() &&
      spec.n_sites % 2 != 0)
    throw std::invalid_argument("alternating pattern needs an even ring");

  const double j_eff = ring_coupling(spec, kind);
  if (kind == Kind::Uniform && !(j_eff > 0.0))
    throw std::domain_error(
        "uniform minimum branch needs a positive aligned ring sum");
  if (kind == Kind::Alternating && !(j_eff < 0.0))
    throw std::domain_error(
        "alternating maximum branch needs a negative alternating ring sum");

  StationaryAngle angle;
  angle.kind = kind;
  angle.j_eff_p = j_eff;
  angle.critical_field = kind == Kind::Uniform ? 2.0 * j_eff : -2.0 * j_eff;
  if (spec.b >= angle.critical_field) {
    angle.regime = Regime::Polarized;
    angle.phi_c = kind == Kind::Uniform ? 0.0 : std::numbers::pi;
  } else {
    angle.regime = Regime::Ordered;
    // The maximum branch tilts against the field: cos(phi_c) = B/(2 J_a) < 0,
    // reaching pi exactly at the critical field.
    const double ratio = spec.b / angle.critical_field;
    angle.phi_c = std::acos(kind == Kind::Uniform ? ratio : -ratio);
  }

  if (!spec.thermodynamic()) {
    ChainSpec ring = spec;
    ring.boundary = Boundary::Periodic;
    Eigen::VectorXd profile(spec.n_sites);
    for (int i = 0; i < spec.n_sites; ++i)
      profile[i] =
          (kind == Kind::Alternating && i % 2) ? -angle.phi_c : angle.phi_c;
    const auto value = mean_field_energy_periodic(ring, profile);
    if (value.gradient.cwiseAbs().maxCoeff() > 1e-10)
      throw std::runtime_error("stationary angle failed the gradient check");
  }
  return angle;
}

double critical_field(const ChainSpec& spec, Kind kind) {
  spec.validate();
  const double j_eff = ring_coupling(spec, kind);
  if (kind == Kind::Uniform) {
    if (!(j_eff > 0.0))
      throw std::domain_error(
          "uniform critical field needs a positive aligned ring sum");
    return 2.0 * j_eff;
  }
  if (!(j_eff < 0.0))
    throw std::domain_error(
        "alternating critical field needs a negative alternating ring sum");
  return -2.0 * j_eff;
}

DispersionCurve dispersion(const ChainSpec& spec, Kind kind, int inf_points) {
  DispersionCurve curve;
  curve.angle = stationary_angle(spec, kind);
  curve.k = dispersion_grid(spec, inf_points);

  const double c = std::cos(curve.angle.phi_c);
  const double s2 = 1.0 - c * c;
  const double j_eff = curve.angle.j_eff_p;
  curve.e0 = -2.0 * j_eff * s2 - spec.b * c;
  curve.mean_energy = -j_eff * s2 - spec.b * c;

  const auto n_k = static_cast<Eigen::Index>(curve.k.size());
  curve.g.resize(n_k);
  curve.f.resize(n_k);
  curve.energy.resize(n_k);
  curve.energy_imag.resize(n_k);
  curve.theta.resize(n_k);
  curve.stable.assign(curve.k.size(), 0);
  curve.all_stable = true;

  const double hopping = -spec.coupling_scale() * c * c;
  for (Eigen::Index i = 0; i < n_k; ++i) {
    const double g =
        hopping == 0.0
            ? 0.0
            : hopping * clausen_truncated(spec.alpha, curve.k[i], spec.n_sites);
    const double f = g - curve.e0;
    curve.g[i] = g;
    curve.f[i] = f;
    const double radicand = f * f - g * g;
    const bool real_mode = radicand >= 0.0;
    const bool ok = real_mode && f > 0.0;
    curve.energy[i] = real_mode ? 2.0 * std::sqrt(radicand) : 0.0;
    curve.energy_imag[i] = real_mode ? 0.0 : 2.0 * std::sqrt(-radicand);
    curve.theta[i] =
        std::abs(g) < std::abs(f) ? 0.5 * std::atanh(-g / f) : kNaN;
    curve.stable[i] = ok ? 1 : 0;
    curve.all_stable = curve.all_stable && ok;
  }

  curve.gap_index = -1;
  curve.gap = kNaN;
  for (Eigen::Index i = 0; i < n_k; ++i) {
    if (curve.energy_imag[i] != 0.0) continue;
    if (curve.gap_index < 0 || curve.energy[i] < curve.gap) {
      curve.gap_index = static_cast<int>(i);
      curve.gap = curve.energy[i];
    }
  }
  curve.corr_length = curve.gap > 0.0 ? 1.0 / std::sqrt(curve.gap) : kInf;
  return curve;
}

GapScan gap_scan(const ChainSpec& spec, Kind kind,
                 const std::vector<double>& b_grid) {
  if (b_grid.empty()) throw std::invalid_argument("empty field grid");
  GapScan scan;
  scan.critical_field = critical_field(spec, kind);
  scan.points.reserve(b_grid.size());
  for (double b : b_grid) {
    ChainSpec point = spec;
    point.b = b;
    const DispersionCurve curve = dispersion(point, kind);
    scan.points.push_back(
        {b, curve.gap, curve.corr_length, curve.all_stable});
  }
  scan.fitted_exponent = fit_exponent(scan.points, scan.critical_field);
  return scan;
}

DickeForms dicke_limit_check(int spin2, double b, double j0) {
  if (spin2 < 1) throw std::invalid_argument("spin2 must be >= 1");
  if (!(j0 > 0.0)) throw std::invalid_argument("j0 must be positive");
  if (b < 0.0) throw std::invalid_argument("b must be >= 0");
  DickeForms forms;
  if (b >= j0) {
    forms.eps_minus = 2.0 * std::sqrt(b * (b - j0));
    forms.eps_plus = 2.0 * std::sqrt(b * (b + j0));
    forms.ground_offset = -2.0 * spin2 * b;
  } else {
    forms.eps_minus = 2.0 * std::sqrt(j0 * j0 - b * b);
    forms.eps_plus = 2.0 * std::sqrt(j0 * j0 + b * b);
    forms.ground_offset = -spin2 * (j0 + b * b / j0);
  }
  return forms;
}

IntermediateConfig intermediate_config(const ChainSpec& spec) {
  spec.validate();
  if (!spec.thermodynamic() && spec.n_sites % 2 != 0)
    throw std::invalid_argument("intermediate pattern needs an even ring");
  if (spec.b != 0.0)
    throw std::invalid_argument(
        "intermediate patterns are stationary at zero field only");

  const double j_a = ring_coupling(spec, Kind::Alternating);
  IntermediateConfig out;
  out.tilted_energy = -j_a;
  out.tilted_diag_coeff = 4.0 * j_a;
  out.staggered_energy = 0.0;

  // Flipping every odd site maps the staggered pattern onto the polarized
  // one with sign-alternated couplings, so its quadratic form has
  // G(k) = -J0 C_alpha(k + pi) and F = G - E0 with E0 = 0 at zero field.
  const double e0 = 0.0;
  const auto grid = dispersion_grid(spec, 1024);
  double worst = 0.0;
  for (double k : grid) {
    const double g = -spec.coupling_scale() *
                     clausen_truncated(spec.alpha, k + std::numbers::pi,
                                       spec.n_sites);
    const double f = g - e0;
    const double radicand = f * f - g * g;
    worst = std::max(worst, 2.0 * std::sqrt(std::abs(radicand)));
  }
  out.staggered_max_band = worst;
  out.staggered_flat = worst < 1e-12;
  return out;
}

}  // namespace spinchain::spinwaves
