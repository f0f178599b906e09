#include "spinchain/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "spinchain/exact.hpp"

namespace spinchain::meanfield {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void require_finite_chain(const ChainSpec& spec, const char* what) {
  spec.validate();
  if (spec.thermodynamic())
    throw std::invalid_argument(std::string(what) + " needs a finite chain");
}

struct WeightedValue {
  double value;
  double mult;
};

/// True when (j_mu, b_slope) sums are exact rationals on the key scale.
bool exact_j_keys(const ChainSpec& spec) {
  return spec.spin2 == 1 && (spec.alpha == 0.0 || std::isinf(spec.alpha));
}

long long j_key(double j, double unit, bool exact) {
  if (unit == 0.0) return 0;
  const double y = j / unit;
  if (exact) {
    const double r = std::nearbyint(y);
    if (std::abs(y - r) < 1e-9) return static_cast<long long>(r);
  }
  return std::llround(std::clamp(y * 1e12, -9e18, 9e18));
}

/// Collapses classes whose keys landed in adjacent quantization cells with
/// values half a cell apart or less: summation order must not split a class.
template <typename Class>
void merge_adjacent_cells(std::map<long long, Class>& classes, double unit,
                          double Class::* value, double Class::* mult) {
  const double tol = 0.5e-12 * std::abs(unit);
  auto it = classes.begin();
  while (it != classes.end()) {
    auto next = std::next(it);
    if (next == classes.end()) break;
    if (next->first == it->first + 1 &&
        std::abs(next->second.*value - it->second.*value) < tol) {
      it->second.*mult += next->second.*mult;
      classes.erase(next);
    } else {
      it = next;
    }
  }
}

/// Distinct J_mu values over all 2^N sign patterns (lengths fixed at S, so
/// the result holds for any spin). Gray-code walk with O(N) updates; the
/// running pair sum is recomputed from scratch every 4096 steps to stop
/// floating-point drift from leaking into the dedup keys.
std::vector<WeightedValue> eps_j_classes(const ChainSpec& spec,
                                         std::int64_t budget) {
  require_finite_chain(spec, "sign-pattern enumeration");
  const int n = spec.n_sites;
  if (n > 62 || (std::int64_t{1} << n) > budget)
    throw BudgetError("sign-pattern enumeration needs 2^" + std::to_string(n) +
                      " items, budget " + std::to_string(budget));
  const std::int64_t count = std::int64_t{1} << n;
  const Eigen::MatrixXd w = coupling_matrix(spec);
  const bool exact = exact_j_keys(spec);
  const double unit = spec.coupling_scale() / n;

  std::vector<double> eps(n, 1.0);
  Eigen::VectorXd site_field = w.rowwise().sum();
  double pair_sum = 0.0;
  for (int i = 0; i < n; ++i) pair_sum += eps[i] * site_field[i];
  pair_sum /= 2.0;

  std::map<long long, WeightedValue> classes;
  auto record = [&] {
    const double j = pair_sum / n;
    auto [it, inserted] = classes.try_emplace(j_key(j, unit, exact),
                                              WeightedValue{j, 1.0});
    if (!inserted) it->second.mult += 1.0;
  };
  record();
  for (std::int64_t idx = 1; idx < count; ++idx) {
    int p = 0;
    while (!((idx >> p) & 1)) ++p;
    pair_sum -= 2.0 * eps[p] * site_field[p];
    eps[p] = -eps[p];
    for (int q = 0; q < n; ++q) site_field[q] += 2.0 * eps[p] * w(q, p);
    if ((idx & 0xFFF) == 0) {
      for (int q = 0; q < n; ++q) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r) acc += w(q, r) * eps[r];
        site_field[q] = acc;
      }
      pair_sum = 0.0;
      for (int q = 0; q < n; ++q) pair_sum += eps[q] * site_field[q];
      pair_sum /= 2.0;
    }
    record();
  }
  if (!exact)
    merge_adjacent_cells(classes, unit, &WeightedValue::value,
                         &WeightedValue::mult);

  std::vector<WeightedValue> out;
  out.reserve(classes.size());
  for (const auto& [key, wv] : classes) out.push_back(wv);
  return out;
}

/// Slope classes (N-2k)/N with binomial multiplicities, any fixed length.
std::vector<WeightedValue> slope_classes(int n) {
  std::vector<WeightedValue> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k)
    out.push_back({static_cast<double>(n - 2 * k) / n, binomial(n, k)});
  return out;
}

LevelTable merge_levels(std::vector<std::pair<double, double>> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  LevelTable table;
  for (const auto& [e, deg] : rows) {
    if (!table.energy.empty() && table.energy.back() == e) {
      table.degeneracy.back() += deg;
    } else {
      table.energy.push_back(e);
      table.degeneracy.push_back(deg);
    }
  }
  return table;
}

}  // namespace

int SpinConfiguration::domain_walls() const {
  int r = 0;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i)
    if (eps[i] != eps[i + 1]) ++r;
  return r;
}

int SpinConfiguration::inverted_count() const {
  return static_cast<int>(std::count(eps.begin(), eps.end(), -1));
}

int SpinConfiguration::flipped_count() const {
  return static_cast<int>(std::count(xi.begin(), xi.end(), -1));
}

SpinConfiguration uniform_configuration(const ChainSpec& spec) {
  require_finite_chain(spec, "configuration");
  SpinConfiguration c;
  c.lengths.assign(spec.n_sites, spec.spin());
  c.eps.assign(spec.n_sites, 1);
  c.xi.assign(spec.n_sites, 1);
  return c;
}

EffectiveCouplings effective_couplings(const ChainSpec& spec,
                                       const SpinConfiguration& config) {
  require_finite_chain(spec, "effective couplings");
  const auto n = static_cast<std::size_t>(spec.n_sites);
  if (config.lengths.size() != n || config.eps.size() != n ||
      config.xi.size() != n)
    throw std::invalid_argument("configuration size differs from chain size");
  const double s = spec.spin();
  const double floor_len = spec.spin2 % 2 ? 0.5 : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = config.lengths[i];
    const double twice = 2.0 * l;
    if (l < floor_len - 1e-12 || l > s + 1e-12 ||
        std::abs(twice - std::nearbyint(twice)) > 1e-12)
      throw std::invalid_argument("length out of the admissible ladder");
    if (std::abs(config.eps[i]) != 1 || std::abs(config.xi[i]) != 1)
      throw std::invalid_argument("orientation signs must be +-1");
  }

  const Eigen::MatrixXd w = coupling_matrix(spec);
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pair_sum += w(i, j) * config.lengths[i] * config.eps[i] *
                  config.lengths[j] * config.eps[j];
  double moment = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    moment += config.lengths[i] * config.xi[i];

  EffectiveCouplings out;
  out.j_mu = pair_sum / (s * s * spec.n_sites);
  out.b_slope = moment / (s * spec.n_sites);
  out.multiplicity = 1.0;
  return out;
}

double landscape_energy(double j_mu, double b_mu, double phi) {
  const double sp = std::sin(phi);
  return -j_mu * sp * sp - b_mu * std::cos(phi);
}

double SemiclassicalLevel::value(double b) const {
  const double j = couplings.j_mu;
  const double beta = couplings.b_slope * b;
  if (std::abs(beta) < 2.0 * std::abs(j)) return -j - beta * beta / (4.0 * j);
  return j > 0.0 ? -std::abs(beta) : std::abs(beta);
}

double SemiclassicalLevel::curvature_jump() const {
  return couplings.b_slope * couplings.b_slope / (2.0 * couplings.j_mu);
}

SemiclassicalLevel semiclassical_level(const EffectiveCouplings& couplings) {
  const double j = couplings.j_mu;
  const double slope = couplings.b_slope;
  if (!std::isfinite(j) || !std::isfinite(slope))
    throw std::invalid_argument("couplings must be finite");
  if (j == 0.0 || slope == 0.0 || (j > 0.0) != (slope > 0.0))
    throw std::invalid_argument(
        "not a level: couplings must be nonzero with equal signs");
  SemiclassicalLevel level;
  level.couplings = couplings;
  level.branch = j > 0.0 ? Branch::Minimum : Branch::Maximum;
  level.b_c = 2.0 * std::abs(j) / std::abs(slope);
  return level;
}

double total_energy(const ChainSpec& spec, const SemiclassicalLevel& level,
                    double b) {
  require_finite_chain(spec, "total energy");
  return 2.0 * spec.spin() * spec.n_sites * level.value(b);
}

void enumerate_configs(const ChainSpec& spec, ConfigMode mode,
                       const ConfigVisitor& visit,
                       const EnumerateOptions& options) {
  require_finite_chain(spec, "configuration enumeration");
  const int n = spec.n_sites;
  const double s = spec.spin();
  const int n_lengths = spec.spin2 / 2 + 1;
  const int base = mode == ConfigMode::EpsOnly    ? 2
                   : mode == ConfigMode::EpsXi    ? 4
                                                  : 4 * n_lengths;

  double count_estimate = 1.0;
  for (int i = 0; i < n; ++i) count_estimate *= base;
  if (count_estimate > static_cast<double>(options.budget))
    throw BudgetError("enumeration of " + std::to_string(count_estimate) +
                      " configurations exceeds budget " +
                      std::to_string(options.budget));
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) count *= base;

  SpinConfiguration config;
  config.lengths.assign(n, s);
  config.eps.assign(n, 1);
  config.xi.assign(n, 1);
  std::vector<int> digits(n);

  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::int64_t rest = idx;
    for (int site = n - 1; site >= 0; --site) {
      digits[site] = static_cast<int>(rest % base);
      rest /= base;
    }
    for (int site = 0; site < n; ++site) {
      const int d = digits[site];
      const int orient = mode == ConfigMode::EpsOnly ? 2 * d
                         : mode == ConfigMode::EpsXi ? d
                                                     : d / n_lengths;
      config.eps[site] = (orient & 2) ? -1 : 1;
      config.xi[site] = (mode != ConfigMode::EpsOnly && (orient & 1)) ? -1 : 1;
      if (mode == ConfigMode::FullLengths)
        config.lengths[site] = s - d % n_lengths;
    }

    if (options.reduce_global_flip && config.eps[0] < 0) continue;
    if (options.reduce_mirror) {
      bool keep = true;
      for (int i = 0, j = n - 1; i < j; ++i, --j) {
        if (digits[i] != digits[j]) {
          keep = digits[i] < digits[j];
          break;
        }
      }
      if (!keep) continue;
    }

    visit(config, effective_couplings(spec, config));
  }
}

std::vector<EffectiveCouplings> level_classes(const ChainSpec& spec,
                                              ConfigMode mode,
                                              const EnumerateOptions& options) {
  const bool exact = exact_j_keys(spec);
  const double j_unit = spec.coupling_scale() / spec.n_sites;
  const double slope_unit = 2.0 * spec.spin() * spec.n_sites;
  std::map<long long, std::map<long long, EffectiveCouplings>> by_slope;
  enumerate_configs(
      spec, mode,
      [&](const SpinConfiguration&, const EffectiveCouplings& c) {
        auto& group = by_slope[std::llround(c.b_slope * slope_unit)];
        auto [it, inserted] = group.try_emplace(j_key(c.j_mu, j_unit, exact), c);
        if (!inserted) it->second.multiplicity += 1.0;
      },
      options);
  std::vector<EffectiveCouplings> out;
  for (auto& [slope_key, group] : by_slope) {
    if (!exact)
      merge_adjacent_cells(group, j_unit, &EffectiveCouplings::j_mu,
                           &EffectiveCouplings::multiplicity);
    for (const auto& [key, c] : group) out.push_back(c);
  }
  return out;
}

LevelTable ising_levels(int n, double j0) {
  if (n < 2) throw std::invalid_argument("ising table needs n >= 2");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(n);
  for (int r = 0; r < n; ++r)
    rows.emplace_back(-j0 * (n - 1 - 2 * r), 2.0 * binomial(n - 1, r));
  return merge_levels(std::move(rows));
}

LevelTable lmg_levels(int n, double j0) {
  if (n < 2) throw std::invalid_argument("flat-interaction table needs n >= 2");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(n + 1);
  for (int s = 0; s <= n; ++s) {
    const double u = n - 2.0 * s;
    rows.emplace_back(-(j0 / 2.0) * (u * u - n), binomial(n, s));
  }
  return merge_levels(std::move(rows));
}

std::vector<double> ferro_spectrum_b0(const ChainSpec& spec,
                                      std::int64_t budget) {
  require_finite_chain(spec, "zero-field enumeration");
  const std::int64_t dim = spec.hilbert_dim(budget);
  const int n = spec.n_sites;
  const int q = spec.local_dim();
  const double s = spec.spin();
  const Eigen::MatrixXd w = coupling_matrix(spec);

  std::vector<double> energies(dim);
  std::vector<double> m(n);
  for (std::int64_t state = 0; state < dim; ++state) {
    std::int64_t rest = state;
    for (int i = 0; i < n; ++i) {
      m[i] = rest % q - s;
      rest /= q;
    }
    double pair_sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pair_sum += w(i, j) * m[i] * m[j];
    energies[state] = -2.0 / s * pair_sum;
  }
  std::sort(energies.begin(), energies.end());
  return energies;
}

std::vector<double> para_spectrum_j0(const ChainSpec& spec,
                                     std::int64_t budget) {
  require_finite_chain(spec, "zero-coupling enumeration");
  const std::int64_t dim = spec.hilbert_dim(budget);
  const int n = spec.n_sites;
  const int q = spec.local_dim();
  const double s = spec.spin();

  std::vector<double> energies(dim);
  for (std::int64_t state = 0; state < dim; ++state) {
    std::int64_t rest = state;
    double total_m = 0.0;
    for (int i = 0; i < n; ++i) {
      total_m += rest % q - s;
      rest /= q;
    }
    energies[state] = -2.0 * spec.b * total_m;
  }
  std::sort(energies.begin(), energies.end());
  return energies;
}

double counting_function(const std::vector<double>& levels, double e) {
  if (levels.empty()) throw std::invalid_argument("empty level multiset");
  std::size_t below = 0;
  for (double level : levels)
    if (level <= e) ++below;
  return static_cast<double>(below) / levels.size();
}

CouplingPair effective_boundary_couplings(const ChainSpec& spec) {
  spec.validate();
  if (spec.boundary != Boundary::Open)
    throw std::invalid_argument("boundary couplings are open-chain sums");
  if (spec.thermodynamic()) {
    const ThermoCouplings t = thermo_couplings(spec);
    return {t.j_e_inf, t.j_a_inf};
  }
  const int n = spec.n_sites;
  const Eigen::MatrixXd w = coupling_matrix(spec);
  double ferro = 0.0;
  double anti = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      ferro += w(i, j);
      anti += (j - i) % 2 ? -w(i, j) : w(i, j);
    }
  }
  return {ferro / n, anti / n};
}

std::vector<DeviationPoint> deviation(const ChainSpec& spec,
                                      const std::vector<double>& b_grid,
                                      int threads, std::int64_t dim_budget,
                                      std::int64_t enum_budget) {
  require_finite_chain(spec, "deviation");
  if (b_grid.empty()) throw std::invalid_argument("empty field grid");

  std::vector<double> j_stable;
  for (const auto& wv : eps_j_classes(spec, enum_budget))
    if (wv.value > 0.0) j_stable.push_back(wv.value);
  if (j_stable.empty())
    throw std::domain_error("no stable configuration for this spec");
  std::vector<double> slope_stable;
  for (const auto& wv : slope_classes(spec.n_sites))
    if (wv.value > 0.0) slope_stable.push_back(wv.value);

  const auto series = exact::spectrum_sweep(spec, b_grid, threads, dim_budget);
  const double per_spin_to_total = 2.0 * spec.spin() * spec.n_sites;

  std::vector<DeviationPoint> out(b_grid.size());
  for (std::size_t p = 0; p < b_grid.size(); ++p) {
    const double b = b_grid[p];
    const double e0 = series.ground_energy[static_cast<Eigen::Index>(p)];
    if (std::abs(e0) < 1e-12)
      throw std::domain_error("d(B) undefined at B = " + std::to_string(b) +
                              ": exact ground energy is zero");
    double best = std::numeric_limits<double>::infinity();
    for (double j : j_stable) {
      for (double v : slope_stable) {
        const double beta = v * b;
        const double val =
            beta < 2.0 * j ? -j - beta * beta / (4.0 * j) : -beta;
        best = std::min(best, val);
      }
    }
    const double variational = per_spin_to_total * best;
    out[p] = {b, (variational - e0) / std::abs(e0), e0, variational};
  }
  return out;
}

BifurcationHistogram bifurcation_histogram(const ChainSpec& spec,
                                           int bins_per_decade,
                                           bool stable_only,
                                           std::int64_t budget) {
  require_finite_chain(spec, "bifurcation histogram");
  if (bins_per_decade < 1)
    throw std::invalid_argument("bins_per_decade must be positive");
  const int n = spec.n_sites;
  const double scale = spec.coupling_scale();

  // For flat (alpha = 0) and nearest-neighbour open (alpha = INF) couplings
  // at S = 1/2 the J_mu classes follow from the closed-form level tables,
  // so N is not limited by the 2^N walk.
  std::vector<WeightedValue> j_classes;
  if (spec.spin2 == 1 && spec.alpha == 0.0) {
    std::map<long long, WeightedValue> by_u2;
    for (int s = 0; s <= n; ++s) {
      const double u = n - 2.0 * s;
      const double j = scale * (u * u - n) / (2.0 * n);
      auto [it, inserted] = by_u2.try_emplace(std::llround(u * u),
                                              WeightedValue{j, binomial(n, s)});
      if (!inserted) it->second.mult += binomial(n, s);
    }
    for (const auto& [key, wv] : by_u2) j_classes.push_back(wv);
  } else if (spec.spin2 == 1 && std::isinf(spec.alpha) &&
             spec.boundary == Boundary::Open) {
    for (int r = 0; r < n; ++r)
      j_classes.push_back(
          {scale * (n - 1.0 - 2.0 * r) / n, 2.0 * binomial(n - 1, r)});
  } else {
    j_classes = eps_j_classes(spec, budget);
  }
  const auto v_classes = slope_classes(n);

  std::map<int, std::pair<double, double>> filled;
  double contributing = 0.0;
  double skipped = 0.0;
  for (const auto& jc : j_classes) {
    for (const auto& vc : v_classes) {
      const double mult = jc.mult * vc.mult;
      const bool usable =
          jc.value != 0.0 && vc.value != 0.0 &&
          (!stable_only || (jc.value > 0.0 && vc.value > 0.0));
      if (!usable) {
        skipped += mult;
        continue;
      }
      const double bc = 2.0 * std::abs(jc.value) / std::abs(vc.value);
      const int idx =
          static_cast<int>(std::floor(bins_per_decade * std::log10(bc)));
      auto& bin = filled[idx];
      bin.first += mult;
      bin.second += 1.0;
      contributing += mult;
    }
  }
  if (filled.empty())
    throw std::domain_error("no contributing configurations in histogram");

  BifurcationHistogram hist;
  hist.bins_per_decade = bins_per_decade;
  hist.stable_only = stable_only;
  hist.total_configs = contributing;
  hist.skipped_configs = skipped;

  const int lo = filled.begin()->first - 1;
  const int hi = filled.rbegin()->first + 1;
  const int n_bins = hi - lo + 1;
  hist.edges.resize(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i)
    hist.edges[i] = std::pow(10.0, static_cast<double>(lo + i) / bins_per_decade);
  hist.count_configs.assign(n_bins, 0.0);
  hist.count_pairs.assign(n_bins, 0.0);
  for (const auto& [idx, counts] : filled) {
    hist.count_configs[idx - lo] = counts.first;
    hist.count_pairs[idx - lo] = counts.second;
  }

  hist.peak_bin = static_cast<int>(
      std::max_element(hist.count_pairs.begin(), hist.count_pairs.end()) -
      hist.count_pairs.begin());

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int points = 0;
  for (int i = hist.peak_bin + 1;
       i <= hist.peak_bin + bins_per_decade && i < n_bins; ++i) {
    if (hist.count_pairs[i] <= 0.0) continue;
    const double x = std::log(std::sqrt(hist.edges[i] * hist.edges[i + 1]));
    const double y = std::log(hist.count_pairs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++points;
  }
  hist.decay_slope =
      points >= 2 ? (points * sxy - sx * sy) / (points * sxx - sx * sx)
                  : std::numeric_limits<double>::quiet_NaN();
  return hist;
}

}  // namespace spinchain::meanfield
