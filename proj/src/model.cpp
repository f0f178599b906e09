#include "spinchain/model.hpp"

#include <algorithm>
#include <functional>
#include <numbers>

namespace spinchain {

namespace {

constexpr double kPi = std::numbers::pi;

double reduce_angle(double k) {
  double r = std::fmod(k, 2 * kPi);
  if (r < 0) r += 2 * kPi;
  return r;
}

// Accelerated evaluation of sum_{m>=0} (-1)^m a(m) for totally monotone a;
// the error falls like (3+sqrt(8))^-n. The sign alternation is carried by
// the c coefficients.
double alternating_sum(int n, const std::function<double(int)>& a) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    acc += c * a(k);
    b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0));
  }
  return acc / d;
}

int acceleration_terms(double tol) {
  const double rate = std::log(3.0 + std::sqrt(8.0));
  const int n =
      static_cast<int>(std::ceil(-std::log(std::max(tol, 1e-300)) / rate)) + 6;
  return std::clamp(n, 20, 72);
}

}  // namespace

std::string to_string(Boundary boundary) {
  return boundary == Boundary::Open ? "open" : "periodic";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "open") return Boundary::Open;
  if (name == "periodic") return Boundary::Periodic;
  throw std::invalid_argument("unknown boundary: " + name);
}

double ChainSpec::coupling_scale() const {
  if (!kac_rescale) return j0;
  return j0 / n_sites;
}

std::int64_t ChainSpec::hilbert_dim(std::int64_t budget) const {
  if (thermodynamic())
    throw std::invalid_argument("hilbert_dim: finite chain required");
  std::int64_t dim = 1;
  for (int i = 0; i < n_sites; ++i) {
    dim *= local_dim();
    if (dim > budget)
      throw BudgetError("Hilbert dimension exceeds budget " +
                        std::to_string(budget));
  }
  return dim;
}

void ChainSpec::validate() const {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
  if (spin2 < 1) throw std::invalid_argument("spin2 must be >= 1");
  if (std::isnan(alpha) || alpha < 0)
    throw std::invalid_argument("alpha must be >= 0 or inf");
  if (std::isnan(j0) || std::isinf(j0))
    throw std::invalid_argument("j0 must be finite");
  if (std::isnan(b) || std::isinf(b) || b < 0)
    throw std::invalid_argument("b must be finite and >= 0");
  if (kac_rescale && thermodynamic())
    throw std::invalid_argument("kac_rescale needs a finite chain");
}

std::vector<int> index_set(int n, bool exclude_zero) {
  if (n < 2) throw std::invalid_argument("index_set: n must be >= 2");
  if (n == kSitesInf)
    throw std::invalid_argument("index_set: finite n required");
  const int lo = n % 2 == 0 ? -n / 2 : -(n - 1) / 2;
  const int hi = n % 2 == 0 ? n / 2 - 1 : (n - 1) / 2;
  std::vector<int> members;
  members.reserve(n);
  for (int r = lo; r <= hi; ++r) {
    if (exclude_zero && r == 0) continue;
    members.push_back(r);
  }
  return members;
}

std::vector<double> momentum_grid(int n) {
  std::vector<double> grid;
  for (int m : index_set(n, false)) grid.push_back(2 * kPi * m / n);
  return grid;
}

int ring_distance(int n_sites, int i, int j) {
  int d = std::abs(i - j) % n_sites;
  return std::min(d, n_sites - d);
}

double inv_power(double distance, double alpha) {
  const double d = std::abs(distance);
  if (std::isinf(alpha)) return d == 1.0 ? 1.0 : 0.0;
  return std::pow(d, -alpha);
}

ThermoCouplings zeta_eta(double alpha, double tol) {
  ThermoCouplings out;
  out.eta_alpha = eta_value(alpha, tol);
  out.zeta_alpha = alpha > 1
                       ? out.eta_alpha / (1.0 - std::pow(2.0, 1.0 - alpha))
                       : std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(alpha)) out.zeta_alpha = 1.0;
  out.j_e_inf = out.zeta_alpha;
  out.j_a_inf = -out.eta_alpha;
  out.c_n = 1.0;
  return out;
}

ThermoCouplings thermo_couplings(const ChainSpec& spec, double tol) {
  spec.validate();
  ThermoCouplings out = zeta_eta(spec.alpha, tol);
  const double j0 = spec.coupling_scale();
  out.j_e_inf = j0 * out.zeta_alpha;
  out.j_a_inf = -j0 * out.eta_alpha;
  if (!spec.thermodynamic()) out.c_n = 1.0 - 1.0 / spec.n_sites;
  return out;
}

double eta_value(double alpha, double tol) {
  if (std::isnan(alpha) || alpha < 0)
    throw std::domain_error("eta: alpha must be >= 0");
  if (alpha == 0) return 0.5;
  if (std::isinf(alpha)) return 1.0;
  const int n = acceleration_terms(tol);
  return alternating_sum(n, [alpha](int m) { return inv_power(m + 1, alpha); });
}

double zeta_value(double alpha) {
  if (!(alpha > 1)) throw std::domain_error("zeta: divergent for alpha <= 1");
  if (std::isinf(alpha)) return 1.0;
  return eta_value(alpha) / (1.0 - std::pow(2.0, 1.0 - alpha));
}

namespace detail {

double zeta_extended(double s) {
  if (s == 1) throw std::domain_error("zeta: pole at s = 1");
  if (s > 1) return zeta_value(s);
  if (s >= 0) return eta_value(s) / (1.0 - std::pow(2.0, 1.0 - s));
  // reflection onto 1 - s > 1
  return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) *
         std::tgamma(1.0 - s) * zeta_extended(1.0 - s);
}

}  // namespace detail

std::complex<double> polylog_unit_circle(double s, double theta) {
  using namespace std::complex_literals;
  if (std::isinf(s) || std::isnan(s))
    throw std::domain_error("polylog_unit_circle: s must be finite");
  const double t = reduce_angle(theta);
  if (t == 0)
    throw std::domain_error("polylog_unit_circle: theta must not be 0 mod 2pi");
  if (t > kPi) return std::conj(polylog_unit_circle(s, 2 * kPi - t));

  const std::complex<double> z = std::exp(1i * t);
  if (s == 0) return z / (1.0 - z);
  if (s == 1) return -std::log(1.0 - z);

  // Power series in (i t) around the branch point; converges for |t| < 2pi.
  const std::complex<double> it = 1i * t;
  const std::complex<double> log_mit = std::log(t) - 1i * (kPi / 2);
  const double s_round = std::round(s);
  const bool integer_order = std::abs(s - s_round) < 1e-12 && s_round >= 2;

  std::complex<double> acc = 0;
  std::complex<double> it_pow = 1.0;  // (i t)^j / j!
  int small_run = 0;
  if (integer_order) {
    const int m = static_cast<int>(s_round);
    double harmonic = 0;
    for (int j = 1; j < m; ++j) harmonic += 1.0 / j;
    for (int j = 0; j <= 220; ++j) {
      if (j == m - 1) {
        acc += it_pow * (harmonic - log_mit);
      } else {
        const std::complex<double> term = detail::zeta_extended(m - j) * it_pow;
        acc += term;
        if (j > m) {
          small_run = std::abs(term) < 1e-18 * std::abs(acc) ? small_run + 1 : 0;
          if (small_run >= 3) break;
        }
      }
      it_pow *= it / double(j + 1);
    }
    return acc;
  }

  acc = std::tgamma(1.0 - s) * std::exp((s - 1.0) * log_mit);
  for (int j = 0; j <= 220; ++j) {
    const std::complex<double> term = detail::zeta_extended(s - j) * it_pow;
    acc += term;
    if (j > 4) {
      small_run = std::abs(term) < 1e-18 * std::abs(acc) ? small_run + 1 : 0;
      if (small_run >= 3) break;
    }
    it_pow *= it / double(j + 1);
  }
  return acc;
}

double clausen_truncated(double alpha, double k, int n) {
  if (std::isnan(alpha) || alpha < 0)
    throw std::domain_error("clausen_truncated: alpha must be >= 0");
  if (n != kSitesInf) {
    if (n < 2) throw std::invalid_argument("clausen_truncated: n must be >= 2");
    double acc = 0;
    for (int r : index_set(n, true)) acc += std::cos(k * r) * inv_power(r, alpha);
    return 0.5 * acc;
  }
  if (std::isinf(alpha)) return std::cos(k);
  const double t = reduce_angle(k);
  if (t == 0) return zeta_value(alpha);
  return polylog_unit_circle(alpha, t).real();
}

LerchSum lerch_truncated(double k, double alpha, double a, long n_terms) {
  if (!(a > 0)) throw std::invalid_argument("lerch_truncated: a must be > 0");
  if (n_terms < 1)
    throw std::invalid_argument("lerch_truncated: n_terms must be >= 1");
  using namespace std::complex_literals;
  std::complex<double> acc = 0;
  const std::complex<double> step = std::exp(1i * k);
  std::complex<double> phase = 1.0;
  for (long m = 0; m < n_terms; ++m) {
    acc += phase * inv_power(m + a, alpha);
    phase *= step;
  }
  // Tail estimate: integral bound when absolutely convergent, Dirichlet-test
  // bound off the k = 0 ray, infinite otherwise.
  double tail;
  if (std::isinf(alpha)) {
    tail = 0;
  } else if (alpha > 1) {
    tail = std::pow(n_terms + a - 1, 1.0 - alpha) / (alpha - 1.0);
  } else {
    const double half_sin = std::abs(std::sin(reduce_angle(k) / 2));
    tail = half_sin > 0 ? std::pow(n_terms + a, -alpha) / half_sin
                        : std::numeric_limits<double>::infinity();
  }
  return {acc, tail, n_terms};
}

std::complex<double> lerch_unit_circle(double k, double alpha, double a) {
  if (std::isinf(alpha))
    throw std::domain_error("lerch_unit_circle: finite alpha required");
  if (!(alpha > 1))
    throw std::domain_error("lerch_unit_circle: alpha must be > 1");
  const double twice_a = 2 * a;
  if (std::abs(twice_a - std::round(twice_a)) > 1e-12 || a < 0.5)
    throw std::domain_error("lerch_unit_circle: a must be half-integer >= 1/2");

  using namespace std::complex_literals;
  const double t = reduce_angle(k);
  const std::complex<double> z = std::exp(1i * t);
  auto li = [&](double angle) -> std::complex<double> {
    const double r = reduce_angle(angle);
    return r == 0 ? std::complex<double>(zeta_value(alpha), 0)
                  : polylog_unit_circle(alpha, r);
  };

  // Ladder base: a = 1/2 via the odd-index split of Li, a = 1 via Li(z)/z.
  // Either sign choice of the half-angle root is valid by the duplication
  // formula, so the reduced angle can be halved directly.
  const bool half_ladder = static_cast<long>(std::round(twice_a)) % 2 != 0;
  std::complex<double> phi;
  double cur;
  if (half_ladder) {
    const std::complex<double> w = std::exp(1i * (t / 2));
    phi = std::pow(2.0, alpha) / w *
          (li(t / 2) - std::pow(2.0, -alpha) * li(t));
    cur = 0.5;
  } else {
    phi = li(t) / z;
    cur = 1.0;
  }
  // Phi(z, s, a+1) = (Phi(z, s, a) - a^-s) / z
  while (cur < a - 0.25) {
    phi = (phi - inv_power(cur, alpha)) / z;
    cur += 1.0;
  }
  return phi;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("grid needs >= 1 point");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * i / double(points - 1);
  return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi > 0))
    throw std::invalid_argument("log grid needs positive endpoints");
  std::vector<double> g = linear_grid(std::log(lo), std::log(hi), points);
  for (double& x : g) x = std::exp(x);
  return g;
}

}  // namespace spinchain
