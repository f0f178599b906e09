#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinchain/exact.hpp"
#include "spinchain/io.hpp"
#include "spinchain/meanfield.hpp"
#include "spinchain/model.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/spinwaves.hpp"
#include "spinchain/sublattice.hpp"

namespace {

using nlohmann::json;
using namespace spinchain;

constexpr const char* kVersion = "spinchain 1.0.0";

/// Everything a run depends on. The JSON config file mirrors this struct
/// one key per field; flags given on the command line win over file values,
/// and the effective state is echoed into each output's sidecar.
struct RunConfig {
  int n_sites = 2;
  int spin2 = 1;
  double alpha = kAlphaInf;
  double j0 = 1.0;
  double b = 0.0;
  std::string boundary;  // empty = command default
  bool kac = false;

  double b_min = 0.05;
  double b_max = 5.0;
  int b_steps = 41;
  bool log_scale = false;

  std::string mode = "epsxi";
  bool reduce_flip = false;
  bool reduce_mirror = false;
  int bins_per_decade = 10;
  bool include_unstable = false;

  std::string kind = "uniform";
  int inf_points = 1024;
  double phi_b0 = 1.2;
  double phi_c0 = 1.2;
  double newton_tol = 1e-10;
  int max_iter = 100;

  long long dim_budget = kDimBudget;
  long long enum_budget = kEnumBudget;
  int threads = 0;

  std::string output_dir = ".";
  std::string format = "csv";
  bool raw_units = false;
};

json sites_to_json(int n) {
  if (n == kSitesInf) return "inf";
  return n;
}

json alpha_to_json(double alpha) {
  if (std::isinf(alpha)) return "inf";
  return alpha;
}

int sites_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kSitesInf;
    throw std::invalid_argument("config: n must be an integer or \"inf\"");
  }
  return j.get<int>();
}

double alpha_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kAlphaInf;
    throw std::invalid_argument("config: alpha must be a number or \"inf\"");
  }
  return j.get<double>();
}

json config_to_json(const RunConfig& c) {
  json j;
  j["n"] = sites_to_json(c.n_sites);
  j["spin2"] = c.spin2;
  j["alpha"] = alpha_to_json(c.alpha);
  j["j0"] = c.j0;
  j["b"] = c.b;
  j["boundary"] = c.boundary;
  j["kac"] = c.kac;
  j["b_min"] = c.b_min;
  j["b_max"] = c.b_max;
  j["b_steps"] = c.b_steps;
  j["log_scale"] = c.log_scale;
  j["mode"] = c.mode;
  j["reduce_flip"] = c.reduce_flip;
  j["reduce_mirror"] = c.reduce_mirror;
  j["bins_per_decade"] = c.bins_per_decade;
  j["include_unstable"] = c.include_unstable;
  j["kind"] = c.kind;
  j["inf_points"] = c.inf_points;
  j["phi_b0"] = c.phi_b0;
  j["phi_c0"] = c.phi_c0;
  j["newton_tol"] = c.newton_tol;
  j["max_iter"] = c.max_iter;
  j["dim_budget"] = c.dim_budget;
  j["enum_budget"] = c.enum_budget;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  j["format"] = c.format;
  j["raw_units"] = c.raw_units;
  return j;
}

void config_from_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  if (j.contains("n")) c.n_sites = sites_from_json(j.at("n"));
  if (j.contains("spin2")) c.spin2 = j.at("spin2").get<int>();
  if (j.contains("alpha")) c.alpha = alpha_from_json(j.at("alpha"));
  if (j.contains("j0")) c.j0 = j.at("j0").get<double>();
  if (j.contains("b")) c.b = j.at("b").get<double>();
  if (j.contains("boundary")) c.boundary = j.at("boundary").get<std::string>();
  if (j.contains("kac")) c.kac = j.at("kac").get<bool>();
  if (j.contains("b_min")) c.b_min = j.at("b_min").get<double>();
  if (j.contains("b_max")) c.b_max = j.at("b_max").get<double>();
  if (j.contains("b_steps")) c.b_steps = j.at("b_steps").get<int>();
  if (j.contains("log_scale")) c.log_scale = j.at("log_scale").get<bool>();
  if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
  if (j.contains("reduce_flip")) c.reduce_flip = j.at("reduce_flip").get<bool>();
  if (j.contains("reduce_mirror"))
    c.reduce_mirror = j.at("reduce_mirror").get<bool>();
  if (j.contains("bins_per_decade"))
    c.bins_per_decade = j.at("bins_per_decade").get<int>();
  if (j.contains("include_unstable"))
    c.include_unstable = j.at("include_unstable").get<bool>();
  if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
  if (j.contains("inf_points")) c.inf_points = j.at("inf_points").get<int>();
  if (j.contains("phi_b0")) c.phi_b0 = j.at("phi_b0").get<double>();
  if (j.contains("phi_c0")) c.phi_c0 = j.at("phi_c0").get<double>();
  if (j.contains("newton_tol")) c.newton_tol = j.at("newton_tol").get<double>();
  if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
  if (j.contains("dim_budget"))
    c.dim_budget = j.at("dim_budget").get<long long>();
  if (j.contains("enum_budget"))
    c.enum_budget = j.at("enum_budget").get<long long>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("output_dir"))
    c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("format")) c.format = j.at("format").get<std::string>();
  if (j.contains("raw_units")) c.raw_units = j.at("raw_units").get<bool>();
}

bool ring_command(const std::string& command) {
  return command == "dispersion" || command == "gap" || command == "sublattice";
}

ChainSpec make_spec(RunConfig& c, const std::string& command) {
  if (c.boundary.empty())
    c.boundary = ring_command(command) ? "periodic" : "open";
  ChainSpec spec;
  spec.n_sites = c.n_sites;
  spec.spin2 = c.spin2;
  spec.alpha = c.alpha;
  spec.j0 = c.j0;
  spec.b = c.b;
  spec.boundary = boundary_from_string(c.boundary);
  spec.kac_rescale = c.kac;
  spec.validate();
  return spec;
}

/// Divisor applied to energy-dimensioned output columns (the field included).
double energy_unit(const RunConfig& c) {
  if (c.raw_units || c.j0 == 0.0) return 1.0;
  return std::abs(c.j0);
}

std::vector<double> field_grid(const RunConfig& c) {
  if (c.b_steps < 1) throw std::invalid_argument("b_steps must be at least 1");
  if (c.log_scale) {
    if (c.b_min <= 0)
      throw std::invalid_argument("a log field grid needs b_min > 0");
    return log_grid(c.b_min, c.b_max, c.b_steps);
  }
  return linear_grid(c.b_min, c.b_max, c.b_steps);
}

meanfield::ConfigMode mode_from_string(const std::string& mode) {
  if (mode == "eps") return meanfield::ConfigMode::EpsOnly;
  if (mode == "epsxi") return meanfield::ConfigMode::EpsXi;
  if (mode == "full") return meanfield::ConfigMode::FullLengths;
  throw std::invalid_argument("unknown mode: " + mode);
}

spinwaves::Kind kind_from_string(const std::string& kind) {
  if (kind == "uniform") return spinwaves::Kind::Uniform;
  if (kind == "alternating") return spinwaves::Kind::Alternating;
  throw std::invalid_argument("unknown kind: " + kind);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != columns.size())
      throw std::logic_error("row width does not match the header");
    rows.push_back(std::move(row));
  }
};

/// Writes the table in the configured format and echoes the effective config
/// beside it: a .meta.json sidecar for CSV files, an embedded object for JSON.
/// output_dir "-" streams the data to stdout and drops the sidecar.
std::string emit(const RunConfig& c, const std::string& command,
                 const Table& table, const json& extras) {
  json meta;
  meta["command"] = command;
  meta["config"] = config_to_json(c);
  meta["extras"] = extras;

  const bool to_stdout = c.output_dir == "-";
  std::string path = "-";
  if (!to_stdout) {
    std::filesystem::create_directories(c.output_dir);
    const char* ext = c.format == "json" ? ".json" : ".csv";
    path = (std::filesystem::path(c.output_dir) / (command + ext)).string();
  }

  if (c.format == "json") {
    json doc = meta;
    doc["columns"] = table.columns;
    doc["rows"] = table.rows;
    const std::string text = doc.dump(2) + "\n";
    if (to_stdout)
      std::cout << text;
    else
      io::write_text_file(path, text);
    return path;
  }
  if (c.format != "csv")
    throw std::invalid_argument("unknown format: " + c.format);

  io::CsvWriter writer(path);
  writer.comment(std::string(kVersion) + " " + command);
  writer.comment(c.raw_units || c.j0 == 0.0 ? "units: raw"
                                            : "units: energies in |j0|");
  writer.header(table.columns);
  for (const auto& row : table.rows) writer.row(row);
  writer.close();
  if (!to_stdout) io::write_json_sidecar(path, meta);
  return path;
}

void run_spectrum(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "spectrum");
  const double unit = energy_unit(c);
  const Eigen::VectorXd values = exact::spectrum(spec, c.dim_budget);

  Table table;
  table.columns = {"index", "energy"};
  for (Eigen::Index i = 0; i < values.size(); ++i)
    table.add({static_cast<double>(i), values[i] / unit});

  json extras;
  extras["dim"] = values.size();
  extras["ground_energy"] = values.size() ? values[0] / unit : 0.0;
  const std::string path = emit(c, "spectrum", table, extras);
  std::fprintf(stderr, "spectrum: dim=%lld ground=%.12g -> %s\n",
               static_cast<long long>(values.size()),
               values.size() ? values[0] / unit : 0.0, path.c_str());
}

void run_sweep(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "sweep");
  const double unit = energy_unit(c);
  const std::vector<double> grid = field_grid(c);
  const exact::SpectrumSeries series =
      exact::spectrum_sweep(spec, grid, resolve_threads(c.threads), c.dim_budget);

  Table table;
  table.columns = {"b"};
  for (Eigen::Index l = 0; l < series.levels.cols(); ++l)
    table.columns.push_back("e" + std::to_string(l));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i] / unit};
    for (Eigen::Index l = 0; l < series.levels.cols(); ++l)
      row.push_back(series.levels(static_cast<Eigen::Index>(i), l) / unit);
    table.add(std::move(row));
  }

  json extras;
  extras["dim"] = series.levels.cols();
  extras["points"] = grid.size();
  const std::string path = emit(c, "sweep", table, extras);
  std::fprintf(stderr, "sweep: %zu points, dim=%lld -> %s\n", grid.size(),
               static_cast<long long>(series.levels.cols()), path.c_str());
}

void run_semiclassical(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "semiclassical");
  const double unit = energy_unit(c);
  const std::vector<double> grid = field_grid(c);

  meanfield::EnumerateOptions options;
  options.reduce_global_flip = c.reduce_flip;
  options.reduce_mirror = c.reduce_mirror;
  options.budget = c.enum_budget;
  const std::vector<meanfield::EffectiveCouplings> classes =
      meanfield::level_classes(spec, mode_from_string(c.mode), options);

  Table table;
  table.columns = {"b",   "class",        "j_mu", "b_slope",
                   "b_c", "multiplicity", "energy_per_spin", "total_energy"};
  std::size_t n_levels = 0;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    meanfield::SemiclassicalLevel level;
    try {
      level = meanfield::semiclassical_level(classes[ci]);
    } catch (const std::invalid_argument&) {
      continue;  // zero or mixed-sign class: no extremal branch
    }
    ++n_levels;
    ChainSpec at = spec;
    for (double b : grid) {
      at.b = b;
      const double per_spin = level.value(b);
      table.add({b / unit, static_cast<double>(ci), classes[ci].j_mu / unit,
                 classes[ci].b_slope, level.b_c / unit,
                 classes[ci].multiplicity, per_spin / unit,
                 meanfield::total_energy(at, level, b) / unit});
    }
  }

  json extras;
  extras["classes"] = classes.size();
  extras["branch_levels"] = n_levels;
  const std::string path = emit(c, "semiclassical", table, extras);
  std::fprintf(stderr, "semiclassical: %zu classes, %zu with branches -> %s\n",
               classes.size(), n_levels, path.c_str());
}

void run_dispersion(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "dispersion");
  const double unit = energy_unit(c);
  const spinwaves::DispersionCurve curve =
      spinwaves::dispersion(spec, kind_from_string(c.kind), c.inf_points);

  Table table;
  table.columns = {"k", "energy", "energy_imag", "g", "f", "theta", "stable"};
  for (std::size_t i = 0; i < curve.k.size(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    table.add({curve.k[i], curve.energy[ei] / unit, curve.energy_imag[ei] / unit,
               curve.g[ei] / unit, curve.f[ei] / unit, curve.theta[ei],
               static_cast<double>(curve.stable[i])});
  }

  json extras;
  extras["regime"] =
      curve.angle.regime == spinwaves::Regime::Ordered ? "ordered" : "polarized";
  extras["phi_c"] = curve.angle.phi_c;
  extras["critical_field"] = curve.angle.critical_field / unit;
  extras["e0"] = curve.e0 / unit;
  extras["mean_energy"] = curve.mean_energy / unit;
  extras["gap"] = curve.gap / unit;
  extras["all_stable"] = curve.all_stable;
  const std::string path = emit(c, "dispersion", table, extras);
  std::fprintf(stderr,
               "dispersion: %s %s phi=%.6f gap=%.8g all_stable=%d -> %s\n",
               c.kind.c_str(), extras["regime"].get<std::string>().c_str(),
               curve.angle.phi_c, curve.gap / unit,
               static_cast<int>(curve.all_stable), path.c_str());
}

void run_gap(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "gap");
  const double unit = energy_unit(c);
  const spinwaves::GapScan scan =
      spinwaves::gap_scan(spec, kind_from_string(c.kind), field_grid(c));

  Table table;
  table.columns = {"b", "gap", "corr_length", "stable"};
  for (const spinwaves::GapPoint& p : scan.points)
    table.add({p.b / unit, p.gap / unit, p.corr_length * std::sqrt(unit),
               static_cast<double>(p.stable)});

  json extras;
  extras["critical_field"] = scan.critical_field / unit;
  extras["fitted_exponent"] = scan.fitted_exponent;
  const std::string path = emit(c, "gap", table, extras);
  std::fprintf(stderr,
               "gap: critical field = %.8f, fitted exponent = %.4f -> %s\n",
               scan.critical_field / unit, scan.fitted_exponent, path.c_str());
}

void run_bifurcations(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "bifurcations");
  const double unit = energy_unit(c);
  const meanfield::BifurcationHistogram hist = meanfield::bifurcation_histogram(
      spec, c.bins_per_decade, !c.include_unstable, c.enum_budget);

  Table table;
  table.columns = {"bin_lo", "bin_hi", "count_configs", "count_pairs"};
  for (std::size_t i = 0; i < hist.count_pairs.size(); ++i)
    table.add({hist.edges[i] / unit, hist.edges[i + 1] / unit,
               hist.count_configs[i], hist.count_pairs[i]});

  json extras;
  double peak_center = 0.0;
  if (hist.peak_bin >= 0)
    peak_center = std::sqrt(hist.edges[hist.peak_bin] *
                            hist.edges[hist.peak_bin + 1]) /
                  unit;
  extras["peak_bin"] = hist.peak_bin;
  extras["peak_center"] = peak_center;
  extras["decay_slope"] = hist.decay_slope;
  extras["total_configs"] = hist.total_configs;
  extras["skipped_configs"] = hist.skipped_configs;
  const std::string path = emit(c, "bifurcations", table, extras);
  std::fprintf(stderr,
               "bifurcations: peak near b=%.6g, decay slope %.4f -> %s\n",
               peak_center, hist.decay_slope, path.c_str());
}

void run_deviation(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "deviation");
  const double unit = energy_unit(c);
  const std::vector<meanfield::DeviationPoint> points =
      meanfield::deviation(spec, field_grid(c), resolve_threads(c.threads),
                           c.dim_budget, c.enum_budget);

  Table table;
  table.columns = {"b", "d", "exact_energy", "variational_energy"};
  for (const meanfield::DeviationPoint& p : points)
    table.add({p.b / unit, p.d, p.exact_energy / unit,
               p.variational_energy / unit});

  double d_max = 0.0;
  for (const auto& p : points) d_max = std::max(d_max, p.d);
  json extras;
  extras["points"] = points.size();
  extras["d_max"] = d_max;
  const std::string path = emit(c, "deviation", table, extras);
  std::fprintf(stderr, "deviation: %zu points, max d = %.6g -> %s\n",
               points.size(), d_max, path.c_str());
}

void run_sublattice(RunConfig& c) {
  const ChainSpec spec = make_spec(c, "sublattice");
  const double unit = energy_unit(c);
  const sublattice::SublatticeConfig config = sublattice::stationary_angles(
      spec, c.phi_b0, c.phi_c0, c.newton_tol, c.max_iter);
  const sublattice::BandStructure bands =
      sublattice::bdg_bands(spec, config, c.inf_points);

  Table table;
  table.columns = {"k", "band1", "band2", "stable"};
  for (std::size_t i = 0; i < bands.k.size(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    table.add({bands.k[i], bands.bands(ei, 0) / unit, bands.bands(ei, 1) / unit,
               static_cast<double>(bands.stable[i])});
  }

  json extras;
  extras["phi_b"] = config.phi_b;
  extras["phi_c"] = config.phi_c;
  extras["m_b"] = config.m_b;
  extras["m_c"] = config.m_c;
  extras["residual"] = config.residual;
  extras["iterations"] = config.iterations;
  extras["all_stable"] = bands.all_stable;
  const std::string path = emit(c, "sublattice", table, extras);
  std::fprintf(stderr,
               "sublattice: phi_b=%.8f phi_c=%.8f residual=%.2e "
               "all_stable=%d -> %s\n",
               config.phi_b, config.phi_c, config.residual,
               static_cast<int>(bands.all_stable), path.c_str());
}

struct SpecialArgs {
  std::vector<double> zeta;
  std::vector<double> eta;
  std::vector<double> clausen;  // alpha, k
  std::string sites = "inf";
};

void run_special(const SpecialArgs& args) {
  if (args.zeta.empty() && args.eta.empty() && args.clausen.empty())
    throw std::invalid_argument(
        "special needs one of --zeta, --eta, --clausen");
  char buf[64];
  for (double s : args.zeta) {
    std::snprintf(buf, sizeof(buf), "%.10f", zeta_value(s));
    std::cout << buf << '\n';
  }
  for (double s : args.eta) {
    std::snprintf(buf, sizeof(buf), "%.10f", eta_value(s));
    std::cout << buf << '\n';
  }
  if (!args.clausen.empty()) {
    const int n = args.sites == "inf" ? kSitesInf : std::stoi(args.sites);
    std::snprintf(buf, sizeof(buf), "%.10f",
                  clausen_truncated(args.clausen[0], args.clausen[1], n));
    std::cout << buf << '\n';
  }
}

void add_sites_option(CLI::App* sub, RunConfig& c) {
  sub->add_option_function<std::string>(
         "--n",
         [&c](const std::string& text) {
           if (text == "inf") {
             c.n_sites = kSitesInf;
             return;
           }
           try {
             std::size_t used = 0;
             const int value = std::stoi(text, &used);
             if (used != text.size()) throw std::invalid_argument(text);
             c.n_sites = value;
           } catch (const std::exception&) {
             throw CLI::ValidationError("--n",
                                        "expects an integer or 'inf'");
           }
         },
         "Number of sites, or 'inf' for the thermodynamic limit");
}

void add_alpha_option(CLI::App* sub, RunConfig& c) {
  sub->add_option_function<std::string>(
         "--alpha",
         [&c](const std::string& text) {
           if (text == "inf") {
             c.alpha = kAlphaInf;
             return;
           }
           try {
             std::size_t used = 0;
             const double value = std::stod(text, &used);
             if (used != text.size()) throw std::invalid_argument(text);
             c.alpha = value;
           } catch (const std::exception&) {
             throw CLI::ValidationError("--alpha",
                                        "expects a number or 'inf'");
           }
         },
         "Coupling exponent, or 'inf' for nearest-neighbor only");
}

void add_chain_options(CLI::App* sub, RunConfig& c) {
  add_sites_option(sub, c);
  sub->add_option("--spin2", c.spin2, "Twice the spin length (2S)");
  add_alpha_option(sub, c);
  sub->add_option("--j0", c.j0, "Coupling strength");
  sub->add_option("--b", c.b, "Transverse field");
  sub->add_option("--boundary", c.boundary,
                  "open | periodic (default: open, except the ring commands)")
      ->check(CLI::IsMember({"open", "periodic"}));
  sub->add_flag("--kac", c.kac, "Rescale the coupling by 1/N");
}

void add_grid_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--b-min", c.b_min, "Field grid start");
  sub->add_option("--b-max", c.b_max, "Field grid end");
  sub->add_option("--b-steps", c.b_steps, "Field grid point count");
  sub->add_flag("--log", c.log_scale, "Logarithmic field grid");
}

void add_output_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--output-dir", c.output_dir,
                  "Output directory, or '-' for stdout");
  sub->add_option("--format", c.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--raw-units", c.raw_units,
                "Report energies as computed instead of in |j0|");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sub->add_option("--config", "JSON config file (flags override its values)");
}

std::string config_path_from_argv(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  SpecialArgs special;

  CLI::App app{"Spin-chain spectra, mean-field levels, and spin-wave bands"};
  app.require_subcommand(1);
  app.add_flag_callback(
      "--version",
      [] {
        std::cout << kVersion << '\n';
        throw CLI::Success{};
      },
      "Print the version and exit");
  app.add_flag_callback(
      "--seed-info",
      [] {
        std::cout << "rng: none; every output is deterministic for a fixed "
                     "config\n";
        throw CLI::Success{};
      },
      "Describe the random-number usage and exit");

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Exact spectrum at a fixed field");
  add_chain_options(spectrum, config);
  spectrum->add_option("--dim-budget", config.dim_budget,
                       "Largest accepted Hilbert dimension");
  add_output_options(spectrum, config);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Exact spectrum over a field grid");
  add_chain_options(sweep, config);
  add_grid_options(sweep, config);
  sweep->add_option("--dim-budget", config.dim_budget,
                    "Largest accepted Hilbert dimension");
  add_output_options(sweep, config);

  CLI::App* semiclassical = app.add_subcommand(
      "semiclassical", "Extremal branch energies of the configuration classes");
  add_chain_options(semiclassical, config);
  add_grid_options(semiclassical, config);
  semiclassical
      ->add_option("--mode", config.mode, "eps | epsxi | full")
      ->check(CLI::IsMember({"eps", "epsxi", "full"}));
  semiclassical->add_flag("--reduce-flip", config.reduce_flip,
                          "One configuration per global-flip orbit");
  semiclassical->add_flag("--reduce-mirror", config.reduce_mirror,
                          "One configuration per mirror orbit");
  semiclassical->add_option("--enum-budget", config.enum_budget,
                            "Largest accepted configuration count");
  add_output_options(semiclassical, config);

  CLI::App* dispersion =
      app.add_subcommand("dispersion", "Spin-wave band over the momentum grid");
  add_chain_options(dispersion, config);
  dispersion->add_option("--kind", config.kind, "uniform | alternating")
      ->check(CLI::IsMember({"uniform", "alternating"}));
  dispersion->add_option("--inf-points", config.inf_points,
                         "Momentum samples in the thermodynamic limit");
  add_output_options(dispersion, config);

  CLI::App* gap =
      app.add_subcommand("gap", "Soft-mode gap across a field grid");
  add_chain_options(gap, config);
  add_grid_options(gap, config);
  gap->add_option("--kind", config.kind, "uniform | alternating")
      ->check(CLI::IsMember({"uniform", "alternating"}));
  add_output_options(gap, config);

  CLI::App* bifurcations = app.add_subcommand(
      "bifurcations", "Log-binned histogram of bifurcation fields");
  add_chain_options(bifurcations, config);
  bifurcations->add_option("--bins-per-decade", config.bins_per_decade,
                           "Histogram resolution");
  bifurcations->add_flag("--include-unstable", config.include_unstable,
                         "Count mixed-sign classes too");
  bifurcations->add_option("--enum-budget", config.enum_budget,
                           "Largest accepted configuration count");
  add_output_options(bifurcations, config);

  CLI::App* deviation = app.add_subcommand(
      "deviation", "Relative gap between variational and exact ground energy");
  add_chain_options(deviation, config);
  add_grid_options(deviation, config);
  deviation->add_option("--dim-budget", config.dim_budget,
                        "Largest accepted Hilbert dimension");
  deviation->add_option("--enum-budget", config.enum_budget,
                        "Largest accepted configuration count");
  add_output_options(deviation, config);

  CLI::App* sublattice_cmd = app.add_subcommand(
      "sublattice", "Two-sublattice Bogoliubov bands on the reduced zone");
  add_chain_options(sublattice_cmd, config);
  sublattice_cmd->add_option("--phi-b0", config.phi_b0,
                             "Newton seed for the first sublattice angle");
  sublattice_cmd->add_option("--phi-c0", config.phi_c0,
                             "Newton seed for the second sublattice angle");
  sublattice_cmd->add_option("--newton-tol", config.newton_tol,
                             "Stationarity residual target");
  sublattice_cmd->add_option("--max-iter", config.max_iter,
                             "Newton iteration cap");
  sublattice_cmd->add_option("--inf-points", config.inf_points,
                             "Momentum samples in the thermodynamic limit");
  add_output_options(sublattice_cmd, config);

  CLI::App* special_cmd =
      app.add_subcommand("special", "Print zeta / eta / lattice-sum values");
  special_cmd->add_option("--zeta", special.zeta, "zeta(s) for each argument");
  special_cmd->add_option("--eta", special.eta, "eta(s) for each argument");
  special_cmd->add_option("--clausen", special.clausen,
                          "Clausen-type sum; takes alpha and k")
      ->expected(2);
  special_cmd->add_option("--sites", special.sites,
                          "Ring size for --clausen, or 'inf'");

  try {
    const std::string config_path = config_path_from_argv(argc, argv);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw std::invalid_argument("cannot read config file: " + config_path);
      config_from_json(config, json::parse(in));
    }

    app.parse(argc, argv);

    if (spectrum->parsed()) run_spectrum(config);
    if (sweep->parsed()) run_sweep(config);
    if (semiclassical->parsed()) run_semiclassical(config);
    if (dispersion->parsed()) run_dispersion(config);
    if (gap->parsed()) run_gap(config);
    if (bifurcations->parsed()) run_bifurcations(config);
    if (deviation->parsed()) run_deviation(config);
    if (sublattice_cmd->parsed()) run_sublattice(config);
    if (special_cmd->parsed()) run_special(special);
    return 0;
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const BudgetError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 4;
  } catch (const json::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 3;
  }
}
