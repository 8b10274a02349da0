// Command-line front end for the sequence-detection library.
//
// Subcommands: bounds, extremal, calibrate, power, radius, rates, batch.
// Every report embeds the exact configuration that produced it plus the
// library version and RNG generator identity; reruns with identical flags
// are byte-identical.  Row-oriented results (power, radius, rates) stream
// as CSV — to --output when given, else to stdout — followed by a JSON
// summary on stdout; single-record results honor --format json|csv.
//
// Exit codes: 0 success, 1 usage, 2 infeasible problem, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqdetect/analysis.hpp"
#include "seqdetect/errors.hpp"
#include "seqdetect/extremal.hpp"
#include "seqdetect/version.hpp"

namespace sd = seqdetect;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Formatting helpers
// ---------------------------------------------------------------------------

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out += c;
    }
  }
  out += "\"";
  return out;
}

const char* bool_str(bool v) { return v ? "true" : "false"; }

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct CommonConfig final {
  std::string family = "mild";
  double s = 1.0;
  double t = 1.0;
  double eps = 0.01;
  double alpha = 0.05;
  double beta = 0.05;
  std::size_t truncation = 0;  // 0 = grow until the optimum is interior
  std::size_t mc_samples = 100000;
  std::size_t cal_samples = 200000;
  std::uint64_t seed = sd::kDefaultSeed;
  std::string format = "json";
  std::string output;
};

void add_common_flags(CLI::App* cmd, CommonConfig& cfg) {
  cmd->add_option("--family", cfg.family,
                  "Problem family: direct, mild, or severe")
      ->check(CLI::IsMember({"direct", "mild", "severe"}))
      ->capture_default_str();
  cmd->add_option("--s", cfg.s, "Smoothness exponent (a_j = j^s)")
      ->capture_default_str();
  cmd->add_option("--t", cfg.t, "Operator decay exponent")
      ->capture_default_str();
  cmd->add_option("--eps", cfg.eps, "Noise level")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "Type-I error budget")
      ->capture_default_str();
  cmd->add_option("--beta", cfg.beta, "Type-II error budget")
      ->capture_default_str();
  cmd->add_option("--truncation", cfg.truncation,
                  "Working truncation N (0 = grow until interior optimum)")
      ->capture_default_str();
  cmd->add_option("--mc-samples", cfg.mc_samples,
                  "Monte-Carlo replicates per estimate")
      ->capture_default_str();
  cmd->add_option("--cal-samples", cfg.cal_samples,
                  "Monte-Carlo calibration sample count")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Base RNG seed")->capture_default_str();
  cmd->add_option("--format", cfg.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--output", cfg.output,
                  "Write row output to this file (summaries stay on stdout)");
}

sd::FamilyPreset parse_family(const std::string& name) {
  if (name == "direct") {
    return sd::FamilyPreset::kDirect;
  }
  if (name == "mild") {
    return sd::FamilyPreset::kMild;
  }
  return sd::FamilyPreset::kSevere;
}

sd::ErrorBudget budget_of(const CommonConfig& cfg) {
  sd::ErrorBudget budget;
  budget.alpha = cfg.alpha;
  budget.beta = cfg.beta;
  budget.validate();
  return budget;
}

// Resolve the working truncation: honor an explicit --truncation (raised to
// min_n), otherwise grow N geometrically until `binding` reports the
// optimum is interior.  Exponential families start smaller so partial sums
// stay inside double range.
template <typename Binding>
sd::ProblemSpec resolve_spec(const CommonConfig& cfg, std::size_t min_n,
                             Binding binding) {
  const sd::FamilyPreset preset = parse_family(cfg.family);
  if (cfg.truncation > 0) {
    if (cfg.truncation < min_n) {
      throw std::invalid_argument(
          "--truncation is smaller than the bandwidth this run needs");
    }
    return sd::make_preset_spec(preset, cfg.s, cfg.t, cfg.eps, cfg.truncation);
  }
  constexpr std::size_t kCap = 1000000;
  std::size_t n = preset == sd::FamilyPreset::kSevere ? 32 : 256;
  n = std::max(n, min_n);
  for (;;) {
    sd::ProblemSpec spec =
        sd::make_preset_spec(preset, cfg.s, cfg.t, cfg.eps, n);
    if (!binding(spec) || n >= kCap) {
      return spec;
    }
    n = std::min(n * 4, kCap);
  }
}

sd::CalibrationRequest calibration_request(const CommonConfig& cfg,
                                           const std::string& kind) {
  sd::CalibrationRequest request;
  request.kind = kind == "gaussian" ? sd::CalibrationKind::kGaussian
                                    : sd::CalibrationKind::kMonteCarlo;
  request.samples = cfg.cal_samples;
  request.seed = cfg.seed;
  request.stream = 0;
  return request;
}

// ---------------------------------------------------------------------------
// JSON building blocks
// ---------------------------------------------------------------------------

ordered_json config_json(const CommonConfig& cfg, const char* subcommand) {
  ordered_json j;
  j["subcommand"] = subcommand;
  j["family"] = cfg.family;
  j["s"] = cfg.s;
  j["t"] = cfg.t;
  j["eps"] = cfg.eps;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["truncation"] = cfg.truncation;
  j["mc_samples"] = cfg.mc_samples;
  j["cal_samples"] = cfg.cal_samples;
  j["seed"] = cfg.seed;
  j["format"] = cfg.format;
  return j;
}

ordered_json envelope(const CommonConfig& cfg, const char* subcommand) {
  ordered_json j;
  j["version"] = sd::kVersion;
  j["generator"] = sd::kGeneratorId;
  j["config"] = config_json(cfg, subcommand);
  return j;
}

ordered_json power_json(const sd::PowerEstimate& p) {
  ordered_json j;
  j["probability"] = p.probability;
  j["half_width"] = p.half_width;
  j["samples"] = p.samples;
  j["seed"] = p.seed;
  j["stream"] = p.stream;
  return j;
}

ordered_json calibration_json(const sd::CalibrationInfo& info) {
  ordered_json j;
  j["kind"] = sd::to_string(info.kind);
  j["alpha"] = info.alpha;
  j["threshold"] = info.threshold;
  j["samples"] = info.samples;
  j["seed"] = info.seed;
  j["stream"] = info.stream;
  return j;
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

struct Sink final {
  std::ofstream file;
  std::ostream* rows = &std::cout;
  bool to_file = false;

  explicit Sink(const CommonConfig& cfg) {
    if (!cfg.output.empty()) {
      file.open(cfg.output, std::ios::binary);
      if (!file) {
        throw std::invalid_argument("cannot open output file: " + cfg.output);
      }
      rows = &file;
      to_file = true;
    }
  }

  // Summaries always land on stdout; when rows also went to stdout, a blank
  // line separates the two sections.
  void summary(const ordered_json& j) const {
    if (!to_file) {
      std::cout << "\n";
    }
    std::cout << j.dump(2) << "\n";
  }
};

void emit_single(const Sink& sink, const ordered_json& document) {
  *sink.rows << document.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Subcommand payloads
// ---------------------------------------------------------------------------

std::string common_csv_header() {
  return "family,s,t,eps,alpha,beta,truncation,mc_samples,cal_samples,seed,"
         "version,generator";
}

std::string common_csv_row(const CommonConfig& cfg) {
  std::ostringstream row;
  row << cfg.family << ',' << fmt(cfg.s) << ',' << fmt(cfg.t) << ','
      << fmt(cfg.eps) << ',' << fmt(cfg.alpha) << ',' << fmt(cfg.beta) << ','
      << cfg.truncation << ',' << cfg.mc_samples << ',' << cfg.cal_samples
      << ',' << cfg.seed << ',' << sd::kVersion << ',' << sd::kGeneratorId;
  return row.str();
}

int cmd_bounds(const CommonConfig& cfg) {
  const sd::ErrorBudget budget = budget_of(cfg);
  const sd::ProblemSpec spec =
      resolve_spec(cfg, 2, [&](const sd::ProblemSpec& sp) {
        return sd::lower_radius(sp, budget).truncation_binding ||
               sd::upper_radius(sp, budget).truncation_binding;
      });
  const sd::BoundsReport report = sd::bounds_report(spec, budget);

  const Sink sink(cfg);
  if (cfg.format == "csv") {
    *sink.rows << common_csv_header()
               << ",resolved_truncation,lower_radius_sq,upper_radius_sq,"
                  "lower_bandwidth,upper_bandwidth,c_constant,C_constant,"
                  "ratio,ratio_band_satisfied,truncation_binding\n";
    *sink.rows << common_csv_row(cfg) << ',' << spec.truncation << ','
               << fmt(report.lower_radius_sq) << ','
               << fmt(report.upper_radius_sq) << ',' << report.lower_bandwidth
               << ',' << report.upper_bandwidth << ',' << fmt(report.c_const)
               << ',' << fmt(report.C_const) << ',' << fmt(report.ratio) << ','
               << bool_str(report.ratio_band_satisfied) << ','
               << bool_str(report.truncation_binding) << "\n";
    return 0;
  }

  ordered_json j = envelope(cfg, "bounds");
  j["resolved_truncation"] = spec.truncation;
  ordered_json b;
  b["lower_radius_sq"] = report.lower_radius_sq;
  b["upper_radius_sq"] = report.upper_radius_sq;
  b["lower_bandwidth"] = report.lower_bandwidth;
  b["upper_bandwidth"] = report.upper_bandwidth;
  b["c_constant"] = report.c_const;
  b["C_constant"] = report.C_const;
  b["ratio"] = report.ratio;
  b["ratio_band_satisfied"] = report.ratio_band_satisfied;
  b["truncation_binding"] = report.truncation_binding;
  j["bounds"] = b;
  emit_single(sink, j);
  return 0;
}

struct ExtremalOpts final {
  double radius = 0.0;
  bool dump_theta = false;
};

int cmd_extremal(const CommonConfig& cfg, const ExtremalOpts& opts) {
  const sd::ProblemSpec spec =
      resolve_spec(cfg, 2, [&](const sd::ProblemSpec& sp) {
        return sd::solve_extremal(sp, opts.radius).truncation_binding;
      });
  const sd::ExtremalSolution sol = sd::solve_extremal(spec, opts.radius);
  const double u =
      spec.noise > 0.0 ? sd::u_of_r(spec, opts.radius) : 0.0;

  const Sink sink(cfg);
  if (cfg.format == "csv") {
    if (opts.dump_theta) {
      *sink.rows << "j,theta\n";
      for (std::size_t j = 1; j <= sol.theta_bar.size(); ++j) {
        *sink.rows << j << ',' << fmt(sol.theta_bar[j - 1]) << "\n";
      }
      ordered_json summary = envelope(cfg, "extremal");
      summary["radius"] = opts.radius;
      summary["u"] = u;
      summary["efficient_dim"] = sol.efficient_dim;
      sink.summary(summary);
      return 0;
    }
    *sink.rows << common_csv_header()
               << ",resolved_truncation,radius,r_sq,lagrange_multiplier,"
                  "z0_sq,efficient_dim,u,j0,j1,j2,energy_residual,"
                  "ellipsoid_residual,ellipsoid_active,truncation_binding\n";
    *sink.rows << common_csv_row(cfg) << ',' << spec.truncation << ','
               << fmt(opts.radius) << ',' << fmt(sol.r_sq) << ','
               << fmt(sol.lagrange_multiplier) << ',' << fmt(sol.z0_sq) << ','
               << sol.efficient_dim << ',' << fmt(u) << ',' << fmt(sol.j0)
               << ',' << fmt(sol.j1) << ',' << fmt(sol.j2) << ','
               << fmt(sol.energy_residual) << ',' << fmt(sol.ellipsoid_residual)
               << ',' << bool_str(sol.ellipsoid_active) << ','
               << bool_str(sol.truncation_binding) << "\n";
    return 0;
  }

  ordered_json j = envelope(cfg, "extremal");
  j["resolved_truncation"] = spec.truncation;
  ordered_json e;
  e["radius"] = opts.radius;
  e["r_sq"] = sol.r_sq;
  e["lagrange_multiplier"] = sol.lagrange_multiplier;
  e["z0_sq"] = sol.z0_sq;
  e["efficient_dim"] = sol.efficient_dim;
  e["u"] = u;
  e["j0"] = sol.j0;
  e["j1"] = sol.j1;
  e["j2"] = sol.j2;
  e["energy_residual"] = sol.energy_residual;
  e["ellipsoid_residual"] = sol.ellipsoid_residual;
  e["ellipsoid_active"] = sol.ellipsoid_active;
  e["truncation_binding"] = sol.truncation_binding;
  if (opts.dump_theta) {
    e["theta"] = sol.theta_bar;
  }
  j["extremal"] = e;
  emit_single(sink, j);
  return 0;
}

struct CalibrateOpts final {
  std::string test = "spectral";
  std::size_t bandwidth = 0;
  double radius = 0.0;
  std::string calibration = "mc";
};

int cmd_calibrate(const CommonConfig& cfg, const CalibrateOpts& opts) {
  const sd::CalibrationRequest request =
      calibration_request(cfg, opts.calibration);

  ordered_json j = envelope(cfg, "calibrate");
  ordered_json payload;
  sd::CalibrationInfo info;
  std::size_t resolved_truncation = 0;

  if (opts.test == "spectral") {
    if (opts.bandwidth < 1) {
      throw std::invalid_argument(
          "calibrate --test spectral needs --bandwidth >= 1");
    }
    const sd::ProblemSpec spec = resolve_spec(
        cfg, opts.bandwidth, [](const sd::ProblemSpec&) { return false; });
    const sd::SpectralTest test =
        sd::calibrate_spectral(spec, opts.bandwidth, cfg.alpha, request);
    info = test.calibration;
    resolved_truncation = spec.truncation;
    payload["test"] = "spectral";
    payload["bandwidth"] = test.bandwidth;
  } else {
    if (!(opts.radius > 0.0)) {
      throw std::invalid_argument(
          "calibrate --test ingster needs --radius > 0");
    }
    const sd::ProblemSpec spec =
        resolve_spec(cfg, 2, [&](const sd::ProblemSpec& sp) {
          return sd::solve_extremal(sp, opts.radius).truncation_binding;
        });
    const sd::IngsterTest test =
        sd::build_ingster(spec, opts.radius, cfg.alpha, request);
    info = test.calibration;
    resolved_truncation = spec.truncation;
    payload["test"] = "ingster";
    payload["radius"] = test.radius;
    payload["efficient_dim"] = test.efficient_dim;
    payload["u"] = test.u;
  }

  const Sink sink(cfg);
  if (cfg.format == "csv") {
    *sink.rows << common_csv_header()
               << ",resolved_truncation,test,bandwidth,radius,calibration,"
                  "threshold,cal_stream\n";
    *sink.rows << common_csv_row(cfg) << ',' << resolved_truncation << ','
               << opts.test << ',' << opts.bandwidth << ',' << fmt(opts.radius)
               << ',' << sd::to_string(info.kind) << ',' << fmt(info.threshold)
               << ',' << info.stream << "\n";
    return 0;
  }

  j["resolved_truncation"] = resolved_truncation;
  payload["calibration"] = calibration_json(info);
  j["calibrate"] = payload;
  emit_single(sink, j);
  return 0;
}

struct PowerOpts final {
  std::string test = "ingster";
  double radius = -1.0;
  std::size_t bandwidth = 0;
  std::string calibration = "mc";
};

int cmd_power(const CommonConfig& cfg, const PowerOpts& opts) {
  if (!(opts.radius >= 0.0)) {
    throw std::invalid_argument("power needs --radius >= 0");
  }
  const sd::ErrorBudget budget = budget_of(cfg);
  const sd::CalibrationRequest request =
      calibration_request(cfg, opts.calibration);

  const auto binding = [&](const sd::ProblemSpec& sp) {
    if (opts.radius > 0.0) {
      return sd::solve_extremal(sp, opts.radius).truncation_binding;
    }
    return sd::lower_radius(sp, budget).truncation_binding ||
           sd::upper_radius(sp, budget).truncation_binding;
  };

  sd::AnyTest test{std::in_place_type<sd::SpectralTest>};
  std::size_t resolved_truncation = 0;
  ordered_json test_info;
  if (opts.test == "spectral") {
    const sd::ProblemSpec spec =
        resolve_spec(cfg, std::max<std::size_t>(opts.bandwidth, 2), binding);
    std::size_t bandwidth = opts.bandwidth;
    if (bandwidth == 0) {
      if (!(opts.radius > 0.0)) {
        throw std::invalid_argument(
            "power --test spectral needs --bandwidth when --radius is 0");
      }
      bandwidth = sd::select_bandwidth(spec, opts.radius, 1.0);
    }
    const sd::SpectralTest spectral =
        sd::calibrate_spectral(spec, bandwidth, cfg.alpha, request);
    test_info["test"] = "spectral";
    test_info["bandwidth"] = spectral.bandwidth;
    test_info["calibration"] = calibration_json(spectral.calibration);
    resolved_truncation = spec.truncation;
    test = spectral;
  } else {
    if (!(opts.radius > 0.0)) {
      throw std::invalid_argument("power --test ingster needs --radius > 0");
    }
    const sd::ProblemSpec spec = resolve_spec(cfg, 2, binding);
    const sd::IngsterTest ingster =
        sd::build_ingster(spec, opts.radius, cfg.alpha, request);
    test_info["test"] = "ingster";
    test_info["efficient_dim"] = ingster.efficient_dim;
    test_info["u"] = ingster.u;
    test_info["calibration"] = calibration_json(ingster.calibration);
    resolved_truncation = spec.truncation;
    test = ingster;
  }
  const sd::ProblemSpec& spec = sd::test_spec(test);

  sd::McOptions size_options;
  size_options.samples = cfg.mc_samples;
  size_options.seed = cfg.seed;
  size_options.stream = 1;
  const sd::PowerEstimate size = sd::estimate_size(test, size_options);

  sd::AdversarySet candidates;
  if (opts.radius > 0.0) {
    candidates = sd::default_adversaries(spec, budget, opts.radius);
  } else {
    candidates.push_back(sd::make_prior(spec, {}, 0.0, "null signal"));
  }
  sd::McOptions beta_options = size_options;
  beta_options.stream = 2;
  const sd::BetaEstimate beta =
      sd::estimate_beta(test, candidates, beta_options);

  // Worst type-II error among class members only; out-of-class candidates
  // are diagnostic rows, not minimax evidence.
  std::size_t worst_in_class = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].in_class) {
      continue;
    }
    if (worst_in_class == candidates.size() ||
        beta.per_candidate[i].probability >
            beta.per_candidate[worst_in_class].probability) {
      worst_in_class = i;
    }
  }

  const Sink sink(cfg);
  if (cfg.format == "csv") {
    *sink.rows << "candidate,description,in_class,declared_radius,beta_hat,"
                  "half_width,samples,seed,stream\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const sd::PowerEstimate& est = beta.per_candidate[i];
      *sink.rows << i << ',' << csv_escape(candidates[i].description) << ','
                 << bool_str(candidates[i].in_class) << ','
                 << fmt(candidates[i].declared_radius) << ','
                 << fmt(est.probability) << ',' << fmt(est.half_width) << ','
                 << est.samples << ',' << est.seed << ',' << est.stream
                 << "\n";
    }
    ordered_json summary = envelope(cfg, "power");
    summary["resolved_truncation"] = resolved_truncation;
    summary["test"] = test_info;
    summary["size"] = power_json(size);
    summary["worst_index"] = beta.worst_index;
    summary["worst_beta"] = power_json(beta.worst);
    if (worst_in_class < candidates.size()) {
      summary["worst_in_class_index"] = worst_in_class;
      summary["worst_in_class_beta"] =
          power_json(beta.per_candidate[worst_in_class]);
    }
    sink.summary(summary);
    return 0;
  }

  ordered_json j = envelope(cfg, "power");
  j["resolved_truncation"] = resolved_truncation;
  j["test"] = test_info;
  j["size"] = power_json(size);
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ordered_json row;
    row["candidate"] = i;
    row["description"] = candidates[i].description;
    row["in_class"] = candidates[i].in_class;
    row["declared_radius"] = candidates[i].declared_radius;
    row["beta"] = power_json(beta.per_candidate[i]);
    rows.push_back(row);
  }
  j["candidates"] = rows;
  j["worst_index"] = beta.worst_index;
  j["worst_beta"] = power_json(beta.worst);
  if (worst_in_class < candidates.size()) {
    j["worst_in_class_index"] = worst_in_class;
    j["worst_in_class_beta"] = power_json(beta.per_candidate[worst_in_class]);
  }
  emit_single(sink, j);
  return 0;
}

struct RadiusOpts final {
  std::string test = "ingster";
  std::size_t bandwidth = 0;
};

int cmd_radius(const CommonConfig& cfg, const RadiusOpts& opts) {
  const sd::ErrorBudget budget = budget_of(cfg);
  const sd::ProblemSpec spec =
      resolve_spec(cfg, std::max<std::size_t>(opts.bandwidth, 2),
                   [&](const sd::ProblemSpec& sp) {
                     return sd::lower_radius(sp, budget).truncation_binding ||
                            sd::upper_radius(sp, budget).truncation_binding;
                   });
  const sd::CalibrationRequest request = calibration_request(cfg, "mc");

  sd::TestBuilder builder;
  if (opts.test == "spectral") {
    if (opts.bandwidth < 1) {
      throw std::invalid_argument(
          "radius --test spectral needs --bandwidth >= 1");
    }
    builder = [&, request](double) {
      return sd::AnyTest(
          sd::calibrate_spectral(spec, opts.bandwidth, cfg.alpha, request));
    };
  } else {
    builder = [&, request](double r) {
      return sd::AnyTest(sd::build_ingster(spec, r, cfg.alpha, request));
    };
  }

  sd::McOptions options;
  options.samples = cfg.mc_samples;
  options.seed = cfg.seed;
  options.stream = 1;
  const sd::EmpiricalRadius result =
      sd::empirical_radius(spec, budget, builder, options, 0.02);

  const Sink sink(cfg);
  if (cfg.format == "csv") {
    *sink.rows << "probe,radius,beta_hat,half_width\n";
    for (std::size_t i = 0; i < result.probes.size(); ++i) {
      const sd::RadiusProbe& p = result.probes[i];
      *sink.rows << i << ',' << fmt(p.radius) << ',' << fmt(p.beta_hat) << ','
                 << fmt(p.half_width) << "\n";
    }
  } else {
    ordered_json j = envelope(cfg, "radius");
    j["resolved_truncation"] = spec.truncation;
    j["test"] = opts.test;
    ordered_json probes = ordered_json::array();
    for (const sd::RadiusProbe& p : result.probes) {
      ordered_json row;
      row["radius"] = p.radius;
      row["beta_hat"] = p.beta_hat;
      row["half_width"] = p.half_width;
      probes.push_back(row);
    }
    j["probes"] = probes;
    j["radius"] = result.radius;
    j["bracket_lower"] = result.lower;
    j["bracket_upper"] = result.upper;
    j["bracket_found"] = result.bracket_found;
    emit_single(sink, j);
    return 0;
  }

  ordered_json summary = envelope(cfg, "radius");
  summary["resolved_truncation"] = spec.truncation;
  summary["test"] = opts.test;
  summary["radius"] = result.radius;
  summary["bracket_lower"] = result.lower;
  summary["bracket_upper"] = result.upper;
  summary["bracket_found"] = result.bracket_found;
  summary["probes"] = result.probes.size();
  sink.summary(summary);
  return 0;
}

struct RatesOpts final {
  std::string which = "lower";
  std::string eps_grid =
      "1e-2,3.1622776601683794e-03,1e-3,3.1622776601683794e-04,1e-4";
};

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      continue;
    }
    std::size_t pos = 0;
    const double value = std::stod(token, &pos);
    if (pos != token.size()) {
      throw std::invalid_argument("malformed --eps-grid entry: " + token);
    }
    grid.push_back(value);
  }
  if (grid.empty()) {
    throw std::invalid_argument("--eps-grid is empty");
  }
  return grid;
}

int cmd_rates(const CommonConfig& cfg, const RatesOpts& opts) {
  const sd::ErrorBudget budget = budget_of(cfg);
  sd::RateQuantity quantity = sd::RateQuantity::kLowerRadiusSq;
  if (opts.which == "upper") {
    quantity = sd::RateQuantity::kUpperRadiusSq;
  } else if (opts.which == "critical") {
    quantity = sd::RateQuantity::kCriticalRadius;
  }
  const std::vector<double> grid = parse_grid(opts.eps_grid);
  const sd::RateFit fit = sd::fit_rate(parse_family(cfg.family), cfg.s, cfg.t,
                                       budget, quantity, grid);
  const double expected =
      sd::expected_rate_slope(quantity, cfg.s, cfg.family == "direct" ? 0.0 : cfg.t);
  const bool pass = std::abs(fit.slope - expected) <= 0.05 * expected;

  const Sink sink(cfg);
  ordered_json verdict = envelope(cfg, "rates");
  verdict["which"] = opts.which;
  verdict["exponent_expected"] = expected;
  verdict["exponent_fitted"] = fit.slope;
  verdict["intercept"] = fit.intercept;
  verdict["max_residual"] = fit.max_residual;
  verdict["pass"] = pass;

  if (cfg.format == "csv") {
    *sink.rows << "eps,value,truncation\n";
    for (std::size_t i = 0; i < fit.eps_grid.size(); ++i) {
      *sink.rows << fmt(fit.eps_grid[i]) << ',' << fmt(fit.values[i]) << ','
                 << fit.truncations[i] << "\n";
    }
    sink.summary(verdict);
    return 0;
  }

  ordered_json points = ordered_json::array();
  for (std::size_t i = 0; i < fit.eps_grid.size(); ++i) {
    ordered_json row;
    row["eps"] = fit.eps_grid[i];
    row["value"] = fit.values[i];
    row["truncation"] = fit.truncations[i];
    points.push_back(row);
  }
  verdict["points"] = points;
  emit_single(sink, verdict);
  return 0;
}

int run_cli(const std::vector<std::string>& args, int depth);

struct BatchOpts final {
  std::string input;
};

int cmd_batch(const BatchOpts& opts, int depth) {
  if (depth > 0) {
    throw std::invalid_argument("batch files cannot contain batch commands");
  }
  std::ifstream file;
  std::istream* in = &std::cin;
  if (opts.input != "-") {
    file.open(opts.input);
    if (!file) {
      throw std::invalid_argument("cannot open batch file: " + opts.input);
    }
    in = &file;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    ordered_json parsed;
    try {
      parsed = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::invalid_argument("batch line " + std::to_string(line_no) +
                                  " is not valid JSON: " + e.what());
    }
    if (!parsed.is_array()) {
      throw std::invalid_argument("batch line " + std::to_string(line_no) +
                                  " must be a JSON array of argument strings");
    }
    std::vector<std::string> sub_args;
    for (const auto& item : parsed) {
      if (!item.is_string()) {
        throw std::invalid_argument("batch line " + std::to_string(line_no) +
                                    " must contain only strings");
      }
      sub_args.push_back(item.get<std::string>());
    }
    const int rc = run_cli(sub_args, depth + 1);
    if (rc != 0) {
      return rc;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

int run_cli_parsed(const std::vector<std::string>& args, int depth) {
  CLI::App app{
      "Minimax signal-detection workbench for the Gaussian sequence model"};
  app.require_subcommand(1);

  CommonConfig cfg;
  ExtremalOpts extremal_opts;
  CalibrateOpts calibrate_opts;
  PowerOpts power_opts;
  RadiusOpts radius_opts;
  RatesOpts rates_opts;
  BatchOpts batch_opts;

  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds", "Lower/upper separation-radius bounds and their bandwidths");
  add_common_flags(bounds_cmd, cfg);

  CLI::App* extremal_cmd = app.add_subcommand(
      "extremal", "Solve the hardest-signal problem at a given radius");
  add_common_flags(extremal_cmd, cfg);
  extremal_cmd->add_option("--radius", extremal_opts.radius, "Shell radius r")
      ->required();
  extremal_cmd->add_flag("--dump-theta", extremal_opts.dump_theta,
                         "Emit the extremal signal coordinates");

  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Calibrate a test threshold at level alpha");
  add_common_flags(calibrate_cmd, cfg);
  calibrate_cmd
      ->add_option("--test", calibrate_opts.test, "Test kind")
      ->check(CLI::IsMember({"spectral", "ingster"}))
      ->capture_default_str();
  calibrate_cmd->add_option("--bandwidth", calibrate_opts.bandwidth,
                            "Spectral cut-off D");
  calibrate_cmd->add_option("--radius", calibrate_opts.radius,
                            "Matched-filter design radius");
  calibrate_cmd
      ->add_option("--calibration", calibrate_opts.calibration,
                   "Threshold rule: mc or gaussian")
      ->check(CLI::IsMember({"mc", "gaussian"}))
      ->capture_default_str();

  CLI::App* power_cmd = app.add_subcommand(
      "power", "Empirical size and worst-case type-II error at a radius");
  add_common_flags(power_cmd, cfg);
  power_cmd->add_option("--test", power_opts.test, "Test kind")
      ->check(CLI::IsMember({"spectral", "ingster"}))
      ->capture_default_str();
  power_cmd->add_option("--radius", power_opts.radius, "Alternative radius r")
      ->required();
  power_cmd->add_option("--bandwidth", power_opts.bandwidth,
                        "Spectral cut-off (0 = bandwidth rule)");
  power_cmd
      ->add_option("--calibration", power_opts.calibration,
                   "Threshold rule: mc or gaussian")
      ->check(CLI::IsMember({"mc", "gaussian"}))
      ->capture_default_str();

  CLI::App* radius_cmd = app.add_subcommand(
      "radius", "Empirical separation radius by bisection on MC power");
  add_common_flags(radius_cmd, cfg);
  radius_cmd->add_option("--test", radius_opts.test, "Test kind")
      ->check(CLI::IsMember({"spectral", "ingster"}))
      ->capture_default_str();
  radius_cmd->add_option("--bandwidth", radius_opts.bandwidth,
                         "Spectral cut-off (fixed across probes)");

  CLI::App* rates_cmd = app.add_subcommand(
      "rates", "Fit log-log rate exponents over a noise grid");
  add_common_flags(rates_cmd, cfg);
  rates_cmd->add_option("--which", rates_opts.which, "Quantity to fit")
      ->check(CLI::IsMember({"lower", "upper", "critical"}))
      ->capture_default_str();
  rates_cmd
      ->add_option("--eps-grid", rates_opts.eps_grid,
                   "Comma-separated noise levels")
      ->capture_default_str();

  CLI::App* batch_cmd = app.add_subcommand(
      "batch", "Run one CLI invocation per line of a JSON-array file");
  batch_cmd
      ->add_option("--input", batch_opts.input,
                   "Batch file path, or - for stdin")
      ->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("seqdetect");
  for (const std::string& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (bounds_cmd->parsed()) {
    return cmd_bounds(cfg);
  }
  if (extremal_cmd->parsed()) {
    return cmd_extremal(cfg, extremal_opts);
  }
  if (calibrate_cmd->parsed()) {
    return cmd_calibrate(cfg, calibrate_opts);
  }
  if (power_cmd->parsed()) {
    return cmd_power(cfg, power_opts);
  }
  if (radius_cmd->parsed()) {
    return cmd_radius(cfg, radius_opts);
  }
  if (rates_cmd->parsed()) {
    return cmd_rates(cfg, rates_opts);
  }
  if (batch_cmd->parsed()) {
    return cmd_batch(batch_opts, depth);
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args, int depth) {
  try {
    return run_cli_parsed(args, depth);
  } catch (const sd::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const sd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, 0);
}
