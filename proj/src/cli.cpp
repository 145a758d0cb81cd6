#include "multicopy/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multicopy/analytic.hpp"
#include "multicopy/fitkit.hpp"
#include "multicopy/io.hpp"
#include "multicopy/loss_scan.hpp"
#include "multicopy/montecarlo.hpp"
#include "multicopy/netsim.hpp"

namespace multicopy::cli {

namespace {

using nlohmann::json;

/// Stdout when `path` is empty.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot write '" + path + "'");
    }
  }

  std::ostream& stream() { return file_ ? *file_ : std::cout; }

  void close() {
    stream().flush();
    if (file_) {
      file_->close();
      if (!*file_) throw IoError("error writing '" + path_ + "'");
    }
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

json real_json(double v) {
  // JSON has no infinity; non-finite values are written as their CSV text.
  if (std::isfinite(v)) return v;
  return io::format_real(v);
}

struct SweepArgs {
  std::string config;
  std::string out;
  int workers = 0;
};

void cmd_sweep(const SweepArgs& args) {
  const auto configs = io::sweeps_from_json(io::read_json_file(args.config));
  std::vector<std::vector<SnrStats>> results;
  for (const auto& c : configs) results.push_back(montecarlo::run_sweep(c, args.workers));
  Output out(args.out);
  io::write_csv_header(out.stream());
  for (std::size_t i = 0; i < configs.size(); ++i)
    io::write_csv_rows(out.stream(), configs[i], results[i]);
  out.close();
}

struct AnalyticArgs {
  double x0 = 0.5;
  double r0 = 2.0;
  double sigma_r = 0.5;
  double sigma_thermal = 0.0;
  int n_min = 2;
  int n_max = 1000;
  std::string out;
};

void cmd_analytic(const AnalyticArgs& args) {
  InputEnsembleSpec spec;
  spec.x0 = args.x0;
  spec.r0 = args.r0;
  spec.sigma_r = args.sigma_r;
  spec.sigma_thermal = args.sigma_thermal;
  validate_spec(spec);
  if (args.n_min < 1) throw ValidationError("n-min must be >= 1");
  if (args.n_max < args.n_min) throw ValidationError("n-max < n-min");

  const auto input = analytic::input_copy_stats(spec.x0, spec.r0, spec.sigma_r);
  Output out(args.out);
  std::ostream& os = out.stream();
  os << "N,snr_classical,snr_stable,mean_snr_approx,mean_snr_asymptotic,gir_approx,"
        "gir_asymptotic,input_mean,input_std,input_stability\n";
  for (int n = args.n_min; n <= args.n_max; ++n) {
    os << n << ',' << io::format_real(analytic::snr_classical(n, spec.x0, spec.sigma_thermal))
       << ',' << io::format_real(analytic::snr_stable_squeezed(n, spec.x0, spec.r0)) << ','
       << io::format_real(analytic::mean_snr_approx(n, spec.x0, spec.r0, spec.sigma_r)) << ','
       << io::format_real(analytic::mean_snr_asymptotic(n, spec.x0, spec.r0, spec.sigma_r))
       << ',' << io::format_real(analytic::gir_approx(n, spec.sigma_r)) << ','
       << io::format_real(analytic::gir_asymptotic(n, spec.sigma_r)) << ','
       << io::format_real(input.mean) << ',' << io::format_real(input.std_dev) << ','
       << io::format_real(input.stability_ratio) << '\n';
  }
  out.close();
}

struct FitArgs {
  std::string csv;
  std::string column = "mean_snr";
  int n_min = 1;
  int n_max = 1 << 30;
  std::string arch;
  std::string out;
};

json cmd_fit_report(const FitArgs& args) {
  if (args.n_max < args.n_min) throw ValidationError("n-max < n-min");
  const io::CsvTable table = io::read_csv_file(args.csv);
  const std::size_t col = table.column(args.column);
  const std::size_t n_col = table.column("N");
  const bool grouped = table.has_column("arch");
  const std::size_t arch_col = grouped ? table.column("arch") : 0;

  // Insertion order of architectures as they appear in the file.
  std::vector<std::string> order;
  std::map<std::string, std::vector<fitkit::FitPoint>> groups;
  for (const auto& row : table.rows) {
    const std::string arch = grouped ? row[arch_col] : std::string();
    if (!args.arch.empty() && arch != args.arch) continue;
    const double n = io::parse_real(row[n_col]);
    if (n < args.n_min || n > args.n_max) continue;
    if (!groups.count(arch)) order.push_back(arch);
    groups[arch].push_back({n, io::parse_real(row[col])});
  }
  if (order.empty()) throw ValidationError("no rows selected for fitting");

  // A group that cannot be fitted (e.g. infinite GIR) is reported, not fatal,
  // unless no group can be fitted.
  json fits = json::array();
  std::string last_error;
  std::size_t fitted = 0;
  for (const std::string& arch : order) {
    json entry;
    try {
      const PowerLawFit fit = fitkit::fit_power_law(groups[arch]);
      entry = {{"a", fit.a},
               {"b", fit.b},
               {"rms_log_residual", fit.rms_log_residual},
               {"n_points", fit.n_points}};
      ++fitted;
    } catch (const ValidationError& e) {
      last_error = e.what();
      entry = {{"error", last_error}};
    }
    if (grouped) entry["arch"] = arch;
    fits.push_back(entry);
  }
  if (fitted == 0) throw ValidationError(last_error);
  return {{"csv", args.csv},
          {"column", args.column},
          {"n_min", args.n_min},
          {"n_max", args.n_max},
          {"fits", fits}};
}

void write_json(const json& j, const std::string& path) {
  Output out(path);
  out.stream() << j.dump(2) << '\n';
  out.close();
}

struct OptimizeArgs {
  std::vector<int> ns;
  std::string out;
};

json cmd_optimize_report(const OptimizeArgs& args) {
  json rows = json::array();
  for (int n : args.ns) {
    const auto opt = fitkit::optimize_transmittance(n);
    rows.push_back({{"N", n},
                    {"t_star", opt.t_star},
                    {"one_minus_t_times_n", (1.0 - opt.t_star) * n},
                    {"displacement_ratio", opt.displacement_ratio}});
  }
  return rows;
}

struct LossScanArgs {
  std::vector<double> etas{0.9, 0.8, 0.6, 0.5};
  double x0 = 0.5;
  double r0 = 2.0;
  double sigma_r = 0.5;
  int n_min = 64;
  int n_max = 1024;
  int reps = 2000;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
};

json cmd_loss_scan_report(const LossScanArgs& args) {
  InputEnsembleSpec spec;
  spec.x0 = args.x0;
  spec.r0 = args.r0;
  spec.sigma_r = args.sigma_r;
  std::vector<int> grid;
  for (long long n = 1; n <= args.n_max; n *= 2)
    if (n >= args.n_min) grid.push_back(static_cast<int>(n));

  netsim::LossScanOptions options;
  options.reps = args.reps;
  options.master_seed = args.seed;
  options.workers = args.workers;

  json scans = json::array();
  for (double eta : args.etas) {
    const auto scan = netsim::loss_scaling_exponent(eta, grid, spec, options);
    json points = json::array();
    for (const SnrStats& s : scan.stats)
      points.push_back({{"N", s.n_copies},
                        {"mean_snr", real_json(s.mean_snr)},
                        {"std_snr", real_json(s.std_snr)},
                        {"gir", real_json(s.gir)}});
    scans.push_back({{"eta", eta},
                     {"a", scan.fit.a},
                     {"b", scan.fit.b},
                     {"predicted_b", scan.predicted_b},
                     {"rms_log_residual", scan.fit.rms_log_residual},
                     {"points", points}});
  }
  return {{"spec", io::spec_to_json(spec)},
          {"reps", args.reps},
          {"master_seed", args.seed},
          {"scans", scans}};
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Multicopy interference simulator"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep from a JSON config, CSV out");
  sweep_cmd->add_option("--config", sweep.config, "JSON config")->required();
  sweep_cmd->add_option("--out", sweep.out, "CSV path (default stdout)");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker cap (0 = OpenMP default)");

  AnalyticArgs analytic;
  auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form curves over N, CSV out");
  analytic_cmd->add_option("--x0", analytic.x0);
  analytic_cmd->add_option("--r0", analytic.r0);
  analytic_cmd->add_option("--sigma-r", analytic.sigma_r);
  analytic_cmd->add_option("--sigma-thermal", analytic.sigma_thermal);
  analytic_cmd->add_option("--n-min", analytic.n_min);
  analytic_cmd->add_option("--n-max", analytic.n_max);
  analytic_cmd->add_option("--out", analytic.out, "CSV path (default stdout)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Power-law fit a*N^b of a CSV column, JSON out");
  fit_cmd->add_option("csv", fit.csv, "Input CSV")->required();
  fit_cmd->add_option("--column", fit.column, "Column to fit");
  fit_cmd->add_option("--n-min", fit.n_min);
  fit_cmd->add_option("--n-max", fit.n_max);
  fit_cmd->add_option("--arch", fit.arch, "Only rows with this arch tag");
  fit_cmd->add_option("--out", fit.out, "JSON path (default stdout)");

  OptimizeArgs optimize;
  auto* optimize_cmd = app.add_subcommand("optimize-t", "Optimal fixed-loop transmittance, JSON out");
  optimize_cmd->add_option("n", optimize.ns, "Copy numbers")->required();
  optimize_cmd->add_option("--out", optimize.out, "JSON path (default stdout)");

  LossScanArgs loss;
  auto* loss_cmd = app.add_subcommand("loss-scan", "Mean-SNR exponent of the lossy pyramid, JSON out");
  loss_cmd->add_option("--eta", loss.etas, "Loss transmittances");
  loss_cmd->add_option("--x0", loss.x0);
  loss_cmd->add_option("--r0", loss.r0);
  loss_cmd->add_option("--sigma-r", loss.sigma_r);
  loss_cmd->add_option("--n-min", loss.n_min);
  loss_cmd->add_option("--n-max", loss.n_max);
  loss_cmd->add_option("--reps", loss.reps);
  loss_cmd->add_option("--seed", loss.seed);
  loss_cmd->add_option("--workers", loss.workers);
  loss_cmd->add_option("--out", loss.out, "JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sweep_cmd) cmd_sweep(sweep);
    if (*analytic_cmd) cmd_analytic(analytic);
    if (*fit_cmd) write_json(cmd_fit_report(fit), fit.out);
    if (*optimize_cmd) write_json(cmd_optimize_report(optimize), optimize.out);
    if (*loss_cmd) write_json(cmd_loss_scan_report(loss), loss.out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace multicopy::cli
