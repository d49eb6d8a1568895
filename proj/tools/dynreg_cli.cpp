#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynreg/config.hpp"
#include "dynreg/envgen.hpp"
#include "dynreg/harness.hpp"
#include "dynreg/oracle.hpp"
#include "dynreg/plot.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kCellFailure = 2;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int write_run(const dynreg::ExperimentConfig& config, const std::vector<dynreg::RegretRecord>& records,
              const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "records.csv");
    dynreg::write_records_csv(out, records);
  }
  {
    auto out = open_out(dir / "timings.csv");
    dynreg::write_timings_csv(out, records);
  }
  if (config.traces) {
    for (const auto& r : records) {
      if (!r.ok()) continue;
      std::string file = r.cell;
      for (char& c : file) {
        if (c == '/' || c == '=') c = '_';
      }
      auto out = open_out(dir / "traces" / (file + ".csv"));
      dynreg::write_trace_csv(out, r);
    }
  }
  int failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "cell " << r.cell << " failed: " << r.status << '\n';
    }
  }
  std::cout << records.size() << " cells, " << failed << " failed, written to " << dir.string() << '\n';
  return failed == 0 ? kOk : kCellFailure;
}

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& out_dir, bool fit) {
  dynreg::ExperimentConfig config;
  try {
    config = dynreg::load_config(config_path);
  } catch (const dynreg::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  }
  const fs::path dir = out_dir ? *out_dir : config.output_dir;
  const auto records = dynreg::run_cells(config);
  int code = write_run(config, records, dir);
  if (!fit || records.empty()) return code;

  std::vector<dynreg::ScalingFit> fits;
  for (const auto& spec : config.algorithms) {
    try {
      fits.push_back(dynreg::fit_scaling_slope(records, spec.label));
    } catch (const dynreg::DomainError& e) {
      std::cerr << "no fit for " << spec.label << ": " << e.what() << '\n';
    }
  }
  {
    auto out = open_out(dir / "fits.csv");
    dynreg::write_fits_csv(out, fits);
  }
  for (const auto& f : fits) {
    std::cout << f.algorithm << ": slope " << f.slope << " (r2 " << f.r2 << ")\n";
    for (const auto& w : f.warnings) std::cerr << "  " << w << '\n';
  }
  try {
    auto out = open_out(dir / "regret.svg");
    out << dynreg::regret_plot_svg(records);
  } catch (const dynreg::DomainError& e) {
    std::cerr << "no plot: " << e.what() << '\n';
  }
  return code;
}

dynreg::CsvSelection selection_from(const std::vector<std::string>& columns,
                                    const std::string& time_column, bool raw) {
  dynreg::CsvSelection sel;
  sel.columns = columns;
  if (!time_column.empty()) sel.timestamp_column = time_column;
  sel.normalize = !raw;
  return sel;
}

int cmd_oracle(const fs::path& input, double budget, const fs::path& output,
               const dynreg::CsvSelection& sel) {
  const dynreg::Series series = dynreg::ingest_csv(input, sel);
  const long n = series.values.rows();
  std::vector<dynreg::LossOracle> losses;
  losses.reserve(static_cast<std::size_t>(n));
  for (long t = 0; t < n; ++t) {
    losses.push_back(dynreg::make_scaled_squared_loss(series.values.row(t).transpose()));
  }
  const dynreg::VariationBudget b{budget, n};
  const dynreg::OfflineSolution sol = dynreg::solve_offline(losses, b);
  const dynreg::KktReport kkt = dynreg::kkt_check(sol, losses, b);
  auto out = open_out(output);
  dynreg::write_offline_csv(out, sol, kkt);
  std::cout << "regime " << sol.report.regime << ", lambda " << sol.lambda << ", objective "
            << sol.objective << ", worst KKT residual " << kkt.worst() << '\n';
  return kOk;
}

int cmd_demo(const fs::path& input, double lambda, const fs::path& output,
             const dynreg::CsvSelection& sel) {
  const dynreg::Series series = dynreg::ingest_csv(input, sel);
  const dynreg::Vector y = series.values.col(0);
  dynreg::Vector trend = dynreg::l1_trend_filter(y, lambda);
  dynreg::Vector shown = y;
  if (series.normalization) {
    dynreg::Normalization first{{series.normalization->min[0]}, {series.normalization->max[0]}};
    shown = dynreg::denormalize(y, first).col(0);
    trend = dynreg::denormalize(trend, first).col(0);
  }
  auto out = open_out(output);
  out << dynreg::trend_overlay_svg(shown, trend, series.columns.front());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic regret experiments with FLH-SIONS, baselines and the offline oracle"};
  app.require_subcommand(1);

  fs::path config_path;
  std::optional<fs::path> out_dir;
  auto* run = app.add_subcommand("run", "run every cell of an experiment config");
  run->add_option("--config", config_path, "TOML experiment file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (default: [experiment] out)");

  bool fit = false;
  auto* scaling = app.add_subcommand("scaling", "run a config and fit log-log regret slopes");
  scaling->add_option("--config", config_path, "TOML experiment file")->required()->check(CLI::ExistingFile);
  scaling->add_flag("--fit", fit, "fit slopes and draw the regret plot");
  scaling->add_option("--out", out_dir, "output directory (default: [experiment] out)");

  fs::path input;
  fs::path output;
  double budget = 0.0;
  double lambda = 0.0;
  std::vector<std::string> columns;
  std::string time_column;
  bool raw = false;
  auto add_series_options = [&](CLI::App* sub) {
    sub->add_option("--input", input, "CSV with a header row")->required()->check(CLI::ExistingFile);
    sub->add_option("--columns", columns, "columns to read (default: all numeric)")->delimiter(',');
    sub->add_option("--time-column", time_column, "column holding timestamps");
    sub->add_flag("--raw", raw, "skip scaling the columns to [-1, 1]");
  };
  auto* oracle = app.add_subcommand("oracle", "solve the offline problem for a CSV of targets");
  add_series_options(oracle);
  oracle->add_option("--budget", budget, "TV1 budget C_n")->required()->check(CLI::NonNegativeNumber);
  oracle->add_option("--out", output, "solution CSV")->required();

  auto* demo = app.add_subcommand("demo", "L1 trend filter overlay of the first column");
  add_series_options(demo);
  demo->add_option("--lambda", lambda, "penalty on second differences")->required()->check(CLI::NonNegativeNumber);
  demo->add_option("--out", output, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; any other usage error counts as a config error.
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, false);
    if (scaling->parsed()) return cmd_run(config_path, out_dir, fit);
    if (oracle->parsed()) return cmd_oracle(input, budget, output, selection_from(columns, time_column, raw));
    if (demo->parsed()) return cmd_demo(input, lambda, output, selection_from(columns, time_column, raw));
  } catch (const dynreg::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCellFailure;
  }
  return kOk;
}
