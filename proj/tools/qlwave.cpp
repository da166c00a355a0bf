// Command line front end: run, classify, sweep, report.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "qlwave/asymptotic.hpp"
#include "qlwave/config.hpp"
#include "qlwave/output.hpp"
#include "qlwave/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qlwave;

namespace {

int cmd_run(const std::string& config_path, const std::string& out, bool quiet) {
  RunConfig cfg = load_run_config(config_path);
  if (!out.empty()) cfg.out_dir = out;
  const RunResult res = run_pipeline(cfg);
  write_run(res, cfg.out_dir);
  const SummaryRow row = summary_row(res);
  if (!quiet) {
    fmt::print("{} eps={} -> {}", row.equation, format_number(row.epsilon), row.termination);
    if (row.blowup) fmt::print(" t*={} r*={}", format_number(row.t_star), format_number(row.r_star));
    if (std::isfinite(row.gamma)) fmt::print(" gamma={}", format_number(row.gamma));
    fmt::print(" ({})\n", cfg.out_dir);
    for (const auto& n : res.notes) fmt::print("  note: {}\n", n);
  }
  if (res.trajectory.termination == Termination::Error)
    fmt::print(stderr, "error: {}\n", res.trajectory.message);
  return res.exit_code();
}

int cmd_classify(const std::string& spec, const std::string& file, const ClassifyParams& params) {
  std::string text = spec;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const QuadraticNonlinearity nl = parse_nonlinearity(text);
  fmt::print("{}\n", to_json(classify(nl, params)).dump(2));
  return 0;
}

std::string eps_dir_name(std::size_t i, double eps) { return fmt::format("eps_{:02d}_{}", i, format_number(eps)); }

int cmd_sweep(const std::string& config_path, const std::string& out, int parallel, bool quiet) {
  SweepConfig sc = load_sweep_config(config_path);
  if (!out.empty()) sc.base.out_dir = out;
  if (parallel > 0) sc.parallel = parallel;
  const std::size_t n = sc.epsilons.size();
  std::vector<SummaryRow> rows(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      RunConfig cfg = sc.base;
      cfg.scenario.epsilon = sc.epsilons[i];
      cfg.out_dir = (fs::path(sc.base.out_dir) / eps_dir_name(i, sc.epsilons[i])).string();
      try {
        const RunResult res = run_pipeline(cfg);
        write_run(res, cfg.out_dir);
        rows[i] = summary_row(res);
        if (res.trajectory.termination == Termination::Error) errors[i] = res.trajectory.message;
      } catch (const std::exception& e) {
        errors[i] = e.what();
        rows[i].epsilon = sc.epsilons[i];
        rows[i].equation = to_string(cfg.scenario.equation);
        rows[i].termination = to_string(Termination::Error);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(sc.parallel, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  fs::create_directories(sc.base.out_dir);
  write_summary_table(rows, fs::path(sc.base.out_dir) / "sweep.csv");
  int code = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!quiet) fmt::print("eps={} -> {}\n", format_number(rows[i].epsilon), rows[i].termination);
    if (!errors[i].empty()) {
      fmt::print(stderr, "error (eps={}): {}\n", format_number(sc.epsilons[i]), errors[i]);
      code = 1;
    }
  }
  return code;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out, bool quiet) {
  std::vector<SummaryRow> rows;
  for (const auto& d : dirs) {
    std::ifstream in(fs::path(d) / "summary.json");
    if (!in) throw std::runtime_error("no summary.json in '" + d + "'");
    rows.push_back(summary_from_json(nlohmann::json::parse(in)));
  }
  write_summary_table(rows, out);
  if (!quiet) fmt::print("{} runs -> {}\n", rows.size(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial quasilinear wave solver and diagnostics"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress progress output");

  std::string config, out;
  int parallel = 0;
  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("--config", config, "YAML run configuration")->required();
  run->add_option("--out", out, "Output directory (overrides output.dir)");
  run->add_flag("--quiet", quiet);

  std::string spec, spec_file;
  ClassifyParams cp;
  auto* cls = app.add_subcommand("classify", "Classify a quadratic nonlinearity");
  auto* spec_opt = cls->add_option("--spec", spec, "Triples 'alpha,beta,coeff' separated by newlines or ';'");
  cls->add_option("--file", spec_file, "File with one triple per line")->excludes(spec_opt);
  cls->add_option("--s-max", cp.s_max, "Slow-time horizon");
  cls->add_option("--amplitude", cp.amplitude, "Bump amplitude of the test profile");
  cls->add_option("--directions", cp.n_directions, "Directions per axis of the sphere grid");
  cls->add_option("--parallel", cp.parallel, "Worker threads");
  cls->add_flag("--quiet", quiet);

  auto* sweep = app.add_subcommand("sweep", "Run a configuration over a list of epsilons");
  sweep->add_option("--config", config, "YAML sweep configuration")->required();
  sweep->add_option("--out", out, "Output directory");
  sweep->add_option("--parallel", parallel, "Concurrent runs (overrides sweep.parallel)")->check(CLI::PositiveNumber);
  sweep->add_flag("--quiet", quiet);

  std::vector<std::string> dirs;
  std::string report_out = "report.csv";
  auto* report = app.add_subcommand("report", "Aggregate run directories into one CSV");
  report->add_option("dirs", dirs, "Run directories")->required();
  report->add_option("--out", report_out, "Output CSV");
  report->add_flag("--quiet", quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config, out, quiet);
    if (*cls) {
      if (spec.empty() && spec_file.empty()) throw std::runtime_error("classify needs --spec or --file");
      std::string text = spec;
      std::replace(text.begin(), text.end(), ';', '\n');
      return cmd_classify(text, spec_file, cp);
    }
    if (*sweep) return cmd_sweep(config, out, parallel, quiet);
    if (*report) return cmd_report(dirs, report_out, quiet);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
