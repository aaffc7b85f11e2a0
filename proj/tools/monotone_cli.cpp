// monotone: run learning-curve experiments and emit their reports.
//
//   monotone run     --config cfg.json [--set k=v ...] --out dir
//   monotone sweep   --config cfg.json --alphas 0.01,0.5 --nvs 2,16 --out dir
//   monotone verify  --config cfg.json --out dir
//   monotone report  --in dir --out dir
//   monotone gen-data --spec gen.json --count 1000 --out data.csv
//
// --config also accepts a preset name (first-experiment, table1-peaking, ...).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "monotone/config.hpp"
#include "monotone/data.hpp"
#include "monotone/harness.hpp"
#include "monotone/report.hpp"

namespace fs = std::filesystem;
using namespace monotone;

namespace {

int verbosity = 0;

void note(const std::string& message) {
  if (verbosity > 0) std::cerr << message << "\n";
}

ExperimentConfig resolve_config(const std::string& source, const std::vector<std::string>& sets) {
  if (!fs::exists(source)) {
    for (const auto& name : preset_names()) {
      if (name == source) return parse_config(R"({"preset": ")" + name + "\"}", sets);
    }
  }
  return load_config(source, sets);
}

fs::path output_dir(const std::string& flag, const ExperimentConfig& config) {
  if (!flag.empty()) return flag;
  if (!config.output_dir.empty()) return config.output_dir;
  throw ConfigError("output_dir", "no output directory (use --out)");
}

void print_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << f.string() << "\n";
}

std::vector<Eigen::Index> to_sizes(const std::vector<double>& values) {
  std::vector<Eigen::Index> sizes;
  for (double v : values) {
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw ConfigError("nvs", "validation sizes must be positive integers");
    }
    sizes.push_back(static_cast<Eigen::Index>(v));
  }
  return sizes;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& out) {
  const ExperimentConfig config = resolve_config(config_path, sets);
  const fs::path dir = output_dir(out, config);
  note("running " + config.name + " with " + std::to_string(config.runs) + " runs");
  const ExperimentResult result = run_experiment(config);
  print_written(write_run_outputs(result, dir));
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets,
              const std::string& alphas_text, const std::string& nvs_text,
              const std::string& out) {
  const ExperimentConfig config = resolve_config(config_path, sets);
  const fs::path dir = output_dir(out, config);
  const auto alphas = parse_number_list("alphas", alphas_text);
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 0.5)) throw ConfigError("alphas", "every alpha must lie in (0, 0.5]");
  }
  const auto nvs = to_sizes(parse_number_list("nvs", nvs_text));
  note("sweeping " + std::to_string(alphas.size() * nvs.size()) + " cells");
  const auto cells = sweep(config, alphas, nvs);
  print_written(write_sweep_outputs(cells, dir));
  return 0;
}

int cmd_verify(const std::string& config_path, const std::vector<std::string>& sets,
               const std::string& out) {
  const ExperimentConfig config = resolve_config(config_path, sets);
  const fs::path dir = output_dir(out, config);
  const ExperimentResult result = run_experiment(config);
  const RunBoundReport report = verify_run_bound(result);
  const auto consistency = consistency_smoke(result);
  auto written = write_run_outputs(result, dir);
  {
    std::ofstream f(dir / "verify.json", std::ios::binary | std::ios::trunc);
    f << verify_json(report, consistency);
    if (!f) throw ReportError("cannot write " + (dir / "verify.json").string());
    written.push_back(dir / "verify.json");
  }
  print_written(written);

  std::cerr << "monotone runs: " << report.observed_monotone_fraction << " observed vs bound "
            << report.bound << " (tolerance " << report.tolerance << ")"
            << (report.vacuous ? ", bound is vacuous at this run count" : "") << "\n";
  std::cerr << "per-decision non-monotone rate: " << report.per_decision_rate << " vs alpha "
            << report.alpha << "\n";
  for (const auto& e : consistency) {
    if (e.flagged) {
      std::cerr << to_string(e.learner) << " froze before round " << config.plan.rounds / 2
                << " in " << e.frozen_fraction * 100.0 << "% of runs\n";
    }
  }
  std::cerr << (report.passed() ? "verify: PASS" : "verify: FAIL") << "\n";
  return report.passed() ? 0 : 3;
}

int cmd_report(const std::string& in, const std::string& out) {
  print_written(emit_report(in, out));
  return 0;
}

int cmd_gen_data(const std::string& spec_path, long long count, const std::string& out) {
  if (count < 1) throw ConfigError("count", "must be >= 1");
  const GeneratorSpec spec = load_generator_spec(spec_path);
  if (spec.kind == GeneratorKind::mnist) {
    throw ConfigError("generator.kind", "gen-data supports the synthetic generators only");
  }
  const LabeledDataset data = generate(spec, static_cast<Eigen::Index>(count));
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw ReportError("cannot write " + out);
  f << "label";
  for (Eigen::Index j = 0; j < data.dims(); ++j) f << ",x" << (j + 1);
  f << "\n";
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    f << data.labels()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < data.dims(); ++j) f << ',' << format_number(data.features()(i, j));
    f << "\n";
  }
  if (!f) throw ReportError("failed writing " + out);
  std::cout << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone learner wrappers: learning-curve experiments"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr");

  std::string config_path;
  std::vector<std::string> sets;
  std::string out;

  auto* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", config_path, "Config file or preset name")->required();
  run->add_option("--set", sets, "Override, dotted.key=value");
  run->add_option("--out", out, "Output directory");

  std::string alphas = "0.01,0.025,0.05,0.1,0.25,0.5";
  std::string nvs = "2,4,8,16,32,64,128";
  auto* sw = app.add_subcommand("sweep", "Grid over alpha and validation size");
  sw->add_option("--config", config_path, "Config file or preset name")->required();
  sw->add_option("--set", sets, "Override, dotted.key=value");
  sw->add_option("--alphas", alphas, "Comma-separated alpha values")->capture_default_str();
  sw->add_option("--nvs", nvs, "Comma-separated validation sizes")->capture_default_str();
  sw->add_option("--out", out, "Output directory");

  auto* verify = app.add_subcommand("verify", "Monte Carlo check of the MT_HT guarantees");
  verify->add_option("--config", config_path, "Config file or preset name")->required();
  verify->add_option("--set", sets, "Override, dotted.key=value");
  verify->add_option("--out", out, "Output directory");

  std::string in;
  auto* report = app.add_subcommand("report", "Tables and curve files from a results directory");
  report->add_option("--in", in, "Results directory")->required();
  report->add_option("--out", out, "Report directory")->required();

  std::string spec_path;
  long long count = 0;
  auto* gen = app.add_subcommand("gen-data", "Sample a synthetic dataset to CSV");
  gen->add_option("--spec", spec_path, "Generator spec (JSON)")->required();
  gen->add_option("--count", count, "Number of rows")->required();
  gen->add_option("--out", out, "Output CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, sets, out);
    if (sw->parsed()) return cmd_sweep(config_path, sets, alphas, nvs, out);
    if (verify->parsed()) return cmd_verify(config_path, sets, out);
    if (report->parsed()) return cmd_report(in, out);
    if (gen->parsed()) return cmd_gen_data(spec_path, count, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
