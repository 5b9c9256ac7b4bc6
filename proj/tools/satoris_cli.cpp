#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "satoris/harness.hpp"
#include "satoris/subspace.hpp"

namespace fs = std::filesystem;
using namespace satoris;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kSolverError = 3;

/// key=value pairs; values are parsed as JSON when possible, else kept as strings.
nlohmann::json parse_params(const std::vector<std::string>& pairs) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ArgumentError("--param expects key=value, got '" + p + "'");
    const std::string key = p.substr(0, eq);
    const std::string value = p.substr(eq + 1);
    const nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    out[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  }
  return out;
}

void write_matrix_to(const std::string& out, const Matrix& m) {
  if (out.empty() || out == "-") {
    write_csv_matrix(std::cout, m);
  } else {
    write_csv_matrix(fs::path(out), m);
  }
}

SyntheticGenerator generator_from_config(const std::string& config, int& days) {
  SyntheticGenerator gen;
  if (config.empty()) return gen;
  std::ifstream in(config);
  if (!in) throw DataError("cannot open " + config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(config + ": " + e.what());
  }
  // Accept either a bare generator table or a full experiment config.
  if (j.contains("dataset")) {
    const ExperimentSpec spec = spec_from_json(j);
    if (!spec.dataset.synthetic) throw ArgumentError(config + " does not describe a synthetic dataset");
    days = spec.dataset.synthetic_days;
    return *spec.dataset.synthetic;
  }
  nlohmann::json wrapped = {{"dataset", {{"synthetic", j}}}, {"methods", {"mean"}}};
  const ExperimentSpec spec = spec_from_json(wrapped);
  if (j.contains("days")) days = spec.dataset.synthetic_days;
  return *spec.dataset.synthetic;
}

struct ImputeArgs {
  std::string input, mask, neighbor, method = "sresi", out;
  std::vector<std::string> params;
  std::optional<double> level;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  int max_iter = 5000;
  bool clip = false;
};

int run_impute(const ImputeArgs& a) {
  const Matrix x = read_csv_matrix(a.input);
  ObservationMask mask = ObservationMask::all_observed(x.rows(), x.cols());
  if (!a.mask.empty()) {
    mask = read_csv_mask(a.mask);
    require_mask_shape(x, mask, "impute");
  } else if (a.level) {
    mask = generate_mask(x.rows(), x.cols(), *a.level, a.seed);
  } else {
    throw ArgumentError("impute: give --mask or --level");
  }
  std::optional<Matrix> neighbor;
  if (!a.neighbor.empty()) neighbor = read_csv_matrix(a.neighbor);
  SolverOptions solver;
  solver.tolerance = a.tolerance;
  solver.max_iter = a.max_iter;
  const MethodRegistry registry = MethodRegistry::builtin();
  const MethodRunner runner = registry.make(a.method, parse_params(a.params), solver);
  const Matrix y = apply_mask(x, mask);
  const Matrix empty_neighbor;
  const bool needs_neighbor = a.method != "mean" && a.method != "knn" && a.method != "softimpute" &&
                              a.method != "itersvd" && a.method != "nnmin";
  if (needs_neighbor && !neighbor) throw ArgumentError("impute: method '" + a.method + "' needs --neighbor");
  MethodOutput out = runner(MethodInput{y, mask, neighbor ? *neighbor : empty_neighbor});
  if (a.clip) out.values = out.values.cwiseMax(0.0);
  write_matrix_to(a.out, out.values);
  std::cerr << "status " << out.status;
  if (a.level && a.mask.empty()) {
    const ErrorReport e = evaluate(x, out.values, mask);
    std::cerr << " rrmse " << format_number(e.rrmse) << " mae " << format_number(e.mae);
  }
  std::cerr << '\n';
  return 0;
}

struct BenchArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::vector<std::string> methods;
  std::vector<double> levels;
  bool quiet = false;
};

int run_bench(const BenchArgs& a) {
  ExperimentSpec spec = load_spec(a.config);
  if (a.seed) spec.master_seed = *a.seed;
  if (a.jobs) spec.jobs = *a.jobs;
  if (!a.out.empty()) spec.output_dir = a.out;
  if (!a.methods.empty()) {
    const std::set<std::string> keep(a.methods.begin(), a.methods.end());
    std::vector<MethodSpec> selected;
    for (const auto& m : spec.methods)
      if (keep.contains(m.label)) selected.push_back(m);
    if (selected.size() != keep.size()) {
      for (const auto& name : keep) {
        bool found = false;
        for (const auto& m : selected) found = found || m.label == name;
        if (!found) selected.push_back({name, name, nlohmann::json::object()});
      }
    }
    spec.methods = selected;
  }
  if (!a.levels.empty()) spec.missing_levels = a.levels;
  spec.validate();
  RunOptions options;
  if (!a.quiet) {
    options.progress = [](const RunRecord& r) {
      std::cerr << "day " << r.day << " level " << format_number(r.level) << " trial " << r.trial << ' '
                << r.method << " rrmse " << format_number(r.rrmse) << ' ' << r.status << " ("
                << format_number(r.wall_time_seconds) << " s)\n";
    };
  }
  const std::vector<RunRecord> records = run_experiment(spec, MethodRegistry::builtin(), options);
  summarize_to(spec.output_dir / "summary", records);
  std::cerr << records.size() << " records in " << (spec.output_dir / "results.csv").string() << '\n';
  return 0;
}

struct StabilityArgs {
  std::string input, config, out, side = "both";
  std::optional<std::uint64_t> seed;
  Index k = 10;
};

int run_stability(const StabilityArgs& a) {
  std::vector<int> ids;
  std::vector<Matrix> days;
  if (!a.input.empty()) {
    for (auto& [id, m] : load_indexed_dataset(a.input)) {
      ids.push_back(id);
      days.push_back(std::move(m));
    }
  } else {
    int n_days = 7;
    SyntheticGenerator gen = generator_from_config(a.config, n_days);
    if (a.seed) gen.seed = *a.seed;
    days = generate_synthetic_days(gen, n_days);
    for (int t = 0; t < n_days; ++t) ids.push_back(t);
  }
  if (a.side != "left" && a.side != "right" && a.side != "both") {
    throw ArgumentError("stability: --side must be left, right or both");
  }
  std::ostringstream csv;
  csv << "day,next_day,side,mean,std\n";
  for (Side side : {Side::left, Side::right}) {
    const std::string name = side == Side::left ? "left" : "right";
    if (a.side != "both" && a.side != name) continue;
    const auto series = stability_series(days, a.k, side);
    for (std::size_t t = 0; t < series.size(); ++t) {
      csv << ids[t] << ',' << ids[t + 1] << ',' << name << ',' << format_number(series[t].mean) << ','
          << format_number(series[t].std) << '\n';
    }
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream(a.out, std::ios::binary) << csv.str();
  }
  return 0;
}

struct SynthArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> days;
};

int run_synth(const SynthArgs& a) {
  if (a.out.empty()) throw ArgumentError("synth: --out directory is required");
  int n_days = 7;
  SyntheticGenerator gen = generator_from_config(a.config, n_days);
  if (a.seed) gen.seed = *a.seed;
  if (a.days) n_days = *a.days;
  write_dataset(a.out, generate_synthetic_days(gen, n_days));
  std::cerr << n_days << " days of " << gen.rows << "x" << gen.cols << " written to " << a.out << '\n';
  return 0;
}

struct SummarizeArgs {
  std::string input, out;
};

int run_summarize(const SummarizeArgs& a) {
  const std::vector<RunRecord> records = read_records_csv(a.input);
  const fs::path dir = a.out.empty() ? fs::path(a.input).parent_path() / "summary" : fs::path(a.out);
  summarize_to(dir, records);
  std::ifstream rank(dir / "ranking.txt");
  std::cout << rank.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subspace-informed matrix completion toolkit"};
  app.require_subcommand(1);

  ImputeArgs ia;
  auto* impute = app.add_subcommand("impute", "Complete one matrix with one method");
  impute->add_option("--input,-i", ia.input, "Matrix CSV (observed entries)")->required();
  impute->add_option("--mask", ia.mask, "0/1 CSV, 1 = observed");
  impute->add_option("--level", ia.level, "Draw an MCAR mask with this missing fraction and report errors");
  impute->add_option("--seed", ia.seed, "Seed for --level");
  impute->add_option("--neighbor", ia.neighbor, "Fully observed neighbor matrix CSV");
  impute->add_option("--method", ia.method, "Method name")->capture_default_str();
  impute->add_option("--param", ia.params, "Method parameter key=value (repeatable)");
  impute->add_option("--out,-o", ia.out, "Output CSV (default stdout)");
  impute->add_option("--tolerance", ia.tolerance, "Solver tolerance")->capture_default_str();
  impute->add_option("--max-iter", ia.max_iter, "Solver iteration cap")->capture_default_str();
  impute->add_flag("--clip", ia.clip, "Clip the output at zero");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run an experiment grid from a JSON config");
  bench->add_option("--config,-c", ba.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  bench->add_option("--seed", ba.seed, "Override master_seed");
  bench->add_option("--out,-o", ba.out, "Override output_dir");
  bench->add_option("--method", ba.methods, "Restrict to these method labels (repeatable)");
  bench->add_option("--level", ba.levels, "Override missing levels (repeatable)");
  bench->add_option("--jobs,-j", ba.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--quiet,-q", ba.quiet, "No per-record progress");

  StabilityArgs sa;
  auto* stability = app.add_subcommand("stability", "Adjacent-day subspace overlap series");
  stability->add_option("--input,-i", sa.input, "Dataset directory of day_<index>.csv files");
  stability->add_option("--config,-c", sa.config, "Synthetic generator config (JSON) when no --input");
  stability->add_option("--seed", sa.seed, "Override the generator seed");
  stability->add_option("--k", sa.k, "Subspace rank")->capture_default_str();
  stability->add_option("--side", sa.side, "left, right or both")->capture_default_str();
  stability->add_option("--out,-o", sa.out, "Output CSV (default stdout)");

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--config,-c", ya.config, "Generator config (JSON)");
  synth->add_option("--seed", ya.seed, "Override the generator seed");
  synth->add_option("--days", ya.days, "Number of days")->check(CLI::PositiveNumber);
  synth->add_option("--out,-o", ya.out, "Output directory")->required();

  SummarizeArgs ma;
  auto* summarize = app.add_subcommand("summarize", "Aggregate, rank and emit plot data from records");
  summarize->add_option("--input,-i", ma.input, "results.csv or journal.csv")->required()->check(CLI::ExistingFile);
  summarize->add_option("--out,-o", ma.out, "Output directory (default: <input dir>/summary)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*impute) return run_impute(ia);
    if (*bench) return run_bench(ba);
    if (*stability) return run_stability(sa);
    if (*synth) return run_synth(ya);
    if (*summarize) return run_summarize(ma);
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  } catch (const NumericError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
