#ifndef SATORIS_HARNESS_HPP
#define SATORIS_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "satoris/csv_io.hpp"
#include "satoris/datasets.hpp"
#include "satoris/masking_metrics.hpp"
#include "satoris/methods.hpp"

namespace satoris {

struct MethodSpec {
  std::string label;  ///< name used in records; defaults to `name`
  std::string name;   ///< registry key
  nlohmann::json params = nlohmann::json::object();
};

struct DayPair {
  int target = 0;
  int neighbor = 0;
};

struct DatasetSpec {
  std::filesystem::path directory;            ///< day_<index>.csv files, or empty
  std::optional<SyntheticGenerator> synthetic;  ///< used when no directory is given
  int synthetic_days = 7;
};

/// Declarative description of a benchmark grid. Maps one to one onto the
/// JSON config read by load_spec().
struct ExperimentSpec {
  DatasetSpec dataset;
  std::vector<DayPair> days;  ///< empty: every day paired with the next one, wrapping
  std::vector<MethodSpec> methods;
  std::vector<double> missing_levels{0.10, 0.25, 0.50, 0.75, 0.90};
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "results";
  SolverOptions solver;
  int jobs = 1;
  bool clip_negative = true;

  void validate() const {
    if (dataset.directory.empty() && !dataset.synthetic) {
      throw ArgumentError("spec: dataset needs a directory or synthetic parameters");
    }
    if (!dataset.directory.empty() && dataset.synthetic) {
      throw ArgumentError("spec: dataset takes either a directory or synthetic parameters, not both");
    }
    if (dataset.synthetic) {
      dataset.synthetic->validate();
      if (dataset.synthetic_days < 2) throw ArgumentError("spec: synthetic datasets need at least 2 days");
    }
    if (methods.empty()) throw ArgumentError("spec: no methods");
    std::set<std::string> labels;
    for (const auto& m : methods) {
      if (m.label.empty() || m.label.find_first_of(",\n\r\"") != std::string::npos) {
        throw ArgumentError("spec: method label '" + m.label + "' is empty or contains CSV delimiters");
      }
      if (!labels.insert(m.label).second) throw ArgumentError("spec: duplicate method label '" + m.label + "'");
    }
    if (missing_levels.empty()) throw ArgumentError("spec: no missing levels");
    for (double l : missing_levels) {
      if (!(l >= 0.0 && l < 1.0)) throw ArgumentError("spec: missing levels must lie in [0, 1)");
    }
    if (std::set<double>(missing_levels.begin(), missing_levels.end()).size() != missing_levels.size()) {
      throw ArgumentError("spec: duplicate missing level");
    }
    if (trials < 1) throw ArgumentError("spec: trials must be >= 1");
    if (jobs < 1) throw ArgumentError("spec: jobs must be >= 1");
    for (const auto& d : days) {
      if (d.target == d.neighbor) throw ArgumentError("spec: a day cannot be its own neighbor");
    }
    if (solver.tolerance <= 0.0 || solver.max_iter < 1 || solver.rho <= 0.0) {
      throw ArgumentError("spec: solver tolerance, max_iter and rho must be positive");
    }
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                                std::string_view where) {
  if (!j.is_object()) throw ArgumentError("spec: " + std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ArgumentError("spec: unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ArgumentError(std::string("spec: key '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j,
                              {"dataset", "days", "methods", "missing_levels", "trials", "master_seed",
                               "output_dir", "solver", "jobs", "clip_negative"},
                              "config");
  ExperimentSpec s;
  if (!j.contains("dataset")) throw ArgumentError("spec: missing 'dataset'");
  const auto& ds = j.at("dataset");
  detail::reject_unknown_keys(ds, {"directory", "synthetic"}, "dataset");
  if (ds.contains("directory")) {
    std::string dir;
    detail::read_key(ds, "directory", dir);
    s.dataset.directory = dir;
  }
  if (ds.contains("synthetic")) {
    const auto& g = ds.at("synthetic");
    detail::reject_unknown_keys(g,
                                {"rows", "cols", "rank", "shared_subspace", "drift_angle", "noise", "seed",
                                 "level", "lead_ratio", "decay", "days"},
                                "dataset.synthetic");
    SyntheticGenerator gen;
    detail::read_key(g, "rows", gen.rows);
    detail::read_key(g, "cols", gen.cols);
    detail::read_key(g, "rank", gen.rank);
    detail::read_key(g, "shared_subspace", gen.shared_subspace);
    detail::read_key(g, "drift_angle", gen.drift_angle);
    detail::read_key(g, "noise", gen.noise);
    detail::read_key(g, "seed", gen.seed);
    detail::read_key(g, "level", gen.level);
    detail::read_key(g, "lead_ratio", gen.lead_ratio);
    detail::read_key(g, "decay", gen.decay);
    detail::read_key(g, "days", s.dataset.synthetic_days);
    s.dataset.synthetic = gen;
  }
  if (j.contains("days")) {
    if (!j.at("days").is_array()) throw ArgumentError("spec: 'days' must be an array");
    for (const auto& d : j.at("days")) {
      detail::reject_unknown_keys(d, {"target", "neighbor"}, "days entry");
      if (!d.contains("target") || !d.contains("neighbor")) {
        throw ArgumentError("spec: each days entry needs 'target' and 'neighbor'");
      }
      DayPair p;
      detail::read_key(d, "target", p.target);
      detail::read_key(d, "neighbor", p.neighbor);
      s.days.push_back(p);
    }
  }
  if (!j.contains("methods") || !j.at("methods").is_array()) throw ArgumentError("spec: 'methods' must be an array");
  for (const auto& m : j.at("methods")) {
    MethodSpec ms;
    if (m.is_string()) {
      ms.name = m.get<std::string>();
    } else if (m.is_object()) {
      if (!m.contains("name") || !m.at("name").is_string()) throw ArgumentError("spec: method entry needs a 'name'");
      ms.name = m.at("name").get<std::string>();
      for (const auto& [key, value] : m.items()) {
        if (key == "name") continue;
        if (key == "label") {
          if (!value.is_string()) throw ArgumentError("spec: method 'label' must be a string");
          ms.label = value.get<std::string>();
        } else {
          ms.params[key] = value;
        }
      }
    } else {
      throw ArgumentError("spec: method entries must be names or objects");
    }
    if (ms.label.empty()) ms.label = ms.name;
    s.methods.push_back(std::move(ms));
  }
  detail::read_key(j, "missing_levels", s.missing_levels);
  detail::read_key(j, "trials", s.trials);
  detail::read_key(j, "master_seed", s.master_seed);
  if (j.contains("output_dir")) {
    std::string dir;
    detail::read_key(j, "output_dir", dir);
    s.output_dir = dir;
  }
  if (j.contains("solver")) {
    const auto& so = j.at("solver");
    detail::reject_unknown_keys(so, {"tolerance", "max_iter", "rho"}, "solver");
    detail::read_key(so, "tolerance", s.solver.tolerance);
    detail::read_key(so, "max_iter", s.solver.max_iter);
    detail::read_key(so, "rho", s.solver.rho);
  }
  detail::read_key(j, "jobs", s.jobs);
  detail::read_key(j, "clip_negative", s.clip_negative);
  s.validate();
  return s;
}

/// Canonical form of the fields that determine the records (output_dir
/// and jobs excluded), used to detect a resumed run with a changed grid.
inline nlohmann::json spec_fingerprint(const ExperimentSpec& s) {
  nlohmann::json j;
  if (!s.dataset.directory.empty()) j["dataset"]["directory"] = s.dataset.directory.string();
  if (s.dataset.synthetic) {
    const auto& g = *s.dataset.synthetic;
    j["dataset"]["synthetic"] = {{"rows", g.rows},         {"cols", g.cols},
                                 {"rank", g.rank},         {"shared_subspace", g.shared_subspace},
                                 {"drift_angle", g.drift_angle}, {"noise", g.noise},
                                 {"seed", g.seed},         {"level", g.level},
                                 {"lead_ratio", g.lead_ratio}, {"decay", g.decay},
                                 {"days", s.dataset.synthetic_days}};
  }
  j["days"] = nlohmann::json::array();
  for (const auto& d : s.days) j["days"].push_back({{"target", d.target}, {"neighbor", d.neighbor}});
  j["methods"] = nlohmann::json::array();
  for (const auto& m : s.methods) j["methods"].push_back({{"label", m.label}, {"name", m.name}, {"params", m.params}});
  j["missing_levels"] = s.missing_levels;
  j["trials"] = s.trials;
  j["master_seed"] = s.master_seed;
  j["solver"] = {{"tolerance", s.solver.tolerance}, {"max_iter", s.solver.max_iter}, {"rho", s.solver.rho}};
  j["clip_negative"] = s.clip_negative;
  return j;
}

inline ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_spec: cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("load_spec: " + path.string() + ": " + e.what());
  }
  ExperimentSpec s = spec_from_json(j);
  if (!s.dataset.directory.empty() && s.dataset.directory.is_relative()) s.dataset.directory = path.parent_path() / s.dataset.directory;
  return s;
}

/// Days of the experiment keyed by their identifier.
struct ExperimentData {
  std::map<int, Matrix> days;

  const Matrix& day(int id) const {
    const auto it = days.find(id);
    if (it == days.end()) throw DataError("experiment: unknown day " + std::to_string(id));
    return it->second;
  }
};

inline ExperimentData load_experiment_data(const ExperimentSpec& spec) {
  ExperimentData data;
  if (spec.dataset.synthetic) {
    std::vector<Matrix> days = generate_synthetic_days(*spec.dataset.synthetic, spec.dataset.synthetic_days);
    for (std::size_t t = 0; t < days.size(); ++t) data.days.emplace(static_cast<int>(t), std::move(days[t]));
  } else {
    for (auto& [id, m] : load_indexed_dataset(spec.dataset.directory)) data.days.emplace(id, std::move(m));
  }
  return data;
}

/// Explicit pairs from the spec, or each day with the next one (wrapping).
inline std::vector<DayPair> resolve_day_pairs(const ExperimentSpec& spec, const ExperimentData& data) {
  if (!spec.days.empty()) {
    for (const auto& p : spec.days) {
      data.day(p.target);
      data.day(p.neighbor);
    }
    return spec.days;
  }
  if (data.days.size() < 2) throw DataError("experiment: need at least two days to pair targets with neighbors");
  std::vector<int> ids;
  for (const auto& [id, m] : data.days) ids.push_back(id);
  std::vector<DayPair> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], ids[(i + 1) % ids.size()]});
  return out;
}

/// Mask seed of a cell. Depends on the day, level index and trial only, so
/// every method of a cell sees the same mask.
inline std::uint64_t cell_seed(std::uint64_t master, int day, std::size_t level_index, int trial) {
  return derive_seed(master, {static_cast<std::uint64_t>(static_cast<std::int64_t>(day)),
                              static_cast<std::uint64_t>(level_index), static_cast<std::uint64_t>(trial)});
}

/// One (day, method, level, trial) outcome. Failed methods carry NaN metrics
/// and a "failed" or "solver_error" status.
struct RunRecord {
  int day = 0;
  int neighbor = 0;
  std::string method;
  double level = 0.0;
  int trial = 0;
  double rrmse = std::numeric_limits<double>::quiet_NaN();
  double mae = std::numeric_limits<double>::quiet_NaN();
  std::string status;
  std::uint64_t mask_hash = 0;
  double wall_time_seconds = 0.0;

  bool ok() const { return std::isfinite(rrmse) && std::isfinite(mae); }
  auto key() const { return std::tuple(day, level, trial, method); }
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t parse_hex64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DataError("records: bad mask hash");
  return v;
}

inline int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DataError("records: bad " + std::string(what));
  return v;
}

}  // namespace detail

inline constexpr std::string_view kRecordHeader = "day,neighbor,method,level,trial,rrmse,mae,status,mask_hash";
inline constexpr std::string_view kJournalHeader =
    "day,neighbor,method,level,trial,rrmse,mae,status,mask_hash,wall_time_seconds";

inline std::string format_record(const RunRecord& r, bool with_time) {
  std::string line = std::to_string(r.day) + "," + std::to_string(r.neighbor) + "," + r.method + "," +
                     format_number(r.level) + "," + std::to_string(r.trial) + "," + format_number(r.rrmse) + "," +
                     format_number(r.mae) + "," + r.status + "," + detail::hex64(r.mask_hash);
  if (with_time) line += "," + format_number(r.wall_time_seconds);
  return line;
}

inline RunRecord parse_record(std::string_view line, bool with_time) {
  const auto f = split_fields(line);
  if (f.size() != (with_time ? 10u : 9u)) throw DataError("records: wrong field count in '" + std::string(line) + "'");
  RunRecord r;
  r.day = detail::parse_int(f[0], "day");
  r.neighbor = detail::parse_int(f[1], "neighbor");
  r.method = std::string(f[2]);
  r.level = parse_number(f[3], "level");
  r.trial = detail::parse_int(f[4], "trial");
  r.rrmse = parse_number(f[5], "rrmse");
  r.mae = parse_number(f[6], "mae");
  r.status = std::string(f[7]);
  r.mask_hash = detail::parse_hex64(f[8]);
  if (with_time) r.wall_time_seconds = parse_number(f[9], "wall_time_seconds");
  return r;
}

/// Value as it reads back from a record file.
inline double canonical_value(double value) { return parse_number(format_number(value), "record value"); }

inline double canonical_level(double level) { return canonical_value(level); }

inline void sort_records(std::vector<RunRecord>& records) {
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) { return a.key() < b.key(); });
}

/// Result records without wall times: byte-identical across reruns.
inline void write_records_csv(const std::filesystem::path& path, std::vector<RunRecord> records) {
  sort_records(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_records_csv: cannot open " + path.string());
  out << kRecordHeader << '\n';
  for (const auto& r : records) out << format_record(r, false) << '\n';
}

inline void write_timings_csv(const std::filesystem::path& path, std::vector<RunRecord> records) {
  sort_records(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_timings_csv: cannot open " + path.string());
  out << "day,method,level,trial,wall_time_seconds\n";
  for (const auto& r : records) {
    out << r.day << ',' << r.method << ',' << format_number(r.level) << ',' << r.trial << ','
        << format_number(r.wall_time_seconds) << '\n';
  }
}

/// Reads records written by write_records_csv or the run journal.
inline std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("read_records_csv: cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  bool with_time = false;
  if (header == kJournalHeader) {
    with_time = true;
  } else if (header != kRecordHeader) {
    throw DataError("read_records_csv: unexpected header in " + path.string());
  }
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_record(line, with_time));
  }
  return out;
}

struct RunOptions {
  /// Stop after this many newly computed records (simulates an interruption).
  std::optional<std::size_t> max_new_records;
  std::function<void(const RunRecord&)> progress;
};

/// Runs the grid (day pair x level x trial x method), appending each record
/// to output_dir/journal.csv as it completes. Records already in the
/// journal are skipped, so an interrupted run resumes where it stopped.
/// Once the grid is complete, results.csv (sorted, no wall times) and
/// timings.csv are written. Returns all records, sorted.
inline std::vector<RunRecord> run_experiment(const ExperimentSpec& spec,
                                             const MethodRegistry& registry = MethodRegistry::builtin(),
                                             const RunOptions& options = {}) {
  namespace fs = std::filesystem;
  spec.validate();
  const ExperimentData data = load_experiment_data(spec);
  const std::vector<DayPair> pairs = resolve_day_pairs(spec, data);

  std::vector<MethodRunner> runners;
  for (const auto& m : spec.methods) runners.push_back(registry.make(m.name, m.params, spec.solver));

  fs::create_directories(spec.output_dir);
  const fs::path spec_path = spec.output_dir / "spec.json";
  const std::string fingerprint = spec_fingerprint(spec).dump(2) + "\n";
  if (fs::exists(spec_path)) {
    std::ifstream in(spec_path, std::ios::binary);
    std::stringstream existing;
    existing << in.rdbuf();
    if (existing.str() != fingerprint) {
      throw DataError("run_experiment: " + spec.output_dir.string() + " holds a different experiment");
    }
  } else {
    std::ofstream(spec_path, std::ios::binary) << fingerprint;
  }

  // Resume: keep complete journal lines, drop a torn trailing line.
  const fs::path journal_path = spec.output_dir / "journal.csv";
  std::vector<RunRecord> records;
  std::set<std::tuple<int, double, int, std::string>> done;
  if (fs::exists(journal_path)) {
    std::ifstream in(journal_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const std::size_t last = text.rfind('\n');
    text = last == std::string::npos ? std::string() : text.substr(0, last + 1);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    if (!text.empty() && line != kJournalHeader) throw DataError("run_experiment: journal header mismatch");
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      RunRecord r = parse_record(line, true);
      if (done.insert(r.key()).second) records.push_back(std::move(r));
    }
    in.close();
    std::ofstream rewrite(journal_path, std::ios::binary | std::ios::trunc);
    rewrite << (text.empty() ? std::string(kJournalHeader) + "\n" : text);
  } else {
    std::ofstream(journal_path, std::ios::binary) << kJournalHeader << '\n';
  }

  struct Task {
    DayPair pair;
    std::size_t level_index;
    int trial;
    std::size_t method_index;
  };
  std::vector<Task> tasks;
  for (const auto& pair : pairs) {
    for (std::size_t li = 0; li < spec.missing_levels.size(); ++li) {
      for (int trial = 0; trial < spec.trials; ++trial) {
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
          if (!done.contains(std::tuple(pair.target, canonical_level(spec.missing_levels[li]), trial,
                                        spec.methods[mi].label))) {
            tasks.push_back({pair, li, trial, mi});
          }
        }
      }
    }
  }
  if (options.max_new_records && *options.max_new_records < tasks.size()) tasks.resize(*options.max_new_records);

  std::ofstream journal(journal_path, std::ios::binary | std::ios::app);
  if (!journal) throw DataError("run_experiment: cannot append to " + journal_path.string());
  std::mutex writer;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto compute = [&](const Task& t) {
    const Matrix& truth = data.day(t.pair.target);
    const Matrix& neighbor = data.day(t.pair.neighbor);
    if (neighbor.rows() != truth.rows() || neighbor.cols() != truth.cols()) {
      throw DataError("run_experiment: day " + std::to_string(t.pair.neighbor) + " and day " +
                      std::to_string(t.pair.target) + " differ in shape");
    }
    const double level = spec.missing_levels[t.level_index];
    const ObservationMask mask = generate_mask(truth.rows(), truth.cols(), level,
                                               cell_seed(spec.master_seed, t.pair.target, t.level_index, t.trial));
    const Matrix y = apply_mask(truth, mask);
    RunRecord r;
    r.day = t.pair.target;
    r.neighbor = t.pair.neighbor;
    r.method = spec.methods[t.method_index].label;
    r.level = canonical_level(level);
    r.trial = t.trial;
    r.mask_hash = mask.hash();
    const auto start = std::chrono::steady_clock::now();
    try {
      MethodOutput out = runners[t.method_index](MethodInput{y, mask, neighbor});
      if (spec.clip_negative) out.values = out.values.cwiseMax(0.0);
      const ErrorReport e = evaluate(truth, out.values, mask);
      r.rrmse = canonical_value(e.rrmse);
      r.mae = canonical_value(e.mae);
      r.status = out.status;
    } catch (const SolverError&) {
      r.status = "solver_error";
    } catch (const Error&) {
      r.status = "failed";
    }
    r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        RunRecord r = compute(tasks[i]);
        std::lock_guard lock(writer);
        if (failure) return;
        journal << format_record(r, true) << '\n' << std::flush;
        if (options.progress) options.progress(r);
        records.push_back(std::move(r));
      } catch (...) {
        std::lock_guard lock(writer);
        if (!failure) failure = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(spec.jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  sort_records(records);
  const std::size_t expected = pairs.size() * spec.missing_levels.size() * static_cast<std::size_t>(spec.trials) *
                               spec.methods.size();
  if (records.size() == expected) {
    write_records_csv(spec.output_dir / "results.csv", records);
    write_timings_csv(spec.output_dir / "timings.csv", records);
  }
  return records;
}

/// Per (method, level) mean and population std over successful records.
struct AggregateRow {
  std::string method;
  double level = 0.0;
  MetricSummary rrmse;
  MetricSummary mae;
  std::size_t count = 0;
};

inline std::vector<AggregateRow> aggregate_records(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EvaluationError("summarize: no records");
  std::map<std::pair<std::string, double>, std::vector<ErrorReport>> groups;
  for (const auto& r : records) {
    auto& g = groups[{r.method, r.level}];
    if (r.ok()) g.push_back({r.rrmse, r.mae, 0});
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, reports] : groups) {
    if (reports.empty()) continue;
    const AggregateReport a = aggregate(reports);
    rows.push_back({key.first, key.second, a.rrmse, a.mae, a.count});
  }
  if (rows.empty()) throw EvaluationError("summarize: every record failed");
  return rows;
}

inline constexpr std::string_view kAggregateHeader = "method,level,rrmse_mean,rrmse_std,mae_mean,mae_std,count";

inline void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& a : rows) {
    out << a.method << ',' << format_number(a.level) << ',' << format_number(a.rrmse.mean) << ','
        << format_number(a.rrmse.std) << ',' << format_number(a.mae.mean) << ',' << format_number(a.mae.std) << ','
        << a.count << '\n';
  }
}

inline std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kAggregateHeader) throw DataError("read_aggregate_csv: unexpected header");
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 7) throw DataError("read_aggregate_csv: wrong field count");
    AggregateRow a;
    a.method = std::string(f[0]);
    a.level = parse_number(f[1], "level");
    a.rrmse = {parse_number(f[2], "rrmse_mean"), parse_number(f[3], "rrmse_std")};
    a.mae = {parse_number(f[4], "mae_mean"), parse_number(f[5], "mae_std")};
    a.count = static_cast<std::size_t>(detail::parse_int(f[6], "count"));
    rows.push_back(std::move(a));
  }
  return rows;
}

/// Methods ordered by mean RRMSE within each level (ties by name).
inline std::map<double, std::vector<AggregateRow>> rank_by_level(const std::vector<AggregateRow>& rows) {
  std::map<double, std::vector<AggregateRow>> out;
  for (const auto& a : rows) out[a.level].push_back(a);
  for (auto& [level, list] : out) {
    std::sort(list.begin(), list.end(), [](const AggregateRow& x, const AggregateRow& y) {
      return std::tie(x.rrmse.mean, x.method) < std::tie(y.rrmse.mean, y.method);
    });
  }
  return out;
}

inline void write_ranking(std::ostream& out, const std::vector<AggregateRow>& rows) {
  for (const auto& [level, list] : rank_by_level(rows)) {
    out << "missing " << format_number(level) << '\n';
    std::size_t rank = 1;
    for (const auto& a : list) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "  %2zu. %-16s rrmse %.6f +- %.6f   mae %.6f +- %.6f   n=%zu\n", rank++,
                    a.method.c_str(), a.rrmse.mean, a.rrmse.std, a.mae.mean, a.mae.std, a.count);
      out << buf;
    }
  }
}

/// Long format for plotting: one row per (method, level, metric).
inline void write_long_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "method,level,metric,mean,std\n";
  for (const auto& a : rows) {
    out << a.method << ',' << format_number(a.level) << ",rrmse," << format_number(a.rrmse.mean) << ','
        << format_number(a.rrmse.std) << '\n';
    out << a.method << ',' << format_number(a.level) << ",mae," << format_number(a.mae.mean) << ','
        << format_number(a.mae.std) << '\n';
  }
}

/// Writes aggregate.csv, ranking.txt and plot_long.csv into `dir`.
inline std::vector<AggregateRow> summarize_to(const std::filesystem::path& dir, const std::vector<RunRecord>& records) {
  const std::vector<AggregateRow> rows = aggregate_records(records);
  std::filesystem::create_directories(dir);
  std::ofstream agg(dir / "aggregate.csv", std::ios::binary);
  std::ofstream rank(dir / "ranking.txt", std::ios::binary);
  std::ofstream lng(dir / "plot_long.csv", std::ios::binary);
  if (!agg || !rank || !lng) throw DataError("summarize: cannot write into " + dir.string());
  write_aggregate_csv(agg, rows);
  write_ranking(rank, rows);
  write_long_csv(lng, rows);
  return rows;
}

}  // namespace satoris

#endif  // SATORIS_HARNESS_HPP
