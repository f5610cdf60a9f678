#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <system_error>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "ecoflight/energy.hpp"
#include "ecoflight/errors.hpp"
#include "ecoflight/format.hpp"
#include "ecoflight/planners.hpp"
#include "ecoflight/rng.hpp"
#include "ecoflight/world.hpp"

namespace ecoflight {

struct BenchConfig {
  std::vector<double> densities{0.30, 0.50, 0.75};
  std::vector<double> speeds{0.3, 3.0};
  int trials = 100;
  int nx = 50;
  int ny = 50;
  int nz = 20;
  int max_height = 18;
  int clearance = 1;
  std::uint64_t master_seed = 42;
  DroneParams params;  // cruise_speed is overridden per sweep point
  std::vector<Algorithm> algorithms{Algorithm::kEcoFlight, Algorithm::kDirectPath, Algorithm::kDirectDistanceAStar,
                                    Algorithm::kRiseAndTraverse};
  // Wall-clock timings make exports non-reproducible, so they are recorded as
  // zero unless asked for.
  bool record_timing = false;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (densities.empty()) throw ValidationError("at least one density is required");
    if (speeds.empty()) throw ValidationError("at least one speed is required");
    if (algorithms.empty()) throw ValidationError("algorithm subset must not be empty");
    if (nx < 1 || ny < 1 || nz < 1) throw ValidationError("world dimensions must be >= 1");
    if (clearance < 0) throw ValidationError("clearance must be >= 0");
    if (max_height < 1 || max_height > nz - clearance - 1)
      throw ValidationError("max_height must lie in [1, nz - clearance - 1] so every column can be overflown");
    for (double d : densities) {
      if (!(d > 0.0 && d <= 1.0)) throw ValidationError("densities must lie in (0, 1]");
      if (d > static_cast<double>(max_height) / nz)
        throw ValidationError("density " + format_double(d) + " exceeds max_height / nz");
    }
    for (double v : speeds)
      if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("speeds must be > 0");
    params.validate();
  }
};

// Per-algorithm result inside a trial.
struct AlgorithmOutcome {
  Algorithm algorithm = Algorithm::kEcoFlight;
  PlanStatus status = PlanStatus::kNoPath;
  double total_energy_j = 0.0;
  double path_length_m = 0.0;
  std::size_t expanded = 0;
  double elapsed_s = 0.0;

  bool feasible() const { return status == PlanStatus::kFound; }
  friend bool operator==(const AlgorithmOutcome&, const AlgorithmOutcome&) = default;
};

struct TrialRecord {
  double density = 0.0;
  double speed = 0.0;
  int trial_index = 0;
  std::uint64_t world_seed = 0;
  std::uint64_t endpoint_seed = 0;
  Cell start;
  Cell goal;
  std::vector<AlgorithmOutcome> outcomes;

  const AlgorithmOutcome* find(Algorithm a) const {
    for (const auto& o : outcomes)
      if (o.algorithm == a) return &o;
    return nullptr;
  }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

enum class SeedStream : std::uint64_t { kWorld = 1, kEndpoints = 2 };

// Deterministic 64-bit seed for one stream of one sweep point.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t density_index, std::uint64_t speed_index,
                                 std::uint64_t trial_index, SeedStream stream) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ density_index);
  h = mix64(h ^ speed_index);
  h = mix64(h ^ trial_index);
  return mix64(h ^ static_cast<std::uint64_t>(stream));
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/*
 * Runs the density x speed x trial sweep. One world and one endpoint pair are
 * drawn per (density, trial) and flown at every speed, so speed comparisons
 * are paired. Planner failures are recorded as no_path. The result is sorted
 * by (density, speed, trial) whatever the thread count.
 */
inline std::vector<TrialRecord> run_trials(const BenchConfig& cfg) {
  cfg.validate();
  struct Task {
    std::size_t density_index;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t di = 0; di < cfg.densities.size(); ++di)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({di, t});

  std::vector<std::vector<TrialRecord>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        const auto [di, trial] = tasks[k];
        const double density = cfg.densities[di];
        // Speed index 0 for both streams: worlds and endpoints are shared across speeds.
        const auto world_seed = derive_seed(cfg.master_seed, di, 0, static_cast<std::uint64_t>(trial), SeedStream::kWorld);
        const auto endpoint_seed =
            derive_seed(cfg.master_seed, di, 0, static_cast<std::uint64_t>(trial), SeedStream::kEndpoints);
        const GridWorld world =
            generate_world(cfg.nx, cfg.ny, cfg.nz, density, cfg.max_height, world_seed, cfg.clearance);
        const auto [start, goal] = sample_endpoints(world, endpoint_seed);

        for (double speed : cfg.speeds) {
          DroneParams params = cfg.params;
          params.cruise_speed = speed;
          TrialRecord rec{density, speed, trial, world_seed, endpoint_seed, start, goal, {}};
          for (Algorithm a : cfg.algorithms) {
            AlgorithmOutcome o;
            o.algorithm = a;
            try {
              const PlanResult r = plan(a, world, params, start, goal);
              o.status = r.status;
              o.total_energy_j = r.total_energy;
              o.path_length_m = r.path_length_m();
              o.expanded = r.expanded;
              o.elapsed_s = cfg.record_timing ? r.elapsed_s : 0.0;
            } catch (const Error&) {
              o.status = PlanStatus::kNoPath;
            }
            rec.outcomes.push_back(o);
          }
          results[k].push_back(std::move(rec));
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const unsigned n_threads = std::min<std::size_t>(resolve_threads(cfg.threads), std::max<std::size_t>(tasks.size(), 1));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<TrialRecord> records;
  for (auto& r : results)
    for (auto& rec : r) records.push_back(std::move(rec));
  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.density, a.speed, a.trial_index) < std::tie(b.density, b.speed, b.trial_index);
  });
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct SummaryRow {
  double density = 0.0;
  double speed = 0.0;
  Algorithm algorithm = Algorithm::kEcoFlight;
  std::size_t count = 0;
  std::size_t feasible_count = 0;
  // Over feasible trials only; NaN when there are none.
  double mean = 0.0;
  double stddev = 0.0;  // population
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

using SummaryStats = std::vector<SummaryRow>;

inline SummaryRow summarize_energies(double density, double speed, Algorithm a, std::size_t count,
                                     std::vector<double> energies) {
  SummaryRow row{density, speed, a, count, energies.size()};
  if (energies.empty()) {
    row.mean = row.stddev = row.median = row.min = row.max = std::nan("");
    return row;
  }
  std::sort(energies.begin(), energies.end());
  const auto n = static_cast<double>(energies.size());
  row.mean = std::accumulate(energies.begin(), energies.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : energies) ss += (e - row.mean) * (e - row.mean);
  row.stddev = std::sqrt(ss / n);
  const std::size_t mid = energies.size() / 2;
  row.median = energies.size() % 2 ? energies[mid] : 0.5 * (energies[mid - 1] + energies[mid]);
  row.min = energies.front();
  row.max = energies.back();
  return row;
}

// Grouped by (density, speed, algorithm) in record order.
inline SummaryStats summarize(std::span<const TrialRecord> records) {
  if (records.empty()) throw ValidationError("cannot summarize an empty record list");
  struct Group {
    std::size_t count = 0;
    std::vector<double> energies;
  };
  std::vector<std::tuple<double, double, Algorithm>> order;
  std::map<std::tuple<double, double, Algorithm>, Group> groups;
  for (const auto& rec : records)
    for (const auto& o : rec.outcomes) {
      const auto key = std::make_tuple(rec.density, rec.speed, o.algorithm);
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) order.push_back(key);
      ++it->second.count;
      if (o.feasible()) it->second.energies.push_back(o.total_energy_j);
    }
  SummaryStats stats;
  for (const auto& key : order) {
    auto& g = groups[key];
    stats.push_back(
        summarize_energies(std::get<0>(key), std::get<1>(key), std::get<2>(key), g.count, std::move(g.energies)));
  }
  return stats;
}

inline const SummaryRow* find_summary(const SummaryStats& stats, double density, double speed, Algorithm a) {
  for (const auto& row : stats)
    if (row.density == density && row.speed == speed && row.algorithm == a) return &row;
  return nullptr;
}

namespace detail {

inline std::string format_stat(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace detail

inline void write_summary(const SummaryStats& stats, std::ostream& out) {
  out << "density,speed,algorithm,count,feasible_count,mean_j,std_j,median_j,min_j,max_j\n";
  for (const auto& r : stats) {
    out << format_double(r.density) << ',' << format_double(r.speed) << ',' << to_string(r.algorithm) << ','
        << r.count << ',' << r.feasible_count << ',' << detail::format_stat(r.mean) << ','
        << detail::format_stat(r.stddev) << ',' << detail::format_stat(r.median) << ','
        << detail::format_stat(r.min) << ',' << detail::format_stat(r.max) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Record files
//
// CSV has one row per (trial, algorithm). Cells are written as "x;y;z". The
// endpoint seed is not part of the CSV layout and reads back as 0; the JSON
// layout carries every field.
// ---------------------------------------------------------------------------

enum class RecordFormat { kCsv, kJson };

inline constexpr std::string_view kRecordCsvHeader =
    "density,speed,trial,world_seed,start,goal,algorithm,status,total_energy_j,path_length_m,expanded,elapsed_s";

namespace detail {

inline std::string format_cell(const Cell& c) {
  return std::to_string(c.x) + ';' + std::to_string(c.y) + ';' + std::to_string(c.z);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

template <class T>
T parse_number(const std::string& s, const std::string& where) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ParseError(where + ": invalid number '" + s + "'");
  return value;
}

inline Cell parse_cell(const std::string& s, const std::string& where) {
  const auto parts = split(s, ';');
  if (parts.size() != 3) throw ParseError(where + ": cell must be x;y;z");
  return {parse_number<int>(parts[0], where), parse_number<int>(parts[1], where), parse_number<int>(parts[2], where)};
}

inline nlohmann::json cell_json(const Cell& c) { return nlohmann::json::array({c.x, c.y, c.z}); }

}  // namespace detail

inline void export_records(std::span<const TrialRecord> records, std::ostream& out, RecordFormat format) {
  if (format == RecordFormat::kCsv) {
    out << kRecordCsvHeader << '\n';
    for (const auto& r : records)
      for (const auto& o : r.outcomes) {
        out << format_double(r.density) << ',' << format_double(r.speed) << ',' << r.trial_index << ','
            << r.world_seed << ',' << detail::format_cell(r.start) << ',' << detail::format_cell(r.goal) << ','
            << to_string(o.algorithm) << ',' << to_string(o.status) << ',' << format_double(o.total_energy_j) << ','
            << format_double(o.path_length_m) << ',' << o.expanded << ',' << format_double(o.elapsed_s) << '\n';
      }
  } else {
    auto doc = nlohmann::json::array();
    for (const auto& r : records) {
      auto outcomes = nlohmann::json::array();
      for (const auto& o : r.outcomes)
        outcomes.push_back({{"algorithm", to_string(o.algorithm)},
                            {"status", to_string(o.status)},
                            {"total_energy_j", o.total_energy_j},
                            {"path_length_m", o.path_length_m},
                            {"expanded", o.expanded},
                            {"elapsed_s", o.elapsed_s}});
      doc.push_back({{"density", r.density},
                     {"speed", r.speed},
                     {"trial", r.trial_index},
                     {"world_seed", r.world_seed},
                     {"endpoint_seed", r.endpoint_seed},
                     {"start", detail::cell_json(r.start)},
                     {"goal", detail::cell_json(r.goal)},
                     {"outcomes", std::move(outcomes)}});
    }
    out << doc.dump(1) << '\n';
  }
  if (!out) throw Error("failed to write records");
}

inline std::vector<TrialRecord> import_records(std::istream& in, RecordFormat format) {
  std::vector<TrialRecord> records;
  if (format == RecordFormat::kJson) {
    try {
      const auto doc = nlohmann::json::parse(in);
      for (const auto& r : doc) {
        TrialRecord rec;
        rec.density = r.at("density").get<double>();
        rec.speed = r.at("speed").get<double>();
        rec.trial_index = r.at("trial").get<int>();
        rec.world_seed = r.at("world_seed").get<std::uint64_t>();
        rec.endpoint_seed = r.at("endpoint_seed").get<std::uint64_t>();
        const auto s = r.at("start").get<std::array<int, 3>>();
        const auto g = r.at("goal").get<std::array<int, 3>>();
        rec.start = {s[0], s[1], s[2]};
        rec.goal = {g[0], g[1], g[2]};
        for (const auto& o : r.at("outcomes")) {
          AlgorithmOutcome out;
          auto a = parse_algorithm(o.at("algorithm").get<std::string>());
          auto st = parse_status(o.at("status").get<std::string>());
          if (!a || !st) throw ParseError("records: unknown algorithm or status");
          out.algorithm = *a;
          out.status = *st;
          out.total_energy_j = o.at("total_energy_j").get<double>();
          out.path_length_m = o.at("path_length_m").get<double>();
          out.expanded = o.at("expanded").get<std::size_t>();
          out.elapsed_s = o.at("elapsed_s").get<double>();
          rec.outcomes.push_back(out);
        }
        records.push_back(std::move(rec));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("records: ") + e.what());
    }
    return records;
  }

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kRecordCsvHeader) throw ParseError("records line 1: unexpected header");
      header_seen = true;
      continue;
    }
    const std::string where = "records line " + std::to_string(line_no);
    const auto f = detail::split(line, ',');
    if (f.size() != 12) throw ParseError(where + ": expected 12 fields, got " + std::to_string(f.size()));

    const auto density = detail::parse_number<double>(f[0], where);
    const auto speed = detail::parse_number<double>(f[1], where);
    const auto trial = detail::parse_number<int>(f[2], where);
    const auto world_seed = detail::parse_number<std::uint64_t>(f[3], where);
    const auto start = detail::parse_cell(f[4], where);
    const auto goal = detail::parse_cell(f[5], where);

    AlgorithmOutcome o;
    auto a = parse_algorithm(f[6]);
    auto st = parse_status(f[7]);
    if (!a) throw ParseError(where + ": unknown algorithm '" + f[6] + "'");
    if (!st) throw ParseError(where + ": unknown status '" + f[7] + "'");
    o.algorithm = *a;
    o.status = *st;
    o.total_energy_j = detail::parse_number<double>(f[8], where);
    o.path_length_m = detail::parse_number<double>(f[9], where);
    o.expanded = detail::parse_number<std::size_t>(f[10], where);
    o.elapsed_s = detail::parse_number<double>(f[11], where);

    const bool same_trial = !records.empty() && records.back().density == density && records.back().speed == speed &&
                            records.back().trial_index == trial && records.back().world_seed == world_seed &&
                            records.back().start == start && records.back().goal == goal;
    if (!same_trial) records.push_back({density, speed, trial, world_seed, 0, start, goal, {}});
    records.back().outcomes.push_back(o);
  }
  if (!header_seen) throw ParseError("records: missing header");
  return records;
}

// ---------------------------------------------------------------------------
// Plot data: one CSV per (density, speed) pairing. Each trial row holds the
// energy of every algorithm (blank when infeasible); the trailing rows hold
// mean, median, min and max over feasible trials.
// ---------------------------------------------------------------------------

inline std::string plot_file_name(double density, double speed) {
  return "fig_d" + format_double(density) + "_v" + format_double(speed) + ".csv";
}

inline std::vector<std::filesystem::path> emit_plot_data(std::span<const TrialRecord> records,
                                                         const std::filesystem::path& dir) {
  if (records.empty()) throw ValidationError("no records to plot");
  std::vector<Algorithm> algorithms;
  for (const auto& o : records.front().outcomes) algorithms.push_back(o.algorithm);
  if (algorithms.empty()) throw ValidationError("records carry no algorithms");

  std::vector<std::pair<double, double>> pairings;
  for (const auto& r : records) {
    const std::pair key{r.density, r.speed};
    if (std::find(pairings.begin(), pairings.end(), key) == pairings.end()) pairings.push_back(key);
  }

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [density, speed] : pairings) {
    const auto path = dir / plot_file_name(density, speed);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string());

    out << "trial";
    for (auto a : algorithms) out << ',' << to_string(a);
    out << '\n';
    std::map<Algorithm, std::vector<double>> energies;
    std::size_t count = 0;
    for (const auto& r : records) {
      if (r.density != density || r.speed != speed) continue;
      ++count;
      out << r.trial_index;
      for (auto a : algorithms) {
        out << ',';
        const auto* o = r.find(a);
        if (o && o->feasible()) {
          out << format_double(o->total_energy_j);
          energies[a].push_back(o->total_energy_j);
        }
      }
      out << '\n';
    }
    std::vector<SummaryRow> rows;
    for (auto a : algorithms) rows.push_back(summarize_energies(density, speed, a, count, energies[a]));
    auto emit = [&](const char* label, double SummaryRow::*field) {
      out << label;
      for (const auto& row : rows) out << ',' << detail::format_stat(row.*field);
      out << '\n';
    };
    emit("mean", &SummaryRow::mean);
    emit("median", &SummaryRow::median);
    emit("min", &SummaryRow::min);
    emit("max", &SummaryRow::max);
    if (!out) throw Error("failed to write " + path.string());
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Bench configuration documents. Every field is optional.
// ---------------------------------------------------------------------------

inline BenchConfig bench_config_from_json(const nlohmann::json& doc) {
  BenchConfig cfg;
  try {
    if (!doc.is_object()) throw ParseError("bench config must be an object");
    if (doc.contains("densities")) cfg.densities = doc["densities"].get<std::vector<double>>();
    if (doc.contains("speeds")) cfg.speeds = doc["speeds"].get<std::vector<double>>();
    if (doc.contains("trials")) cfg.trials = doc["trials"].get<int>();
    if (doc.contains("nx")) cfg.nx = doc["nx"].get<int>();
    if (doc.contains("ny")) cfg.ny = doc["ny"].get<int>();
    if (doc.contains("nz")) cfg.nz = doc["nz"].get<int>();
    if (doc.contains("max_height")) cfg.max_height = doc["max_height"].get<int>();
    if (doc.contains("clearance")) cfg.clearance = doc["clearance"].get<int>();
    if (doc.contains("master_seed")) cfg.master_seed = doc["master_seed"].get<std::uint64_t>();
    if (doc.contains("record_timing")) cfg.record_timing = doc["record_timing"].get<bool>();
    if (doc.contains("params")) cfg.params = params_from_json(doc["params"]);
    if (doc.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& name : doc["algorithms"]) {
        auto a = parse_algorithm(name.get<std::string>());
        if (!a) throw ParseError("unknown algorithm '" + name.get<std::string>() + "'");
        cfg.algorithms.push_back(*a);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bench config: ") + e.what());
  }
  return cfg;
}

}  // namespace ecoflight
