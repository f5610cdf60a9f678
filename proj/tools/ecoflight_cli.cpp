// ecoflight command-line front end: worldgen, plan, bench, stats.
//
// Exit codes: 0 success, 1 planner found no path, 2 usage or configuration
// error, 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ecoflight.hpp"

namespace {

using namespace ecoflight;

enum ExitCode : int { kOk = 0, kNoPath = 1, kUsage = 2, kIo = 3 };

// Thrown for I/O failures so they map to exit 3 rather than 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Cell parse_cell_flag(const std::string& text, const char* flag) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ValidationError(std::string(flag) + " expects x,y,z integers");
    }
  }
  if (v.size() != 3) throw ValidationError(std::string(flag) + " expects x,y,z");
  return {v[0], v[1], v[2]};
}

unsigned threads_from_env() {
  const char* env = std::getenv("ECOFLIGHT_THREADS");
  if (!env || !*env) return 0;
  try {
    return static_cast<unsigned>(std::stoul(env));
  } catch (const std::exception&) {
    throw ValidationError("ECOFLIGHT_THREADS must be a non-negative integer");
  }
}

struct WorldgenArgs {
  int nx = 50, ny = 50, nz = 20;
  double density = 0.3;
  int max_height = 18;
  int clearance = 1;
  std::uint64_t seed = 42;
  std::string out;
};

int run_worldgen(const WorldgenArgs& a) {
  if (!(a.density >= 0.0 && a.density <= 1.0)) throw ValidationError("--density must lie in [0, 1]");
  if (a.max_height > a.nz - a.clearance - 1)
    throw ValidationError("--max-height must be <= nz - clearance - 1 so every column can be overflown");
  GridWorld world = generate_world(a.nx, a.ny, a.nz, a.density, a.max_height, a.seed, a.clearance);
  auto out = open_out(a.out);
  save_world(world, out);
  check_written(out, a.out);
  std::cout << "wrote " << a.out << ": occupied fraction " << format_sig6(world.occupied_fraction()) << '\n';
  return kOk;
}

struct PlanArgs {
  std::string world;
  std::string params;
  std::string algo = "ecoflight";
  std::string start;
  std::string goal;
  std::string out;
};

int run_plan(const PlanArgs& a) {
  auto algorithm = parse_algorithm(a.algo);
  if (!algorithm) throw ValidationError("unknown --algo '" + a.algo + "'");
  GridWorld world = [&] {
    auto in = open_in(a.world);
    return load_world(in);
  }();
  DroneParams params;
  if (!a.params.empty()) {
    auto in = open_in(a.params);
    params = load_params(in);
  }
  const Cell start = parse_cell_flag(a.start, "--start");
  const Cell goal = parse_cell_flag(a.goal, "--goal");

  const PlanResult result = plan(*algorithm, world, params, start, goal);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    save_plan_result(result, out);
    check_written(out, a.out);
  } else {
    save_plan_result(result, std::cout);
  }
  std::cerr << to_string(result.algorithm) << ": " << to_string(result.status) << ", energy "
            << format_sig6(result.total_energy) << " J, expanded " << result.expanded << ", waypoints "
            << result.path.size() << (result.collision_free ? "" : ", NOT collision-free") << '\n';
  return result.found() ? kOk : kNoPath;
}

struct BenchArgs {
  std::string config;
  std::vector<double> densities;
  std::vector<double> speeds;
  std::optional<int> trials;
  std::optional<int> nx, ny, nz, max_height;
  std::optional<std::uint64_t> master_seed;
  std::vector<std::string> algorithms;
  std::string params;
  bool timing = false;
  std::string out_dir = "bench_out";
};

int run_bench(const BenchArgs& a) {
  BenchConfig cfg;
  if (!a.config.empty()) {
    auto in = open_in(a.config);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("bench config: ") + e.what());
    }
    cfg = bench_config_from_json(doc);
  }
  if (!a.params.empty()) {
    auto in = open_in(a.params);
    cfg.params = load_params(in);
  }
  if (!a.densities.empty()) cfg.densities = a.densities;
  if (!a.speeds.empty()) cfg.speeds = a.speeds;
  if (a.trials) cfg.trials = *a.trials;
  if (a.nx) cfg.nx = *a.nx;
  if (a.ny) cfg.ny = *a.ny;
  if (a.nz) cfg.nz = *a.nz;
  if (a.max_height) cfg.max_height = *a.max_height;
  if (a.master_seed) cfg.master_seed = *a.master_seed;
  if (a.timing) cfg.record_timing = true;
  if (!a.algorithms.empty()) {
    cfg.algorithms.clear();
    for (const auto& name : a.algorithms) {
      auto alg = parse_algorithm(name);
      if (!alg) throw ValidationError("unknown algorithm '" + name + "'");
      cfg.algorithms.push_back(*alg);
    }
  }
  cfg.threads = threads_from_env();
  cfg.validate();

  const auto records = run_trials(cfg);
  const std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  {
    auto out = open_out(dir / "records.csv");
    export_records(records, out, RecordFormat::kCsv);
    check_written(out, dir / "records.csv");
  }
  const auto stats = summarize(records);
  {
    auto out = open_out(dir / "summary.csv");
    write_summary(stats, out);
    check_written(out, dir / "summary.csv");
  }
  std::vector<std::filesystem::path> plots;
  try {
    plots = emit_plot_data(records, dir);
  } catch (const Error& e) {
    throw IoError(e.what());
  }

  std::cout << records.size() << " trial records, " << plots.size() << " plot files in " << dir.string() << '\n';
  for (const auto& row : stats) {
    std::cout << "  d=" << format_sig6(row.density) << " v=" << format_sig6(row.speed) << ' '
              << to_string(row.algorithm) << ": mean " << format_sig6(row.mean) << " J over " << row.feasible_count
              << '/' << row.count << '\n';
  }
  return kOk;
}

struct StatsArgs {
  std::string records;
  std::string out;
};

int run_stats(const StatsArgs& a) {
  std::vector<TrialRecord> records;
  {
    auto in = open_in(a.records);
    records = import_records(in, RecordFormat::kCsv);
  }
  if (records.empty()) throw ValidationError("records file holds no records");
  const auto stats = summarize(records);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    write_summary(stats, out);
    check_written(out, a.out);
  } else {
    write_summary(stats, std::cout);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware drone path planning on 3D column worlds"};
  app.require_subcommand(1);

  WorldgenArgs wg;
  auto* worldgen = app.add_subcommand("worldgen", "Generate a random column world");
  worldgen->add_option("--nx", wg.nx, "Cells along x")->check(CLI::PositiveNumber);
  worldgen->add_option("--ny", wg.ny, "Cells along y")->check(CLI::PositiveNumber);
  worldgen->add_option("--nz", wg.nz, "Cells along z")->check(CLI::PositiveNumber);
  worldgen->add_option("--density", wg.density, "Target occupied-voxel fraction");
  worldgen->add_option("--max-height", wg.max_height, "Tallest column")->check(CLI::PositiveNumber);
  worldgen->add_option("--clearance", wg.clearance, "Cells kept above obstacle tops")->check(CLI::NonNegativeNumber);
  worldgen->add_option("--seed", wg.seed, "Generator seed");
  worldgen->add_option("--out", wg.out, "Output world file")->required();

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one path");
  plan_cmd->add_option("--world", pa.world, "World file")->required();
  plan_cmd->add_option("--params", pa.params, "Drone parameter file (defaults if omitted)");
  plan_cmd->add_option("--algo", pa.algo,
                       "ecoflight | dijkstra_energy | direct_path | direct_distance_astar | rise_and_traverse");
  plan_cmd->add_option("--start", pa.start, "Start cell x,y,z")->required();
  plan_cmd->add_option("--goal", pa.goal, "Goal cell x,y,z")->required();
  plan_cmd->add_option("--out", pa.out, "Result document (stdout if omitted)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run the density x speed benchmark sweep");
  bench->add_option("--config", ba.config, "Bench configuration file");
  bench->add_option("--densities", ba.densities, "Obstacle densities")->delimiter(',');
  bench->add_option("--speeds", ba.speeds, "Cruise speeds in m/s")->delimiter(',');
  bench->add_option("--trials", ba.trials, "Trials per configuration");
  bench->add_option("--nx", ba.nx, "Cells along x");
  bench->add_option("--ny", ba.ny, "Cells along y");
  bench->add_option("--nz", ba.nz, "Cells along z");
  bench->add_option("--max-height", ba.max_height, "Tallest column");
  bench->add_option("--master-seed", ba.master_seed, "Master seed");
  bench->add_option("--algorithms", ba.algorithms, "Algorithms to compare")->delimiter(',');
  bench->add_option("--params", ba.params, "Drone parameter file");
  bench->add_flag("--timing", ba.timing, "Record wall-clock planner times (breaks byte-reproducibility)");
  bench->add_option("--out-dir", ba.out_dir, "Output directory");

  StatsArgs sa;
  auto* stats = app.add_subcommand("stats", "Summarize an exported records CSV");
  stats->add_option("--records", sa.records, "Records CSV")->required();
  stats->add_option("--out", sa.out, "Summary CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*worldgen) return run_worldgen(wg);
    if (*plan_cmd) return run_plan(pa);
    if (*bench) return run_bench(ba);
    if (*stats) return run_stats(sa);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
