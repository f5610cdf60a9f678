#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ecoflight/bench.hpp"

namespace ecoflight {
namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.nx = 16;
  cfg.ny = 16;
  cfg.nz = 10;
  cfg.max_height = 8;
  cfg.trials = 6;
  cfg.threads = 1;
  return cfg;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ecoflight_bench_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrialRecord fake_record(double energy, int trial = 0) {
  TrialRecord r;
  r.density = 0.3;
  r.speed = 3.0;
  r.trial_index = trial;
  r.outcomes.push_back({Algorithm::kEcoFlight, PlanStatus::kFound, energy, 1.0, 2, 0.0});
  return r;
}

TEST(DeriveSeed, Deterministic) {
  EXPECT_EQ(derive_seed(42, 1, 0, 7, SeedStream::kWorld), derive_seed(42, 1, 0, 7, SeedStream::kWorld));
  EXPECT_NE(derive_seed(42, 1, 0, 7, SeedStream::kWorld), derive_seed(42, 1, 0, 7, SeedStream::kEndpoints));
  EXPECT_NE(derive_seed(42, 1, 0, 7, SeedStream::kWorld), derive_seed(43, 1, 0, 7, SeedStream::kWorld));
  EXPECT_NE(derive_seed(42, 1, 0, 7, SeedStream::kWorld), derive_seed(42, 2, 0, 7, SeedStream::kWorld));
  EXPECT_NE(derive_seed(42, 1, 0, 7, SeedStream::kWorld), derive_seed(42, 1, 1, 7, SeedStream::kWorld));
}

TEST(DeriveSeed, NoCollisionsAcrossTrials) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 10000; ++t)
    for (auto stream : {SeedStream::kWorld, SeedStream::kEndpoints})
      EXPECT_TRUE(seen.insert(derive_seed(42, 0, 0, t, stream)).second) << t;
}

TEST(BenchConfig, Validation) {
  EXPECT_NO_THROW(BenchConfig{}.validate());
  auto cfg = small_config();
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.densities = {0.0};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.speeds = {-1.0};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.algorithms.clear();
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.max_height = 9;  // leaves no flyable layer above the tallest column
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.densities = {0.9};  // above max_height / nz
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(BenchConfig, FromJson) {
  const auto cfg = bench_config_from_json(nlohmann::json::parse(
      R"({"densities": [0.4], "trials": 3, "algorithms": ["ecoflight", "direct_path"], "params": {"m": 2.0}})"));
  EXPECT_EQ(cfg.densities, std::vector<double>{0.4});
  EXPECT_EQ(cfg.trials, 3);
  EXPECT_EQ(cfg.algorithms, (std::vector<Algorithm>{Algorithm::kEcoFlight, Algorithm::kDirectPath}));
  EXPECT_EQ(cfg.params.mass, 2.0);
  EXPECT_EQ(cfg.speeds, (std::vector<double>{0.3, 3.0}));
  EXPECT_THROW(bench_config_from_json(nlohmann::json::parse(R"({"algorithms": ["nope"]})")), ParseError);
  EXPECT_THROW(bench_config_from_json(nlohmann::json::parse(R"({"trials": "many"})")), ParseError);
}

TEST(RunTrials, SingleTrial) {
  auto cfg = small_config();
  cfg.trials = 1;
  cfg.densities = {0.5};
  cfg.speeds = {3.0};
  const auto records = run_trials(cfg);
  ASSERT_EQ(records.size(), 1u);
  ASSERT_EQ(records[0].outcomes.size(), cfg.algorithms.size());
  for (auto a : cfg.algorithms) EXPECT_NE(records[0].find(a), nullptr);
}

TEST(RunTrials, DeterministicAndSortedRegardlessOfThreads) {
  auto cfg = small_config();
  const auto a = run_trials(cfg);
  cfg.threads = 4;
  const auto b = run_trials(cfg);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 3u * 2u * 6u);
  for (std::size_t i = 1; i < a.size(); ++i)
    EXPECT_LE(std::tie(a[i - 1].density, a[i - 1].speed, a[i - 1].trial_index),
              std::tie(a[i].density, a[i].speed, a[i].trial_index));
  for (const auto& r : a)
    for (const auto& o : r.outcomes) EXPECT_EQ(o.elapsed_s, 0.0);
}

TEST(RunTrials, WorldsPairedAcrossSpeeds) {
  const auto records = run_trials(small_config());
  for (const auto& r : records)
    for (const auto& q : records)
      if (r.density == q.density && r.trial_index == q.trial_index) {
        EXPECT_EQ(r.world_seed, q.world_seed);
        EXPECT_EQ(r.start, q.start);
        EXPECT_EQ(r.goal, q.goal);
      }
}

TEST(RunTrials, DominanceAndSpeedEffect) {
  auto cfg = small_config();
  cfg.trials = 12;
  const auto records = run_trials(cfg);
  for (const auto& r : records) {
    const auto* eco = r.find(Algorithm::kEcoFlight);
    const auto* direct = r.find(Algorithm::kDirectPath);
    ASSERT_TRUE(eco && eco->feasible());
    EXPECT_LE(direct->total_energy_j, eco->total_energy_j + 1e-9);
    for (auto a : {Algorithm::kDirectDistanceAStar, Algorithm::kRiseAndTraverse}) {
      const auto* other = r.find(a);
      if (other->feasible()) EXPECT_LE(eco->total_energy_j, other->total_energy_j + 1e-9);
    }
    for (const auto& o : r.outcomes) EXPECT_GE(o.total_energy_j, 0.0);
  }
  // Slow flight costs more on the same world and endpoints.
  for (const auto& slow : records) {
    if (slow.speed != 0.3) continue;
    for (const auto& fast : records)
      if (fast.speed == 3.0 && fast.density == slow.density && fast.trial_index == slow.trial_index &&
          slow.start != slow.goal)
        EXPECT_GT(slow.find(Algorithm::kEcoFlight)->total_energy_j, fast.find(Algorithm::kEcoFlight)->total_energy_j);
  }
}

TEST(Summarize, Basics) {
  const std::vector<TrialRecord> one{fake_record(12.5)};
  auto stats = summarize(one);
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0].mean, 12.5);
  EXPECT_EQ(stats[0].median, 12.5);
  EXPECT_EQ(stats[0].stddev, 0.0);
  EXPECT_EQ(stats[0].count, 1u);

  const std::vector<TrialRecord> two{fake_record(10.0, 0), fake_record(20.0, 1)};
  stats = summarize(two);
  EXPECT_EQ(stats[0].mean, 15.0);
  EXPECT_EQ(stats[0].median, 15.0);
  EXPECT_EQ(stats[0].stddev, 5.0);
  EXPECT_EQ(stats[0].min, 10.0);
  EXPECT_EQ(stats[0].max, 20.0);

  EXPECT_THROW(summarize(std::vector<TrialRecord>{}), ValidationError);
}

TEST(Summarize, InfeasibleTrialsCountedSeparately) {
  std::vector<TrialRecord> records{fake_record(10.0, 0), fake_record(0.0, 1)};
  records[1].outcomes[0].status = PlanStatus::kNoPath;
  const auto stats = summarize(records);
  EXPECT_EQ(stats[0].count, 2u);
  EXPECT_EQ(stats[0].feasible_count, 1u);
  EXPECT_EQ(stats[0].mean, 10.0);
}

TEST(Summarize, MeansOrderedAndWithinRange) {
  auto cfg = small_config();
  cfg.trials = 10;
  const auto records = run_trials(cfg);
  const auto stats = summarize(records);
  for (const auto& row : stats) {
    EXPECT_EQ(row.count, 10u);
    EXPECT_GE(row.mean, row.min);
    EXPECT_LE(row.mean, row.max);
  }
  for (double d : cfg.densities)
    for (double v : cfg.speeds) {
      const double eco = find_summary(stats, d, v, Algorithm::kEcoFlight)->mean;
      EXPECT_LE(eco, find_summary(stats, d, v, Algorithm::kRiseAndTraverse)->mean + 1e-9);
      EXPECT_LE(eco, find_summary(stats, d, v, Algorithm::kDirectDistanceAStar)->mean + 1e-9);
    }
}

TEST(Export, CsvLayoutAndRoundTrip) {
  auto cfg = small_config();
  cfg.trials = 3;
  const auto records = run_trials(cfg);
  std::stringstream buf;
  export_records(records, buf, RecordFormat::kCsv);

  const std::string text = buf.str();
  const std::string header = text.substr(0, text.find('\n'));
  EXPECT_EQ(header, "density,speed,trial,world_seed,start,goal,algorithm,status,total_energy_j,path_length_m,expanded,elapsed_s");
  const auto lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(lines), 1 + records.size() * cfg.algorithms.size());

  auto back = import_records(buf, RecordFormat::kCsv);
  auto expected = records;
  for (auto& r : expected) r.endpoint_seed = 0;  // not part of the CSV layout
  EXPECT_EQ(back, expected);
}

TEST(Export, SingleRecordCsv) {
  const std::vector<TrialRecord> one{fake_record(1.5)};
  std::stringstream buf;
  export_records(one, buf, RecordFormat::kCsv);
  EXPECT_EQ(buf.str(),
            "density,speed,trial,world_seed,start,goal,algorithm,status,total_energy_j,path_length_m,expanded,elapsed_s\n"
            "0.3,3,0,0,0;0;0,0;0;0,ecoflight,found,1.5,1,2,0\n");
}

TEST(Export, JsonRoundTripIsExact) {
  const auto records = run_trials(small_config());
  std::stringstream buf;
  export_records(records, buf, RecordFormat::kJson);
  EXPECT_EQ(import_records(buf, RecordFormat::kJson), records);
}

TEST(Export, ImportRejectsMalformedRows) {
  std::istringstream no_header("0.3,3,0,0,0;0;0,0;0;0,ecoflight,found,1.5,1,2,0\n");
  EXPECT_THROW(import_records(no_header, RecordFormat::kCsv), ParseError);
  std::istringstream bad_field(std::string(kRecordCsvHeader) + "\n0.3,3,0,0,0;0;0,0;0;0,ecoflight,found,abc,1,2,0\n");
  try {
    import_records(bad_field, RecordFormat::kCsv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(import_records(empty, RecordFormat::kCsv), ParseError);
}

TEST(PlotData, OneFilePerPairing) {
  auto cfg = small_config();
  cfg.trials = 4;
  const auto records = run_trials(cfg);
  const auto dir = scratch_dir("plot");
  const auto files = emit_plot_data(records, dir);
  ASSERT_EQ(files.size(), 6u);
  for (double d : cfg.densities)
    for (double v : cfg.speeds) {
      const auto path = dir / plot_file_name(d, v);
      ASSERT_TRUE(std::filesystem::exists(path)) << path;
      std::istringstream in(slurp(path));
      std::string line;
      std::getline(in, line);
      EXPECT_EQ(line, "trial,ecoflight,direct_path,direct_distance_astar,rise_and_traverse");
      int trial_rows = 0;
      std::set<std::string> labels;
      while (std::getline(in, line)) {
        const auto label = line.substr(0, line.find(','));
        if (!label.empty() && std::isdigit(static_cast<unsigned char>(label[0])))
          ++trial_rows;
        else
          labels.insert(label);
      }
      EXPECT_EQ(trial_rows, cfg.trials);
      EXPECT_EQ(labels, (std::set<std::string>{"mean", "median", "min", "max"}));
    }
  EXPECT_EQ(plot_file_name(0.75, 3.0), "fig_d0.75_v3.csv");
  std::filesystem::remove_all(dir);
}

TEST(PlotData, RejectsEmptyInputs) {
  const auto dir = scratch_dir("plot_empty");
  EXPECT_THROW(emit_plot_data(std::vector<TrialRecord>{}, dir), ValidationError);
  TrialRecord bare;
  EXPECT_THROW(emit_plot_data(std::vector<TrialRecord>{bare}, dir), ValidationError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace ecoflight
