#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "snowsim/experiment.hpp"

using namespace snowsim;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  EXPECT_TRUE(f.good()) << p;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "snowsim_test" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny_ensemble(const std::string& out) {
  ExperimentConfig cfg;
  cfg.net.side = 8;
  cfg.steps = 150;
  cfg.tail = 50;
  cfg.seed_count = 2;
  cfg.cases = {{{"p", 0.8}, {"q", 0.5}}, {{"p", 0.5}, {"q", 0.5}}};
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST(ParseConfig, EmptyConfigYieldsDefaults) {
  const ExperimentConfig cfg = parse_config("{}");
  EXPECT_EQ(cfg.net.kind, Network::Kind::SquareLattice);
  EXPECT_EQ(cfg.net.side, 50u);
  EXPECT_EQ(cfg.steps, 5000u);
  EXPECT_EQ(cfg.tail, 500u);
  EXPECT_EQ(cfg.seed_count, 20u);
  EXPECT_EQ(cfg.master_seed, 42u);
  EXPECT_DOUBLE_EQ(cfg.params.qlearn.epsilon, 0.1);
  EXPECT_DOUBLE_EQ(cfg.params.fermi.kappa, 0.1);
}

TEST(ParseConfig, OutOfRangeValueNamesField) {
  try {
    parse_config(R"({"params": {"r": 1.5}})");
    FAIL() << "expected a range error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("r"), std::string::npos);
  }
}

TEST(ParseConfig, UnknownAxisParameterRejected) {
  const std::string text = R"({
    "kind": "sweep2d",
    "axes": [{"param": "kappa2", "min": 0, "max": 1, "points": 3},
             {"param": "p", "min": 0, "max": 1, "points": 3}]
  })";
  try {
    parse_config(text);
    FAIL() << "expected an unknown-parameter error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("kappa2"), std::string::npos);
  }
}

TEST(ParseConfig, UnknownKeysRejected) {
  try {
    parse_config(R"({"stepz": 100})");
    FAIL() << "expected an unknown-key error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("stepz"), std::string::npos);
  }
  EXPECT_THROW(parse_config(R"({"network": {"sides": 10}})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"params": {"rr": 0.5}})"), std::invalid_argument);
  EXPECT_THROW(parse_config("not json"), std::invalid_argument);
  EXPECT_THROW(parse_config("[1,2]"), std::invalid_argument);
}

TEST(ParseConfig, PresetPlusOverrides) {
  const ExperimentConfig cfg =
      parse_config(R"({"preset": "table1-desk", "steps": 300, "tail": 120})");
  EXPECT_EQ(cfg.kind, ExperimentKind::Ensemble);
  EXPECT_EQ(cfg.steps, 300u);
  EXPECT_EQ(cfg.tail, 120u);
  EXPECT_EQ(cfg.cases.size(), 3u);
  EXPECT_EQ(cfg.net.side, 20u);
}

TEST(ParseConfig, SweepNeedsTwoAxes) {
  EXPECT_THROW(parse_config(R"({"kind": "sweep2d"})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({
    "kind": "sweep2d",
    "axes": [{"param": "p", "min": 0, "max": 1, "points": 1},
             {"param": "q", "min": 0, "max": 1, "points": 3}]
  })"),
               std::invalid_argument);
}

TEST(Presets, AllNamedPresetsValidate) {
  for (const std::string name :
       {"fig2", "table1", "table2", "fig3", "fig4", "fig5", "fig6", "fig8", "fig9"}) {
    EXPECT_NO_THROW(make_preset(name).validate()) << name;
    EXPECT_NO_THROW(make_preset(name + "-desk").validate()) << name;
  }
  EXPECT_THROW(make_preset("fig7"), std::invalid_argument);
}

TEST(Presets, PinnedShapes) {
  const ExperimentConfig t1 = make_preset("table1");
  EXPECT_EQ(t1.kind, ExperimentKind::Ensemble);
  EXPECT_EQ(t1.tail, 1000u);
  EXPECT_EQ(t1.cases.size(), 3u);
  EXPECT_EQ(t1.net.side, 50u);

  const ExperimentConfig f8 = make_preset("fig8");
  EXPECT_EQ(f8.kind, ExperimentKind::SnapshotRun);
  EXPECT_EQ(f8.snapshot_times, (std::set<std::uint32_t>{1, 10, 100, 1000}));
  EXPECT_EQ(f8.cases.size(), 3u);
  EXPECT_DOUBLE_EQ(f8.params.transition.p, 1.0);
  EXPECT_DOUBLE_EQ(f8.params.transition.q, 0.0);
  EXPECT_EQ(f8.params.memory.m, 10u);

  const ExperimentConfig t2 = make_preset("table2");
  EXPECT_EQ(t2.kind, ExperimentKind::SingleRun);
  EXPECT_EQ(t2.tail, 4000u);

  const ExperimentConfig f9 = make_preset("fig9");
  EXPECT_EQ(f9.kind, ExperimentKind::SizeSweep);
  EXPECT_EQ(f9.sizes, (std::vector<std::uint32_t>{400, 900, 1600, 2500}));
  EXPECT_EQ(f9.cases.size(), 6u);
}

TEST(ApplyParam, MemoryLengthRoundsFromAxisValue) {
  Params p;
  apply_param(p, "M", 5.6667);
  EXPECT_EQ(p.memory.m, 6u);
  apply_param(p, "M", 1.0);
  EXPECT_EQ(p.memory.m, 1u);
  EXPECT_THROW(apply_param(p, "M", 0.2), std::invalid_argument);
  EXPECT_THROW(apply_param(p, "nope", 1.0), std::invalid_argument);
}

TEST(AxisValues, LinearGrid) {
  const SweepAxis ax{"beta", 0.0, 0.9, 10};
  const auto vs = axis_values(ax);
  ASSERT_EQ(vs.size(), 10u);
  EXPECT_DOUBLE_EQ(vs.front(), 0.0);
  EXPECT_DOUBLE_EQ(vs.back(), 0.9);
  EXPECT_NEAR(vs[1] - vs[0], 0.1, 1e-12);
}

TEST(RunExperiment, EnsembleOutputsAndTheory) {
  const fs::path dir = fresh_dir("ensemble");
  const ExperimentConfig cfg = tiny_ensemble(dir.string());
  const ExperimentResult res = run_experiment(cfg);

  const std::string csv = read_file(dir / "ensemble.csv");
  const auto lines = lines_of(csv);
  ASSERT_EQ(lines.size(), 2u + 2u * 3u);  // comment + header + 2 cases * (2 seeds + grand row)
  EXPECT_EQ(lines[0].rfind("# ", 0), 0u);
  EXPECT_EQ(lines[1], "case,seed,tail_mean_fc,tail_mean_learner_count");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.find("nan"), std::string::npos);
  EXPECT_NE(lines[4].find("all"), std::string::npos);

  ASSERT_EQ(res.theory.size(), 2u);
  const double n = 64.0;
  EXPECT_EQ(res.theory[0].expected_learners, n * (0.5 / (0.8 + 0.5)));
  EXPECT_EQ(res.theory[1].expected_learners, n * (0.5 / (0.5 + 0.5)));
  EXPECT_TRUE(fs::exists(dir / "theory.csv"));
  const auto theory_lines = lines_of(read_file(dir / "theory.csv"));
  ASSERT_EQ(theory_lines.size(), 4u);
  EXPECT_EQ(theory_lines[1], "case,p,q,expected_learners,simulated_learners,relative_error");
}

TEST(RunExperiment, RerunIsByteIdentical) {
  const fs::path dir_a = fresh_dir("bytes_a");
  const fs::path dir_b = fresh_dir("bytes_b");
  ExperimentConfig cfg = tiny_ensemble(dir_a.string());
  const ExperimentResult res_a = run_experiment(cfg);
  cfg.out_dir = dir_b.string();
  const ExperimentResult res_b = run_experiment(cfg);
  ASSERT_EQ(res_a.files.size(), res_b.files.size());
  for (std::size_t k = 0; k < res_a.files.size(); ++k) {
    EXPECT_EQ(read_file(res_a.files[k]), read_file(res_b.files[k]))
        << res_a.files[k] << " vs " << res_b.files[k];
  }
}

TEST(RunExperiment, SmokeSweepGrid) {
  const fs::path dir = fresh_dir("sweep");
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Sweep2D;
  cfg.net.side = 8;
  cfg.steps = 120;
  cfg.tail = 40;
  cfg.seed_count = 2;
  cfg.axes = {{"q", 0.1, 0.9, 3}, {"p", 0.1, 0.9, 3}};
  cfg.out_dir = dir.string();
  const ExperimentResult res = run_experiment(cfg);

  ASSERT_EQ(res.sweep.size(), 9u);
  const auto lines = lines_of(read_file(dir / "sweep.csv"));
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[1], "q,p,mean_fc");
  double prev_a1 = -1.0, prev_a2 = -1.0;
  for (const auto& row : res.sweep) {
    EXPECT_TRUE(row.a1 > prev_a1 || (row.a1 == prev_a1 && row.a2 > prev_a2));
    EXPECT_FALSE(std::isnan(row.mean_fc));
    EXPECT_GE(row.mean_fc, 0.0);
    EXPECT_LE(row.mean_fc, 1.0);
    prev_a1 = row.a1;
    prev_a2 = row.a2;
  }
}

TEST(RunExperiment, SnapshotFilesHaveExactLayout) {
  const fs::path dir = fresh_dir("snaps");
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::SnapshotRun;
  cfg.net.side = 4;
  cfg.steps = 20;
  cfg.tail = 10;
  cfg.seed_count = 1;
  cfg.snapshot_times = {0, 3, 20};
  cfg.out_dir = dir.string();
  run_experiment(cfg);

  for (std::uint32_t t : {0u, 3u, 20u}) {
    const fs::path p = dir / ("snapshot_t" + std::to_string(t) + ".txt");
    ASSERT_TRUE(fs::exists(p)) << p;
    const auto lines = lines_of(read_file(p));
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "t=" + std::to_string(t) + " side=4");
    for (int row = 1; row <= 4; ++row) {
      ASSERT_EQ(lines[row].size(), 4u);
      for (char c : lines[row]) EXPECT_TRUE(c == 'C' || c == 'D') << lines[row];
    }
  }
  EXPECT_TRUE(fs::exists(dir / "series.csv"));
  EXPECT_TRUE(fs::exists(dir / "theory.csv"));  // default p, q are both dynamic
}

TEST(RunExperiment, SingleRunMomentsOnlyWhenDefined) {
  const fs::path dir = fresh_dir("moments");
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::SingleRun;
  cfg.net.side = 10;
  cfg.steps = 400;
  cfg.tail = 300;
  cfg.seed_count = 1;
  cfg.out_dir = dir.string();
  const ExperimentResult res = run_experiment(cfg);
  EXPECT_TRUE(fs::exists(dir / "moments.csv"));
  ASSERT_EQ(res.moments_rows.size(), 2u);
  EXPECT_EQ(res.moments_rows[0].population, "learner");
  EXPECT_EQ(res.moments_rows[1].population, "profiteer");
  EXPECT_NEAR(res.moments_rows[0].report.std, res.moments_rows[1].report.std,
              1e-9 * res.moments_rows[0].report.std);

  const fs::path dir2 = fresh_dir("moments_frozen");
  ExperimentConfig frozen = cfg;
  frozen.out_dir = dir2.string();
  apply_param(frozen.params, "p", 1.0);
  apply_param(frozen.params, "q", 0.0);
  const ExperimentResult res2 = run_experiment(frozen);
  EXPECT_FALSE(fs::exists(dir2 / "moments.csv"));
  EXPECT_FALSE(fs::exists(dir2 / "theory.csv"));
  EXPECT_TRUE(res2.theory.empty());
}

TEST(RunExperiment, SizeSweepSummaries) {
  const fs::path dir = fresh_dir("sizes");
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::SizeSweep;
  cfg.net.side = 10;
  cfg.steps = 150;
  cfg.tail = 50;
  cfg.seed_count = 2;
  cfg.sizes = {16, 25, 36};
  cfg.cases = {{{"p", 0.6}, {"q", 0.5}}};
  cfg.out_dir = dir.string();
  const ExperimentResult res = run_experiment(cfg);
  ASSERT_EQ(res.size_rows.size(), 3u);
  ASSERT_EQ(res.size_summary.size(), 1u);
  EXPECT_GE(res.size_summary[0].range, 0.0);
  const auto lines = lines_of(read_file(dir / "size_sweep.csv"));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[1], "case,n,mean_fc,seed_range,seed_std");
  const auto sum_lines = lines_of(read_file(dir / "size_sweep_summary.csv"));
  ASSERT_EQ(sum_lines.size(), 3u);
  EXPECT_EQ(sum_lines[1], "case,range,std");
}

TEST(RunExperiment, SizeSweepRejectsNonSquareLatticeSizes) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::SizeSweep;
  cfg.sizes = {30};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(RunExperiment, UnwritableOutputFailsBeforeSimulation) {
  ExperimentConfig cfg = tiny_ensemble("/proc/definitely/not/writable");
  cfg.steps = 5000000;  // would take forever if simulation started first
  EXPECT_THROW(run_experiment(cfg), std::runtime_error);
}

TEST(RunExperiment, DeskPresetsRunEndToEnd) {
  const fs::path dir = fresh_dir("desk");
  ExperimentConfig cfg = make_preset("fig3-desk");
  cfg.net.side = 8;
  cfg.steps = 80;
  cfg.tail = 30;
  cfg.axes = {{"q", 0.1, 0.9, 2}, {"p", 0.1, 0.9, 2}};
  cfg.out_dir = (dir / "fig3").string();
  EXPECT_NO_THROW(run_experiment(cfg));

  ExperimentConfig snap = make_preset("fig8-desk");
  snap.net.side = 6;
  snap.steps = 40;
  snap.tail = 20;
  snap.snapshot_times = {1, 10, 40};
  snap.out_dir = (dir / "fig8").string();
  const ExperimentResult res = run_experiment(snap);
  int snap_files = 0;
  for (const auto& f : res.files) {
    if (f.string().find("snapshot") != std::string::npos) ++snap_files;
  }
  EXPECT_EQ(snap_files, 9);  // 3 cases x 3 times
  EXPECT_TRUE(fs::exists(dir / "fig8" / "series_beta0.9_r0.3.csv"));
}

TEST(FmtDouble, ShortestRoundTrip) {
  EXPECT_EQ(fmt_double(0.5), "0.5");
  EXPECT_EQ(fmt_double(0.1), "0.1");
  EXPECT_EQ(fmt_double(1.0), "1");
  for (double v : {961.5384615384615, 2.0 / 3.0, 1e-8, 12345.678}) {
    EXPECT_EQ(std::stod(fmt_double(v)), v);
  }
}
