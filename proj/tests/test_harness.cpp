#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "harness.hpp"
#include "test_util.hpp"

using namespace hnet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

TrainConfig tiny_train_config() {
  TrainConfig tc;
  tc.total_steps = 200;
  tc.rollout_length = 20;
  tc.hidden_size = 16;
  tc.checkpoint_interval = 100;
  return tc;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("presets map to the documented layer splits") {
  CHECK(parse_preset("hetero").underground_fraction == 0.5);
  CHECK(parse_preset("hetero").learned);
  CHECK(parse_preset("ug_only").underground_fraction == 1.0);
  CHECK(parse_preset("g_only").underground_fraction == 0.0);
  CHECK_FALSE(parse_preset("random").learned);
  CHECK_FALSE(parse_preset("fixed_heuristic").learned);
  CHECK_THROWS_AS(parse_preset("bogus"), std::invalid_argument);

  ScenarioConfig base;
  base.underground_fraction = 0.5;
  CHECK(apply_preset(base, parse_preset("ug_only")).underground_fraction == 1.0);
  // Baselines keep the base split untouched.
  CHECK(apply_preset(base, parse_preset("random")).underground_fraction == 0.5);
}

TEST_CASE("text formatting round-trips doubles") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, -2.5e17, 70.209304472522920,
                   0.1 + 0.2}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("random evaluation summarizes episodes and writes a trace") {
  Env env(generate_scenario(hnet::test::desk_config(4)));
  std::ostringstream trace;
  const EvalSummary s = evaluate_random(env, 3, 11, &trace);
  REQUIRE(s.episodes.size() == 3);
  double mean = 0.0;
  for (const auto& e : s.episodes) {
    CHECK(e.mean_ee > 0.0);
    CHECK(e.final_ee > 0.0);
    CHECK(e.final_uav_positions.size() == 2);
    mean += e.mean_ee;
  }
  CHECK(s.mean_ee == doctest::Approx(mean / 3.0).epsilon(1e-12));

  const std::string t = trace.str();
  CHECK(t.rfind("# heteronet-trace v1", 0) == 0);
  // 20 V rows, 101 steps x (2 U + 20 D + 1 G) rows, 2 comment lines.
  CHECK(count_lines(t) == 2 + 20 + 101 * (2 + 20 + 1));

  CHECK_THROWS_AS(evaluate_random(env, 0, 1, nullptr), std::invalid_argument);
}

TEST_CASE("random evaluation is reproducible byte for byte") {
  Env env(generate_scenario(hnet::test::desk_config(4)));
  std::ostringstream a, b;
  const EvalSummary sa = evaluate_random(env, 2, 7, &a);
  const EvalSummary sb = evaluate_random(env, 2, 7, &b);
  CHECK(a.str() == b.str());
  CHECK(sa.mean_ee == sb.mean_ee);
  std::ostringstream c;
  evaluate_random(env, 2, 8, &c);
  CHECK(a.str() != c.str());
}

TEST_CASE("heuristic evaluation is a single deterministic episode") {
  const Scenario s = generate_scenario(hnet::test::desk_config(4));
  std::ostringstream trace;
  const EvalSummary sum = evaluate_heuristic(s, &trace);
  REQUIRE(sum.episodes.size() == 1);
  CHECK(sum.stddev_ee == 0.0);
  CHECK(sum.mean_ee == sum.episodes[0].final_ee);
  // Static assignment: only the step-0 snapshot.
  CHECK(count_lines(trace.str()) == 2 + 20 + (2 + 20 + 1));
}

TEST_CASE("greedy actor evaluation accepts checkpoint-shaped actors") {
  const Scenario scenario = generate_scenario(hnet::test::desk_config(4));
  Trainer tr(scenario, tiny_train_config(), 5);
  Env env(scenario);
  const EvalSummary s = evaluate_actors(env, tr.actors(), 2, 3, nullptr);
  CHECK(s.episodes.size() == 2);
  CHECK(s.mean_ee > 0.0);
  // Greedy evaluation is deterministic: same seed, same result.
  const EvalSummary s2 = evaluate_actors(env, tr.actors(), 2, 3, nullptr);
  CHECK(s.mean_ee == s2.mean_ee);

  Env mismatched(generate_scenario(ScenarioConfig{}));
  CHECK_THROWS_AS(evaluate_actors(mismatched, tr.actors(), 1, 1, nullptr),
                  std::invalid_argument);
}

TEST_CASE("baseline experiment writes the full artifact tree") {
  const fs::path root = fresh_dir("hnet_exp_random");
  const ExperimentOutcome out =
      run_experiment("random", {3, 4}, hnet::test::desk_config(0),
                     tiny_train_config(), root.string(), 2);
  CHECK(out.preset == "random");
  REQUIRE(out.seeds.size() == 2);
  for (const auto& s : out.seeds) {
    const fs::path dir = s.dir;
    CHECK(fs::exists(dir / "scenario.txt"));
    CHECK(fs::exists(dir / "trace.tsv"));
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(s.mean_ee > 0.0);
  }
  CHECK(fs::exists(root / "random" / "summary.txt"));
  const std::string summary = slurp(root / "random" / "summary.txt");
  CHECK(summary.find("mean_ee\t" + format_double(out.mean_ee)) != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("trained experiment writes metrics and checkpoints and reruns identically") {
  const fs::path root_a = fresh_dir("hnet_exp_a");
  const fs::path root_b = fresh_dir("hnet_exp_b");
  const ScenarioConfig base = hnet::test::desk_config(0);
  const TrainConfig tc = tiny_train_config();

  const ExperimentOutcome a =
      run_experiment("hetero", {9}, base, tc, root_a.string(), 2);
  const ExperimentOutcome b =
      run_experiment("hetero", {9}, base, tc, root_b.string(), 2);
  CHECK(a.mean_ee == b.mean_ee);

  const fs::path da = fs::path(a.seeds[0].dir);
  const fs::path db = fs::path(b.seeds[0].dir);
  for (const char* f :
       {"scenario.txt", "metrics.tsv", "trace.tsv", "summary.txt",
        "checkpoint.bin"}) {
    CHECK(fs::exists(da / f));
    CHECK(slurp(da / f) == slurp(db / f));  // byte-identical rerun
  }
  // Metrics: header + one row per update (200 steps / 20-step rollouts).
  CHECK(count_lines(slurp(da / "metrics.tsv")) == 1 + 10);
  fs::remove_all(root_a);
  fs::remove_all(root_b);
}

TEST_CASE("experiment rejects bad arguments") {
  CHECK_THROWS_AS(run_experiment("bogus", {1}, hnet::test::desk_config(0),
                                 tiny_train_config(), "/tmp/hnet_unused", 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_experiment("random", {}, hnet::test::desk_config(0),
                                 tiny_train_config(), "/tmp/hnet_unused", 1),
                  std::invalid_argument);
}

TEST_CASE("trace export splits into plot files with exact row counts") {
  // Full reference deployment: 4 UAVs, 100 steps -> 400 path rows.
  ScenarioConfig cfg;
  cfg.rng_seed = 1;
  Env env(generate_scenario(cfg));
  const fs::path dir = fresh_dir("hnet_export");
  fs::create_directories(dir);
  const fs::path trace_path = dir / "trace.tsv";
  {
    std::ofstream trace(trace_path, std::ios::binary);
    evaluate_random(env, 1, 5, &trace);
  }
  export_trajectories(trace_path.string(), (dir / "plots").string());

  const std::string paths = slurp(dir / "plots" / "uav_paths.tsv");
  CHECK(count_lines(paths) == 1 + 400);
  CHECK(paths.rfind("step\tuav\tx\ty\th\n", 0) == 0);
  CHECK(count_lines(slurp(dir / "plots" / "devices.tsv")) == 1 + 80);
  CHECK(count_lines(slurp(dir / "plots" / "associations.tsv")) == 1 + 80);
  fs::remove_all(dir);
}

TEST_CASE("trace export demands at least one movement row") {
  const Scenario s = generate_scenario(hnet::test::desk_config(4));
  const fs::path dir = fresh_dir("hnet_export_static");
  fs::create_directories(dir);
  const fs::path trace_path = dir / "static.tsv";
  {
    std::ofstream trace(trace_path, std::ios::binary);
    evaluate_heuristic(s, &trace);  // step-0 snapshot only
  }
  CHECK_THROWS_AS(export_trajectories(trace_path.string(), (dir / "p").string()),
                  std::runtime_error);
  CHECK_THROWS_AS(export_trajectories((dir / "missing.tsv").string(),
                                      (dir / "p").string()),
                  std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("metrics writer emits one row per entry") {
  const fs::path dir = fresh_dir("hnet_metrics");
  fs::create_directories(dir);
  std::vector<MetricRow> rows = {{100, 1.5, 2.5, -0.1, 0.2, 3.0},
                                 {200, 1.6, 2.6, -0.2, 0.1, 2.9}};
  const fs::path p = dir / "metrics.tsv";
  write_metrics(rows, p.string());
  const std::string text = slurp(p);
  CHECK(count_lines(text) == 3);
  CHECK(text.rfind("step\treturn\tee\tactor_loss\tcritic_loss\tentropy\n", 0) == 0);
  CHECK(text.find("\n100\t1.5\t2.5\t") != std::string::npos);
  fs::remove_all(dir);
}
