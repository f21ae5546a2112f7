// Command-line driver for the heteronet shared library. Talks to the core
// exclusively through the C API in heteronet/heteronet.h.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heteronet/heteronet.h"

namespace {

[[noreturn]] void die(hn_status status, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what.c_str(), hn_last_error(),
               hn_status_string(status));
  std::exit(1);
}

void check(hn_status status, const std::string& what) {
  if (status != HN_OK) die(status, what);
}

hn_config* make_config(const std::string& config_path) {
  hn_config* cfg = nullptr;
  if (config_path.empty())
    check(hn_config_create(&cfg), "default config");
  else
    check(hn_config_load(config_path.c_str(), &cfg), "load " + config_path);
  return cfg;
}

hn_train_config* make_train_config(const std::string& path,
                                   std::int64_t steps_override) {
  hn_train_config* tc = nullptr;
  if (path.empty())
    check(hn_train_config_create(&tc), "default train config");
  else
    check(hn_train_config_load(path.c_str(), &tc), "load " + path);
  if (steps_override > 0) {
    char* json = nullptr;
    check(hn_train_config_to_json(tc, &json), "train config json");
    nlohmann::json j = nlohmann::json::parse(json);
    hn_string_free(json);
    hn_train_config_destroy(tc);
    j["total_steps"] = steps_override;
    const std::string patched = j.dump();
    check(hn_train_config_from_json(patched.c_str(), &tc), "patched train config");
  }
  return tc;
}

std::string default_out_root() {
  const char* env = std::getenv("HETERONET_OUT");
  return env ? env : "results";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heteronet: UAV-served heterogeneous LoRa network simulator "
               "and multi-agent trainer"};
  app.require_subcommand(1);

  std::string config_path, train_config_path, out_root = default_out_root();
  std::string out_path, checkpoint_path, trace_path, preset = "hetero";
  std::string baseline_kind;
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t seed = 0;
  std::int64_t steps_override = 0;
  int episodes = 20;

  auto* gen = app.add_subcommand("generate", "Generate a scenario file");
  gen->add_option("--config", config_path, "Scenario config JSON");
  gen->add_option("--seed", seed, "Scenario seed");
  gen->add_option("--out", out_path, "Output scenario file")->required();

  auto* train = app.add_subcommand(
      "train", "Train a preset over one or more seeds and evaluate it");
  train->add_option("--config", config_path, "Scenario config JSON");
  train->add_option("--train-config", train_config_path, "Training config JSON");
  train->add_option("--preset", preset, "hetero | ug_only | g_only");
  train->add_option("--seed", seeds, "Seeds (repeatable)");
  train->add_option("--steps", steps_override, "Override total env steps");
  train->add_option("--episodes", episodes, "Greedy evaluation episodes");
  train->add_option("--out", out_root, "Results root (default $HETERONET_OUT)");

  auto* eval = app.add_subcommand("evaluate", "Greedy-evaluate a checkpoint");
  eval->add_option("--config", config_path, "Scenario config JSON");
  eval->add_option("--train-config", train_config_path, "Training config JSON");
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval->add_option("--preset", preset, "Preset the checkpoint was trained on");
  eval->add_option("--seed", seed, "Scenario/eval seed");
  eval->add_option("--episodes", episodes, "Evaluation episodes");
  eval->add_option("--trace", trace_path, "Write a step trace of episode 0");

  auto* base = app.add_subcommand("baseline", "Evaluate a non-learning baseline");
  base->add_option("kind", baseline_kind, "random | heuristic")->required();
  base->add_option("--config", config_path, "Scenario config JSON");
  base->add_option("--seed", seed, "Scenario/eval seed");
  base->add_option("--episodes", episodes, "Evaluation episodes");
  base->add_option("--trace", trace_path, "Write a step trace of episode 0");

  auto* exp = app.add_subcommand("export", "Split a trace into plot data files");
  exp->add_option("--trace", trace_path, "Input step trace")->required();
  exp->add_option("--out", out_path, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    hn_config* cfg = make_config(config_path);
    hn_scenario* scenario = nullptr;
    check(hn_scenario_generate(cfg, seed, &scenario), "generate scenario");
    check(hn_scenario_save(scenario, out_path.c_str()), "save " + out_path);
    int devices = 0, uavs = 0;
    hn_scenario_counts(scenario, &devices, &uavs);
    std::printf("wrote %s (%d devices, %d uavs, seed %llu)\n", out_path.c_str(),
                devices, uavs, static_cast<unsigned long long>(seed));
    hn_scenario_destroy(scenario);
    hn_config_destroy(cfg);
  } else if (train->parsed()) {
    hn_config* cfg = make_config(config_path);
    hn_train_config* tc = make_train_config(train_config_path, steps_override);
    double mean_ee = 0.0;
    check(hn_run_experiment(cfg, tc, preset.c_str(), seeds.data(), seeds.size(),
                            out_root.c_str(), episodes, &mean_ee),
          "run experiment");
    std::printf("%s: mean EE %.6g bits/J over %zu seed(s); results in %s/%s\n",
                preset.c_str(), mean_ee, seeds.size(), out_root.c_str(),
                preset.c_str());
    hn_train_config_destroy(tc);
    hn_config_destroy(cfg);
  } else if (eval->parsed()) {
    hn_config* cfg = make_config(config_path);
    hn_train_config* tc = make_train_config(train_config_path, 0);
    double mean_ee = 0.0;
    check(hn_evaluate_checkpoint(cfg, tc, checkpoint_path.c_str(),
                                 preset.c_str(), seed, episodes,
                                 trace_path.empty() ? nullptr : trace_path.c_str(),
                                 &mean_ee),
          "evaluate checkpoint");
    std::printf("%s seed %llu: mean EE %.6g bits/J over %d episodes\n",
                preset.c_str(), static_cast<unsigned long long>(seed), mean_ee,
                episodes);
    hn_train_config_destroy(tc);
    hn_config_destroy(cfg);
  } else if (base->parsed()) {
    hn_config* cfg = make_config(config_path);
    double mean_ee = 0.0;
    check(hn_baseline_eval(cfg, baseline_kind.c_str(), seed, episodes,
                           trace_path.empty() ? nullptr : trace_path.c_str(),
                           &mean_ee),
          "baseline " + baseline_kind);
    std::printf("%s seed %llu: mean EE %.6g bits/J\n", baseline_kind.c_str(),
                static_cast<unsigned long long>(seed), mean_ee);
    hn_config_destroy(cfg);
  } else if (exp->parsed()) {
    check(hn_export_trace(trace_path.c_str(), out_path.c_str()), "export trace");
    std::printf("wrote plot data to %s\n", out_path.c_str());
  }
  return 0;
}
