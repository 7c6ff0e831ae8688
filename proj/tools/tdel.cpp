#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdel/commands.hpp"
#include "tdel/config.hpp"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "key = value configuration file");
  cmd->add_option("-s,--set", c.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("-o,--out", c.out_dir, "output directory (overrides output_dir)");
}

tdel::ExperimentConfig resolve(const Common& c) {
  tdel::KeyValueConfig kv;
  std::filesystem::path base;
  if (!c.config.empty()) {
    kv = tdel::KeyValueConfig::load(c.config);
    base = std::filesystem::path(c.config).parent_path();
  }
  for (const auto& o : c.overrides) kv.set_override(o);
  // Command-line paths are relative to the working directory, not the config file.
  for (const char* key : {"stream", "statuses", "lexicon", "output_dir", "compare.model_b"}) {
    for (const auto& o : c.overrides) {
      if (o.rfind(std::string(key) + "=", 0) == 0) {
        auto v = *kv.get(key);
        kv.set(key, std::filesystem::absolute(v).string());
      }
    }
  }
  if (!c.out_dir.empty()) kv.set("output_dir", std::filesystem::absolute(c.out_dir).string());
  return tdel::build_experiment_config(kv, base);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predict which tweets will be deleted"};
  app.require_subcommand(1);

  Common synth_opts, train_opts, eval_opts, analyze_opts;
  std::string train_model, eval_model, analyze_model, model_b;
  std::vector<std::string> which;

  auto* synth = app.add_subcommand("synth", "generate a synthetic stream, status file and manifest");
  add_common(synth, synth_opts);

  auto* train = app.add_subcommand("train", "fit a model on the training split");
  add_common(train, train_opts);
  train->add_option("-m,--model", train_model, "model file to write (default <output_dir>/model.tdm)");

  auto* eval = app.add_subcommand("eval", "score a model and the baselines on the test split");
  add_common(eval, eval_opts);
  eval->add_option("-m,--model", eval_model, "model file to read");

  auto* analyze = app.add_subcommand("analyze", "run follow-up analyses");
  add_common(analyze, analyze_opts);
  analyze->add_option("-m,--model", analyze_model, "model file (deletion-types, compare)");
  analyze->add_option("--model-b", model_b, "second model for compare");
  analyze->add_option("-w,--which", which, "analyses to run (default: all)")
      ->check(CLI::IsMember(tdel::kAnalyses));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? tdel::kExitOk : tdel::kExitUsage;
  }

  try {
    if (synth->parsed()) return tdel::cmd_synth(resolve(synth_opts), std::cout, std::cerr);
    if (train->parsed()) {
      auto cfg = resolve(train_opts);
      auto path = train_model.empty() ? tdel::default_model_path(cfg) : std::filesystem::path(train_model);
      return tdel::cmd_train(cfg, path, std::cout, std::cerr);
    }
    if (eval->parsed()) {
      auto cfg = resolve(eval_opts);
      auto path = eval_model.empty() ? tdel::default_model_path(cfg) : std::filesystem::path(eval_model);
      return tdel::cmd_eval(cfg, path, std::cout, std::cerr);
    }
    auto cfg = resolve(analyze_opts);
    if (!model_b.empty()) cfg.compare_model_b = std::filesystem::absolute(model_b);
    auto path = analyze_model.empty() ? tdel::default_model_path(cfg) : std::filesystem::path(analyze_model);
    if (which.empty()) {
      // "All" only includes compare when there is a second model to compare against.
      for (const auto& a : tdel::kAnalyses)
        if (a != "compare" || !cfg.compare_model_b.empty()) which.push_back(a);
    }
    return tdel::cmd_analyze(cfg, path, which, std::cout, std::cerr);
  } catch (const tdel::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tdel::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tdel::kExitData;
  }
}
