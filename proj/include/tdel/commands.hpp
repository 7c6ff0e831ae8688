#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdel/config.hpp"
#include "tdel/corpus.hpp"

namespace tdel {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Stream file -> labeled, time-split corpus with the settings that were used.
struct LoadedCorpus {
  TimeSplit split;
  JoinStats join;
  std::size_t tweets = 0;
  std::size_t skipped = 0;
  std::size_t duplicate_tweets = 0;
  Timestamp horizon{};
  Timestamp boundary{};
};

/// Missing horizon defaults to the latest tweet + 29 days; missing boundary
/// to the created_at at the 90% quantile (so roughly the last tenth is test).
LoadedCorpus load_corpus(const ExperimentConfig& cfg);

std::filesystem::path default_model_path(const ExperimentConfig& cfg);
std::filesystem::path space_path_for(const std::filesystem::path& model_path);

/// Each command writes its report files under cfg.output_dir, prints a
/// human-readable summary to `out`, diagnostics to `err`, and returns an
/// ExitCode. Exceptions from bad data are mapped to kExitData.
int cmd_synth(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& model_path, std::ostream& out,
              std::ostream& err);
int cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& model_path, std::ostream& out,
             std::ostream& err);

inline const std::vector<std::string> kAnalyses = {"subgroups", "ablation", "deletion-types", "curses",
                                                   "compare"};

int cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& model_path,
                const std::vector<std::string>& which, std::ostream& out, std::ostream& err);

}  // namespace tdel
