#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "tdel/eval.hpp"
#include "tdel/experiment.hpp"
#include "tdel/features.hpp"
#include "tdel/synthetic.hpp"

namespace tdel {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "key = value" lines; '#' starts a comment; later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Applies "key=value".
  void set_override(std::string_view assignment);
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  bool contains(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  std::filesystem::path stream;
  std::filesystem::path statuses;
  std::filesystem::path lexicon;
  std::filesystem::path output_dir = "out";
  std::optional<Timestamp> horizon;
  std::optional<Timestamp> split_boundary;
  double dev_fraction = 0.1;
  std::size_t skip_budget = 1000;
  LearnerConfig learner;
  FeatureMask mask = FeatureMask::all();
  SubgroupSpec subgroups = SubgroupSpec::defaults();
  std::string curse_language = "en";
  std::size_t compare_rounds = 10000;
  std::filesystem::path compare_model_b;
  std::uint64_t seed = 42;
  SyntheticConfig synth;
};

/// Unknown keys raise ConfigError. Relative paths resolve against `base_dir`.
ExperimentConfig build_experiment_config(const KeyValueConfig& kv,
                                         const std::filesystem::path& base_dir = {});

/// Every key build_experiment_config understands.
const std::set<std::string>& known_config_keys();

/// "name:lo-hi" items separated by ';' (hi may be empty for unbounded).
std::vector<FollowerBand> parse_bands(std::string_view text);

}  // namespace tdel
