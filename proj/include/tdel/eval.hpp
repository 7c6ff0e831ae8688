#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tdel/corpus.hpp"
#include "tdel/features.hpp"

namespace tdel {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Positive-class scores; F1 is 0 when tp == 0.
struct MetricsReport {
  ConfusionCounts confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double prevalence = 0.0;
};

ConfusionCounts count_confusion(std::span<const int> predictions, std::span<const int> gold);
MetricsReport metrics_from_counts(const ConfusionCounts& counts);
/// Throws std::invalid_argument on length mismatch or empty input.
MetricsReport evaluate(std::span<const int> predictions, std::span<const int> gold);
double f1_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);

/// Each label is 1 with probability 1/2; element i depends only on (seed, i).
std::vector<int> random_baseline(std::size_t n, std::uint64_t seed);
/// Precision pi, recall 1/2.
double expected_random_f1(double prevalence);
std::vector<int> all_positive_baseline(std::size_t n);
/// Precision pi, recall 1.
double expected_all_positive_f1(double prevalence);

struct ZTest {
  std::optional<double> z;        // unset when the pooled proportion is 0 or 1
  std::optional<double> p_value;  // two-sided
};

/// Pooled two-proportion z-test of k1/n1 against k2/n2.
ZTest two_proportion_ztest(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

/// One lowercase word per line; '#' starts a comment.
std::unordered_set<std::string> load_lexicon(const std::filesystem::path& path);
std::unordered_set<std::string> parse_lexicon(std::istream& in);

struct CurseReport {
  std::size_t lexicon_size = 0;
  std::uint64_t n_curse = 0, k_curse = 0;
  std::uint64_t n_clean = 0, k_clean = 0;
  std::optional<double> p_curse, p_clean;
  ZTest test;
};

/// A tweet curses iff one of its tokens is in the lexicon. Only records whose
/// lang equals `language` count; an empty `language` disables the filter.
CurseReport curse_analysis(std::span<const LabeledTweet> tweets,
                           const std::unordered_set<std::string>& lexicon,
                           std::string_view language = "en");

/// Paired approximate randomization on F1 with add-one smoothing:
/// p = (1 + #{rounds with |dF1| >= observed}) / (1 + rounds).
/// Rounds run in parallel with per-round derived seeds.
double compare_models(std::span<const int> preds_a, std::span<const int> preds_b,
                      std::span<const int> gold, std::size_t rounds, std::uint64_t seed);
/// Single-threaded reference for compare_models.
double compare_models_serial(std::span<const int> preds_a, std::span<const int> preds_b,
                             std::span<const int> gold, std::size_t rounds, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments that retrain. The learner is injected so this module does not
// depend on any particular training setup.

struct RunOutcome {
  MetricsReport metrics;
  std::vector<int> predictions;  // aligned with the test span
};

using TrainAndTest = std::function<RunOutcome(std::span<const LabeledTweet> train,
                                              std::span<const LabeledTweet> test,
                                              const FeatureMask& mask)>;

struct FollowerBand {
  std::string name;
  std::uint64_t lower = 0;                // inclusive
  std::optional<std::uint64_t> upper;     // exclusive; unset = unbounded
};

struct SubgroupSpec {
  std::vector<FollowerBand> bands;
  bool include_verified = true;

  /// <1k, [1k,10k), [10k,100k), >=100k, verified.
  static SubgroupSpec defaults();
  /// Throws std::invalid_argument when bands are empty or not well-ordered.
  void validate() const;
};

struct SubgroupResult {
  std::string name;
  std::string definition;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t test_positives = 0;
  std::optional<MetricsReport> metrics;
  double baseline_f1 = 0.0;  // all-positive F1 on the group's test set
  std::string skipped;       // non-empty when the group could not be run
};

std::vector<SubgroupResult> subgroup_eval(std::span<const LabeledTweet> train,
                                          std::span<const LabeledTweet> test,
                                          const SubgroupSpec& spec, const TrainAndTest& run,
                                          const FeatureMask& mask = FeatureMask::all());

struct AblationEntry {
  std::string feature;
  double f1_without = 0.0;
  double delta = 0.0;  // F1(full) - F1(without)
};

struct AblationReport {
  double full_f1 = 0.0;
  std::vector<AblationEntry> entries;  // sorted by |delta| descending, stable
};

AblationReport ablate_social(std::span<const LabeledTweet> train, std::span<const LabeledTweet> test,
                             const TrainAndTest& run, const FeatureMask& base = FeatureMask::all());

struct DeletionTypeRow {
  AccountState type;
  std::uint64_t count = 0;
  std::uint64_t predicted_deleted = 0;
  double proportion = 0.0;
  double accuracy = 0.0;
};

struct DeletionTypeReport {
  std::array<DeletionTypeRow, 3> rows;  // active (manual), protected, deleted
  std::uint64_t unknown = 0;
  std::uint64_t unknown_predicted_deleted = 0;
};

/// Inputs are the deleted (gold-positive) tweets only: their authors and the
/// model's predictions. Accuracy equals recall on each subset.
DeletionTypeReport deletion_type_accuracy(std::span<const UserId> authors,
                                          std::span<const int> predictions,
                                          const AccountStatusProvider& statuses);

std::string_view deletion_type_label(AccountState state);

}  // namespace tdel
