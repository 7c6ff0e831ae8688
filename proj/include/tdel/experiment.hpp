#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tdel/corpus.hpp"
#include "tdel/eval.hpp"
#include "tdel/features.hpp"
#include "tdel/learn.hpp"
#include "tdel/resource.hpp"

namespace tdel {

enum class LearnerKind { svm, pa };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view text);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::svm;
  SvmConfig svm;
  PAConfig pa;
  /// When set, the positive-class weight is n_negative / n_positive on the
  /// fitting portion (never below 1).
  bool auto_positive_weight = true;
};

/// Everything produced by one fit: the space, the tuned model and the
/// bookkeeping needed for reports.
struct TrainedSystem {
  FeatureSpace space;
  LinearModel model;
  ThresholdChoice threshold;
  std::size_t fit_size = 0;
  std::size_t fit_positives = 0;
  std::size_t dev_size = 0;
  std::size_t dev_positives = 0;
  double positive_weight = 1.0;
  int svm_epochs = 0;
  bool svm_converged = false;
  StageUsage learner_usage;
};

/// Holds out the latest `dev_fraction` of `train` (by created_at) for
/// threshold tuning, fits the feature space and learner on the rest.
/// With dev_fraction == 0 the threshold stays at 0.
TrainedSystem train_system(std::span<const LabeledTweet> train, const FeatureMask& mask,
                           const LearnerConfig& learner, double dev_fraction);

struct TestOutcome {
  std::vector<double> scores;
  std::vector<int> predictions;
  std::vector<int> gold;
  MetricsReport metrics;
};

TestOutcome test_system(const FeatureSpace& space, const LinearModel& model,
                        std::span<const LabeledTweet> test);

/// Adapter for the retraining analyses in eval.
TrainAndTest make_train_and_test(const LearnerConfig& learner, double dev_fraction);

}  // namespace tdel
