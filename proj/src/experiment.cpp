#include "tdel/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tdel {

std::string_view to_string(LearnerKind kind) { return kind == LearnerKind::svm ? "svm" : "pa"; }

LearnerKind parse_learner_kind(std::string_view text) {
  if (text == "svm") return LearnerKind::svm;
  if (text == "pa") return LearnerKind::pa;
  throw std::invalid_argument("unknown learner '" + std::string(text) + "' (expected svm or pa)");
}

TrainedSystem train_system(std::span<const LabeledTweet> train, const FeatureMask& mask,
                           const LearnerConfig& learner, double dev_fraction) {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  if (!(dev_fraction >= 0.0 && dev_fraction < 1.0))
    throw std::invalid_argument("dev_fraction must be in [0,1)");

  std::vector<LabeledTweet> sorted_copy;
  auto by_time = [](const LabeledTweet& a, const LabeledTweet& b) {
    return a.record.created_at < b.record.created_at;
  };
  if (!std::is_sorted(train.begin(), train.end(), by_time)) {
    sorted_copy.assign(train.begin(), train.end());
    std::stable_sort(sorted_copy.begin(), sorted_copy.end(), by_time);
    train = sorted_copy;
  }

  std::size_t fit_n = train.size();
  if (dev_fraction > 0.0) {
    const auto cut_pos = static_cast<std::size_t>(std::floor((1.0 - dev_fraction) * static_cast<double>(train.size())));
    if (cut_pos < train.size()) {
      // Keep tweets sharing the cut timestamp together in dev.
      const auto cut_time = train[cut_pos].record.created_at;
      fit_n = static_cast<std::size_t>(
          std::lower_bound(train.begin(), train.end(), cut_time,
                           [](const LabeledTweet& t, Timestamp ts) { return t.record.created_at < ts; }) -
          train.begin());
    }
    if (fit_n == 0) throw std::invalid_argument("dev split leaves no tweets to fit on");
  }
  const auto fit = train.subspan(0, fit_n);
  const auto dev = train.subspan(fit_n);

  TrainedSystem sys;
  sys.space = fit_feature_space(fit);
  const auto dim = sys.space.dimension();
  Dataset fit_data = extract_dataset(fit, sys.space, mask);
  sys.fit_size = fit_data.size();
  sys.fit_positives = fit_data.positives();
  if (sys.fit_positives == 0 || sys.fit_positives == sys.fit_size)
    throw std::invalid_argument("training data has a single class");

  sys.positive_weight = 1.0;
  if (learner.auto_positive_weight) {
    sys.positive_weight = std::max(1.0, static_cast<double>(sys.fit_size - sys.fit_positives) /
                                            static_cast<double>(sys.fit_positives));
  }

  StageMeter meter;
  if (learner.kind == LearnerKind::svm) {
    SvmConfig cfg = learner.svm;
    if (learner.auto_positive_weight) cfg.positive_weight = sys.positive_weight;
    else sys.positive_weight = cfg.positive_weight;
    auto result = svm_train(fit_data, dim, cfg, mask);
    sys.svm_epochs = result.epochs;
    sys.svm_converged = result.converged;
    sys.model = std::move(result.model);
  } else {
    PAConfig cfg = learner.pa;
    if (learner.auto_positive_weight) cfg.positive_weight = sys.positive_weight;
    else sys.positive_weight = cfg.positive_weight;
    sys.model = pa_train(fit_data, dim, cfg, mask);
  }
  sys.learner_usage = meter.finish();

  if (!dev.empty()) {
    Dataset dev_data = extract_dataset(dev, sys.space, mask);
    sys.dev_size = dev_data.size();
    sys.dev_positives = dev_data.positives();
    sys.threshold = tune_threshold(sys.model, dev_data);
  }
  sys.model.set_threshold(sys.threshold.threshold);
  return sys;
}

TestOutcome test_system(const FeatureSpace& space, const LinearModel& model,
                        std::span<const LabeledTweet> test) {
  if (test.empty()) throw std::invalid_argument("test set is empty");
  if (model.dimension() != space.dimension())
    throw DataError("model dimension " + std::to_string(model.dimension()) +
                    " does not match feature space dimension " + std::to_string(space.dimension()));
  TestOutcome out;
  const Dataset data = extract_dataset(test, space, model.mask());
  out.scores = score_batch(model, data);
  out.predictions.resize(out.scores.size());
  for (std::size_t i = 0; i < out.scores.size(); ++i)
    out.predictions[i] = out.scores[i] > model.threshold() ? 1 : 0;
  out.gold.assign(data.labels().begin(), data.labels().end());
  out.metrics = evaluate(out.predictions, out.gold);
  return out;
}

TrainAndTest make_train_and_test(const LearnerConfig& learner, double dev_fraction) {
  return [learner, dev_fraction](std::span<const LabeledTweet> train, std::span<const LabeledTweet> test,
                                 const FeatureMask& mask) {
    auto sys = train_system(train, mask, learner, dev_fraction);
    auto outcome = test_system(sys.space, sys.model, test);
    return RunOutcome{outcome.metrics, std::move(outcome.predictions)};
  };
}

}  // namespace tdel
