#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tdel/features.hpp"

namespace tdel {

/// Linear scorer s(x) = w.x + bias; predicts 1 iff s(x) > threshold.
/// Weights are held densely over [0, dimension).
class LinearModel {
 public:
  LinearModel() = default;
  explicit LinearModel(std::uint32_t dimension, FeatureMask mask = FeatureMask::all())
      : weights_(dimension, 0.0), mask_(mask) {}

  std::uint32_t dimension() const { return static_cast<std::uint32_t>(weights_.size()); }
  double weight(std::uint32_t index) const { return weights_.at(index); }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }
  double bias() const { return bias_; }
  void set_bias(double b) { bias_ = b; }
  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }
  const FeatureMask& mask() const { return mask_; }
  void set_mask(const FeatureMask& m) { mask_ = m; }
  std::size_t nonzero_weights() const;

  /// Throws std::out_of_range for an index >= dimension.
  double score(SparseView x) const;
  int predict(SparseView x) const { return score(x) > threshold_ ? 1 : 0; }

  /// w += step * x; bias += step.
  void add(SparseView x, double step);

  bool operator==(const LinearModel&) const = default;

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  double threshold_ = 0.0;
  FeatureMask mask_ = FeatureMask::all();
};

inline double score(const LinearModel& model, SparseView x) { return model.score(x); }
inline int predict(const LinearModel& model, SparseView x) { return model.predict(x); }

/// OpenMP-parallel scoring of every row.
std::vector<double> score_batch(const LinearModel& model, const Dataset& data);
/// Single-threaded reference for score_batch.
std::vector<double> score_batch_serial(const LinearModel& model, const Dataset& data);
std::vector<int> predict_batch(const LinearModel& model, const Dataset& data);

// ---------------------------------------------------------------------------
// Passive-aggressive

enum class PaVariant { pa, pa1, pa2 };

std::string_view to_string(PaVariant v);
PaVariant parse_pa_variant(std::string_view text);

struct PAConfig {
  PaVariant variant = PaVariant::pa1;
  double c = 1.0;
  int epochs = 1;
  double positive_weight = 1.0;  // rho: positives use C' = rho * C
  std::uint64_t seed = 0;        // shuffles epochs after the first
};

void validate(const PAConfig& config);

struct PaStep {
  double loss = 0.0;
  double tau = 0.0;
};

/// One closed-form PA update with the bias treated as a unit feature.
/// y must be -1 or +1. Empty x is a no-op. Throws std::invalid_argument on
/// non-finite feature values.
PaStep pa_update(LinearModel& model, SparseView x, int y, const PAConfig& config);

/// Online learner holding only the model: memory is independent of how many
/// instances pass through it.
class PaLearner {
 public:
  PaLearner(std::uint32_t dimension, const PAConfig& config, FeatureMask mask = FeatureMask::all());

  /// label in {0,1}.
  PaStep update(SparseView x, int label);
  std::uint64_t seen() const { return seen_; }
  std::uint64_t updates() const { return updates_; }
  const LinearModel& model() const { return model_; }
  LinearModel take_model() { return std::move(model_); }

 private:
  LinearModel model_;
  PAConfig config_;
  std::uint64_t seen_ = 0;
  std::uint64_t updates_ = 0;
};

/// Pulls instances until `next` returns false. One pass regardless of
/// config.epochs (a stream cannot be replayed).
using InstanceSource = std::function<bool(SparseView& x, int& label)>;
LinearModel pa_train(const InstanceSource& next, std::uint32_t dimension, const PAConfig& config,
                     FeatureMask mask = FeatureMask::all());
/// Epoch 1 visits rows in order; later epochs use a seeded shuffle.
LinearModel pa_train(const Dataset& data, std::uint32_t dimension, const PAConfig& config,
                     FeatureMask mask = FeatureMask::all());

// ---------------------------------------------------------------------------
// Dual coordinate descent SVM (L2-regularized, L1-loss, regularized bias)

struct SvmConfig {
  double c = 1.0;
  double positive_weight = 1.0;
  double epsilon = 0.1;
  int max_epochs = 1000;
  std::uint64_t seed = 1;
};

void validate(const SvmConfig& config);

struct SvmResult {
  LinearModel model;
  std::vector<double> alpha;
  int epochs = 0;
  bool converged = false;
  double final_violation = 0.0;  // max |projected gradient| over the last epoch
};

/// Called after every coordinate step with the current dual variables.
using SvmObserver = std::function<void(std::span<const double> alpha, const LinearModel& model)>;

/// Throws std::invalid_argument on an empty or single-class dataset and on
/// non-finite feature values.
SvmResult svm_train(const Dataset& data, std::uint32_t dimension, const SvmConfig& config,
                    FeatureMask mask = FeatureMask::all(), const SvmObserver& observer = {});

/// Dual objective 0.5*|w_aug|^2 - sum(alpha) for w_aug = sum alpha_i y_i [x_i, 1].
double svm_dual_objective(const Dataset& data, std::span<const double> alpha);

// ---------------------------------------------------------------------------
// Operating point

struct ThresholdChoice {
  double threshold = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // dev set had no positives
};

/// Picks the cut between consecutive distinct scores that maximizes F1
/// (predict 1 iff score > cut). Ties go to the lower cut. Throws on empty or
/// mismatched input.
ThresholdChoice tune_threshold(std::span<const double> scores, std::span<const int> labels);
ThresholdChoice tune_threshold(const LinearModel& model, const Dataset& dev);

// ---------------------------------------------------------------------------
// Persistence

inline constexpr int kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_model(std::ostream& out, const LinearModel& model);
LinearModel read_model(std::istream& in);
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace tdel
