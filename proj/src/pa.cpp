#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "tdel/learn.hpp"

namespace tdel {

std::string_view to_string(PaVariant v) {
  switch (v) {
    case PaVariant::pa: return "pa";
    case PaVariant::pa1: return "pa1";
    case PaVariant::pa2: return "pa2";
  }
  return "?";
}

PaVariant parse_pa_variant(std::string_view text) {
  if (text == "pa" || text == "PA") return PaVariant::pa;
  if (text == "pa1" || text == "PA-I" || text == "pa-i") return PaVariant::pa1;
  if (text == "pa2" || text == "PA-II" || text == "pa-ii") return PaVariant::pa2;
  throw std::invalid_argument("unknown PA variant '" + std::string(text) + "'");
}

void validate(const PAConfig& c) {
  if (!(std::isfinite(c.c) && c.c > 0.0)) throw std::invalid_argument("PA aggressiveness C must be > 0");
  if (!(std::isfinite(c.positive_weight) && c.positive_weight >= 1.0))
    throw std::invalid_argument("PA positive-class weight must be >= 1");
  if (c.epochs < 1) throw std::invalid_argument("PA epochs must be >= 1");
}

PaStep pa_update(LinearModel& model, SparseView x, int y, const PAConfig& config) {
  if (y != 1 && y != -1) throw std::invalid_argument("PA label must be -1 or +1");
  if (x.empty()) return {};
  for (double v : x.values)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");

  const double margin = y * model.score(x);
  const double loss = std::max(0.0, 1.0 - margin);
  if (loss == 0.0) return {0.0, 0.0};

  const double norm = x.squared_norm + 1.0;  // bias feature
  const double c = y > 0 ? config.positive_weight * config.c : config.c;
  double tau = 0.0;
  switch (config.variant) {
    case PaVariant::pa: tau = loss / norm; break;
    case PaVariant::pa1: tau = std::min(c, loss / norm); break;
    case PaVariant::pa2: tau = loss / (norm + 1.0 / (2.0 * c)); break;
  }
  model.add(x, tau * y);
  return {loss, tau};
}

PaLearner::PaLearner(std::uint32_t dimension, const PAConfig& config, FeatureMask mask)
    : model_(dimension, mask), config_(config) {
  validate(config_);
}

PaStep PaLearner::update(SparseView x, int label) {
  const auto step = pa_update(model_, x, label == 1 ? 1 : -1, config_);
  ++seen_;
  if (step.tau != 0.0) ++updates_;
  return step;
}

LinearModel pa_train(const InstanceSource& next, std::uint32_t dimension, const PAConfig& config,
                     FeatureMask mask) {
  PaLearner learner(dimension, config, mask);
  SparseView x;
  int label = 0;
  while (next(x, label)) {
    try {
      learner.update(x, label);
    } catch (const std::exception& e) {
      throw std::invalid_argument("instance " + std::to_string(learner.seen()) + ": " + e.what());
    }
  }
  return learner.take_model();
}

LinearModel pa_train(const Dataset& data, std::uint32_t dimension, const PAConfig& config,
                     FeatureMask mask) {
  PaLearner learner(dimension, config, mask);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  boost::random::mt19937_64 rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch > 0) {
      for (std::size_t i = order.size(); i > 1; --i) {
        boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
      }
    }
    for (auto i : order) {
      try {
        learner.update(data.row(i), data.label(i));
      } catch (const std::exception& e) {
        throw std::invalid_argument("instance " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  return learner.take_model();
}

}  // namespace tdel
