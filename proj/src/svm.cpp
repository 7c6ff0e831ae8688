// Dual coordinate descent for the L2-regularized hinge-loss SVM, following the
// shrinking scheme of LIBLINEAR's solve_l2r_l1l2_svc (L1-loss case). The bias
// is an always-on unit feature and is regularized like any other weight.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "tdel/learn.hpp"

namespace tdel {

void validate(const SvmConfig& c) {
  if (!(std::isfinite(c.c) && c.c > 0.0)) throw std::invalid_argument("SVM C must be > 0");
  if (!(std::isfinite(c.positive_weight) && c.positive_weight >= 1.0))
    throw std::invalid_argument("SVM positive-class weight must be >= 1");
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("SVM epsilon must be > 0");
  if (c.max_epochs < 1) throw std::invalid_argument("SVM max_epochs must be >= 1");
}

SvmResult svm_train(const Dataset& data, std::uint32_t dimension, const SvmConfig& config,
                    FeatureMask mask, const SvmObserver& observer) {
  validate(config);
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("SVM training set is empty");
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == n) throw std::invalid_argument("SVM training set has a single class");

  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    double norm = 1.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double v = row.values[k];
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value in row " + std::to_string(i));
      if (row.indices[k] >= dimension) throw std::out_of_range("feature index beyond dimension");
      norm += v * v;
    }
    qd[i] = norm;
  }

  SvmResult result{LinearModel(dimension, mask), std::vector<double>(n, 0.0), 0, false, 0.0};
  LinearModel& model = result.model;
  std::vector<double>& alpha = result.alpha;
  auto w = model.weights();
  double bias = 0.0;

  const double c_pos = config.c * config.positive_weight;
  const double c_neg = config.c;
  auto upper = [&](std::size_t i) { return data.label(i) == 1 ? c_pos : c_neg; };

  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::size_t active = n;
  boost::random::mt19937_64 rng(config.seed);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double pg_max_old = kInf;
  double pg_min_old = -kInf;

  int epoch = 0;
  while (epoch < config.max_epochs) {
    double pg_max = -kInf;
    double pg_min = kInf;

    for (std::size_t s = 0; s < active; ++s) {
      boost::random::uniform_int_distribution<std::size_t> pick(s, active - 1);
      std::swap(index[s], index[pick(rng)]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const auto row = data.row(i);
      const double y = data.label(i) == 1 ? 1.0 : -1.0;
      double dot = bias;
      for (std::size_t k = 0; k < row.size(); ++k) dot += w[row.indices[k]] * row.values[k];
      const double g = y * dot - 1.0;
      const double ci = upper(i);

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == ci) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }

      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::fabs(pg) > 1.0e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qd[i], 0.0), ci);
        const double d = (alpha[i] - old) * y;
        for (std::size_t k = 0; k < row.size(); ++k) w[row.indices[k]] += d * row.values[k];
        bias += d;
        if (observer) {
          model.set_bias(bias);
          observer(alpha, model);
        }
      }
    }

    ++epoch;
    // Largest projected-gradient magnitude seen this epoch. The max-minus-min
    // spread used for equality-constrained duals can read zero while every
    // coordinate still has the same nonzero gradient, so it is not used here.
    result.final_violation = active == 0 ? 0.0 : std::max(pg_max, -pg_min);
    if (result.final_violation < config.epsilon) {
      if (active == n) {
        result.converged = true;
        break;
      }
      // Unshrink and verify on the full set.
      active = n;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? kInf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -kInf : pg_min;
  }

  model.set_bias(bias);
  result.epochs = epoch;
  return result;
}

double svm_dual_objective(const Dataset& data, std::span<const double> alpha) {
  std::vector<double> w;
  double bias = 0.0;
  double sum_alpha = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    const double ay = alpha[i] * (data.label(i) == 1 ? 1.0 : -1.0);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row.indices[k] >= w.size()) w.resize(row.indices[k] + 1, 0.0);
      w[row.indices[k]] += ay * row.values[k];
    }
    bias += ay;
    sum_alpha += alpha[i];
  }
  double norm = bias * bias;
  for (double v : w) norm += v * v;
  return 0.5 * norm - sum_alpha;
}

}  // namespace tdel
