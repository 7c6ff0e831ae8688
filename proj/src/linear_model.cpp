#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "tdel/learn.hpp"

namespace tdel {

std::size_t LinearModel::nonzero_weights() const {
  return static_cast<std::size_t>(
      std::count_if(weights_.begin(), weights_.end(), [](double w) { return w != 0.0; }));
}

double LinearModel::score(SparseView x) const {
  double s = bias_;
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    const auto i = x.indices[k];
    if (i >= weights_.size())
      throw std::out_of_range("feature index " + std::to_string(i) + " beyond model dimension " +
                              std::to_string(weights_.size()));
    s += weights_[i] * x.values[k];
  }
  return s;
}

void LinearModel::add(SparseView x, double step) {
  for (std::size_t k = 0; k < x.indices.size(); ++k) weights_.at(x.indices[k]) += step * x.values[k];
  bias_ += step;
}

std::vector<double> score_batch_serial(const LinearModel& model, const Dataset& data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = model.score(data.row(i));
  return out;
}

std::vector<double> score_batch(const LinearModel& model, const Dataset& data) {
  std::vector<double> out(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
  const auto dim = model.dimension();
  bool out_of_range = false;
#pragma omp parallel for schedule(static) reduction(|| : out_of_range)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto row = data.row(static_cast<std::size_t>(i));
    double s = model.bias();
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      const auto idx = row.indices[k];
      if (idx >= dim) {
        out_of_range = true;
        continue;
      }
      s += model.weights()[idx] * row.values[k];
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  if (out_of_range) throw std::out_of_range("dataset has feature indices beyond model dimension");
  return out;
}

std::vector<int> predict_batch(const LinearModel& model, const Dataset& data) {
  auto scores = score_batch(model, data);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > model.threshold() ? 1 : 0;
  return out;
}

ThresholdChoice tune_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  if (scores.empty()) throw std::invalid_argument("cannot tune a threshold on an empty dev set");

  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) return {0.0, 0.0, true};

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Sweep cuts upward. Everything strictly above the cut is predicted positive.
  // Start with the cut below the smallest score (all positive).
  std::size_t tp = positives;
  std::size_t fp = scores.size() - positives;
  auto f1_of = [&](std::size_t tp_, std::size_t fp_) {
    const std::size_t fn_ = positives - tp_;
    return tp_ == 0 ? 0.0 : 2.0 * static_cast<double>(tp_) / static_cast<double>(2 * tp_ + fp_ + fn_);
  };

  ThresholdChoice best{scores[order.front()] - 1.0, f1_of(tp, fp), false};
  std::size_t k = 0;
  while (k < order.size()) {
    const double v = scores[order[k]];
    while (k < order.size() && scores[order[k]] == v) {
      if (labels[order[k]] == 1)
        --tp;
      else
        --fp;
      ++k;
    }
    const double cut = k < order.size() ? v + (scores[order[k]] - v) / 2.0 : v + 1.0;
    const double f1 = f1_of(tp, fp);
    if (f1 > best.f1) best = {cut, f1, false};
  }
  return best;
}

ThresholdChoice tune_threshold(const LinearModel& model, const Dataset& dev) {
  auto scores = score_batch(model, dev);
  return tune_threshold(scores, dev.labels());
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "tdel-linear-model";

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(std::string_view text) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ModelFormatError("bad number '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ModelFormatError("bad integer '" + std::string(text) + "'");
  return v;
}

// Reads "key value" and returns value.
std::string expect_field(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError("truncated model: missing " + std::string(key));
  if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 || line[key.size()] != ' ')
    throw ModelFormatError("expected '" + std::string(key) + "' header, got '" + line + "'");
  return line.substr(key.size() + 1);
}

}  // namespace

void write_model(std::ostream& out, const LinearModel& model) {
  out << kMagic << '\n';
  out << "version " << kModelFormatVersion << '\n';
  out << "dimension " << model.dimension() << '\n';
  out << "threshold " << format_double(model.threshold()) << '\n';
  out << "mask " << model.mask().to_string() << '\n';
  out << "bias " << format_double(model.bias()) << '\n';
  out << "nonzeros " << model.nonzero_weights() << '\n';
  const auto w = model.weights();
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) out << i << '\t' << format_double(w[i]) << '\n';
  out << "end\n";
}

LinearModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ModelFormatError("not a model file (bad magic)");
  const auto version = parse_uint(expect_field(in, "version"));
  if (version != static_cast<std::uint64_t>(kModelFormatVersion))
    throw ModelFormatError("unsupported model version " + std::to_string(version));
  const auto dimension = parse_uint(expect_field(in, "dimension"));
  if (dimension > 0xFFFFFFFFULL) throw ModelFormatError("dimension too large");
  const double threshold = parse_double(expect_field(in, "threshold"));
  FeatureMask mask;
  try {
    mask = FeatureMask::parse(expect_field(in, "mask"));
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(e.what());
  }
  const double bias = parse_double(expect_field(in, "bias"));
  const auto nonzeros = parse_uint(expect_field(in, "nonzeros"));

  LinearModel model(static_cast<std::uint32_t>(dimension), mask);
  model.set_threshold(threshold);
  model.set_bias(bias);
  auto w = model.weights();
  std::uint64_t previous = 0;
  for (std::uint64_t k = 0; k < nonzeros; ++k) {
    if (!std::getline(in, line)) throw ModelFormatError("truncated model: weights missing");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ModelFormatError("bad weight record '" + line + "'");
    const auto idx = parse_uint(std::string_view(line).substr(0, tab));
    if (idx >= dimension) throw ModelFormatError("weight index beyond dimension");
    if (k > 0 && idx <= previous) throw ModelFormatError("weight indices not increasing");
    previous = idx;
    w[idx] = parse_double(std::string_view(line).substr(tab + 1));
  }
  if (!std::getline(in, line) || line != "end") throw ModelFormatError("truncated model: missing end marker");
  return model;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model: " + path.string());
  write_model(out, model);
  if (!out) throw DataError("write failed: " + path.string());
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model: " + path.string());
  return read_model(in);
}

}  // namespace tdel
