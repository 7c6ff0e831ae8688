#include "tdel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "tdel/rng.hpp"

namespace tdel {

double f1_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

ConfusionCounts count_confusion(std::span<const int> predictions, std::span<const int> gold) {
  if (predictions.size() != gold.size())
    throw std::invalid_argument("predictions and gold differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool g = gold[i] == 1;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsReport metrics_from_counts(const ConfusionCounts& c) {
  MetricsReport r;
  r.confusion = c;
  const auto pp = c.tp + c.fp;
  const auto gp = c.tp + c.fn;
  r.precision = pp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(pp);
  r.recall = gp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(gp);
  r.f1 = f1_score(c.tp, c.fp, c.fn);
  r.prevalence = c.total() == 0 ? 0.0 : static_cast<double>(gp) / static_cast<double>(c.total());
  return r;
}

MetricsReport evaluate(std::span<const int> predictions, std::span<const int> gold) {
  if (gold.empty()) throw std::invalid_argument("cannot evaluate an empty set");
  return metrics_from_counts(count_confusion(predictions, gold));
}

std::vector<int> random_baseline(std::size_t n, std::uint64_t seed) {
  std::vector<int> out(n);
  const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < sn; ++i) {
    std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = static_cast<int>(splitmix64(s) >> 63);
  }
  return out;
}

double expected_random_f1(double prevalence) {
  if (prevalence <= 0.0) return 0.0;
  return prevalence / (prevalence + 0.5);
}

std::vector<int> all_positive_baseline(std::size_t n) { return std::vector<int>(n, 1); }

double expected_all_positive_f1(double prevalence) {
  if (prevalence <= 0.0) return 0.0;
  return 2.0 * prevalence / (1.0 + prevalence);
}

ZTest two_proportion_ztest(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("z-test needs two nonempty groups");
  if (k1 > n1 || k2 > n2) throw std::invalid_argument("z-test successes exceed group size");
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  if (pooled <= 0.0 || pooled >= 1.0) return {};
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  const double z = (p1 - p2) / se;
  return {z, std::erfc(std::fabs(z) / std::sqrt(2.0))};
}

std::unordered_set<std::string> parse_lexicon(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string w = line.substr(b, e - b + 1);
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(std::move(w));
  }
  return words;
}

std::unordered_set<std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon: " + path.string());
  return parse_lexicon(in);
}

CurseReport curse_analysis(std::span<const LabeledTweet> tweets,
                           const std::unordered_set<std::string>& lexicon, std::string_view language) {
  if (lexicon.empty()) throw std::invalid_argument("curse lexicon is empty");
  CurseReport r;
  r.lexicon_size = lexicon.size();
  for (const auto& t : tweets) {
    if (!language.empty() && (!t.record.lang || *t.record.lang != language)) continue;
    bool curses = false;
    for (const auto& tok : tokenize(t.record.text)) {
      if (lexicon.contains(tok)) {
        curses = true;
        break;
      }
    }
    if (curses) {
      ++r.n_curse;
      r.k_curse += static_cast<std::uint64_t>(t.label == 1);
    } else {
      ++r.n_clean;
      r.k_clean += static_cast<std::uint64_t>(t.label == 1);
    }
  }
  if (r.n_curse > 0) r.p_curse = static_cast<double>(r.k_curse) / static_cast<double>(r.n_curse);
  if (r.n_clean > 0) r.p_clean = static_cast<double>(r.k_clean) / static_cast<double>(r.n_clean);
  if (r.n_curse > 0 && r.n_clean > 0) r.test = two_proportion_ztest(r.k_curse, r.n_curse, r.k_clean, r.n_clean);
  return r;
}

namespace {

// Only instances where the two systems disagree change under a swap; the
// agreeing ones contribute fixed counts to both sides.
struct RandomizationSetup {
  ConfusionCounts base;  // shared by A and B
  std::vector<std::uint8_t> a_pred, gold;  // per disagreement
  double observed = 0.0;
  ConfusionCounts a_counts, b_counts;
};

RandomizationSetup prepare(std::span<const int> a, std::span<const int> b, std::span<const int> gold,
                           std::size_t rounds) {
  if (a.size() != b.size() || a.size() != gold.size())
    throw std::invalid_argument("compare_models: sequences differ in length");
  if (gold.empty()) throw std::invalid_argument("compare_models: empty input");
  if (rounds < 1000) throw std::invalid_argument("compare_models: need at least 1000 rounds");
  RandomizationSetup s;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == 1;
    if (a[i] == b[i]) {
      const bool p = a[i] == 1;
      if (p && g) ++s.base.tp;
      else if (p) ++s.base.fp;
      else if (g) ++s.base.fn;
    } else {
      s.a_pred.push_back(static_cast<std::uint8_t>(a[i] == 1));
      s.gold.push_back(static_cast<std::uint8_t>(g));
    }
  }
  auto ca = count_confusion(a, gold);
  auto cb = count_confusion(b, gold);
  s.observed = std::fabs(f1_score(ca.tp, ca.fp, ca.fn) - f1_score(cb.tp, cb.fp, cb.fn));
  return s;
}

inline void tally(ConfusionCounts& c, bool pred, bool gold) {
  if (pred && gold) ++c.tp;
  else if (pred) ++c.fp;
  else if (gold) ++c.fn;
}

bool round_at_least_observed(const RandomizationSetup& s, std::uint64_t seed, std::uint64_t round) {
  ConfusionCounts ca = s.base, cb = s.base;
  std::uint64_t state = derive_seed(seed, round);
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < s.a_pred.size(); ++j) {
    if (j % 64 == 0) bits = splitmix64(state);
    const bool swap = (bits >> (j % 64)) & 1U;
    const bool pa = s.a_pred[j] != 0;
    const bool g = s.gold[j] != 0;
    tally(ca, swap ? !pa : pa, g);
    tally(cb, swap ? pa : !pa, g);
  }
  const double d = std::fabs(f1_score(ca.tp, ca.fp, ca.fn) - f1_score(cb.tp, cb.fp, cb.fn));
  return d >= s.observed;
}

}  // namespace

double compare_models_serial(std::span<const int> preds_a, std::span<const int> preds_b,
                             std::span<const int> gold, std::size_t rounds, std::uint64_t seed) {
  const auto s = prepare(preds_a, preds_b, gold, rounds);
  if (s.a_pred.empty()) return 1.0;
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < rounds; ++r) hits += round_at_least_observed(s, seed, r) ? 1 : 0;
  return static_cast<double>(hits + 1) / static_cast<double>(rounds + 1);
}

double compare_models(std::span<const int> preds_a, std::span<const int> preds_b,
                      std::span<const int> gold, std::size_t rounds, std::uint64_t seed) {
  const auto s = prepare(preds_a, preds_b, gold, rounds);
  if (s.a_pred.empty()) return 1.0;
  std::uint64_t hits = 0;
  const auto n = static_cast<std::int64_t>(rounds);
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t r = 0; r < n; ++r)
    hits += round_at_least_observed(s, seed, static_cast<std::uint64_t>(r)) ? 1 : 0;
  return static_cast<double>(hits + 1) / static_cast<double>(rounds + 1);
}

// ---------------------------------------------------------------------------

SubgroupSpec SubgroupSpec::defaults() {
  SubgroupSpec spec;
  spec.bands = {{"followers<1k", 0, 1000},
                {"followers[1k,10k)", 1000, 10000},
                {"followers[10k,100k)", 10000, 100000},
                {"followers>=100k", 100000, std::nullopt}};
  spec.include_verified = true;
  return spec;
}

void SubgroupSpec::validate() const {
  if (bands.empty() && !include_verified) throw std::invalid_argument("subgroup spec has no groups");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& b = bands[i];
    if (b.upper && *b.upper <= b.lower)
      throw std::invalid_argument("band " + b.name + " is empty or inverted");
    if (i > 0) {
      const auto& prev = bands[i - 1];
      if (!prev.upper || *prev.upper > b.lower)
        throw std::invalid_argument("bands " + prev.name + " and " + b.name + " overlap or are unordered");
    }
  }
}

namespace {

std::string band_definition(const FollowerBand& b) {
  std::string s = "followers_count >= " + std::to_string(b.lower);
  if (b.upper) s += " and < " + std::to_string(*b.upper);
  return s;
}

SubgroupResult run_group(std::string name, std::string definition,
                         const std::function<bool(const TweetRecord&)>& member,
                         std::span<const LabeledTweet> train, std::span<const LabeledTweet> test,
                         const TrainAndTest& run, const FeatureMask& mask) {
  SubgroupResult r;
  r.name = std::move(name);
  r.definition = std::move(definition);
  std::vector<LabeledTweet> group_train, group_test;
  for (const auto& t : train)
    if (member(t.record)) group_train.push_back(t);
  for (const auto& t : test)
    if (member(t.record)) group_test.push_back(t);
  r.train_size = group_train.size();
  r.test_size = group_test.size();
  std::vector<int> gold;
  gold.reserve(group_test.size());
  for (const auto& t : group_test) gold.push_back(t.label);
  r.test_positives = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), 1));

  if (group_train.empty()) {
    r.skipped = "no training tweets in group";
    return r;
  }
  if (group_test.empty()) {
    r.skipped = "no test tweets in group";
    return r;
  }
  r.baseline_f1 = evaluate(all_positive_baseline(gold.size()), gold).f1;
  try {
    r.metrics = run(group_train, group_test, mask).metrics;
  } catch (const std::exception& e) {
    r.skipped = e.what();
  }
  return r;
}

}  // namespace

std::vector<SubgroupResult> subgroup_eval(std::span<const LabeledTweet> train,
                                          std::span<const LabeledTweet> test,
                                          const SubgroupSpec& spec, const TrainAndTest& run,
                                          const FeatureMask& mask) {
  spec.validate();
  std::vector<SubgroupResult> out;
  for (const auto& band : spec.bands) {
    auto member = [&band](const TweetRecord& r) {
      return r.followers_count >= band.lower && (!band.upper || r.followers_count < *band.upper);
    };
    out.push_back(run_group(band.name, band_definition(band), member, train, test, run, mask));
  }
  if (spec.include_verified) {
    out.push_back(run_group("verified", "verified == true (overlaps follower bands)",
                            [](const TweetRecord& r) { return r.verified; }, train, test, run, mask));
  }
  return out;
}

AblationReport ablate_social(std::span<const LabeledTweet> train, std::span<const LabeledTweet> test,
                             const TrainAndTest& run, const FeatureMask& base) {
  AblationReport report;
  report.full_f1 = run(train, test, base).metrics.f1;
  if (!base.has(Namespace::social)) return report;
  for (std::size_t slot = 0; slot < kSocialCount; ++slot) {
    if (base.dropped_social.test(slot)) continue;
    const double f1 = run(train, test, base.without_social(slot)).metrics.f1;
    report.entries.push_back({std::string(kSocialKeys[slot]), f1, report.full_f1 - f1});
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const AblationEntry& a, const AblationEntry& b) {
                     return std::fabs(a.delta) > std::fabs(b.delta);
                   });
  return report;
}

std::string_view deletion_type_label(AccountState state) {
  switch (state) {
    case AccountState::active: return "manual deletion";
    case AccountState::protected_account: return "protected";
    case AccountState::deleted: return "account deleted";
  }
  return "?";
}

DeletionTypeReport deletion_type_accuracy(std::span<const UserId> authors,
                                          std::span<const int> predictions,
                                          const AccountStatusProvider& statuses) {
  if (authors.size() != predictions.size())
    throw std::invalid_argument("authors and predictions differ in length");
  DeletionTypeReport r;
  r.rows = {DeletionTypeRow{AccountState::active}, DeletionTypeRow{AccountState::protected_account},
            DeletionTypeRow{AccountState::deleted}};
  for (std::size_t i = 0; i < authors.size(); ++i) {
    const bool hit = predictions[i] == 1;
    auto state = statuses.lookup(authors[i]);
    if (!state) {
      ++r.unknown;
      r.unknown_predicted_deleted += hit ? 1 : 0;
      continue;
    }
    auto& row = r.rows[static_cast<std::size_t>(*state)];
    ++row.count;
    row.predicted_deleted += hit ? 1 : 0;
  }
  std::uint64_t resolved = 0;
  for (const auto& row : r.rows) resolved += row.count;
  for (auto& row : r.rows) {
    row.proportion = resolved == 0 ? 0.0 : static_cast<double>(row.count) / static_cast<double>(resolved);
    row.accuracy = row.count == 0 ? 0.0 : static_cast<double>(row.predicted_deleted) / static_cast<double>(row.count);
  }
  return r;
}

}  // namespace tdel
