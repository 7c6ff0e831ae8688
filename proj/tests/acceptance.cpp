// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. The memory criterion re-executes this binary with
// --memory-probe so each measurement starts from a fresh process.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "svm_oracle.hpp"
#include "tdel/corpus.hpp"
#include "tdel/eval.hpp"
#include "tdel/experiment.hpp"
#include "tdel/features.hpp"
#include "tdel/learn.hpp"
#include "tdel/resource.hpp"
#include "tdel/rng.hpp"
#include "tdel/synthetic.hpp"

using namespace tdel;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail, Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s  %s: %s [%.1f s]\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

void baselines() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(2026);
  for (double pi : {0.01, 0.031, 0.1}) {
    std::vector<int> gold(1000000);
    std::bernoulli_distribution coin(pi);
    for (auto& g : gold) g = coin(rng) ? 1 : 0;
    const double maj = 100 * evaluate(all_positive_baseline(gold.size()), gold).f1;
    const double rnd = 100 * evaluate(random_baseline(gold.size(), derive_seed(7, 3)), gold).f1;
    const double maj_cf = 100 * 2 * pi / (1 + pi);
    const double rnd_cf = 100 * pi / (pi + 0.5);
    ok = ok && std::fabs(maj - maj_cf) <= 0.3 && std::fabs(rnd - rnd_cf) <= 0.3;
    detail += fmt("pi=%.3f majority %.2f/%.2f random %.2f/%.2f; ", pi, maj, maj_cf, rnd, rnd_cf);
  }
  const std::string maj031 = fmt("%.1f", 100 * expected_all_positive_f1(0.031));
  const std::string rnd031 = fmt("%.1f", 100 * expected_random_f1(0.031));
  ok = ok && maj031 == "6.0" && rnd031 == "5.8";
  detail += "pi=0.031 rounds to " + maj031 + " and " + rnd031;
  ok = ok && std::chrono::duration<double>(Clock::now() - start).count() < 60;
  report(ok, "baseline closed forms", detail, start);
}

// ---------------------------------------------------------------------------

void pa_invariants() {
  const auto start = Clock::now();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint32_t dim = 20;
  std::size_t noop_fail = 0, margin_fail = 0, clip_fail = 0, noops = 0;
  double worst_margin = 0.0;
  const PaVariant variants[] = {PaVariant::pa, PaVariant::pa1, PaVariant::pa2};
  for (int trial = 0; trial < 100000; ++trial) {
    LinearModel model(dim);
    auto w = model.weights();
    for (auto& v : w) v = normal(rng);
    model.set_bias(normal(rng));
    std::vector<FeatureVector::Entry> entries;
    for (std::uint32_t j = 0; j < dim; ++j)
      if (unit(rng) < 0.3) entries.push_back({j, 3 * normal(rng)});
    if (entries.empty()) entries.push_back({0, 1.0});
    const FeatureVector x(entries);
    const int y = unit(rng) < 0.5 ? 1 : -1;
    PAConfig cfg;
    cfg.variant = variants[trial % 3];
    cfg.c = std::exp(4 * normal(rng) / 3);
    cfg.positive_weight = 1 + 9 * unit(rng);
    if (trial % 4 == 0) {
      // Force zero loss by moving the bias past the margin.
      model.set_bias(model.bias() + y * (1.5 - y * model.score(x.view())) + y * unit(rng));
    }
    const LinearModel before = model;
    const double margin_before = y * model.score(x.view());
    const auto step = pa_update(model, x.view(), y, cfg);
    if (margin_before >= 1.0) {
      ++noops;
      if (!(model == before) || step.loss != 0.0 || step.tau != 0.0) ++noop_fail;
      continue;
    }
    if (cfg.variant == PaVariant::pa) {
      const double m = y * model.score(x.view());
      worst_margin = std::max(worst_margin, std::fabs(m - 1.0));
      if (std::fabs(m - 1.0) > 1e-9) ++margin_fail;
    }
    if (cfg.variant == PaVariant::pa1) {
      const double c_eff = y > 0 ? cfg.positive_weight * cfg.c : cfg.c;
      if (step.tau > c_eff * (1 + 1e-15)) ++clip_fail;
    }
  }
  const bool ok = noop_fail == 0 && margin_fail == 0 && clip_fail == 0 && noops > 0 &&
                  std::chrono::duration<double>(Clock::now() - start).count() < 60;
  report(ok, "PA update invariants",
         fmt("1e5 trials, %zu zero-loss no-ops (%zu changed), worst |margin-1| %.2e (%zu over 1e-9), "
             "%zu PA-I steps above C'",
             noops, noop_fail, worst_margin, margin_fail, clip_fail),
         start);
}

// ---------------------------------------------------------------------------

void svm_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> grid(-4, 4);
  std::size_t sign_checks = 0, sign_fail = 0, bound_fail = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(2 + rng() % 5);
    const auto dim = static_cast<std::uint32_t>(1 + rng() % 3);
    Dataset data;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<FeatureVector::Entry> e;
      for (std::uint32_t j = 0; j < dim; ++j)
        if (int v = grid(rng); v != 0) e.push_back({j, 0.5 * v});
      data.add(FeatureVector(e), i < 2 ? static_cast<int>(i) : static_cast<int>(rng() % 2));
    }
    for (double c : {0.1, 1.0, 10.0}) {
      const double rho = trial % 3 == 0 ? 3.0 : 1.0;
      const auto exact = testing::svm_dual_oracle(data, dim, c, rho);
      SvmConfig cfg;
      cfg.c = c;
      cfg.positive_weight = rho;
      cfg.epsilon = 1e-9;
      cfg.max_epochs = 200000;
      cfg.seed = static_cast<std::uint64_t>(trial);
      const auto got = svm_train(data, dim, cfg);
      for (std::size_t i = 0; i < n; ++i) {
        const double ci = data.label(i) == 1 ? c * rho : c;
        if (got.alpha[i] < 0.0 || got.alpha[i] > ci) ++bound_fail;
      }
      // Compare decision signs on the training points and a grid of probes.
      std::vector<FeatureVector> probes;
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        std::vector<FeatureVector::Entry> e;
        for (std::size_t k = 0; k < row.size(); ++k) e.push_back({row.indices[k], row.values[k]});
        probes.emplace_back(e);
      }
      for (int p = 0; p < 10; ++p) {
        std::vector<FeatureVector::Entry> e;
        for (std::uint32_t j = 0; j < dim; ++j) e.push_back({j, 0.25 * grid(rng)});
        probes.emplace_back(e);
      }
      for (const auto& x : probes) {
        const double ref = testing::oracle_score(exact, x.view());
        if (std::fabs(ref) < 1e-6) continue;
        ++sign_checks;
        if ((ref > 0) != (got.model.score(x.view()) > 0)) ++sign_fail;
      }
    }
  }
  const bool ok = sign_fail == 0 && bound_fail == 0 &&
                  std::chrono::duration<double>(Clock::now() - start).count() < 120;
  report(ok, "SVM matches exact dual oracle",
         fmt("50 datasets x C in {0.1,1,10}: %zu/%zu signs agree, %zu alphas outside [0,C_i]",
             sign_checks - sign_fail, sign_checks, bound_fail),
         start);
}

// ---------------------------------------------------------------------------

void ztest_oracle() {
  const auto start = Clock::now();
  struct Case {
    std::uint64_t k1, n1, k2, n2;
    double z;
  };
  // statsmodels proportions_ztest, pooled variance, two-sided.
  constexpr Case cases[] = {
      {976, 2744, 5090, 15118, 1.9335173436030149},   {1176, 2653, 1954, 4088, -2.791818433328938},
      {1296, 19864, 778, 8006, -9.191259998131823},   {1497, 17035, 106, 945, -2.5506488442977773},
      {675, 12065, 991, 13111, -6.262070316280553},   {2851, 8534, 1664, 5283, 2.3265156270375544},
      {5424, 10979, 31, 54, -1.1735337338345118},     {2638, 5683, 6566, 14344, 0.8243154822516627},
      {4947, 9964, 2243, 4465, -0.6512622081948629},  {2158, 7741, 353, 1611, 4.9155859939784134},
      {3102, 7180, 592, 1410, 0.8442631168248848},    {2949, 10857, 2437, 8980, 0.038013152317764344},
      {5103, 13279, 1941, 5721, 5.893137450565277},   {1723, 13653, 2503, 19312, -0.9120139115747453},
      {701, 4561, 834, 6091, 2.4387631975522432},     {711, 5783, 488, 7272, 10.97381359315433},
      {5201, 16171, 2983, 11882, 12.849060403854166}, {1590, 12430, 2571, 17489, -4.702737590031075},
      {4739, 10358, 3158, 7773, 6.886850763180569},   {540, 14454, 344, 8290, -1.5531778469195703},
  };
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, std::fabs(*two_proportion_ztest(c.k1, c.n1, c.k2, c.n2).z - c.z));
  const auto ex = two_proportion_ztest(50, 1000, 270, 9000);
  const double ex_dz = std::fabs(*ex.z - 3.4090909090909096);
  const double ex_dp = std::fabs(*ex.p_value - 0.0006517975514402834);
  report(worst < 1e-6 && ex_dz < 1e-9 && ex_dp < 1e-12, "z-test matches statistical oracle",
         fmt("20 tuples, max |dz| %.1e; 50/1000 vs 270/9000 -> z %.6f, p %.3g", worst, *ex.z, *ex.p_value),
         start);
}

// ---------------------------------------------------------------------------

SyntheticConfig planted_config(std::uint64_t tweets) {
  SyntheticConfig c;
  c.n_users = 2000;
  c.n_tweets = tweets;
  c.base_deletion_rate = 0.03;
  c.propensity_concentration = 2.0;
  c.curse_rate = 0.3;
  c.curse_deletion_boost = 0.02;
  // Retweets are the one planted tweet-level social signal. It has to be able
  // to push a typical user's tweet past the F1-optimal threshold, otherwise
  // removing it changes almost no predictions and ablation only sees noise.
  c.retweet_rate = 0.05;
  c.retweet_deletion_boost = 0.4;
  c.spam_account_fraction = 0.02;
  c.window_seconds = 30 * 86400;
  c.seed = 42;
  return c;
}

// At C = 1 the dual solver does not reach epsilon = 0.1 within 1000 epochs on
// this corpus, and a capped run depends on the shuffle seed by several F1
// points. C = 0.01 converges in roughly 150 epochs, so the comparisons below
// measure features rather than optimizer noise.
LearnerConfig planted_svm() {
  LearnerConfig l;
  l.kind = LearnerKind::svm;
  l.svm.c = 0.01;
  l.svm.epsilon = 0.1;
  l.svm.max_epochs = 1000;
  l.svm.seed = derive_seed(42, 1);
  return l;
}

LearnerConfig planted_pa() {
  LearnerConfig l;
  l.kind = LearnerKind::pa;
  l.pa.seed = derive_seed(42, 2);
  return l;
}

void spam_share() {
  const auto start = Clock::now();
  auto cfg = planted_config(1000000);
  cfg.n_users = 100000;
  SyntheticStream stream(cfg);
  std::unordered_map<UserId, bool> spam;
  for (const auto& s : stream.statuses()) spam[s.user_id] = s.status == AccountState::deleted;
  SyntheticEvent ev;
  std::uint64_t deleted = 0, spam_deleted = 0;
  while (stream.next(ev)) {
    if (!ev.notice) continue;
    ++deleted;
    spam_deleted += spam[ev.tweet.user_id];
  }
  const double share = static_cast<double>(spam_deleted) / static_cast<double>(deleted);
  const double expected = expected_spam_share(cfg);
  report(std::fabs(share - expected) / expected <= 0.10, "generator spam share",
         fmt("1M tweets: measured %.4f vs analytic %.4f (%.1f%% relative)", share, expected,
             100 * std::fabs(share - expected) / expected),
         start);
}

void planted_recovery() {
  const auto start = Clock::now();
  const auto cfg = planted_config(1000000);
  auto corpus = generate_synthetic(cfg);
  const auto statuses = corpus.statuses;
  auto labeled = join_labels(std::move(corpus.tweets), corpus.notices, parse_timestamp("2012-03-01T00:00:00Z"));
  corpus.notices.clear();
  corpus.notices.shrink_to_fit();

  // (e) uses the whole labeled corpus: the planted gap is a population
  // property, so there is no reason to throw away the training tweets.
  {
    const auto t = Clock::now();
    const auto lexicon = load_lexicon(TDEL_LEXICON_PATH);
    const auto c = curse_analysis(labeled, lexicon, "en");
    const double gap = *c.p_curse - *c.p_clean;
    report(std::fabs(gap - 0.02) <= 0.004 && c.test.p_value && *c.test.p_value < 0.01,
           "planted (e) curse gap recovered",
           fmt("P(del|curse) %.4f (n=%llu) - P(del|clean) %.4f (n=%llu) = %.4f, z %.2f, p %.2g", *c.p_curse,
               static_cast<unsigned long long>(c.n_curse), *c.p_clean, static_cast<unsigned long long>(c.n_clean),
               gap, *c.test.z, *c.test.p_value),
           t);
  }

  auto split = split_by_time(std::move(labeled), parse_timestamp("2012-01-22T00:00:00Z"));
  const auto& train = split.train;
  const auto& test = split.test;
  std::vector<int> gold;
  for (const auto& t : test) gold.push_back(t.label);
  const double majority = evaluate(all_positive_baseline(gold.size()), gold).f1;

  auto run = [&](const LearnerConfig& l, const FeatureMask& mask) {
    auto sys = train_system(train, mask, l, 0.1);
    auto out = test_system(sys.space, sys.model, test);
    return std::make_pair(std::move(sys), std::move(out));
  };

  auto t = Clock::now();
  const auto [svm_sys, svm_out] = run(planted_svm(), FeatureMask::all());
  const double svm_f1 = svm_out.metrics.f1;
  report(svm_f1 - majority >= 0.10, "planted (a) SVM beats all-positive by 10 points",
         fmt("test F1 %.1f vs all-positive %.1f (%zu train / %zu test, prevalence %.2f%%, %s after %d epochs)",
             100 * svm_f1, 100 * majority, train.size(), test.size(), 100 * svm_out.metrics.prevalence,
             svm_sys.svm_converged ? "converged" : "not converged", svm_sys.svm_epochs),
         t);

  t = Clock::now();
  const auto pa_f1 = run(planted_pa(), FeatureMask::all()).second.metrics.f1;
  report(std::fabs(svm_f1 - pa_f1) <= 0.08, "planted (b) PA within 8 points of SVM",
         fmt("PA %.1f, SVM %.1f, difference %.1f", 100 * pa_f1, 100 * svm_f1, 100 * (svm_f1 - pa_f1)), t);

  t = Clock::now();
  const double user_f1 = run(planted_svm(), FeatureMask::only(Namespace::user)).second.metrics.f1;
  const double social_f1 = run(planted_svm(), FeatureMask::only(Namespace::social)).second.metrics.f1;
  report(user_f1 > social_f1, "planted (c) user ids beat social features",
         fmt("user-only %.1f, social-only %.1f", 100 * user_f1, 100 * social_f1), t);

  t = Clock::now();
  const auto ablation = ablate_social(train, test, make_train_and_test(planted_svm(), 0.1), FeatureMask::all());
  std::string ranking;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, ablation.entries.size()); ++i)
    ranking += fmt("%s%s %+.2f", i ? ", " : "", ablation.entries[i].feature.c_str(), 100 * ablation.entries[i].delta);
  report(!ablation.entries.empty() && ablation.entries.front().feature == "is_retweet",
         "planted (d) ablation ranks is_retweet first", "full F1 " + fmt("%.1f", 100 * ablation.full_f1) + "; top: " + ranking, t);

  t = Clock::now();
  std::unordered_map<UserId, AccountState> states;
  for (const auto& s : statuses) states[s.user_id] = s.status;
  const MapStatusProvider provider(std::move(states));
  std::vector<UserId> authors;
  std::vector<int> preds;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test[i].label != 1) continue;
    authors.push_back(test[i].record.user_id);
    preds.push_back(svm_out.predictions[i]);
  }
  const auto types = deletion_type_accuracy(authors, preds, provider);
  const auto& manual = types.rows[static_cast<std::size_t>(AccountState::active)];
  const auto& gone = types.rows[static_cast<std::size_t>(AccountState::deleted)];
  report(gone.accuracy > manual.accuracy, "planted (f) account-deleted accuracy above manual",
         fmt("account deleted %.1f%% of %llu, manual %.1f%% of %llu", 100 * gone.accuracy,
             static_cast<unsigned long long>(gone.count), 100 * manual.accuracy,
             static_cast<unsigned long long>(manual.count)),
         t);

  const double total = std::chrono::duration<double>(Clock::now() - start).count();
  report(total < 1800, "planted recovery runtime", fmt("%.0f s for (a)-(f)", total), start);
}

// ---------------------------------------------------------------------------
// Memory probes. Each runs in its own process: peak RSS is the process
// high-water mark, so nothing from an earlier measurement leaks in.

struct ProbeResult {
  double peak_mib = 0.0;
  double learner_seconds = 0.0;
  bool converged = false;
  bool ok = false;
};

int memory_probe(const std::string& learner, std::uint64_t tweets) {
  const auto cfg = planted_config(tweets);
  // Pass 1: vocabulary and user table. Both are bounded by the generator's
  // user count and vocabulary, not by the number of tweets.
  FeatureSpace space;
  {
    SyntheticStream stream(cfg);
    SyntheticEvent ev;
    while (stream.next(ev)) space.observe(ev.tweet);
  }
  space.freeze();
  const auto mask = FeatureMask::all();
  const double prevalence = expected_prevalence(cfg);
  const double rho = (1.0 - prevalence) / prevalence;
  SyntheticStream stream(cfg);
  SyntheticEvent ev;
  double seconds = 0.0;
  bool converged = false;
  if (learner == "pa") {
    PAConfig pc;
    pc.positive_weight = rho;
    PaLearner pa(space.dimension(), pc, mask);
    while (stream.next(ev)) {
      const auto x = extract_features(ev.tweet, space, mask);
      const auto t = Clock::now();
      pa.update(x.view(), ev.notice ? 1 : 0);
      seconds += std::chrono::duration<double>(Clock::now() - t).count();
    }
    converged = true;
  } else {
    Dataset data;
    while (stream.next(ev)) data.add(extract_features(ev.tweet, space, mask), ev.notice ? 1 : 0);
    auto sc = planted_svm().svm;
    sc.positive_weight = rho;
    const auto t = Clock::now();
    const auto result = svm_train(data, space.dimension(), sc, mask);
    seconds = std::chrono::duration<double>(Clock::now() - t).count();
    converged = result.converged;
  }
  std::printf("%.3f %.6f %d\n", static_cast<double>(peak_rss_bytes()) / 1048576.0, seconds, converged ? 1 : 0);
  return 0;
}

ProbeResult run_probe(const std::string& self, const std::string& learner, std::uint64_t tweets) {
  ProbeResult r;
  const std::string cmd = self + " --memory-probe " + learner + " " + std::to_string(tweets);
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  int conv = 0;
  r.ok = std::fscanf(p, "%lf %lf %d", &r.peak_mib, &r.learner_seconds, &conv) == 3;
  r.converged = conv == 1;
  const int status = ::pclose(p);
  r.ok = r.ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  return r;
}

void efficiency(const std::string& self) {
  const auto start = Clock::now();
  const auto pa1 = run_probe(self, "pa", 1000000);
  const auto pa2 = run_probe(self, "pa", 2000000);
  const auto svm1 = run_probe(self, "svm", 1000000);
  const auto svm2 = run_probe(self, "svm", 2000000);
  const bool probes_ok = pa1.ok && pa2.ok && svm1.ok && svm2.ok;
  const double pa_ratio = pa2.peak_mib / pa1.peak_mib;
  const double svm_ratio = svm2.peak_mib / svm1.peak_mib;
  report(probes_ok && pa_ratio < 1.2, "PA peak memory flat when corpus doubles",
         fmt("%.1f MiB -> %.1f MiB (x%.3f)", pa1.peak_mib, pa2.peak_mib, pa_ratio), start);
  report(probes_ok && svm_ratio >= 1.8, "SVM peak memory grows with corpus",
         fmt("%.1f MiB -> %.1f MiB (x%.3f)", svm1.peak_mib, svm2.peak_mib, svm_ratio), start);
  // An unconverged capped run is a lower bound on time-to-tolerance.
  report(probes_ok && pa1.learner_seconds < svm1.learner_seconds, "PA single pass faster than SVM",
         fmt("1M instances: PA %.2f s, SVM %.1f s (%s)", pa1.learner_seconds, svm1.learner_seconds,
             svm1.converged ? "converged" : "stopped at epoch cap, so a lower bound"),
         start);
  const double total = std::chrono::duration<double>(Clock::now() - start).count();
  report(total < 1800, "efficiency runtime", fmt("%.0f s", total), start);
}

// ---------------------------------------------------------------------------

int run_shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void reproducibility() {
  const auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / ("tdel_repro_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string cli = TDEL_CLI_PATH;
  bool ok = true;
  std::size_t compared = 0;
  std::string mismatch;
  std::vector<std::string> names;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    fs::create_directories(dir);
    {
      std::ofstream conf(dir / "exp.conf");
      conf << "seed = 11\nstream = stream.jsonl\nstatuses = statuses.tsv\nlexicon = " << TDEL_LEXICON_PATH
           << "\noutput_dir = .\nsynth.n_tweets = 30000\nsynth.n_users = 1500\n"
              "synth.spam_account_fraction = 0.02\nsynth.retweet_deletion_boost = 0.05\n"
              "svm.max_epochs = 50\ncompare.rounds = 1000\ncompare.model_b = pa.tdm\n";
    }
    const std::string c = " -c " + (dir / "exp.conf").string();
    int rc = run_shell(cli + " synth" + c);
    rc |= run_shell(cli + " train" + c + " -m " + (dir / "pa.tdm").string() + " --set learner=pa");
    rc |= run_shell(cli + " train" + c);
    rc |= run_shell(cli + " eval" + c);
    rc |= run_shell(cli + " analyze" + c + " -m " + (dir / "model.tdm").string());
    if (rc != 0) {
      ok = false;
      mismatch = "a command failed in run " + std::to_string(run);
      break;
    }
    if (run == 0) {
      for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        // Timing figures live in train_resources.json on purpose.
        if (name != "train_resources.json" && name != "exp.conf") names.push_back(name);
      }
      continue;
    }
    for (const auto& name : names) {
      ++compared;
      if (slurp(root / "run0" / name) != slurp(dir / name)) {
        ok = false;
        mismatch += " " + name;
      }
    }
  }
  fs::remove_all(root);
  ok = ok && compared >= 10;
  report(ok, "CLI reports byte-identical across runs",
         ok ? fmt("%zu files from synth/train/eval/analyze compared", compared) : "differs:" + mismatch, start);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 4 && std::string(argv[1]) == "--memory-probe") return memory_probe(argv[2], std::stoull(argv[3]));

  std::string only = argc > 1 ? argv[1] : "";
  auto want = [&](const char* name) { return only.empty() || only == name; };
  if (want("baselines")) baselines();
  if (want("pa")) pa_invariants();
  if (want("svm")) svm_oracle();
  if (want("ztest")) ztest_oracle();
  if (want("repro")) reproducibility();
  if (want("spam")) spam_share();
  if (want("planted")) planted_recovery();
  if (want("efficiency")) efficiency(fs::read_symlink("/proc/self/exe").string());
  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "NOT ACCEPTED", failures);
  return failures == 0 ? 0 : 1;
}
