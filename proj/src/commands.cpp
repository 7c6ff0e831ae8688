#include "tdel/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <queue>

#include <json.hpp>

#include "tdel/eval.hpp"
#include "tdel/experiment.hpp"
#include "tdel/learn.hpp"
#include "tdel/rng.hpp"
#include "tdel/synthetic.hpp"

namespace tdel {

namespace {

using Report = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::int64_t kDefaultHorizonDays = 29;

void write_report(const fs::path& path, const Report& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << report.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory: " + dir.string());
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

void put_metrics(Report& r, const std::string& prefix, const MetricsReport& m) {
  r[prefix + ".f1"] = m.f1;
  r[prefix + ".precision"] = m.precision;
  r[prefix + ".recall"] = m.recall;
  r[prefix + ".tp"] = m.confusion.tp;
  r[prefix + ".fp"] = m.confusion.fp;
  r[prefix + ".fn"] = m.confusion.fn;
  r[prefix + ".tn"] = m.confusion.tn;
}

// Maps library exceptions to exit codes, keeping the message on `err`.
template <typename Fn>
int guarded(std::ostream& err, const char* command, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << command << ": config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << command << ": " << e.what() << '\n';
    return kExitData;
  }
}

struct SystemOnDisk {
  FeatureSpace space;
  LinearModel model;
};

SystemOnDisk load_system(const fs::path& model_path) {
  SystemOnDisk s;
  s.model = load_model(model_path);
  s.space = FeatureSpace::load(space_path_for(model_path));
  if (s.model.dimension() != s.space.dimension())
    throw DataError("model dimension " + std::to_string(s.model.dimension()) +
                    " does not match feature space dimension " + std::to_string(s.space.dimension()));
  return s;
}

}  // namespace

fs::path default_model_path(const ExperimentConfig& cfg) { return cfg.output_dir / "model.tdm"; }

fs::path space_path_for(const fs::path& model_path) {
  fs::path p = model_path;
  p += ".space";
  return p;
}

LoadedCorpus load_corpus(const ExperimentConfig& cfg) {
  if (cfg.stream.empty()) throw ConfigError("no stream file configured (key 'stream')");
  auto contents = read_stream_file(cfg.stream, cfg.skip_budget);
  if (contents.tweets.empty()) throw DataError("stream contains no tweets: " + cfg.stream.string());

  LoadedCorpus corpus;
  corpus.tweets = contents.tweets.size();
  corpus.skipped = contents.total_skipped;
  corpus.duplicate_tweets = contents.duplicate_tweets;

  std::vector<Timestamp> times;
  times.reserve(contents.tweets.size());
  for (const auto& t : contents.tweets) times.push_back(t.created_at);
  std::sort(times.begin(), times.end());
  corpus.horizon = cfg.horizon.value_or(times.back() + std::chrono::days{kDefaultHorizonDays});
  corpus.boundary = cfg.split_boundary.value_or(times[(times.size() * 9) / 10]);

  auto labeled = join_labels(std::move(contents.tweets), contents.notices, corpus.horizon, &corpus.join);
  corpus.split = split_by_time(std::move(labeled), corpus.boundary);
  return corpus;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, "synth", [&] {
    try {
      validate(cfg.synth);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    ensure_dir(cfg.output_dir);
    const auto stream_path = cfg.output_dir / "stream.jsonl";
    const auto status_path = cfg.output_dir / "statuses.tsv";

    SyntheticStream gen(cfg.synth);
    {
      std::ofstream status_out(status_path);
      if (!status_out) throw DataError("cannot write " + status_path.string());
      write_account_statuses(status_out, gen.statuses());
    }

    std::ofstream stream_out(stream_path);
    if (!stream_out) throw DataError("cannot write " + stream_path.string());

    // Notices are emitted at their observation time, interleaved with tweets.
    using Pending = std::pair<std::int64_t, TweetId>;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending;
    std::unordered_map<TweetId, UserId> pending_users;
    auto flush_until = [&](std::optional<Timestamp> until) {
      while (!pending.empty() && (!until || pending.top().first <= to_epoch(*until))) {
        auto [when, id] = pending.top();
        pending.pop();
        stream_out << to_stream_line(DeletionNotice{id, pending_users[id], from_epoch(when)}) << '\n';
        pending_users.erase(id);
      }
    };

    std::uint64_t tweets = 0, notices = 0, spam_notices = 0, curse_tweets = 0, curse_notices = 0;
    std::unordered_map<UserId, AccountState> status_of;
    for (const auto& s : gen.statuses()) status_of.emplace(s.user_id, s.status);
    SyntheticEvent ev;
    while (gen.next(ev)) {
      flush_until(ev.tweet.created_at);
      stream_out << to_stream_line(ev.tweet) << '\n';
      ++tweets;
      curse_tweets += ev.has_curse ? 1 : 0;
      if (ev.notice) {
        ++notices;
        curse_notices += ev.has_curse ? 1 : 0;
        if (status_of[ev.notice->user_id] == AccountState::deleted) ++spam_notices;
        pending.emplace(to_epoch(ev.notice->observed_at), ev.notice->tweet_id);
        pending_users.emplace(ev.notice->tweet_id, ev.notice->user_id);
      }
    }
    flush_until(std::nullopt);
    if (!stream_out) throw DataError("write failed: " + stream_path.string());

    const auto& s = cfg.synth;
    Report m;
    m["files.stream"] = stream_path.filename().string();
    m["files.statuses"] = status_path.filename().string();
    m["seed"] = s.seed;
    m["synth.n_users"] = s.n_users;
    m["synth.n_tweets"] = s.n_tweets;
    m["synth.base_deletion_rate"] = s.base_deletion_rate;
    m["synth.propensity_concentration"] = s.propensity_concentration;
    m["synth.curse_rate"] = s.curse_rate;
    m["synth.curse_deletion_boost"] = s.curse_deletion_boost;
    m["synth.retweet_rate"] = s.retweet_rate;
    m["synth.retweet_deletion_boost"] = s.retweet_deletion_boost;
    m["synth.reply_rate"] = s.reply_rate;
    m["synth.spam_account_fraction"] = s.spam_account_fraction;
    m["synth.spam_token_rate"] = s.spam_token_rate;
    m["synth.protected_fraction"] = s.protected_fraction;
    m["synth.popular_propensity_multiplier"] = s.popular_propensity_multiplier;
    m["synth.popular_followers_threshold"] = s.popular_followers_threshold;
    m["synth.followers_log_mean"] = s.followers_log_mean;
    m["synth.followers_log_sd"] = s.followers_log_sd;
    m["synth.english_fraction"] = s.english_fraction;
    m["synth.vocabulary_size"] = s.vocabulary_size;
    m["synth.zipf_exponent"] = s.zipf_exponent;
    m["synth.min_words"] = s.min_words;
    m["synth.max_words"] = s.max_words;
    m["synth.window_start"] = format_timestamp(s.window_start);
    m["synth.window_seconds"] = s.window_seconds;
    m["synth.mean_deletion_delay_hours"] = s.mean_deletion_delay_hours;
    m["suggested.horizon"] = format_timestamp(s.window_end() + std::chrono::days{kDefaultHorizonDays});
    m["suggested.split_boundary"] =
        format_timestamp(s.window_start + std::chrono::seconds{(s.window_seconds * 9) / 10});
    m["planted.prevalence"] = expected_prevalence(s);
    m["planted.spam_share_of_deletions"] = expected_spam_share(s);
    m["planted.curse_gap"] = expected_curse_gap(s);
    m["emitted.tweets"] = tweets;
    m["emitted.notices"] = notices;
    m["emitted.prevalence"] = tweets == 0 ? 0.0 : static_cast<double>(notices) / static_cast<double>(tweets);
    m["emitted.spam_share_of_deletions"] =
        notices == 0 ? 0.0 : static_cast<double>(spam_notices) / static_cast<double>(notices);
    m["emitted.curse_tweets"] = curse_tweets;
    m["emitted.curse_notices"] = curse_notices;
    write_report(cfg.output_dir / "manifest.json", m);

    out << "wrote " << tweets << " tweets and " << notices << " deletion notices to "
        << stream_path.string() << '\n';
    out << "planted prevalence " << pct(expected_prevalence(s)) << "%, emitted "
        << pct(m["emitted.prevalence"].get<double>()) << "%\n";
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const ExperimentConfig& cfg, const fs::path& model_path, std::ostream& out,
              std::ostream& err) {
  return guarded(err, "train", [&] {
    ensure_dir(cfg.output_dir);
    StageMeter total;
    auto corpus = load_corpus(cfg);
    err << "train: " << corpus.tweets << " tweets, " << corpus.split.train.size() << " train / "
        << corpus.split.test.size() << " test, " << corpus.join.positives << " deleted\n";

    // The learner stage resets the kernel's peak watermark, so keep what came before.
    const std::uint64_t peak_before_learner = peak_rss_bytes();
    auto sys = train_system(corpus.split.train, cfg.mask, cfg.learner, cfg.dev_fraction);
    if (model_path.has_parent_path()) ensure_dir(model_path.parent_path());
    save_model(sys.model, model_path);
    sys.space.save(space_path_for(model_path));

    Report r;
    r["learner"] = std::string(to_string(cfg.learner.kind));
    if (cfg.learner.kind == LearnerKind::svm) {
      r["svm.c"] = cfg.learner.svm.c;
      r["svm.epsilon"] = cfg.learner.svm.epsilon;
      r["svm.epochs"] = sys.svm_epochs;
      r["svm.converged"] = sys.svm_converged;
    } else {
      r["pa.variant"] = std::string(to_string(cfg.learner.pa.variant));
      r["pa.c"] = cfg.learner.pa.c;
      r["pa.epochs"] = cfg.learner.pa.epochs;
    }
    r["positive_weight"] = sys.positive_weight;
    r["mask"] = cfg.mask.to_string();
    r["horizon"] = format_timestamp(corpus.horizon);
    r["split_boundary"] = format_timestamp(corpus.boundary);
    r["corpus.tweets"] = corpus.tweets;
    r["corpus.skipped_lines"] = corpus.skipped;
    r["corpus.duplicate_tweets"] = corpus.duplicate_tweets;
    r["corpus.notices"] = corpus.join.notices;
    r["corpus.unknown_tweet_notices"] = corpus.join.unknown_tweet_notices;
    r["corpus.duplicate_notices"] = corpus.join.duplicate_notices;
    r["corpus.positives"] = corpus.join.positives;
    r["train.size"] = corpus.split.train.size();
    r["test.size"] = corpus.split.test.size();
    r["fit.size"] = sys.fit_size;
    r["fit.positives"] = sys.fit_positives;
    r["dev.size"] = sys.dev_size;
    r["dev.positives"] = sys.dev_positives;
    r["dev.f1"] = sys.threshold.f1;
    r["dev.baseline_f1"] = sys.dev_size == 0 ? 0.0
                           : expected_all_positive_f1(static_cast<double>(sys.dev_positives) /
                                                      static_cast<double>(sys.dev_size));
    r["dev.no_positives"] = sys.threshold.degenerate;
    r["threshold"] = sys.model.threshold();
    r["space.dimension"] = sys.space.dimension();
    r["space.social"] = sys.space.namespace_size(Namespace::social);
    r["space.user"] = sys.space.namespace_size(Namespace::user);
    r["space.word"] = sys.space.namespace_size(Namespace::word);
    r["model.nonzero_weights"] = sys.model.nonzero_weights();
    r["model.file"] = model_path.filename().string();
    write_report(cfg.output_dir / "train_report.json", r);

    // Timings and memory are not reproducible, so they live apart from the report.
    const auto all = total.finish();
    Report res;
    res["learner.seconds"] = sys.learner_usage.seconds;
    res["learner.rss_at_start_bytes"] = sys.learner_usage.rss_at_start;
    res["learner.peak_rss_bytes"] = sys.learner_usage.peak_rss;
    res["learner.peak_is_stage_local"] = sys.learner_usage.peak_is_stage_local;
    res["total.seconds"] = all.seconds;
    res["total.peak_rss_bytes"] = std::max(peak_before_learner, peak_rss_bytes());
    write_report(cfg.output_dir / "train_resources.json", res);

    if (sys.threshold.degenerate) err << "train: warning: dev split has no positives; threshold left at 0\n";
    char line[256];
    std::snprintf(line, sizeof line,
                  "%s trained on %zu tweets (dim %u, rho %.3f); dev F1 %s at threshold %.6g\n"
                  "learner stage: %.3f s, peak RSS %.1f MiB (%.1f MiB at start)\n",
                  std::string(to_string(cfg.learner.kind)).c_str(), sys.fit_size, sys.space.dimension(),
                  sys.positive_weight, pct(sys.threshold.f1).c_str(), sys.model.threshold(),
                  sys.learner_usage.seconds, static_cast<double>(sys.learner_usage.peak_rss) / 1048576.0,
                  static_cast<double>(sys.learner_usage.rss_at_start) / 1048576.0);
    out << line;
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const ExperimentConfig& cfg, const fs::path& model_path, std::ostream& out,
             std::ostream& err) {
  return guarded(err, "eval", [&] {
    ensure_dir(cfg.output_dir);
    auto sys = load_system(model_path);
    auto corpus = load_corpus(cfg);
    if (corpus.split.test.empty()) throw DataError("test split is empty");

    auto outcome = test_system(sys.space, sys.model, corpus.split.test);
    const auto& gold = outcome.gold;
    const double prevalence = outcome.metrics.prevalence;
    const auto random = evaluate(random_baseline(gold.size(), derive_seed(cfg.seed, 3)), gold);
    const auto majority = evaluate(all_positive_baseline(gold.size()), gold);

    Report r;
    r["model.file"] = model_path.filename().string();
    r["threshold"] = sys.model.threshold();
    r["mask"] = sys.model.mask().to_string();
    r["test.size"] = gold.size();
    r["test.positives"] = outcome.metrics.confusion.tp + outcome.metrics.confusion.fn;
    r["test.prevalence"] = prevalence;
    put_metrics(r, "random", random);
    r["random.expected_f1"] = expected_random_f1(prevalence);
    put_metrics(r, "majority", majority);
    r["majority.expected_f1"] = expected_all_positive_f1(prevalence);
    put_metrics(r, "model", outcome.metrics);
    // Published full-scale figures, kept for side-by-side reading only.
    r["reference.random.f1"] = 5.8;
    r["reference.majority.f1"] = 6.0;
    r["reference.svm.f1"] = 27.0;
    r["reference.pa.f1"] = 22.8;
    write_report(cfg.output_dir / "eval_report.json", r);

    char line[256];
    out << "system        F1     P      R      expected  reference\n";
    std::snprintf(line, sizeof line, "random      %6s %6s %6s %8s %10s\n", pct(random.f1).c_str(),
                  pct(random.precision).c_str(), pct(random.recall).c_str(),
                  pct(expected_random_f1(prevalence)).c_str(), "5.8");
    out << line;
    std::snprintf(line, sizeof line, "majority    %6s %6s %6s %8s %10s\n", pct(majority.f1).c_str(),
                  pct(majority.precision).c_str(), pct(majority.recall).c_str(),
                  pct(expected_all_positive_f1(prevalence)).c_str(), "6.0");
    out << line;
    std::snprintf(line, sizeof line, "model       %6s %6s %6s %8s %10s\n", pct(outcome.metrics.f1).c_str(),
                  pct(outcome.metrics.precision).c_str(), pct(outcome.metrics.recall).c_str(), "-",
                  "27.0/22.8");
    out << line;
    std::snprintf(line, sizeof line, "test tweets %zu, prevalence %s%%\n", gold.size(), pct(prevalence).c_str());
    out << line;
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------
// analyze

namespace {

Report analyze_subgroups(const ExperimentConfig& cfg, const LoadedCorpus& corpus, std::ostream& out) {
  auto groups = subgroup_eval(corpus.split.train, corpus.split.test, cfg.subgroups,
                              make_train_and_test(cfg.learner, cfg.dev_fraction), cfg.mask);
  Report r;
  r["space_policy"] = "feature space refit on each group's training tweets";
  r["learner"] = std::string(to_string(cfg.learner.kind));
  out << "group                  F1   baseline   #test   #train\n";
  for (const auto& g : groups) {
    const std::string k = "groups." + g.name;
    r[k + ".definition"] = g.definition;
    r[k + ".train_size"] = g.train_size;
    r[k + ".test_size"] = g.test_size;
    r[k + ".test_positives"] = g.test_positives;
    r[k + ".baseline_f1"] = g.baseline_f1;
    if (g.metrics) {
      put_metrics(r, k, *g.metrics);
    } else {
      r[k + ".skipped"] = g.skipped;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %6s %8s %8zu %8zu%s\n", g.name.c_str(),
                  g.metrics ? pct(g.metrics->f1).c_str() : "-", pct(g.baseline_f1).c_str(), g.test_size,
                  g.train_size, g.skipped.empty() ? "" : ("  skipped: " + g.skipped).c_str());
    out << line;
  }
  // Published full-scale group figures (F1, baseline).
  r["reference.followers<1k.f1"] = 17.8;
  r["reference.followers<1k.baseline"] = 5.8;
  r["reference.followers[1k,10k).f1"] = 33.7;
  r["reference.followers[1k,10k).baseline"] = 6.6;
  r["reference.followers[10k,100k).f1"] = 66.0;
  r["reference.followers[10k,100k).baseline"] = 17.7;
  r["reference.followers>=100k.f1"] = 86.4;
  r["reference.followers>=100k.baseline"] = 41.5;
  r["reference.verified.f1"] = 39.5;
  r["reference.verified.baseline"] = 6.0;
  return r;
}

Report analyze_ablation(const ExperimentConfig& cfg, const LoadedCorpus& corpus, std::ostream& out) {
  auto report = ablate_social(corpus.split.train, corpus.split.test,
                              make_train_and_test(cfg.learner, cfg.dev_fraction), cfg.mask);
  Report r;
  r["learner"] = std::string(to_string(cfg.learner.kind));
  r["full.f1"] = report.full_f1;
  out << "full-feature F1 " << pct(report.full_f1) << "\nremoved feature       F1 without   delta F1\n";
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    const std::string k = "rank" + std::to_string(i + 1);
    r[k + ".feature"] = e.feature;
    r[k + ".f1_without"] = e.f1_without;
    r[k + ".delta_f1"] = e.delta;
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %10s %+10.2f\n", e.feature.c_str(), pct(e.f1_without).c_str(),
                  100.0 * e.delta);
    out << line;
  }
  r["reference.statuses.delta_f1_points"] = 0.2;
  r["reference.is_retweet.delta_f1_points"] = 0.16;
  r["reference.followers.delta_f1_points"] = 0.07;
  return r;
}

Report analyze_deletion_types(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                              const SystemOnDisk& sys, std::ostream& out) {
  if (cfg.statuses.empty()) throw ConfigError("deletion-types needs a status file (key 'statuses')");
  auto loaded = load_account_statuses(cfg.statuses);
  std::vector<LabeledTweet> deleted;
  for (const auto& t : corpus.split.test)
    if (t.label == 1) deleted.push_back(t);
  if (deleted.empty()) throw DataError("test split has no deleted tweets");
  auto outcome = test_system(sys.space, sys.model, deleted);
  std::vector<UserId> authors;
  authors.reserve(deleted.size());
  for (const auto& t : deleted) authors.push_back(t.record.user_id);
  auto report = deletion_type_accuracy(authors, outcome.predictions, loaded.provider);

  Report r;
  r["status.records"] = loaded.provider.size();
  r["status.overrides"] = loaded.overrides;
  r["status.rejected"] = loaded.rejected.size();
  out << "deletion type      % of deleted   accuracy   count\n";
  for (const auto& row : report.rows) {
    const std::string k = "type." + std::string(to_string(row.type));
    r[k + ".label"] = std::string(deletion_type_label(row.type));
    r[k + ".count"] = row.count;
    r[k + ".proportion"] = row.proportion;
    r[k + ".accuracy"] = row.accuracy;
    char line[128];
    std::snprintf(line, sizeof line, "%-18s %12s %10s %7llu\n", std::string(deletion_type_label(row.type)).c_str(),
                  pct(row.proportion).c_str(), pct(row.accuracy).c_str(),
                  static_cast<unsigned long long>(row.count));
    out << line;
  }
  r["unknown.count"] = report.unknown;
  r["unknown.predicted_deleted"] = report.unknown_predicted_deleted;
  r["reference.active.proportion"] = 85.2;
  r["reference.active.accuracy"] = 18.8;
  r["reference.protected.proportion"] = 12.2;
  r["reference.protected.accuracy"] = 17.5;
  r["reference.deleted.proportion"] = 2.6;
  r["reference.deleted.accuracy"] = 29.5;
  return r;
}

Report analyze_curses(const ExperimentConfig& cfg, const LoadedCorpus& corpus, std::ostream& out) {
  if (cfg.lexicon.empty()) throw ConfigError("curses needs a lexicon file (key 'lexicon')");
  const auto lexicon = load_lexicon(cfg.lexicon);
  const auto c = curse_analysis(corpus.split.test, lexicon, cfg.curse_language);
  Report r;
  r["language"] = cfg.curse_language;
  r["lexicon_size"] = c.lexicon_size;
  r["n_curse"] = c.n_curse;
  r["k_curse"] = c.k_curse;
  r["n_clean"] = c.n_clean;
  r["k_clean"] = c.k_clean;
  r["p_curse"] = c.p_curse ? Report(*c.p_curse) : Report(nullptr);
  r["p_clean"] = c.p_clean ? Report(*c.p_clean) : Report(nullptr);
  r["z"] = c.test.z ? Report(*c.test.z) : Report(nullptr);
  r["p_value"] = c.test.p_value ? Report(*c.test.p_value) : Report(nullptr);
  r["reference.p_curse"] = 0.0373;
  r["reference.p_clean"] = 0.0309;
  r["reference.p_value"] = 0.0001;
  char line[256];
  std::snprintf(line, sizeof line,
                "P(delete | curse) = %s%% of %llu, P(delete | no curse) = %s%% of %llu\n",
                c.p_curse ? pct(*c.p_curse).c_str() : "n/a", static_cast<unsigned long long>(c.n_curse),
                c.p_clean ? pct(*c.p_clean).c_str() : "n/a", static_cast<unsigned long long>(c.n_clean));
  out << line;
  if (c.test.z) {
    std::snprintf(line, sizeof line, "z = %.4f, two-sided p = %.3g\n", *c.test.z, *c.test.p_value);
    out << line;
  } else {
    out << "z undefined (a group is empty or the pooled proportion is 0 or 1)\n";
  }
  return r;
}

Report analyze_compare(const ExperimentConfig& cfg, const LoadedCorpus& corpus, const fs::path& model_a,
                       std::ostream& out) {
  if (cfg.compare_model_b.empty()) throw ConfigError("compare needs a second model (key 'compare.model_b')");
  auto a = load_system(model_a);
  auto b = load_system(cfg.compare_model_b);
  auto oa = test_system(a.space, a.model, corpus.split.test);
  auto ob = test_system(b.space, b.model, corpus.split.test);
  const double p = compare_models(oa.predictions, ob.predictions, oa.gold, cfg.compare_rounds,
                                  derive_seed(cfg.seed, 4));
  Report r;
  r["model_a.file"] = model_a.filename().string();
  r["model_b.file"] = cfg.compare_model_b.filename().string();
  put_metrics(r, "model_a", oa.metrics);
  put_metrics(r, "model_b", ob.metrics);
  r["delta_f1"] = oa.metrics.f1 - ob.metrics.f1;
  r["rounds"] = cfg.compare_rounds;
  r["p_value"] = p;
  char line[256];
  std::snprintf(line, sizeof line, "F1 A %s vs B %s, approximate randomization p = %.4g (%zu rounds)\n",
                pct(oa.metrics.f1).c_str(), pct(ob.metrics.f1).c_str(), p, cfg.compare_rounds);
  out << line;
  return r;
}

}  // namespace

int cmd_analyze(const ExperimentConfig& cfg, const fs::path& model_path, const std::vector<std::string>& which,
                std::ostream& out, std::ostream& err) {
  for (const auto& w : which) {
    if (std::find(kAnalyses.begin(), kAnalyses.end(), w) == kAnalyses.end()) {
      err << "analyze: unknown analysis '" << w << "'\n";
      return kExitUsage;
    }
  }
  std::optional<LoadedCorpus> corpus;
  int status = guarded(err, "analyze", [&] {
    ensure_dir(cfg.output_dir);
    corpus = load_corpus(cfg);
    return static_cast<int>(kExitOk);
  });
  if (status != kExitOk) return status;

  int worst = kExitOk;
  for (const auto& w : which) {
    out << "== " << w << " ==\n";
    const std::string label = "analyze " + w;
    int rc = guarded(err, label.c_str(), [&] {
      Report r;
      if (w == "subgroups") {
        r = analyze_subgroups(cfg, *corpus, out);
      } else if (w == "ablation") {
        r = analyze_ablation(cfg, *corpus, out);
      } else if (w == "deletion-types") {
        auto sys = load_system(model_path);
        r = analyze_deletion_types(cfg, *corpus, sys, out);
      } else if (w == "curses") {
        r = analyze_curses(cfg, *corpus, out);
      } else {
        r = analyze_compare(cfg, *corpus, model_path, out);
      }
      std::string file = "analysis_" + w + ".json";
      std::replace(file.begin(), file.end(), '-', '_');
      write_report(cfg.output_dir / file, r);
      return static_cast<int>(kExitOk);
    });
    worst = std::max(worst, rc);
  }
  return worst;
}

}  // namespace tdel
