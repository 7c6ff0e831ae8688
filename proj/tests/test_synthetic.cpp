#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "tdel/eval.hpp"
#include "tdel/synthetic.hpp"

using namespace tdel;

namespace {

SyntheticConfig small(std::uint64_t tweets, std::uint64_t seed = 7) {
  SyntheticConfig c;
  c.n_users = 3000;
  c.n_tweets = tweets;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("generator is deterministic in its seed") {
  const auto a = generate_synthetic(small(3000));
  const auto b = generate_synthetic(small(3000));
  CHECK(a.tweets == b.tweets);
  CHECK(a.notices == b.notices);
  REQUIRE(a.statuses.size() == b.statuses.size());
  for (std::size_t i = 0; i < a.statuses.size(); ++i) {
    CHECK(a.statuses[i].user_id == b.statuses[i].user_id);
    CHECK(a.statuses[i].status == b.statuses[i].status);
  }
  const auto c = generate_synthetic(small(3000, 8));
  CHECK(a.tweets != c.tweets);
}

TEST_CASE("generated tweets are ordered and well formed") {
  auto cfg = small(5000);
  cfg.spam_account_fraction = 0.05;
  const auto corpus = generate_synthetic(cfg);
  REQUIRE(corpus.tweets.size() == 5000);
  std::unordered_set<UserId> users;
  for (const auto& s : corpus.statuses) users.insert(s.user_id);
  for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
    const auto& t = corpus.tweets[i];
    CHECK(users.contains(t.user_id));
    CHECK(t.created_at >= cfg.window_start);
    CHECK(t.created_at < cfg.window_end());
    if (i > 0) {
      CHECK(t.created_at >= corpus.tweets[i - 1].created_at);
      CHECK(t.tweet_id > corpus.tweets[i - 1].tweet_id);
    }
    CHECK_FALSE((t.is_retweet && t.is_reply));
  }
  std::unordered_map<TweetId, Timestamp> created;
  for (const auto& t : corpus.tweets) created[t.tweet_id] = t.created_at;
  for (std::size_t i = 0; i < corpus.notices.size(); ++i) {
    const auto& n = corpus.notices[i];
    REQUIRE(created.contains(n.tweet_id));
    CHECK(n.observed_at > created[n.tweet_id]);
    if (i > 0) CHECK(n.observed_at >= corpus.notices[i - 1].observed_at);
  }

  // The streaming form yields the same tweets.
  SyntheticStream stream(cfg);
  SyntheticEvent ev;
  std::size_t i = 0;
  while (stream.next(ev)) {
    REQUIRE(i < corpus.tweets.size());
    CHECK(ev.tweet == corpus.tweets[i++]);
  }
  CHECK(stream.emitted() == 5000);
}

TEST_CASE("zero rates plant nothing") {
  auto cfg = small(20000);
  cfg.base_deletion_rate = 0.0;
  cfg.curse_deletion_boost = 0.0;
  cfg.retweet_deletion_boost = 0.0;
  cfg.spam_account_fraction = 0.0;
  const auto corpus = generate_synthetic(cfg);
  CHECK(corpus.notices.empty());
  CHECK(expected_prevalence(cfg) == 0.0);

  cfg.n_tweets = 0;
  CHECK(generate_synthetic(cfg).tweets.empty());
}

TEST_CASE("invalid generator configs are rejected") {
  auto bad = small(10);
  bad.base_deletion_rate = 1.5;
  CHECK_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
  bad = small(10);
  bad.base_deletion_rate = 0.99;
  bad.curse_deletion_boost = 0.02;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = small(10);
  bad.n_users = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = small(10);
  bad.min_words = 5;
  bad.max_words = 4;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("measured rates track the analytic expectations") {
  auto cfg = small(100000, 11);
  cfg.spam_account_fraction = 0.02;
  cfg.curse_rate = 0.3;
  cfg.retweet_deletion_boost = 0.05;
  cfg.popular_propensity_multiplier = 2.0;
  const auto corpus = generate_synthetic(cfg);

  std::unordered_set<UserId> spam;
  for (const auto& s : corpus.statuses)
    if (s.status == AccountState::deleted) spam.insert(s.user_id);
  std::unordered_map<UserId, std::size_t> tweets_by_user;
  for (const auto& t : corpus.tweets) ++tweets_by_user[t.user_id];

  const double measured = static_cast<double>(corpus.notices.size()) / corpus.tweets.size();
  const double expected = expected_prevalence(cfg);
  CHECK(std::fabs(measured - expected) / expected < 0.2);

  std::size_t spam_notices = 0;
  for (const auto& n : corpus.notices) spam_notices += spam.contains(n.user_id);
  // Spam share depends on how many tweets spam accounts happen to write, so
  // compare against the realized spam tweet fraction.
  std::size_t spam_tweets = 0;
  for (UserId u : spam) spam_tweets += tweets_by_user[u];
  CHECK(spam_notices == spam_tweets);
  const double share = static_cast<double>(spam_notices) / corpus.notices.size();
  CHECK(std::fabs(share - expected_spam_share(cfg)) / expected_spam_share(cfg) < 0.35);
}

TEST_CASE("curse gap matches the planted boost") {
  auto cfg = small(200000, 5);
  cfg.n_users = 20000;
  cfg.curse_rate = 0.3;
  cfg.curse_deletion_boost = 0.02;
  SyntheticStream stream(cfg);
  SyntheticEvent ev;
  double n[2] = {0, 0}, k[2] = {0, 0};
  while (stream.next(ev)) {
    n[ev.has_curse] += 1;
    k[ev.has_curse] += ev.notice.has_value();
  }
  const double gap = k[1] / n[1] - k[0] / n[0];
  CHECK(expected_curse_gap(cfg) == doctest::Approx(0.02).epsilon(1e-3));
  CHECK(std::fabs(gap - 0.02) < 0.006);
}

TEST_CASE("clamped expectation agrees with Monte Carlo") {
  SyntheticConfig cfg;
  cfg.base_deletion_rate = 0.6;
  cfg.propensity_concentration = 1.5;
  cfg.curse_deletion_boost = 0.3;
  cfg.retweet_deletion_boost = 0.3;
  // Boosts push many draws past 1, so the clamp matters here.
  const double analytic = expected_deletion_probability(cfg, true, true, false);
  CHECK(analytic < 1.0);
  CHECK(analytic > 0.6);

  std::mt19937_64 rng(3);
  std::gamma_distribution<double> ga(0.6 * 1.5, 1.0), gb(0.4 * 1.5, 1.0);
  double sum = 0.0;
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) {
    const double x = ga(rng), y = gb(rng);
    sum += std::min(1.0, x / (x + y) + 0.6);
  }
  CHECK(std::fabs(sum / draws - analytic) < 0.003);
}

TEST_CASE("shipped lexicon file mirrors the built-in curse list") {
  const auto lexicon = load_lexicon(TDEL_LEXICON_PATH);
  CHECK(lexicon.size() == default_curse_words().size());
  for (const auto& w : default_curse_words()) CHECK(lexicon.contains(w));
}
