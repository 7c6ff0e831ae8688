#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdel/corpus.hpp"

namespace tdel {

/// Built-in curse list used both for planting and as the default analysis
/// lexicon. Mirrors data/curse_lexicon.txt.
const std::vector<std::string>& default_curse_words();
const std::vector<std::string>& default_spam_words();

/// Generator parameters. Deletion probability of a tweet by a non-spam user is
///   min(1, propensity_u + curse_deletion_boost*[curse] + retweet_deletion_boost*[retweet])
/// where propensity_u ~ Beta with mean base_deletion_rate (times
/// popular_propensity_multiplier for users at or above
/// popular_followers_threshold) and concentration propensity_concentration.
/// Spam users get status "deleted" and every tweet of theirs is deleted.
struct SyntheticConfig {
  std::uint64_t n_users = 20000;
  std::uint64_t n_tweets = 100000;
  double base_deletion_rate = 0.03;
  double propensity_concentration = 2.0;
  double curse_rate = 0.1;
  double curse_deletion_boost = 0.02;
  double retweet_rate = 0.2;
  double retweet_deletion_boost = 0.0;
  double reply_rate = 0.15;
  double spam_account_fraction = 0.0;
  double spam_token_rate = 0.8;
  double protected_fraction = 0.1;
  double popular_propensity_multiplier = 1.0;
  std::uint64_t popular_followers_threshold = 10000;
  double followers_log_mean = 5.7;  // median ~300 followers
  double followers_log_sd = 2.0;
  double english_fraction = 0.9;
  std::uint32_t vocabulary_size = 5000;
  double zipf_exponent = 1.0;
  std::uint32_t min_words = 4;
  std::uint32_t max_words = 14;
  Timestamp window_start = from_epoch(1325376000);  // 2012-01-01T00:00:00Z
  std::int64_t window_seconds = 31 * 86400;
  double mean_deletion_delay_hours = 48.0;
  std::uint64_t seed = 42;

  Timestamp window_end() const { return window_start + std::chrono::seconds{window_seconds}; }
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const SyntheticConfig& config);

struct SyntheticEvent {
  TweetRecord tweet;
  std::optional<DeletionNotice> notice;
  bool has_curse = false;  // ground truth for the planted curse token
};

/// Streaming generator: tweets come out in created_at order and the memory
/// held is proportional to n_users, not n_tweets.
class SyntheticStream {
 public:
  explicit SyntheticStream(const SyntheticConfig& config);
  ~SyntheticStream();
  SyntheticStream(SyntheticStream&&) noexcept;
  SyntheticStream& operator=(SyntheticStream&&) noexcept;

  /// Produces the next tweet; false once n_tweets have been emitted.
  bool next(SyntheticEvent& event);

  const std::vector<AccountStatus>& statuses() const;
  std::uint64_t emitted() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SyntheticCorpus {
  std::vector<TweetRecord> tweets;
  std::vector<DeletionNotice> notices;  // sorted by observed_at, ties by tweet_id
  std::vector<AccountStatus> statuses;  // ordered by user_id
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

/// Analytic expectations implied by a config (infinite-corpus limits).
double expected_popular_fraction(const SyntheticConfig& config);
/// E[P(delete)] for a non-spam tweet with the given planted attributes.
double expected_deletion_probability(const SyntheticConfig& config, bool curse, bool retweet,
                                     bool popular);
/// Expected fraction of tweets that receive a deletion notice.
double expected_prevalence(const SyntheticConfig& config);
/// Expected share of deleted tweets whose author is a spam (deleted) account.
double expected_spam_share(const SyntheticConfig& config);
/// Expected P(delete | curse) - P(delete | no curse) over all tweets.
double expected_curse_gap(const SyntheticConfig& config);

}  // namespace tdel
