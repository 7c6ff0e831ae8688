#include "tdel/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/special_functions/beta.hpp>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace tdel {

const std::vector<std::string>& default_curse_words() {
  static const std::vector<std::string> words = {
      "ass",      "asshole", "bastard", "bitch",   "bitches", "bullshit",     "crap",
      "damn",     "dick",    "fuck",    "fucked",  "fucking", "goddamn",      "hoe",
      "motherfucker", "piss", "pissed", "prick",   "shit",    "shitty",       "slut",
      "stfu",     "twat",    "wtf"};
  return words;
}

const std::vector<std::string>& default_spam_words() {
  static const std::vector<std::string> words = {"followback", "teamfollowback", "cash",
                                                 "free",       "winner",         "click",
                                                 "bonus",      "earn",           "giveaway"};
  return words;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid synthetic config: ") + what);
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

double popular_mean(const SyntheticConfig& c) {
  return std::min(1.0, c.base_deletion_rate * c.popular_propensity_multiplier);
}

// E[min(1, P + d)] for P ~ Beta(mean * kappa, (1 - mean) * kappa).
double expected_clamped(double mean, double kappa, double d) {
  if (mean <= 0.0) return std::min(1.0, std::max(0.0, d));
  if (mean >= 1.0) return 1.0;
  if (d <= 0.0) return mean;
  if (d >= 1.0) return 1.0;
  const double a = mean * kappa;
  const double b = (1.0 - mean) * kappa;
  const double t = 1.0 - d;
  const double excess = mean * boost::math::ibetac(a + 1.0, b, t) - t * boost::math::ibetac(a, b, t);
  return mean + d - excess;
}

// Pronounceable pseudo-words: base-N digits mapped to consonant-vowel syllables.
std::string pseudo_word(std::uint32_t index) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  const std::uint32_t base = static_cast<std::uint32_t>(consonants.size() * vowels.size());
  std::string word;
  std::uint32_t v = index;
  do {
    const std::uint32_t syl = v % base;
    word += consonants[syl / vowels.size()];
    word += vowels[syl % vowels.size()];
    v /= base;
  } while (v > 0);
  return word;
}

std::string base36(std::uint64_t v) {
  static constexpr std::string_view digits = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string s;
  do {
    s += digits[v % 36];
    v /= 36;
  } while (v > 0);
  return s;
}

constexpr std::uint64_t kFirstTweetId = 160000000000000000ULL;
constexpr std::uint64_t kFirstUserId = 100000;

}  // namespace

void validate(const SyntheticConfig& c) {
  require(c.n_users > 0, "n_users must be positive");
  require(is_probability(c.base_deletion_rate), "base_deletion_rate outside [0,1]");
  require(is_probability(c.curse_deletion_boost), "curse_deletion_boost outside [0,1]");
  require(c.base_deletion_rate + c.curse_deletion_boost <= 1.0,
          "base_deletion_rate + curse_deletion_boost exceeds 1");
  require(is_probability(c.retweet_deletion_boost), "retweet_deletion_boost outside [0,1]");
  require(is_probability(c.curse_rate), "curse_rate outside [0,1]");
  require(is_probability(c.retweet_rate), "retweet_rate outside [0,1]");
  require(is_probability(c.reply_rate), "reply_rate outside [0,1]");
  require(is_probability(c.spam_account_fraction), "spam_account_fraction outside [0,1]");
  require(is_probability(c.spam_token_rate), "spam_token_rate outside [0,1]");
  require(is_probability(c.protected_fraction), "protected_fraction outside [0,1]");
  require(is_probability(c.english_fraction), "english_fraction outside [0,1]");
  require(std::isfinite(c.propensity_concentration) && c.propensity_concentration > 0.0,
          "propensity_concentration must be positive");
  require(std::isfinite(c.popular_propensity_multiplier) && c.popular_propensity_multiplier >= 0.0,
          "popular_propensity_multiplier must be non-negative");
  require(std::isfinite(c.followers_log_sd) && c.followers_log_sd > 0.0,
          "followers_log_sd must be positive");
  require(std::isfinite(c.followers_log_mean), "followers_log_mean must be finite");
  require(c.vocabulary_size > 0, "vocabulary_size must be positive");
  require(c.zipf_exponent >= 0.0, "zipf_exponent must be non-negative");
  require(c.min_words >= 1 && c.min_words <= c.max_words, "need 1 <= min_words <= max_words");
  require(c.window_seconds > 0, "window_seconds must be positive");
  require(c.mean_deletion_delay_hours > 0.0, "mean_deletion_delay_hours must be positive");
}

struct SyntheticStream::Impl {
  struct User {
    UserId id;
    std::uint64_t followers, friends, statuses, listed;
    bool verified;
    bool spam;
    double propensity;
  };

  SyntheticConfig cfg;
  boost::random::mt19937_64 rng;
  std::vector<User> users;
  std::vector<AccountStatus> status_list;
  std::vector<std::string> vocab;
  boost::random::discrete_distribution<std::uint32_t> word_dist;
  std::uint64_t index = 0;

  explicit Impl(const SyntheticConfig& c) : cfg(c), rng(c.seed) {
    validate(cfg);
    build_vocabulary();
    build_users();
  }

  void build_vocabulary() {
    std::unordered_set<std::string> reserved(default_curse_words().begin(),
                                             default_curse_words().end());
    reserved.insert(default_spam_words().begin(), default_spam_words().end());
    vocab.reserve(cfg.vocabulary_size);
    for (std::uint32_t i = 0; vocab.size() < cfg.vocabulary_size; ++i) {
      auto w = pseudo_word(i);
      if (!reserved.contains(w)) vocab.push_back(std::move(w));
    }
    std::vector<double> weights(vocab.size());
    for (std::size_t r = 0; r < weights.size(); ++r)
      weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), cfg.zipf_exponent);
    word_dist = boost::random::discrete_distribution<std::uint32_t>(weights.begin(), weights.end());
  }

  double draw_propensity(double mean) {
    if (mean <= 0.0) return 0.0;
    if (mean >= 1.0) return 1.0;
    boost::random::beta_distribution<double> beta(mean * cfg.propensity_concentration,
                                                  (1.0 - mean) * cfg.propensity_concentration);
    double p = beta(rng);
    return std::isfinite(p) ? std::clamp(p, 0.0, 1.0) : 0.0;
  }

  void build_users() {
    boost::random::lognormal_distribution<double> followers(cfg.followers_log_mean,
                                                            cfg.followers_log_sd);
    boost::random::lognormal_distribution<double> friends(std::log(200.0), 1.5);
    boost::random::lognormal_distribution<double> statuses(std::log(2000.0), 1.5);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    users.reserve(cfg.n_users);
    status_list.reserve(cfg.n_users);
    for (std::uint64_t u = 0; u < cfg.n_users; ++u) {
      User usr{};
      usr.id = kFirstUserId + u * 7;
      usr.followers = static_cast<std::uint64_t>(std::floor(followers(rng)));
      usr.friends = static_cast<std::uint64_t>(std::floor(friends(rng)));
      usr.statuses = static_cast<std::uint64_t>(std::floor(statuses(rng)));
      usr.listed = static_cast<std::uint64_t>(std::floor(static_cast<double>(usr.followers) *
                                                         0.02 * unit(rng)));
      const double verified_rate =
          usr.followers >= 100000 ? 0.3 : (usr.followers >= 10000 ? 0.02 : 0.0005);
      usr.verified = unit(rng) < verified_rate;
      usr.spam = unit(rng) < cfg.spam_account_fraction;
      const bool popular = usr.followers >= cfg.popular_followers_threshold;
      usr.propensity = draw_propensity(popular ? popular_mean(cfg) : cfg.base_deletion_rate);
      AccountState state = AccountState::active;
      if (usr.spam)
        state = AccountState::deleted;
      else if (unit(rng) < cfg.protected_fraction)
        state = AccountState::protected_account;
      status_list.push_back({usr.id, state});
      users.push_back(usr);
    }
  }

  bool next(SyntheticEvent& ev) {
    if (index >= cfg.n_tweets) return false;
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    boost::random::uniform_int_distribution<std::uint64_t> pick_user(0, users.size() - 1);
    boost::random::uniform_int_distribution<std::uint32_t> n_words(cfg.min_words, cfg.max_words);

    const User& u = users[pick_user(rng)];
    TweetRecord& t = ev.tweet;
    t = TweetRecord{};
    t.tweet_id = kFirstTweetId + index;
    t.user_id = u.id;
    t.created_at = cfg.window_start +
                   std::chrono::seconds{static_cast<std::int64_t>(
                       (static_cast<long double>(index) * cfg.window_seconds) / cfg.n_tweets)};
    t.followers_count = u.followers;
    t.friends_count = u.friends;
    t.statuses_count = u.statuses;
    t.listed_count = u.listed;
    t.verified = u.verified;

    static const char* kOtherLangs[] = {"es", "pt", "ja", "id", "ar", "fr", "tr"};
    if (unit(rng) < cfg.english_fraction) {
      t.lang = "en";
    } else {
      boost::random::uniform_int_distribution<int> pick(0, 6);
      t.lang = kOtherLangs[pick(rng)];
    }

    t.is_retweet = unit(rng) < cfg.retweet_rate;
    t.is_reply = !t.is_retweet && unit(rng) < cfg.reply_rate;
    ev.has_curse = unit(rng) < cfg.curse_rate;

    std::string text;
    auto append = [&text](std::string_view w) {
      if (!text.empty()) text += ' ';
      text += w;
    };
    if (t.is_reply) {
      append("@user" + std::to_string(users[pick_user(rng)].id));
      t.mention_count = 1;
    }
    const std::uint32_t words = n_words(rng);
    boost::random::uniform_int_distribution<std::uint32_t> curse_slot(0, words - 1);
    const std::uint32_t curse_at = ev.has_curse ? curse_slot(rng) : words;
    for (std::uint32_t w = 0; w < words; ++w) {
      if (w == curse_at) {
        const auto& curses = default_curse_words();
        boost::random::uniform_int_distribution<std::size_t> pick(0, curses.size() - 1);
        append(curses[pick(rng)]);
      }
      append(vocab[word_dist(rng)]);
    }
    if (u.spam && unit(rng) < cfg.spam_token_rate) {
      const auto& spam = default_spam_words();
      boost::random::uniform_int_distribution<std::size_t> pick(0, spam.size() - 1);
      append(spam[pick(rng)]);
      append(spam[pick(rng)]);
    }
    const double tag_draw = unit(rng);
    t.hashtag_count = tag_draw < 0.05 ? 2 : (tag_draw < 0.2 ? 1 : 0);
    for (std::uint32_t h = 0; h < t.hashtag_count; ++h) append("#" + vocab[word_dist(rng)]);
    if (unit(rng) < 0.15) {
      append("http://t.co/" + base36(t.tweet_id % 2176782336ULL));
      t.url_count = 1;
    }
    t.text = std::move(text);

    double p_delete = 1.0;
    if (!u.spam) {
      p_delete = u.propensity + (ev.has_curse ? cfg.curse_deletion_boost : 0.0) +
                 (t.is_retweet ? cfg.retweet_deletion_boost : 0.0);
    }
    ev.notice.reset();
    if (unit(rng) < p_delete) {
      boost::random::exponential_distribution<double> delay(1.0 /
                                                            (cfg.mean_deletion_delay_hours * 3600.0));
      const auto secs = static_cast<std::int64_t>(std::ceil(delay(rng)));
      ev.notice = DeletionNotice{t.tweet_id, t.user_id,
                                 t.created_at + std::chrono::seconds{std::max<std::int64_t>(1, secs)}};
    }
    ++index;
    return true;
  }
};

SyntheticStream::SyntheticStream(const SyntheticConfig& config)
    : impl_(std::make_unique<Impl>(config)) {}
SyntheticStream::~SyntheticStream() = default;
SyntheticStream::SyntheticStream(SyntheticStream&&) noexcept = default;
SyntheticStream& SyntheticStream::operator=(SyntheticStream&&) noexcept = default;

bool SyntheticStream::next(SyntheticEvent& event) { return impl_->next(event); }
const std::vector<AccountStatus>& SyntheticStream::statuses() const { return impl_->status_list; }
std::uint64_t SyntheticStream::emitted() const { return impl_->index; }

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
  SyntheticStream stream(config);
  SyntheticCorpus corpus;
  corpus.tweets.reserve(config.n_tweets);
  SyntheticEvent ev;
  while (stream.next(ev)) {
    if (ev.notice) corpus.notices.push_back(*ev.notice);
    corpus.tweets.push_back(std::move(ev.tweet));
  }
  std::stable_sort(corpus.notices.begin(), corpus.notices.end(),
                   [](const DeletionNotice& a, const DeletionNotice& b) {
                     return a.observed_at < b.observed_at;
                   });
  corpus.statuses = stream.statuses();
  return corpus;
}

double expected_popular_fraction(const SyntheticConfig& c) {
  const double z = (std::log(static_cast<double>(c.popular_followers_threshold)) -
                    c.followers_log_mean) /
                   (c.followers_log_sd * std::sqrt(2.0));
  return 0.5 * std::erfc(z);
}

double expected_deletion_probability(const SyntheticConfig& c, bool curse, bool retweet,
                                     bool popular) {
  const double mean = popular ? popular_mean(c) : c.base_deletion_rate;
  const double boost = (curse ? c.curse_deletion_boost : 0.0) +
                       (retweet ? c.retweet_deletion_boost : 0.0);
  return expected_clamped(mean, c.propensity_concentration, boost);
}

namespace {

// Non-spam deletion probability averaged over popularity and retweet status,
// conditioned on the curse indicator (or marginal over it when unset).
double nonspam_rate(const SyntheticConfig& c, std::optional<bool> curse) {
  const double pop = expected_popular_fraction(c);
  double total = 0.0;
  for (int is_pop = 0; is_pop < 2; ++is_pop) {
    for (int rt = 0; rt < 2; ++rt) {
      for (int cu = 0; cu < 2; ++cu) {
        if (curse && *curse != (cu == 1)) continue;
        const double w = (is_pop ? pop : 1.0 - pop) * (rt ? c.retweet_rate : 1.0 - c.retweet_rate) *
                         (curse ? 1.0 : (cu ? c.curse_rate : 1.0 - c.curse_rate));
        total += w * expected_deletion_probability(c, cu == 1, rt == 1, is_pop == 1);
      }
    }
  }
  return total;
}

}  // namespace

double expected_prevalence(const SyntheticConfig& c) {
  const double f = c.spam_account_fraction;
  return f + (1.0 - f) * nonspam_rate(c, std::nullopt);
}

double expected_spam_share(const SyntheticConfig& c) {
  const double prev = expected_prevalence(c);
  return prev > 0.0 ? c.spam_account_fraction / prev : 0.0;
}

double expected_curse_gap(const SyntheticConfig& c) {
  return (1.0 - c.spam_account_fraction) * (nonspam_rate(c, true) - nonspam_rate(c, false));
}

}  // namespace tdel
