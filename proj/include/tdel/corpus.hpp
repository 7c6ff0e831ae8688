#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace tdel {

using Timestamp = std::chrono::sys_seconds;
using TweetId = std::uint64_t;
using UserId = std::uint64_t;

inline Timestamp from_epoch(std::int64_t seconds) { return Timestamp{std::chrono::seconds{seconds}}; }
inline std::int64_t to_epoch(Timestamp t) { return t.time_since_epoch().count(); }

/// Parses either integer epoch seconds or "YYYY-MM-DDTHH:MM:SSZ".
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TweetRecord {
  TweetId tweet_id = 0;
  UserId user_id = 0;
  Timestamp created_at{};
  std::string text;
  std::optional<std::string> lang;
  std::uint64_t followers_count = 0;
  std::uint64_t friends_count = 0;
  std::uint64_t statuses_count = 0;
  std::uint64_t listed_count = 0;
  bool verified = false;
  bool is_retweet = false;
  bool is_reply = false;
  std::uint32_t hashtag_count = 0;
  std::uint32_t mention_count = 0;
  std::uint32_t url_count = 0;

  bool operator==(const TweetRecord&) const = default;
};

struct DeletionNotice {
  TweetId tweet_id = 0;
  UserId user_id = 0;
  Timestamp observed_at{};

  bool operator==(const DeletionNotice&) const = default;
};

struct LabeledTweet {
  TweetRecord record;
  int label = 0;
  std::optional<Timestamp> deletion_observed_at;
};

enum class SkipReason { parse_error, missing_field, invalid_value, unrecognized };

std::string_view to_string(SkipReason reason);

struct Skipped {
  SkipReason reason;
  std::string detail;
};

using StreamItem = std::variant<TweetRecord, DeletionNotice, Skipped>;

/// Parses one JSONL record of the tweet stream. Never throws on bad input.
/// A deletion object without its own "observed_at" takes `observed_at` when
/// given, otherwise it is skipped as missing_field.
StreamItem parse_stream_line(std::string_view line,
                             std::optional<Timestamp> observed_at = std::nullopt);

/// Parallel batch parse; element i is parse_stream_line(lines[i]).
std::vector<StreamItem> parse_stream_lines(std::span<const std::string> lines);
/// Reference implementation of parse_stream_lines, single-threaded.
std::vector<StreamItem> parse_stream_lines_serial(std::span<const std::string> lines);

/// Wire-format encoders; the output parses back to an equal record.
std::string to_stream_line(const TweetRecord& tweet);
std::string to_stream_line(const DeletionNotice& notice);

struct StreamContents {
  std::vector<TweetRecord> tweets;
  std::vector<DeletionNotice> notices;
  std::unordered_map<std::string, std::size_t> skipped;  // reason -> count
  std::size_t total_skipped = 0;
  std::size_t duplicate_tweets = 0;
};

/// Reads a whole stream file. Throws DataError when the file cannot be read or
/// when more than `skip_budget` lines are skipped.
StreamContents read_stream_file(const std::filesystem::path& path,
                                std::size_t skip_budget = static_cast<std::size_t>(-1));

struct JoinStats {
  std::size_t notices = 0;
  std::size_t unknown_tweet_notices = 0;
  std::size_t duplicate_notices = 0;
  std::size_t positives = 0;
};

/// Label 1 iff the earliest notice for the tweet is observed at or before the
/// horizon. Output keeps the input tweet order.
std::vector<LabeledTweet> join_labels(std::vector<TweetRecord> tweets,
                                      std::span<const DeletionNotice> notices, Timestamp horizon,
                                      JoinStats* stats = nullptr);

struct TimeSplit {
  std::vector<LabeledTweet> train;
  std::vector<LabeledTweet> test;
};

/// train: created_at < boundary; test: created_at >= boundary.
TimeSplit split_by_time(std::vector<LabeledTweet> labeled, Timestamp boundary);

enum class AccountState { active, protected_account, deleted };

std::string_view to_string(AccountState state);
std::optional<AccountState> parse_account_state(std::string_view token);

struct AccountStatus {
  UserId user_id = 0;
  AccountState status = AccountState::active;
};

class AccountStatusProvider {
 public:
  virtual ~AccountStatusProvider() = default;
  virtual std::optional<AccountState> lookup(UserId user) const = 0;
};

class MapStatusProvider final : public AccountStatusProvider {
 public:
  MapStatusProvider() = default;
  explicit MapStatusProvider(std::unordered_map<UserId, AccountState> statuses)
      : statuses_(std::move(statuses)) {}

  std::optional<AccountState> lookup(UserId user) const override;
  const std::unordered_map<UserId, AccountState>& statuses() const { return statuses_; }
  std::size_t size() const { return statuses_.size(); }

 private:
  std::unordered_map<UserId, AccountState> statuses_;
};

struct StatusLoadResult {
  MapStatusProvider provider;
  std::size_t overrides = 0;
  std::vector<std::pair<std::size_t, std::string>> rejected;  // line number, reason
};

StatusLoadResult parse_account_statuses(std::istream& in);
/// Throws DataError when the file cannot be opened.
StatusLoadResult load_account_statuses(const std::filesystem::path& path);
void write_account_statuses(std::ostream& out, std::span<const AccountStatus> statuses);

}  // namespace tdel
