#include "tdel/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace tdel {

namespace {

using nlohmann::json;

Skipped skip(SkipReason reason, std::string detail) { return Skipped{reason, std::move(detail)}; }

// Reads a non-negative integer member. nullopt means absent or null.
// Returns false through `ok` when the member exists but is not a valid count.
std::optional<std::uint64_t> read_count(const json& obj, const char* key, bool& ok) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    auto v = it->get<std::int64_t>();
    if (v >= 0) return static_cast<std::uint64_t>(v);
  }
  ok = false;
  return std::nullopt;
}

std::uint32_t array_size(const json& entities, const char* key, bool& ok) {
  auto it = entities.find(key);
  if (it == entities.end() || it->is_null()) return 0;
  if (!it->is_array()) {
    ok = false;
    return 0;
  }
  return static_cast<std::uint32_t>(it->size());
}

bool present(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it != obj.end() && !it->is_null();
}

StreamItem parse_deletion(const json& del, std::optional<Timestamp> observed_at) {
  if (!del.is_object()) return skip(SkipReason::invalid_value, "delete is not an object");
  auto status = del.find("status");
  if (status == del.end() || !status->is_object())
    return skip(SkipReason::missing_field, "delete.status");
  bool ok = true;
  auto id = read_count(*status, "id", ok);
  auto user = read_count(*status, "user_id", ok);
  if (!ok) return skip(SkipReason::invalid_value, "delete.status ids");
  if (!id || !user) return skip(SkipReason::missing_field, "delete.status ids");
  auto seen = read_count(del, "observed_at", ok);
  if (!ok) return skip(SkipReason::invalid_value, "delete.observed_at");
  DeletionNotice notice{*id, *user, {}};
  if (seen) {
    notice.observed_at = from_epoch(static_cast<std::int64_t>(*seen));
  } else if (observed_at) {
    notice.observed_at = *observed_at;
  } else {
    return skip(SkipReason::missing_field, "delete.observed_at");
  }
  return notice;
}

StreamItem parse_tweet(const json& obj) {
  bool ok = true;
  TweetRecord t;
  auto id = read_count(obj, "id", ok);
  auto created = read_count(obj, "created_at", ok);
  if (!ok) return skip(SkipReason::invalid_value, "id/created_at");
  auto user = obj.find("user");
  if (!id || !created || user == obj.end() || !user->is_object())
    return skip(SkipReason::missing_field, "id/created_at/user");
  auto uid = read_count(*user, "id", ok);
  if (!ok) return skip(SkipReason::invalid_value, "user.id");
  if (!uid) return skip(SkipReason::missing_field, "user.id");
  auto text = obj.find("text");
  if (text == obj.end() || text->is_null()) return skip(SkipReason::missing_field, "text");
  if (!text->is_string()) return skip(SkipReason::invalid_value, "text");

  t.tweet_id = *id;
  t.user_id = *uid;
  t.created_at = from_epoch(static_cast<std::int64_t>(*created));
  t.text = text->get<std::string>();
  if (auto lang = obj.find("lang"); lang != obj.end() && lang->is_string()) {
    std::string code = lang->get<std::string>();
    std::transform(code.begin(), code.end(), code.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!code.empty()) t.lang = std::move(code);
  }
  t.followers_count = read_count(*user, "followers_count", ok).value_or(0);
  t.friends_count = read_count(*user, "friends_count", ok).value_or(0);
  t.statuses_count = read_count(*user, "statuses_count", ok).value_or(0);
  t.listed_count = read_count(*user, "listed_count", ok).value_or(0);
  if (auto v = user->find("verified"); v != user->end() && !v->is_null()) {
    if (!v->is_boolean()) return skip(SkipReason::invalid_value, "user.verified");
    t.verified = v->get<bool>();
  }
  if (!ok) return skip(SkipReason::invalid_value, "user counts");
  t.is_retweet = present(obj, "retweeted_status_id");
  t.is_reply = present(obj, "in_reply_to_status_id");
  if (auto ent = obj.find("entities"); ent != obj.end() && !ent->is_null()) {
    if (!ent->is_object()) return skip(SkipReason::invalid_value, "entities");
    t.hashtag_count = array_size(*ent, "hashtags", ok);
    t.mention_count = array_size(*ent, "user_mentions", ok);
    t.url_count = array_size(*ent, "urls", ok);
    if (!ok) return skip(SkipReason::invalid_value, "entities arrays");
  }
  return t;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  std::int64_t seconds = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seconds);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return from_epoch(seconds);

  std::tm tm{};
  char tail = '\0';
  std::string buf(text);
  int n = std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &tm.tm_year, &tm.tm_mon,
                      &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &tail);
  if (n != 7 || tail != 'Z') throw std::invalid_argument("bad timestamp: " + buf);
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return from_epoch(static_cast<std::int64_t>(timegm(&tm)));
}

std::string format_timestamp(Timestamp t) {
  std::time_t secs = static_cast<std::time_t>(to_epoch(t));
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::parse_error: return "parse_error";
    case SkipReason::missing_field: return "missing_field";
    case SkipReason::invalid_value: return "invalid_value";
    case SkipReason::unrecognized: return "unrecognized";
  }
  return "unknown";
}

StreamItem parse_stream_line(std::string_view line, std::optional<Timestamp> observed_at) {
  json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) return skip(SkipReason::parse_error, "malformed json");
  if (!obj.is_object()) return skip(SkipReason::parse_error, "not a json object");
  if (auto del = obj.find("delete"); del != obj.end()) return parse_deletion(*del, observed_at);
  if (obj.contains("id") || obj.contains("text") || obj.contains("user") ||
      obj.contains("created_at"))
    return parse_tweet(obj);
  return skip(SkipReason::unrecognized, "neither tweet nor delete");
}

std::vector<StreamItem> parse_stream_lines_serial(std::span<const std::string> lines) {
  std::vector<StreamItem> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(parse_stream_line(line));
  return out;
}

std::vector<StreamItem> parse_stream_lines(std::span<const std::string> lines) {
  std::vector<StreamItem> out(lines.size(), Skipped{SkipReason::parse_error, {}});
  const auto n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = parse_stream_line(lines[static_cast<std::size_t>(i)]);
  return out;
}

std::string to_stream_line(const TweetRecord& t) {
  nlohmann::ordered_json obj;
  obj["id"] = t.tweet_id;
  obj["text"] = t.text;
  obj["created_at"] = to_epoch(t.created_at);
  if (t.lang) obj["lang"] = *t.lang;
  obj["user"] = {{"id", t.user_id},
                 {"followers_count", t.followers_count},
                 {"friends_count", t.friends_count},
                 {"statuses_count", t.statuses_count},
                 {"listed_count", t.listed_count},
                 {"verified", t.verified}};
  // The record only keeps whether these exist, not the referenced ids.
  if (t.is_retweet) obj["retweeted_status_id"] = 0;
  if (t.is_reply) obj["in_reply_to_status_id"] = 0;
  auto placeholders = [](std::uint32_t n) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::uint32_t i = 0; i < n; ++i) arr.push_back(nlohmann::ordered_json::object());
    return arr;
  };
  obj["entities"] = {{"hashtags", placeholders(t.hashtag_count)},
                     {"user_mentions", placeholders(t.mention_count)},
                     {"urls", placeholders(t.url_count)}};
  return obj.dump();
}

std::string to_stream_line(const DeletionNotice& n) {
  nlohmann::ordered_json obj;
  obj["delete"]["status"] = {{"id", n.tweet_id}, {"user_id", n.user_id}};
  obj["delete"]["observed_at"] = to_epoch(n.observed_at);
  return obj.dump();
}

StreamContents read_stream_file(const std::filesystem::path& path, std::size_t skip_budget) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stream file: " + path.string());

  StreamContents out;
  std::unordered_map<TweetId, bool> seen_ids;
  constexpr std::size_t kChunk = 1 << 15;
  std::vector<std::string> lines;
  lines.reserve(kChunk);

  auto consume = [&] {
    auto items = parse_stream_lines(lines);
    for (auto& item : items) {
      if (auto* tweet = std::get_if<TweetRecord>(&item)) {
        if (!seen_ids.emplace(tweet->tweet_id, true).second) {
          ++out.duplicate_tweets;
          continue;
        }
        out.tweets.push_back(std::move(*tweet));
      } else if (auto* notice = std::get_if<DeletionNotice>(&item)) {
        out.notices.push_back(*notice);
      } else {
        const auto& s = std::get<Skipped>(item);
        ++out.skipped[std::string(to_string(s.reason))];
        if (++out.total_skipped > skip_budget)
          throw DataError("skip budget exceeded in " + path.string() + " (" +
                          std::to_string(out.total_skipped) + " unusable lines)");
      }
    }
    lines.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(std::move(line));
    if (lines.size() == kChunk) consume();
  }
  if (in.bad()) throw DataError("read error on " + path.string());
  consume();
  return out;
}

std::vector<LabeledTweet> join_labels(std::vector<TweetRecord> tweets,
                                      std::span<const DeletionNotice> notices, Timestamp horizon,
                                      JoinStats* stats) {
  std::unordered_map<TweetId, std::size_t> position;
  position.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) position.emplace(tweets[i].tweet_id, i);

  std::vector<std::optional<Timestamp>> earliest(tweets.size());
  JoinStats local;
  local.notices = notices.size();
  for (const auto& n : notices) {
    auto it = position.find(n.tweet_id);
    if (it == position.end()) {
      ++local.unknown_tweet_notices;
      continue;
    }
    auto& slot = earliest[it->second];
    if (slot) {
      ++local.duplicate_notices;
      if (n.observed_at < *slot) slot = n.observed_at;
    } else {
      slot = n.observed_at;
    }
  }

  std::vector<LabeledTweet> out;
  out.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    LabeledTweet lt{std::move(tweets[i]), 0, earliest[i]};
    lt.label = (earliest[i] && *earliest[i] <= horizon) ? 1 : 0;
    local.positives += static_cast<std::size_t>(lt.label);
    out.push_back(std::move(lt));
  }
  if (stats) *stats = local;
  return out;
}

TimeSplit split_by_time(std::vector<LabeledTweet> labeled, Timestamp boundary) {
  TimeSplit split;
  for (auto& lt : labeled) {
    if (lt.record.created_at < boundary)
      split.train.push_back(std::move(lt));
    else
      split.test.push_back(std::move(lt));
  }
  return split;
}

std::string_view to_string(AccountState state) {
  switch (state) {
    case AccountState::active: return "active";
    case AccountState::protected_account: return "protected";
    case AccountState::deleted: return "deleted";
  }
  return "unknown";
}

std::optional<AccountState> parse_account_state(std::string_view token) {
  if (token == "active") return AccountState::active;
  if (token == "protected") return AccountState::protected_account;
  if (token == "deleted") return AccountState::deleted;
  return std::nullopt;
}

std::optional<AccountState> MapStatusProvider::lookup(UserId user) const {
  auto it = statuses_.find(user);
  if (it == statuses_.end()) return std::nullopt;
  return it->second;
}

StatusLoadResult parse_account_statuses(std::istream& in) {
  std::unordered_map<UserId, AccountState> map;
  StatusLoadResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string id_tok, status_tok, extra;
    fields >> id_tok >> status_tok;
    if (status_tok.empty() || (fields >> extra)) {
      result.rejected.emplace_back(lineno, "expected two fields");
      continue;
    }
    UserId uid = 0;
    auto [ptr, ec] = std::from_chars(id_tok.data(), id_tok.data() + id_tok.size(), uid);
    if (ec != std::errc{} || ptr != id_tok.data() + id_tok.size()) {
      result.rejected.emplace_back(lineno, "bad user id '" + id_tok + "'");
      continue;
    }
    auto state = parse_account_state(status_tok);
    if (!state) {
      result.rejected.emplace_back(lineno, "unknown status '" + status_tok + "'");
      continue;
    }
    auto [it, inserted] = map.insert_or_assign(uid, *state);
    if (!inserted) ++result.overrides;
  }
  result.provider = MapStatusProvider(std::move(map));
  return result;
}

StatusLoadResult load_account_statuses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open status file: " + path.string());
  return parse_account_statuses(in);
}

void write_account_statuses(std::ostream& out, std::span<const AccountStatus> statuses) {
  for (const auto& s : statuses) out << s.user_id << '\t' << to_string(s.status) << '\n';
}

}  // namespace tdel
