#include "tdel/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tdel {

namespace {

// Decodes the code point at text[i]; sets `len` to its byte length. Invalid
// sequences are treated as single opaque bytes.
char32_t decode_utf8(std::string_view text, std::size_t i, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= text.size()) return -1;
    const auto b = static_cast<unsigned char>(text[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    int c1 = cont(1);
    if (c1 >= 0) {
      len = 2;
      return (static_cast<char32_t>(b0 & 0x1F) << 6) | static_cast<char32_t>(c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      len = 3;
      return (static_cast<char32_t>(b0 & 0x0F) << 12) | (static_cast<char32_t>(c1) << 6) |
             static_cast<char32_t>(c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      len = 4;
      return (static_cast<char32_t>(b0 & 0x07) << 18) | (static_cast<char32_t>(c1) << 12) |
             (static_cast<char32_t>(c2) << 6) | static_cast<char32_t>(c3);
    }
  }
  len = 1;
  return 0xFFFD;
}

bool is_unicode_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

void append_token(std::string raw, std::vector<std::string>& out) {
  for (auto& ch : raw) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (raw.find("://") != std::string::npos) {
    out.emplace_back(kUrlToken);
    return;
  }
  std::size_t b = 0, e = raw.size();
  while (b < e && is_punct(raw[b]) && raw[b] != '#' && raw[b] != '@') ++b;
  while (e > b && is_punct(raw[e - 1])) --e;
  if (b < e) out.push_back(raw.substr(b, e - b));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0, i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    const char32_t c = decode_utf8(text, i, len);
    if (is_unicode_space(c)) {
      if (i > start) append_token(std::string(text.substr(start, i - start)), out);
      start = i + len;
    }
    i += len;
  }
  if (start < text.size()) append_token(std::string(text.substr(start)), out);
  return out;
}

std::string_view to_string(Namespace ns) {
  switch (ns) {
    case Namespace::social: return "social";
    case Namespace::user: return "user";
    case Namespace::word: return "word";
  }
  return "?";
}

std::optional<Namespace> parse_namespace(std::string_view name) {
  if (name == "social") return Namespace::social;
  if (name == "user") return Namespace::user;
  if (name == "word") return Namespace::word;
  return std::nullopt;
}

std::optional<std::size_t> social_slot(std::string_view key) {
  for (std::size_t i = 0; i < kSocialKeys.size(); ++i)
    if (kSocialKeys[i] == key) return i;
  return std::nullopt;
}

std::string FeatureMask::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < kNamespaceCount; ++i) {
    if (!namespaces.test(i)) continue;
    if (!s.empty()) s += ',';
    s += tdel::to_string(static_cast<Namespace>(i));
  }
  if (s.empty()) s = "none";
  for (std::size_t i = 0; i < kSocialCount; ++i) {
    if (!dropped_social.test(i)) continue;
    s += ",-";
    s += kSocialKeys[i];
  }
  return s;
}

FeatureMask FeatureMask::parse(std::string_view text) {
  FeatureMask m;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = text.substr(pos, comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (item == "all") {
      m.namespaces.set();
    } else if (!item.empty() && item != "none") {
      if (item.front() == '-') {
        auto slot = social_slot(item.substr(1));
        if (!slot) throw std::invalid_argument("unknown social feature in mask: " + std::string(item));
        m.dropped_social.set(*slot);
      } else {
        auto ns = parse_namespace(item);
        if (!ns) throw std::invalid_argument("unknown namespace in mask: " + std::string(item));
        m.namespaces.set(static_cast<std::size_t>(*ns));
      }
    }
    pos = comma + 1;
  }
  return m;
}

std::array<double, kSocialCount> social_values(const TweetRecord& r) {
  auto count = [](std::uint64_t x) { return std::log1p(static_cast<double>(x)); };
  return {count(r.followers_count),     count(r.friends_count), count(r.statuses_count),
          count(r.listed_count),        r.verified ? 1.0 : 0.0, r.is_retweet ? 1.0 : 0.0,
          r.is_reply ? 1.0 : 0.0,       count(r.hashtag_count), count(r.mention_count),
          count(r.url_count)};
}

FeatureSpace::FeatureSpace() = default;

void FeatureSpace::observe(const TweetRecord& record) {
  if (frozen_) return;
  if (user_ids_.emplace(record.user_id, static_cast<std::uint32_t>(users_.size())).second)
    users_.push_back(record.user_id);
  for (auto& tok : tokenize(record.text)) {
    auto [it, inserted] = word_ids_.emplace(tok, static_cast<std::uint32_t>(words_.size()));
    if (inserted) words_.push_back(std::move(tok));
  }
}

void FeatureSpace::freeze() { frozen_ = true; }

std::uint32_t FeatureSpace::namespace_size(Namespace ns) const {
  switch (ns) {
    case Namespace::social: return static_cast<std::uint32_t>(kSocialCount);
    case Namespace::user: return static_cast<std::uint32_t>(users_.size());
    case Namespace::word: return static_cast<std::uint32_t>(words_.size());
  }
  return 0;
}

std::uint32_t FeatureSpace::namespace_offset(Namespace ns) const {
  switch (ns) {
    case Namespace::social: return 0;
    case Namespace::user: return static_cast<std::uint32_t>(kSocialCount);
    case Namespace::word: return static_cast<std::uint32_t>(kSocialCount + users_.size());
  }
  return 0;
}

std::uint32_t FeatureSpace::dimension() const {
  return static_cast<std::uint32_t>(kSocialCount + users_.size() + words_.size());
}

std::optional<std::uint32_t> FeatureSpace::user_index(UserId user) const {
  auto it = user_ids_.find(user);
  if (it == user_ids_.end()) return std::nullopt;
  return namespace_offset(Namespace::user) + it->second;
}

std::optional<std::uint32_t> FeatureSpace::word_index(std::string_view token) const {
  auto it = word_ids_.find(std::string(token));
  if (it == word_ids_.end()) return std::nullopt;
  return namespace_offset(Namespace::word) + it->second;
}

void FeatureSpace::dump(std::ostream& out) const {
  for (std::size_t i = 0; i < kSocialCount; ++i) out << "social\t" << kSocialKeys[i] << '\t' << i << '\n';
  const auto uoff = namespace_offset(Namespace::user);
  for (std::size_t i = 0; i < users_.size(); ++i) out << "user\t" << users_[i] << '\t' << uoff + i << '\n';
  const auto woff = namespace_offset(Namespace::word);
  for (std::size_t i = 0; i < words_.size(); ++i) out << "word\t" << words_[i] << '\t' << woff + i << '\n';
}

FeatureSpace FeatureSpace::load(std::istream& in) {
  FeatureSpace space;
  std::string line;
  std::size_t expected = 0;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw DataError("feature space line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) fail("expected three tab-separated fields");
    std::string_view ns_name(line.data(), t1);
    std::string key = line.substr(t1 + 1, t2 - t1 - 1);
    std::string_view idx_text(line.data() + t2 + 1, line.size() - t2 - 1);
    std::uint64_t index = 0;
    auto [p, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
    if (ec != std::errc{} || p != idx_text.data() + idx_text.size()) fail("bad index");
    if (index != expected) fail("indices must be dense and ordered");
    auto ns = parse_namespace(ns_name);
    if (!ns) fail("unknown namespace");
    switch (*ns) {
      case Namespace::social:
        if (index >= kSocialCount || kSocialKeys[index] != key) fail("social block mismatch");
        break;
      case Namespace::user: {
        if (index < kSocialCount || !space.words_.empty()) fail("user block out of place");
        UserId uid = 0;
        auto [q, ec2] = std::from_chars(key.data(), key.data() + key.size(), uid);
        if (ec2 != std::errc{} || q != key.data() + key.size()) fail("bad user id");
        if (!space.user_ids_.emplace(uid, static_cast<std::uint32_t>(space.users_.size())).second)
          fail("duplicate user");
        space.users_.push_back(uid);
        break;
      }
      case Namespace::word:
        if (index < kSocialCount) fail("word block out of place");
        if (!space.word_ids_.emplace(key, static_cast<std::uint32_t>(space.words_.size())).second)
          fail("duplicate word");
        space.words_.push_back(key);
        break;
    }
    ++expected;
  }
  if (expected < kSocialCount) throw DataError("feature space dump is truncated");
  space.freeze();
  return space;
}

void FeatureSpace::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write feature space: " + path.string());
  dump(out);
  if (!out) throw DataError("write failed: " + path.string());
}

FeatureSpace FeatureSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature space: " + path.string());
  return load(in);
}

bool FeatureSpace::operator==(const FeatureSpace& other) const {
  return frozen_ == other.frozen_ && users_ == other.users_ && words_ == other.words_;
}

namespace {

template <typename Range, typename Get>
FeatureSpace fit_impl(const Range& train, Get get) {
  if (train.empty()) throw std::invalid_argument("cannot fit a feature space on an empty training set");
  FeatureSpace space;
  for (const auto& item : train) space.observe(get(item));
  space.freeze();
  return space;
}

}  // namespace

FeatureSpace fit_feature_space(std::span<const TweetRecord> train) {
  return fit_impl(train, [](const TweetRecord& r) -> const TweetRecord& { return r; });
}

FeatureSpace fit_feature_space(std::span<const LabeledTweet> train) {
  return fit_impl(train, [](const LabeledTweet& t) -> const TweetRecord& { return t.record; });
}

FeatureVector::FeatureVector(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  indices_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].index == entries[i - 1].index)
      throw std::invalid_argument("duplicate feature index " + std::to_string(entries[i].index));
    indices_.push_back(entries[i].index);
    values_.push_back(entries[i].value);
    squared_norm_ += entries[i].value * entries[i].value;
  }
}

std::vector<FeatureVector::Entry> FeatureVector::entries() const {
  std::vector<Entry> out(indices_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {indices_[i], values_[i]};
  return out;
}

FeatureVector extract_features(const TweetRecord& record, const FeatureSpace& space,
                               const FeatureMask& mask) {
  if (!space.frozen()) throw std::logic_error("extract_features needs a frozen feature space");
  std::vector<FeatureVector::Entry> entries;
  if (mask.has(Namespace::social)) {
    const auto values = social_values(record);
    for (std::size_t s = 0; s < kSocialCount; ++s)
      if (!mask.dropped_social.test(s) && values[s] != 0.0)
        entries.push_back({FeatureSpace::social_index(s), values[s]});
  }
  if (mask.has(Namespace::user)) {
    if (auto idx = space.user_index(record.user_id)) entries.push_back({*idx, 1.0});
  }
  if (mask.has(Namespace::word)) {
    std::vector<std::uint32_t> words;
    for (const auto& tok : tokenize(record.text))
      if (auto idx = space.word_index(tok)) words.push_back(*idx);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (auto w : words) entries.push_back({w, 1.0});
  }
  return FeatureVector(std::move(entries));
}

void Dataset::add(SparseView x, int label) {
  indices_.insert(indices_.end(), x.indices.begin(), x.indices.end());
  values_.insert(values_.end(), x.values.begin(), x.values.end());
  offsets_.push_back(indices_.size());
  norms_.push_back(x.squared_norm);
  labels_.push_back(label);
}

void Dataset::reserve(std::size_t rows, std::size_t nonzeros) {
  offsets_.reserve(rows + 1);
  norms_.reserve(rows);
  labels_.reserve(rows);
  indices_.reserve(nonzeros);
  values_.reserve(nonzeros);
}

SparseView Dataset::row(std::size_t i) const {
  const auto b = offsets_[i];
  const auto n = offsets_[i + 1] - b;
  return {std::span<const std::uint32_t>(indices_).subspan(b, n),
          std::span<const double>(values_).subspan(b, n), norms_[i]};
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), 1));
}

std::size_t Dataset::memory_bytes() const {
  return offsets_.capacity() * sizeof(std::size_t) + indices_.capacity() * sizeof(std::uint32_t) +
         values_.capacity() * sizeof(double) + norms_.capacity() * sizeof(double) +
         labels_.capacity() * sizeof(int);
}

Dataset extract_dataset_serial(std::span<const LabeledTweet> tweets, const FeatureSpace& space,
                               const FeatureMask& mask) {
  Dataset data;
  for (const auto& t : tweets) data.add(extract_features(t.record, space, mask), t.label);
  return data;
}

Dataset extract_dataset(std::span<const LabeledTweet> tweets, const FeatureSpace& space,
                        const FeatureMask& mask) {
  // Extract in fixed-size blocks so peak memory stays near one block of
  // FeatureVector objects on top of the packed rows.
  constexpr std::size_t kBlock = 1 << 14;
  Dataset data;
  std::vector<FeatureVector> block;
  for (std::size_t start = 0; start < tweets.size(); start += kBlock) {
    const std::size_t n = std::min(kBlock, tweets.size() - start);
    block.assign(n, FeatureVector{});
    const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sn; ++i) {
      const auto k = static_cast<std::size_t>(i);
      block[k] = extract_features(tweets[start + k].record, space, mask);
    }
    for (std::size_t k = 0; k < n; ++k) data.add(block[k], tweets[start + k].label);
  }
  return data;
}

}  // namespace tdel
