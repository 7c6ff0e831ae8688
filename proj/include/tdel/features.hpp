#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdel/corpus.hpp"

namespace tdel {

/// Lowercases, splits on Unicode whitespace, maps anything containing "://" to
/// "<url>", strips surrounding punctuation while keeping leading '#' and '@'.
/// Lowercasing is ASCII-only; other code points pass through unchanged.
std::vector<std::string> tokenize(std::string_view text);

inline constexpr std::string_view kUrlToken = "<url>";

enum class Namespace : std::uint8_t { social = 0, user = 1, word = 2 };
inline constexpr std::size_t kNamespaceCount = 3;

std::string_view to_string(Namespace ns);
std::optional<Namespace> parse_namespace(std::string_view name);

inline constexpr std::size_t kSocialCount = 10;
inline constexpr std::array<std::string_view, kSocialCount> kSocialKeys = {
    "followers", "friends",       "statuses",      "listed",   "verified",
    "is_retweet", "is_reply",     "hashtag_count", "mention_count", "url_count"};

std::optional<std::size_t> social_slot(std::string_view key);

/// Which feature groups participate, plus individually dropped social
/// features (used by the ablation runs).
struct FeatureMask {
  std::bitset<kNamespaceCount> namespaces;
  std::bitset<kSocialCount> dropped_social;

  static FeatureMask all() { return FeatureMask{std::bitset<kNamespaceCount>{0b111}, {}}; }
  static FeatureMask only(Namespace ns) {
    FeatureMask m;
    m.namespaces.set(static_cast<std::size_t>(ns));
    return m;
  }
  bool has(Namespace ns) const { return namespaces.test(static_cast<std::size_t>(ns)); }
  FeatureMask without_social(std::size_t slot) const {
    FeatureMask m = *this;
    m.dropped_social.set(slot);
    return m;
  }
  bool operator==(const FeatureMask&) const = default;

  /// "social,user,word" with an optional "-is_retweet,-followers" suffix list.
  std::string to_string() const;
  static FeatureMask parse(std::string_view text);
};

/// log(1+x) for counts, {0,1} for booleans, in kSocialKeys order.
std::array<double, kSocialCount> social_values(const TweetRecord& record);

/// Namespaced index: social features first, then user ids, then words, each
/// namespace occupying one contiguous block.
class FeatureSpace {
 public:
  FeatureSpace();

  /// Unfrozen spaces grow; frozen ones never allocate.
  void observe(const TweetRecord& record);
  void freeze();
  bool frozen() const { return frozen_; }

  std::uint32_t dimension() const;
  std::uint32_t namespace_size(Namespace ns) const;
  std::uint32_t namespace_offset(Namespace ns) const;

  std::optional<std::uint32_t> user_index(UserId user) const;
  std::optional<std::uint32_t> word_index(std::string_view token) const;
  static constexpr std::uint32_t social_index(std::size_t slot) {
    return static_cast<std::uint32_t>(slot);
  }

  /// "namespace<TAB>key<TAB>index" lines in index order.
  void dump(std::ostream& out) const;
  static FeatureSpace load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static FeatureSpace load(const std::filesystem::path& path);

  bool operator==(const FeatureSpace& other) const;

 private:
  bool frozen_ = false;
  std::vector<UserId> users_;
  std::vector<std::string> words_;
  std::unordered_map<UserId, std::uint32_t> user_ids_;
  std::unordered_map<std::string, std::uint32_t> word_ids_;
};

/// Throws std::invalid_argument on an empty sequence.
FeatureSpace fit_feature_space(std::span<const TweetRecord> train);
FeatureSpace fit_feature_space(std::span<const LabeledTweet> train);

/// Read-only view of one sparse instance.
struct SparseView {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;
  double squared_norm = 0.0;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

class FeatureVector {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  FeatureVector() = default;
  /// Sorts by index; throws std::invalid_argument on duplicate indices.
  explicit FeatureVector(std::vector<Entry> entries);

  std::vector<Entry> entries() const;
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }
  double squared_norm() const { return squared_norm_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  SparseView view() const { return {indices_, values_, squared_norm_}; }

  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  double squared_norm_ = 0.0;
};

/// Requires a frozen space; unknown users and words contribute nothing.
FeatureVector extract_features(const TweetRecord& record, const FeatureSpace& space,
                               const FeatureMask& mask);

/// Compressed-row collection of labeled instances, labels in {0,1}.
class Dataset {
 public:
  Dataset() { offsets_.push_back(0); }

  void add(SparseView x, int label);
  void add(const FeatureVector& x, int label) { add(x.view(), label); }
  void reserve(std::size_t rows, std::size_t nonzeros);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t nonzeros() const { return indices_.size(); }
  SparseView row(std::size_t i) const;
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }
  std::size_t positives() const;
  /// Bytes held by the row storage.
  std::size_t memory_bytes() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::vector<double> norms_;
  std::vector<int> labels_;
};

/// OpenMP-parallel extraction of a labeled batch; row i comes from tweets[i].
Dataset extract_dataset(std::span<const LabeledTweet> tweets, const FeatureSpace& space,
                        const FeatureMask& mask);
/// Single-threaded reference for extract_dataset.
Dataset extract_dataset_serial(std::span<const LabeledTweet> tweets, const FeatureSpace& space,
                               const FeatureMask& mask);

}  // namespace tdel
