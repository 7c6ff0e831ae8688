#include "tdel/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "tdel/rng.hpp"

namespace tdel {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + text + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto text = trim(line);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(text).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(std::string_view(text).substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return parse(in);
}

void KeyValueConfig::set_override(std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override must look like key=value: " + std::string(assignment));
  auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override has an empty key");
  values_[key] = trim(assignment.substr(eq + 1));
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "seed", "stream", "statuses", "lexicon", "output_dir", "horizon", "split_boundary",
      "dev_fraction", "skip_budget", "learner", "mask",
      "svm.c", "svm.positive_weight", "svm.epsilon", "svm.max_epochs", "svm.seed",
      "pa.variant", "pa.c", "pa.positive_weight", "pa.epochs", "pa.seed",
      "subgroups.bands", "subgroups.verified", "curses.language",
      "compare.rounds", "compare.model_b",
      "synth.n_users", "synth.n_tweets", "synth.base_deletion_rate",
      "synth.propensity_concentration", "synth.curse_rate", "synth.curse_deletion_boost",
      "synth.retweet_rate", "synth.retweet_deletion_boost", "synth.reply_rate",
      "synth.spam_account_fraction", "synth.spam_token_rate", "synth.protected_fraction",
      "synth.popular_propensity_multiplier", "synth.popular_followers_threshold",
      "synth.followers_log_mean", "synth.followers_log_sd", "synth.english_fraction",
      "synth.vocabulary_size", "synth.zipf_exponent", "synth.min_words", "synth.max_words",
      "synth.window_start", "synth.window_seconds", "synth.mean_deletion_delay_hours",
      "synth.seed"};
  return keys;
}

std::vector<FollowerBand> parse_bands(std::string_view text) {
  std::vector<FollowerBand> bands;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto semi = text.find(';', pos);
    if (semi == std::string_view::npos) semi = text.size();
    auto item = trim(text.substr(pos, semi - pos));
    pos = semi + 1;
    if (item.empty()) continue;
    auto colon = item.find(':');
    auto dash = item.find('-', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || dash == std::string::npos)
      throw ConfigError("band '" + item + "' must look like name:lo-hi");
    FollowerBand band;
    band.name = trim(std::string_view(item).substr(0, colon));
    band.lower = parse_number<std::uint64_t>("subgroups.bands", trim(std::string_view(item).substr(colon + 1, dash - colon - 1)));
    auto hi = trim(std::string_view(item).substr(dash + 1));
    if (!hi.empty()) band.upper = parse_number<std::uint64_t>("subgroups.bands", hi);
    bands.push_back(std::move(band));
  }
  return bands;
}

ExperimentConfig build_experiment_config(const KeyValueConfig& kv, const std::filesystem::path& base_dir) {
  for (const auto& [key, value] : kv.values())
    if (!known_config_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  auto str = [&](const char* key) { return kv.get(key); };
  auto path = [&](const char* key, std::filesystem::path& out) {
    if (auto v = str(key)) {
      std::filesystem::path p(*v);
      out = (p.is_absolute() || base_dir.empty()) ? p : base_dir / p;
    }
  };
  auto num = [&]<typename T>(const char* key, T& out) {
    if (auto v = str(key)) out = parse_number<T>(key, *v);
  };
  auto stamp = [&](const char* key, auto& out) {
    if (auto v = str(key)) {
      try {
        out = parse_timestamp(*v);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
      }
    }
  };

  num("seed", cfg.seed);
  // Every stochastic component derives from the global seed unless set explicitly.
  cfg.learner.svm.seed = derive_seed(cfg.seed, 1);
  cfg.learner.pa.seed = derive_seed(cfg.seed, 2);
  cfg.synth.seed = cfg.seed;

  path("stream", cfg.stream);
  path("statuses", cfg.statuses);
  path("lexicon", cfg.lexicon);
  path("output_dir", cfg.output_dir);
  path("compare.model_b", cfg.compare_model_b);
  stamp("horizon", cfg.horizon);
  stamp("split_boundary", cfg.split_boundary);
  num("dev_fraction", cfg.dev_fraction);
  num("skip_budget", cfg.skip_budget);
  num("compare.rounds", cfg.compare_rounds);
  if (auto v = str("curses.language")) cfg.curse_language = *v;

  try {
    if (auto v = str("learner")) cfg.learner.kind = parse_learner_kind(*v);
    if (auto v = str("mask")) cfg.mask = FeatureMask::parse(*v);
    if (auto v = str("pa.variant")) cfg.learner.pa.variant = parse_pa_variant(*v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  num("svm.c", cfg.learner.svm.c);
  num("svm.epsilon", cfg.learner.svm.epsilon);
  num("svm.max_epochs", cfg.learner.svm.max_epochs);
  num("svm.seed", cfg.learner.svm.seed);
  num("pa.c", cfg.learner.pa.c);
  num("pa.epochs", cfg.learner.pa.epochs);
  num("pa.seed", cfg.learner.pa.seed);
  // One switch for both learners: "auto" means n_neg/n_pos on the fit split.
  for (const char* key : {"svm.positive_weight", "pa.positive_weight"}) {
    auto v = str(key);
    if (!v || *v == "auto") continue;
    cfg.learner.auto_positive_weight = false;
    const double w = parse_number<double>(key, *v);
    if (std::string_view(key).starts_with("svm")) cfg.learner.svm.positive_weight = w;
    else cfg.learner.pa.positive_weight = w;
  }

  if (auto v = str("subgroups.bands")) cfg.subgroups.bands = parse_bands(*v);
  if (auto v = str("subgroups.verified")) cfg.subgroups.include_verified = parse_bool("subgroups.verified", *v);

  auto& s = cfg.synth;
  num("synth.n_users", s.n_users);
  num("synth.n_tweets", s.n_tweets);
  num("synth.base_deletion_rate", s.base_deletion_rate);
  num("synth.propensity_concentration", s.propensity_concentration);
  num("synth.curse_rate", s.curse_rate);
  num("synth.curse_deletion_boost", s.curse_deletion_boost);
  num("synth.retweet_rate", s.retweet_rate);
  num("synth.retweet_deletion_boost", s.retweet_deletion_boost);
  num("synth.reply_rate", s.reply_rate);
  num("synth.spam_account_fraction", s.spam_account_fraction);
  num("synth.spam_token_rate", s.spam_token_rate);
  num("synth.protected_fraction", s.protected_fraction);
  num("synth.popular_propensity_multiplier", s.popular_propensity_multiplier);
  num("synth.popular_followers_threshold", s.popular_followers_threshold);
  num("synth.followers_log_mean", s.followers_log_mean);
  num("synth.followers_log_sd", s.followers_log_sd);
  num("synth.english_fraction", s.english_fraction);
  num("synth.vocabulary_size", s.vocabulary_size);
  num("synth.zipf_exponent", s.zipf_exponent);
  num("synth.min_words", s.min_words);
  num("synth.max_words", s.max_words);
  stamp("synth.window_start", s.window_start);
  num("synth.window_seconds", s.window_seconds);
  num("synth.mean_deletion_delay_hours", s.mean_deletion_delay_hours);
  num("synth.seed", s.seed);

  try {
    validate(cfg.learner.svm);
    validate(cfg.learner.pa);
    validate(cfg.synth);
    cfg.subgroups.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.dev_fraction >= 0.0 && cfg.dev_fraction < 1.0)) throw ConfigError("dev_fraction must be in [0,1)");
  return cfg;
}

}  // namespace tdel
