#pragma once

#include "opinion/text.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace opinion {

using FeatureIndex = std::uint32_t;

enum class NgramMode { unigrams, bigrams, unigrams_bigrams };
enum class RuleMode { off, tag, signed_count };
enum class Metric { presence, count, frequency, ifrequency };

std::string_view to_string(NgramMode mode);
std::string_view to_string(RuleMode mode);
std::string_view to_string(Metric metric);
NgramMode parse_ngram_mode(std::string_view text);
RuleMode parse_rule_mode(std::string_view text);
Metric parse_metric(std::string_view text);

inline constexpr std::string_view negation_tag = "NEG_";
inline constexpr std::string_view emphasis_tag = "EMP_";

struct RuleLexicons {
    std::set<std::string> negatory;
    std::set<std::string> emphasizer;

    // Throws opinion::Error when a word appears in both sets.
    void validate() const;
    bool empty() const { return negatory.empty() && emphasizer.empty(); }
    bool is_rule_word(const std::string& w) const { return negatory.count(w) || emphasizer.count(w); }
    std::set<std::string> all_words() const;
};

// Token stream after the rule transform, with one occurrence weight per token.
struct WeightedTokens {
    TokenSeq tokens;
    std::vector<int> weights;
};

// Applies the rule-word transform. In tag mode a rule word is merged into the
// following token ("not good" -> "NEG_good"); in signed-count mode the rule
// word is dropped and the following token weighs -1 (negation) or +2
// (emphasis). In a run of rule words the one nearest the content word binds
// and the rest are dropped. Rule words at the very end of a post are kept as
// ordinary tokens. Off mode, or no lexicons, gives every token weight 1.
WeightedTokens apply_rules(const TokenSeq& tokens, const RuleLexicons* rules, RuleMode mode);

// Ordered n-gram -> index map with document frequencies. Indices follow the
// lexicographic order of the n-gram keys; a bigram key is its two tokens
// joined by a single space.
class FeatureDictionary {
public:
    FeatureDictionary() = default;
    FeatureDictionary(std::vector<std::string> keys, std::vector<std::uint32_t> doc_freq, std::uint32_t n_docs,
                      NgramMode mode);

    std::size_t size() const { return keys_.size(); }
    std::optional<FeatureIndex> find(std::string_view key) const;
    const std::string& key(FeatureIndex i) const { return keys_[i]; }
    const std::vector<std::string>& keys() const { return keys_; }
    std::uint32_t doc_freq(FeatureIndex i) const { return doc_freq_[i]; }
    const std::vector<std::uint32_t>& doc_freqs() const { return doc_freq_; }
    std::uint32_t n_docs() const { return n_docs_; }
    NgramMode ngram_mode() const { return mode_; }

    // FNV-1a over keys, document frequencies, document count and n-gram mode.
    std::uint64_t fingerprint() const;

    bool operator==(const FeatureDictionary& other) const {
        return keys_ == other.keys_ && doc_freq_ == other.doc_freq_ && n_docs_ == other.n_docs_ &&
               mode_ == other.mode_;
    }

private:
    std::vector<std::string> keys_;
    std::vector<std::uint32_t> doc_freq_;
    std::uint32_t n_docs_ = 0;
    NgramMode mode_ = NgramMode::unigrams;
    std::unordered_map<std::string, FeatureIndex> index_;
};

nlohmann::json to_json(const FeatureDictionary& dict);
FeatureDictionary dictionary_from_json(const nlohmann::json& j);

// Calls fn(key, weight) for every n-gram occurrence of the configured sizes.
// A bigram carries the weight of its first token.
template <typename Fn>
void for_each_ngram(const WeightedTokens& wt, NgramMode mode, Fn&& fn) {
    const auto& t = wt.tokens;
    if (mode != NgramMode::bigrams)
        for (std::size_t i = 0; i < t.size(); ++i) fn(t[i], wt.weights[i]);
    if (mode != NgramMode::unigrams)
        for (std::size_t i = 0; i + 1 < t.size(); ++i) fn(t[i] + ' ' + t[i + 1], wt.weights[i]);
}

// Keeps every n-gram whose total occurrence count over the training posts is
// at least min_count. The rule transform is applied exactly as in
// extract_counts. Throws opinion::Error when nothing survives.
FeatureDictionary build_dictionary(std::span<const TokenSeq> training_posts, NgramMode mode,
                                   std::size_t min_count, const RuleLexicons* rules = nullptr,
                                   RuleMode rule_mode = RuleMode::off);

// Sparse signed occurrence counts, sorted by index, zeros never stored.
struct RawCounts {
    std::vector<std::pair<FeatureIndex, std::int64_t>> entries;

    std::int64_t total() const;
    bool operator==(const RawCounts&) const = default;
};

RawCounts extract_counts(const TokenSeq& tokens, const FeatureDictionary& dict, const RuleLexicons* rules,
                         RuleMode rule_mode);

// Sparse real vector sorted by index; zeros never stored.
struct FeatureVector {
    Metric metric = Metric::count;
    std::vector<std::pair<FeatureIndex, double>> entries;

    bool operator==(const FeatureVector&) const = default;
};

FeatureVector metric_presence(const RawCounts& counts);
FeatureVector metric_count(const RawCounts& counts);
// Throws opinion::Error when the counts sum to zero.
FeatureVector metric_frequency(const RawCounts& counts);
FeatureVector metric_ifrequency(const RawCounts& counts, const FeatureDictionary& dict);

FeatureVector compute_metric(Metric metric, const RawCounts& counts, const FeatureDictionary& dict);

} // namespace opinion
