#include "opinion/features.hpp"

#include "opinion/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace opinion {

std::string_view to_string(NgramMode mode) {
    switch (mode) {
    case NgramMode::unigrams: return "unigrams";
    case NgramMode::bigrams: return "bigrams";
    case NgramMode::unigrams_bigrams: return "unigrams+bigrams";
    }
    return "unigrams";
}

std::string_view to_string(RuleMode mode) {
    switch (mode) {
    case RuleMode::off: return "off";
    case RuleMode::tag: return "tag";
    case RuleMode::signed_count: return "signed-count";
    }
    return "off";
}

std::string_view to_string(Metric metric) {
    switch (metric) {
    case Metric::presence: return "presence";
    case Metric::count: return "count";
    case Metric::frequency: return "frequency";
    case Metric::ifrequency: return "ifrequency";
    }
    return "count";
}

NgramMode parse_ngram_mode(std::string_view text) {
    if (text == "unigrams") return NgramMode::unigrams;
    if (text == "bigrams") return NgramMode::bigrams;
    if (text == "unigrams+bigrams" || text == "both") return NgramMode::unigrams_bigrams;
    throw Error("unknown n-gram mode \"" + std::string(text) + "\"");
}

RuleMode parse_rule_mode(std::string_view text) {
    if (text == "off") return RuleMode::off;
    if (text == "tag") return RuleMode::tag;
    if (text == "signed-count") return RuleMode::signed_count;
    throw Error("unknown rule mode \"" + std::string(text) + "\"");
}

Metric parse_metric(std::string_view text) {
    if (text == "presence") return Metric::presence;
    if (text == "count") return Metric::count;
    if (text == "frequency") return Metric::frequency;
    if (text == "ifrequency") return Metric::ifrequency;
    throw Error("unknown metric \"" + std::string(text) + "\"");
}

void RuleLexicons::validate() const {
    for (const auto& w : negatory) {
        if (emphasizer.count(w)) throw Error("word \"" + w + "\" is both negatory and emphasizer");
    }
}

std::set<std::string> RuleLexicons::all_words() const {
    std::set<std::string> words = negatory;
    words.insert(emphasizer.begin(), emphasizer.end());
    return words;
}

WeightedTokens apply_rules(const TokenSeq& tokens, const RuleLexicons* rules, RuleMode mode) {
    WeightedTokens out;
    out.tokens.reserve(tokens.size());
    out.weights.reserve(tokens.size());
    if (mode == RuleMode::off || rules == nullptr || rules->empty()) {
        out.tokens = tokens;
        out.weights.assign(tokens.size(), 1);
        return out;
    }

    std::size_t i = 0;
    while (i < tokens.size()) {
        if (!rules->is_rule_word(tokens[i])) {
            out.tokens.push_back(tokens[i]);
            out.weights.push_back(1);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < tokens.size() && rules->is_rule_word(tokens[j])) ++j;
        if (j == tokens.size()) {
            for (; i < j; ++i) {
                out.tokens.push_back(tokens[i]);
                out.weights.push_back(1);
            }
            break;
        }
        const bool negated = rules->negatory.count(tokens[j - 1]) > 0;
        if (mode == RuleMode::tag) {
            out.tokens.push_back(std::string(negated ? negation_tag : emphasis_tag) + tokens[j]);
            out.weights.push_back(1);
        } else {
            out.tokens.push_back(tokens[j]);
            out.weights.push_back(negated ? -1 : 2);
        }
        i = j + 1;
    }
    return out;
}

FeatureDictionary::FeatureDictionary(std::vector<std::string> keys, std::vector<std::uint32_t> doc_freq,
                                     std::uint32_t n_docs, NgramMode mode)
    : keys_(std::move(keys)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs), mode_(mode) {
    if (keys_.size() != doc_freq_.size()) throw Error("dictionary keys and document frequencies differ in length");
    if (!std::is_sorted(keys_.begin(), keys_.end()) ||
        std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end()) {
        throw Error("dictionary keys must be strictly increasing");
    }
    index_.reserve(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        if (doc_freq_[i] == 0 || doc_freq_[i] > n_docs_) {
            throw Error("document frequency of \"" + keys_[i] + "\" outside [1, n_docs]");
        }
        index_.emplace(keys_[i], static_cast<FeatureIndex>(i));
    }
}

std::optional<FeatureIndex> FeatureDictionary::find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 8);
    }
};

} // namespace

std::uint64_t FeatureDictionary::fingerprint() const {
    Fnv1a f;
    f.u64(static_cast<std::uint64_t>(mode_));
    f.u64(n_docs_);
    f.u64(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        f.u64(keys_[i].size());
        f.bytes(keys_[i].data(), keys_[i].size());
        f.u64(doc_freq_[i]);
    }
    return f.h;
}

nlohmann::json to_json(const FeatureDictionary& dict) {
    return {{"ngram_mode", to_string(dict.ngram_mode())},
            {"n_docs", dict.n_docs()},
            {"keys", dict.keys()},
            {"doc_freq", dict.doc_freqs()}};
}

FeatureDictionary dictionary_from_json(const nlohmann::json& j) {
    try {
        return FeatureDictionary(j.at("keys").get<std::vector<std::string>>(),
                                 j.at("doc_freq").get<std::vector<std::uint32_t>>(),
                                 j.at("n_docs").get<std::uint32_t>(),
                                 parse_ngram_mode(j.at("ngram_mode").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed feature dictionary: ") + e.what());
    }
}

FeatureDictionary build_dictionary(std::span<const TokenSeq> training_posts, NgramMode mode,
                                   std::size_t min_count, const RuleLexicons* rules, RuleMode rule_mode) {
    if (training_posts.empty()) throw Error("cannot build a dictionary from zero training posts");
    if (rule_mode != RuleMode::off && rules == nullptr) throw Error("rule mode requires rule lexicons");

    struct Tally {
        std::uint64_t occurrences = 0;
        std::uint32_t docs = 0;
        std::size_t last_doc = static_cast<std::size_t>(-1);
    };
    std::map<std::string, Tally> tallies;
    for (std::size_t d = 0; d < training_posts.size(); ++d) {
        const WeightedTokens wt = apply_rules(training_posts[d], rules, rule_mode);
        for_each_ngram(wt, mode, [&](const std::string& key, int) {
            Tally& t = tallies[key];
            ++t.occurrences;
            if (t.last_doc != d) {
                t.last_doc = d;
                ++t.docs;
            }
        });
    }

    std::vector<std::string> keys;
    std::vector<std::uint32_t> doc_freq;
    for (auto& [key, tally] : tallies) {
        if (tally.occurrences < min_count) continue;
        keys.push_back(key);
        doc_freq.push_back(tally.docs);
    }
    if (keys.empty()) {
        throw Error("no n-gram reaches the minimum count of " + std::to_string(min_count) +
                    "; the feature dictionary would be empty");
    }
    return FeatureDictionary(std::move(keys), std::move(doc_freq),
                             static_cast<std::uint32_t>(training_posts.size()), mode);
}

std::int64_t RawCounts::total() const {
    std::int64_t sum = 0;
    for (const auto& [i, v] : entries) sum += v;
    return sum;
}

RawCounts extract_counts(const TokenSeq& tokens, const FeatureDictionary& dict, const RuleLexicons* rules,
                         RuleMode rule_mode) {
    if (rule_mode != RuleMode::off && rules == nullptr) throw Error("rule mode requires rule lexicons");
    std::map<FeatureIndex, std::int64_t> sums;
    const WeightedTokens wt = apply_rules(tokens, rules, rule_mode);
    for_each_ngram(wt, dict.ngram_mode(), [&](const std::string& key, int weight) {
        if (auto idx = dict.find(key)) sums[*idx] += weight;
    });
    RawCounts counts;
    for (const auto& [i, v] : sums)
        if (v != 0) counts.entries.emplace_back(i, v);
    return counts;
}

FeatureVector metric_presence(const RawCounts& counts) {
    FeatureVector fv{Metric::presence, {}};
    fv.entries.reserve(counts.entries.size());
    for (const auto& [i, t] : counts.entries)
        if (t != 0) fv.entries.emplace_back(i, 1.0);
    return fv;
}

FeatureVector metric_count(const RawCounts& counts) {
    FeatureVector fv{Metric::count, {}};
    fv.entries.reserve(counts.entries.size());
    for (const auto& [i, t] : counts.entries) fv.entries.emplace_back(i, static_cast<double>(t));
    return fv;
}

FeatureVector metric_frequency(const RawCounts& counts) {
    const std::int64_t total = counts.total();
    if (total == 0) throw Error("frequency is undefined for a post whose counts sum to zero");
    FeatureVector fv{Metric::frequency, {}};
    fv.entries.reserve(counts.entries.size());
    const double denom = static_cast<double>(total);
    for (const auto& [i, t] : counts.entries) fv.entries.emplace_back(i, static_cast<double>(t) / denom);
    return fv;
}

FeatureVector metric_ifrequency(const RawCounts& counts, const FeatureDictionary& dict) {
    FeatureVector freq = metric_frequency(counts);
    FeatureVector fv{Metric::ifrequency, {}};
    fv.entries.reserve(freq.entries.size());
    const double n_docs = static_cast<double>(dict.n_docs());
    for (const auto& [i, f] : freq.entries) {
        if (i >= dict.size()) throw Error("feature index " + std::to_string(i) + " outside the dictionary");
        const double value = f * std::log(n_docs / static_cast<double>(dict.doc_freq(i)));
        if (value != 0.0) fv.entries.emplace_back(i, value);
    }
    return fv;
}

FeatureVector compute_metric(Metric metric, const RawCounts& counts, const FeatureDictionary& dict) {
    switch (metric) {
    case Metric::presence: return metric_presence(counts);
    case Metric::count: return metric_count(counts);
    case Metric::frequency: return metric_frequency(counts);
    case Metric::ifrequency: return metric_ifrequency(counts, dict);
    }
    throw Error("unknown metric");
}

} // namespace opinion
