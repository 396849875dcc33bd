#pragma once

#include "opinion/text.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace opinion {

// Reads a one-entry-per-line lexicon. Lines are trimmed, empty lines and lines
// starting with '#' are skipped, entries are case folded.
std::set<std::string> parse_lexicon(std::istream& in);
std::set<std::string> load_lexicon(const std::filesystem::path& path);

class StopList {
public:
    StopList() = default;
    explicit StopList(const std::set<std::string>& words);

    bool contains(std::string_view word) const { return words_.find(word) != words_.end(); }
    bool empty() const { return words_.empty(); }
    std::size_t size() const { return words_.size(); }
    const std::set<std::string, std::less<>>& words() const { return words_; }

private:
    std::set<std::string, std::less<>> words_;
};

TokenSeq remove_stop_words(const TokenSeq& tokens, const StopList& stop);

// Character trie over a word list, with per-node pass-through counts. Used to
// read off successor varieties for peak-and-plateau stemming. Characters are
// Unicode code points.
class SuffixTrie {
public:
    using NodeId = std::uint32_t;
    static constexpr NodeId root_id = 0;

    // Throws opinion::Error on an empty vocabulary. Duplicates are ignored.
    static SuffixTrie build(const std::set<std::string>& vocabulary);

    std::optional<NodeId> find(std::u32string_view prefix) const;

    std::size_t child_count(NodeId node) const { return nodes_[node].children.size(); }
    std::size_t pass_count(NodeId node) const { return nodes_[node].pass_count; }
    bool terminal(NodeId node) const { return nodes_[node].terminal; }
    const std::map<char32_t, NodeId>& children(NodeId node) const { return nodes_[node].children; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t word_count() const { return nodes_[root_id].pass_count; }
    const std::set<std::string>& vocabulary() const { return vocabulary_; }

private:
    struct Node {
        std::map<char32_t, NodeId> children;
        std::size_t pass_count = 0;
        bool terminal = false;
    };

    std::vector<Node> nodes_;
    std::set<std::string> vocabulary_;
};

// Number of distinct characters that follow the first `position` characters
// of `word` across the vocabulary. Throws if that prefix is not in the trie.
std::size_t successor_variety(const SuffixTrie& trie, std::string_view word, std::size_t position);

inline constexpr std::size_t default_min_stem_length = 2;

// Peak-and-plateau segmentation. With v(i) the successor variety after the
// first i characters (0 past the part of the word the trie knows), the cut is
// the smallest i >= min_stem_length, i < |word|, where v has a peak
// (v(i) > v(i-1) and v(i) >= v(i+1)) or a plateau onset (v(i) == v(i-1) > 1).
// Returns the word unchanged when no cut exists.
std::string stem(const SuffixTrie& trie, std::string_view word,
                 std::size_t min_stem_length = default_min_stem_length);

// Text to token pipeline: tokenize, drop stop words, then optionally stem
// against a trie fitted on training vocabulary. Protected words (the rule
// lexicons) bypass both stop-word removal and stemming.
class Preprocessor {
public:
    Preprocessor() = default;
    Preprocessor(StopList stop, std::set<std::string> protected_words);

    // Tokenization and stop-word removal only.
    TokenSeq filter(std::string_view text) const;

    // Returns a copy that stems with a trie built from the non-protected
    // vocabulary of `training_tokens` (each already passed through filter()).
    Preprocessor with_stemmer(const std::vector<TokenSeq>& training_tokens) const;
    Preprocessor with_stemmer(std::shared_ptr<const SuffixTrie> trie) const;

    TokenSeq stem_tokens(TokenSeq tokens) const;
    TokenSeq apply(std::string_view text) const { return stem_tokens(filter(text)); }

    const StopList& stop_list() const { return stop_; }
    const std::set<std::string>& protected_words() const { return protected_; }
    const std::shared_ptr<const SuffixTrie>& stemmer() const { return trie_; }

private:
    StopList stop_;
    std::set<std::string> protected_;
    std::shared_ptr<const SuffixTrie> trie_;
};

} // namespace opinion
