#include "opinion/preprocess.hpp"

#include "opinion/error.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

namespace opinion {

std::set<std::string> parse_lexicon(std::istream& in) {
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        words.insert(case_fold(std::string_view(line).substr(first, last - first + 1)));
    }
    return words;
}

std::set<std::string> load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon file " + path.string());
    return parse_lexicon(in);
}

StopList::StopList(const std::set<std::string>& words) {
    for (const auto& w : words) words_.insert(case_fold(w));
}

TokenSeq remove_stop_words(const TokenSeq& tokens, const StopList& stop) {
    TokenSeq out;
    out.reserve(tokens.size());
    std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
                 [&](const std::string& t) { return !stop.contains(t); });
    return out;
}

SuffixTrie SuffixTrie::build(const std::set<std::string>& vocabulary) {
    if (vocabulary.empty()) throw Error("cannot build a stemming trie from an empty vocabulary");
    SuffixTrie trie;
    trie.vocabulary_ = vocabulary;
    trie.nodes_.emplace_back();
    for (const std::string& word : vocabulary) {
        NodeId node = root_id;
        ++trie.nodes_[node].pass_count;
        for (char32_t c : to_code_points(word)) {
            auto it = trie.nodes_[node].children.find(c);
            NodeId next;
            if (it == trie.nodes_[node].children.end()) {
                next = static_cast<NodeId>(trie.nodes_.size());
                trie.nodes_[node].children.emplace(c, next);
                trie.nodes_.emplace_back();
            } else {
                next = it->second;
            }
            node = next;
            ++trie.nodes_[node].pass_count;
        }
        trie.nodes_[node].terminal = true;
    }
    return trie;
}

std::optional<SuffixTrie::NodeId> SuffixTrie::find(std::u32string_view prefix) const {
    NodeId node = root_id;
    for (char32_t c : prefix) {
        auto it = nodes_[node].children.find(c);
        if (it == nodes_[node].children.end()) return std::nullopt;
        node = it->second;
    }
    return node;
}

std::size_t successor_variety(const SuffixTrie& trie, std::string_view word, std::size_t position) {
    const std::u32string chars = to_code_points(word);
    if (position > chars.size()) {
        throw Error("position " + std::to_string(position) + " is past the end of \"" + std::string(word) + "\"");
    }
    auto node = trie.find(std::u32string_view(chars).substr(0, position));
    if (!node) {
        throw Error("prefix of length " + std::to_string(position) + " of \"" + std::string(word) +
                    "\" is not in the trie");
    }
    return trie.child_count(*node);
}

std::string stem(const SuffixTrie& trie, std::string_view word, std::size_t min_stem_length) {
    const std::u32string chars = to_code_points(word);
    const std::size_t n = chars.size();
    if (n <= min_stem_length) return std::string(word);

    // variety[i] for i in [0, n]; zero once the walk leaves the trie.
    std::vector<std::size_t> variety(n + 1, 0);
    std::optional<SuffixTrie::NodeId> node = SuffixTrie::root_id;
    for (std::size_t i = 0; i <= n && node; ++i) {
        variety[i] = trie.child_count(*node);
        if (i == n) break;
        auto it = trie.children(*node).find(chars[i]);
        node = it == trie.children(*node).end() ? std::nullopt : std::optional{it->second};
    }

    for (std::size_t i = std::max<std::size_t>(min_stem_length, 1); i < n; ++i) {
        const bool peak = variety[i] > variety[i - 1] && variety[i] >= variety[i + 1];
        const bool plateau = variety[i] == variety[i - 1] && variety[i] > 1;
        if (peak || plateau) return to_utf8(std::u32string_view(chars).substr(0, i));
    }
    return std::string(word);
}

Preprocessor::Preprocessor(StopList stop, std::set<std::string> protected_words)
    : stop_(std::move(stop)), protected_(std::move(protected_words)) {}

TokenSeq Preprocessor::filter(std::string_view text) const {
    TokenSeq tokens = tokenize(text);
    if (stop_.empty()) return tokens;
    TokenSeq out;
    out.reserve(tokens.size());
    for (auto& t : tokens)
        if (!stop_.contains(t) || protected_.count(t)) out.push_back(std::move(t));
    return out;
}

Preprocessor Preprocessor::with_stemmer(const std::vector<TokenSeq>& training_tokens) const {
    std::set<std::string> vocabulary;
    for (const auto& tokens : training_tokens)
        for (const auto& t : tokens)
            if (!protected_.count(t)) vocabulary.insert(t);
    if (vocabulary.empty()) return *this;
    return with_stemmer(std::make_shared<const SuffixTrie>(SuffixTrie::build(vocabulary)));
}

Preprocessor Preprocessor::with_stemmer(std::shared_ptr<const SuffixTrie> trie) const {
    Preprocessor copy = *this;
    copy.trie_ = std::move(trie);
    return copy;
}

TokenSeq Preprocessor::stem_tokens(TokenSeq tokens) const {
    if (!trie_) return tokens;
    for (auto& t : tokens)
        if (!protected_.count(t)) t = stem(*trie_, t);
    return tokens;
}

} // namespace opinion
