#include "opinion/error.hpp"
#include "opinion/preprocess.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace opinion;

TEST_CASE("tokenize") {
    CHECK(tokenize("Не е добро!") == TokenSeq{"не", "е", "добро"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("ABC abc АБВ абв") == TokenSeq{"abc", "abc", "абв", "абв"});
    CHECK(tokenize("mp3-плеер,  ЌЕРКА...Ѓ") == TokenSeq{"mp3", "плеер", "ќерка", "ѓ"});
    CHECK(tokenize("\xff\xfeзбор") == TokenSeq{"збор"});
}

TEST_CASE("property: tokenize is idempotent on its joined output") {
    std::mt19937_64 rng(5);
    const std::u32string alphabet = U"aZ9 ,.!-ШшЌќ \t?Ωω";
    for (int trial = 0; trial < 200; ++trial) {
        std::u32string s;
        const std::size_t len = rng() % 40;
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        const TokenSeq once = tokenize(to_utf8(s));
        CHECK(tokenize(join(once)) == once);
        for (const auto& t : once) {
            CHECK_FALSE(t.empty());
            CHECK(case_fold(t) == t);
        }
    }
}

TEST_CASE("remove_stop_words") {
    const TokenSeq tokens{"не", "е", "добро"};
    CHECK(remove_stop_words(tokens, StopList({"е"})) == TokenSeq{"не", "добро"});
    CHECK(remove_stop_words(tokens, StopList()) == tokens);
    CHECK(remove_stop_words({"е", "е", "е"}, StopList({"е"})).empty());
    CHECK(StopList({"Е"}).contains("е"));
}

TEST_CASE("property: stop-word removal yields a subsequence") {
    std::mt19937_64 rng(8);
    const std::vector<std::string> pool{"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < 100; ++trial) {
        TokenSeq tokens;
        for (std::size_t i = rng() % 20; i > 0; --i) tokens.push_back(pool[rng() % pool.size()]);
        std::set<std::string> stop;
        for (const auto& w : pool)
            if (rng() % 2) stop.insert(w);
        const TokenSeq out = remove_stop_words(tokens, StopList(stop));
        std::size_t j = 0;
        for (const auto& t : tokens)
            if (j < out.size() && out[j] == t) ++j;
        CHECK(j == out.size());
        for (const auto& t : out) CHECK(stop.count(t) == 0);
    }
}

TEST_CASE("lexicon files") {
    std::istringstream in("# stop words\nИ\n  на \n\n#да\nСЕ\r\n");
    CHECK(parse_lexicon(in) == std::set<std::string>{"и", "на", "се"});
}

TEST_CASE("build_suffix_trie counts") {
    CHECK_THROWS_AS(SuffixTrie::build({}), Error);
    {
        const SuffixTrie t = SuffixTrie::build({"ab"});
        CHECK(t.pass_count(SuffixTrie::root_id) == 1);
        CHECK(t.pass_count(*t.find(U"a")) == 1);
    }
    {
        const SuffixTrie t = SuffixTrie::build({"ab", "ac"});
        CHECK(t.pass_count(*t.find(U"a")) == 2);
        CHECK(t.pass_count(*t.find(U"ab")) == 1);
        CHECK(t.pass_count(*t.find(U"ac")) == 1);
    }
    {
        const SuffixTrie t = SuffixTrie::build({"a", "ab"});
        CHECK(t.pass_count(*t.find(U"a")) == 2);
        CHECK(t.terminal(*t.find(U"a")));
        CHECK_FALSE(t.find(U"b").has_value());
    }
}

TEST_CASE("property: pass-through counts equal children plus terminals") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        std::set<std::string> vocab;
        while (vocab.size() < 25) vocab.insert(testing::random_word(rng, 1, 5));
        const SuffixTrie t = SuffixTrie::build(vocab);
        CHECK(t.word_count() == vocab.size());
        for (SuffixTrie::NodeId n = 0; n < t.node_count(); ++n) {
            std::size_t sum = t.terminal(n) ? 1 : 0;
            for (const auto& [c, child] : t.children(n)) sum += t.pass_count(child);
            CHECK(sum == t.pass_count(n));
        }
    }
}

TEST_CASE("successor_variety") {
    const SuffixTrie t = SuffixTrie::build({"ab", "ac", "ad"});
    CHECK(successor_variety(t, "ab", 1) == 3);
    CHECK(successor_variety(t, "ab", 0) == 1);
    CHECK(successor_variety(SuffixTrie::build({"ab"}), "ab", 1) == 1);
    CHECK(successor_variety(SuffixTrie::build({"xa", "yb", "zc", "xd"}), "xa", 0) == 3);
    CHECK_THROWS_AS(successor_variety(t, "zz", 1), Error);
    CHECK_THROWS_AS(successor_variety(t, "ab", 3), Error);
}

TEST_CASE("stem: worked example") {
    // Successor varieties of "работен" over the four words, by prefix length:
    // 0:1 р, 1:1 а, 2:1 б, 3:1 о, 4:1 т, 5:3 {и,а,е}, 6:1 н, 7:0.
    // First peak at or after position 2 is position 5.
    const std::set<std::string> vocab{"работи", "работам", "работен", "работа"};
    const SuffixTrie t = SuffixTrie::build(vocab);
    const std::vector<std::size_t> expected{1, 1, 1, 1, 1, 3, 1, 0};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(testing::oracle_successor_variety(vocab, "работен", i) == expected[i]);
        CHECK(successor_variety(t, "работен", i) == expected[i]);
    }
    CHECK(stem(t, "работен") == "работ");
    CHECK(stem(t, "работам") == "работ");
    CHECK(stem(t, "работеше") == "работ");  // unseen inflection still cut at the peak
}

TEST_CASE("stem: guard clauses") {
    CHECK(stem(SuffixTrie::build({"x"}), "x") == "x");
    const SuffixTrie t = SuffixTrie::build({"ab", "ac", "ad", "abc"});
    CHECK(stem(t, "ab") == "ab");
    CHECK(stem(t, "a") == "a");
}

TEST_CASE("stem: plateau onset") {
    // v: 0:1, 1:1, 2:2 {c,d}, 3:2 {e,f}; the peak at 2 comes first.
    const SuffixTrie t = SuffixTrie::build({"abce", "abcf", "abd"});
    CHECK(stem(t, "abce") == "ab");
    // v: 0:1, 1:2 {a,b}, 2:2 {c,d}; i=1 is below the minimum, plateau onset at 2.
    const SuffixTrie p = SuffixTrie::build({"xac", "xad", "xbq"});
    CHECK(stem(p, "xac") == "xa");
}

TEST_CASE("property: stems are prefixes of length at least two") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        std::set<std::string> vocab;
        while (vocab.size() < 20) vocab.insert(testing::random_word(rng, 1, 8));
        const SuffixTrie t = SuffixTrie::build(vocab);
        for (const std::string& w : vocab) {
            const std::string s = stem(t, w);
            CHECK(w.compare(0, s.size(), s) == 0);
            CHECK(to_code_points(s).size() >= std::min<std::size_t>(2, to_code_points(w).size()));
        }
    }
}

TEST_CASE("Preprocessor protects rule words and stems against training vocabulary") {
    const Preprocessor base(StopList({"не", "и"}), {"не"});
    CHECK(base.filter("Не работи и работам") == TokenSeq{"не", "работи", "работам"});
    const Preprocessor stemmed = base.with_stemmer(std::vector<TokenSeq>{{"работи", "работам", "работен", "работа"}});
    REQUIRE(stemmed.stemmer());
    CHECK(stemmed.apply("Не работен") == TokenSeq{"не", "работ"});
    CHECK(stemmed.stemmer()->vocabulary().count("не") == 0);
}
