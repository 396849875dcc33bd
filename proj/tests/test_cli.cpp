#include "opinion/cli.hpp"
#include "opinion/io.hpp"
#include "opinion/pipeline.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace opinion;
namespace fs = std::filesystem;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "opinion");
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

// Scratch directory removed on scope exit.
struct Workdir {
    fs::path path;
    Workdir() {
        path = fs::temp_directory_path() / ("opinion_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Workdir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_synthetic(const Workdir& dir, std::size_t per_class = 20) {
    std::ostringstream out;
    write_corpus(testing::make_synthetic_corpus({.posts_per_class = per_class}), out);
    write_file_atomic(dir / "corpus.jsonl", out.str());
    const Lexicons lex = testing::synthetic_lexicons();
    auto lines = [](const std::set<std::string>& words) {
        std::string s = "# test lexicon\n";
        for (const auto& w : words) s += w + "\n";
        return s;
    };
    write_file_atomic(dir / "stop.txt", lines(lex.stop_words));
    write_file_atomic(dir / "neg.txt", lines(lex.negatory));
    write_file_atomic(dir / "emph.txt", lines(lex.emphasizer));
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("train writes a reloadable model and manifest; reruns are byte-identical") {
    Workdir dir;
    write_synthetic(dir);
    const Result r = run_cli({"train", "--corpus", dir / "corpus.jsonl", "--out", dir / "m.json", "--min-count", "1",
                              "--stop-words", dir / "stop.txt", "--stem", "--negatory", dir / "neg.txt", "--rules",
                              "negation", "--rule-mode", "tag"});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    const std::string first = read_file(dir / "m.json");
    const TwoStageModel model = model_from_json(nlohmann::json::parse(first));
    CHECK(model.config().stemming);
    CHECK(model.config().rule_scope == RuleScope::negation);
    CHECK(to_json(model) == nlohmann::json::parse(first));

    const auto manifest = nlohmann::json::parse(read_file(dir / "m.json.manifest.json"));
    CHECK(manifest.at("command") == "train");
    CHECK(manifest.at("config") == to_json(model.config()));

    fs::remove(dir / "m.json");
    const Result again = run_cli({"replay", dir / "m.json.manifest.json"});
    REQUIRE_MESSAGE(again.status == 0, again.err);
    CHECK(read_file(dir / "m.json") == first);
}

TEST_CASE("train failures exit nonzero with a diagnostic") {
    Workdir dir;
    write_file_atomic(dir / "c.jsonl", "{\"id\":\"a\",\"text\":\"good\",\"label\":\"positive\"}\n"
                                       "{\"id\":\"b\",\"text\":\"bad\",\"label\":\"negative\"}\n");
    const Result r = run_cli({"train", "--corpus", dir / "c.jsonl", "--out", dir / "m.json"});
    CHECK(r.status != 0);
    CHECK(r.err.find("objective") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "m.json"));

    CHECK(run_cli({"train", "--corpus", dir / "missing.jsonl", "--out", dir / "m.json"}).status != 0);
    CHECK(run_cli({"train", "--corpus", dir / "c.jsonl", "--out", dir / "m.json", "--metric", "tfidf"}).status != 0);
    const Result rules = run_cli({"train", "--corpus", dir / "c.jsonl", "--out", dir / "m.json", "--rules", "both", "--rule-mode", "tag"});
    CHECK(rules.status != 0);
    CHECK(rules.err.find("--negatory") != std::string::npos);
}

TEST_CASE("evaluate: single configuration and grid") {
    Workdir dir;
    write_synthetic(dir);
    const Result single = run_cli({"evaluate", "--corpus", dir / "corpus.jsonl", "--folds", "3", "--min-count", "1",
                                   "--out", dir / "report.json"});
    REQUIRE_MESSAGE(single.status == 0, single.err);
    CHECK(single.out.find("end-to-end accuracy:") != std::string::npos);
    const auto report = nlohmann::json::parse(read_file(dir / "report.json"));
    CHECK(report.at("folds").size() == 3);
    CHECK(fs::exists(dir / "report.json.manifest.json"));

    const Result grid = run_cli({"evaluate", "--corpus", dir / "corpus.jsonl", "--folds", "3", "--min-count", "1",
                                 "--grid", "table1", "--out", dir / "grid.json"});
    REQUIRE_MESSAGE(grid.status == 0, grid.err);
    const auto doc = nlohmann::json::parse(read_file(dir / "grid.json"));
    CHECK(doc.at("cells").size() == 8);
    for (const char* row : {"Presence", "Count", "Frequency", "IFrequency"}) CHECK(grid.out.find(row) != std::string::npos);
}

TEST_CASE("classify and stats") {
    Workdir dir;
    write_synthetic(dir);
    REQUIRE(run_cli({"train", "--corpus", dir / "corpus.jsonl", "--out", dir / "m.json", "--min-count", "1"}).status == 0);

    const Result one = run_cli({"classify", "--model", dir / "m.json", "--text", "whatever words"});
    REQUIRE_MESSAGE(one.status == 0, one.err);
    CHECK(count_lines(one.out) == 1);
    const auto rec = nlohmann::json::parse(one.out);
    CHECK(rec.contains("label"));
    CHECK(rec.contains("subjectivity_score"));

    write_file_atomic(dir / "empty.jsonl", "");
    const Result none = run_cli({"classify", "--model", dir / "m.json", "--corpus", dir / "empty.jsonl"});
    CHECK(none.status == 0);
    CHECK(none.out.empty());

    const Result all = run_cli({"classify", "--model", dir / "m.json", "--corpus", dir / "corpus.jsonl"});
    REQUIRE(all.status == 0);
    CHECK(count_lines(all.out) == 60);
    write_file_atomic(dir / "classified.jsonl", all.out);

    const Result topics = run_cli({"stats", "--input", dir / "classified.jsonl", "--by", "topic"});
    REQUIRE_MESSAGE(topics.status == 0, topics.err);
    CHECK(topics.out.rfind("key,positive,negative,mood\n", 0) == 0);
    CHECK(count_lines(topics.out) == 1 + 4);

    const Result months = run_cli({"stats", "--input", dir / "classified.jsonl", "--by", "month", "--format", "json",
                                   "--out", dir / "months.json"});
    REQUIRE(months.status == 0);
    const auto mj = nlohmann::json::parse(read_file(dir / "months.json"));
    CHECK(mj.at("group_by") == "month");

    write_file_atomic(dir / "bare.jsonl", "{\"id\":\"a\",\"label\":\"positive\"}\n");
    const Result bare = run_cli({"stats", "--input", dir / "bare.jsonl", "--by", "month"});
    CHECK(bare.status == 0);
    CHECK(bare.out == "key,positive,negative,mood\n");
    CHECK(bare.err.find("warning") != std::string::npos);
}

TEST_CASE("classify rejects a corrupted model") {
    Workdir dir;
    write_synthetic(dir);
    REQUIRE(run_cli({"train", "--corpus", dir / "corpus.jsonl", "--out", dir / "m.json", "--min-count", "1"}).status == 0);
    std::string content = read_file(dir / "m.json");
    write_file_atomic(dir / "truncated.json", content.substr(0, content.size() / 2));
    const Result r = run_cli({"classify", "--model", dir / "truncated.json", "--text", "x"});
    CHECK(r.status != 0);
    CHECK(r.err.find("cannot parse") != std::string::npos);

    auto j = nlohmann::json::parse(content);
    j["stages"]["subjectivity"]["dictionary"]["keys"][0] = "tampered";
    write_file_atomic(dir / "drift.json", j.dump());
    const Result drift = run_cli({"classify", "--model", dir / "drift.json", "--text", "x"});
    CHECK(drift.status != 0);
    CHECK(drift.err.find("fingerprint") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(run_cli({}).status != 0);
    CHECK(run_cli({"frobnicate"}).status != 0);
    CHECK(run_cli({"--version"}).out.find(std::string(cli::tool_version)) != std::string::npos);
}

TEST_CASE("the installed binary runs") {
    const std::string cmd = std::string(OPINION_CLI_PATH) + " --help > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
}
