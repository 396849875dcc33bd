#include "opinion/error.hpp"
#include "opinion/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace opinion;

namespace {

std::size_t next_id = 0;

ClassifiedPost cp(std::optional<std::string> topic, Label predicted, std::optional<std::string> when = {}) {
    Post p{"c" + std::to_string(next_id++), "text", std::move(topic), {}, Label::unlabeled};
    if (when) p.timestamp = parse_timestamp(*when);
    return {std::move(p), predicted};
}

std::vector<ClassifiedPost> repeat(std::vector<ClassifiedPost> out, const std::string& topic, Label l, int n) {
    for (int i = 0; i < n; ++i) out.push_back(cp(topic, l));
    return out;
}

Label flip(Label l) {
    if (l == Label::positive) return Label::negative;
    if (l == Label::negative) return Label::positive;
    return l;
}

} // namespace

TEST_CASE("mood_by_topic examples") {
    auto posts = repeat({}, "food", Label::positive, 3);
    posts = repeat(std::move(posts), "food", Label::negative, 1);
    posts = repeat(std::move(posts), "news", Label::objective, 2);
    posts = repeat(std::move(posts), "fashion", Label::positive, 2);
    posts.push_back(cp(std::nullopt, Label::positive));
    const MoodTable t = mood_by_topic(posts);
    CHECK(t.group_by == "topic");
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows.at("food").mood() == 0.75);
    CHECK(t.rows.at("fashion").mood() == 1.0);
    CHECK(t.rows.at("news") == MoodCounts{0, 0});
    CHECK_FALSE(t.rows.at("news").mood().has_value());
}

TEST_CASE("mood_by_month examples") {
    std::vector<ClassifiedPost> posts{cp({}, Label::positive, "2010-05-01"), cp({}, Label::positive, "2011-05-20"),
                                      cp({}, Label::negative, "2010-05-31T23:00:00Z"),
                                      cp({}, Label::negative, "2010-05-02"), cp({}, Label::positive)};
    const MoodTable t = mood_by_month(posts);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows.at("05").mood() == 0.5);
    const MoodTable ym = mood_by_month(posts, MonthGrouping::year_month);
    CHECK(ym.group_by == "year-month");
    CHECK(ym.rows.at("2010-05") == MoodCounts{1, 2});
    CHECK(ym.rows.at("2011-05") == MoodCounts{1, 0});
    CHECK(mood_by_month({}).rows.empty());
}

TEST_CASE("report ordering and CSV layout") {
    MoodTable t{"topic", {{"a", {3, 7}}, {"b", {8, 2}}, {"c", {0, 0}}, {"d", {4, 1}}, {"e", {16, 4}}}};
    const auto rows = t.ordered();
    std::vector<std::string> keys;
    for (const auto& r : rows) keys.push_back(r.key);
    CHECK(keys == std::vector<std::string>{"b", "d", "e", "a", "c"});

    std::ostringstream out;
    write_report(t, ReportFormat::csv, out);
    CHECK(out.str() == "key,positive,negative,mood\nb,8,2,0.8\nd,4,1,0.8\ne,16,4,0.8\na,3,7,0.3\nc,0,0,\n");
}

TEST_CASE("CSV quotes awkward keys") {
    MoodTable t{"topic", {{"a,b \"x\"", {1, 0}}}};
    std::ostringstream out;
    write_report(t, ReportFormat::csv, out);
    CHECK(out.str() == "key,positive,negative,mood\n\"a,b \"\"x\"\"\",1,0,1\n");
}

TEST_CASE("JSON round trip") {
    MoodTable t{"month", {{"01", {1, 2}}, {"02", {0, 0}}, {"12", {5, 0}}}};
    std::ostringstream out;
    write_report(t, ReportFormat::json, out);
    CHECK(mood_table_from_json(nlohmann::json::parse(out.str())) == t);
    CHECK(parse_report_format("json") == ReportFormat::json);
    CHECK_THROWS_AS(parse_report_format("xml"), Error);
}

TEST_CASE("emit_report writes atomically and reports unwritable paths") {
    const auto dir = std::filesystem::temp_directory_path() / "opinion_stats_test";
    std::filesystem::create_directories(dir);
    MoodTable t{"topic", {{"x", {1, 1}}}};
    emit_report(t, ReportFormat::csv, dir / "r.csv");
    std::ifstream in(dir / "r.csv");
    std::string all((std::istreambuf_iterator<char>(in)), {});
    CHECK(all == "key,positive,negative,mood\nx,1,1,0.5\n");
    CHECK_THROWS_AS(emit_report(t, ReportFormat::csv, dir / "missing" / "r.csv"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("property: mood invariants") {
    std::mt19937_64 rng(8);
    const std::vector<std::string> topics{"a", "b", "c", "d"};
    const Label labels[] = {Label::positive, Label::negative, Label::objective};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ClassifiedPost> posts;
        const std::size_t n = rng() % 40;
        std::size_t polar_with_topic = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::optional<std::string> topic;
            if (rng() % 5) topic = topics[rng() % topics.size()];
            const Label l = labels[rng() % 3];
            if (topic && l != Label::objective) ++polar_with_topic;
            posts.push_back(cp(topic, l));
        }
        const MoodTable t = mood_by_topic(posts);
        std::size_t sum = 0;
        for (const auto& [key, counts] : t.rows) {
            sum += counts.positive + counts.negative;
            if (auto m = counts.mood()) CHECK((*m >= 0.0 && *m <= 1.0));
        }
        CHECK(sum == polar_with_topic);

        auto flipped = posts;
        for (auto& p : flipped) p.predicted = flip(p.predicted);
        const MoodTable tf = mood_by_topic(flipped);
        for (const auto& [key, counts] : t.rows) {
            const auto m = counts.mood();
            const auto mf = tf.rows.at(key).mood();
            REQUIRE(m.has_value() == mf.has_value());
            if (m) CHECK(*mf == doctest::Approx(1.0 - *m).epsilon(1e-15));
        }

        auto shuffled = posts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(mood_by_topic(shuffled) == t);
    }
}

TEST_CASE("parse_classified") {
    std::istringstream in(
        R"({"id":"a","label":"positive","topic":"food","timestamp":"2010-03-04T05:06:07Z"})"
        "\n\n"
        R"({"id":"b","label":"objective","subjectivity_score":-0.2})"
        "\n");
    const auto posts = parse_classified(in);
    REQUIRE(posts.size() == 2);
    CHECK(posts[0].predicted == Label::positive);
    CHECK(posts[0].post.topic == "food");
    CHECK(utc_month(*posts[0].post.timestamp) == 3);
    CHECK(posts[1].predicted == Label::objective);
    CHECK_FALSE(posts[1].post.topic.has_value());

    std::istringstream bad("{\"id\":\"a\",\"label\":\"happy\"}\n");
    CHECK_THROWS_WITH_AS(parse_classified(bad), doctest::Contains("line 1"), Error);
}
