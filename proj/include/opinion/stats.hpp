#pragma once

#include "opinion/corpus.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opinion {

struct ClassifiedPost {
    Post post;
    Label predicted = Label::unlabeled;
};

struct MoodCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;

    // p / (p + n); undefined when the group has no polar posts.
    std::optional<double> mood() const;
    bool operator==(const MoodCounts&) const = default;
};

struct MoodRow {
    std::string key;
    MoodCounts counts;
};

struct MoodTable {
    std::string group_by;  // "topic", "month" or "year-month"
    std::map<std::string, MoodCounts> rows;

    // Descending mood, undefined moods last, ties broken by key.
    std::vector<MoodRow> ordered() const;
    bool operator==(const MoodTable&) const = default;
};

enum class MonthGrouping { month, year_month };

// Objective posts join their group's row without counting towards p or n.
// Posts lacking the grouping attribute are skipped.
MoodTable mood_by_topic(std::span<const ClassifiedPost> posts);
MoodTable mood_by_month(std::span<const ClassifiedPost> posts, MonthGrouping grouping = MonthGrouping::month);

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(std::string_view text);

nlohmann::json to_json(const MoodTable& table);
MoodTable mood_table_from_json(const nlohmann::json& j);

// CSV columns: key,positive,negative,mood (mood cell empty when undefined).
void write_report(const MoodTable& table, ReportFormat format, std::ostream& out);
void emit_report(const MoodTable& table, ReportFormat format, const std::filesystem::path& path);

// Reads the JSONL written by the classify command: id, label and the optional
// topic and timestamp of each post.
std::vector<ClassifiedPost> parse_classified(std::istream& in);

} // namespace opinion
