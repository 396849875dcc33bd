#include "opinion/stats.hpp"

#include "opinion/error.hpp"
#include "opinion/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace opinion {

using nlohmann::json;

std::optional<double> MoodCounts::mood() const {
    if (positive + negative == 0) return std::nullopt;
    return static_cast<double>(positive) / static_cast<double>(positive + negative);
}

std::vector<MoodRow> MoodTable::ordered() const {
    std::vector<MoodRow> out;
    out.reserve(rows.size());
    for (const auto& [key, counts] : rows) out.push_back({key, counts});
    std::stable_sort(out.begin(), out.end(), [](const MoodRow& a, const MoodRow& b) {
        const auto ma = a.counts.mood();
        const auto mb = b.counts.mood();
        if (ma.has_value() != mb.has_value()) return ma.has_value();
        if (ma && *ma != *mb) return *ma > *mb;
        return a.key < b.key;
    });
    return out;
}

namespace {

void tally(MoodTable& table, const std::string& key, Label predicted) {
    MoodCounts& row = table.rows[key];
    if (predicted == Label::positive) ++row.positive;
    if (predicted == Label::negative) ++row.negative;
}

std::string month_key(Timestamp ts, MonthGrouping grouping) {
    std::array<char, 16> buf{};
    if (grouping == MonthGrouping::month) {
        std::snprintf(buf.data(), buf.size(), "%02u", utc_month(ts));
    } else {
        std::snprintf(buf.data(), buf.size(), "%04d-%02u", utc_year(ts), utc_month(ts));
    }
    return buf.data();
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

MoodTable mood_by_topic(std::span<const ClassifiedPost> posts) {
    MoodTable table;
    table.group_by = "topic";
    for (const auto& cp : posts)
        if (cp.post.topic) tally(table, *cp.post.topic, cp.predicted);
    return table;
}

MoodTable mood_by_month(std::span<const ClassifiedPost> posts, MonthGrouping grouping) {
    MoodTable table;
    table.group_by = grouping == MonthGrouping::month ? "month" : "year-month";
    for (const auto& cp : posts)
        if (cp.post.timestamp) tally(table, month_key(*cp.post.timestamp, grouping), cp.predicted);
    return table;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    throw Error("unknown report format \"" + std::string(text) + "\"");
}

json to_json(const MoodTable& table) {
    json rows = json::array();
    for (const MoodRow& row : table.ordered()) {
        const auto mood = row.counts.mood();
        rows.push_back({{"key", row.key},
                        {"positive", row.counts.positive},
                        {"negative", row.counts.negative},
                        {"mood", mood ? json(*mood) : json(nullptr)}});
    }
    return {{"group_by", table.group_by}, {"rows", std::move(rows)}};
}

MoodTable mood_table_from_json(const json& j) {
    try {
        MoodTable table;
        table.group_by = j.at("group_by").get<std::string>();
        for (const json& row : j.at("rows")) {
            MoodCounts counts{row.at("positive").get<std::size_t>(), row.at("negative").get<std::size_t>()};
            if (!table.rows.emplace(row.at("key").get<std::string>(), counts).second) {
                throw Error("duplicate mood table key " + row.at("key").dump());
            }
        }
        return table;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed mood table: ") + e.what());
    }
}

void write_report(const MoodTable& table, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::json) {
        out << to_json(table).dump(2) << '\n';
        return;
    }
    out << "key,positive,negative,mood\n";
    for (const MoodRow& row : table.ordered()) {
        const auto mood = row.counts.mood();
        out << csv_field(row.key) << ',' << row.counts.positive << ',' << row.counts.negative << ','
            << (mood ? format_double(*mood) : std::string()) << '\n';
    }
}

void emit_report(const MoodTable& table, ReportFormat format, const std::filesystem::path& path) {
    std::ostringstream out;
    write_report(table, format, out);
    write_file_atomic(path, out.str());
}

std::vector<ClassifiedPost> parse_classified(std::istream& in) {
    std::vector<ClassifiedPost> posts;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json obj = json::parse(raw);
            ClassifiedPost cp;
            cp.post.id = obj.at("id").get<std::string>();
            cp.predicted = parse_label(obj.at("label").get<std::string>());
            if (auto it = obj.find("topic"); it != obj.end() && !it->is_null())
                cp.post.topic = it->get<std::string>();
            if (auto it = obj.find("timestamp"); it != obj.end() && !it->is_null())
                cp.post.timestamp = parse_timestamp(it->get<std::string>());
            posts.push_back(std::move(cp));
        } catch (const json::exception& e) {
            throw Error("line " + std::to_string(line) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("line " + std::to_string(line) + ": " + e.what());
        }
    }
    return posts;
}

} // namespace opinion
