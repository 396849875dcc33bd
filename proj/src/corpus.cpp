#include "opinion/corpus.hpp"

#include "opinion/error.hpp"
#include "opinion/rng.hpp"
#include "opinion/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace opinion {

using nlohmann::json;

std::string_view to_string(Label label) {
    switch (label) {
    case Label::positive: return "positive";
    case Label::negative: return "negative";
    case Label::objective: return "objective";
    case Label::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label parse_label(std::string_view text) {
    if (text == "positive") return Label::positive;
    if (text == "negative") return Label::negative;
    if (text == "objective") return Label::objective;
    if (text == "unlabeled") return Label::unlabeled;
    throw Error("unknown label \"" + std::string(text) + "\"");
}

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    auto first = text.data() + pos;
    auto last = first + len;
    if (!std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; })) return false;
    std::from_chars(first, last, out);
    return true;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
    throw Error("invalid ISO-8601 timestamp \"" + std::string(text) + "\"");
}

} // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
        text[7] != '-' || !read_int(text, 8, 2, d)) {
        bad_timestamp(text);
    }
    std::size_t pos = 10;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') bad_timestamp(text);
        if (!read_int(text, pos + 1, 2, h) || text.size() < pos + 6 || text[pos + 3] != ':' ||
            !read_int(text, pos + 4, 2, mi)) {
            bad_timestamp(text);
        }
        pos += 6;
        if (pos < text.size() && text[pos] == ':') {
            if (!read_int(text, pos + 1, 2, s)) bad_timestamp(text);
            pos += 3;
            if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
                ++pos;
                std::size_t digits = 0;
                while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                    ++pos;
                    ++digits;
                }
                if (digits == 0) bad_timestamp(text);
            }
        }
    }
    int offset_minutes = 0;
    if (pos < text.size()) {
        char sign = text[pos];
        if ((sign == 'Z' || sign == 'z') && pos + 1 == text.size()) {
            pos = text.size();
        } else if (sign == '+' || sign == '-') {
            int oh = 0, om = 0;
            if (!read_int(text, pos + 1, 2, oh)) bad_timestamp(text);
            std::size_t mpos = pos + 3;
            if (mpos < text.size() && text[mpos] == ':') ++mpos;
            if (!read_int(text, mpos, 2, om) || mpos + 2 != text.size()) bad_timestamp(text);
            offset_minutes = (oh * 60 + om) * (sign == '-' ? -1 : 1);
            pos = text.size();
        } else {
            bad_timestamp(text);
        }
    }
    if (h > 23 || mi > 59 || s > 60) bad_timestamp(text);
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) bad_timestamp(text);
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - minutes{offset_minutes};
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    auto day_point = floor<days>(ts);
    year_month_day ymd{day_point};
    hh_mm_ss hms{ts - day_point};
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf.data();
}

unsigned utc_month(Timestamp ts) {
    std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(ts)};
    return static_cast<unsigned>(ymd.month());
}

int utc_year(Timestamp ts) {
    std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(ts)};
    return static_cast<int>(ymd.year());
}

Corpus::Corpus(std::vector<Post> posts) : posts_(std::move(posts)) {
    std::unordered_map<std::string_view, std::size_t> seen;
    for (std::size_t i = 0; i < posts_.size(); ++i) {
        const Post& p = posts_[i];
        if (p.id.empty()) throw Error("post #" + std::to_string(i + 1) + " has an empty id");
        if (is_blank(p.text)) throw Error("post \"" + p.id + "\" has empty text");
        auto [it, inserted] = seen.emplace(p.id, i);
        if (!inserted) {
            throw Error("duplicate post id \"" + p.id + "\" at positions " + std::to_string(it->second + 1) +
                        " and " + std::to_string(i + 1));
        }
    }
}

std::size_t Corpus::count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(posts_.begin(), posts_.end(), [label](const Post& p) { return p.label == label; }));
}

std::size_t Corpus::labeled_count() const { return posts_.size() - count(Label::unlabeled); }

namespace {

std::string line_ref(std::size_t line) { return "line " + std::to_string(line); }

std::string required_string(const json& obj, const char* field, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end()) throw Error(line_ref(line) + ": missing field \"" + field + "\"");
    if (!it->is_string()) throw Error(line_ref(line) + ": field \"" + field + "\" must be a string");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(line_ref(line) + ": field \"" + field + "\" must be a string");
    return it->get<std::string>();
}

} // namespace

Corpus parse_corpus(std::istream& in) {
    std::vector<Post> posts;
    std::unordered_map<std::string, std::size_t> id_lines;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.find_first_not_of(" \t") == std::string::npos) continue;
        if (!is_valid_utf8(raw)) throw Error(line_ref(line) + ": invalid UTF-8");
        json obj;
        try {
            obj = json::parse(raw);
        } catch (const json::parse_error& e) {
            throw Error(line_ref(line) + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object()) throw Error(line_ref(line) + ": malformed JSON: expected an object");

        Post post;
        post.id = required_string(obj, "id", line);
        post.text = required_string(obj, "text", line);
        post.topic = optional_string(obj, "topic", line);
        if (auto ts = optional_string(obj, "timestamp", line)) {
            try {
                post.timestamp = parse_timestamp(*ts);
            } catch (const Error& e) {
                throw Error(line_ref(line) + ": " + e.what());
            }
        }
        if (auto label = optional_string(obj, "label", line)) {
            try {
                post.label = parse_label(*label);
            } catch (const Error& e) {
                throw Error(line_ref(line) + ": " + e.what());
            }
        }
        if (post.id.empty()) throw Error(line_ref(line) + ": empty id");
        if (is_blank(post.text)) throw Error(line_ref(line) + ": empty text for post \"" + post.id + "\"");
        auto [it, inserted] = id_lines.emplace(post.id, line);
        if (!inserted) {
            throw Error("duplicate post id \"" + post.id + "\" on lines " + std::to_string(it->second) + " and " +
                        std::to_string(line));
        }
        posts.push_back(std::move(post));
    }
    return Corpus(std::move(posts));
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file " + path.string());
    try {
        return parse_corpus(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const Post& p : corpus) {
        json obj;
        obj["id"] = p.id;
        obj["text"] = p.text;
        if (p.topic) obj["topic"] = *p.topic;
        if (p.timestamp) obj["timestamp"] = format_timestamp(*p.timestamp);
        if (p.labeled()) obj["label"] = std::string(to_string(p.label));
        out << obj.dump() << '\n';
    }
}

std::vector<std::string> FoldPlan::fold_ids(const Corpus& corpus, std::size_t fold) const {
    std::vector<std::string> ids;
    for (const Post& p : corpus) {
        auto it = assignment.find(p.id);
        if (it != assignment.end() && it->second == fold) ids.push_back(p.id);
    }
    return ids;
}

FoldPlan split_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed, bool stratified) {
    if (k == 0) throw Error("fold count must be positive");
    const std::size_t labeled = corpus.labeled_count();
    if (labeled < k) {
        throw Error("cannot split " + std::to_string(labeled) + " labeled posts into " + std::to_string(k) +
                    " folds");
    }

    FoldPlan plan;
    plan.k = k;
    std::mt19937_64 rng(derive_seed(seed, 0x666f6c6473ULL));

    if (!stratified) {
        std::vector<std::string> ids;
        for (const Post& p : corpus)
            if (p.labeled()) ids.push_back(p.id);
        std::sort(ids.begin(), ids.end());
        seeded_shuffle(ids, rng);
        for (std::size_t i = 0; i < ids.size(); ++i) plan.assignment[ids[i]] = i % k;
        return plan;
    }

    // Classes are dealt in a fixed order and the dealing position carries over
    // from one class to the next, so fold sizes differ by at most one as well.
    std::size_t next = 0;
    for (Label label : {Label::negative, Label::objective, Label::positive}) {
        std::vector<std::string> ids;
        for (const Post& p : corpus)
            if (p.label == label) ids.push_back(p.id);
        if (ids.empty()) {
            throw Error("stratified split needs at least one \"" + std::string(to_string(label)) + "\" post");
        }
        std::sort(ids.begin(), ids.end());
        seeded_shuffle(ids, rng);
        for (const std::string& id : ids) plan.assignment[id] = next++ % k;
    }
    return plan;
}

} // namespace opinion
