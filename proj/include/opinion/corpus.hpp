#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opinion {

enum class Label { positive, negative, objective, unlabeled };

std::string_view to_string(Label label);

// Parses one of "positive", "negative", "objective", "unlabeled".
// Throws opinion::Error naming the offending value otherwise.
Label parse_label(std::string_view text);

using Timestamp = std::chrono::sys_seconds;

// ISO-8601 date-time, e.g. "2009-05-01T12:00:00Z" or "2009-05-01T14:00:00+02:00".
// Fractional seconds are accepted and truncated. A missing offset means UTC.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

// Calendar month (1..12) of the timestamp in UTC.
unsigned utc_month(Timestamp ts);
int utc_year(Timestamp ts);

struct Post {
    std::string id;
    std::string text;
    std::optional<std::string> topic;
    std::optional<Timestamp> timestamp;
    Label label = Label::unlabeled;

    bool labeled() const { return label != Label::unlabeled; }
    bool operator==(const Post&) const = default;
};

// Ordered, immutable collection of posts with pairwise distinct ids.
class Corpus {
public:
    Corpus() = default;
    // Validates ids and texts; throws opinion::Error on the first violation.
    explicit Corpus(std::vector<Post> posts);

    const std::vector<Post>& posts() const { return posts_; }
    std::size_t size() const { return posts_.size(); }
    bool empty() const { return posts_.empty(); }
    const Post& operator[](std::size_t i) const { return posts_[i]; }
    auto begin() const { return posts_.begin(); }
    auto end() const { return posts_.end(); }

    std::size_t count(Label label) const;
    std::size_t labeled_count() const;

    bool operator==(const Corpus&) const = default;

private:
    std::vector<Post> posts_;
};

// JSON-Lines reader. Blank lines are skipped; line numbers in diagnostics are
// 1-based physical line numbers.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(const Corpus& corpus, std::ostream& out);

struct FoldPlan {
    std::size_t k = 0;
    std::map<std::string, std::size_t> assignment;

    // Ids of posts assigned to the given fold, in corpus order.
    std::vector<std::string> fold_ids(const Corpus& corpus, std::size_t fold) const;
    bool operator==(const FoldPlan&) const = default;
};

FoldPlan split_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed, bool stratified);

} // namespace opinion
