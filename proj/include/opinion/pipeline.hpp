#pragma once

#include "opinion/classify.hpp"
#include "opinion/corpus.hpp"
#include "opinion/features.hpp"
#include "opinion/preprocess.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opinion {

enum class ClassifierKind { nb, svm };
enum class RuleScope { negation, emphasis, both };

std::string_view to_string(ClassifierKind kind);
std::string_view to_string(RuleScope scope);
ClassifierKind parse_classifier(std::string_view text);
RuleScope parse_rule_scope(std::string_view text);

struct PipelineConfig {
    Metric metric = Metric::ifrequency;
    ClassifierKind classifier = ClassifierKind::svm;
    NgramMode ngrams = NgramMode::unigrams;
    RuleMode rule_mode = RuleMode::off;
    RuleScope rule_scope = RuleScope::both;
    bool stop_words = false;
    bool stemming = false;
    std::size_t min_count = 5;
    double nb_smoothing = 1.0;
    double svm_lambda = 1e-3;
    std::size_t svm_epochs = 20;
    std::uint64_t seed = 1;

    bool operator==(const PipelineConfig&) const = default;
};

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

// Word lists the pipeline may consult. Which of them are active is decided by
// the config (stop_words, rule_mode, rule_scope).
struct Lexicons {
    std::set<std::string> stop_words;
    std::set<std::string> negatory;
    std::set<std::string> emphasizer;

    bool operator==(const Lexicons&) const = default;
};

// One binary stage: its own preprocessing state, dictionary and classifier.
struct StageModel {
    Preprocessor preprocessor;
    FeatureDictionary dictionary;
    BinaryModel classifier;

    FeatureVector vectorize(std::string_view text, const PipelineConfig& config, const RuleLexicons* rules,
                            std::string_view post_id = {}) const;
};

struct StageScores {
    Label label = Label::unlabeled;
    double subjectivity_score = 0.0;
    std::optional<double> polarity_score;
};

class TwoStageModel {
public:
    TwoStageModel(PipelineConfig config, Lexicons lexicons, StageModel subjectivity, StageModel polarity);

    const PipelineConfig& config() const { return config_; }
    const Lexicons& lexicons() const { return lexicons_; }
    const StageModel& subjectivity() const { return subjectivity_; }
    const StageModel& polarity() const { return polarity_; }
    // Rule lexicons restricted to the configured scope, or null when rules are off.
    const RuleLexicons* rules() const { return rules_ ? &*rules_ : nullptr; }

    StageScores classify(std::string_view text, std::string_view post_id = {}) const;
    // Polarity stage alone, for evaluation on gold-subjective posts.
    Prediction predict_polarity(std::string_view text, std::string_view post_id = {}) const;

private:
    PipelineConfig config_;
    Lexicons lexicons_;
    StageModel subjectivity_;
    StageModel polarity_;
    std::optional<RuleLexicons> rules_;
};

// Active rule lexicons for a config, or nullopt when the rule transform is off.
std::optional<RuleLexicons> active_rules(const PipelineConfig& config, const Lexicons& lexicons);

TwoStageModel train_two_stage(const Corpus& corpus, const PipelineConfig& config, const Lexicons& lexicons = {});

StageScores classify_post(const TwoStageModel& model, std::string_view text);

nlohmann::json to_json(const TwoStageModel& model);
// Throws opinion::Error on malformed input or when a stored dictionary
// fingerprint does not match its dictionary.
TwoStageModel model_from_json(const nlohmann::json& j);

inline constexpr int pipeline_format_version = 1;

// ---------------------------------------------------------------------------
// Evaluation

double accuracy(std::span<const Label> predicted, std::span<const Label> gold);

// Row/column order of the confusion matrix.
inline constexpr std::array<Label, 3> report_classes{Label::objective, Label::positive, Label::negative};

struct PostPrediction {
    std::string id;
    Label gold = Label::unlabeled;
    Label predicted = Label::unlabeled;
    double subjectivity_score = 0.0;
    std::optional<double> polarity_score;  // stage 2 score on gold-subjective posts

    bool operator==(const PostPrediction&) const = default;
};

struct FoldReport {
    std::size_t fold = 0;
    std::size_t n_test = 0;
    std::size_t subjectivity_correct = 0;
    std::size_t n_polar = 0;  // gold-subjective test posts
    std::size_t polarity_correct = 0;
    std::size_t end_to_end_correct = 0;
    std::vector<PostPrediction> predictions;

    double subjectivity_accuracy() const;
    std::optional<double> polarity_accuracy() const;
    double end_to_end_accuracy() const;

    bool operator==(const FoldReport&) const = default;
};

using ConfusionMatrix = std::array<std::array<std::size_t, 3>, 3>;  // [gold][predicted]

struct EvaluationReport {
    PipelineConfig config;
    std::size_t k = 0;
    bool stratified = true;
    std::vector<FoldReport> folds;
    ConfusionMatrix confusion{};

    // Pooled over all test posts of all folds.
    double subjectivity_accuracy() const;
    double polarity_accuracy() const;
    double end_to_end_accuracy() const;
    // Unweighted means of the per-fold accuracies.
    double mean_subjectivity_accuracy() const;
    double mean_polarity_accuracy() const;
    double mean_end_to_end_accuracy() const;

    bool operator==(const EvaluationReport&) const = default;
};

nlohmann::json to_json(const EvaluationReport& report);

// Trains on `train` and scores every post of `test`.
FoldReport evaluate_fold(const Corpus& train, std::span<const Post> test, const PipelineConfig& config,
                         const Lexicons& lexicons, std::size_t fold_index = 0);

// k-fold cross-validation; the fold plan is seeded with config.seed. Folds run
// concurrently when `parallel` is set; the result does not depend on it.
EvaluationReport cross_validate(const Corpus& corpus, const PipelineConfig& config, const Lexicons& lexicons = {},
                                std::size_t k = 10, bool stratified = true, bool parallel = true);

// ---------------------------------------------------------------------------
// Experiment grids

struct GridCell {
    std::string block;   // empty for single-block tables
    std::string row;
    std::string column;  // "SVM" or "NB"
    PipelineConfig config;
};

struct GridSpec {
    std::string name;
    std::string title;
    std::vector<GridCell> cells;
};

std::vector<std::string> grid_names();

// Cells of a named grid ("table1".."table4") derived from `base`. In table4
// presence uses tag mode and ifrequency signed-count mode unless
// `rule_mode_override` is given.
GridSpec make_grid(std::string_view name, const PipelineConfig& base,
                   std::optional<RuleMode> rule_mode_override = std::nullopt);

enum class ReportedAccuracy { end_to_end, subjectivity, polarity };

// Plain-text table in the layout of the grid (rows x SVM/NB columns, one
// section per block).
std::string render_grid(const GridSpec& grid, std::span<const EvaluationReport> reports,
                        ReportedAccuracy which = ReportedAccuracy::end_to_end);

} // namespace opinion
