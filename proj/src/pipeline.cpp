#include "opinion/pipeline.hpp"

#include "opinion/error.hpp"
#include "opinion/log.hpp"
#include "opinion/rng.hpp"

#include <algorithm>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>

namespace opinion {

using nlohmann::json;

std::string_view to_string(ClassifierKind kind) { return kind == ClassifierKind::nb ? "nb" : "svm"; }

std::string_view to_string(RuleScope scope) {
    switch (scope) {
    case RuleScope::negation: return "negation";
    case RuleScope::emphasis: return "emphasis";
    case RuleScope::both: return "both";
    }
    return "both";
}

ClassifierKind parse_classifier(std::string_view text) {
    if (text == "nb") return ClassifierKind::nb;
    if (text == "svm") return ClassifierKind::svm;
    throw Error("unknown classifier \"" + std::string(text) + "\"");
}

RuleScope parse_rule_scope(std::string_view text) {
    if (text == "negation" || text == "negation-only") return RuleScope::negation;
    if (text == "emphasis" || text == "emphasis-only") return RuleScope::emphasis;
    if (text == "both") return RuleScope::both;
    throw Error("unknown rule scope \"" + std::string(text) + "\"");
}

json to_json(const PipelineConfig& c) {
    return {{"metric", to_string(c.metric)},
            {"classifier", to_string(c.classifier)},
            {"ngrams", to_string(c.ngrams)},
            {"rule_mode", to_string(c.rule_mode)},
            {"rule_scope", to_string(c.rule_scope)},
            {"stop_words", c.stop_words},
            {"stemming", c.stemming},
            {"min_count", c.min_count},
            {"nb_smoothing", c.nb_smoothing},
            {"svm_lambda", c.svm_lambda},
            {"svm_epochs", c.svm_epochs},
            {"seed", c.seed}};
}

PipelineConfig config_from_json(const json& j) {
    try {
        PipelineConfig c;
        c.metric = parse_metric(j.at("metric").get<std::string>());
        c.classifier = parse_classifier(j.at("classifier").get<std::string>());
        c.ngrams = parse_ngram_mode(j.at("ngrams").get<std::string>());
        c.rule_mode = parse_rule_mode(j.at("rule_mode").get<std::string>());
        c.rule_scope = parse_rule_scope(j.at("rule_scope").get<std::string>());
        c.stop_words = j.at("stop_words").get<bool>();
        c.stemming = j.at("stemming").get<bool>();
        c.min_count = j.at("min_count").get<std::size_t>();
        c.nb_smoothing = j.at("nb_smoothing").get<double>();
        c.svm_lambda = j.at("svm_lambda").get<double>();
        c.svm_epochs = j.at("svm_epochs").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        return c;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed pipeline config: ") + e.what());
    }
}

std::optional<RuleLexicons> active_rules(const PipelineConfig& config, const Lexicons& lexicons) {
    if (config.rule_mode == RuleMode::off) return std::nullopt;
    RuleLexicons rules;
    if (config.rule_scope != RuleScope::emphasis) rules.negatory = lexicons.negatory;
    if (config.rule_scope != RuleScope::negation) rules.emphasizer = lexicons.emphasizer;
    rules.validate();
    return rules;
}

namespace {

RuleMode effective_rule_mode(const PipelineConfig& config, const RuleLexicons* rules) {
    return rules ? config.rule_mode : RuleMode::off;
}

FeatureVector features_from_tokens(const TokenSeq& tokens, const FeatureDictionary& dict,
                                   const PipelineConfig& config, const RuleLexicons* rules,
                                   std::string_view post_id) {
    const RawCounts counts = extract_counts(tokens, dict, rules, effective_rule_mode(config, rules));
    FeatureVector fv{config.metric, {}};
    const bool normalized = config.metric == Metric::frequency || config.metric == Metric::ifrequency;
    if (normalized && counts.total() <= 0) {
        if (!counts.entries.empty()) {
            warn("post \"" + std::string(post_id) + "\": in-dictionary counts sum to " +
                 std::to_string(counts.total()) + "; using an all-zero feature vector");
        }
    } else {
        fv = compute_metric(config.metric, counts, dict);
    }
    if (config.classifier == ClassifierKind::nb) {
        // Multinomial NB has no meaning for negative counts.
        std::erase_if(fv.entries, [](const auto& e) { return e.second <= 0.0; });
    }
    return fv;
}

Preprocessor base_preprocessor(const PipelineConfig& config, const Lexicons& lexicons, const RuleLexicons* rules) {
    return Preprocessor(config.stop_words ? StopList(lexicons.stop_words) : StopList(),
                        rules ? rules->all_words() : std::set<std::string>{});
}

StageModel train_stage(const std::vector<TokenSeq>& filtered, std::span<const BinaryClass> labels,
                       std::span<const std::string_view> ids, const PipelineConfig& config,
                       const Preprocessor& base, const RuleLexicons* rules, std::uint64_t stream) {
    Preprocessor pre = config.stemming ? base.with_stemmer(filtered) : base;
    std::vector<TokenSeq> tokens;
    tokens.reserve(filtered.size());
    for (const auto& f : filtered) tokens.push_back(pre.stem_tokens(f));

    FeatureDictionary dict =
        build_dictionary(tokens, config.ngrams, config.min_count, rules, effective_rule_mode(config, rules));

    std::vector<FeatureVector> vectors;
    vectors.reserve(tokens.size());
    for (std::size_t p = 0; p < tokens.size(); ++p)
        vectors.push_back(features_from_tokens(tokens[p], dict, config, rules, ids[p]));

    BinaryModel classifier;
    if (config.classifier == ClassifierKind::nb) {
        classifier = train_nb(vectors, labels, dict.size(), config.nb_smoothing);
    } else {
        SvmParams params{config.svm_lambda, config.svm_epochs, derive_seed(config.seed, stream)};
        classifier = train_svm(vectors, labels, dict.size(), params);
    }
    return StageModel{std::move(pre), std::move(dict), std::move(classifier)};
}

} // namespace

FeatureVector StageModel::vectorize(std::string_view text, const PipelineConfig& config, const RuleLexicons* rules,
                                    std::string_view post_id) const {
    return features_from_tokens(preprocessor.apply(text), dictionary, config, rules, post_id);
}

TwoStageModel::TwoStageModel(PipelineConfig config, Lexicons lexicons, StageModel subjectivity,
                             StageModel polarity)
    : config_(std::move(config)),
      lexicons_(std::move(lexicons)),
      subjectivity_(std::move(subjectivity)),
      polarity_(std::move(polarity)),
      rules_(active_rules(config_, lexicons_)) {}

Prediction TwoStageModel::predict_polarity(std::string_view text, std::string_view post_id) const {
    return predict(polarity_.classifier, polarity_.vectorize(text, config_, rules(), post_id));
}

StageScores TwoStageModel::classify(std::string_view text, std::string_view post_id) const {
    StageScores out;
    const Prediction subj = predict(subjectivity_.classifier, subjectivity_.vectorize(text, config_, rules(), post_id));
    out.subjectivity_score = subj.score;
    if (subj.label == BinaryClass::negative) {
        out.label = Label::objective;
        return out;
    }
    const Prediction pol = predict_polarity(text, post_id);
    out.polarity_score = pol.score;
    out.label = pol.label == BinaryClass::positive ? Label::positive : Label::negative;
    return out;
}

TwoStageModel train_two_stage(const Corpus& corpus, const PipelineConfig& config, const Lexicons& lexicons) {
    for (Label label : {Label::objective, Label::positive, Label::negative}) {
        if (corpus.count(label) == 0) {
            throw Error("training data has no \"" + std::string(to_string(label)) + "\" posts");
        }
    }
    const std::optional<RuleLexicons> rules = active_rules(config, lexicons);
    const RuleLexicons* rules_ptr = rules ? &*rules : nullptr;
    const Preprocessor base = base_preprocessor(config, lexicons, rules_ptr);

    std::vector<TokenSeq> subj_tokens, pol_tokens;
    std::vector<BinaryClass> subj_labels, pol_labels;
    std::vector<std::string_view> subj_ids, pol_ids;
    for (const Post& post : corpus) {
        if (!post.labeled()) continue;
        TokenSeq tokens = base.filter(post.text);
        const bool subjective = post.label != Label::objective;
        subj_labels.push_back(subjective ? BinaryClass::positive : BinaryClass::negative);
        subj_ids.push_back(post.id);
        if (subjective) {
            pol_tokens.push_back(tokens);
            pol_labels.push_back(post.label == Label::positive ? BinaryClass::positive : BinaryClass::negative);
            pol_ids.push_back(post.id);
        }
        subj_tokens.push_back(std::move(tokens));
    }

    StageModel subjectivity = train_stage(subj_tokens, subj_labels, subj_ids, config, base, rules_ptr, 1);
    StageModel polarity = train_stage(pol_tokens, pol_labels, pol_ids, config, base, rules_ptr, 2);
    return TwoStageModel(config, lexicons, std::move(subjectivity), std::move(polarity));
}

StageScores classify_post(const TwoStageModel& model, std::string_view text) { return model.classify(text); }

namespace {

json stage_to_json(const StageModel& stage) {
    json j;
    j["dictionary"] = to_json(stage.dictionary);
    if (const auto& trie = stage.preprocessor.stemmer()) {
        j["stemming_vocabulary"] = trie->vocabulary();
    } else {
        j["stemming_vocabulary"] = nullptr;
    }
    j["classifier"] = model_to_json(stage.classifier, stage.dictionary.fingerprint());
    return j;
}

StageModel stage_from_json(const json& j, const Preprocessor& base, const char* name) {
    StageModel stage;
    stage.dictionary = dictionary_from_json(j.at("dictionary"));
    std::uint64_t fingerprint = 0;
    stage.classifier = model_from_json(j.at("classifier"), fingerprint);
    if (fingerprint != stage.dictionary.fingerprint()) {
        throw Error(std::string("dictionary fingerprint mismatch in the ") + name + " stage");
    }
    const std::size_t dim = std::visit(
        [](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, NBModel>)
                return m.vocab_size;
            else
                return m.weights.size();
        },
        stage.classifier);
    if (dim != stage.dictionary.size()) {
        throw Error(std::string("classifier dimension does not match the dictionary in the ") + name + " stage");
    }
    const json& vocab = j.at("stemming_vocabulary");
    stage.preprocessor = vocab.is_null() ? base
                                         : base.with_stemmer(std::make_shared<const SuffixTrie>(
                                               SuffixTrie::build(vocab.get<std::set<std::string>>())));
    return stage;
}

} // namespace

json to_json(const TwoStageModel& model) {
    json j;
    j["format_version"] = pipeline_format_version;
    j["config"] = to_json(model.config());
    j["lexicons"] = {{"stop_words", model.lexicons().stop_words},
                     {"negatory", model.lexicons().negatory},
                     {"emphasizer", model.lexicons().emphasizer}};
    j["stages"] = {{"subjectivity", stage_to_json(model.subjectivity())},
                   {"polarity", stage_to_json(model.polarity())}};
    return j;
}

TwoStageModel model_from_json(const json& j) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != pipeline_format_version) {
            throw Error("unsupported two-stage model format version " + std::to_string(version));
        }
        const PipelineConfig config = config_from_json(j.at("config"));
        Lexicons lexicons;
        lexicons.stop_words = j.at("lexicons").at("stop_words").get<std::set<std::string>>();
        lexicons.negatory = j.at("lexicons").at("negatory").get<std::set<std::string>>();
        lexicons.emphasizer = j.at("lexicons").at("emphasizer").get<std::set<std::string>>();
        const std::optional<RuleLexicons> rules = active_rules(config, lexicons);
        const Preprocessor base = base_preprocessor(config, lexicons, rules ? &*rules : nullptr);
        StageModel subj = stage_from_json(j.at("stages").at("subjectivity"), base, "subjectivity");
        StageModel pol = stage_from_json(j.at("stages").at("polarity"), base, "polarity");
        return TwoStageModel(config, std::move(lexicons), std::move(subj), std::move(pol));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed two-stage model: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

double accuracy(std::span<const Label> predicted, std::span<const Label> gold) {
    if (predicted.size() != gold.size()) throw Error("accuracy: prediction and gold lists differ in length");
    if (gold.empty()) throw Error("accuracy: empty label lists");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i];
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::size_t class_row(Label label) {
    for (std::size_t i = 0; i < report_classes.size(); ++i)
        if (report_classes[i] == label) return i;
    throw Error("unlabeled post in evaluation");
}

} // namespace

double FoldReport::subjectivity_accuracy() const { return ratio(subjectivity_correct, n_test); }
std::optional<double> FoldReport::polarity_accuracy() const {
    if (n_polar == 0) return std::nullopt;
    return ratio(polarity_correct, n_polar);
}
double FoldReport::end_to_end_accuracy() const { return ratio(end_to_end_correct, n_test); }

double EvaluationReport::subjectivity_accuracy() const {
    std::size_t num = 0, den = 0;
    for (const auto& f : folds) num += f.subjectivity_correct, den += f.n_test;
    return ratio(num, den);
}

double EvaluationReport::polarity_accuracy() const {
    std::size_t num = 0, den = 0;
    for (const auto& f : folds) num += f.polarity_correct, den += f.n_polar;
    return ratio(num, den);
}

double EvaluationReport::end_to_end_accuracy() const {
    std::size_t num = 0, den = 0;
    for (const auto& f : folds) num += f.end_to_end_correct, den += f.n_test;
    return ratio(num, den);
}

double EvaluationReport::mean_subjectivity_accuracy() const {
    double sum = 0;
    for (const auto& f : folds) sum += f.subjectivity_accuracy();
    return folds.empty() ? 0.0 : sum / static_cast<double>(folds.size());
}

double EvaluationReport::mean_polarity_accuracy() const {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& f : folds) {
        if (auto a = f.polarity_accuracy()) sum += *a, ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double EvaluationReport::mean_end_to_end_accuracy() const {
    double sum = 0;
    for (const auto& f : folds) sum += f.end_to_end_accuracy();
    return folds.empty() ? 0.0 : sum / static_cast<double>(folds.size());
}

json to_json(const EvaluationReport& r) {
    json folds = json::array();
    for (const auto& f : r.folds) {
        json preds = json::array();
        for (const auto& p : f.predictions) {
            json jp = {{"id", p.id},
                       {"gold", to_string(p.gold)},
                       {"predicted", to_string(p.predicted)},
                       {"subjectivity_score", p.subjectivity_score}};
            jp["polarity_score"] = p.polarity_score ? json(*p.polarity_score) : json(nullptr);
            preds.push_back(std::move(jp));
        }
        json jf = {{"fold", f.fold},
                   {"n_test", f.n_test},
                   {"n_polar", f.n_polar},
                   {"subjectivity_accuracy", f.subjectivity_accuracy()},
                   {"end_to_end_accuracy", f.end_to_end_accuracy()},
                   {"predictions", std::move(preds)}};
        auto pol = f.polarity_accuracy();
        jf["polarity_accuracy"] = pol ? json(*pol) : json(nullptr);
        folds.push_back(std::move(jf));
    }
    json labels = json::array();
    for (Label l : report_classes) labels.push_back(to_string(l));
    return {{"config", to_json(r.config)},
            {"k", r.k},
            {"stratified", r.stratified},
            {"pooled",
             {{"subjectivity_accuracy", r.subjectivity_accuracy()},
              {"polarity_accuracy", r.polarity_accuracy()},
              {"end_to_end_accuracy", r.end_to_end_accuracy()}}},
            {"fold_mean",
             {{"subjectivity_accuracy", r.mean_subjectivity_accuracy()},
              {"polarity_accuracy", r.mean_polarity_accuracy()},
              {"end_to_end_accuracy", r.mean_end_to_end_accuracy()}}},
            {"confusion", {{"labels", labels}, {"matrix", r.confusion}}},
            {"folds", std::move(folds)}};
}

FoldReport evaluate_fold(const Corpus& train, std::span<const Post> test, const PipelineConfig& config,
                         const Lexicons& lexicons, std::size_t fold_index) {
    std::optional<TwoStageModel> model;
    try {
        model.emplace(train_two_stage(train, config, lexicons));
    } catch (const Error& e) {
        throw Error("fold " + std::to_string(fold_index) + ": " + e.what());
    }

    FoldReport report;
    report.fold = fold_index;
    for (const Post& post : test) {
        if (!post.labeled()) continue;
        const StageScores scores = model->classify(post.text, post.id);
        PostPrediction pred{post.id, post.label, scores.label, scores.subjectivity_score, std::nullopt};
        ++report.n_test;
        if ((post.label == Label::objective) == (scores.label == Label::objective)) ++report.subjectivity_correct;
        if (scores.label == post.label) ++report.end_to_end_correct;
        if (post.label != Label::objective) {
            const Prediction pol = model->predict_polarity(post.text, post.id);
            pred.polarity_score = pol.score;
            const Label polar = pol.label == BinaryClass::positive ? Label::positive : Label::negative;
            ++report.n_polar;
            if (polar == post.label) ++report.polarity_correct;
        }
        report.predictions.push_back(std::move(pred));
    }
    return report;
}

EvaluationReport cross_validate(const Corpus& corpus, const PipelineConfig& config, const Lexicons& lexicons,
                                std::size_t k, bool stratified, bool parallel) {
    const FoldPlan plan = split_folds(corpus, k, config.seed, stratified);

    auto run_fold = [&](std::size_t f) {
        std::vector<Post> train, test;
        for (const Post& post : corpus) {
            auto it = plan.assignment.find(post.id);
            if (it == plan.assignment.end()) continue;
            (it->second == f ? test : train).push_back(post);
        }
        return evaluate_fold(Corpus(std::move(train)), test, config, lexicons, f);
    };

    EvaluationReport report;
    report.config = config;
    report.k = k;
    report.stratified = stratified;
    if (parallel) {
        std::vector<std::future<FoldReport>> futures;
        for (std::size_t f = 0; f < k; ++f) futures.push_back(std::async(std::launch::async, run_fold, f));
        for (auto& fut : futures) report.folds.push_back(fut.get());
    } else {
        for (std::size_t f = 0; f < k; ++f) report.folds.push_back(run_fold(f));
    }
    for (const auto& fold : report.folds)
        for (const auto& p : fold.predictions) ++report.confusion[class_row(p.gold)][class_row(p.predicted)];
    return report;
}

// ---------------------------------------------------------------------------

std::vector<std::string> grid_names() { return {"table1", "table2", "table3", "table4"}; }

namespace {

struct MetricRow {
    const char* name;
    Metric metric;
};

constexpr MetricRow metric_rows[] = {{"Presence", Metric::presence},
                                     {"Count", Metric::count},
                                     {"Frequency", Metric::frequency},
                                     {"IFrequency", Metric::ifrequency}};
constexpr MetricRow block_rows[] = {{"Presence", Metric::presence}, {"IFrequency", Metric::ifrequency}};

void add_classifier_pair(GridSpec& grid, const std::string& block, const std::string& row, PipelineConfig config) {
    config.classifier = ClassifierKind::svm;
    grid.cells.push_back({block, row, "SVM", config});
    config.classifier = ClassifierKind::nb;
    grid.cells.push_back({block, row, "NB", config});
}

} // namespace

GridSpec make_grid(std::string_view name, const PipelineConfig& base, std::optional<RuleMode> rule_mode_override) {
    GridSpec grid;
    grid.name = std::string(name);
    PipelineConfig plain = base;
    plain.ngrams = NgramMode::unigrams;
    plain.rule_mode = RuleMode::off;
    PipelineConfig preprocessed = plain;
    preprocessed.stop_words = true;
    preprocessed.stemming = true;

    if (name == "table1" || name == "table2") {
        const bool with_pre = name == "table2";
        grid.title = with_pre ? "Unigram metrics, stop-word removal and stemming"
                              : "Unigram metrics, no preprocessing";
        for (const auto& row : metric_rows) {
            PipelineConfig c = with_pre ? preprocessed : plain;
            c.metric = row.metric;
            add_classifier_pair(grid, "", row.name, c);
        }
    } else if (name == "table3") {
        grid.title = "N-gram order, stop-word removal and stemming";
        const std::pair<const char*, NgramMode> orders[] = {{"Unigrams only", NgramMode::unigrams},
                                                            {"Bigrams only", NgramMode::bigrams},
                                                            {"Unigrams bigrams", NgramMode::unigrams_bigrams}};
        for (const auto& block : block_rows) {
            for (const auto& [row, mode] : orders) {
                PipelineConfig c = preprocessed;
                c.metric = block.metric;
                c.ngrams = mode;
                add_classifier_pair(grid, block.name, row, c);
            }
        }
    } else if (name == "table4") {
        grid.title = "Rule bigrams, stop-word removal and stemming";
        for (const auto& block : block_rows) {
            const RuleMode mode = rule_mode_override.value_or(block.metric == Metric::presence ? RuleMode::tag
                                                                                               : RuleMode::signed_count);
            PipelineConfig c = preprocessed;
            c.metric = block.metric;
            add_classifier_pair(grid, block.name, "Unigram", c);
            c.rule_mode = mode;
            const std::pair<const char*, RuleScope> scopes[] = {{"Negations only", RuleScope::negation},
                                                                {"Emphasizers only", RuleScope::emphasis},
                                                                {"Both", RuleScope::both}};
            for (const auto& [row, scope] : scopes) {
                c.rule_scope = scope;
                add_classifier_pair(grid, block.name, row, c);
            }
        }
    } else {
        throw Error("unknown grid \"" + std::string(name) + "\" (expected table1, table2, table3 or table4)");
    }
    return grid;
}

std::string render_grid(const GridSpec& grid, std::span<const EvaluationReport> reports, ReportedAccuracy which) {
    if (reports.size() != grid.cells.size()) throw Error("render_grid: one report per cell expected");
    auto value = [&](const EvaluationReport& r) {
        switch (which) {
        case ReportedAccuracy::subjectivity: return r.subjectivity_accuracy();
        case ReportedAccuracy::polarity: return r.polarity_accuracy();
        case ReportedAccuracy::end_to_end: return r.end_to_end_accuracy();
        }
        return r.end_to_end_accuracy();
    };

    std::ostringstream out;
    out << grid.name << ": " << grid.title << '\n';
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cells;
    std::vector<std::string> block_order;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const GridCell& cell = grid.cells[i];
        if (std::find(block_order.begin(), block_order.end(), cell.block) == block_order.end())
            block_order.push_back(cell.block);
        cells[{cell.block, cell.row}][cell.column] = value(reports[i]);
    }
    for (const std::string& block : block_order) {
        std::vector<std::string> rows;
        for (const auto& cell : grid.cells)
            if (cell.block == block && std::find(rows.begin(), rows.end(), cell.row) == rows.end())
                rows.push_back(cell.row);
        std::size_t width = std::max<std::size_t>(block.empty() ? 8 : block.size(), 8);
        for (const auto& r : rows) width = std::max(width, r.size());
        out << '\n' << std::left << std::setw(static_cast<int>(width)) << (block.empty() ? "Accuracy" : block)
            << " | " << std::setw(6) << "SVM" << " | " << "NB" << '\n';
        out << std::string(width, '-') << "-+--------+-------\n";
        for (const auto& row : rows) {
            const auto& cols = cells[{block, row}];
            out << std::left << std::setw(static_cast<int>(width)) << row << " | " << std::fixed
                << std::setprecision(4) << std::setw(6) << cols.at("SVM") << " | " << cols.at("NB") << '\n';
        }
    }
    return out.str();
}

} // namespace opinion
