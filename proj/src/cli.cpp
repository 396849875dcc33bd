#include "opinion/cli.hpp"

#include "opinion/corpus.hpp"
#include "opinion/error.hpp"
#include "opinion/io.hpp"
#include "opinion/log.hpp"
#include "opinion/pipeline.hpp"
#include "opinion/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace opinion::cli {

using nlohmann::json;

namespace {

// Everything a command needs; serialized verbatim into the run manifest so
// that `replay` can re-execute the run.
struct Options {
    std::string command;

    std::string corpus;
    std::string model;
    std::string text;
    bool has_text = false;
    std::string input;
    std::string out;
    std::string manifest;

    std::string metric = "ifrequency";
    std::string classifier = "svm";
    std::string ngrams = "unigrams";
    std::string rules = "none";
    std::string rule_mode;
    std::string stop_words;
    std::string negatory;
    std::string emphasizers;
    bool stem = false;
    std::size_t min_count = 5;
    double lambda = PipelineConfig{}.svm_lambda;
    std::size_t epochs = PipelineConfig{}.svm_epochs;
    double smoothing = 1.0;
    std::uint64_t seed = 1;

    std::size_t folds = 10;
    std::string grid;
    bool unstratified = false;
    std::string report_stage = "end-to-end";

    std::string by = "topic";
    bool by_year_month = false;
    std::string format = "csv";
};

json options_to_json(const Options& o) {
    return {{"command", o.command},     {"corpus", o.corpus},
            {"model", o.model},         {"text", o.text},
            {"has_text", o.has_text},   {"input", o.input},
            {"out", o.out},             {"metric", o.metric},
            {"classifier", o.classifier}, {"ngrams", o.ngrams},
            {"rules", o.rules},         {"rule_mode", o.rule_mode},
            {"stop_words", o.stop_words}, {"negatory", o.negatory},
            {"emphasizers", o.emphasizers}, {"stem", o.stem},
            {"min_count", o.min_count}, {"lambda", o.lambda},
            {"epochs", o.epochs},       {"smoothing", o.smoothing},
            {"seed", o.seed},           {"folds", o.folds},
            {"grid", o.grid},           {"unstratified", o.unstratified},
            {"report_stage", o.report_stage}, {"by", o.by},
            {"by_year_month", o.by_year_month}, {"format", o.format}};
}

Options options_from_json(const json& j) {
    Options o;
    auto get = [&](const char* key, auto& field) {
        if (auto it = j.find(key); it != j.end()) it->get_to(field);
    };
    get("command", o.command);
    get("corpus", o.corpus);
    get("model", o.model);
    get("text", o.text);
    get("has_text", o.has_text);
    get("input", o.input);
    get("out", o.out);
    get("metric", o.metric);
    get("classifier", o.classifier);
    get("ngrams", o.ngrams);
    get("rules", o.rules);
    get("rule_mode", o.rule_mode);
    get("stop_words", o.stop_words);
    get("negatory", o.negatory);
    get("emphasizers", o.emphasizers);
    get("stem", o.stem);
    get("min_count", o.min_count);
    get("lambda", o.lambda);
    get("epochs", o.epochs);
    get("smoothing", o.smoothing);
    get("seed", o.seed);
    get("folds", o.folds);
    get("grid", o.grid);
    get("unstratified", o.unstratified);
    get("report_stage", o.report_stage);
    get("by", o.by);
    get("by_year_month", o.by_year_month);
    get("format", o.format);
    return o;
}

void add_config_flags(CLI::App& app, Options& o) {
    app.add_option("--metric", o.metric, "presence | count | frequency | ifrequency")
        ->check(CLI::IsMember({"presence", "count", "frequency", "ifrequency"}));
    app.add_option("--classifier", o.classifier, "svm | nb")->check(CLI::IsMember({"svm", "nb"}));
    app.add_option("--ngrams", o.ngrams, "unigrams | bigrams | unigrams+bigrams")
        ->check(CLI::IsMember({"unigrams", "bigrams", "unigrams+bigrams", "both"}));
    app.add_option("--rules", o.rules, "rule bigram scope: none | negation | emphasis | both")
        ->check(CLI::IsMember({"none", "negation", "emphasis", "both"}));
    app.add_option("--rule-mode", o.rule_mode, "off | tag | signed-count")
        ->check(CLI::IsMember({"off", "tag", "signed-count"}));
    app.add_option("--stop-words", o.stop_words, "stop-word lexicon; enables stop-word removal");
    app.add_option("--negatory", o.negatory, "negatory word lexicon");
    app.add_option("--emphasizers", o.emphasizers, "emphasizer word lexicon");
    app.add_flag("--stem", o.stem, "peak-and-plateau stemming");
    app.add_option("--min-count", o.min_count, "minimum total n-gram occurrences")->check(CLI::PositiveNumber);
    app.add_option("--lambda", o.lambda, "SVM regularization")->check(CLI::PositiveNumber);
    app.add_option("--epochs", o.epochs, "SVM epochs")->check(CLI::PositiveNumber);
    app.add_option("--smoothing", o.smoothing, "naive Bayes additive smoothing")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "seed for every random choice");
}

PipelineConfig config_from_options(const Options& o) {
    PipelineConfig c;
    c.metric = parse_metric(o.metric);
    c.classifier = parse_classifier(o.classifier);
    c.ngrams = parse_ngram_mode(o.ngrams);
    if (o.rules == "none") {
        c.rule_mode = o.rule_mode.empty() ? RuleMode::off : parse_rule_mode(o.rule_mode);
        if (c.rule_mode != RuleMode::off) throw Error("--rule-mode needs --rules negation|emphasis|both");
    } else {
        c.rule_scope = parse_rule_scope(o.rules);
        c.rule_mode = !o.rule_mode.empty()              ? parse_rule_mode(o.rule_mode)
                      : c.metric == Metric::presence ? RuleMode::tag
                                                     : RuleMode::signed_count;
    }
    c.stop_words = !o.stop_words.empty();
    c.stemming = o.stem;
    c.min_count = o.min_count;
    c.svm_lambda = o.lambda;
    c.svm_epochs = o.epochs;
    c.nb_smoothing = o.smoothing;
    c.seed = o.seed;
    return c;
}

Lexicons lexicons_from_options(const Options& o) {
    Lexicons lex;
    if (!o.stop_words.empty()) lex.stop_words = load_lexicon(o.stop_words);
    if (!o.negatory.empty()) lex.negatory = load_lexicon(o.negatory);
    if (!o.emphasizers.empty()) lex.emphasizer = load_lexicon(o.emphasizers);
    return lex;
}

void check_rule_lexicons(const PipelineConfig& c, const Lexicons& lex) {
    if (c.rule_mode == RuleMode::off) return;
    if (c.rule_scope != RuleScope::emphasis && lex.negatory.empty())
        throw Error("negation rules need a non-empty --negatory lexicon");
    if (c.rule_scope != RuleScope::negation && lex.emphasizer.empty())
        throw Error("emphasis rules need a non-empty --emphasizers lexicon");
}

void write_manifest(const Options& o, const std::string& default_path, const json& config) {
    const std::string path = o.manifest.empty() ? default_path : o.manifest;
    if (path.empty()) return;
    json m = {{"tool", tool_name},
              {"version", tool_version},
              {"command", o.command},
              {"seed", o.seed},
              {"config", config},
              {"inputs", {{"corpus", o.corpus}, {"model", o.model}, {"input", o.input}}},
              {"lexicons", {{"stop_words", o.stop_words}, {"negatory", o.negatory}, {"emphasizers", o.emphasizers}}},
              {"outputs", {{"out", o.out}}},
              {"options", options_to_json(o)}};
    write_file_atomic(path, m.dump(2) + "\n");
}

std::string manifest_path_for(const std::string& output) {
    return output.empty() ? std::string() : output + ".manifest.json";
}

int cmd_train(const Options& o, std::ostream& out) {
    const PipelineConfig config = config_from_options(o);
    const Lexicons lexicons = lexicons_from_options(o);
    check_rule_lexicons(config, lexicons);
    const Corpus corpus = load_corpus(o.corpus);
    const TwoStageModel model = train_two_stage(corpus, config, lexicons);
    write_file_atomic(o.out, to_json(model).dump() + "\n");
    write_manifest(o, manifest_path_for(o.out), to_json(config));
    out << "model written to " << o.out << '\n';
    return 0;
}

ReportedAccuracy parse_stage(const std::string& s) {
    if (s == "subjectivity") return ReportedAccuracy::subjectivity;
    if (s == "polarity") return ReportedAccuracy::polarity;
    return ReportedAccuracy::end_to_end;
}

void print_report(const EvaluationReport& r, std::ostream& out) {
    out << std::fixed << std::setprecision(4);
    out << "subjectivity accuracy: " << r.subjectivity_accuracy() << '\n'
        << "polarity accuracy:     " << r.polarity_accuracy() << '\n'
        << "end-to-end accuracy:   " << r.end_to_end_accuracy() << '\n'
        << "confusion (rows gold, columns predicted; objective positive negative):\n";
    for (const auto& row : r.confusion) out << "  " << row[0] << ' ' << row[1] << ' ' << row[2] << '\n';
    out.unsetf(std::ios::floatfield);
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const PipelineConfig base = config_from_options(o);
    const Lexicons lexicons = lexicons_from_options(o);
    const Corpus corpus = load_corpus(o.corpus);
    const bool stratified = !o.unstratified;

    if (o.grid.empty()) {
        check_rule_lexicons(base, lexicons);
        const EvaluationReport report = cross_validate(corpus, base, lexicons, o.folds, stratified);
        print_report(report, out);
        if (!o.out.empty()) write_file_atomic(o.out, to_json(report).dump(2) + "\n");
        write_manifest(o, manifest_path_for(o.out), to_json(base));
        return 0;
    }

    std::optional<RuleMode> override_mode;
    if (!o.rule_mode.empty()) override_mode = parse_rule_mode(o.rule_mode);
    const GridSpec grid = make_grid(o.grid, base, override_mode);
    if (o.stop_words.empty() && (o.grid != "table1")) {
        warn("grid " + o.grid + " enables stop-word removal but no --stop-words lexicon was given");
    }
    std::vector<EvaluationReport> reports;
    json cells = json::array();
    for (const GridCell& cell : grid.cells) {
        check_rule_lexicons(cell.config, lexicons);
        reports.push_back(cross_validate(corpus, cell.config, lexicons, o.folds, stratified));
        cells.push_back({{"block", cell.block}, {"row", cell.row}, {"column", cell.column},
                         {"report", to_json(reports.back())}});
    }
    out << render_grid(grid, reports, parse_stage(o.report_stage));
    if (!o.out.empty()) {
        json doc = {{"grid", grid.name}, {"title", grid.title}, {"cells", std::move(cells)}};
        write_file_atomic(o.out, doc.dump(2) + "\n");
    }
    write_manifest(o, manifest_path_for(o.out), to_json(base));
    return 0;
}

TwoStageModel load_model(const std::string& path) {
    const std::string content = read_file(path);
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw Error("cannot parse model file " + path + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

json classified_record(const Post& post, const StageScores& scores) {
    json rec = {{"id", post.id}, {"label", to_string(scores.label)}, {"subjectivity_score", scores.subjectivity_score}};
    rec["polarity_score"] = scores.polarity_score ? json(*scores.polarity_score) : json(nullptr);
    if (post.topic) rec["topic"] = *post.topic;
    if (post.timestamp) rec["timestamp"] = format_timestamp(*post.timestamp);
    return rec;
}

int cmd_classify(const Options& o, std::ostream& out) {
    const TwoStageModel model = load_model(o.model);
    if (o.has_text) {
        Post post;
        post.id = "text";
        post.text = o.text;
        out << classified_record(post, model.classify(post.text, post.id)).dump() << '\n';
    } else {
        const Corpus corpus = load_corpus(o.corpus);
        for (const Post& post : corpus) out << classified_record(post, model.classify(post.text, post.id)).dump() << '\n';
    }
    out.flush();
    write_manifest(o, "", to_json(model.config()));
    return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw Error("cannot open classified file " + o.input);
    std::vector<ClassifiedPost> posts;
    try {
        posts = parse_classified(in);
    } catch (const Error& e) {
        throw Error(o.input + ": " + e.what());
    }
    const ReportFormat format = parse_report_format(o.format);
    MoodTable table;
    if (o.by == "topic") {
        table = mood_by_topic(posts);
    } else {
        table = mood_by_month(posts, o.by_year_month ? MonthGrouping::year_month : MonthGrouping::month);
    }
    if (table.rows.empty()) warn("no post carries a " + o.by + "; the report is empty");
    if (o.out.empty()) {
        write_report(table, format, out);
    } else {
        emit_report(table, format, o.out);
    }
    write_manifest(o, manifest_path_for(o.out), json(nullptr));
    return 0;
}

int dispatch(const Options& o, std::ostream& out) {
    if (o.command == "train") return cmd_train(o, out);
    if (o.command == "evaluate") return cmd_evaluate(o, out);
    if (o.command == "classify") return cmd_classify(o, out);
    if (o.command == "stats") return cmd_stats(o, out);
    throw Error("unknown command \"" + o.command + "\"");
}

int cmd_replay(const std::string& path, std::ostream& out) {
    json m;
    try {
        m = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error("cannot parse manifest " + path + ": " + e.what());
    }
    if (!m.contains("options")) throw Error("manifest " + path + " has no options");
    Options o = options_from_json(m.at("options"));
    o.manifest.clear();
    return dispatch(o, out);
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    auto previous = set_warning_handler([&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
    struct Restore {
        WarningHandler h;
        ~Restore() { set_warning_handler(std::move(h)); }
    } restore{std::move(previous)};

    CLI::App app{"Two-stage opinion classification of short informal posts"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    Options o;
    std::string replay_path;

    auto* train = app.add_subcommand("train", "train a two-stage model");
    train->add_option("--corpus", o.corpus, "labeled JSONL corpus")->required();
    train->add_option("--out", o.out, "model output file")->required();
    train->add_option("--manifest", o.manifest, "run manifest path (default: <out>.manifest.json)");
    add_config_flags(*train, o);

    auto* evaluate = app.add_subcommand("evaluate", "cross-validate one configuration or a named grid");
    evaluate->add_option("--corpus", o.corpus, "labeled JSONL corpus")->required();
    evaluate->add_option("--folds", o.folds, "number of folds")->check(CLI::PositiveNumber);
    evaluate->add_option("--grid", o.grid, "table1 | table2 | table3 | table4")
        ->check(CLI::IsMember({"table1", "table2", "table3", "table4"}));
    evaluate->add_flag("--unstratified", o.unstratified, "plain shuffled folds");
    evaluate->add_option("--report-stage", o.report_stage, "accuracy shown in grid tables")
        ->check(CLI::IsMember({"end-to-end", "subjectivity", "polarity"}));
    evaluate->add_option("--out", o.out, "JSON report file");
    evaluate->add_option("--manifest", o.manifest, "run manifest path (default: <out>.manifest.json)");
    add_config_flags(*evaluate, o);

    auto* classify = app.add_subcommand("classify", "label posts with a trained model (JSONL on stdout)");
    classify->add_option("--model", o.model, "model file")->required();
    auto* corpus_opt = classify->add_option("--corpus", o.corpus, "JSONL posts to classify");
    auto* text_opt = classify->add_option("--text", o.text, "a single text to classify");
    corpus_opt->excludes(text_opt);
    classify->add_option("--manifest", o.manifest, "write a run manifest");

    auto* stats = app.add_subcommand("stats", "mood statistics from classified JSONL");
    stats->add_option("--input", o.input, "output of the classify command")->required();
    stats->add_option("--by", o.by, "topic | month")->check(CLI::IsMember({"topic", "month"}));
    stats->add_flag("--by-year-month", o.by_year_month, "with --by month, keep years apart");
    stats->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    stats->add_option("--out", o.out, "report file (default: stdout)");
    stats->add_option("--manifest", o.manifest, "run manifest path (default: <out>.manifest.json)");

    auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    replay->add_option("manifest", replay_path, "manifest file")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (replay->parsed()) return cmd_replay(replay_path, out);
        if (classify->parsed()) {
            o.has_text = text_opt->count() > 0;
            if (!o.has_text && o.corpus.empty()) throw Error("classify needs --corpus or --text");
        }
        for (auto* sub : app.get_subcommands()) o.command = sub->get_name();
        return dispatch(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace opinion::cli
