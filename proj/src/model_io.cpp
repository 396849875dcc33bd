#include "opinion/classify.hpp"

#include "opinion/error.hpp"

#include <cmath>

namespace opinion {

using nlohmann::json;

Prediction predict(const BinaryModel& model, const FeatureVector& x) {
    return std::visit(
        [&](const auto& m) -> Prediction {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, NBModel>)
                return predict_nb(m, x);
            else
                return predict_svm(m, x);
        },
        model);
}

namespace {

std::string_view class_name(BinaryClass c) { return c == BinaryClass::positive ? "positive" : "negative"; }

BinaryClass parse_class(const std::string& s) {
    if (s == "positive") return BinaryClass::positive;
    if (s == "negative") return BinaryClass::negative;
    throw Error("unknown binary class \"" + s + "\"");
}

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) throw Error(std::string("non-finite value in ") + what);
}

} // namespace

json model_to_json(const BinaryModel& model, std::uint64_t dictionary_fingerprint) {
    json j;
    j["format_version"] = model_format_version;
    j["dictionary_fingerprint"] = dictionary_fingerprint;
    if (const auto* nb = std::get_if<NBModel>(&model)) {
        j["kind"] = "naive_bayes";
        j["hyperparameters"] = {{"smoothing", nb->smoothing}};
        j["parameters"] = {{"vocab_size", nb->vocab_size},
                           {"tie", class_name(nb->tie)},
                           {"class_log_prior", {{"negative", nb->class_log_prior[0]},
                                                {"positive", nb->class_log_prior[1]}}},
                           {"feature_log_likelihood", {{"negative", nb->feature_log_likelihood[0]},
                                                       {"positive", nb->feature_log_likelihood[1]}}}};
    } else {
        const auto& svm = std::get<SVMModel>(model);
        j["kind"] = "linear_svm";
        j["hyperparameters"] = {
            {"lambda", svm.params.lambda}, {"epochs", svm.params.epochs}, {"seed", svm.params.seed}};
        j["parameters"] = {{"tie", class_name(svm.tie)}, {"bias", svm.bias}, {"weights", svm.weights}};
    }
    return j;
}

BinaryModel model_from_json(const json& j, std::uint64_t& fingerprint) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != model_format_version) {
            throw Error("unsupported model format version " + std::to_string(version));
        }
        fingerprint = j.at("dictionary_fingerprint").get<std::uint64_t>();
        const std::string kind = j.at("kind").get<std::string>();
        const json& hyper = j.at("hyperparameters");
        const json& params = j.at("parameters");
        if (kind == "naive_bayes") {
            NBModel nb;
            nb.smoothing = hyper.at("smoothing").get<double>();
            nb.vocab_size = params.at("vocab_size").get<std::size_t>();
            nb.tie = parse_class(params.at("tie").get<std::string>());
            nb.class_log_prior[0] = params.at("class_log_prior").at("negative").get<double>();
            nb.class_log_prior[1] = params.at("class_log_prior").at("positive").get<double>();
            nb.feature_log_likelihood[0] =
                params.at("feature_log_likelihood").at("negative").get<std::vector<double>>();
            nb.feature_log_likelihood[1] =
                params.at("feature_log_likelihood").at("positive").get<std::vector<double>>();
            for (const auto& table : nb.feature_log_likelihood) {
                if (table.size() != nb.vocab_size) throw Error("naive Bayes table size does not match vocab_size");
                require_finite(table, "naive Bayes likelihoods");
            }
            return nb;
        }
        if (kind == "linear_svm") {
            SVMModel svm;
            svm.params.lambda = hyper.at("lambda").get<double>();
            svm.params.epochs = hyper.at("epochs").get<std::size_t>();
            svm.params.seed = hyper.at("seed").get<std::uint64_t>();
            svm.tie = parse_class(params.at("tie").get<std::string>());
            svm.bias = params.at("bias").get<double>();
            svm.weights = params.at("weights").get<std::vector<double>>();
            require_finite(svm.weights, "SVM weights");
            return svm;
        }
        throw Error("unknown model kind \"" + kind + "\"");
    } catch (const json::exception& e) {
        throw Error(std::string("malformed model: ") + e.what());
    }
}

} // namespace opinion
