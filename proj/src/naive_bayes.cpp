#include "opinion/classify.hpp"

#include "opinion/error.hpp"

#include <cmath>

namespace opinion {

BinaryClass tie_class_from_counts(std::size_t n_negative, std::size_t n_positive) {
    return n_positive > n_negative ? BinaryClass::positive : BinaryClass::negative;
}

NBModel train_nb(std::span<const FeatureVector> vectors, std::span<const BinaryClass> labels,
                 std::size_t vocab_size, double smoothing) {
    if (vectors.size() != labels.size()) throw Error("naive Bayes: vectors and labels differ in length");
    if (!(smoothing > 0) || !std::isfinite(smoothing)) throw Error("naive Bayes: smoothing must be positive");
    if (vocab_size == 0) throw Error("naive Bayes: empty vocabulary");

    std::array<std::size_t, 2> docs{};
    std::array<std::vector<double>, 2> sums{std::vector<double>(vocab_size, 0.0),
                                            std::vector<double>(vocab_size, 0.0)};
    std::array<double, 2> totals{};
    for (std::size_t p = 0; p < vectors.size(); ++p) {
        const std::size_t c = class_slot(labels[p]);
        ++docs[c];
        for (const auto& [i, v] : vectors[p].entries) {
            if (i >= vocab_size) throw Error("naive Bayes: feature index outside the vocabulary");
            if (!std::isfinite(v)) throw Error("naive Bayes: non-finite feature value");
            if (v < 0) throw Error("naive Bayes: negative feature value");
            sums[c][i] += v;
            totals[c] += v;
        }
    }
    if (docs[0] == 0) throw Error("naive Bayes: no training example of the negative class");
    if (docs[1] == 0) throw Error("naive Bayes: no training example of the positive class");

    NBModel model;
    model.smoothing = smoothing;
    model.vocab_size = vocab_size;
    model.tie = tie_class_from_counts(docs[0], docs[1]);
    const double n = static_cast<double>(vectors.size());
    for (std::size_t c = 0; c < 2; ++c) {
        model.class_log_prior[c] = std::log(static_cast<double>(docs[c]) / n);
        const double denom = totals[c] + smoothing * static_cast<double>(vocab_size);
        auto& loglik = model.feature_log_likelihood[c];
        loglik.resize(vocab_size);
        for (std::size_t i = 0; i < vocab_size; ++i) loglik[i] = std::log((sums[c][i] + smoothing) / denom);
    }
    return model;
}

Prediction predict_nb(const NBModel& model, const FeatureVector& x) {
    double pos = model.class_log_prior[1];
    double neg = model.class_log_prior[0];
    for (const auto& [i, v] : x.entries) {
        if (i >= model.vocab_size) continue;
        pos += v * model.feature_log_likelihood[1][i];
        neg += v * model.feature_log_likelihood[0][i];
    }
    const double score = pos - neg;
    return {decide(score, model.tie), score};
}

} // namespace opinion
