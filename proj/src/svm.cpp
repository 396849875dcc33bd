#include "opinion/classify.hpp"

#include "opinion/error.hpp"
#include "opinion/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace opinion {

double dot(std::span<const double> weights, const FeatureVector& x) {
    double s = 0.0;
    for (const auto& [i, v] : x.entries)
        if (i < weights.size()) s += weights[i] * v;
    return s;
}

double svm_objective(std::span<const double> weights, double bias, std::span<const FeatureVector> vectors,
                     std::span<const BinaryClass> labels, double lambda) {
    double norm2 = 0.0;
    for (double w : weights) norm2 += w * w;
    double loss = 0.0;
    for (std::size_t p = 0; p < vectors.size(); ++p) {
        const double y = sign_of(labels[p]);
        loss += std::max(0.0, 1.0 - y * (dot(weights, vectors[p]) + bias));
    }
    return 0.5 * lambda * norm2 + loss / static_cast<double>(vectors.size());
}

SvmGradient svm_subgradient(std::span<const double> weights, double bias, std::span<const FeatureVector> vectors,
                            std::span<const BinaryClass> labels, double lambda) {
    SvmGradient g;
    g.weights.assign(weights.begin(), weights.end());
    for (double& w : g.weights) w *= lambda;
    const double inv_n = 1.0 / static_cast<double>(vectors.size());
    for (std::size_t p = 0; p < vectors.size(); ++p) {
        const double y = sign_of(labels[p]);
        if (y * (dot(weights, vectors[p]) + bias) < 1.0) {
            for (const auto& [i, v] : vectors[p].entries) g.weights[i] -= inv_n * y * v;
            g.bias -= inv_n * y;
        }
    }
    return g;
}

double fit_bias(std::span<const double> scores, std::span<const BinaryClass> labels) {
    if (scores.size() != labels.size()) throw Error("fit_bias: scores and labels differ in length");
    // The loss is convex piecewise linear in b with slope -P at -inf rising by
    // one at each breakpoint, so it is flat between the P-th and (P+1)-th.
    std::vector<double> breakpoints;
    breakpoints.reserve(scores.size());
    std::size_t n_pos = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (labels[p] == BinaryClass::positive) {
            breakpoints.push_back(1.0 - scores[p]);
            ++n_pos;
        } else {
            breakpoints.push_back(-1.0 - scores[p]);
        }
    }
    if (n_pos == 0 || n_pos == scores.size()) throw Error("fit_bias needs examples of both classes");
    std::sort(breakpoints.begin(), breakpoints.end());
    return 0.5 * (breakpoints[n_pos - 1] + breakpoints[n_pos]);
}

namespace {

std::vector<double> scores_of(std::span<const double> weights, std::span<const FeatureVector> vectors) {
    std::vector<double> s(vectors.size());
    for (std::size_t p = 0; p < vectors.size(); ++p) s[p] = dot(weights, vectors[p]);
    return s;
}

} // namespace

SVMModel train_svm(std::span<const FeatureVector> vectors, std::span<const BinaryClass> labels,
                   std::size_t dimension, const SvmParams& params, SvmTrace* trace) {
    if (vectors.size() != labels.size()) throw Error("SVM: vectors and labels differ in length");
    if (!(params.lambda > 0) || !std::isfinite(params.lambda)) throw Error("SVM: lambda must be positive");
    if (params.epochs == 0) throw Error("SVM: epochs must be positive");
    std::size_t n_pos = 0;
    for (std::size_t p = 0; p < vectors.size(); ++p) {
        if (labels[p] == BinaryClass::positive) ++n_pos;
        for (const auto& [i, v] : vectors[p].entries) {
            if (!std::isfinite(v)) throw Error("SVM: non-finite feature value");
            if (i >= dimension) throw Error("SVM: feature index outside the dimension");
        }
    }
    if (n_pos == 0) throw Error("SVM: no training example of the positive class");
    if (n_pos == vectors.size()) throw Error("SVM: no training example of the negative class");

    const std::size_t n = vectors.size();
    const double inv_lambda = 1.0 / params.lambda;

    // The iterate after step t is w_t = v / t, where v accumulates the
    // (1/lambda) y x updates. The running sum of iterates is H_t v - z with
    // H_t the harmonic number and z = sum over updates of delta * H_{t_u - 1},
    // which keeps averaging sparse.
    std::vector<double> v(dimension, 0.0);
    std::vector<double> z(dimension, 0.0);
    double harmonic = 0.0;
    double bias = 0.0;
    std::uint64_t t = 0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(params.seed, 0x73766dULL));

    auto averaged = [&] {
        std::vector<double> w(dimension);
        const double inv_t = 1.0 / static_cast<double>(t);
        for (std::size_t i = 0; i < dimension; ++i) w[i] = (harmonic * v[i] - z[i]) * inv_t;
        return w;
    };

    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        seeded_shuffle(order, rng);
        for (std::size_t p : order) {
            const double y = sign_of(labels[p]);
            const double scale = t == 0 ? 0.0 : 1.0 / static_cast<double>(t);
            const double margin = y * (scale * dot(v, vectors[p]) + bias);
            ++t;
            if (margin < 1.0) {
                const double step = y * inv_lambda;
                for (const auto& [i, x] : vectors[p].entries) {
                    const double delta = step * x;
                    v[i] += delta;
                    z[i] += delta * harmonic;
                }
            }
            harmonic += 1.0 / static_cast<double>(t);
        }

        std::vector<double> current(v);
        for (double& w : current) w /= static_cast<double>(t);
        bias = fit_bias(scores_of(current, vectors), labels);

        if (trace) {
            std::vector<double> w = averaged();
            const double b = fit_bias(scores_of(w, vectors), labels);
            trace->epoch_objective.push_back(svm_objective(w, b, vectors, labels, params.lambda));
        }
    }

    SVMModel model;
    model.weights = averaged();
    model.bias = fit_bias(scores_of(model.weights, vectors), labels);
    model.params = params;
    model.tie = tie_class_from_counts(n - n_pos, n_pos);
    return model;
}

Prediction predict_svm(const SVMModel& model, const FeatureVector& x) {
    const double score = dot(model.weights, x) + model.bias;
    return {decide(score, model.tie), score};
}

} // namespace opinion
