#pragma once

#include "opinion/features.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace opinion {

// Binary class tag used by both stages. The pipeline maps the lexically
// smaller class name of each stage ("objective", "negative") to negative.
enum class BinaryClass : int { negative = -1, positive = 1 };

inline constexpr std::size_t class_slot(BinaryClass c) { return c == BinaryClass::positive ? 1 : 0; }
inline constexpr int sign_of(BinaryClass c) { return static_cast<int>(c); }

struct Prediction {
    BinaryClass label = BinaryClass::negative;
    double score = 0.0;
};

// Score > 0 is positive, < 0 negative, exactly 0 goes to `tie`.
inline BinaryClass decide(double score, BinaryClass tie) {
    if (score > 0) return BinaryClass::positive;
    if (score < 0) return BinaryClass::negative;
    return tie;
}

// Class with the larger training count; the negative class on equal counts.
BinaryClass tie_class_from_counts(std::size_t n_negative, std::size_t n_positive);

// ---------------------------------------------------------------------------
// Multinomial naive Bayes with additive smoothing. Accepts fractional,
// non-negative feature values.

struct NBModel {
    std::array<double, 2> class_log_prior{};                     // [negative, positive]
    std::array<std::vector<double>, 2> feature_log_likelihood{};  // [class][feature]
    double smoothing = 1.0;
    std::size_t vocab_size = 0;
    BinaryClass tie = BinaryClass::negative;

    bool operator==(const NBModel&) const = default;
};

NBModel train_nb(std::span<const FeatureVector> vectors, std::span<const BinaryClass> labels,
                 std::size_t vocab_size, double smoothing = 1.0);

Prediction predict_nb(const NBModel& model, const FeatureVector& x);

// ---------------------------------------------------------------------------
// Linear soft-margin SVM minimising
//   (lambda/2)|w|^2 + (1/N) sum_p max(0, 1 - y_p (w.x_p + b))
// by seeded stochastic subgradient steps of size 1/(lambda t) on w with
// iterate averaging. The unregularised bias is refitted exactly for the
// current weights after every epoch and for the averaged weights at the end.

struct SvmParams {
    double lambda = 1e-3;
    std::size_t epochs = 20;
    std::uint64_t seed = 1;

    bool operator==(const SvmParams&) const = default;
};

struct SVMModel {
    std::vector<double> weights;
    double bias = 0.0;
    SvmParams params;
    BinaryClass tie = BinaryClass::negative;

    bool operator==(const SVMModel&) const = default;
};

struct SvmTrace {
    // Objective of the averaged solution (with its refitted bias) after each epoch.
    std::vector<double> epoch_objective;
};

SVMModel train_svm(std::span<const FeatureVector> vectors, std::span<const BinaryClass> labels,
                   std::size_t dimension, const SvmParams& params, SvmTrace* trace = nullptr);

Prediction predict_svm(const SVMModel& model, const FeatureVector& x);

double dot(std::span<const double> weights, const FeatureVector& x);

double svm_objective(std::span<const double> weights, double bias, std::span<const FeatureVector> vectors,
                     std::span<const BinaryClass> labels, double lambda);

struct SvmGradient {
    std::vector<double> weights;
    double bias = 0.0;
};

// A subgradient of svm_objective; exact gradient wherever no example sits on
// the hinge (margin exactly 1).
SvmGradient svm_subgradient(std::span<const double> weights, double bias, std::span<const FeatureVector> vectors,
                            std::span<const BinaryClass> labels, double lambda);

// Minimiser over b of sum_p max(0, 1 - y_p (s_p + b)) for fixed scores s.
// Returns the midpoint of the optimal interval.
double fit_bias(std::span<const double> scores, std::span<const BinaryClass> labels);

// ---------------------------------------------------------------------------

using BinaryModel = std::variant<NBModel, SVMModel>;

Prediction predict(const BinaryModel& model, const FeatureVector& x);

// Versioned JSON: {"format_version", "kind", "hyperparameters",
// "dictionary_fingerprint", "parameters"}.
nlohmann::json model_to_json(const BinaryModel& model, std::uint64_t dictionary_fingerprint);
// Returns the model and writes the stored fingerprint to `fingerprint`.
BinaryModel model_from_json(const nlohmann::json& j, std::uint64_t& fingerprint);

inline constexpr int model_format_version = 1;

} // namespace opinion
