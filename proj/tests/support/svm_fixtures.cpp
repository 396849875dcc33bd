#include "svm_fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace opinion::testing {

namespace {

// Normal (1, -0.5) / |.|, offset 0.3.
constexpr double line_a = 1.0, line_b = -0.5, line_c = 0.3;

double signed_distance(double x, double y) {
    return (line_a * x + line_b * y + line_c) / std::hypot(line_a, line_b);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

LabeledSet separable_2d(std::size_t n, double margin, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    LabeledSet set;
    set.dimension = 2;
    std::size_t pos = 0;
    while (set.vectors.size() < n) {
        const double x = -3 + 6 * unit(rng), y = -3 + 6 * unit(rng);
        const double d = signed_distance(x, y);
        if (std::abs(d) < margin) continue;
        // keep the classes balanced
        const bool positive = d > 0;
        if (positive && pos >= (n + 1) / 2) continue;
        if (!positive && set.vectors.size() - pos >= n / 2) continue;
        pos += positive;
        set.vectors.push_back({Metric::count, {{0, x}, {1, y}}});
        set.labels.push_back(positive ? BinaryClass::positive : BinaryClass::negative);
    }
    return set;
}

double separable_2d_min_distance(const LabeledSet& set) {
    double best = INFINITY;
    for (std::size_t i = 0; i < set.vectors.size(); ++i) {
        const auto& e = set.vectors[i].entries;
        const double d = signed_distance(e[0].second, e[1].second) * sign_of(set.labels[i]);
        best = std::min(best, d);
    }
    return best;
}

LabeledSet sparse_random_set(std::size_t n, std::size_t dimension, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> truth(dimension);
    for (auto& w : truth) w = -1 + 2 * unit(rng);
    LabeledSet set;
    set.dimension = dimension;
    for (std::size_t p = 0; p < n; ++p) {
        FeatureVector x{Metric::count, {}};
        double score = 0;
        for (std::size_t j = 0; j < dimension; ++j) {
            if (unit(rng) > 0.2) continue;
            const double v = unit(rng) * 2;
            x.entries.emplace_back(static_cast<FeatureIndex>(j), v);
            score += truth[j] * v;
        }
        set.labels.push_back(score + 0.2 * (unit(rng) - 0.5) > 0 ? BinaryClass::positive : BinaryClass::negative);
        set.vectors.push_back(std::move(x));
    }
    return set;
}

GradientCheck finite_difference_check(const SVMModel& model, const LabeledSet& set, double lambda, std::size_t coords,
                                      std::uint64_t seed) {
    constexpr double h = 1e-6;
    const SvmGradient grad = svm_subgradient(model.weights, model.bias, set.vectors, set.labels, lambda);
    std::mt19937_64 rng(seed);
    GradientCheck out;

    std::vector<double> margins(set.vectors.size());
    for (std::size_t i = 0; i < set.vectors.size(); ++i)
        margins[i] = sign_of(set.labels[i]) * (dot(model.weights, set.vectors[i]) + model.bias);

    auto coordinate_value = [&](std::size_t i, std::size_t j) {
        for (const auto& [idx, v] : set.vectors[i].entries)
            if (idx == j) return v;
        return 0.0;
    };
    // index == dimension means the bias
    auto check = [&](std::size_t j) {
        for (std::size_t i = 0; i < set.vectors.size(); ++i) {
            const double x = j == set.dimension ? 1.0 : coordinate_value(i, j);
            if (std::abs(1.0 - margins[i]) <= 2 * h * std::abs(x)) {
                ++out.skipped;
                return;
            }
        }
        std::vector<double> w = model.weights;
        double b = model.bias;
        double& slot = j == set.dimension ? b : w[j];
        const double original = slot;
        slot = original + h;
        const double up = svm_objective(w, b, set.vectors, set.labels, lambda);
        slot = original - h;
        const double down = svm_objective(w, b, set.vectors, set.labels, lambda);
        const double numeric = (up - down) / (2 * h);
        const double analytic = j == set.dimension ? grad.bias : grad.weights[j];
        out.max_error = std::max(out.max_error, std::abs(numeric - analytic));
        ++out.checked;
    };
    for (std::size_t c = 0; c < coords; ++c) check(rng() % set.dimension);
    check(set.dimension);
    return out;
}

} // namespace opinion::testing
