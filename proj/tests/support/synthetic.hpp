#pragma once

#include "opinion/corpus.hpp"
#include "opinion/pipeline.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace opinion::testing {

// Posts drawn from three class-conditional vocabularies. Each token comes from
// a vocabulary shared by all classes with probability `shared_fraction`, else
// from the class's own vocabulary. Words are stem + suffix so stemming has
// something to conflate; stop words and rule words are sprinkled in.
struct SyntheticOptions {
    std::size_t posts_per_class = 100;
    std::size_t stems_per_class = 15;
    std::size_t shared_stems = 15;
    double shared_fraction = 0.2;
    std::size_t min_length = 15;
    std::size_t max_length = 30;
    double stop_word_rate = 0.1;
    double rule_word_rate = 0.08;
    std::uint64_t seed = 2024;
};

Corpus make_synthetic_corpus(const SyntheticOptions& options = {});

// Stop, negatory and emphasizer words used by the generator.
Lexicons synthetic_lexicons();

// Same posts, labels permuted among labeled posts.
Corpus shuffle_labels(const Corpus& corpus, std::uint64_t seed);

// Random lowercase Cyrillic word of the given length range.
std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len);

} // namespace opinion::testing
