#pragma once
// Shared helpers for the unit tests: resource paths, bundled resources, random generators.

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "mwv/features.hpp"
#include "mwv/rng.hpp"
#include "mwv/text/lexdb.hpp"
#include "mwv/text/pos.hpp"
#include "mwv/text/sentiment.hpp"
#include "mwv/text/stopwords.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return MWV_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::filesystem::path test_data() { return MWV_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return MWV_GOLDEN_DIR; }

struct Bundled {
    mwv::text::StopwordList stopwords = mwv::text::StopwordList::load_file(data_dir() / "stopwords.txt");
    mwv::text::SentimentLexicon lexicon = mwv::text::SentimentLexicon::load_file(data_dir() / "sentiment_lexicon.tsv");
    mwv::text::PosTagger tagger = mwv::text::PosTagger::load_file(data_dir() / "pos_lexicon.tsv");
    mwv::text::LexicalDatabase lexdb = mwv::text::LexicalDatabase::load_directory(data_dir() / "lexdb");
    mwv::features::FakePhraseCorpus corpus = mwv::features::FakePhraseCorpus::bundled();

    mwv::features::FeatureContext context() const { return {stopwords, lexicon, tagger, lexdb, corpus}; }
};

inline const Bundled& bundled() {
    static const Bundled b;
    return b;
}

// Lowercase word of 1..max_len letters from a small alphabet, so collisions happen.
inline std::string random_word(mwv::Rng& rng, std::size_t max_len = 4, std::string_view alphabet = "abcdefgh") {
    const std::size_t len = 1 + rng.below(max_len);
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w += alphabet[rng.below(alphabet.size())];
    return w;
}

inline std::vector<std::string> random_words(mwv::Rng& rng, std::size_t max_count, std::size_t max_len = 4) {
    std::vector<std::string> out;
    const std::size_t n = rng.below(max_count + 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_word(rng, max_len));
    return out;
}

inline std::string scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("mwv_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

}  // namespace testing
