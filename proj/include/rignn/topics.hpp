#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace rignn::topics {

inline constexpr std::uint32_t kNoReview = 0xFFFFFFFFu;

struct TokenizedCorpus {
    std::unordered_map<std::string, std::uint32_t> vocab;
    std::vector<std::string> words;                   // word index -> token
    std::vector<std::vector<std::uint32_t>> docs;     // aligned to item indices
};

// Lowercase, split on non-alphanumeric runs, drop tokens shorter than 3
// characters and stopwords.
std::vector<std::string> tokenize(const std::string& document);

// max_tokens truncates each document after tokenization (0 = unlimited).
TokenizedCorpus tokenize_corpus(const std::vector<std::string>& documents,
                                std::size_t max_tokens = 256);

struct TopicModel {
    std::uint32_t num_topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<std::string> words;
    std::vector<std::vector<std::uint32_t>> docs;
    std::vector<std::uint32_t> topic_word_counts;  // T x V
    std::vector<std::uint32_t> topic_totals;       // T
    std::vector<std::uint32_t> doc_topic_counts;   // m x T
    std::vector<std::vector<std::uint32_t>> assignments;  // per-token topics
    std::vector<std::uint32_t> dominant;           // per item, or kNoReview

    std::size_t vocab_size() const { return words.size(); }
    std::size_t num_docs() const { return docs.size(); }
    std::uint32_t tw(std::uint32_t t, std::uint32_t w) const {
        return topic_word_counts[static_cast<std::size_t>(t) * vocab_size() + w];
    }
    std::uint32_t dt(std::size_t d, std::uint32_t t) const {
        return doc_topic_counts[d * num_topics + t];
    }
};

// Collapsed Gibbs sampling, fully determined by the seed. Documents with
// no tokens keep an empty assignment list and a kNoReview dominant topic.
TopicModel fit_lda(const TokenizedCorpus& corpus, std::uint32_t num_topics,
                   double alpha, double beta, std::uint32_t sweeps,
                   std::uint64_t seed);

// Argmax of count + alpha; ties break to the lowest topic id.
std::uint32_t assign_dominant(const TopicModel& model, std::size_t item);

void save_model(const TopicModel& m, const std::string& path);
TopicModel load_model(const std::string& path);

}  // namespace rignn::topics
