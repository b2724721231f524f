#include "rignn/topics.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_set>

#include "rignn/rng.hpp"
#include "rignn/serialize.hpp"

namespace rignn::topics {
namespace {

constexpr char kModelMagic[4] = {'R', 'I', 'G', 'T'};
constexpr std::uint32_t kModelVersion = 1;

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words{
        "the", "and", "for", "are", "but", "not", "you", "all", "any", "can",
        "had", "her", "was", "one", "our", "out", "day", "get", "has", "him",
        "his", "how", "man", "new", "now", "old", "see", "two", "way", "who",
        "its", "did", "yes", "she", "may", "say", "each", "which", "their",
        "will", "about", "would", "there", "could", "other", "after", "first",
        "well", "also", "where", "much", "some", "these", "than", "then",
        "them", "this", "that", "with", "from", "have", "they", "been", "were",
        "when", "what", "your", "just", "very", "into", "over", "such", "only",
        "most", "more", "like", "because", "does", "don", "should", "it's",
    };
    return words;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& document) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 3 && !stopwords().count(cur)) tokens.push_back(cur);
        cur.clear();
    };
    for (unsigned char ch : document) {
        if (std::isalnum(ch))
            cur.push_back(static_cast<char>(std::tolower(ch)));
        else
            flush();
    }
    flush();
    return tokens;
}

TokenizedCorpus tokenize_corpus(const std::vector<std::string>& documents,
                                std::size_t max_tokens) {
    TokenizedCorpus corpus;
    for (const auto& doc : documents) {
        auto tokens = tokenize(doc);
        if (max_tokens && tokens.size() > max_tokens) tokens.resize(max_tokens);
        std::vector<std::uint32_t> ids;
        ids.reserve(tokens.size());
        for (auto& tok : tokens) {
            auto [it, inserted] =
                corpus.vocab.emplace(tok, static_cast<std::uint32_t>(corpus.words.size()));
            if (inserted) corpus.words.push_back(tok);
            ids.push_back(it->second);
        }
        corpus.docs.push_back(std::move(ids));
    }
    return corpus;
}

TopicModel fit_lda(const TokenizedCorpus& corpus, std::uint32_t num_topics,
                   double alpha, double beta, std::uint32_t sweeps,
                   std::uint64_t seed) {
    if (num_topics < 2) throw std::invalid_argument("num_topics must be >= 2");
    if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
    if (corpus.words.empty()) throw std::invalid_argument("empty vocabulary");

    TopicModel m;
    m.num_topics = num_topics;
    m.alpha = alpha;
    m.beta = beta;
    m.words = corpus.words;
    m.docs = corpus.docs;
    const std::size_t V = m.vocab_size();
    const std::size_t D = m.num_docs();
    m.topic_word_counts.assign(static_cast<std::size_t>(num_topics) * V, 0);
    m.topic_totals.assign(num_topics, 0);
    m.doc_topic_counts.assign(D * num_topics, 0);
    m.assignments.resize(D);

    Rng rng(seed);
    for (std::size_t d = 0; d < D; ++d) {
        m.assignments[d].resize(m.docs[d].size());
        for (std::size_t j = 0; j < m.docs[d].size(); ++j) {
            const auto t = static_cast<std::uint32_t>(rng.next_below(num_topics));
            m.assignments[d][j] = t;
            ++m.topic_word_counts[static_cast<std::size_t>(t) * V + m.docs[d][j]];
            ++m.topic_totals[t];
            ++m.doc_topic_counts[d * num_topics + t];
        }
    }

    std::vector<double> probs(num_topics);
    const double vbeta = static_cast<double>(V) * beta;
    for (std::uint32_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t d = 0; d < D; ++d) {
            for (std::size_t j = 0; j < m.docs[d].size(); ++j) {
                const std::uint32_t w = m.docs[d][j];
                const std::uint32_t old_t = m.assignments[d][j];
                --m.topic_word_counts[static_cast<std::size_t>(old_t) * V + w];
                --m.topic_totals[old_t];
                --m.doc_topic_counts[d * num_topics + old_t];

                double total = 0.0;
                for (std::uint32_t t = 0; t < num_topics; ++t) {
                    const double p =
                        (m.doc_topic_counts[d * num_topics + t] + alpha) *
                        (m.topic_word_counts[static_cast<std::size_t>(t) * V + w] + beta) /
                        (m.topic_totals[t] + vbeta);
                    probs[t] = p;
                    total += p;
                }
                const double u = rng.next_double() * total;
                double acc = 0.0;
                std::uint32_t new_t = num_topics - 1;
                for (std::uint32_t t = 0; t < num_topics; ++t) {
                    acc += probs[t];
                    if (u < acc) {
                        new_t = t;
                        break;
                    }
                }
                m.assignments[d][j] = new_t;
                ++m.topic_word_counts[static_cast<std::size_t>(new_t) * V + w];
                ++m.topic_totals[new_t];
                ++m.doc_topic_counts[d * num_topics + new_t];
            }
        }
    }

    m.dominant.resize(D);
    for (std::size_t d = 0; d < D; ++d) m.dominant[d] = assign_dominant(m, d);
    return m;
}

std::uint32_t assign_dominant(const TopicModel& model, std::size_t item) {
    if (item >= model.num_docs()) throw std::out_of_range("item index out of range");
    if (model.docs[item].empty()) return kNoReview;
    std::uint32_t best = 0;
    double best_score = model.dt(item, 0) + model.alpha;
    for (std::uint32_t t = 1; t < model.num_topics; ++t) {
        const double score = model.dt(item, t) + model.alpha;
        if (score > best_score) {
            best_score = score;
            best = t;
        }
    }
    return best;
}

void save_model(const TopicModel& m, const std::string& path) {
    io::Writer w(path);
    w.magic(kModelMagic, kModelVersion);
    w.u32(m.num_topics);
    w.f64(m.alpha);
    w.f64(m.beta);
    w.u64(m.words.size());
    for (const auto& word : m.words) w.str(word);
    w.u64(m.docs.size());
    for (const auto& d : m.docs) w.u32_vec(d);
    w.u32_vec(m.topic_word_counts);
    w.u32_vec(m.topic_totals);
    w.u32_vec(m.doc_topic_counts);
    for (const auto& a : m.assignments) w.u32_vec(a);
    w.u32_vec(m.dominant);
}

TopicModel load_model(const std::string& path) {
    io::Reader r(path);
    if (r.magic(kModelMagic) != kModelVersion)
        throw std::runtime_error("unsupported topic model version");
    TopicModel m;
    m.num_topics = r.u32();
    m.alpha = r.f64();
    m.beta = r.f64();
    m.words.resize(r.u64());
    for (auto& word : m.words) word = r.str();
    m.docs.resize(r.u64());
    for (auto& d : m.docs) d = r.u32_vec();
    m.topic_word_counts = r.u32_vec();
    m.topic_totals = r.u32_vec();
    m.doc_topic_counts = r.u32_vec();
    m.assignments.resize(m.docs.size());
    for (auto& a : m.assignments) a = r.u32_vec();
    m.dominant = r.u32_vec();
    return m;
}

}  // namespace rignn::topics
