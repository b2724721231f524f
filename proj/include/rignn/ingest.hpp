#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

namespace rignn::ingest {

struct Interaction {
    std::string user_id;
    std::string item_id;
    std::int64_t timestamp = 0;  // seconds since epoch, > 0
    std::string review_text;
};

struct Session {
    std::vector<std::uint32_t> items;  // dense indices, chronological
    std::int64_t start_time = 0;
};

struct ItemCatalog {
    std::unordered_map<std::string, std::uint32_t> index_of;
    std::vector<std::string> ids;         // index -> original item id
    std::vector<std::string> review_doc;  // index -> concatenated reviews
    std::size_t size() const { return ids.size(); }
};

struct SequenceExample {
    std::vector<std::uint32_t> prefix;
    std::uint32_t label = 0;
};

struct ParseResult {
    std::vector<Interaction> interactions;
    std::size_t error_count = 0;
};

// Newline-delimited JSON records with reviewerID, asin, unixReviewTime and
// optional reviewText. Malformed lines are counted and skipped.
ParseResult parse_reviews(std::istream& in);
// Dispatches on a .gz suffix.
ParseResult parse_reviews_file(const std::string& path);

// Single pass over the original counts; surviving items appeared
// >= min_count times in the input multiset.
std::vector<Interaction> filter_min_count(const std::vector<Interaction>& in,
                                          std::size_t min_count);

// Dense indices in first-occurrence order; review docs concatenated in
// timestamp order (ties keep input order).
ItemCatalog build_catalog(const std::vector<Interaction>& in);

// Per user: sort by timestamp, partition into epoch-anchored fixed windows.
// Output sorted by (user_id, start_time). Length-1 sessions are kept.
std::vector<Session> build_sessions(const std::vector<Interaction>& in,
                                    const ItemCatalog& catalog,
                                    std::int64_t window_seconds);

struct Split {
    std::vector<Session> train;
    std::vector<Session> test;
};

// Test = sessions whose start_time is within 365 days of the corpus
// maximum (inclusive). Test items never seen in train are removed; test
// sessions left with < 2 items are dropped.
Split split_train_test(const std::vector<Session>& sessions);

// Case 1 needs n >= 2, Case 2 needs n >= 6; shorter sessions yield nothing.
std::vector<SequenceExample> sequence_split(const Session& s, int case_id);

struct Bundle {
    ItemCatalog catalog;
    std::vector<Session> train;
    std::vector<Session> test;
    int case_id = 1;
    std::uint32_t min_count = 5;
    std::int64_t window_seconds = 7 * 86400;
};

void save_bundle(const Bundle& b, const std::string& path);
Bundle load_bundle(const std::string& path);

struct CorpusStats {
    std::size_t interactions = 0;       // sum of session lengths
    std::size_t train_sessions = 0;     // before sequence splitting
    std::size_t test_sessions = 0;
    std::size_t train_examples = 0;     // after sequence splitting
    std::size_t test_examples = 0;
    std::size_t items = 0;
    double mean_session_length = 0.0;
};

CorpusStats compute_stats(const Bundle& b);

}  // namespace rignn::ingest
