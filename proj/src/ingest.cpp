#include "rignn/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

#include "json.hpp"
#include "rignn/serialize.hpp"

namespace rignn::ingest {
namespace {

constexpr char kBundleMagic[4] = {'R', 'I', 'G', 'B'};
constexpr std::uint32_t kBundleVersion = 1;

std::string gunzip_file(const std::string& path) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw std::runtime_error("cannot open gzip file: " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0) out.append(buf, n);
    const bool bad = (n < 0);
    gzclose(gz);
    if (bad) throw std::runtime_error("gzip read error: " + path);
    return out;
}

}  // namespace

ParseResult parse_reviews(std::istream& in) {
    if (!in) throw std::runtime_error("unreadable input stream");
    ParseResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded() || !doc.is_object() ||
            !doc.contains("reviewerID") || !doc["reviewerID"].is_string() ||
            !doc.contains("asin") || !doc["asin"].is_string() ||
            !doc.contains("unixReviewTime") ||
            !doc["unixReviewTime"].is_number_integer()) {
            ++result.error_count;
            continue;
        }
        Interaction it;
        it.user_id = doc["reviewerID"].get<std::string>();
        it.item_id = doc["asin"].get<std::string>();
        it.timestamp = doc["unixReviewTime"].get<std::int64_t>();
        if (doc.contains("reviewText") && doc["reviewText"].is_string())
            it.review_text = doc["reviewText"].get<std::string>();
        if (it.item_id.empty() || it.timestamp <= 0) {
            ++result.error_count;
            continue;
        }
        result.interactions.push_back(std::move(it));
    }
    return result;
}

ParseResult parse_reviews_file(const std::string& path) {
    if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
        std::istringstream in(gunzip_file(path));
        return parse_reviews(in);
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input: " + path);
    return parse_reviews(in);
}

std::vector<Interaction> filter_min_count(const std::vector<Interaction>& in,
                                          std::size_t min_count) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& it : in) ++counts[it.item_id];
    std::vector<Interaction> out;
    for (const auto& it : in)
        if (counts[it.item_id] >= min_count) out.push_back(it);
    return out;
}

ItemCatalog build_catalog(const std::vector<Interaction>& in) {
    ItemCatalog cat;
    for (const auto& it : in) {
        if (cat.index_of.emplace(it.item_id, cat.ids.size()).second) {
            cat.ids.push_back(it.item_id);
            cat.review_doc.emplace_back();
        }
    }
    // reviews concatenated in timestamp order, stable on ties
    std::vector<std::size_t> order(in.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return in[a].timestamp < in[b].timestamp;
    });
    for (std::size_t i : order) {
        if (in[i].review_text.empty()) continue;
        std::string& doc = cat.review_doc[cat.index_of.at(in[i].item_id)];
        if (!doc.empty()) doc += '\n';
        doc += in[i].review_text;
    }
    return cat;
}

std::vector<Session> build_sessions(const std::vector<Interaction>& in,
                                    const ItemCatalog& catalog,
                                    std::int64_t window_seconds) {
    if (window_seconds <= 0) throw std::invalid_argument("window must be > 0");
    // user -> window bin -> interactions, ordered maps for deterministic output
    std::map<std::string, std::map<std::int64_t, std::vector<std::size_t>>> bins;
    for (std::size_t i = 0; i < in.size(); ++i)
        bins[in[i].user_id][in[i].timestamp / window_seconds].push_back(i);
    std::vector<Session> sessions;
    for (auto& [user, windows] : bins) {
        for (auto& [win, idxs] : windows) {
            std::stable_sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
                return in[a].timestamp < in[b].timestamp;
            });
            Session s;
            s.start_time = in[idxs.front()].timestamp;
            for (std::size_t i : idxs)
                s.items.push_back(catalog.index_of.at(in[i].item_id));
            sessions.push_back(std::move(s));
        }
    }
    return sessions;
}

Split split_train_test(const std::vector<Session>& sessions) {
    Split split;
    if (sessions.empty()) return split;
    std::int64_t max_start = sessions.front().start_time;
    for (const auto& s : sessions) max_start = std::max(max_start, s.start_time);
    const std::int64_t cutoff = max_start - 365ll * 86400;
    std::vector<bool> seen_in_train;
    for (const auto& s : sessions)
        if (s.start_time < cutoff)
            for (auto v : s.items) {
                if (v >= seen_in_train.size()) seen_in_train.resize(v + 1, false);
                seen_in_train[v] = true;
            }
    for (const auto& s : sessions) {
        if (s.start_time < cutoff) {
            split.train.push_back(s);
            continue;
        }
        Session t;
        t.start_time = s.start_time;
        for (auto v : s.items)
            if (v < seen_in_train.size() && seen_in_train[v]) t.items.push_back(v);
        if (t.items.size() >= 2) split.test.push_back(std::move(t));
    }
    return split;
}

std::vector<SequenceExample> sequence_split(const Session& s, int case_id) {
    if (case_id != 1 && case_id != 2) throw std::invalid_argument("case must be 1 or 2");
    const std::size_t n = s.items.size();
    const std::size_t min_len = (case_id == 1) ? 2 : 6;
    std::vector<SequenceExample> out;
    if (n < min_len) return out;
    for (std::size_t end = 1; end < n; ++end) {
        SequenceExample ex;
        ex.prefix.assign(s.items.begin(), s.items.begin() + end);
        ex.label = s.items[end];
        out.push_back(std::move(ex));
    }
    return out;
}

namespace {

void write_sessions(io::Writer& w, const std::vector<Session>& ss) {
    w.u64(ss.size());
    for (const auto& s : ss) {
        w.i64(s.start_time);
        w.u32_vec(s.items);
    }
}

std::vector<Session> read_sessions(io::Reader& r) {
    std::vector<Session> ss(r.u64());
    for (auto& s : ss) {
        s.start_time = r.i64();
        s.items = r.u32_vec();
    }
    return ss;
}

}  // namespace

void save_bundle(const Bundle& b, const std::string& path) {
    io::Writer w(path);
    w.magic(kBundleMagic, kBundleVersion);
    w.u32(static_cast<std::uint32_t>(b.case_id));
    w.u32(b.min_count);
    w.i64(b.window_seconds);
    w.u64(b.catalog.size());
    for (std::size_t i = 0; i < b.catalog.size(); ++i) {
        w.str(b.catalog.ids[i]);
        w.str(b.catalog.review_doc[i]);
    }
    write_sessions(w, b.train);
    write_sessions(w, b.test);
}

Bundle load_bundle(const std::string& path) {
    io::Reader r(path);
    if (r.magic(kBundleMagic) != kBundleVersion)
        throw std::runtime_error("unsupported bundle version");
    Bundle b;
    b.case_id = static_cast<int>(r.u32());
    b.min_count = r.u32();
    b.window_seconds = r.i64();
    const std::size_t m = r.u64();
    for (std::size_t i = 0; i < m; ++i) {
        std::string id = r.str();
        b.catalog.index_of.emplace(id, static_cast<std::uint32_t>(i));
        b.catalog.ids.push_back(std::move(id));
        b.catalog.review_doc.push_back(r.str());
    }
    b.train = read_sessions(r);
    b.test = read_sessions(r);
    return b;
}

CorpusStats compute_stats(const Bundle& b) {
    CorpusStats st;
    st.items = b.catalog.size();
    st.train_sessions = b.train.size();
    st.test_sessions = b.test.size();
    std::size_t total_len = 0;
    for (const auto& s : b.train) {
        total_len += s.items.size();
        st.train_examples += sequence_split(s, b.case_id).size();
    }
    for (const auto& s : b.test) {
        total_len += s.items.size();
        st.test_examples += sequence_split(s, b.case_id).size();
    }
    st.interactions = total_len;
    const std::size_t n_sessions = b.train.size() + b.test.size();
    st.mean_session_length =
        n_sessions ? static_cast<double>(total_len) / static_cast<double>(n_sessions) : 0.0;
    return st;
}

}  // namespace rignn::ingest
