#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cascade/detail/parallel.hpp"
#include "cascade/trec_io.hpp"
#include "cascade/types.hpp"

namespace cascade {

/// One (document, weight) pair in a posting list. Impacts are stored as
/// 32-bit floats; scoring accumulates in 64-bit.
struct Posting {
    std::uint32_t doc = 0;  // ordinal into the collection
    float impact = 0.0f;    // > 0
};

struct PostingList {
    std::vector<Posting> postings;  // ascending doc ordinal
    float max_impact = 0.0f;
};

struct ScoredHit {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const ScoredHit&) const = default;
};

/// Term-partitioned inverted index over a sparse-vector collection,
/// immutable after build and safe for concurrent readers. Scoring is the
/// exact inner product of query and document weights; retrieval is
/// exhaustive term-at-a-time, so results never depend on k beyond
/// truncation.
class ImpactIndex {
public:
    std::size_t size() const { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::map<std::string, PostingList>& postings() const { return postings_; }

    float max_impact(const std::string& term) const {
        auto it = postings_.find(term);
        return it == postings_.end() ? 0.0f : it->second.max_impact;
    }

    bool has_forward() const { return has_forward_; }

    /// Original vector of a document, available only when the index was
    /// built with forward storage.
    const SparseVector& forward_vector(const std::string& doc_id) const {
        if (!has_forward_)
            throw ValidationError("index was built without forward vectors; rebuild with "
                                  "forward storage to use feedback");
        auto it = ordinal_of_.find(doc_id);
        if (it == ordinal_of_.end())
            throw ValidationError("document '" + doc_id + "' is not in the collection");
        return forward_[it->second];
    }

    /// Exact top-k by dot product: descending score, ties by ascending
    /// doc_id. Only documents sharing at least one query term appear.
    std::vector<ScoredHit> search(const SparseVector& query, std::size_t k) const {
        if (k < 1) throw std::invalid_argument("search: k must be >= 1");
        std::vector<double> acc(doc_ids_.size(), 0.0);
        std::vector<std::uint32_t> touched;
        std::vector<char> seen(doc_ids_.size(), 0);
        for (const auto& [term, query_weight] : query.weights) {
            auto it = postings_.find(term);
            if (it == postings_.end()) continue;
            for (const Posting& p : it->second.postings) {
                acc[p.doc] += query_weight * static_cast<double>(p.impact);
                if (!seen[p.doc]) {
                    seen[p.doc] = 1;
                    touched.push_back(p.doc);
                }
            }
        }
        std::sort(touched.begin(), touched.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (acc[a] != acc[b]) return acc[a] > acc[b];
            return doc_ids_[a] < doc_ids_[b];
        });
        if (touched.size() > k) touched.resize(k);
        std::vector<ScoredHit> hits;
        hits.reserve(touched.size());
        for (std::uint32_t doc : touched) hits.push_back({doc_ids_[doc], acc[doc]});
        return hits;
    }

    void save(const std::filesystem::path& dir) const;
    static ImpactIndex load(const std::filesystem::path& dir);

private:
    friend class IndexBuilder;

    std::vector<std::string> doc_ids_;                      // ordinal -> id
    std::unordered_map<std::string, std::uint32_t> ordinal_of_;
    std::map<std::string, PostingList> postings_;
    std::vector<SparseVector> forward_;                     // empty unless has_forward_
    bool has_forward_ = false;
};

/// Single-writer builder; documents get ordinals in arrival order, which
/// keeps posting lists sorted without an extra pass.
class IndexBuilder {
public:
    explicit IndexBuilder(bool store_forward = true) { index_.has_forward_ = store_forward; }

    void add(SparseVector vector) {
        auto ordinal = static_cast<std::uint32_t>(index_.doc_ids_.size());
        auto [it, inserted] = index_.ordinal_of_.emplace(vector.id, ordinal);
        if (!inserted) throw ValidationError("duplicate document id '" + vector.id + "'");
        for (const auto& [term, weight] : vector.weights) {
            auto& list = index_.postings_[term];
            float impact = static_cast<float>(weight);
            list.postings.push_back({ordinal, impact});
            list.max_impact = std::max(list.max_impact, impact);
        }
        index_.doc_ids_.push_back(vector.id);
        if (index_.has_forward_) index_.forward_.push_back(std::move(vector));
    }

    ImpactIndex build() { return std::move(index_); }

private:
    ImpactIndex index_;
};

inline ImpactIndex build_index(const std::vector<SparseVector>& vectors,
                               bool store_forward = true) {
    IndexBuilder builder(store_forward);
    for (const auto& v : vectors) builder.add(v);
    return builder.build();
}

inline ImpactIndex build_index(VectorReader& reader, bool store_forward = true) {
    IndexBuilder builder(store_forward);
    while (auto v = reader.next()) builder.add(std::move(*v));
    return builder.build();
}

namespace detail {

/// Shared shape of batch_search and batch_prf_search: check query ids,
/// run one search per query on worker threads, then assemble the Run in
/// query-id order so scheduling never shows in the output.
template <typename SearchFn>
inline Run batch_run(const std::vector<SparseVector>& queries, const std::string& tag,
                     unsigned threads, SearchFn&& per_query) {
    std::unordered_set<std::string> ids;
    for (const auto& q : queries)
        if (!ids.insert(q.id).second)
            throw ValidationError("duplicate query id '" + q.id + "'");
    std::vector<std::vector<ScoredHit>> results(queries.size());
    parallel_for(queries.size(), threads,
                 [&](std::size_t i) { results[i] = per_query(queries[i]); });
    Run run;
    run.tag = tag;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (results[i].empty()) continue;
        auto& entries = run.queries[queries[i].id];
        entries.reserve(results[i].size());
        for (auto& hit : results[i]) entries.push_back({std::move(hit.doc_id), hit.score});
    }
    return run;
}

}  // namespace detail

/// Searches every query and assembles a tagged Run. Output is identical
/// to a sequential per-query loop for any thread count.
inline Run batch_search(const ImpactIndex& index, const std::vector<SparseVector>& queries,
                        std::size_t k, const std::string& tag, unsigned threads = 1) {
    return detail::batch_run(queries, tag, threads,
                             [&](const SparseVector& q) { return index.search(q, k); });
}

// ---------------------------------------------------------------------------
// On-disk format: single file `impact.idx` inside the index directory.
// Magic + format version up front; loading anything else fails loudly.

namespace detail {

constexpr char kIndexMagic[8] = {'C', 'A', 'S', 'C', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kIndexFormatVersion = 1;
constexpr const char* kIndexFileName = "impact.idx";

template <typename T>
inline void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
inline T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError("truncated index file");
    return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    auto size = read_pod<std::uint32_t>(in);
    std::string s(size, '\0');
    in.read(s.data(), size);
    if (!in) throw IoError("truncated index file");
    return s;
}

}  // namespace detail

inline void ImpactIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    auto path = dir / detail::kIndexFileName;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(detail::kIndexMagic, sizeof(detail::kIndexMagic));
    detail::write_pod<std::uint32_t>(out, detail::kIndexFormatVersion);
    detail::write_pod<std::uint64_t>(out, doc_ids_.size());
    for (const auto& id : doc_ids_) detail::write_string(out, id);
    detail::write_pod<std::uint64_t>(out, postings_.size());
    for (const auto& [term, list] : postings_) {
        detail::write_string(out, term);
        detail::write_pod<float>(out, list.max_impact);
        detail::write_pod<std::uint64_t>(out, list.postings.size());
        for (const Posting& p : list.postings) {
            detail::write_pod<std::uint32_t>(out, p.doc);
            detail::write_pod<float>(out, p.impact);
        }
    }
    detail::write_pod<std::uint8_t>(out, has_forward_ ? 1 : 0);
    if (has_forward_) {
        for (const auto& vec : forward_) {
            detail::write_pod<std::uint64_t>(out, vec.weights.size());
            for (const auto& [term, weight] : vec.weights) {
                detail::write_string(out, term);
                detail::write_pod<double>(out, weight);
            }
        }
    }
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

inline ImpactIndex ImpactIndex::load(const std::filesystem::path& dir) {
    auto path = dir / detail::kIndexFileName;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file '" + path.string() + "'");
    char magic[sizeof(detail::kIndexMagic)] = {};
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(detail::kIndexMagic)))
        throw ValidationError("'" + path.string() + "' is not an impact index");
    auto version = detail::read_pod<std::uint32_t>(in);
    if (version != detail::kIndexFormatVersion)
        throw ValidationError("index format version " + std::to_string(version) +
                              " is not supported (expected " +
                              std::to_string(detail::kIndexFormatVersion) + ")");
    ImpactIndex index;
    auto doc_count = detail::read_pod<std::uint64_t>(in);
    index.doc_ids_.reserve(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        index.doc_ids_.push_back(detail::read_string(in));
        index.ordinal_of_.emplace(index.doc_ids_.back(), static_cast<std::uint32_t>(i));
    }
    auto term_count = detail::read_pod<std::uint64_t>(in);
    for (std::uint64_t t = 0; t < term_count; ++t) {
        std::string term = detail::read_string(in);
        PostingList list;
        list.max_impact = detail::read_pod<float>(in);
        auto posting_count = detail::read_pod<std::uint64_t>(in);
        list.postings.reserve(posting_count);
        for (std::uint64_t p = 0; p < posting_count; ++p) {
            Posting posting;
            posting.doc = detail::read_pod<std::uint32_t>(in);
            posting.impact = detail::read_pod<float>(in);
            list.postings.push_back(posting);
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    index.has_forward_ = detail::read_pod<std::uint8_t>(in) != 0;
    if (index.has_forward_) {
        index.forward_.reserve(doc_count);
        for (std::uint64_t i = 0; i < doc_count; ++i) {
            SparseVector vec;
            vec.id = index.doc_ids_[i];
            auto term_total = detail::read_pod<std::uint64_t>(in);
            for (std::uint64_t t = 0; t < term_total; ++t) {
                std::string term = detail::read_string(in);
                vec.weights.emplace(std::move(term), detail::read_pod<double>(in));
            }
            index.forward_.push_back(std::move(vec));
        }
    }
    return index;
}

}  // namespace cascade
