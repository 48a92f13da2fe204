#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/sparse_index.hpp"
#include "cascade/types.hpp"

namespace cascade {

/// Rocchio mixing parameters. There is no negative (gamma) component:
/// pseudo-relevance feedback has no non-relevant set.
struct RocchioParams {
    double alpha = 1.0;          // original-query weight
    double beta = 0.75;          // feedback-centroid weight
    std::size_t feedback_depth = 10;  // documents taken from the first pass
    std::size_t max_terms = 128;      // terms kept in the expanded query

    void validate() const {
        if (alpha < 0.0 || beta < 0.0)
            throw std::invalid_argument("rocchio: alpha and beta must be >= 0");
        if (alpha + beta <= 0.0)
            throw std::invalid_argument("rocchio: alpha + beta must be > 0");
        if (feedback_depth < 1) throw std::invalid_argument("rocchio: feedback depth must be >= 1");
        if (max_terms < 1) throw std::invalid_argument("rocchio: max terms must be >= 1");
    }
};

/// q' = alpha * q + beta * centroid(feedback), truncated to the
/// `max_terms` highest-weight terms (ties by ascending term). The
/// centroid is the component-wise mean, so beta means the same thing at
/// any feedback depth. Every output weight is strictly positive.
inline SparseVector rocchio_expand(const SparseVector& query,
                                   const std::vector<SparseVector>& feedback,
                                   const RocchioParams& params) {
    params.validate();
    if (feedback.empty()) throw std::invalid_argument("rocchio: feedback must be non-empty");

    std::map<std::string, double> centroid;
    for (const auto& doc : feedback)
        for (const auto& [term, weight] : doc.weights) centroid[term] += weight;
    const double scale = params.beta / static_cast<double>(feedback.size());

    std::map<std::string, double> mixed;
    for (const auto& [term, weight] : query.weights) mixed[term] = params.alpha * weight;
    for (const auto& [term, sum] : centroid) mixed[term] += scale * sum;

    std::vector<std::pair<std::string, double>> terms;
    terms.reserve(mixed.size());
    for (auto& [term, weight] : mixed)
        if (weight > 0.0) terms.emplace_back(term, weight);
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (terms.size() > params.max_terms) terms.resize(params.max_terms);

    SparseVector expanded;
    expanded.id = query.id;
    for (auto& [term, weight] : terms) expanded.weights.emplace(std::move(term), weight);
    return expanded;
}

/// Two-pass retrieval: search, expand the query with the top feedback
/// documents, search again. An empty first pass degrades to plain search
/// so batch pipelines survive queries of unseen terms.
inline std::vector<ScoredHit> prf_search(const ImpactIndex& index, const SparseVector& query,
                                         std::size_t k, const RocchioParams& params) {
    params.validate();
    if (k < 1) throw std::invalid_argument("prf_search: k must be >= 1");
    auto first_pass = index.search(query, params.feedback_depth);
    if (first_pass.empty()) return index.search(query, k);
    std::vector<SparseVector> feedback;
    feedback.reserve(first_pass.size());
    for (const auto& hit : first_pass) feedback.push_back(index.forward_vector(hit.doc_id));
    return index.search(rocchio_expand(query, feedback, params), k);
}

inline Run batch_prf_search(const ImpactIndex& index, const std::vector<SparseVector>& queries,
                            std::size_t k, const RocchioParams& params, const std::string& tag,
                            unsigned threads = 1) {
    params.validate();
    return detail::batch_run(queries, tag, threads,
                             [&](const SparseVector& q) { return prf_search(index, q, k, params); });
}

}  // namespace cascade
