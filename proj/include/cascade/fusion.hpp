#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cascade/types.hpp"

namespace cascade {

/// How fuse_avg_norm treats a document a run did not retrieve: `zero`
/// contributes 0 with the full run count as divisor (CombSUM reading),
/// `skip` averages only over the runs that retrieved the document.
enum class MissingPolicy { zero, skip };

/// Per query, maps scores affinely so the best is 1 and the worst 0.
/// A query where every score is equal (including single-entry lists)
/// normalizes to 0.5 everywhere. Ranking order is untouched.
inline Run min_max_normalize(const Run& run) {
    Run out;
    out.tag = run.tag;
    for (const auto& [qid, entries] : run.queries) {
        if (entries.empty()) continue;
        double lo = entries.front().score, hi = entries.front().score;
        for (const auto& e : entries) {
            lo = std::min(lo, e.score);
            hi = std::max(hi, e.score);
        }
        std::vector<RunEntry> scaled;
        scaled.reserve(entries.size());
        for (const auto& e : entries)
            scaled.push_back({e.doc_id, hi == lo ? 0.5 : (e.score - lo) / (hi - lo)});
        out.queries.emplace(qid, std::move(scaled));
    }
    return out;
}

inline std::vector<Run> normalize_then(const std::vector<Run>& runs) {
    std::vector<Run> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(min_max_normalize(r));
    return out;
}

namespace detail {

inline std::set<std::string> query_universe(const std::vector<Run>& runs) {
    std::set<std::string> qids;
    for (const auto& r : runs)
        for (const auto& [qid, entries] : r.queries) qids.insert(qid);
    return qids;
}

}  // namespace detail

/// Average-normalized-score fusion: per query the candidate set is the
/// union over all runs, each run contributes its min-max-normalized
/// score, and the fused score is the mean under the missing policy.
inline Run fuse_avg_norm(const std::vector<Run>& runs, const std::string& tag,
                         MissingPolicy missing = MissingPolicy::zero,
                         std::size_t depth = 1000) {
    if (runs.empty()) throw ValidationError("fuse: need at least one input run");
    const std::vector<Run> normalized = normalize_then(runs);
    Run fused;
    fused.tag = tag;
    for (const auto& qid : detail::query_universe(normalized)) {
        std::map<std::string, std::pair<double, std::size_t>> acc;  // doc -> (sum, #runs seen)
        for (const auto& r : normalized) {
            auto it = r.queries.find(qid);
            if (it == r.queries.end()) continue;
            for (const auto& e : it->second) {
                auto& slot = acc[e.doc_id];
                slot.first += e.score;
                slot.second += 1;
            }
        }
        std::vector<RunEntry> entries;
        entries.reserve(acc.size());
        for (const auto& [doc_id, slot] : acc) {
            double divisor = missing == MissingPolicy::zero
                                 ? static_cast<double>(runs.size())
                                 : static_cast<double>(slot.second);
            entries.push_back({doc_id, slot.first / divisor});
        }
        sort_run_entries(entries);
        if (entries.size() > depth) entries.resize(depth);
        if (!entries.empty()) fused.queries.emplace(qid, std::move(entries));
    }
    return fused;
}

/// Condorcet fusion with Copeland scoring. A run prefers a over b when it
/// ranks a above b; a retrieved document beats a non-retrieved one; two
/// non-retrieved documents are mutually indifferent. A document's Copeland
/// score is (#documents it beats) - (#documents beating it), where
/// "beats" means strictly more runs prefer it. The emitted score is the
/// Copeland score rescaled per query to [0,1] (0.5 when all are equal),
/// so the output depends only on within-run orderings, never on score
/// magnitudes. Ties in Copeland score fall back to ascending doc_id.
inline Run condorcet_fuse(const std::vector<Run>& runs, const std::string& tag,
                          std::size_t depth = 1000) {
    if (runs.empty()) throw ValidationError("fuse: need at least one input run");
    Run fused;
    fused.tag = tag;
    for (const auto& qid : detail::query_universe(runs)) {
        std::set<std::string> candidate_set;
        std::vector<std::unordered_map<std::string, std::size_t>> rank_of(runs.size());
        for (std::size_t r = 0; r < runs.size(); ++r) {
            auto it = runs[r].queries.find(qid);
            if (it == runs[r].queries.end()) continue;
            for (std::size_t pos = 0; pos < it->second.size(); ++pos) {
                const auto& doc = it->second[pos].doc_id;
                candidate_set.insert(doc);
                rank_of[r].emplace(doc, pos);
            }
        }
        std::vector<std::string> docs(candidate_set.begin(), candidate_set.end());
        const std::size_t n = docs.size();
        std::vector<int> copeland(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                int prefer_i = 0, prefer_j = 0;
                for (std::size_t r = 0; r < runs.size(); ++r) {
                    auto it_i = rank_of[r].find(docs[i]);
                    auto it_j = rank_of[r].find(docs[j]);
                    bool has_i = it_i != rank_of[r].end();
                    bool has_j = it_j != rank_of[r].end();
                    if (has_i && has_j)
                        (it_i->second < it_j->second ? prefer_i : prefer_j) += 1;
                    else if (has_i)
                        prefer_i += 1;
                    else if (has_j)
                        prefer_j += 1;
                }
                if (prefer_i > prefer_j) {
                    copeland[i] += 1;
                    copeland[j] -= 1;
                } else if (prefer_j > prefer_i) {
                    copeland[j] += 1;
                    copeland[i] -= 1;
                }
            }
        }
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        // docs[] is already doc_id-ascending, so a stable sort on the
        // Copeland key yields (copeland desc, doc_id asc).
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return copeland[a] > copeland[b]; });
        int lo = 0, hi = 0;
        if (n > 0) {
            lo = *std::min_element(copeland.begin(), copeland.end());
            hi = *std::max_element(copeland.begin(), copeland.end());
        }
        std::vector<RunEntry> entries;
        entries.reserve(n);
        for (std::size_t i : order) {
            double score = hi == lo ? 0.5 : static_cast<double>(copeland[i] - lo) / (hi - lo);
            entries.push_back({docs[i], score});
        }
        if (entries.size() > depth) entries.resize(depth);
        if (!entries.empty()) fused.queries.emplace(qid, std::move(entries));
    }
    return fused;
}

}  // namespace cascade
