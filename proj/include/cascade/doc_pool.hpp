#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "cascade/types.hpp"

namespace cascade {

/// Resolves passage ids to document ids, either through an explicit map
/// or by the MS MARCO v2 style suffix convention: a trailing "#<integer>"
/// is stripped, and ids without one map to themselves.
class PassageMapping {
public:
    /// Suffix convention (the default when no mapping file is given).
    PassageMapping() = default;

    static PassageMapping explicit_map(std::map<std::string, std::string> mapping) {
        PassageMapping m;
        m.explicit_ = true;
        m.map_ = std::move(mapping);
        return m;
    }

    bool is_explicit() const { return explicit_; }

    std::string resolve(const std::string& passage_id) const {
        if (explicit_) {
            auto it = map_.find(passage_id);
            if (it == map_.end())
                throw ValidationError("passage '" + passage_id + "' missing from the mapping");
            return it->second;
        }
        return strip_suffix(passage_id);
    }

    static std::string strip_suffix(const std::string& passage_id) {
        auto hash = passage_id.rfind('#');
        if (hash == std::string::npos || hash + 1 == passage_id.size()) return passage_id;
        for (std::size_t i = hash + 1; i < passage_id.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(passage_id[i]))) return passage_id;
        return passage_id.substr(0, hash);
    }

private:
    bool explicit_ = false;
    std::map<std::string, std::string> map_;
};

/// Turns a passage-level run into a document-level run: per query, a
/// document's score is the maximum over its passages. Idempotent on runs
/// whose ids already name documents.
inline Run pool_run(const Run& run, const PassageMapping& mapping, const std::string& tag,
                    std::size_t k = 1000) {
    Run pooled;
    pooled.tag = tag;
    for (const auto& [qid, entries] : run.queries) {
        std::map<std::string, double> best;
        for (const auto& e : entries) {
            std::string doc = mapping.resolve(e.doc_id);
            auto [it, inserted] = best.emplace(std::move(doc), e.score);
            if (!inserted && e.score > it->second) it->second = e.score;
        }
        std::vector<RunEntry> docs;
        docs.reserve(best.size());
        for (const auto& [doc_id, score] : best) docs.push_back({doc_id, score});
        sort_run_entries(docs);
        if (docs.size() > k) docs.resize(k);
        if (!docs.empty()) pooled.queries.emplace(qid, std::move(docs));
    }
    return pooled;
}

}  // namespace cascade
