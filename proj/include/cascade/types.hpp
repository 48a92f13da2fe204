#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

/// Base class for all toolkit errors. `line()` is the 1-based input line
/// the error refers to, or 0 when no line applies.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Malformed input: wrong field counts, unparsable numbers, bad JSON.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input violating an invariant: duplicates, conflicts,
/// negative weights, mismatched query sets.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem and stream failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Bag of weighted terms, the interchange form of all encoder output.
/// All stored weights are strictly positive; an empty map is a valid
/// (never-matching) vector.
struct SparseVector {
    std::string id;
    std::map<std::string, double> weights;

    bool operator==(const SparseVector&) const = default;
};

/// One retrieved document within a query's list. The rank is implicit:
/// entry i of a canonical list has rank i+1.
struct RunEntry {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const RunEntry&) const = default;
};

/// Canonical run order: descending score, ties by ascending doc_id.
inline bool run_order_less(const RunEntry& a, const RunEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

inline void sort_run_entries(std::vector<RunEntry>& entries) {
    std::sort(entries.begin(), entries.end(), run_order_less);
}

/// Per-query ranked lists plus the run tag. Entries within a query are
/// kept in canonical order and no (query, doc) pair appears twice.
struct Run {
    std::string tag;
    std::map<std::string, std::vector<RunEntry>> queries;

    bool operator==(const Run&) const = default;
};

/// query_id -> doc_id -> relevance grade (non-negative integer).
using Qrels = std::map<std::string, std::map<std::string, int>>;

}  // namespace cascade
