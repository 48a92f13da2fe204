#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cascade/types.hpp"

namespace cascade {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(std::move(f));
    return fields;
}

inline bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

inline long parse_int(const std::string& s, const char* what, std::size_t line) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(std::string("unparsable ") + what + " '" + s + "'", line);
    return value;
}

inline double parse_real(const std::string& s, const char* what, std::size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(std::string("unparsable ") + what + " '" + s + "'", line);
    return value;
}

inline bool is_q0(const std::string& s) {
    return s.size() == 2 && (s[0] == 'Q' || s[0] == 'q') && s[1] == '0';
}

}  // namespace detail

/// Parses a TREC run file: `qid Q0 docid rank score tag` per line.
/// Input order is irrelevant; entries are re-sorted into canonical order
/// and re-ranked. One stream holds one run: a change of tag mid-file is
/// an error.
inline Run parse_run(std::istream& in) {
    Run run;
    std::unordered_map<std::string, std::unordered_set<std::string>> seen;
    std::string line;
    std::size_t lineno = 0;
    bool have_tag = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        auto fields = detail::split_ws(line);
        if (fields.size() != 6)
            throw ParseError("expected 6 fields, got " + std::to_string(fields.size()), lineno);
        if (!detail::is_q0(fields[1]))
            throw ParseError("expected literal Q0, got '" + fields[1] + "'", lineno);
        long rank = detail::parse_int(fields[3], "rank", lineno);
        if (rank < 1) throw ParseError("rank must be >= 1, got " + fields[3], lineno);
        double score = detail::parse_real(fields[4], "score", lineno);
        if (!std::isfinite(score))
            throw ParseError("non-finite score '" + fields[4] + "'", lineno);
        if (!have_tag) {
            run.tag = fields[5];
            have_tag = true;
        } else if (fields[5] != run.tag) {
            throw ParseError("run tag changed from '" + run.tag + "' to '" + fields[5] + "'",
                             lineno);
        }
        if (!seen[fields[0]].insert(fields[2]).second)
            throw ValidationError("duplicate document '" + fields[2] + "' for query '" +
                                      fields[0] + "'",
                                  lineno);
        run.queries[fields[0]].push_back({fields[2], score});
    }
    for (auto& [qid, entries] : run.queries) sort_run_entries(entries);
    return run;
}

/// Writes a run in TREC format, queries in ascending lexicographic order,
/// scores at 6 decimal digits.
inline void write_run(const Run& run, std::ostream& out) {
    char score_buf[64];
    for (const auto& [qid, entries] : run.queries) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            std::snprintf(score_buf, sizeof(score_buf), "%.6f", entries[i].score);
            out << qid << " Q0 " << entries[i].doc_id << ' ' << i + 1 << ' ' << score_buf << ' '
                << run.tag << '\n';
        }
    }
    if (out.fail()) throw IoError("failed to write run '" + run.tag + "'");
}

struct QrelsParseResult {
    Qrels qrels;
    std::size_t clamped_grades = 0;  // negative grades clamped to 0
};

/// Parses qrels: `qid iteration docid grade` per line. The iteration field
/// is ignored. Negative grades clamp to 0 and are counted rather than
/// rejected; TREC qrels occasionally carry -1.
inline QrelsParseResult parse_qrels(std::istream& in) {
    QrelsParseResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        auto fields = detail::split_ws(line);
        if (fields.size() != 4)
            throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), lineno);
        long grade = detail::parse_int(fields[3], "grade", lineno);
        if (grade < 0) {
            grade = 0;
            ++result.clamped_grades;
        }
        auto& docs = result.qrels[fields[0]];
        if (!docs.emplace(fields[2], static_cast<int>(grade)).second)
            throw ValidationError("duplicate judgment for query '" + fields[0] + "' doc '" +
                                      fields[2] + "'",
                                  lineno);
    }
    return result;
}

/// Streaming reader over line-delimited JSON sparse vectors:
///   {"id": "<string>", "vector": {"<term>": <number>, ...}}
/// Zero weights are dropped, negative weights rejected. Vectors come back
/// in file order.
class VectorReader {
public:
    explicit VectorReader(std::istream& in) : in_(&in) {}

    std::optional<SparseVector> next() {
        std::string line;
        while (std::getline(*in_, line)) {
            ++lineno_;
            if (detail::is_blank(line)) continue;
            return parse_line(line, lineno_);
        }
        return std::nullopt;
    }

    static SparseVector parse_line(const std::string& line, std::size_t lineno) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string() ||
            !doc.contains("vector") || !doc["vector"].is_object())
            throw ParseError("expected {\"id\": string, \"vector\": object}", lineno);
        SparseVector vec;
        vec.id = doc["id"].get<std::string>();
        for (const auto& [term, value] : doc["vector"].items()) {
            if (!value.is_number())
                throw ParseError("weight of term '" + term + "' is not a number", lineno);
            double w = value.get<double>();
            if (!std::isfinite(w))
                throw ValidationError("non-finite weight for term '" + term + "'", lineno);
            if (w < 0.0)
                throw ValidationError("negative weight for term '" + term + "'", lineno);
            if (w > 0.0) vec.weights.emplace(term, w);
        }
        return vec;
    }

private:
    std::istream* in_;
    std::size_t lineno_ = 0;
};

inline std::vector<SparseVector> read_all_vectors(std::istream& in) {
    std::vector<SparseVector> vectors;
    VectorReader reader(in);
    while (auto v = reader.next()) vectors.push_back(std::move(*v));
    return vectors;
}

/// Serializes vectors in the same line-delimited JSON form parse accepts.
inline void write_vectors(const std::vector<SparseVector>& vectors, std::ostream& out) {
    for (const auto& v : vectors) {
        nlohmann::json obj;
        obj["id"] = v.id;
        obj["vector"] = nlohmann::json::object();
        for (const auto& [term, w] : v.weights) obj["vector"][term] = w;
        out << obj.dump() << '\n';
    }
    if (out.fail()) throw IoError("failed to write vectors");
}

/// Parses a passage-to-document mapping: `passage_id<TAB>doc_id` per line.
/// Re-stating the same pair is fine; a conflicting target is an error.
inline std::map<std::string, std::string> parse_doc_mapping(std::istream& in) {
    std::map<std::string, std::string> mapping;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::is_blank(line)) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw ParseError("expected 2 tab-separated fields", lineno);
        std::string passage = line.substr(0, tab);
        std::string doc = line.substr(tab + 1);
        if (passage.empty() || doc.empty())
            throw ParseError("empty passage or document id", lineno);
        auto [it, inserted] = mapping.emplace(passage, doc);
        if (!inserted && it->second != doc)
            throw ValidationError("passage '" + passage + "' mapped to both '" + it->second +
                                      "' and '" + doc + "'",
                                  lineno);
    }
    return mapping;
}

}  // namespace cascade
