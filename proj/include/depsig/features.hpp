#pragma once

// Feature families (LIWC category proportions, PLUS psycholinguistic
// averages, bigram TF-IDF, LDA topic proportions) and the named matrices
// they are assembled into.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/corpus.hpp"
#include "depsig/lexicon.hpp"

namespace depsig {

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    double at(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return values[i];
        throw ValidationError("no feature named '" + std::string(name) + "'");
    }
};

/// Rectangular instance x feature table with one shared column ordering.
struct FeatureMatrix {
    std::vector<std::string> instance_ids;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return names.size(); }

    void add_row(std::string id, std::vector<double> values) {
        if (values.size() != names.size())
            throw ValidationError("row '" + id + "' has " + std::to_string(values.size()) + " values, expected " +
                                  std::to_string(names.size()));
        instance_ids.push_back(std::move(id));
        rows.push_back(std::move(values));
    }

    FeatureVector row(std::size_t i) const { return {names, rows.at(i)}; }

    /// Throws if names repeat, rows are ragged, or a value is not finite.
    void validate() const {
        std::set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw ValidationError("duplicate feature name '" + n + "'");
        if (instance_ids.size() != rows.size()) throw ValidationError("instance id count differs from row count");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != names.size())
                throw ValidationError("row '" + instance_ids[i] + "' is ragged");
            for (double v : rows[i])
                if (!std::isfinite(v)) throw ValidationError("non-finite value in row '" + instance_ids[i] + "'");
        }
    }

    /// Rows in the given order.
    FeatureMatrix select_rows(const std::vector<std::size_t>& idx) const {
        FeatureMatrix out;
        out.names = names;
        for (auto i : idx) out.add_row(instance_ids.at(i), rows.at(i));
        return out;
    }
};

// ---------------------------------------------------------------------------
// Bigram TF-IDF
// ---------------------------------------------------------------------------

/// (1 + ln n) * ln(T / T_w) for n >= 1, else 0.
inline double tfidf_score(std::size_t count, std::size_t n_docs, std::size_t doc_freq) {
    if (count == 0 || doc_freq == 0) return 0.0;
    return (1.0 + std::log(static_cast<double>(count))) *
           std::log(static_cast<double>(n_docs) / static_cast<double>(doc_freq));
}

inline std::string bigram_key(const std::pair<std::string, std::string>& bg) { return bg.first + ' ' + bg.second; }

/// Per-document bigram TF-IDF restricted to the `vocab_size` bigrams with the
/// highest corpus-total score (ties broken lexicographically). Columns are in
/// that rank order. Counting happens in a first pass over all documents,
/// scoring in a second.
inline FeatureMatrix tfidf_bigrams(const std::vector<TokenizedDoc>& docs, std::size_t vocab_size) {
    if (docs.empty()) throw ValidationError("tfidf_bigrams: no documents");
    if (vocab_size < 1) throw ValidationError("tfidf_bigrams: vocab_size must be >= 1");

    std::vector<std::unordered_map<std::string, std::size_t>> counts(docs.size());
    std::unordered_map<std::string, std::size_t> doc_freq;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& bg : docs[d].bigrams) ++counts[d][bigram_key(bg)];
        for (const auto& [key, n] : counts[d]) ++doc_freq[key];
    }
    if (doc_freq.empty()) throw ValidationError("tfidf_bigrams: no bigram occurs in the corpus");

    const std::size_t n_docs = docs.size();
    std::unordered_map<std::string, double> total;
    for (std::size_t d = 0; d < n_docs; ++d)
        for (const auto& [key, n] : counts[d]) total[key] += tfidf_score(n, n_docs, doc_freq[key]);

    std::vector<std::pair<std::string, double>> ranked(total.begin(), total.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > vocab_size) ranked.resize(vocab_size);

    FeatureMatrix out;
    for (const auto& [key, s] : ranked) out.names.push_back(key);
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::vector<double> row(out.names.size(), 0.0);
        for (std::size_t c = 0; c < out.names.size(); ++c) {
            const auto it = counts[d].find(out.names[c]);
            if (it != counts[d].end()) row[c] = tfidf_score(it->second, n_docs, doc_freq[out.names[c]]);
        }
        out.add_row(docs[d].post_id, std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// LIWC
// ---------------------------------------------------------------------------

/// Category ids reported as LIWC features: the pronoun category first, then
/// `enabled` (all declared categories when empty) in id order.
inline std::vector<int> liwc_columns(const CategoryLexicon& lex, int pronoun_category,
                                     const std::vector<int>& enabled = {}) {
    if (!lex.categories().count(pronoun_category))
        throw ValidationError("pronoun category " + std::to_string(pronoun_category) + " is not declared");
    std::vector<int> cols = {pronoun_category};
    std::set<int> chosen(enabled.begin(), enabled.end());
    if (enabled.empty())
        for (const auto& [id, name] : lex.categories()) chosen.insert(id);
    for (int id : chosen) {
        if (!lex.categories().count(id)) throw ValidationError("category " + std::to_string(id) + " is not declared");
        if (id != pronoun_category) cols.push_back(id);
    }
    return cols;
}

/// Proportion of the document's tokens matching each reported category.
inline FeatureVector liwc_features(const TokenizedDoc& doc, const CategoryLexicon& lex, int pronoun_category,
                                   const std::vector<int>& enabled = {}) {
    if (doc.tokens.empty()) throw ValidationError("liwc_features: document '" + doc.post_id + "' has no tokens");
    const auto cols = liwc_columns(lex, pronoun_category, enabled);
    std::map<int, std::size_t> hits;
    for (const auto& t : doc.tokens)
        for (int id : lex.match(t)) ++hits[id];
    FeatureVector v;
    const double n = static_cast<double>(doc.tokens.size());
    for (int id : cols) {
        v.names.push_back(lex.categories().at(id));
        const auto it = hits.find(id);
        v.values.push_back(it == hits.end() ? 0.0 : static_cast<double>(it->second) / n);
    }
    return v;
}

// ---------------------------------------------------------------------------
// PLUS
// ---------------------------------------------------------------------------

/// match_count, coverage, then the mean of each psycholinguistic property over
/// the depression-related words of the document that the database scores.
inline FeatureVector plus_features(const TokenizedDoc& doc, const TermList& who, const EmotionLexicon& nrc,
                                   const PsycholinguisticDB& mrc) {
    const auto words = depression_terms(doc.tokens, who, nrc);
    FeatureVector v;
    v.names = {"match_count", "coverage"};
    v.values = {static_cast<double>(words.size()), words.empty() ? 0.0 : 1.0};
    for (std::size_t p = 0; p < mrc.properties().size(); ++p) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& w : words)
            if (const auto s = mrc.score(w, p)) {
                sum += *s;
                ++n;
            }
        v.names.push_back(mrc.properties()[p]);
        v.values.push_back(n ? sum / static_cast<double>(n) : 0.0);
    }
    return v;
}

/// Fraction of the document's tokens covered by depression-related terms.
inline double weak_label(const TokenizedDoc& doc, const TermList& who, const EmotionLexicon& nrc) {
    if (doc.tokens.empty()) throw ValidationError("weak_label: document '" + doc.post_id + "' has no tokens");
    std::size_t covered = 0;
    for (const auto& term : depression_terms(doc.tokens, who, nrc))
        covered += static_cast<std::size_t>(std::count(term.begin(), term.end(), ' ')) + 1;
    return static_cast<double>(covered) / static_cast<double>(doc.tokens.size());
}

/// Stacks per-document vectors that share a name ordering.
inline FeatureMatrix stack_vectors(const std::vector<TokenizedDoc>& docs,
                                   const std::function<FeatureVector(const TokenizedDoc&)>& extract) {
    FeatureMatrix m;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto v = extract(docs[i]);
        if (i == 0) m.names = v.names;
        m.add_row(docs[i].post_id, std::move(v.values));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

enum class FeatureFamily { liwc, plus, bigram, lda };

inline std::string family_prefix(FeatureFamily f) {
    switch (f) {
    case FeatureFamily::liwc: return "liwc";
    case FeatureFamily::plus: return "plus";
    case FeatureFamily::bigram: return "bigram";
    case FeatureFamily::lda: return "lda";
    }
    return {};
}

enum class FeatureSet { liwc, liwc_lda, liwc_bigram, liwc_bigram_lda, liwc_plus_bigram_lda };

inline const std::vector<FeatureSet>& all_feature_sets() {
    static const std::vector<FeatureSet> sets = {FeatureSet::liwc, FeatureSet::liwc_lda, FeatureSet::liwc_bigram,
                                                 FeatureSet::liwc_bigram_lda, FeatureSet::liwc_plus_bigram_lda};
    return sets;
}

inline std::string to_string(FeatureSet s) {
    switch (s) {
    case FeatureSet::liwc: return "LIWC";
    case FeatureSet::liwc_lda: return "LIWC+LDA";
    case FeatureSet::liwc_bigram: return "LIWC+bigram";
    case FeatureSet::liwc_bigram_lda: return "LIWC+bigram+LDA";
    case FeatureSet::liwc_plus_bigram_lda: return "LIWC+PLUS+bigram+LDA";
    }
    return {};
}

inline FeatureSet parse_feature_set(std::string_view s) {
    for (auto fs : all_feature_sets())
        if (ascii_lower(to_string(fs)) == ascii_lower(trim(s))) return fs;
    throw ValidationError("unknown feature set '" + std::string(s) + "'");
}

/// Families making up a set, in the fixed concatenation order.
inline std::vector<FeatureFamily> families_of(FeatureSet s) {
    using F = FeatureFamily;
    switch (s) {
    case FeatureSet::liwc: return {F::liwc};
    case FeatureSet::liwc_lda: return {F::liwc, F::lda};
    case FeatureSet::liwc_bigram: return {F::liwc, F::bigram};
    case FeatureSet::liwc_bigram_lda: return {F::liwc, F::bigram, F::lda};
    case FeatureSet::liwc_plus_bigram_lda: return {F::liwc, F::plus, F::bigram, F::lda};
    }
    return {};
}

/// Column-wise concatenation of the families in `set`, names prefixed with
/// "<family>:". Every part must list the same instances in the same order.
inline FeatureMatrix assemble_features(const std::map<FeatureFamily, FeatureMatrix>& parts, FeatureSet set) {
    const auto fams = families_of(set);
    for (auto f : fams)
        if (!parts.count(f)) throw ValidationError("feature set " + to_string(set) + " needs the " + family_prefix(f) + " part");
    const auto& first = parts.at(fams.front());
    FeatureMatrix out;
    out.instance_ids = first.instance_ids;
    out.rows.resize(first.n_rows());
    for (auto f : fams) {
        const auto& part = parts.at(f);
        if (part.n_rows() != first.n_rows())
            throw ValidationError("feature part " + family_prefix(f) + " has " + std::to_string(part.n_rows()) +
                                  " rows, expected " + std::to_string(first.n_rows()));
        for (std::size_t i = 0; i < part.n_rows(); ++i)
            if (part.instance_ids[i] != first.instance_ids[i])
                throw ValidationError("feature part " + family_prefix(f) + " instance mismatch at '" +
                                      part.instance_ids[i] + "' (expected '" + first.instance_ids[i] + "')");
        for (const auto& n : part.names) out.names.push_back(family_prefix(f) + ":" + n);
        for (std::size_t i = 0; i < part.n_rows(); ++i)
            out.rows[i].insert(out.rows[i].end(), part.rows[i].begin(), part.rows[i].end());
    }
    return out;
}

/// Columns of one family, with the prefix removed.
inline FeatureMatrix project_family(const FeatureMatrix& m, FeatureFamily f) {
    const auto prefix = family_prefix(f) + ":";
    std::vector<std::size_t> cols;
    FeatureMatrix out;
    for (std::size_t c = 0; c < m.n_cols(); ++c)
        if (m.names[c].rfind(prefix, 0) == 0) {
            cols.push_back(c);
            out.names.push_back(m.names[c].substr(prefix.size()));
        }
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
        std::vector<double> row;
        row.reserve(cols.size());
        for (auto c : cols) row.push_back(m.rows[i][c]);
        out.add_row(m.instance_ids[i], std::move(row));
    }
    return out;
}

/// Unweighted mean of rows sharing a group key; groups in key order.
inline FeatureMatrix mean_by_group(const FeatureMatrix& m, const std::vector<std::string>& group_of_row) {
    if (group_of_row.size() != m.n_rows()) throw ValidationError("mean_by_group: one group key per row required");
    std::map<std::string, std::pair<std::vector<double>, std::size_t>> acc;
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
        auto& [sum, n] = acc[group_of_row[i]];
        if (sum.empty()) sum.assign(m.n_cols(), 0.0);
        for (std::size_t c = 0; c < m.n_cols(); ++c) sum[c] += m.rows[i][c];
        ++n;
    }
    FeatureMatrix out;
    out.names = m.names;
    for (auto& [key, sn] : acc) {
        for (auto& v : sn.first) v /= static_cast<double>(sn.second);
        out.add_row(key, std::move(sn.first));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline void write_feature_csv(const FeatureMatrix& m, std::ostream& out) {
    out << "instance_id";
    for (const auto& n : m.names) out << ',' << csv_escape(n);
    out << '\n';
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
        out << csv_escape(m.instance_ids[i]);
        for (double v : m.rows[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

inline void write_feature_jsonl(const FeatureMatrix& m, std::ostream& out) {
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
        nlohmann::ordered_json j;
        j["instance_id"] = m.instance_ids[i];
        auto& f = j["features"];
        f = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < m.n_cols(); ++c) f[m.names[c]] = m.rows[i][c];
        out << j.dump() << '\n';
    }
}

inline FeatureMatrix read_feature_csv(std::istream& in, const std::string& source = "<features>") {
    FeatureMatrix m;
    std::vector<std::string> f;
    std::size_t line_no = 0;
    if (!read_csv_record(in, f, line_no) || f.empty() || f[0] != "instance_id")
        throw ParseError(source, 1, "feature CSV must start with an 'instance_id' header column");
    m.names.assign(f.begin() + 1, f.end());
    while (read_csv_record(in, f, line_no)) {
        if (f.size() == 1 && trim(f[0]).empty()) continue;
        if (f.size() != m.n_cols() + 1) throw ParseError(source, line_no, "wrong number of columns");
        std::vector<double> row;
        for (std::size_t c = 1; c < f.size(); ++c) {
            const auto v = parse_double(f[c]);
            if (!v) throw ParseError(source, line_no, "non-numeric value '" + f[c] + "'");
            row.push_back(*v);
        }
        m.add_row(f[0], std::move(row));
    }
    m.validate();
    return m;
}

}  // namespace depsig
