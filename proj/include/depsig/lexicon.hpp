#pragma once

// Parsers and lookups for the four lexical resources: a LIWC-format category
// dictionary, an NRC-style word/emotion association list, an MRC-style
// psycholinguistic score table (TSV), and a flat psychiatric term list.

#include <array>
#include <bitset>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "depsig/common.hpp"
#include "depsig/text.hpp"

namespace depsig {

// ---------------------------------------------------------------------------
// Category dictionary
// ---------------------------------------------------------------------------

class CategoryLexicon {
public:
    struct Entry {
        std::string pattern;  ///< without the trailing '*'
        bool wildcard = false;
        std::vector<int> category_ids;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    void add_category(int id, std::string name) {
        if (!categories_.emplace(id, name).second)
            throw ValidationError("duplicate category id " + std::to_string(id));
        by_name_[std::move(name)] = id;
    }

    void add_entry(Entry e) {
        for (int id : e.category_ids)
            if (!categories_.count(id))
                throw ValidationError("entry '" + e.pattern + "' references undeclared category " +
                                      std::to_string(id));
        auto& index = e.wildcard ? prefix_ : exact_;
        auto& ids = index[e.pattern];
        ids.insert(e.category_ids.begin(), e.category_ids.end());
        if (e.wildcard) max_prefix_ = std::max(max_prefix_, e.pattern.size());
        entries_.push_back(std::move(e));
    }

    const std::map<int, std::string>& categories() const { return categories_; }
    const std::vector<Entry>& entries() const { return entries_; }

    std::optional<int> category_id(const std::string& name) const {
        const auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    /// Ids of all exact entries equal to `token` plus all wildcard entries
    /// whose prefix starts `token`.
    std::set<int> match(std::string_view token) const {
        std::set<int> out;
        if (const auto it = exact_.find(std::string(token)); it != exact_.end())
            out.insert(it->second.begin(), it->second.end());
        const std::size_t longest = std::min(max_prefix_, token.size());
        for (std::size_t len = 1; len <= longest; ++len)
            if (const auto it = prefix_.find(std::string(token.substr(0, len))); it != prefix_.end())
                out.insert(it->second.begin(), it->second.end());
        return out;
    }

    friend bool operator==(const CategoryLexicon& a, const CategoryLexicon& b) {
        return a.categories_ == b.categories_ && a.entries_ == b.entries_;
    }

private:
    std::map<int, std::string> categories_;
    std::map<std::string, int> by_name_;
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::set<int>> exact_;
    std::unordered_map<std::string, std::set<int>> prefix_;
    std::size_t max_prefix_ = 0;
};

inline std::set<int> match_categories(const CategoryLexicon& lex, std::string_view token) {
    return lex.match(token);
}

/// Format: a `%` line, `id<TAB>name` lines, a `%` line, then
/// `pattern<TAB>id[<TAB>id]*` entry lines. Blank lines are ignored.
inline CategoryLexicon read_category_dictionary(std::istream& in, const std::string& source = "<dic>") {
    CategoryLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    int section = 0;  // 0: before header, 1: categories, 2: entries
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        const auto t = trim(line);
        if (t.empty()) continue;
        if (section == 0) {
            if (t != "%") throw ParseError(source, line_no, "expected '%' header delimiter");
            section = 1;
            continue;
        }
        if (section == 1) {
            if (t == "%") {
                section = 2;
                continue;
            }
            const auto tab = t.find('\t');
            if (tab == std::string_view::npos)
                throw ParseError(source, line_no, "category line must be 'id<TAB>name'");
            const auto id = parse_int(t.substr(0, tab));
            const auto name = std::string(trim(t.substr(tab + 1)));
            if (!id) throw ParseError(source, line_no, "non-integer category id");
            if (name.empty()) throw ParseError(source, line_no, "empty category name");
            if (lex.categories().count(static_cast<int>(*id)))
                throw ParseError(source, line_no, "duplicate category id " + std::to_string(*id));
            lex.add_category(static_cast<int>(*id), name);
            continue;
        }
        const auto fields = split(t, '\t');
        CategoryLexicon::Entry e;
        e.pattern = ascii_lower(trim(fields[0]));
        if (!e.pattern.empty() && e.pattern.back() == '*') {
            e.wildcard = true;
            e.pattern.pop_back();
        }
        if (e.pattern.empty()) throw ParseError(source, line_no, "empty entry pattern");
        if (e.pattern.find('*') != std::string::npos)
            throw ParseError(source, line_no, "wildcard '*' allowed only as trailing marker");
        for (std::size_t k = 1; k < fields.size(); ++k) {
            if (trim(fields[k]).empty()) continue;
            const auto id = parse_int(fields[k]);
            if (!id) throw ParseError(source, line_no, "non-integer category id '" + fields[k] + "'");
            if (!lex.categories().count(static_cast<int>(*id)))
                throw ParseError(source, line_no, "undeclared category id " + std::to_string(*id));
            e.category_ids.push_back(static_cast<int>(*id));
        }
        if (e.category_ids.empty()) throw ParseError(source, line_no, "entry lists no category ids");
        lex.add_entry(std::move(e));
    }
    if (section == 0) throw ParseError(source, std::max<std::size_t>(line_no, 1), "missing '%' header delimiter");
    if (section == 1) throw ParseError(source, line_no, "missing closing '%' after category block");
    return lex;
}

inline CategoryLexicon parse_category_dictionary(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_category_dictionary(in, path.string());
}

inline void write_category_dictionary(const CategoryLexicon& lex, std::ostream& out) {
    out << "%\n";
    for (const auto& [id, name] : lex.categories()) out << id << '\t' << name << '\n';
    out << "%\n";
    for (const auto& e : lex.entries()) {
        out << e.pattern << (e.wildcard ? "*" : "");
        for (int id : e.category_ids) out << '\t' << id;
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Emotion lexicon
// ---------------------------------------------------------------------------

/// The eight basic emotions and two sentiments, in the lexicon's order.
inline const std::array<std::string, 10>& affect_labels() {
    static const std::array<std::string, 10> labels = {"anger",    "anticipation", "disgust",
                                                       "fear",     "joy",          "negative",
                                                       "positive", "sadness",      "surprise",
                                                       "trust"};
    return labels;
}

inline std::optional<std::size_t> affect_index(std::string_view label) {
    const auto& labels = affect_labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return i;
    return std::nullopt;
}

class EmotionLexicon {
public:
    using Mask = std::bitset<10>;

    /// Registers `word` (possibly with an empty association set).
    void set(const std::string& word, std::size_t label, bool on) {
        auto& m = assoc_[word];
        if (on) m.set(label);
    }

    bool contains(const std::string& word) const { return assoc_.count(word) > 0; }

    bool has(const std::string& word, std::string_view label) const {
        const auto it = assoc_.find(word);
        const auto idx = affect_index(label);
        return it != assoc_.end() && idx && it->second.test(*idx);
    }

    std::set<std::string> labels(const std::string& word) const {
        std::set<std::string> out;
        const auto it = assoc_.find(word);
        if (it == assoc_.end()) return out;
        for (std::size_t i = 0; i < 10; ++i)
            if (it->second.test(i)) out.insert(affect_labels()[i]);
        return out;
    }

    const std::map<std::string, Mask>& associations() const { return assoc_; }
    std::size_t size() const { return assoc_.size(); }

    friend bool operator==(const EmotionLexicon&, const EmotionLexicon&) = default;

private:
    std::map<std::string, Mask> assoc_;
};

/// Rows `word<TAB>label<TAB>0|1`.
inline EmotionLexicon read_emotion_lexicon(std::istream& in, const std::string& source = "<nrc>") {
    EmotionLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        if (trim(line).empty()) continue;
        const auto f = split(line, '\t');
        if (f.size() != 3) throw ParseError(source, line_no, "expected 3 tab-separated fields");
        const auto word = ascii_lower(trim(f[0]));
        if (word.empty()) throw ParseError(source, line_no, "empty word");
        const auto label = std::string(trim(f[1]));
        const auto idx = affect_index(label);
        if (!idx) throw ParseError(source, line_no, "unknown label '" + label + "'");
        const auto flag = trim(f[2]);
        if (flag != "0" && flag != "1")
            throw ParseError(source, line_no, "association flag must be 0 or 1, got '" + std::string(flag) + "'");
        lex.set(word, *idx, flag == "1");
    }
    return lex;
}

inline EmotionLexicon parse_emotion_lexicon(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_emotion_lexicon(in, path.string());
}

inline void write_emotion_lexicon(const EmotionLexicon& lex, std::ostream& out) {
    for (const auto& [word, mask] : lex.associations())
        for (std::size_t i = 0; i < 10; ++i)
            out << word << '\t' << affect_labels()[i] << '\t' << (mask.test(i) ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Psycholinguistic database
// ---------------------------------------------------------------------------

inline constexpr std::size_t kPsycholinguisticProperties = 26;

class PsycholinguisticDB {
public:
    PsycholinguisticDB() = default;
    explicit PsycholinguisticDB(std::vector<std::string> properties) : properties_(std::move(properties)) {
        if (properties_.size() != kPsycholinguisticProperties)
            throw ValidationError("psycholinguistic DB needs exactly 26 properties");
    }

    const std::vector<std::string>& properties() const { return properties_; }

    /// Inserts or replaces; returns true if the word was already present.
    bool put(const std::string& word, std::vector<double> scores) {
        if (scores.size() != properties_.size()) throw ValidationError("score count mismatch for '" + word + "'");
        return !records_.insert_or_assign(word, std::move(scores)).second;
    }

    bool contains(const std::string& word) const { return records_.count(word) > 0; }

    /// Score of `property` for `word`; nullopt when absent or stored as 0.
    std::optional<double> score(const std::string& word, std::size_t property) const {
        const auto it = records_.find(word);
        if (it == records_.end() || it->second[property] == 0.0) return std::nullopt;
        return it->second[property];
    }

    const std::map<std::string, std::vector<double>>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    friend bool operator==(const PsycholinguisticDB&, const PsycholinguisticDB&) = default;

private:
    std::vector<std::string> properties_;
    std::map<std::string, std::vector<double>> records_;
};

/// TSV with a header row of `word` + 26 property names. Duplicate words
/// keep the last row; a warning is appended to `warnings` when given.
inline PsycholinguisticDB read_psycholinguistic_db(std::istream& in, const std::string& source = "<mrc>",
                                                   std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        if (trim(line).empty()) continue;
        header = split(line, '\t');
        break;
    }
    if (header.empty()) throw ParseError(source, std::max<std::size_t>(line_no, 1), "missing header row");
    if (header.size() != kPsycholinguisticProperties + 1)
        throw ParseError(source, line_no,
                         "header must have 27 columns (word + 26 properties), got " + std::to_string(header.size()));
    std::vector<std::string> props;
    for (std::size_t i = 1; i < header.size(); ++i) props.emplace_back(trim(header[i]));
    PsycholinguisticDB db(std::move(props));

    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        if (trim(line).empty()) continue;
        const auto f = split(line, '\t');
        if (f.size() != header.size())
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(f.size()));
        const auto word = ascii_lower(trim(f[0]));
        if (word.empty()) throw ParseError(source, line_no, "empty word");
        std::vector<double> scores;
        scores.reserve(kPsycholinguisticProperties);
        for (std::size_t i = 1; i < f.size(); ++i) {
            const auto v = parse_double(f[i]);
            if (!v || !std::isfinite(*v))
                throw ParseError(source, line_no, "non-numeric score '" + f[i] + "' for " + header[i]);
            scores.push_back(*v);
        }
        if (db.put(word, std::move(scores)) && warnings)
            warnings->push_back(source + ":" + std::to_string(line_no) + ": duplicate word '" + word +
                                "', keeping last row");
    }
    return db;
}

inline PsycholinguisticDB parse_psycholinguistic_db(const std::filesystem::path& path,
                                                    std::vector<std::string>* warnings = nullptr) {
    auto in = open_input(path);
    return read_psycholinguistic_db(in, path.string(), warnings);
}

inline void write_psycholinguistic_db(const PsycholinguisticDB& db, std::ostream& out) {
    out << "word";
    for (const auto& p : db.properties()) out << '\t' << p;
    out << '\n';
    for (const auto& [word, scores] : db.records()) {
        out << word;
        for (double s : scores) out << '\t' << format_double(s);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Term list
// ---------------------------------------------------------------------------

class TermList {
public:
    /// Adds a term, normalized through the tokenizer (lowercase, punctuation
    /// removed). Returns false if it normalizes to nothing.
    bool add(std::string_view raw) {
        auto toks = tokenize(raw);
        if (toks.empty()) return false;
        const auto term = join(toks, " ");
        if (terms_.insert(term).second) {
            max_len_ = std::max(max_len_, toks.size());
        }
        return true;
    }

    bool contains(const std::string& term) const { return terms_.count(term) > 0; }
    const std::set<std::string>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Terms found in `tokens`, left to right, longest match first at each
    /// position and without overlap. Multiword terms match contiguous runs.
    std::vector<std::string> find_in(const std::vector<std::string>& tokens) const {
        std::vector<std::string> out;
        std::size_t i = 0;
        while (i < tokens.size()) {
            std::size_t matched = 0;
            for (std::size_t len = std::min(max_len_, tokens.size() - i); len >= 1; --len) {
                std::string cand = tokens[i];
                for (std::size_t k = 1; k < len; ++k) cand += ' ' + tokens[i + k];
                if (terms_.count(cand)) {
                    out.push_back(std::move(cand));
                    matched = len;
                    break;
                }
            }
            i += matched ? matched : 1;
        }
        return out;
    }

    friend bool operator==(const TermList& a, const TermList& b) { return a.terms_ == b.terms_; }

private:
    std::set<std::string> terms_;
    std::size_t max_len_ = 0;
};

inline TermList read_term_list(std::istream& in, const std::string& source = "<terms>") {
    TermList list;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        list.add(line);
    }
    if (list.empty()) throw ParseError(source, std::max<std::size_t>(line_no, 1), "term list contains no terms");
    return list;
}

inline TermList parse_term_list(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_term_list(in, path.string());
}

inline void write_term_list(const TermList& list, std::ostream& out) {
    for (const auto& t : list.terms()) out << t << '\n';
}

// ---------------------------------------------------------------------------
// Depression-related words
// ---------------------------------------------------------------------------

/// Term-list matches in `tokens` that the emotion lexicon does not tie to joy.
inline std::vector<std::string> depression_terms(const std::vector<std::string>& tokens, const TermList& who,
                                                 const EmotionLexicon& nrc) {
    auto found = who.find_in(tokens);
    std::erase_if(found, [&](const std::string& w) { return nrc.has(w, "joy"); });
    return found;
}

/// Whether a single word counts as depression-related.
inline bool is_depression_word(const std::string& word, const TermList& who, const EmotionLexicon& nrc) {
    return who.contains(word) && !nrc.has(word, "joy");
}

struct Lexicons {
    CategoryLexicon categories;
    EmotionLexicon emotions;
    PsycholinguisticDB psycholinguistic;
    TermList terms;
};

}  // namespace depsig
