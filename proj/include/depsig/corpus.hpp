#pragma once

// Post ingestion (JSONL / CSV), the tweet filtering rules, tokenized
// documents, weekly windowing and active-user selection.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/text.hpp"

namespace depsig {

// ---------------------------------------------------------------------------
// Calendar
// ---------------------------------------------------------------------------

/// Civil date, stored as days since 1970-01-01.
struct Date {
    std::int64_t days = 0;

    static Date from_ymd(int y, unsigned m, unsigned d) {
        // Howard Hinnant's days_from_civil.
        y -= m <= 2;
        const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
        const auto yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return Date{era * 146097 + static_cast<std::int64_t>(doe) - 719468};
    }

    struct Ymd {
        int year;
        unsigned month;
        unsigned day;
    };

    Ymd ymd() const {
        const std::int64_t z = days + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const auto doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp < 10 ? mp + 3 : mp - 9;
        return {static_cast<int>(yoe + era * 400 + (m <= 2)), m, d};
    }

    /// "YYYY-MM".
    std::string month_key() const {
        const auto [y, m, d] = ymd();
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u", y, m);
        return buf;
    }

    std::string str() const {
        const auto [y, m, d] = ymd();
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
        return buf;
    }

    /// Parses "YYYY-MM-DD".
    static Date parse(std::string_view s) {
        s = trim(s);
        if (s.size() != 10 || s[4] != '-' || s[7] != '-')
            throw ValidationError("invalid date '" + std::string(s) + "', expected YYYY-MM-DD");
        const auto y = parse_int(s.substr(0, 4));
        const auto m = parse_int(s.substr(5, 2));
        const auto d = parse_int(s.substr(8, 2));
        if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31)
            throw ValidationError("invalid date '" + std::string(s) + "'");
        const Date out = from_ymd(static_cast<int>(*y), static_cast<unsigned>(*m),
                                  static_cast<unsigned>(*d));
        if (out.ymd().day != static_cast<unsigned>(*d))
            throw ValidationError("invalid date '" + std::string(s) + "'");
        return out;
    }

    friend auto operator<=>(const Date&, const Date&) = default;
};

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline Date date_of(Timestamp t) {
    std::int64_t d = t / 86400;
    if (t % 86400 < 0) --d;
    return Date{d};
}

/// Parses RFC 3339 ("2020-03-12T08:15:00Z", "...+02:00", fractional seconds
/// truncated). A space instead of 'T' is tolerated. Returns nullopt on error.
inline std::optional<Timestamp> parse_rfc3339(std::string_view s) {
    s = trim(s);
    if (s.size() < 19 || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return std::nullopt;
    Date date;
    try {
        date = Date::parse(s.substr(0, 10));
    } catch (const ValidationError&) {
        return std::nullopt;
    }
    const auto hh = parse_int(s.substr(11, 2));
    const auto mm = parse_int(s.substr(14, 2));
    const auto ss = parse_int(s.substr(17, 2));
    if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
    std::size_t i = 19;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    }
    std::int64_t offset = 0;
    const auto rest = s.substr(i);
    if (rest == "Z" || rest == "z") {
        offset = 0;
    } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
        const auto oh = parse_int(rest.substr(1, 2));
        const auto om = parse_int(rest.substr(4, 2));
        if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
        offset = (*oh * 3600 + *om * 60) * (rest[0] == '-' ? -1 : 1);
    } else {
        return std::nullopt;
    }
    return date.days * 86400 + *hh * 3600 + *mm * 60 + *ss - offset;
}

inline std::string format_rfc3339(Timestamp t) {
    const Date d = date_of(t);
    const std::int64_t secs = t - d.days * 86400;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lldZ", d.str().c_str(),
                  static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                  static_cast<long long>(secs % 60));
    return buf;
}

// ---------------------------------------------------------------------------
// Posts and corpora
// ---------------------------------------------------------------------------

struct Post {
    std::string id;
    std::string user_id;
    Timestamp timestamp = 0;
    std::string text;
    std::string language = "en";
    bool is_retweet = false;
    bool has_media = false;
    std::set<std::string> matched_keywords;
    /// Optional external label column (used as a supervised target).
    std::optional<double> label;

    Date date() const { return date_of(timestamp); }
};

struct Rejection {
    std::size_t line;
    std::string reason;
};

struct Corpus {
    std::vector<Post> posts;
    std::vector<Rejection> rejections;

    std::size_t size() const { return posts.size(); }
    bool empty() const { return posts.empty(); }

    Date min_date() const {
        if (posts.empty()) throw ValidationError("empty corpus has no dates");
        Timestamp t = posts.front().timestamp;
        for (const auto& p : posts) t = std::min(t, p.timestamp);
        return date_of(t);
    }
};

enum class PostFormat { jsonl, csv };

inline PostFormat parse_post_format(std::string_view s) {
    if (s == "jsonl") return PostFormat::jsonl;
    if (s == "csv") return PostFormat::csv;
    throw ValidationError("unknown corpus format '" + std::string(s) + "' (expected jsonl or csv)");
}

namespace detail {

inline std::optional<bool> parse_bool_field(std::string_view s) {
    const auto v = ascii_lower(trim(s));
    if (v.empty() || v == "false" || v == "0" || v == "no") return false;
    if (v == "true" || v == "1" || v == "yes") return true;
    return std::nullopt;
}

inline std::string json_to_id(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    throw std::invalid_argument("must be a string or integer");
}

/// Shared tail of record validation for both formats. Returns a rejection
/// reason, or empty when the post is valid.
inline std::string validate_post(const Post& p) {
    if (p.id.empty()) return "missing id";
    if (p.user_id.empty()) return "missing user_id";
    if (std::string(trim(p.text)).empty()) return "empty text";
    return {};
}

inline void finish_corpus(Corpus& corpus, const std::string& source) {
    std::unordered_set<std::string> seen;
    for (const auto& p : corpus.posts)
        if (!seen.insert(p.id).second)
            throw ValidationError(source + ": duplicate post id '" + p.id + "'");
    if (corpus.posts.empty())
        throw ValidationError(source + ": no parseable records (" +
                              std::to_string(corpus.rejections.size()) + " rejected)");
}

}  // namespace detail

inline Corpus read_posts_jsonl(std::istream& in, const std::string& source = "<jsonl>") {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        if (trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            corpus.rejections.push_back({line_no, "malformed JSON"});
            continue;
        }
        if (!obj.is_object()) {
            corpus.rejections.push_back({line_no, "record is not an object"});
            continue;
        }
        Post p;
        std::string reason;
        try {
            for (const char* key : {"id", "user_id", "timestamp", "text"})
                if (!obj.contains(key) || obj[key].is_null())
                    throw std::invalid_argument(std::string("missing ") + key);
            p.id = detail::json_to_id(obj["id"]);
            p.user_id = detail::json_to_id(obj["user_id"]);
            const auto ts = parse_rfc3339(obj["timestamp"].get<std::string>());
            if (!ts) throw std::invalid_argument("unparseable timestamp");
            p.timestamp = *ts;
            p.text = obj["text"].get<std::string>();
            if (obj.contains("language") && !obj["language"].is_null())
                p.language = ascii_lower(obj["language"].get<std::string>());
            if (obj.contains("is_retweet") && !obj["is_retweet"].is_null())
                p.is_retweet = obj["is_retweet"].get<bool>();
            if (obj.contains("has_media") && !obj["has_media"].is_null())
                p.has_media = obj["has_media"].get<bool>();
            if (obj.contains("matched_keywords") && obj["matched_keywords"].is_array())
                for (const auto& k : obj["matched_keywords"]) p.matched_keywords.insert(k.get<std::string>());
            if (obj.contains("label") && !obj["label"].is_null()) p.label = obj["label"].get<double>();
            reason = detail::validate_post(p);
        } catch (const std::invalid_argument& e) {
            reason = e.what();
        } catch (const nlohmann::json::exception&) {
            reason = "field has wrong type";
        }
        if (!reason.empty()) {
            corpus.rejections.push_back({line_no, reason});
            continue;
        }
        corpus.posts.push_back(std::move(p));
    }
    detail::finish_corpus(corpus, source);
    return corpus;
}

inline Corpus read_posts_csv(std::istream& in, const std::string& source = "<csv>") {
    Corpus corpus;
    std::vector<std::string> header;
    std::size_t line_no = 0;
    if (!read_csv_record(in, header, line_no)) throw ValidationError(source + ": empty CSV file");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[std::string(trim(header[i]))] = i;
    for (const char* key : {"id", "user_id", "timestamp", "text"})
        if (!col.count(key)) throw ParseError(source, 1, std::string("header lacks column '") + key + "'");

    std::vector<std::string> f;
    while (true) {
        const std::size_t start = line_no + 1;
        if (!read_csv_record(in, f, line_no)) break;
        if (f.size() == 1 && trim(f[0]).empty()) continue;
        if (f.size() != header.size()) {
            corpus.rejections.push_back({start, "expected " + std::to_string(header.size()) +
                                                    " fields, got " + std::to_string(f.size())});
            continue;
        }
        auto get = [&](const char* key) -> std::string {
            const auto it = col.find(key);
            return it == col.end() ? std::string() : f[it->second];
        };
        Post p;
        p.id = std::string(trim(get("id")));
        p.user_id = std::string(trim(get("user_id")));
        p.text = get("text");
        std::string reason;
        const auto ts = parse_rfc3339(get("timestamp"));
        if (!ts) reason = trim(get("timestamp")).empty() ? "missing timestamp" : "unparseable timestamp";
        else p.timestamp = *ts;
        if (col.count("language") && !trim(get("language")).empty())
            p.language = ascii_lower(trim(get("language")));
        for (auto [key, dst] : {std::pair{"is_retweet", &p.is_retweet}, std::pair{"has_media", &p.has_media}}) {
            if (!col.count(key)) continue;
            const auto b = detail::parse_bool_field(get(key));
            if (!b && reason.empty()) reason = std::string("invalid boolean in ") + key;
            else if (b) *dst = *b;
        }
        if (col.count("matched_keywords"))
            for (const auto& k : split(get("matched_keywords"), ';'))
                if (!trim(k).empty()) p.matched_keywords.insert(std::string(trim(k)));
        if (col.count("label") && !trim(get("label")).empty()) {
            p.label = parse_double(get("label"));
            if (!p.label && reason.empty()) reason = "non-numeric label";
        }
        if (reason.empty()) reason = detail::validate_post(p);
        if (!reason.empty()) {
            corpus.rejections.push_back({start, reason});
            continue;
        }
        corpus.posts.push_back(std::move(p));
    }
    detail::finish_corpus(corpus, source);
    return corpus;
}

/// Loads every parseable record; malformed ones land in `rejections` with
/// their line numbers. Throws on a missing file, duplicate ids, or when no
/// record parses.
inline Corpus load_posts(const std::filesystem::path& path, PostFormat format) {
    auto in = open_input(path);
    return format == PostFormat::jsonl ? read_posts_jsonl(in, path.string())
                                       : read_posts_csv(in, path.string());
}

inline nlohmann::json post_to_json(const Post& p) {
    nlohmann::json j;
    j["id"] = p.id;
    j["user_id"] = p.user_id;
    j["timestamp"] = format_rfc3339(p.timestamp);
    j["text"] = p.text;
    j["language"] = p.language;
    j["is_retweet"] = p.is_retweet;
    j["has_media"] = p.has_media;
    if (!p.matched_keywords.empty()) j["matched_keywords"] = p.matched_keywords;
    if (p.label) j["label"] = *p.label;
    return j;
}

inline void write_posts_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& p : corpus.posts) out << post_to_json(p).dump() << '\n';
}

inline void write_rejections_csv(const Corpus& corpus, std::ostream& out) {
    out << "line,reason\n";
    for (const auto& r : corpus.rejections) out << r.line << ',' << csv_escape(r.reason) << '\n';
}

// ---------------------------------------------------------------------------
// Filtering
// ---------------------------------------------------------------------------

struct FilterConfig {
    std::set<std::string> keywords = {"covid", "coronavirus", "stayathome", "stayhome"};
    /// Posts containing both terms of any pair are removed. Terms may be
    /// multiword; they match as contiguous token runs.
    std::vector<std::pair<std::string, std::string>> exclusion_cooccurrence = {
        {"covid", "mental health"},
        {"covid", "depression"},
        {"coronavirus", "mental health"},
        {"coronavirus", "depression"}};
    std::set<std::string> allowed_languages = {"en", "fr"};
    bool drop_retweets = true;
    bool drop_media_only = true;
    bool drop_keyword_only = true;
    bool dedup = true;
    std::optional<std::pair<Date, Date>> date_range;  ///< [start, end), end exclusive

    void validate() const {
        if (date_range && !(date_range->first < date_range->second))
            throw ValidationError("filter date_range start must precede end");
    }
};

/// Names of the filter rules, in the order they are evaluated.
inline const std::vector<std::string>& filter_rule_names() {
    static const std::vector<std::string> names = {"language", "retweet", "media_only", "keyword_only",
                                                   "cooccurrence", "date_range", "duplicate"};
    return names;
}

struct FilterOutcome {
    Corpus corpus;
    /// Rule name -> posts removed by that rule (first failing rule wins).
    std::map<std::string, std::size_t> removed;
};

/// Keeps exactly the posts passing every enabled rule. Throws when nothing
/// survives.
inline FilterOutcome apply_filters(const Corpus& corpus, const FilterConfig& cfg) {
    cfg.validate();
    if (corpus.empty()) throw ValidationError("apply_filters: corpus is empty");

    std::vector<std::vector<std::string>> keyword_toks;
    std::set<std::string> keyword_set;
    for (const auto& k : cfg.keywords)
        for (auto& t : tokenize(k)) keyword_set.insert(std::move(t));
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
    for (const auto& [a, b] : cfg.exclusion_cooccurrence) pairs.emplace_back(tokenize(a), tokenize(b));

    FilterOutcome out;
    for (const auto& name : filter_rule_names()) out.removed[name] = 0;
    std::set<std::pair<std::string, std::string>> seen;

    for (const auto& p : corpus.posts) {
        const auto toks = tokenize(p.text);
        const char* rule = nullptr;
        if (!cfg.allowed_languages.empty() && !cfg.allowed_languages.count(ascii_lower(p.language))) {
            rule = "language";
        } else if (cfg.drop_retweets && p.is_retweet) {
            rule = "retweet";
        } else if (cfg.drop_media_only && p.has_media && toks.empty()) {
            rule = "media_only";
        } else if (cfg.drop_keyword_only && !toks.empty() &&
                   std::all_of(toks.begin(), toks.end(),
                               [&](const std::string& t) { return keyword_set.count(t) > 0; })) {
            rule = "keyword_only";
        } else if (std::any_of(pairs.begin(), pairs.end(), [&](const auto& pr) {
                       return contains_sequence(toks, pr.first) && contains_sequence(toks, pr.second);
                   })) {
            rule = "cooccurrence";
        } else if (cfg.date_range &&
                   (p.date() < cfg.date_range->first || !(p.date() < cfg.date_range->second))) {
            rule = "date_range";
        } else if (cfg.dedup && !seen.insert({p.user_id, join(toks, " ")}).second) {
            rule = "duplicate";
        }
        if (rule) {
            ++out.removed[rule];
            continue;
        }
        out.corpus.posts.push_back(p);
    }
    if (out.corpus.empty()) throw ValidationError("apply_filters: every post was filtered out");
    return out;
}

// ---------------------------------------------------------------------------
// Tokenized documents
// ---------------------------------------------------------------------------

struct TokenizedDoc {
    std::string post_id;
    std::vector<std::string> tokens;
    std::vector<std::pair<std::string, std::string>> bigrams;

    TokenizedDoc() = default;
    TokenizedDoc(std::string id, std::vector<std::string> toks)
        : post_id(std::move(id)), tokens(std::move(toks)) {
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) bigrams.emplace_back(tokens[i], tokens[i + 1]);
    }
};

struct TokenizeOptions {
    std::set<std::string> stoplist = default_stoplist();
    std::set<std::string> pronoun_whitelist = default_pronoun_whitelist();
};

/// Tokenizes and stopword-filters every post. Posts left without tokens are
/// dropped and their ids returned in `dropped`.
inline std::vector<TokenizedDoc> tokenize_corpus(const Corpus& corpus, const TokenizeOptions& opts,
                                                 std::vector<std::string>* dropped = nullptr) {
    std::vector<TokenizedDoc> docs;
    docs.reserve(corpus.size());
    for (const auto& p : corpus.posts) {
        auto toks = filter_stopwords(tokenize(p.text), opts.stoplist, opts.pronoun_whitelist);
        if (toks.empty()) {
            if (dropped) dropped->push_back(p.id);
            continue;
        }
        docs.emplace_back(p.id, std::move(toks));
    }
    return docs;
}

// ---------------------------------------------------------------------------
// Windows and users
// ---------------------------------------------------------------------------

struct TimeWindow {
    std::size_t index = 0;
    Date start;
    Date end;  ///< exclusive
};

struct WindowedCorpus {
    TimeWindow window;
    Corpus corpus;
};

/// Buckets posts into consecutive 7-day windows starting at `origin`.
/// Windows run from index 0 through the last occupied one; gaps are kept as
/// empty windows.
inline std::vector<WindowedCorpus> window_by_week(const Corpus& corpus, Date origin) {
    std::vector<WindowedCorpus> out;
    for (const auto& p : corpus.posts) {
        const auto d = p.date();
        if (d < origin)
            throw ValidationError("post '" + p.id + "' (" + d.str() + ") precedes window origin " +
                                  origin.str());
        const auto idx = static_cast<std::size_t>((d.days - origin.days) / 7);
        while (out.size() <= idx) {
            const std::size_t k = out.size();
            const Date start{origin.days + static_cast<std::int64_t>(7 * k)};
            out.push_back({TimeWindow{k, start, Date{start.days + 7}}, {}});
        }
        out[idx].corpus.posts.push_back(p);
    }
    return out;
}

inline std::vector<WindowedCorpus> window_by_week(const Corpus& corpus) {
    return window_by_week(corpus, corpus.min_date());
}

inline std::map<std::string, std::size_t> posts_per_user(const Corpus& corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : corpus.posts) ++counts[p.user_id];
    return counts;
}

/// Users with at least `min_posts` posts.
inline std::set<std::string> select_active_users(const Corpus& corpus, long long min_posts) {
    if (min_posts < 1) throw ValidationError("select_active_users: min_posts must be >= 1");
    std::set<std::string> users;
    for (const auto& [user, n] : posts_per_user(corpus))
        if (static_cast<long long>(n) >= min_posts) users.insert(user);
    return users;
}

}  // namespace depsig
