#pragma once

// Tweet tokenization: lowercase word segmentation that drops URLs, strips
// hashtag/mention sigils, and keeps emoji (including ZWJ sequences, skin
// tones and flags) as single tokens.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "depsig/common.hpp"

namespace depsig {

namespace utf8 {

/// Decodes one code point at `i`, advancing it. Invalid bytes decode to
/// U+FFFD and consume a single byte.
inline char32_t decode(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) return -1;
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const int c = cont(static_cast<std::size_t>(k));
        if (c < 0) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | static_cast<char32_t>(c);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

}  // namespace utf8

namespace detail {

enum class CharClass { word, emoji, emoji_modifier, joiner, regional, mark, other };

inline bool is_emoji_base(char32_t c) {
    return (c >= 0x1F000 && c <= 0x1FAFF && !(c >= 0x1F3FB && c <= 0x1F3FF) &&
            !(c >= 0x1F1E6 && c <= 0x1F1FF)) ||
           (c >= 0x2600 && c <= 0x27BF) || (c >= 0x2B00 && c <= 0x2BFF) ||
           (c >= 0x2300 && c <= 0x23FF) || c == 0x3030 || c == 0x303D || c == 0x2122 ||
           c == 0x2139 || (c >= 0x2190 && c <= 0x21FF);
}

inline CharClass classify(char32_t c) {
    if (c < 0x80) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')
            return CharClass::word;
        return CharClass::other;
    }
    if (c == 0x200D) return CharClass::joiner;
    if (c == 0xFE0F || c == 0xFE0E || c == 0x20E3 || (c >= 0x1F3FB && c <= 0x1F3FF) ||
        (c >= 0xE0020 && c <= 0xE007F))
        return CharClass::emoji_modifier;
    if (c >= 0x1F1E6 && c <= 0x1F1FF) return CharClass::regional;
    if (is_emoji_base(c)) return CharClass::emoji;
    if ((c >= 0x0300 && c <= 0x036F) || (c >= 0x1AB0 && c <= 0x1AFF) ||
        (c >= 0x20D0 && c <= 0x20FF))
        return CharClass::mark;
    // Punctuation, symbols and spaces outside the letter blocks.
    if ((c >= 0x0080 && c <= 0x00BF) || c == 0x00D7 || c == 0x00F7 ||
        (c >= 0x2000 && c <= 0x2BFF) || (c >= 0x3000 && c <= 0x303F) ||
        (c >= 0xFE10 && c <= 0xFE6F) || (c >= 0xFF00 && c <= 0xFF0F) || c == 0xFFFD ||
        (c >= 0xE000 && c <= 0xF8FF))
        return CharClass::other;
    return CharClass::word;
}

inline char32_t to_lower(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 32;
    if (c < 0x80) return c;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x131 && c != 0x138 && c != 0x149 &&
        c != 0x17F) {
        // Latin Extended-A pairs upper/lower on even/odd, shifted by one
        // in 0x139..0x148 and 0x179..0x17E.
        const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
        if (odd_upper ? (c % 2 == 1) : (c % 2 == 0)) return c + 1;
        return c;
    }
    if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
    if (c >= 0x410 && c <= 0x42F) return c + 32;
    if (c >= 0x400 && c <= 0x40F) return c + 80;
    return c;
}

inline bool starts_with_ci(std::string_view s, std::size_t at, std::string_view prefix) {
    if (s.size() - at < prefix.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        char c = s[at + k];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[k]) return false;
    }
    return true;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// Blanks out URL runs (http://, https://, www.) up to the next whitespace.
inline std::string strip_urls(std::string_view text) {
    std::string out(text);
    std::size_t i = 0;
    while (i < out.size()) {
        const bool at_boundary = i == 0 || is_space(out[i - 1]) || out[i - 1] == '(' ||
                                 out[i - 1] == '"' || out[i - 1] == '\'';
        if (at_boundary && (starts_with_ci(out, i, "http://") || starts_with_ci(out, i, "https://") ||
                            starts_with_ci(out, i, "www."))) {
            while (i < out.size() && !is_space(out[i])) out[i++] = ' ';
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace detail

/// Lowercase word tokens with URLs removed and emoji kept as single tokens.
/// Apostrophes between letters and '.'/',' between digits stay inside a word.
inline std::vector<std::string> tokenize(std::string_view text) {
    using detail::CharClass;
    const std::string clean = detail::strip_urls(text);

    std::vector<char32_t> cps;
    std::vector<CharClass> cls;
    for (std::size_t i = 0; i < clean.size();) {
        const char32_t c = utf8::decode(clean, i);
        cps.push_back(c);
        cls.push_back(detail::classify(c));
    }

    std::vector<std::string> tokens;
    const std::size_t n = cps.size();
    std::size_t i = 0;
    auto is_digit = [&](std::size_t k) { return k < n && cps[k] >= '0' && cps[k] <= '9'; };
    auto is_word = [&](std::size_t k) { return k < n && cls[k] == CharClass::word; };

    while (i < n) {
        switch (cls[i]) {
        case CharClass::word: {
            std::string tok;
            while (i < n) {
                if (cls[i] == CharClass::word || cls[i] == CharClass::mark) {
                    utf8::append(tok, detail::to_lower(cps[i]));
                    ++i;
                } else if ((cps[i] == '\'' || cps[i] == 0x2019) && i > 0 && is_word(i - 1) &&
                           is_word(i + 1) && !is_digit(i - 1)) {
                    tok += '\'';
                    ++i;
                } else if ((cps[i] == '.' || cps[i] == ',') && is_digit(i - 1) && is_digit(i + 1)) {
                    utf8::append(tok, cps[i]);
                    ++i;
                } else {
                    break;
                }
            }
            tokens.push_back(std::move(tok));
            break;
        }
        case CharClass::emoji:
        case CharClass::regional: {
            std::string tok;
            const bool flag = cls[i] == CharClass::regional;
            utf8::append(tok, cps[i++]);
            if (flag) {
                if (i < n && cls[i] == CharClass::regional) utf8::append(tok, cps[i++]);
            }
            while (i < n) {
                if (cls[i] == CharClass::emoji_modifier) {
                    utf8::append(tok, cps[i++]);
                } else if (cls[i] == CharClass::joiner && i + 1 < n &&
                           (cls[i + 1] == CharClass::emoji || cls[i + 1] == CharClass::regional)) {
                    utf8::append(tok, cps[i++]);
                    utf8::append(tok, cps[i++]);
                } else {
                    break;
                }
            }
            tokens.push_back(std::move(tok));
            break;
        }
        default:
            ++i;
        }
    }
    return tokens;
}

/// English stoplist. Personal pronouns are included here and re-admitted by
/// the pronoun whitelist.
inline const std::set<std::string>& default_stoplist() {
    static const std::set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any",
        "are", "aren't", "as", "at", "be", "because", "been", "before", "being", "below",
        "between", "both", "but", "by", "can", "could", "couldn't", "did", "didn't", "do",
        "does", "doesn't", "doing", "don't", "down", "during", "each", "few", "for", "from",
        "further", "had", "hadn't", "has", "hasn't", "have", "haven't", "having", "he",
        "he'd", "he'll", "he's", "her", "here", "here's", "hers", "herself", "him",
        "himself", "his", "how", "how's", "i", "i'd", "i'll", "i'm", "i've", "if", "in",
        "into", "is", "isn't", "it", "it's", "its", "itself", "just", "let's", "me", "more",
        "most", "mustn't", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
        "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out", "over",
        "own", "same", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't",
        "so", "some", "such", "than", "that", "that's", "the", "their", "theirs", "them",
        "themselves", "then", "there", "there's", "these", "they", "they'd", "they'll",
        "they're", "they've", "this", "those", "through", "to", "too", "under", "until", "up",
        "very", "was", "wasn't", "we", "we'd", "we'll", "we're", "we've", "were", "weren't",
        "what", "what's", "when", "when's", "where", "where's", "which", "while", "who",
        "who's", "whom", "why", "why's", "will", "with", "won't", "would", "wouldn't", "you",
        "you'd", "you'll", "you're", "you've", "your", "yours", "yourself", "yourselves"};
    return words;
}

inline const std::set<std::string>& default_pronoun_whitelist() {
    static const std::set<std::string> words = {"i", "you", "she", "he", "we", "they"};
    return words;
}

/// Drops stoplist tokens unless whitelisted; order is preserved.
inline std::vector<std::string> filter_stopwords(const std::vector<std::string>& tokens,
                                                 const std::set<std::string>& stoplist,
                                                 const std::set<std::string>& whitelist) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stoplist.count(t) || whitelist.count(t)) out.push_back(t);
    return out;
}

/// True if `needle` occurs as a contiguous run inside `haystack`.
inline bool contains_sequence(const std::vector<std::string>& haystack,
                              const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

}  // namespace depsig
