#pragma once

// Synthetic lexicons and corpora with planted depression signal. Used for
// the bundled fixtures, the tests and `depsig synth`.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "depsig/common.hpp"
#include "depsig/corpus.hpp"
#include "depsig/lexicon.hpp"
#include "depsig/similarity.hpp"

namespace depsig::synth {

/// Depression-related words, in blocks of ten. Blocks never share a word.
inline const std::vector<std::string>& depression_bank() {
    static const std::vector<std::string> words = {
        "hopeless",  "worthless",  "helpless",   "despair",    "insomnia",  "fatigue",    "numb",       "empty",
        "lonely",    "miserable",  "anxious",    "panic",      "guilt",     "shame",      "tearful",    "grief",
        "sorrow",    "melancholy", "anhedonia",  "apathy",     "restless",  "irritable",  "agitated",   "suicidal",
        "withdrawn", "gloomy",     "dread",      "nightmares", "overwhelmed", "burnout",  "heartbroken", "devastated",
        "desperate", "trapped",    "broken",     "defeated",   "drained",   "lethargic",  "unmotivated", "paranoid",
        "insecure",  "rejected",   "abandoned",  "ashamed",    "regret",    "mourning",   "distress",   "trauma",
        "stressed",  "weary",      "listless",   "bleak",      "forlorn",   "dejected",   "exhausted",  "isolated",
        "crying",    "sleepless",  "tormented",  "despondent"};
    return words;
}

/// Term-list entries the emotion lexicon ties to joy; they never count.
inline const std::vector<std::string>& joy_terms() {
    static const std::vector<std::string> words = {"cheerful", "euphoria", "elation", "bliss"};
    return words;
}

/// Multiword term-list entries.
inline const std::vector<std::string>& multiword_terms() {
    static const std::vector<std::string> terms = {"panic attack", "low mood", "self harm", "mental illness",
                                                   "eating disorder"};
    return terms;
}

/// (variant, canonical) pairs; variants are kept out of the bank.
inline const std::vector<std::pair<std::string, std::string>>& synonym_pairs() {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"unhappy", "miserable"}, {"hopelessness", "hopeless"}, {"worthlessness", "worthless"},
        {"teary", "tearful"},     {"sleeplessness", "insomnia"}};
    return pairs;
}

/// Context words that co-occur with depression talk but are not terms.
inline const std::vector<std::string>& struggle_context() {
    static const std::vector<std::string> words = {"night", "alone",  "bed",      "sleep",    "awake", "room",
                                                   "dark",  "tears",  "weeks",    "nothing",  "inside", "thoughts",
                                                   "pills", "therapist", "meds", "anymore", "ceiling", "silence"};
    return words;
}

inline const std::vector<std::string>& struggle_phrases() {
    static const std::vector<std::string> phrases = {"cant sleep",   "feel hopeless", "lost interest", "everything hurts",
                                                     "empty inside", "stayed bed",    "cried again",   "barely eating"};
    return phrases;
}

/// Neutral topics, twenty words each.
inline const std::vector<std::vector<std::string>>& neutral_topics() {
    static const std::vector<std::vector<std::string>> topics = {
        {"lockdown", "news", "cases", "government", "announce", "update", "press", "briefing", "minister", "policy",
         "quarantine", "restrictions", "schools", "closed", "borders", "travel", "ban", "curfew", "measures", "officials"},
        {"bread", "recipe", "baking", "kitchen", "dinner", "pasta", "flour", "oven", "soup", "garlic", "tomato",
         "cheese", "salad", "breakfast", "coffee", "lunch", "sugar", "butter", "cake", "sourdough"},
        {"zoom", "meeting", "laptop", "email", "deadline", "project", "office", "remote", "team", "boss", "manager",
         "calendar", "spreadsheet", "report", "client", "schedule", "desk", "wifi", "slack", "colleagues"},
        {"walk", "park", "dog", "garden", "sunshine", "bike", "trail", "weather", "spring", "flowers", "birds",
         "river", "jog", "trees", "grass", "lake", "hike", "picnic", "sunset", "puppy"},
        {"netflix", "movie", "series", "episode", "music", "album", "podcast", "game", "stream", "watch", "playlist",
         "season", "binge", "novel", "chapter", "author", "guitar", "song", "concert", "trailer"},
        {"grocery", "store", "mask", "gloves", "sanitizer", "toilet", "paper", "shelves", "delivery", "amazon",
         "package", "cart", "supermarket", "pharmacy", "stock", "price", "cash", "receipt", "queue", "flour"}};
    return topics;
}

inline const std::vector<std::string>& mrc_properties() {
    static const std::vector<std::string> props = {
        "nlet", "nphon", "nsyl", "kf_freq", "kf_ncats", "kf_nsamp", "tl_freq", "brown_freq", "fam",
        "conc", "imag",  "meanc", "meanp",  "aoa",      "tq2",      "wtype",   "pdwtype",    "alphsyl",
        "status", "var", "cap",  "irreg",  "nwords",   "phon",     "dphon",   "stress"};
    return props;
}

struct LexiconFixture {
    Lexicons lexicons;
    SynonymMap synonyms;
};

/// Deterministic lexicons matching the word banks above.
inline LexiconFixture make_lexicons() {
    LexiconFixture fx;
    auto& cat = fx.lexicons.categories;
    const std::vector<std::pair<int, std::string>> cats = {
        {1, "i"},   {2, "we"},     {3, "you"},  {4, "posemo"}, {5, "negemo"},
        {6, "anx"}, {7, "health"}, {8, "work"}, {9, "home"},   {10, "social"}};
    for (const auto& [id, name] : cats) cat.add_category(id, name);
    const std::vector<std::tuple<std::string, bool, std::vector<int>>> entries = {
        {"i", false, {1}},          {"me", false, {1}},         {"my", false, {1}},        {"mine", false, {1}},
        {"myself", false, {1}},     {"we", false, {2}},         {"us", false, {2}},        {"our", false, {2}},
        {"you", false, {3}},        {"your", false, {3}},       {"happy", false, {4}},     {"good", false, {4}},
        {"great", false, {4}},      {"love", true, {4}},        {"fun", false, {4}},       {"nice", false, {4}},
        {"cheer", true, {4}},       {"sad", true, {5}},         {"hurt", true, {5}},       {"awful", false, {5}},
        {"hate", true, {5}},        {"upset", false, {5}},      {"cry", true, {5}},        {"miser", true, {5}},
        {"lonel", true, {5}},       {"worr", true, {5, 6}},     {"anxi", true, {5, 6}},    {"nervous", false, {6}},
        {"panic", true, {6}},       {"afraid", false, {5, 6}},  {"dread", true, {5, 6}},   {"doctor", false, {7}},
        {"hospital", false, {7}},   {"sick", true, {7}},        {"pill", true, {7}},       {"meds", false, {7}},
        {"therap", true, {7}},      {"insomnia", false, {7}},   {"fatigue", false, {7}},   {"work", true, {8}},
        {"job", true, {8}},         {"boss", false, {8}},       {"meeting", true, {8}},    {"office", false, {8}},
        {"deadline", true, {8}},    {"home", false, {9}},       {"house", false, {9}},     {"kitchen", false, {9}},
        {"bed", false, {9}},        {"garden", false, {9}},     {"friend", true, {10}},    {"talk", true, {10}},
        {"call", true, {10}},       {"team", false, {8, 10}},   {"colleague", true, {8, 10}}};
    for (const auto& [pattern, wildcard, ids] : entries) cat.add_entry({pattern, wildcard, ids});

    auto& nrc = fx.lexicons.emotions;
    const auto idx = [](std::string_view l) { return *affect_index(l); };
    const auto& bank = depression_bank();
    for (std::size_t i = 0; i < bank.size(); ++i) {
        nrc.set(bank[i], idx("sadness"), true);
        nrc.set(bank[i], idx("negative"), true);
        nrc.set(bank[i], idx("fear"), i % 3 == 0);
    }
    for (const auto& [variant, canonical] : synonym_pairs()) {
        nrc.set(variant, idx("sadness"), true);
        nrc.set(variant, idx("negative"), true);
    }
    for (const auto& w : joy_terms()) {
        nrc.set(w, idx("joy"), true);
        nrc.set(w, idx("positive"), true);
    }
    for (const auto& w : {"happy", "good", "great", "love", "fun", "sunshine", "picnic", "puppy"}) {
        nrc.set(w, idx("joy"), true);
        nrc.set(w, idx("positive"), true);
        nrc.set(w, idx("trust"), std::string(w).size() % 2 == 0);
    }
    for (const auto& w : {"lockdown", "quarantine", "curfew", "ban"}) {
        nrc.set(w, idx("fear"), true);
        nrc.set(w, idx("negative"), true);
        nrc.set(w, idx("anticipation"), std::string(w).size() > 3);
    }

    auto& mrc = fx.lexicons.psycholinguistic;
    mrc = PsycholinguisticDB(mrc_properties());
    std::vector<std::string> scored = bank;
    for (const auto& w : joy_terms()) scored.push_back(w);
    for (const auto& [variant, c] : synonym_pairs()) scored.push_back(variant);
    for (const auto& topic : neutral_topics()) scored.push_back(topic.front());
    for (const auto& w : scored) {
        std::vector<double> row(kPsycholinguisticProperties);
        std::uint64_t h = derive_seed(0x4d5243, w);
        for (std::size_t p = 0; p < row.size(); ++p) {
            h = splitmix64(h);
            // Roughly one score in six is missing, encoded as 0.
            row[p] = h % 6 == 0 ? 0.0 : static_cast<double>(100 + h % 600);
        }
        row[0] = static_cast<double>(w.size());
        mrc.put(w, std::move(row));
    }

    auto& who = fx.lexicons.terms;
    for (const auto& w : bank) who.add(w);
    for (const auto& w : joy_terms()) who.add(w);
    for (const auto& t : multiword_terms()) who.add(t);
    for (const auto& [variant, c] : synonym_pairs()) who.add(variant);

    for (const auto& [variant, canonical] : synonym_pairs()) fx.synonyms.add(variant, canonical);
    return fx;
}

/// Writes the lexicon fixture files into `dir`.
inline void write_lexicon_files(const LexiconFixture& fx, const std::filesystem::path& dir) {
    auto dic = open_output(dir / "categories.dic");
    write_category_dictionary(fx.lexicons.categories, dic);
    auto nrc = open_output(dir / "emotions.tsv");
    write_emotion_lexicon(fx.lexicons.emotions, nrc);
    auto mrc = open_output(dir / "psycholinguistic.tsv");
    write_psycholinguistic_db(fx.lexicons.psycholinguistic, mrc);
    auto who = open_output(dir / "terms.txt");
    write_term_list(fx.lexicons.terms, who);
    auto syn = open_output(dir / "synonyms.tsv");
    write_synonym_map(fx.synonyms, syn);
}

struct CorpusOptions {
    std::size_t windows = 6;
    std::size_t docs_per_window = 150;
    std::size_t users = 120;
    Date origin = Date::from_ymd(2020, 2, 3);
    /// Windows starting before this date draw depression words from their
    /// own disjoint block; later windows share block 0.
    std::optional<Date> period_boundary;
    double positive_rate = 0.35;
    /// Depression words per positive post, inclusive range.
    std::size_t min_depression_words = 2;
    std::size_t max_depression_words = 4;
    std::optional<double> positive_rate_during;
    /// Windows with odd index write synonym variants of shared-block words.
    bool synonym_variants = false;
    /// Adds posts each filter rule removes, plus a few French posts.
    bool noise_posts = false;
    std::uint64_t seed = 1;
};

struct SyntheticPost {
    Post post;
    bool planted_positive = false;
};

namespace detail {

inline std::vector<std::string> depression_block(std::size_t block) {
    const auto& bank = depression_bank();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < 10; ++i) out.push_back(bank[(block * 10 + i) % bank.size()]);
    return out;
}

inline std::string variant_of(const std::string& w) {
    for (const auto& [variant, canonical] : synonym_pairs())
        if (canonical == w) return variant;
    return w;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[rng.below(v.size())];
}

inline std::string render(std::vector<std::string> words, Rng& rng) {
    static const std::vector<std::string> fillers = {"the", "and", "just", "so", "this", "is", "a", "of", "to"};
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        if (rng.uniform() < 0.15) text += pick(rng, fillers) + ' ';
        text += words[i];
    }
    if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    const double r = rng.uniform();
    if (r < 0.1) text += "!";
    else if (r < 0.15) text += " \xF0\x9F\x98\x94";  // pensive face
    else text += ".";
    return text;
}

}  // namespace detail

/// Generates a labelled corpus. Positive posts carry a few depression words
/// and lean on struggle phrases and context; negative posts talk about
/// one neutral topic and half of them mention a single depression word.
/// Post labels are the planted classes.
inline std::vector<SyntheticPost> generate_posts(const CorpusOptions& opt) {
    if (opt.windows < 1 || opt.docs_per_window < 1 || opt.users < 1)
        throw ValidationError("synthetic corpus needs at least one window, document and user");
    if (opt.min_depression_words > opt.max_depression_words)
        throw ValidationError("synthetic corpus: min_depression_words exceeds max_depression_words");
    Rng rng(opt.seed);
    std::vector<SyntheticPost> out;
    std::size_t serial = 0;
    const auto next_id = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "p%06zu", ++serial);
        return std::string(buf);
    };
    const auto user_name = [](std::size_t u) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "u%04zu", u);
        return std::string(buf);
    };

    for (std::size_t w = 0; w < opt.windows; ++w) {
        const Date start{opt.origin.days + static_cast<std::int64_t>(7 * w)};
        const bool before = opt.period_boundary && start < *opt.period_boundary;
        auto dep = detail::depression_block(before ? w + 1 : 0);
        if (opt.synonym_variants && !before && w % 2 == 1)
            for (auto& word : dep) word = detail::variant_of(word);
        const double rate = !before && opt.positive_rate_during ? *opt.positive_rate_during : opt.positive_rate;
        const auto day_seconds = [&](Rng& r) {
            return static_cast<Timestamp>(start.days * 86400 + static_cast<std::int64_t>(r.below(7 * 86400)));
        };

        for (std::size_t n = 0; n < opt.docs_per_window; ++n) {
            const bool pos = rng.uniform() < rate;
            std::vector<std::string> words;
            const std::size_t len = 9 + rng.below(8);
            const auto& topic = detail::pick(rng, neutral_topics());
            const double context_share = pos ? 0.5 : 0.1;
            if (rng.uniform() < (pos ? 0.7 : 0.5)) words.push_back("i");
            const std::size_t k =
                pos ? opt.min_depression_words + rng.below(opt.max_depression_words - opt.min_depression_words + 1)
                    : (rng.uniform() < 0.5 ? 1 : 0);
            for (std::size_t j = 0; j < k; ++j) words.push_back(detail::pick(rng, dep));
            if (rng.uniform() < (pos ? 0.8 : 0.1)) words.push_back(detail::pick(rng, struggle_phrases()));
            if (pos && rng.uniform() < 0.15) words.push_back(detail::pick(rng, multiword_terms()));
            if (!pos && rng.uniform() < 0.1) words.push_back(detail::pick(rng, joy_terms()));
            while (words.size() < len)
                words.push_back(rng.uniform() < context_share ? detail::pick(rng, struggle_context())
                                                              : detail::pick(rng, topic));
            // Phrases stay contiguous because each is a single item here.
            rng.shuffle(words);
            SyntheticPost sp;
            sp.planted_positive = pos;
            sp.post.id = next_id();
            sp.post.user_id = user_name(rng.below(opt.users));
            sp.post.timestamp = day_seconds(rng);
            sp.post.text = detail::render(std::move(words), rng);
            sp.post.label = pos ? 1.0 : 0.0;
            out.push_back(std::move(sp));
        }

        if (!opt.noise_posts) continue;
        const auto noise = [&](std::string text, auto&& tweak) {
            SyntheticPost sp;
            sp.post.id = next_id();
            sp.post.user_id = user_name(rng.below(opt.users));
            sp.post.timestamp = day_seconds(rng);
            sp.post.text = std::move(text);
            sp.post.label = 0.0;
            tweak(sp.post);
            out.push_back(std::move(sp));
        };
        const auto none = [](Post&) {};
        noise("RT this thread about the lockdown news", [](Post& p) { p.is_retweet = true; });
        noise("Die Ausgangssperre beginnt heute", [](Post& p) { p.language = "de"; });
        noise("https://t.co/x7Yq2", [](Post& p) { p.has_media = true; });
        noise("#covid #StayHome", none);
        noise("covid is wrecking my mental health", none);
        noise("Le confinement continue, café et pain à la maison", [](Post& p) { p.language = "fr"; });
        const auto copy = out[out.size() - 7].post;
        noise(copy.text, [&](Post& p) { p.user_id = copy.user_id; });
    }
    return out;
}

inline Corpus to_corpus(const std::vector<SyntheticPost>& posts) {
    Corpus c;
    for (const auto& sp : posts) c.posts.push_back(sp.post);
    return c;
}

/// Writes posts as JSONL. `malformed` appends that many broken records.
inline void write_corpus_jsonl(const std::vector<SyntheticPost>& posts, const std::filesystem::path& path,
                               std::size_t malformed = 0) {
    auto out = open_output(path);
    for (const auto& sp : posts) out << post_to_json(sp.post).dump() << '\n';
    for (std::size_t i = 0; i < malformed; ++i) {
        if (i % 2 == 0) out << "{\"id\": \"broken" << i << "\", \"user_id\": \"u0001\", \"timestamp\": \"not a time\", \"text\": \"x\"}\n";
        else out << "{\"id\": \"broken" << i << "\", \"text\": \n";
    }
}

enum class Preset { fixture, temporal, similarity };

inline Preset parse_preset(std::string_view s) {
    if (s == "fixture") return Preset::fixture;
    if (s == "temporal") return Preset::temporal;
    if (s == "similarity") return Preset::similarity;
    throw ValidationError("unknown preset '" + std::string(s) + "' (expected fixture, temporal or similarity)");
}

/// Corpus shape of each preset.
///  fixture:    ~5,000 posts over 20 weeks, before/during split on 2020-03-12,
///              noise posts for every filter rule.
///  temporal:   6 weekly windows of 150 posts.
///  similarity: 4 before + 4 during windows; during windows share one
///              depression vocabulary, before windows each have their own.
inline CorpusOptions preset_options(Preset p, std::uint64_t seed) {
    CorpusOptions o;
    o.seed = seed;
    switch (p) {
    case Preset::fixture:
        o.windows = 20;
        o.docs_per_window = 250;
        o.users = 400;
        o.origin = Date::from_ymd(2020, 1, 2);
        o.period_boundary = Date::from_ymd(2020, 3, 12);
        o.positive_rate = 0.25;
        o.positive_rate_during = 0.45;
        o.min_depression_words = 3;
        o.max_depression_words = 6;
        o.synonym_variants = true;
        o.noise_posts = true;
        break;
    case Preset::temporal:
        break;
    case Preset::similarity:
        o.windows = 8;
        o.docs_per_window = 200;
        o.origin = Date::from_ymd(2020, 2, 13);
        o.period_boundary = Date::from_ymd(2020, 3, 12);
        o.positive_rate = 0.5;
        o.min_depression_words = 4;
        o.max_depression_words = 6;
        o.synonym_variants = true;
        break;
    }
    return o;
}

/// Pipeline config for a preset, with paths relative to the bundle directory.
inline std::string preset_config(Preset p, std::uint64_t seed) {
    std::ostringstream c;
    c << "# Generated by `depsig synth`.\n"
         "[paths]\n"
         "corpus = corpus.jsonl\n"
         "category_dictionary = categories.dic\n"
         "emotion_lexicon = emotions.tsv\n"
         "psycholinguistic_db = psycholinguistic.tsv\n"
         "term_list = terms.txt\n"
         "synonyms = synonyms.tsv\n"
         "output_dir = out\n\n";
    switch (p) {
    case Preset::fixture:
        c << "[corpus]\nperiod_boundary = 2020-03-12\nmin_posts = 5\n\n"
             "[features]\nbigram_vocab = 500\n\n"
             "[lda]\ntopics = 20\nwindow_topics = 5\niterations = 200\n\n"
             "[models]\nrf_trees = 200\n\n"
             "[evaluation]\nprotocol = both\nfolds = 10\npermutations = 2000\n\n"
             "[labels]\nsource = weak_label\n\n";
        break;
    case Preset::temporal:
        c << "[features]\nbigram_vocab = 100\n"
             "feature_sets = LIWC, LIWC+LDA, LIWC+bigram+LDA, LIWC+PLUS+bigram+LDA\n\n"
             "[lda]\ntopics = 8\nwindow_topics = 8\niterations = 200\n\n"
             "[models]\nsvm_gamma = auto\n\n"
             "[evaluation]\nprotocol = temporal\ntemporal_instances = document\n\n"
             "[similarity]\nenabled = false\n\n[trend]\nenabled = false\n\n"
             "[output]\nfeature_matrices = false\n\n"
             "[labels]\nsource = external\n\n";
        break;
    case Preset::similarity:
        c << "[corpus]\nperiod_boundary = 2020-03-12\n\n"
             "[lda]\ntopics = 8\nwindow_topics = 4\niterations = 300\n\n"
             "[evaluation]\nprotocol = none\n\n"
             "[output]\nfeature_matrices = false\n\n";
        break;
    }
    c << "[run]\nseed = " << seed << "\n";
    return c.str();
}

/// Writes lexicons, corpus.jsonl and config.ini for a preset into `dir`.
inline void write_bundle(Preset p, std::uint64_t seed, const std::filesystem::path& dir) {
    write_lexicon_files(make_lexicons(), dir);
    write_corpus_jsonl(generate_posts(preset_options(p, seed)), dir / "corpus.jsonl",
                       p == Preset::fixture ? 2 : 0);
    auto cfg = open_output(dir / "config.ini");
    cfg << preset_config(p, seed);
}

}  // namespace depsig::synth
