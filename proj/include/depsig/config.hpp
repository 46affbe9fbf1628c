#pragma once

// Pipeline configuration: an INI-style file of `[section]` headers and
// `key = value` lines ('#' or ';' start comments). Every key is validated;
// unknown keys are rejected in strict mode with a spelling suggestion.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/corpus.hpp"
#include "depsig/evaluation.hpp"
#include "depsig/features.hpp"
#include "depsig/models.hpp"
#include "depsig/similarity.hpp"
#include "depsig/topics.hpp"

namespace depsig {

enum class LabelSource { weak_label, external };
enum class InstanceLevel { topic, document };

struct PipelineConfig {
    // [paths]
    std::filesystem::path corpus;
    PostFormat corpus_format = PostFormat::jsonl;
    std::filesystem::path category_dictionary;
    std::filesystem::path emotion_lexicon;
    std::filesystem::path psycholinguistic_db;
    std::filesystem::path term_list;
    std::optional<std::filesystem::path> synonyms;
    std::filesystem::path output_dir = "out";

    // [corpus]
    std::optional<Date> window_origin;
    std::optional<Date> period_boundary;
    long long min_posts = 5;
    FilterConfig filter;

    // [features]
    std::size_t bigram_vocab = 2000;
    std::string pronoun_category = "i";
    std::vector<std::string> liwc_categories;  ///< empty: every declared category
    std::vector<FeatureSet> feature_sets = {FeatureSet::liwc, FeatureSet::liwc_lda, FeatureSet::liwc_bigram_lda,
                                           FeatureSet::liwc_plus_bigram_lda};

    // [lda]
    LdaParams lda;
    std::size_t window_topics = 50;
    std::size_t min_hits = 3;
    std::size_t summary_words = 15;

    // [models]
    ModelSpec regression;
    std::vector<ModelSpec> classifiers;

    // [evaluation]
    bool run_kfold = true;
    bool run_temporal = true;
    std::size_t folds = 10;
    bool regression_by_user = true;
    InstanceLevel temporal_instances = InstanceLevel::topic;
    double threshold = 0.5;
    PValueOptions p_value;

    // [similarity]
    bool run_similarity = true;
    bool run_trend = true;
    SimilarityOptions similarity;

    // [output]
    bool write_feature_matrices = true;

    // [labels]
    LabelSource label_source = LabelSource::weak_label;

    // [run]
    std::uint64_t seed = 1;

    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const;
};

namespace detail {

struct ConfigValue {
    std::string text;
    std::size_t line;
};

/// Every accepted key with its default, as echoed in the manifest.
inline const std::vector<std::pair<std::string, std::string>>& config_schema() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"paths.corpus", ""},
        {"paths.corpus_format", "jsonl"},
        {"paths.category_dictionary", ""},
        {"paths.emotion_lexicon", ""},
        {"paths.psycholinguistic_db", ""},
        {"paths.term_list", ""},
        {"paths.synonyms", ""},
        {"paths.output_dir", "out"},
        {"corpus.window_origin", ""},
        {"corpus.period_boundary", ""},
        {"corpus.min_posts", "5"},
        {"filter.keywords", "covid, coronavirus, stayathome, stayhome"},
        {"filter.exclusion_cooccurrence",
         "covid | mental health; covid | depression; coronavirus | mental health; coronavirus | depression"},
        {"filter.allowed_languages", "en, fr"},
        {"filter.drop_retweets", "true"},
        {"filter.drop_media_only", "true"},
        {"filter.drop_keyword_only", "true"},
        {"filter.dedup", "true"},
        {"filter.date_start", ""},
        {"filter.date_end", ""},
        {"features.bigram_vocab", "2000"},
        {"features.pronoun_category", "i"},
        {"features.liwc_categories", ""},
        {"features.feature_sets", "LIWC, LIWC+LDA, LIWC+bigram+LDA, LIWC+PLUS+bigram+LDA"},
        {"lda.topics", "50"},
        {"lda.alpha", "0.01"},
        {"lda.beta", "0.01"},
        {"lda.iterations", "1000"},
        {"lda.window_topics", "50"},
        {"lda.min_hits", "3"},
        {"lda.summary_words", "15"},
        {"models.regression", "elastic_net"},
        {"models.classifiers", "svm, lr, rf"},
        {"models.en_lambda", "0.01"},
        {"models.en_l1_ratio", "0.5"},
        {"models.en_tol", "1e-7"},
        {"models.en_max_iter", "10000"},
        {"models.lr_l2", "0.001"},
        {"models.lr_tol", "1e-6"},
        {"models.lr_max_iter", "1000"},
        {"models.svm_lambda", "0.0001"},
        {"models.svm_kernel", "rbf"},
        {"models.svm_gamma", "0.5"},
        {"models.svm_tol", "0.001"},
        {"models.rf_trees", "500"},
        {"models.rf_max_depth", "3"},
        {"models.rf_features", "30"},
        {"evaluation.protocol", "both"},
        {"evaluation.folds", "10"},
        {"evaluation.regression_instances", "user"},
        {"evaluation.temporal_instances", "topic"},
        {"evaluation.threshold", "0.5"},
        {"evaluation.p_value", "permutation"},
        {"evaluation.permutations", "10000"},
        {"similarity.enabled", "true"},
        {"similarity.top_k", "15"},
        {"similarity.retain_k", "10"},
        {"similarity.epsilon", "1e-10"},
        {"similarity.aggregate", "all_pairs"},
        {"similarity.table_metric", "jaccard"},
        {"trend.enabled", "true"},
        {"output.feature_matrices", "true"},
        {"labels.source", "weak_label"},
        {"run.seed", "1"},
    };
    return keys;
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
    std::vector<std::string> out;
    for (const auto& part : split(s, sep))
        if (!trim(part).empty()) out.emplace_back(trim(part));
    return out;
}

}  // namespace detail

/// Raw key/value view of a config file, before typing and validation.
struct ConfigFile {
    std::string source;
    std::filesystem::path base_dir;
    std::map<std::string, detail::ConfigValue> values;

    static ConfigFile parse(std::istream& in, std::string source, std::filesystem::path base_dir) {
        ConfigFile cf{std::move(source), std::move(base_dir), {}};
        std::string line, section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            chomp_cr(line);
            auto t = trim(line);
            if (t.empty() || t.front() == '#' || t.front() == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') throw ParseError(cf.source, line_no, "unterminated section header");
                section = ascii_lower(trim(t.substr(1, t.size() - 2)));
                if (section.empty()) throw ParseError(cf.source, line_no, "empty section name");
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) throw ParseError(cf.source, line_no, "expected 'key = value'");
            const auto key = ascii_lower(trim(t.substr(0, eq)));
            if (key.empty()) throw ParseError(cf.source, line_no, "empty key");
            const auto full = section.empty() ? key : section + "." + key;
            if (cf.values.count(full)) throw ParseError(cf.source, line_no, "duplicate key '" + full + "'");
            cf.values[full] = {std::string(trim(t.substr(eq + 1))), line_no};
        }
        return cf;
    }
};

namespace detail {

class ConfigReader {
public:
    explicit ConfigReader(const ConfigFile& cf) : cf_(cf) {}

    std::optional<std::string> raw(const std::string& key) const {
        const auto it = cf_.values.find(key);
        if (it == cf_.values.end() || it->second.text.empty()) return std::nullopt;
        return it->second.text;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = cf_.values.find(key);
        if (it != cf_.values.end()) throw ParseError(cf_.source, it->second.line, key + ": " + what);
        throw ValidationError(cf_.source + ": " + key + ": " + what);
    }

    std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }

    double real(const std::string& key, double def, double lo = -1e300, double hi = 1e300, bool open_lo = false) const {
        const auto r = raw(key);
        if (!r) return def;
        const auto v = parse_double(*r);
        if (!v) fail(key, "expected a number, got '" + *r + "'");
        if (*v < lo || *v > hi || (open_lo && *v <= lo)) fail(key, "value " + *r + " out of range");
        return *v;
    }

    long long integer(const std::string& key, long long def, long long lo, long long hi = (1LL << 53)) const {
        const auto r = raw(key);
        if (!r) return def;
        const auto v = parse_int(*r);
        if (!v) fail(key, "expected an integer, got '" + *r + "'");
        if (*v < lo || *v > hi) fail(key, "value " + *r + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return *v;
    }

    bool boolean(const std::string& key, bool def) const {
        const auto r = raw(key);
        if (!r) return def;
        const auto v = ascii_lower(*r);
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        fail(key, "expected true or false, got '" + *r + "'");
    }

    std::optional<Date> date(const std::string& key) const {
        const auto r = raw(key);
        if (!r) return std::nullopt;
        try {
            return Date::parse(*r);
        } catch (const ValidationError& e) {
            fail(key, e.what());
        }
    }

    std::filesystem::path path(const std::string& key) const {
        const auto r = raw(key);
        if (!r) return {};
        std::filesystem::path p(*r);
        return p.is_absolute() ? p : cf_.base_dir / p;
    }

    std::filesystem::path existing_path(const std::string& key) const {
        if (!raw(key)) fail(key, "required path is missing");
        auto p = path(key);
        if (!std::filesystem::exists(p)) fail(key, "file not found: " + p.string());
        return p;
    }

    template <typename F>
    auto parse_with(const std::string& key, const std::string& def, F&& f) const {
        return convert(key, str(key, def), std::forward<F>(f));
    }

    template <typename F>
    auto convert(const std::string& key, const std::string& text, F&& f) const {
        try {
            return f(text);
        } catch (const ValidationError& e) {
            fail(key, e.what());
        }
    }

private:
    const ConfigFile& cf_;
};

}  // namespace detail

/// Types and validates a parsed config file. In strict mode unknown keys
/// are errors (with the nearest known key suggested); otherwise warnings.
inline PipelineConfig resolve_config(const ConfigFile& cf, bool strict = true) {
    PipelineConfig c;
    std::set<std::string> known;
    for (const auto& [k, d] : detail::config_schema()) known.insert(k);
    for (const auto& [key, val] : cf.values) {
        if (known.count(key)) continue;
        std::string best;
        std::size_t best_d = std::string::npos;
        for (const auto& k : known) {
            const auto d = std::min(edit_distance(key, k), edit_distance(key.substr(key.find('.') + 1), k.substr(k.find('.') + 1)));
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        const std::string msg = "unknown key '" + key + "'" + (best_d <= 3 ? " (did you mean '" + best + "'?)" : "");
        if (strict) throw ParseError(cf.source, val.line, msg);
        c.warnings.push_back(cf.source + ":" + std::to_string(val.line) + ": " + msg);
    }

    const detail::ConfigReader r(cf);
    c.corpus = r.existing_path("paths.corpus");
    c.corpus_format = r.parse_with("paths.corpus_format", "jsonl", parse_post_format);
    c.category_dictionary = r.existing_path("paths.category_dictionary");
    c.emotion_lexicon = r.existing_path("paths.emotion_lexicon");
    c.psycholinguistic_db = r.existing_path("paths.psycholinguistic_db");
    c.term_list = r.existing_path("paths.term_list");
    if (r.raw("paths.synonyms")) c.synonyms = r.existing_path("paths.synonyms");
    if (r.raw("paths.output_dir")) c.output_dir = r.path("paths.output_dir");

    c.window_origin = r.date("corpus.window_origin");
    c.period_boundary = r.date("corpus.period_boundary");
    c.min_posts = r.integer("corpus.min_posts", 5, 1);

    auto& f = c.filter;
    if (auto v = r.raw("filter.keywords")) {
        f.keywords.clear();
        for (auto& k : detail::split_list(*v)) f.keywords.insert(ascii_lower(k));
    }
    if (auto v = r.raw("filter.exclusion_cooccurrence")) {
        f.exclusion_cooccurrence.clear();
        for (const auto& pair : detail::split_list(*v, ';')) {
            const auto parts = detail::split_list(pair, '|');
            if (parts.size() != 2) r.fail("filter.exclusion_cooccurrence", "each pair must be 'term | term'");
            f.exclusion_cooccurrence.emplace_back(ascii_lower(parts[0]), ascii_lower(parts[1]));
        }
    }
    if (auto v = r.raw("filter.allowed_languages")) {
        f.allowed_languages.clear();
        for (auto& k : detail::split_list(*v)) f.allowed_languages.insert(ascii_lower(k));
    }
    f.drop_retweets = r.boolean("filter.drop_retweets", true);
    f.drop_media_only = r.boolean("filter.drop_media_only", true);
    f.drop_keyword_only = r.boolean("filter.drop_keyword_only", true);
    f.dedup = r.boolean("filter.dedup", true);
    const auto ds = r.date("filter.date_start");
    const auto de = r.date("filter.date_end");
    if (ds.has_value() != de.has_value()) r.fail(ds ? "filter.date_end" : "filter.date_start", "date_start and date_end go together");
    if (ds) {
        if (!(*ds < *de)) r.fail("filter.date_end", "must be after date_start");
        f.date_range = std::pair{*ds, *de};
    }

    c.bigram_vocab = static_cast<std::size_t>(r.integer("features.bigram_vocab", 2000, 1));
    c.pronoun_category = r.str("features.pronoun_category", "i");
    if (auto v = r.raw("features.liwc_categories")) c.liwc_categories = detail::split_list(*v);
    if (auto v = r.raw("features.feature_sets")) {
        c.feature_sets.clear();
        for (const auto& s : detail::split_list(*v))
            c.feature_sets.push_back(r.convert("features.feature_sets", s, parse_feature_set));
        if (c.feature_sets.empty()) r.fail("features.feature_sets", "at least one feature set required");
    }

    c.lda.n_topics = static_cast<std::size_t>(r.integer("lda.topics", 50, 2));
    c.lda.alpha = r.real("lda.alpha", 0.01, 0.0, 1e300, true);
    c.lda.beta = r.real("lda.beta", 0.01, 0.0, 1e300, true);
    c.lda.iterations = static_cast<std::size_t>(r.integer("lda.iterations", 1000, 1));
    c.window_topics = static_cast<std::size_t>(r.integer("lda.window_topics", static_cast<long long>(c.lda.n_topics), 2));
    c.min_hits = static_cast<std::size_t>(r.integer("lda.min_hits", 3, 1));
    c.summary_words = static_cast<std::size_t>(r.integer("lda.summary_words", 15, 1));

    c.seed = static_cast<std::uint64_t>(r.integer("run.seed", 1, 0));
    c.lda.seed = derive_seed(c.seed, "lda");

    ModelSpec base;
    base.en_lambda = r.real("models.en_lambda", 0.01, 0.0);
    base.en_l1_ratio = r.real("models.en_l1_ratio", 0.5, 0.0, 1.0);
    base.en_tol = r.real("models.en_tol", 1e-7, 0.0, 1e300, true);
    base.en_max_iter = static_cast<std::size_t>(r.integer("models.en_max_iter", 10000, 1));
    base.lr_l2 = r.real("models.lr_l2", 1e-3, 0.0);
    base.lr_tol = r.real("models.lr_tol", 1e-6, 0.0, 1e300, true);
    base.lr_max_iter = static_cast<std::size_t>(r.integer("models.lr_max_iter", 1000, 1));
    base.svm_lambda = r.real("models.svm_lambda", 1e-4, 0.0, 1e300, true);
    base.svm_kernel = r.parse_with("models.svm_kernel", "rbf", parse_kernel);
    base.svm_gamma = ascii_lower(r.str("models.svm_gamma", "0.5")) == "auto"
                         ? 0.0
                         : r.real("models.svm_gamma", 0.5, 0.0, 1e300, true);
    base.svm_tol = r.real("models.svm_tol", 1e-3, 0.0, 1e300, true);
    base.rf_trees = static_cast<std::size_t>(r.integer("models.rf_trees", 500, 1));
    base.rf_max_depth = static_cast<std::size_t>(r.integer("models.rf_max_depth", 3, 1));
    base.rf_features = static_cast<std::size_t>(r.integer("models.rf_features", 30, 1));
    base.seed = derive_seed(c.seed, "forest");
    c.regression = base;
    c.regression.kind = r.parse_with("models.regression", "elastic_net", parse_model_kind);
    if (c.regression.kind != ModelKind::elastic_net) r.fail("models.regression", "regression model must be elastic_net");
    for (const auto& name : detail::split_list(r.str("models.classifiers", "svm, lr, rf"))) {
        ModelSpec s = base;
        s.kind = r.convert("models.classifiers", name, parse_model_kind);
        if (!s.is_classifier()) r.fail("models.classifiers", "'" + name + "' is not a classifier");
        c.classifiers.push_back(s);
    }

    const auto protocol = ascii_lower(r.str("evaluation.protocol", "both"));
    if (protocol != "kfold" && protocol != "temporal" && protocol != "both" && protocol != "none")
        r.fail("evaluation.protocol", "expected kfold, temporal, both or none");
    c.run_kfold = protocol == "kfold" || protocol == "both";
    c.run_temporal = protocol == "temporal" || protocol == "both";
    c.folds = static_cast<std::size_t>(r.integer("evaluation.folds", 10, 2));
    const auto ri = ascii_lower(r.str("evaluation.regression_instances", "user"));
    if (ri != "user" && ri != "document") r.fail("evaluation.regression_instances", "expected user or document");
    c.regression_by_user = ri == "user";
    const auto ti = ascii_lower(r.str("evaluation.temporal_instances", "topic"));
    if (ti != "topic" && ti != "document") r.fail("evaluation.temporal_instances", "expected topic or document");
    c.temporal_instances = ti == "topic" ? InstanceLevel::topic : InstanceLevel::document;
    c.threshold = r.real("evaluation.threshold", 0.5, 0.0, 1.0);
    c.p_value.method = r.parse_with("evaluation.p_value", "permutation", parse_pvalue_method);
    c.p_value.permutations = static_cast<std::size_t>(r.integer("evaluation.permutations", 10000, 1));
    c.p_value.seed = derive_seed(c.seed, "permutation");

    c.run_similarity = r.boolean("similarity.enabled", true);
    c.run_trend = r.boolean("trend.enabled", true);
    c.write_feature_matrices = r.boolean("output.feature_matrices", true);
    auto& s = c.similarity;
    s.top_k = static_cast<std::size_t>(r.integer("similarity.top_k", 15, 1));
    s.retain_k = static_cast<std::size_t>(r.integer("similarity.retain_k", 10, 1));
    if (s.top_k < s.retain_k) r.fail("similarity.retain_k", "must not exceed top_k");
    s.epsilon = r.real("similarity.epsilon", kDefaultSmoothing, 0.0, 1.0, true);
    const auto agg = ascii_lower(r.str("similarity.aggregate", "all_pairs"));
    if (agg != "all_pairs" && agg != "best_match") r.fail("similarity.aggregate", "expected all_pairs or best_match");
    s.aggregate = agg == "all_pairs" ? PairAggregate::all_pairs : PairAggregate::best_match;
    s.table_metric = ascii_lower(r.str("similarity.table_metric", "jaccard"));
    if (s.table_metric != "jaccard" && s.table_metric != "js") r.fail("similarity.table_metric", "expected jaccard or js");
    s.min_hits = c.min_hits;
    s.p_value = c.p_value;

    const auto ls = ascii_lower(r.str("labels.source", "weak_label"));
    if (ls != "weak_label" && ls != "external") r.fail("labels.source", "expected weak_label or external");
    c.label_source = ls == "external" ? LabelSource::external : LabelSource::weak_label;
    return c;
}

/// Replaces the root seed and every substream derived from it.
inline void apply_seed(PipelineConfig& c, std::uint64_t seed) {
    c.seed = seed;
    c.lda.seed = derive_seed(seed, "lda");
    c.regression.seed = derive_seed(seed, "forest");
    for (auto& m : c.classifiers) m.seed = derive_seed(seed, "forest");
    c.p_value.seed = derive_seed(seed, "permutation");
    c.similarity.p_value.seed = c.p_value.seed;
}

inline PipelineConfig parse_config(const std::filesystem::path& path, bool strict = true) {
    auto in = open_input(path);
    const auto cf = ConfigFile::parse(in, path.string(), path.has_parent_path() ? path.parent_path() : ".");
    return resolve_config(cf, strict);
}

inline nlohmann::ordered_json PipelineConfig::to_json() const {
    nlohmann::ordered_json j;
    j["paths"] = {{"corpus", corpus.string()},
                  {"corpus_format", corpus_format == PostFormat::jsonl ? "jsonl" : "csv"},
                  {"category_dictionary", category_dictionary.string()},
                  {"emotion_lexicon", emotion_lexicon.string()},
                  {"psycholinguistic_db", psycholinguistic_db.string()},
                  {"term_list", term_list.string()},
                  {"synonyms", synonyms ? synonyms->string() : ""},
                  {"output_dir", output_dir.string()}};
    j["corpus"] = {{"window_origin", window_origin ? window_origin->str() : "min-date"},
                   {"period_boundary", period_boundary ? period_boundary->str() : ""},
                   {"min_posts", min_posts}};
    std::vector<std::string> pairs;
    for (const auto& [a, b] : filter.exclusion_cooccurrence) pairs.push_back(a + " | " + b);
    j["filter"] = {{"keywords", filter.keywords},
                   {"exclusion_cooccurrence", pairs},
                   {"allowed_languages", filter.allowed_languages},
                   {"drop_retweets", filter.drop_retweets},
                   {"drop_media_only", filter.drop_media_only},
                   {"drop_keyword_only", filter.drop_keyword_only},
                   {"dedup", filter.dedup},
                   {"date_start", filter.date_range ? filter.date_range->first.str() : ""},
                   {"date_end", filter.date_range ? filter.date_range->second.str() : ""}};
    std::vector<std::string> sets;
    for (auto s : feature_sets) sets.push_back(to_string(s));
    j["features"] = {{"bigram_vocab", bigram_vocab},
                     {"pronoun_category", pronoun_category},
                     {"liwc_categories", liwc_categories},
                     {"feature_sets", sets}};
    j["lda"] = {{"topics", lda.n_topics},         {"alpha", lda.alpha},     {"beta", lda.beta},
                {"iterations", lda.iterations},   {"window_topics", window_topics},
                {"min_hits", min_hits},           {"summary_words", summary_words}};
    std::vector<std::string> cls;
    for (const auto& m : classifiers) cls.push_back(to_string(m.kind));
    j["models"] = {{"regression", to_string(regression.kind)},
                   {"classifiers", cls},
                   {"en_lambda", regression.en_lambda},
                   {"en_l1_ratio", regression.en_l1_ratio},
                   {"lr_l2", regression.lr_l2},
                   {"svm_lambda", regression.svm_lambda},
                   {"svm_kernel", to_string(regression.svm_kernel)},
                   {"svm_gamma", regression.svm_gamma > 0.0 ? nlohmann::ordered_json(regression.svm_gamma)
                                                            : nlohmann::ordered_json("auto")},
                   {"rf_trees", regression.rf_trees},
                   {"rf_max_depth", regression.rf_max_depth},
                   {"rf_features", regression.rf_features}};
    j["evaluation"] = {{"kfold", run_kfold},
                       {"temporal", run_temporal},
                       {"folds", folds},
                       {"regression_instances", regression_by_user ? "user" : "document"},
                       {"temporal_instances", temporal_instances == InstanceLevel::topic ? "topic" : "document"},
                       {"threshold", threshold},
                       {"p_value", to_string(p_value.method)},
                       {"permutations", p_value.permutations}};
    j["similarity"] = {{"enabled", run_similarity},
                       {"top_k", similarity.top_k},
                       {"retain_k", similarity.retain_k},
                       {"epsilon", similarity.epsilon},
                       {"aggregate", similarity.aggregate == PairAggregate::all_pairs ? "all_pairs" : "best_match"},
                       {"table_metric", similarity.table_metric}};
    j["trend"] = {{"enabled", run_trend}};
    j["output"] = {{"feature_matrices", write_feature_matrices}};
    j["labels"] = {{"source", label_source == LabelSource::external ? "external" : "weak_label"}};
    j["run"] = {{"seed", seed}};
    return j;
}

}  // namespace depsig
