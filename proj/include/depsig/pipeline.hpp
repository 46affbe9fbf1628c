#pragma once

// End-to-end orchestration: ingest, filter, window, lexicons, features,
// topic models, evaluation, similarity and trend reports, and a manifest.
// Each stage writes into the output directory through `.partial` files that
// are renamed once the stage succeeds.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/config.hpp"
#include "depsig/corpus.hpp"
#include "depsig/evaluation.hpp"
#include "depsig/features.hpp"
#include "depsig/lexicon.hpp"
#include "depsig/models.hpp"
#include "depsig/similarity.hpp"
#include "depsig/topics.hpp"

namespace depsig {

/// Hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: digest init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

struct ManifestEntry {
    std::string path;  ///< relative to the output directory, '/'-separated
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct Manifest {
    std::vector<ManifestEntry> files;
    nlohmann::ordered_json config;
    std::uint64_t seed = 0;
    std::string created;
    std::vector<std::string> stages;
    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["created"] = created;
        j["seed"] = seed;
        j["stages"] = stages;
        auto& f = j["files"];
        f = nlohmann::ordered_json::array();
        for (const auto& e : files) f.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
        j["warnings"] = warnings;
        j["config"] = config;
        return j;
    }
};

/// Checks that every listed file exists under `root` with the recorded hash.
/// Returns the paths that fail.
inline std::vector<std::string> verify_manifest(const nlohmann::json& manifest, const std::filesystem::path& root) {
    std::vector<std::string> bad;
    for (const auto& e : manifest.at("files")) {
        const auto rel = e.at("path").get<std::string>();
        const auto p = root / rel;
        if (!std::filesystem::exists(p) || sha256_file(p) != e.at("sha256").get<std::string>()) bad.push_back(rel);
    }
    return bad;
}

/// Output directory with stage-scoped commits.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }

    /// Writes `rel` as `rel.partial`; it becomes `rel` on commit().
    void write(const std::string& rel, const std::function<void(std::ostream&)>& body) {
        const auto final_path = root_ / rel;
        auto tmp = final_path;
        tmp += ".partial";
        {
            auto out = open_output(tmp);
            body(out);
            out.flush();
            if (!out) throw Error("failed writing " + tmp.string());
        }
        pending_.push_back(rel);
    }

    void commit() {
        for (const auto& rel : pending_) {
            const auto final_path = root_ / rel;
            auto tmp = final_path;
            tmp += ".partial";
            std::filesystem::rename(tmp, final_path);
            committed_.insert(rel);
        }
        pending_.clear();
    }

    /// Pending files stay on disk as `.partial`.
    void abandon() { pending_.clear(); }

    const std::set<std::string>& committed() const { return committed_; }

private:
    std::filesystem::path root_;
    std::vector<std::string> pending_;
    std::set<std::string> committed_;
};

/// One evaluation instance set: features, labels and (temporal) windows.
struct InstanceSet {
    FeatureMatrix features;
    std::vector<double> labels;
    std::vector<std::size_t> windows;
};

class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)), out_(cfg_.output_dir) {
        warnings_ = cfg_.warnings;
    }

    const PipelineConfig& config() const { return cfg_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    void ingest() {
        if (filtered_) return;
        stage("ingest", [&] {
            const auto raw = load_posts(cfg_.corpus, cfg_.corpus_format);
            auto outcome = apply_filters(raw, cfg_.filter);
            filtered_ = std::make_unique<Corpus>(std::move(outcome.corpus));
            out_.write("corpus/filtered.jsonl", [&](std::ostream& o) { write_posts_jsonl(*filtered_, o); });
            out_.write("corpus/rejections.csv", [&](std::ostream& o) { write_rejections_csv(raw, o); });
            out_.write("corpus/filter_report.csv", [&](std::ostream& o) {
                o << "rule,removed\n";
                for (const auto& name : filter_rule_names()) o << name << ',' << outcome.removed.at(name) << '\n';
                o << "kept," << filtered_->size() << '\n';
            });
            if (!raw.rejections.empty())
                warn(std::to_string(raw.rejections.size()) + " malformed records rejected");

            const auto origin = cfg_.window_origin ? *cfg_.window_origin : filtered_->min_date();
            windows_ = window_by_week(*filtered_, origin);
            std::vector<std::string> dropped;
            docs_ = tokenize_corpus(*filtered_, TokenizeOptions{}, &dropped);
            if (!dropped.empty()) warn(std::to_string(dropped.size()) + " posts have no tokens after stopword removal");
            if (docs_.empty()) throw ValidationError("no documents left after tokenization");
            std::unordered_map<std::string, const Post*> post_of;
            for (const auto& p : filtered_->posts) post_of[p.id] = &p;
            for (const auto& w : windows_)
                for (const auto& p : w.corpus.posts) window_of_post_[p.id] = w.window.index;
            for (const auto& d : docs_) {
                const auto* p = post_of.at(d.post_id);
                doc_user_.push_back(p->user_id);
                doc_window_.push_back(window_of_post_.at(d.post_id));
                doc_external_.push_back(p->label);
            }
            out_.write("corpus/windows.csv", [&](std::ostream& o) {
                o << "window,start,end,posts,documents,period\n";
                std::vector<std::size_t> ndocs(windows_.size(), 0);
                for (auto w : doc_window_) ++ndocs[w];
                for (const auto& w : windows_)
                    o << w.window.index << ',' << w.window.start.str() << ',' << w.window.end.str() << ','
                      << w.corpus.size() << ',' << ndocs[w.window.index] << ',' << period_of(w.window) << '\n';
            });
        });
    }

    void load_lexicons() {
        if (lex_) return;
        stage("lexicons", [&] {
            auto lex = std::make_unique<Lexicons>();
            lex->categories = parse_category_dictionary(cfg_.category_dictionary);
            lex->emotions = parse_emotion_lexicon(cfg_.emotion_lexicon);
            std::vector<std::string> w;
            lex->psycholinguistic = parse_psycholinguistic_db(cfg_.psycholinguistic_db, &w);
            for (auto& s : w) warn(s);
            lex->terms = parse_term_list(cfg_.term_list);
            if (cfg_.synonyms) synonyms_ = load_synonym_map(*cfg_.synonyms);
            const auto pid = lex->categories.category_id(cfg_.pronoun_category);
            if (!pid) throw ValidationError("pronoun category '" + cfg_.pronoun_category + "' is not in the dictionary");
            pronoun_id_ = *pid;
            for (const auto& name : cfg_.liwc_categories) {
                const auto id = lex->categories.category_id(name);
                if (!id) throw ValidationError("LIWC category '" + name + "' is not in the dictionary");
                liwc_enabled_.push_back(*id);
            }
            out_.write("lexicons/summary.csv", [&](std::ostream& o) {
                o << "lexicon,entries\n";
                o << "category_dictionary," << lex->categories.entries().size() << '\n';
                o << "emotion_lexicon," << lex->emotions.size() << '\n';
                o << "psycholinguistic_db," << lex->psycholinguistic.size() << '\n';
                o << "term_list," << lex->terms.size() << '\n';
                o << "synonyms," << synonyms_.size() << '\n';
            });
            lex_ = std::move(lex);
        });
    }

    void build_features() {
        if (!parts_.empty()) return;
        ingest();
        load_lexicons();
        stage("features", [&] {
            const auto& L = *lex_;
            parts_[FeatureFamily::liwc] = stack_vectors(
                docs_, [&](const TokenizedDoc& d) { return liwc_features(d, L.categories, pronoun_id_, liwc_enabled_); });
            parts_[FeatureFamily::plus] = stack_vectors(
                docs_, [&](const TokenizedDoc& d) { return plus_features(d, L.terms, L.emotions, L.psycholinguistic); });
            parts_[FeatureFamily::bigram] = tfidf_bigrams(docs_, cfg_.bigram_vocab);

            for (std::size_t i = 0; i < docs_.size(); ++i) {
                if (cfg_.label_source == LabelSource::external) {
                    if (!doc_external_[i])
                        throw ValidationError("post '" + docs_[i].post_id + "' has no label but labels.source = external");
                    doc_label_.push_back(*doc_external_[i]);
                } else {
                    doc_label_.push_back(weak_label(docs_[i], L.terms, L.emotions));
                }
            }
            out_.write("features/labels.csv", [&](std::ostream& o) {
                o << "instance_id,user_id,window,label\n";
                for (std::size_t i = 0; i < docs_.size(); ++i)
                    o << csv_escape(docs_[i].post_id) << ',' << csv_escape(doc_user_[i]) << ',' << doc_window_[i] << ','
                      << format_double(doc_label_[i]) << '\n';
            });
        });
        stage("lda", [&] {
            global_ = std::make_unique<TopicModel>(fit_lda(docs_, cfg_.lda));
            parts_[FeatureFamily::lda] = doc_topic_proportions(*global_);
            const auto k = std::min(cfg_.summary_words, global_->vocab.size());
            const auto summaries = flag_depression_topics(top_words(*global_, k), lex_->terms, lex_->emotions, cfg_.min_hits);
            out_.write("topics/global_model.json",
                       [&](std::ostream& o) { o << topic_model_to_json(*global_).dump() << '\n'; });
            out_.write("topics/global_summaries.csv", [&](std::ostream& o) { write_topic_summaries_csv(summaries, o); });
            if (cfg_.write_feature_matrices)
                for (const auto& [fam, m] : parts_)
                    out_.write("features/" + family_prefix(fam) + ".csv", [&](std::ostream& o) { write_feature_csv(m, o); });
        });
    }

    /// Per-window LDA fits and depression flags.
    void fit_windows() {
        if (windows_fitted_) return;
        build_features();
        stage("window_topics", [&] {
            window_models_.clear();
            window_models_.resize(windows_.size());
            window_flags_.assign(windows_.size(), {});
            std::vector<std::vector<TokenizedDoc>> by_window(windows_.size());
            for (std::size_t i = 0; i < docs_.size(); ++i) by_window[doc_window_[i]].push_back(docs_[i]);
            for (std::size_t w = 0; w < windows_.size(); ++w) {
                const auto& wd = by_window[w];
                auto params = cfg_.lda;
                params.n_topics = cfg_.window_topics;
                params.seed = derive_seed(cfg_.seed, "lda/window/" + std::to_string(w));
                std::set<std::string> vocab;
                for (const auto& d : wd) vocab.insert(d.tokens.begin(), d.tokens.end());
                if (wd.size() < params.n_topics || vocab.size() < params.n_topics) {
                    warn("window " + std::to_string(w) + ": " + std::to_string(wd.size()) + " documents and " +
                         std::to_string(vocab.size()) + " word types, too few for " + std::to_string(params.n_topics) +
                         " topics; not fitted");
                    continue;
                }
                window_models_[w] = std::make_unique<TopicModel>(fit_lda(wd, params));
                const auto k = std::min(cfg_.summary_words, window_models_[w]->vocab.size());
                const auto summaries = flag_depression_topics(top_words(*window_models_[w], k), lex_->terms,
                                                              lex_->emotions, cfg_.min_hits);
                window_flags_[w] = flag_vector(summaries);
                out_.write("topics/window_" + std::to_string(w) + "_summaries.csv",
                           [&](std::ostream& o) { write_topic_summaries_csv(summaries, o); });
            }
            windows_fitted_ = true;
        });
    }

    /// Doc-level feature matrix for one set.
    FeatureMatrix document_features(FeatureSet set) {
        build_features();
        return assemble_features(parts_, set);
    }

    /// Instances for k-fold regression: users (mean of their documents, active
    /// users only) or documents.
    InstanceSet regression_instances(FeatureSet set) {
        auto docs = document_features(set);
        InstanceSet s;
        if (!cfg_.regression_by_user) {
            s.features = std::move(docs);
            s.labels = doc_label_;
            return s;
        }
        const auto active = select_active_users(*filtered_, cfg_.min_posts);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < docs.n_rows(); ++i)
            if (active.count(doc_user_[i])) keep.push_back(i);
        FeatureMatrix sub;
        sub.names = docs.names;
        std::vector<std::string> groups;
        std::map<std::string, std::pair<double, std::size_t>> label_acc;
        for (auto i : keep) {
            sub.add_row(docs.instance_ids[i], docs.rows[i]);
            groups.push_back(doc_user_[i]);
            auto& [sum, n] = label_acc[doc_user_[i]];
            sum += doc_label_[i];
            ++n;
        }
        s.features = mean_by_group(sub, groups);
        for (const auto& id : s.features.instance_ids) {
            const auto& [sum, n] = label_acc.at(id);
            s.labels.push_back(sum / static_cast<double>(n));
        }
        return s;
    }

    /// Turns instance scores into {0,1} classes: external labels are
    /// thresholded as given, weak-label scores after min-max scaling.
    std::vector<double> binarize_instance_scores(const std::vector<double>& scores) const {
        if (cfg_.label_source == LabelSource::weak_label) return binarize_scores(scores, cfg_.threshold);
        std::vector<double> out;
        for (double v : scores) out.push_back(v >= cfg_.threshold ? 1.0 : 0.0);
        return out;
    }

    /// Instances for the temporal protocol: per-window topics (features and
    /// score are means over their member documents) or documents.
    InstanceSet temporal_instances(FeatureSet set) {
        auto docs = document_features(set);
        InstanceSet s;
        if (cfg_.temporal_instances == InstanceLevel::document) {
            s.features = std::move(docs);
            s.labels = binarize_instance_scores(doc_label_);
            s.windows = doc_window_;
            return s;
        }
        fit_windows();
        std::unordered_map<std::string, std::size_t> row_of;
        for (std::size_t i = 0; i < docs.n_rows(); ++i) row_of[docs.instance_ids[i]] = i;
        s.features.names = docs.names;
        std::vector<double> scores;
        for (std::size_t w = 0; w < windows_.size(); ++w) {
            const auto* m = window_models_[w].get();
            if (!m) continue;
            for (std::size_t t = 0; t < m->n_topics(); ++t) {
                const auto members = topic_members(*m, t);
                if (members.empty()) continue;
                const auto v = topic_feature_vector(*m, t, docs);
                double sum = 0.0;
                for (auto d : members) sum += doc_label_[row_of.at(m->doc_ids[d])];
                s.features.add_row("w" + std::to_string(w) + "_t" + std::to_string(t), v.values);
                scores.push_back(sum / static_cast<double>(members.size()));
                s.windows.push_back(w);
            }
        }
        if (scores.empty()) throw ValidationError("no fitted window produced topic instances");
        s.labels = binarize_instance_scores(scores);
        return s;
    }

    void evaluate_regression() {
        build_features();
        stage("regression", [&] {
            std::vector<EvalReport> reports;
            std::optional<std::vector<Fold>> folds;
            for (auto set : cfg_.feature_sets) {
                auto inst = regression_instances(set);
                if (inst.labels.size() < cfg_.folds)
                    throw ValidationError(std::to_string(inst.labels.size()) + " regression instances for " +
                                          std::to_string(cfg_.folds) + " folds");
                if (!folds) {
                    std::vector<std::string> w;
                    folds = stratified_kfold(inst.labels, cfg_.folds, derive_seed(cfg_.seed, "folds"), true, &w);
                    for (auto& s : w) warn(s);
                }
                auto rep = cross_validate(Matrix::from_features(inst.features), inst.labels, cfg_.regression, *folds,
                                          {cfg_.p_value, cfg_.threshold});
                rep.feature_set = to_string(set);
                rep.seed = cfg_.seed;
                reports.push_back(std::move(rep));
            }
            write_reports("eval/table1.csv", "eval/regression.json", reports);
            regression_reports_ = std::move(reports);
        });
    }

    void evaluate_temporal() {
        build_features();
        stage("temporal", [&] {
            std::vector<EvalReport> reports;
            for (auto set : cfg_.feature_sets) {
                const auto inst = temporal_instances(set);
                const auto fold = temporal_split(inst.windows);
                const auto X = Matrix::from_features(inst.features);
                const auto Xtr = detail::take_rows(X, fold.train), Xte = detail::take_rows(X, fold.test);
                const auto ytr = detail::take(inst.labels, fold.train), yte = detail::take(inst.labels, fold.test);
                if (std::all_of(ytr.begin(), ytr.end(), [&](double v) { return v == ytr.front(); }))
                    throw ValidationError("temporal training set for " + to_string(set) + " contains a single class");
                for (const auto& spec : cfg_.classifiers) {
                    const auto model = fit_model(spec, Xtr, ytr);
                    const auto pred = predict(model, Xte);
                    const auto f1 = f1_report(pred.labels, yte);
                    EvalReport rep;
                    rep.feature_set = to_string(set);
                    rep.model = to_string(spec.kind);
                    rep.protocol = "temporal";
                    rep.seed = cfg_.seed;
                    rep.n_instances = inst.labels.size();
                    rep.metrics = {{"precision", f1.precision}, {"recall", f1.recall}, {"f1", f1.f1}};
                    rep.per_fold.push_back({{"n_train", static_cast<double>(fold.train.size())},
                                            {"n_test", static_cast<double>(fold.test.size())},
                                            {"test_window", static_cast<double>(inst.windows[fold.test.front()])}});
                    if (std::all_of(yte.begin(), yte.end(), [](double v) { return v == 0.0; }))
                        rep.warnings.push_back("test window has no positive instances");
                    reports.push_back(std::move(rep));
                }
            }
            write_reports("eval/table3.csv", "eval/temporal.json", reports);
            temporal_reports_ = std::move(reports);
        });
    }

    void similarity() {
        fit_windows();
        stage("similarity", [&] {
            std::vector<WindowTopics> fitted;
            for (std::size_t w = 0; w < windows_.size(); ++w)
                if (window_models_[w]) fitted.push_back({windows_[w].window, period_of(windows_[w].window), *window_models_[w]});
            if (fitted.size() < 2) {
                warn("similarity skipped: fewer than two fitted windows");
                return;
            }
            auto opts = cfg_.similarity;
            opts.p_value.seed = derive_seed(cfg_.seed, "permutation");
            const auto rep = window_similarity_report(fitted, lex_->terms, lex_->emotions, synonyms_, opts);
            for (const auto& w : rep.warnings) warn(w);
            similarity_report_ = rep;
            out_.write("similarity/pairs.csv", [&](std::ostream& o) { write_similarity_pairs_csv(rep, o); });
            out_.write("similarity/aggregates.json",
                       [&](std::ostream& o) { o << similarity_aggregates_json(rep).dump(2) << '\n'; });
            std::vector<std::string> labels;
            SvgSeries kl{"KL", "#4c72b0", {}}, js{"JS", "#dd8452", {}}, jac{"Jaccard", "#55a868", {}};
            for (const auto& [month, a] : rep.by_month) {
                labels.push_back(month);
                kl.values.push_back(a.mean_kl);
                js.values.push_back(a.mean_js);
                jac.values.push_back(a.mean_jaccard);
            }
            out_.write("similarity/months.svg", [&](std::ostream& o) {
                write_bar_chart_svg(o, "Depression-topic similarity by month", labels, {kl, js, jac});
            });
        });
    }

    void trend() {
        fit_windows();
        stage("trend", [&] {
            std::vector<const TopicModel*> models;
            for (const auto& m : window_models_) models.push_back(m.get());
            const auto rep = participation_trend(windows_, models, window_flags_, cfg_.min_posts);
            out_.write("trend/windows.csv", [&](std::ostream& o) { write_trend_windows_csv(rep, o); });
            out_.write("trend/months.csv", [&](std::ostream& o) { write_trend_months_csv(rep, o); });
            std::vector<std::string> wl, ml;
            SvgSeries counts{"participants", "#4c72b0", {}}, pct{"percent of active users", "#c44e52", {}};
            for (const auto& w : rep.windows) {
                wl.push_back(w.start.str());
                counts.values.push_back(static_cast<double>(w.participants));
            }
            for (const auto& m : rep.months) {
                ml.push_back(m.month);
                pct.values.push_back(m.percentage);
            }
            out_.write("trend/weekly.svg", [&](std::ostream& o) {
                write_bar_chart_svg(o, "Weekly participants in depression topics", wl, {counts});
            });
            out_.write("trend/monthly.svg", [&](std::ostream& o) {
                write_bar_chart_svg(o, "Monthly share of active users in depression topics", ml, {pct});
            });
        });
    }

    /// Runs every stage the config enables, then writes the manifest.
    Manifest run() {
        ingest();
        load_lexicons();
        build_features();
        if (cfg_.run_kfold) evaluate_regression();
        if (cfg_.run_temporal) evaluate_temporal();
        if (cfg_.run_similarity) similarity();
        if (cfg_.run_trend) trend();
        return finish();
    }

    /// Hashes every committed file and writes manifest.json.
    Manifest finish() {
        Manifest m;
        m.seed = cfg_.seed;
        m.config = cfg_.to_json();
        m.stages = stages_;
        m.warnings = warnings_;
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::ostringstream ts;
        ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        m.created = ts.str();
        for (const auto& rel : out_.committed()) {
            const auto p = out_.root() / rel;
            m.files.push_back({rel, sha256_file(p), std::filesystem::file_size(p)});
        }
        out_.write("manifest.json", [&](std::ostream& o) { o << m.to_json().dump(2) << '\n'; });
        out_.commit();
        return m;
    }

    // Read access for the CLI and tests.
    const Corpus& filtered_corpus() const { return *filtered_; }
    const std::vector<TokenizedDoc>& documents() const { return docs_; }
    const std::vector<double>& document_labels() const { return doc_label_; }
    const std::vector<std::size_t>& document_windows() const { return doc_window_; }
    const std::vector<WindowedCorpus>& windows() const { return windows_; }
    const Lexicons& lexicons() const { return *lex_; }
    const SynonymMap& synonyms() const { return synonyms_; }
    const TopicModel& global_model() const { return *global_; }
    const FeatureMatrix& family(FeatureFamily f) const { return parts_.at(f); }
    const TopicModel* window_model(std::size_t w) const { return window_models_.at(w).get(); }
    const std::vector<EvalReport>& regression_reports() const { return regression_reports_; }
    const std::vector<EvalReport>& temporal_reports() const { return temporal_reports_; }
    const std::optional<SimilarityReport>& similarity_report() const { return similarity_report_; }
    OutputDir& output() { return out_; }

private:
    template <typename F>
    void stage(const std::string& name, F&& body) {
        try {
            body();
            out_.commit();
            stages_.push_back(name);
        } catch (const ValidationError& e) {
            out_.abandon();
            throw ValidationError("stage '" + name + "': " + e.what());
        } catch (const std::exception& e) {
            out_.abandon();
            throw Error("stage '" + name + "': " + e.what());
        }
    }

    void warn(std::string msg) { warnings_.push_back(std::move(msg)); }

    std::string period_of(const TimeWindow& w) const {
        return cfg_.period_boundary && w.start < *cfg_.period_boundary ? "before" : "during";
    }

    void write_reports(const std::string& csv, const std::string& json, const std::vector<EvalReport>& reports) {
        out_.write(csv, [&](std::ostream& o) {
            write_eval_csv_header(o);
            for (const auto& r : reports) write_eval_csv_row(r, o);
        });
        out_.write(json, [&](std::ostream& o) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& r : reports) arr.push_back(r.to_json());
            o << arr.dump(2) << '\n';
        });
    }

    PipelineConfig cfg_;
    OutputDir out_;
    std::vector<std::string> warnings_;
    std::vector<std::string> stages_;

    std::unique_ptr<Corpus> filtered_;
    std::vector<WindowedCorpus> windows_;
    std::unordered_map<std::string, std::size_t> window_of_post_;
    std::vector<TokenizedDoc> docs_;
    std::vector<std::string> doc_user_;
    std::vector<std::size_t> doc_window_;
    std::vector<std::optional<double>> doc_external_;
    std::vector<double> doc_label_;

    std::unique_ptr<Lexicons> lex_;
    SynonymMap synonyms_;
    int pronoun_id_ = 0;
    std::vector<int> liwc_enabled_;

    std::map<FeatureFamily, FeatureMatrix> parts_;
    std::unique_ptr<TopicModel> global_;
    bool windows_fitted_ = false;
    std::vector<std::unique_ptr<TopicModel>> window_models_;
    std::vector<std::vector<bool>> window_flags_;
    std::vector<EvalReport> regression_reports_;
    std::vector<EvalReport> temporal_reports_;
    std::optional<SimilarityReport> similarity_report_;
};

inline Manifest run_pipeline(const PipelineConfig& cfg) { return Pipeline(cfg).run(); }

}  // namespace depsig
