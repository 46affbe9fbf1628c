// depsig command-line interface.
//
// Exit codes: 0 success, 1 validation error (bad input, config or usage),
// 2 runtime failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "depsig/config.hpp"
#include "depsig/pipeline.hpp"
#include "depsig/synthetic.hpp"

namespace {

using namespace depsig;

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool strict = true;
};

PipelineConfig load_config(const GlobalOptions& g) {
    if (g.config.empty()) throw ValidationError("--config is required for this command");
    auto cfg = parse_config(g.config, g.strict);
    if (g.seed) apply_seed(cfg, *g.seed);
    if (!g.out.empty()) cfg.output_dir = g.out;
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    return cfg;
}

void report(const Manifest& m) {
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << m.files.size() << " files (stages: " << join(m.stages, ", ") << ")\n";
}

std::vector<double> read_labels(const std::string& path, const std::vector<std::string>& ids) {
    auto in = open_input(path);
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!read_csv_record(in, fields, line)) throw ValidationError(path + ": empty label file");
    const auto id_col = std::find(fields.begin(), fields.end(), "instance_id") - fields.begin();
    const auto label_col = std::find(fields.begin(), fields.end(), "label") - fields.begin();
    if (static_cast<std::size_t>(id_col) == fields.size() || static_cast<std::size_t>(label_col) == fields.size())
        throw ParseError(path, 1, "header needs instance_id and label columns");
    std::unordered_map<std::string, double> by_id;
    while (read_csv_record(in, fields, line)) {
        if (fields.size() <= static_cast<std::size_t>(std::max(id_col, label_col)))
            throw ParseError(path, line, "too few columns");
        const auto v = parse_double(fields[label_col]);
        if (!v) throw ParseError(path, line, "label is not a number");
        by_id[fields[id_col]] = *v;
    }
    std::vector<double> out;
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw ValidationError(path + ": no label for instance '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

FeatureMatrix load_features(const std::string& path) {
    auto in = open_input(path);
    return read_feature_csv(in, path);
}

int run(int argc, char** argv) {
    CLI::App app{"Depression-signal text analytics: lexicon features, topic models, evaluation and topic similarity."};
    app.require_subcommand(1);
    GlobalOptions g;
    std::uint64_t seed_value = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", g.config, "Pipeline config file");
        sub->add_option("--seed", seed_value, "Override the root seed")->each([&](const std::string&) { g.seed = seed_value; });
        sub->add_option("--out", g.out, "Output directory (overrides paths.output_dir)");
        sub->add_flag("--strict,!--no-strict", g.strict, "Reject unknown config keys (default on)");
    };

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load, validate and filter a corpus");
    add_common(ingest);

    // lexicon validate
    auto* lexicon = app.add_subcommand("lexicon", "Lexicon utilities");
    lexicon->require_subcommand(1);
    auto* lex_validate = lexicon->add_subcommand("validate", "Parse lexicon files and report their sizes");
    add_common(lex_validate);
    std::string f_dic, f_nrc, f_mrc, f_terms, f_syn;
    lex_validate->add_option("--categories", f_dic, "Category dictionary (.dic)");
    lex_validate->add_option("--emotions", f_nrc, "Emotion lexicon TSV");
    lex_validate->add_option("--psycholinguistic", f_mrc, "Psycholinguistic database TSV");
    lex_validate->add_option("--terms", f_terms, "Depression term list");
    lex_validate->add_option("--synonyms", f_syn, "Synonym map TSV");

    // features
    auto* features = app.add_subcommand("features", "Extract feature families and assembled feature sets");
    add_common(features);
    std::string feature_format = "csv";
    features->add_option("--format", feature_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

    // topics fit | flag
    auto* topics = app.add_subcommand("topics", "Topic models");
    topics->require_subcommand(1);
    auto* topics_fit = topics->add_subcommand("fit", "Fit the global and per-window topic models");
    add_common(topics_fit);
    auto* topics_flag = topics->add_subcommand("flag", "Flag depression topics of a saved model");
    add_common(topics_flag);
    std::string model_path;
    std::size_t min_hits = 0, top_k = 0;
    topics_flag->add_option("--model", model_path, "Topic model JSON")->required();
    topics_flag->add_option("--min-hits", min_hits, "Depression words needed among the top words");
    topics_flag->add_option("--top", top_k, "Top words per topic");

    // train
    auto* train = app.add_subcommand("train", "Fit one model on a feature CSV");
    add_common(train);
    std::string feat_path, label_path, kind_name = "svm", out_model;
    train->add_option("--features", feat_path, "Feature CSV (instance_id first)")->required();
    train->add_option("--labels", label_path, "CSV with instance_id and label columns")->required();
    train->add_option("--model", kind_name, "elastic_net, lr, svm or rf");
    train->add_option("--output", out_model, "Where to write the model JSON")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Run the configured evaluation, or score a saved model");
    add_common(evaluate);
    std::string eval_model, eval_features, eval_labels;
    evaluate->add_option("--model", eval_model, "Model JSON to score instead of running the config");
    evaluate->add_option("--features", eval_features, "Feature CSV for --model");
    evaluate->add_option("--labels", eval_labels, "Label CSV for --model");

    auto* similarity = app.add_subcommand("similarity", "Depression-topic similarity across windows");
    add_common(similarity);
    auto* trend = app.add_subcommand("trend", "Weekly and monthly participation in depression topics");
    add_common(trend);

    auto* pipeline = app.add_subcommand("pipeline", "Full pipeline");
    pipeline->require_subcommand(1);
    auto* pipeline_run = pipeline->add_subcommand("run", "Run every stage the config enables");
    add_common(pipeline_run);

    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus, lexicons and config");
    std::string preset = "fixture", synth_out;
    std::uint64_t synth_seed = 1;
    synth->add_option("--preset", preset, "fixture, temporal or similarity");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*ingest) {
        Pipeline p(load_config(g));
        p.ingest();
        report(p.finish());
    } else if (*lex_validate) {
        if (!g.config.empty()) {
            Pipeline p(load_config(g));
            p.load_lexicons();
            const auto& L = p.lexicons();
            std::cout << "categories: " << L.categories.categories().size() << " categories, "
                      << L.categories.entries().size() << " entries\n"
                      << "emotions: " << L.emotions.size() << " words\n"
                      << "psycholinguistic: " << L.psycholinguistic.size() << " words\n"
                      << "terms: " << L.terms.size() << " terms\n"
                      << "synonyms: " << p.synonyms().size() << " pairs\n";
            for (const auto& w : p.warnings()) std::cerr << "warning: " << w << '\n';
        } else {
            if (f_dic.empty() && f_nrc.empty() && f_mrc.empty() && f_terms.empty() && f_syn.empty())
                throw ValidationError("give --config or at least one lexicon file");
            if (!f_dic.empty())
                std::cout << "categories: " << parse_category_dictionary(f_dic).entries().size() << " entries\n";
            if (!f_nrc.empty()) std::cout << "emotions: " << parse_emotion_lexicon(f_nrc).size() << " words\n";
            if (!f_mrc.empty()) {
                std::vector<std::string> w;
                std::cout << "psycholinguistic: " << parse_psycholinguistic_db(f_mrc, &w).size() << " words\n";
                for (const auto& s : w) std::cerr << "warning: " << s << '\n';
            }
            if (!f_terms.empty()) std::cout << "terms: " << parse_term_list(f_terms).size() << " terms\n";
            if (!f_syn.empty()) std::cout << "synonyms: " << load_synonym_map(f_syn).size() << " pairs\n";
        }
    } else if (*features) {
        Pipeline p(load_config(g));
        p.build_features();
        for (auto set : p.config().feature_sets) {
            const auto m = p.document_features(set);
            auto name = to_string(set);
            std::replace(name.begin(), name.end(), '+', '_');
            p.output().write("features/set_" + name + "." + feature_format, [&](std::ostream& o) {
                if (feature_format == "csv") write_feature_csv(m, o);
                else write_feature_jsonl(m, o);
            });
        }
        p.output().commit();
        report(p.finish());
    } else if (*topics_fit) {
        Pipeline p(load_config(g));
        p.fit_windows();
        report(p.finish());
    } else if (*topics_flag) {
        auto cfg = load_config(g);
        auto in = open_input(model_path);
        const auto model = topic_model_from_json(nlohmann::json::parse(in));
        Pipeline p(cfg);
        p.load_lexicons();
        const auto k = std::min(top_k ? top_k : cfg.summary_words, model.vocab.size());
        const auto summaries = flag_depression_topics(top_words(model, k), p.lexicons().terms, p.lexicons().emotions,
                                                      min_hits ? min_hits : cfg.min_hits);
        write_topic_summaries_csv(summaries, std::cout);
    } else if (*train) {
        ModelSpec spec;
        if (!g.config.empty()) spec = load_config(g).regression;
        if (g.seed) spec.seed = derive_seed(*g.seed, "forest");
        spec.kind = parse_model_kind(kind_name);
        const auto X = load_features(feat_path);
        const auto y = read_labels(label_path, X.instance_ids);
        const auto model = fit_model(spec, Matrix::from_features(X), y);
        auto out = open_output(out_model);
        auto j = model_to_json(model);
        j["feature_names"] = X.names;
        out << j.dump(2) << '\n';
        std::cout << "wrote " << out_model << '\n';
    } else if (*evaluate) {
        if (!eval_model.empty()) {
            if (eval_features.empty() || eval_labels.empty())
                throw ValidationError("--model needs --features and --labels");
            auto in = open_input(eval_model);
            const auto j = nlohmann::json::parse(in);
            const auto model = model_from_json(j);
            const auto X = load_features(eval_features);
            if (j.contains("feature_names") && j.at("feature_names").get<std::vector<std::string>>() != X.names)
                throw ValidationError("feature columns differ from the ones the model was trained on");
            const auto y = read_labels(eval_labels, X.instance_ids);
            const auto pred = predict(model, Matrix::from_features(X));
            nlohmann::ordered_json out;
            out["n_instances"] = y.size();
            if (pred.labels.empty()) {
                const auto c = pearson(pred.scores, y, {PValueMethod::analytic, 0, 0});
                out["pearson_r"] = c.coefficient;
                out["p_value"] = c.p_value;
                out["p_method"] = to_string(c.method);
            } else {
                const auto r = f1_report(pred.labels, y);
                out["precision"] = r.precision;
                out["recall"] = r.recall;
                out["f1"] = r.f1;
            }
            std::cout << out.dump(2) << '\n';
        } else {
            Pipeline p(load_config(g));
            if (p.config().run_kfold) p.evaluate_regression();
            if (p.config().run_temporal) p.evaluate_temporal();
            report(p.finish());
        }
    } else if (*similarity) {
        Pipeline p(load_config(g));
        p.similarity();
        report(p.finish());
    } else if (*trend) {
        Pipeline p(load_config(g));
        p.trend();
        report(p.finish());
    } else if (*pipeline_run) {
        Pipeline p(load_config(g));
        report(p.run());
    } else if (*synth) {
        synth::write_bundle(synth::parse_preset(preset), synth_seed, synth_out);
        std::cout << "wrote " << preset << " bundle to " << synth_out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const depsig::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
