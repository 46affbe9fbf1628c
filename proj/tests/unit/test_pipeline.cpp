#include "support.hpp"

#include <sys/wait.h>

#include "depsig/pipeline.hpp"
#include "depsig/synthetic.hpp"

using namespace depsig;
using Catch::Matchers::ContainsSubstring;

namespace {

PipelineConfig bundle_config(const testing::TempDir& dir, synth::Preset preset, std::uint64_t seed = 1,
                             const std::string& extra = "") {
    synth::write_bundle(preset, seed, dir.path());
    if (!extra.empty()) {
        std::ofstream cfg(dir / "config.ini", std::ios::app);
        cfg << extra;
    }
    auto c = parse_config(dir / "config.ini");
    c.output_dir = dir / "out";
    return c;
}

std::map<std::string, std::string> hashes(const Manifest& m) {
    std::map<std::string, std::string> out;
    for (const auto& f : m.files) out[f.path] = f.sha256;
    return out;
}

std::size_t partial_files(const std::filesystem::path& root) {
    std::size_t n = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        n += e.path().extension() == ".partial";
    return n;
}

int run_cli(const std::string& args, const std::filesystem::path& log) {
    const auto cmd = std::string(DEPSIG_CLI) + " " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("pipeline run writes a verifiable manifest", "[pipeline]") {
    testing::TempDir dir("pipe");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    const auto m = run_pipeline(cfg);
    CHECK(m.stages == std::vector<std::string>{"ingest", "lexicons", "features", "lda", "temporal"});
    const auto manifest = nlohmann::json::parse(testing::slurp(dir / "out/manifest.json"));
    CHECK(verify_manifest(manifest, dir / "out").empty());
    CHECK(manifest.at("files").size() == m.files.size());
    CHECK(manifest.at("seed") == 1);
    CHECK(manifest.at("config").at("lda").at("topics") == 8);
    CHECK(partial_files(dir / "out") == 0);
    for (const char* f : {"corpus/filtered.jsonl", "corpus/windows.csv", "features/labels.csv", "eval/table3.csv",
                          "topics/global_model.json", "lexicons/summary.csv"})
        CHECK(std::filesystem::exists(dir / "out" / f));
    // feature_matrices = false in this preset
    CHECK_FALSE(std::filesystem::exists(dir / "out/features/liwc.csv"));

    // Tampering is detected.
    testing::write_text(dir / "out/eval/table3.csv", "changed\n");
    CHECK(verify_manifest(manifest, dir / "out") == std::vector<std::string>{"eval/table3.csv"});
}

TEST_CASE("pipeline runs are reproducible", "[pipeline]") {
    testing::TempDir a("repro_a"), b("repro_b"), c("repro_c");
    const auto ma = run_pipeline(bundle_config(a, synth::Preset::temporal, 5));
    const auto mb = run_pipeline(bundle_config(b, synth::Preset::temporal, 5));
    CHECK(hashes(ma) == hashes(mb));
    const auto mc = run_pipeline(bundle_config(c, synth::Preset::temporal, 6));
    CHECK(hashes(ma).at("eval/table3.csv") != hashes(mc).at("eval/table3.csv"));
}

TEST_CASE("temporal evaluation holds out the last window", "[pipeline]") {
    testing::TempDir dir("temporal");
    Pipeline p(bundle_config(dir, synth::Preset::temporal));
    p.evaluate_temporal();
    CHECK(p.windows().size() == 6);
    const auto& reps = p.temporal_reports();
    REQUIRE(reps.size() == 4 * 3);
    for (const auto& r : reps) {
        CHECK(r.protocol == "temporal");
        CHECK(r.per_fold.at(0).at("test_window") == 5.0);
        CHECK(r.per_fold.at(0).at("n_test") + r.per_fold.at(0).at("n_train") == static_cast<double>(r.n_instances));
        CHECK(r.metrics.count("f1"));
    }
    const auto inst = p.temporal_instances(FeatureSet::liwc);
    CHECK(inst.labels.size() == p.documents().size());
    for (std::size_t i = 0; i < inst.labels.size(); ++i)
        CHECK(inst.labels[i] == (p.document_labels()[i] >= 0.5 ? 1.0 : 0.0));
}

TEST_CASE("topic-level temporal instances average their member documents", "[pipeline]") {
    testing::TempDir dir("topic_inst");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    cfg.temporal_instances = InstanceLevel::topic;
    cfg.label_source = LabelSource::weak_label;
    Pipeline q(cfg);
    const auto inst = q.temporal_instances(FeatureSet::liwc);
    std::size_t expected = 0;
    for (std::size_t w = 0; w < q.windows().size(); ++w) {
        const auto* m = q.window_model(w);
        REQUIRE(m);
        for (std::size_t t = 0; t < m->n_topics(); ++t) expected += !topic_members(*m, t).empty();
    }
    CHECK(inst.labels.size() == expected);
    CHECK(inst.features.n_rows() == expected);
    for (double v : inst.labels) CHECK((v == 0.0 || v == 1.0));
    CHECK(std::count(inst.labels.begin(), inst.labels.end(), 1.0) > 0);
    CHECK(std::count(inst.labels.begin(), inst.labels.end(), 0.0) > 0);

    // First instance against a hand computation.
    const auto* m0 = q.window_model(0);
    std::size_t t0 = 0;
    while (topic_members(*m0, t0).empty()) ++t0;
    const auto docs = q.document_features(FeatureSet::liwc);
    std::map<std::string, std::size_t> row;
    for (std::size_t i = 0; i < docs.n_rows(); ++i) row[docs.instance_ids[i]] = i;
    std::vector<double> mean(docs.n_cols(), 0.0);
    const auto members = topic_members(*m0, t0);
    for (auto d : members)
        for (std::size_t j = 0; j < mean.size(); ++j)
            mean[j] += docs.rows[row.at(m0->doc_ids[d])][j] / static_cast<double>(members.size());
    CHECK(inst.features.instance_ids[0] == "w0_t" + std::to_string(t0));
    for (std::size_t j = 0; j < mean.size(); ++j)
        CHECK_THAT(inst.features.rows[0][j], Catch::Matchers::WithinAbs(mean[j], 1e-12));
}

TEST_CASE("stage failures name the stage and leave earlier stages committed", "[pipeline]") {
    testing::TempDir dir("stage_err");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    cfg.pronoun_category = "nonexistent";
    Pipeline p(cfg);
    CHECK_THROWS_WITH(p.run(), ContainsSubstring("stage 'lexicons'") && ContainsSubstring("nonexistent"));
    CHECK(std::filesystem::exists(dir / "out/corpus/filtered.jsonl"));
    CHECK_FALSE(std::filesystem::exists(dir / "out/lexicons/summary.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "out/manifest.json"));
}

TEST_CASE("ingest failures are validation errors", "[pipeline]") {
    testing::TempDir dir("ingest_err");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    cfg.filter.allowed_languages = {"xx"};
    CHECK_THROWS_AS(Pipeline(cfg).run(), ValidationError);
    try {
        Pipeline(cfg).run();
    } catch (const ValidationError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("stage 'ingest'"));
    }
}

TEST_CASE("external labels must be present on every post", "[pipeline]") {
    testing::TempDir dir("ext");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    std::istringstream in(testing::slurp(cfg.corpus));
    std::ostringstream rewritten;
    std::string line, stripped_id;
    while (std::getline(in, line)) {
        auto j = nlohmann::ordered_json::parse(line);
        if (stripped_id.empty()) {
            j.erase("label");
            stripped_id = j.at("id").get<std::string>();
        }
        rewritten << j.dump() << '\n';
    }
    testing::write_text(cfg.corpus, rewritten.str());
    CHECK_THROWS_WITH(Pipeline(cfg).run(),
                      ContainsSubstring("labels.source = external") && ContainsSubstring(stripped_id));
}

TEST_CASE("regression instances are active users", "[pipeline]") {
    testing::TempDir dir("users");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    cfg.min_posts = 3;
    Pipeline p(cfg);
    const auto inst = p.regression_instances(FeatureSet::liwc);
    const auto active = select_active_users(p.filtered_corpus(), 3);
    CHECK(inst.features.n_rows() == active.size());
    for (const auto& id : inst.features.instance_ids) CHECK(active.count(id));
    for (double v : inst.labels) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("similarity preset separates the two periods", "[pipeline]") {
    testing::TempDir dir("sim");
    Pipeline p(bundle_config(dir, synth::Preset::similarity));
    p.similarity();
    const auto& rep = p.similarity_report();
    REQUIRE(rep);
    const auto& by = rep->by_period;
    REQUIRE(by.count("during"));
    const double before = by.count("before") ? by.at("before").mean_jaccard : 0.0;
    CHECK(by.at("during").mean_jaccard > before + 0.3);
    CHECK(std::filesystem::exists(dir / "out/similarity/aggregates.json"));
}

TEST_CASE("windows too small for the topic count are skipped with a warning", "[pipeline]") {
    testing::TempDir dir("small");
    auto cfg = bundle_config(dir, synth::Preset::temporal);
    cfg.window_topics = 400;
    Pipeline p(cfg);
    p.fit_windows();
    for (std::size_t w = 0; w < p.windows().size(); ++w) CHECK(p.window_model(w) == nullptr);
    CHECK(std::count_if(p.warnings().begin(), p.warnings().end(),
                        [](const std::string& s) { return s.find("not fitted") != std::string::npos; }) == 6);
}

TEST_CASE("cli: full run and exit codes", "[cli]") {
    testing::TempDir dir("cli");
    const auto log = dir / "log.txt";
    const auto bundle = dir / "bundle";
    REQUIRE(run_cli("synth --preset temporal --seed 2 --out '" + bundle.string() + "'", log) == 0);
    const auto cfg = "--config '" + (bundle / "config.ini").string() + "'";
    CHECK(run_cli("pipeline run " + cfg + " --out '" + (dir / "out").string() + "'", log) == 0);
    CHECK_THAT(testing::slurp(log), ContainsSubstring("wrote"));
    CHECK(std::filesystem::exists(dir / "out/manifest.json"));

    CHECK(run_cli("", log) == 1);
    CHECK(run_cli("frobnicate", log) == 1);
    CHECK(run_cli("pipeline run", log) == 1);
    CHECK_THAT(testing::slurp(log), ContainsSubstring("--config"));
    CHECK(run_cli("pipeline run --config '" + (dir / "nope.ini").string() + "'", log) == 1);
    CHECK(run_cli("synth --preset huge --out '" + (dir / "x").string() + "'", log) == 1);

    testing::write_text(dir / "typo.ini", testing::slurp(bundle / "config.ini") + "[lda]\ntopcis = 3\n");
    for (const char* f : {"corpus.jsonl", "categories.dic", "emotions.tsv", "psycholinguistic.tsv", "terms.txt",
                          "synonyms.tsv"})
        std::filesystem::copy_file(bundle / f, dir / f);
    CHECK(run_cli("ingest --config '" + (dir / "typo.ini").string() + "'", log) == 1);
    CHECK_THAT(testing::slurp(log), ContainsSubstring("did you mean 'lda.topics'"));
    CHECK(run_cli("ingest --no-strict --config '" + (dir / "typo.ini").string() + "' --out '" +
                      (dir / "lenient").string() + "'",
                  log) == 0);
    CHECK_THAT(testing::slurp(log), ContainsSubstring("warning"));

    // An output directory beneath a regular file cannot be created.
    testing::write_text(dir / "blocker", "x");
    CHECK(run_cli("ingest " + cfg + " --out '" + (dir / "blocker" / "out").string() + "'", log) == 2);
}

TEST_CASE("cli: lexicon validation, training and scoring", "[cli]") {
    testing::TempDir dir("cli_models");
    const auto log = dir / "log.txt";
    const auto bundle = dir / "bundle";
    REQUIRE(run_cli("synth --preset fixture --seed 3 --out '" + bundle.string() + "'", log) == 0);
    CHECK(run_cli("lexicon validate --categories '" + (bundle / "categories.dic").string() + "' --terms '" +
                      (bundle / "terms.txt").string() + "'",
                  log) == 0);
    CHECK_THAT(testing::slurp(log), ContainsSubstring("terms:"));
    testing::write_text(dir / "bad.dic", "%\n1\tposemo\n");
    CHECK(run_cli("lexicon validate --categories '" + (dir / "bad.dic").string() + "'", log) == 1);
    CHECK_THAT(testing::slurp(log), ContainsSubstring("bad.dic:"));

    const auto out = dir / "out";
    REQUIRE(run_cli("features --config '" + (bundle / "config.ini").string() + "' --out '" + out.string() + "'", log) ==
            0);
    CHECK(std::filesystem::exists(out / "features/set_LIWC_PLUS_bigram_LDA.csv"));
    const auto features = (out / "features/set_LIWC.csv").string();
    const auto labels = (out / "features/labels.csv").string();
    const auto model = (dir / "enet.json").string();
    REQUIRE(run_cli("train --features '" + features + "' --labels '" + labels + "' --model elastic_net --output '" +
                        model + "'",
                    log) == 0);
    REQUIRE(run_cli("evaluate --model '" + model + "' --features '" + features + "' --labels '" + labels + "'", log) ==
            0);
    const auto j = nlohmann::json::parse(testing::slurp(log));
    CHECK(j.at("pearson_r").get<double>() > 0.3);
    CHECK(j.at("n_instances").get<std::size_t>() > 1000);

    const auto other = (out / "features/set_LIWC_LDA.csv").string();
    CHECK(run_cli("evaluate --model '" + model + "' --features '" + other + "' --labels '" + labels + "'", log) == 1);
    CHECK(run_cli("train --features '" + features + "' --labels '" + labels + "' --model knn --output '" + model + "'",
                  log) == 1);
}
