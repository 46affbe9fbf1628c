#include "support.hpp"

#include <sstream>

#include "depsig/config.hpp"
#include "depsig/synthetic.hpp"

using namespace depsig;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kPaths =
    "[paths]\n"
    "corpus = corpus.jsonl\n"
    "category_dictionary = categories.dic\n"
    "emotion_lexicon = emotions.tsv\n"
    "psycholinguistic_db = psycholinguistic.tsv\n"
    "term_list = terms.txt\n";

/// Scratch directory holding every file the [paths] section points at.
struct Bundle {
    testing::TempDir dir{"config"};
    Bundle() {
        synth::write_lexicon_files(synth::make_lexicons(), dir.path());
        testing::write_text(dir / "corpus.jsonl", "");
    }

    PipelineConfig resolve(const std::string& body, bool strict = true) const {
        std::istringstream in(body);
        return resolve_config(ConfigFile::parse(in, "run.ini", dir.path()), strict);
    }
};

std::size_t error_line(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("config defaults", "[config]") {
    const Bundle b;
    const auto c = b.resolve(kPaths);
    CHECK(c.lda.n_topics == 50);
    CHECK(c.lda.alpha == 0.01);
    CHECK(c.lda.beta == 0.01);
    CHECK(c.lda.iterations == 1000);
    CHECK(c.window_topics == 50);
    CHECK(c.min_hits == 3);
    CHECK(c.similarity.top_k == 15);
    CHECK(c.similarity.retain_k == 10);
    CHECK(c.similarity.epsilon == 1e-10);
    CHECK(c.bigram_vocab == 2000);
    CHECK(c.folds == 10);
    CHECK(c.min_posts == 5);
    CHECK(c.seed == 1);
    CHECK(c.run_kfold);
    CHECK(c.run_temporal);
    CHECK(c.regression.kind == ModelKind::elastic_net);
    REQUIRE(c.classifiers.size() == 3);
    CHECK(c.classifiers[0].kind == ModelKind::svm);
    CHECK(c.classifiers[0].svm_lambda == 1e-4);
    CHECK(c.classifiers[0].svm_gamma == 0.5);
    CHECK(c.classifiers[2].rf_trees == 500);
    CHECK(c.feature_sets.size() == 4);
    CHECK(c.filter.keywords == std::set<std::string>{"covid", "coronavirus", "stayathome", "stayhome"});
    CHECK(c.p_value.method == PValueMethod::permutation);
    CHECK(c.p_value.permutations == 10000);
    CHECK(c.corpus == b.dir / "corpus.jsonl");
    CHECK(c.output_dir == "out");
    CHECK(c.warnings.empty());
}

TEST_CASE("every schema key is accepted with its default", "[config]") {
    const Bundle b;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto& [key, def] : detail::config_schema()) {
        if (key.rfind("paths.", 0) == 0) continue;
        const auto dot = key.find('.');
        sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), def);
    }
    std::string body = kPaths;
    for (const auto& [sec, kv] : sections) {
        body += "[" + sec + "]\n";
        for (const auto& [k, v] : kv) body += k + " = " + v + "\n";
    }
    const auto c = b.resolve(body);
    const auto d = b.resolve(kPaths);
    CHECK(c.to_json() == d.to_json());
}

TEST_CASE("values override defaults", "[config]") {
    const Bundle b;
    const auto c = b.resolve(std::string(kPaths) +
                             "synonyms = synonyms.tsv\n"
                             "[corpus]\nperiod_boundary = 2020-03-12\nmin_posts = 2\n"
                             "[filter]\nkeywords = Lockdown, quarantine\nexclusion_cooccurrence = a | b\n"
                             "date_start = 2020-01-01\ndate_end = 2020-06-01\n"
                             "[lda]\ntopics = 8\n"
                             "[models]\nclassifiers = rf\nsvm_gamma = auto\n"
                             "[evaluation]\nprotocol = temporal\ntemporal_instances = document\np_value = analytic\n"
                             "[similarity]\naggregate = best_match\ntable_metric = js\n"
                             "[run]\nseed = 9\n");
    CHECK(c.synonyms == b.dir / "synonyms.tsv");
    CHECK(c.period_boundary == Date::from_ymd(2020, 3, 12));
    CHECK(c.min_posts == 2);
    CHECK(c.filter.keywords == std::set<std::string>{"lockdown", "quarantine"});
    CHECK(c.filter.exclusion_cooccurrence == std::vector<std::pair<std::string, std::string>>{{"a", "b"}});
    CHECK(c.filter.date_range->second == Date::from_ymd(2020, 6, 1));
    CHECK(c.lda.n_topics == 8);
    CHECK(c.window_topics == 8);
    REQUIRE(c.classifiers.size() == 1);
    CHECK(c.classifiers[0].kind == ModelKind::forest);
    CHECK(c.regression.svm_gamma == 0.0);
    CHECK_FALSE(c.run_kfold);
    CHECK(c.run_temporal);
    CHECK(c.temporal_instances == InstanceLevel::document);
    CHECK(c.p_value.method == PValueMethod::analytic);
    CHECK(c.similarity.aggregate == PairAggregate::best_match);
    CHECK(c.similarity.table_metric == "js");
    CHECK(c.seed == 9);
    CHECK(c.lda.seed == derive_seed(9, "lda"));
    CHECK(c.to_json().at("models").at("svm_gamma") == "auto");
}

TEST_CASE("a missing required path names its key", "[config]") {
    const Bundle b;
    std::string body = kPaths;
    body.replace(body.find("corpus = corpus.jsonl\n"), 22, "");
    CHECK_THROWS_WITH(b.resolve(body), ContainsSubstring("paths.corpus"));
    CHECK_THROWS_WITH(b.resolve(std::string(kPaths) + "synonyms = nowhere.tsv\n"),
                      ContainsSubstring("file not found"));
}

TEST_CASE("unknown keys suggest the nearest known key", "[config]") {
    const Bundle b;
    const auto body = std::string(kPaths) + "[lda]\ntopcis = 20\n";
    CHECK_THROWS_WITH(b.resolve(body), ContainsSubstring("did you mean 'lda.topics'"));
    CHECK(error_line([&] { b.resolve(body); }) == 8);

    const auto lenient = b.resolve(body, false);
    REQUIRE(lenient.warnings.size() == 1);
    CHECK_THAT(lenient.warnings[0], ContainsSubstring("run.ini:8"));
    CHECK(lenient.lda.n_topics == 50);

    CHECK_THROWS_WITH(b.resolve(std::string(kPaths) + "[zzz]\nqqqqqqqqqq = 1\n"),
                      !ContainsSubstring("did you mean"));
}

TEST_CASE("config syntax errors carry line numbers", "[config]") {
    const Bundle b;
    CHECK(error_line([&] { b.resolve(std::string(kPaths) + "[lda]\ntopics = 3\ntopics = 4\n"); }) == 9);
    CHECK(error_line([&] { b.resolve("[paths\n"); }) == 1);
    CHECK(error_line([&] { b.resolve("# comment\njust words\n"); }) == 2);
    CHECK(error_line([&] { b.resolve("[]\n"); }) == 1);
    CHECK(error_line([&] { b.resolve(" = 3\n"); }) == 1);
}

TEST_CASE("out-of-range and malformed values are rejected", "[config]") {
    const Bundle b;
    const std::vector<std::string> bad = {
        "[lda]\ntopics = 1\n",
        "[lda]\nalpha = 0\n",
        "[lda]\nbeta = -1\n",
        "[lda]\niterations = ten\n",
        "[models]\nen_l1_ratio = 1.5\n",
        "[models]\nsvm_lambda = 0\n",
        "[models]\nsvm_kernel = poly\n",
        "[models]\nregression = svm\n",
        "[models]\nclassifiers = svm, elastic_net\n",
        "[evaluation]\nfolds = 1\n",
        "[evaluation]\nprotocol = holdout\n",
        "[evaluation]\nthreshold = 2\n",
        "[evaluation]\np_value = bootstrap\n",
        "[similarity]\ntop_k = 5\nretain_k = 6\n",
        "[similarity]\nepsilon = 0\n",
        "[similarity]\ntable_metric = cosine\n",
        "[filter]\ndrop_retweets = maybe\n",
        "[filter]\ndate_start = 2020-01-01\n",
        "[filter]\ndate_start = 2020-02-01\ndate_end = 2020-01-01\n",
        "[filter]\nexclusion_cooccurrence = a | b | c\n",
        "[corpus]\nwindow_origin = 2020-02-30\n",
        "[features]\nfeature_sets = LIWC, EMOJI\n",
        "[labels]\nsource = oracle\n",
        "[paths]\ncorpus_format = xml\n",
    };
    for (const auto& tail : bad) {
        INFO(tail);
        std::string body = kPaths;
        if (tail.rfind("[paths]", 0) == 0)
            body += tail.substr(8);
        else
            body += tail;
        CHECK_THROWS_AS(b.resolve(body), ValidationError);
    }
}

TEST_CASE("seed overrides reach every substream", "[config]") {
    const Bundle b;
    auto c = b.resolve(kPaths);
    apply_seed(c, 42);
    CHECK(c.seed == 42);
    CHECK(c.lda.seed == derive_seed(42, "lda"));
    for (const auto& m : c.classifiers) CHECK(m.seed == derive_seed(42, "forest"));
    CHECK(c.p_value.seed == derive_seed(42, "permutation"));
    CHECK(c.similarity.p_value.seed == c.p_value.seed);
}

TEST_CASE("config files load from disk relative to their directory", "[config]") {
    const Bundle b;
    testing::write_text(b.dir / "run.ini", kPaths);
    const auto c = parse_config(b.dir / "run.ini");
    CHECK(c.term_list == b.dir / "terms.txt");
    CHECK_THROWS_AS(parse_config(b.dir / "missing.ini"), Error);
}

TEST_CASE("preset configs resolve", "[config]") {
    for (auto p : {synth::Preset::fixture, synth::Preset::temporal, synth::Preset::similarity}) {
        testing::TempDir dir("preset");
        synth::write_bundle(p, 3, dir.path());
        const auto c = parse_config(dir / "config.ini");
        CHECK(c.seed == 3);
        CHECK(c.warnings.empty());
    }
}
