#include "support.hpp"

#include <cmath>
#include <sstream>

#include "depsig/features.hpp"
#include "depsig/synthetic.hpp"

using namespace depsig;
using Catch::Matchers::WithinAbs;
using testing::doc;

namespace {

/// Score of bigram "a b" in document t by direct counting over raw tokens.
double tfidf_oracle(const std::vector<TokenizedDoc>& docs, std::size_t t, const std::string& a, const std::string& b) {
    auto count_in = [&](const TokenizedDoc& d) {
        std::size_t n = 0;
        for (std::size_t i = 0; i + 1 < d.tokens.size(); ++i)
            if (d.tokens[i] == a && d.tokens[i + 1] == b) ++n;
        return n;
    };
    std::size_t df = 0;
    for (const auto& d : docs) df += count_in(d) > 0;
    const auto n = count_in(docs[t]);
    if (n == 0) return 0.0;
    return (1.0 + std::log(double(n))) * std::log(double(docs.size()) / double(df));
}

CategoryLexicon small_liwc() {
    CategoryLexicon lex;
    lex.add_category(1, "i");
    lex.add_category(2, "negemo");
    lex.add_category(3, "work");
    lex.add_entry({"i", false, {1}});
    lex.add_entry({"sad", true, {2}});
    lex.add_entry({"job", false, {3}});
    return lex;
}

PsycholinguisticDB small_mrc() {
    std::vector<std::string> props;
    for (int i = 0; i < 26; ++i) props.push_back(i == 0 ? "imagery" : "p" + std::to_string(i));
    PsycholinguisticDB db(props);
    std::vector<double> hopeless(26, 0.0), sad(26, 0.0), cheerful(26, 500.0);
    hopeless[0] = 300;
    hopeless[1] = 10;
    sad[0] = 400;
    db.put("hopeless", hopeless);
    db.put("sad", sad);
    db.put("cheerful", cheerful);
    return db;
}

struct PlusFixture {
    TermList who;
    EmotionLexicon nrc;
    PsycholinguisticDB mrc = small_mrc();
    PlusFixture() {
        for (auto w : {"hopeless", "sad", "cheerful", "panic attack"}) who.add(w);
        nrc.set("cheerful", *affect_index("joy"), true);
        nrc.set("sad", *affect_index("sadness"), true);
    }
};

}  // namespace

TEST_CASE("TF-IDF worked example", "[features]") {
    const std::vector<TokenizedDoc> docs = {doc("t", {"stay", "home", "stay", "home"}), doc("u", {"stay", "home"}),
                                            doc("v", {"x", "y"}), doc("w", {"y", "z"})};
    const auto m = tfidf_bigrams(docs, 10);
    const auto col = std::find(m.names.begin(), m.names.end(), "stay home") - m.names.begin();
    REQUIRE(col < static_cast<long>(m.n_cols()));
    CHECK_THAT(m.rows[0][col], WithinAbs((1.0 + std::log(2.0)) * std::log(2.0), 1e-12));
    CHECK(m.rows[2][col] == 0.0);
}

TEST_CASE("a bigram in every document scores zero", "[features]") {
    const std::vector<TokenizedDoc> docs = {doc("a", {"feel", "sad", "now"}), doc("b", {"feel", "sad"}),
                                            doc("c", {"so", "feel", "sad"})};
    const auto m = tfidf_bigrams(docs, 10);
    const auto col = std::find(m.names.begin(), m.names.end(), "feel sad") - m.names.begin();
    for (const auto& row : m.rows) CHECK(row[col] == 0.0);
}

TEST_CASE("TF-IDF matches a brute-force oracle on 50 documents", "[features]") {
    std::mt19937 gen(21);
    const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g", "h"};
    std::vector<TokenizedDoc> docs;
    for (int d = 0; d < 50; ++d) {
        std::vector<std::string> toks;
        const auto len = 2 + gen() % 12;
        for (unsigned i = 0; i < len; ++i) toks.push_back(words[gen() % words.size()]);
        docs.push_back(doc("d" + std::to_string(d), toks));
    }
    const auto m = tfidf_bigrams(docs, 1000);
    CHECK(m.n_cols() <= 64);
    for (std::size_t c = 0; c < m.n_cols(); ++c) {
        const auto space = m.names[c].find(' ');
        const auto a = m.names[c].substr(0, space), b = m.names[c].substr(space + 1);
        for (std::size_t t = 0; t < docs.size(); ++t) CHECK_THAT(m.rows[t][c], WithinAbs(tfidf_oracle(docs, t, a, b), 1e-9));
    }
}

TEST_CASE("TF-IDF keeps the highest corpus-total bigrams", "[features]") {
    const std::vector<TokenizedDoc> docs = {doc("a", {"x", "y", "x", "y", "x", "y"}), doc("b", {"p", "q"}),
                                            doc("c", {"r", "s", "t"}), doc("d", {"m", "n"})};
    const auto m = tfidf_bigrams(docs, 3);
    CHECK(m.names == std::vector<std::string>{"x y", "y x", "m n"});
    CHECK_THROWS_AS(tfidf_bigrams({doc("a", {"alone"})}, 5), ValidationError);
    CHECK_THROWS_AS(tfidf_bigrams(docs, 0), ValidationError);
}

TEST_CASE("LIWC proportions", "[features]") {
    const auto lex = small_liwc();
    const auto v = liwc_features(doc("a", {"i", "feel", "sad", "today"}), lex, 1);
    CHECK(v.names == std::vector<std::string>{"i", "negemo", "work"});
    CHECK(v.at("negemo") == 0.25);
    CHECK(v.at("i") == 0.25);
    CHECK(liwc_features(doc("b", {"i", "i"}), lex, 1).at("i") == 1.0);
    const auto none = liwc_features(doc("c", {"sunny", "walk"}), lex, 1);
    CHECK(std::all_of(none.values.begin(), none.values.end(), [](double x) { return x == 0.0; }));
    CHECK_THROWS_AS(liwc_features(doc("d", {}), lex, 1), ValidationError);
    CHECK(liwc_features(doc("e", {"sadness", "job"}), lex, 1, {3}).names == std::vector<std::string>{"i", "work"});
}

TEST_CASE("LIWC values stay within [0, 1]", "[features]") {
    const auto fx = synth::make_lexicons();
    const auto pronoun = *fx.lexicons.categories.category_id("i");
    for (const auto& sp : synth::generate_posts({})) {
        const auto toks = tokenize(sp.post.text);
        if (toks.empty()) continue;
        for (double x : liwc_features(doc(sp.post.id, toks), fx.lexicons.categories, pronoun).values) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
    }
}

TEST_CASE("PLUS averages property scores over depression words", "[features]") {
    const PlusFixture fx;
    const auto v = plus_features(doc("a", {"hopeless", "and", "sad"}), fx.who, fx.nrc, fx.mrc);
    CHECK(v.at("imagery") == 350.0);
    CHECK(v.at("p1") == 10.0);  // sad has no score there
    CHECK(v.at("p2") == 0.0);
    CHECK(v.at("match_count") == 2.0);
    CHECK(v.at("coverage") == 1.0);
    CHECK(v.size() == 28);
}

TEST_CASE("PLUS discards joy words", "[features]") {
    const PlusFixture fx;
    const auto v = plus_features(doc("a", {"cheerful"}), fx.who, fx.nrc, fx.mrc);
    CHECK(v.at("match_count") == 0.0);
    CHECK(v.at("imagery") == 0.0);
}

TEST_CASE("PLUS of a document without term matches is zero", "[features]") {
    const PlusFixture fx;
    const auto v = plus_features(doc("a", {"walk", "park"}), fx.who, fx.nrc, fx.mrc);
    CHECK(v.at("coverage") == 0.0);
    CHECK(std::all_of(v.values.begin(), v.values.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("PLUS ignores token order", "[features]") {
    const PlusFixture fx;
    std::vector<std::string> toks = {"sad", "hopeless", "walk", "sad", "cheerful", "park"};
    const auto base = plus_features(doc("a", toks), fx.who, fx.nrc, fx.mrc).values;
    std::mt19937 gen(1);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(toks.begin(), toks.end(), gen);
        CHECK(plus_features(doc("a", toks), fx.who, fx.nrc, fx.mrc).values == base);
    }
}

TEST_CASE("weak label is the depression-term share of tokens", "[features]") {
    const PlusFixture fx;
    CHECK(weak_label(doc("a", {"sad", "hopeless", "a", "b", "c", "d", "e", "f", "g", "h"}), fx.who, fx.nrc) == 0.2);
    CHECK(weak_label(doc("b", {"walk", "park"}), fx.who, fx.nrc) == 0.0);
    CHECK(weak_label(doc("c", {"sad", "hopeless"}), fx.who, fx.nrc) == 1.0);
    CHECK(weak_label(doc("d", {"panic", "attack", "x", "cheerful"}), fx.who, fx.nrc) == 0.5);
    CHECK_THROWS_AS(weak_label(doc("e", {}), fx.who, fx.nrc), ValidationError);
}

TEST_CASE("assembling LIWC and LDA concatenates columns", "[features]") {
    FeatureMatrix liwc, lda;
    liwc.names = {"c0", "c1", "c2", "c3", "c4"};
    for (int k = 0; k < 50; ++k) lda.names.push_back("topic_" + std::to_string(k));
    for (int i = 0; i < 3; ++i) {
        liwc.add_row("d" + std::to_string(i), std::vector<double>(5, i));
        lda.add_row("d" + std::to_string(i), std::vector<double>(50, 0.02));
    }
    const std::map<FeatureFamily, FeatureMatrix> parts = {{FeatureFamily::liwc, liwc}, {FeatureFamily::lda, lda}};
    const auto m = assemble_features(parts, FeatureSet::liwc_lda);
    CHECK(m.n_cols() == 55);
    CHECK(m.names.front() == "liwc:c0");
    CHECK(m.names.back() == "lda:topic_49");
    const auto back = project_family(m, FeatureFamily::lda);
    CHECK(back.names == lda.names);
    CHECK(back.rows == lda.rows);
}

TEST_CASE("a single LIWC part is returned with prefixed names", "[features]") {
    FeatureMatrix liwc;
    liwc.names = {"i", "negemo"};
    liwc.add_row("a", {0.5, 0.25});
    const auto m = assemble_features({{FeatureFamily::liwc, liwc}}, FeatureSet::liwc);
    CHECK(m.names == std::vector<std::string>{"liwc:i", "liwc:negemo"});
    CHECK(m.rows == liwc.rows);
    CHECK(m.instance_ids == liwc.instance_ids);
}

TEST_CASE("assembling parts with different instances fails", "[features]") {
    FeatureMatrix a, b;
    a.names = {"x"};
    b.names = {"y"};
    a.add_row("d1", {1});
    a.add_row("d2", {2});
    b.add_row("d1", {1});
    b.add_row("d3", {2});
    CHECK_THROWS_WITH(assemble_features({{FeatureFamily::liwc, a}, {FeatureFamily::bigram, b}}, FeatureSet::liwc_bigram),
                      Catch::Matchers::ContainsSubstring("'d3'"));
    CHECK_THROWS_AS(assemble_features({{FeatureFamily::liwc, a}}, FeatureSet::liwc_lda), ValidationError);
}

TEST_CASE("full assembly orders families and projects back exactly", "[features]") {
    std::map<FeatureFamily, FeatureMatrix> parts;
    std::size_t width = 0;
    for (auto f : {FeatureFamily::lda, FeatureFamily::bigram, FeatureFamily::plus, FeatureFamily::liwc}) {
        FeatureMatrix m;
        const auto cols = 2 + static_cast<std::size_t>(f);
        for (std::size_t c = 0; c < cols; ++c) m.names.push_back("f" + std::to_string(c));
        for (int i = 0; i < 4; ++i) m.add_row("d" + std::to_string(i), std::vector<double>(cols, i * 10.0 + double(f)));
        width += cols;
        parts[f] = m;
    }
    const auto all = assemble_features(parts, FeatureSet::liwc_plus_bigram_lda);
    CHECK(all.n_cols() == width);
    CHECK(all.names[0].rfind("liwc:", 0) == 0);
    CHECK(all.names[2].rfind("plus:", 0) == 0);
    for (const auto& [f, part] : parts) CHECK(project_family(all, f).rows == part.rows);
}

TEST_CASE("group means average rows per key", "[features]") {
    FeatureMatrix m;
    m.names = {"a", "b"};
    m.add_row("p1", {0, 2});
    m.add_row("p2", {2, 0});
    m.add_row("p3", {5, 5});
    const auto g = mean_by_group(m, {"u1", "u1", "u2"});
    CHECK(g.instance_ids == std::vector<std::string>{"u1", "u2"});
    CHECK(g.rows[0] == std::vector<double>{1, 1});
    CHECK(g.rows[1] == std::vector<double>{5, 5});
}

TEST_CASE("feature CSV round trips", "[features]") {
    FeatureMatrix m;
    m.names = {"liwc:i", "bigram:feel sad", "plus:a,b"};
    m.add_row("p1", {0.1, 1.0 / 3.0, 1e-300});
    m.add_row("p\"2", {-2.5, 0, 12345.678});
    std::stringstream s;
    write_feature_csv(m, s);
    const auto back = read_feature_csv(s);
    CHECK(back.names == m.names);
    CHECK(back.instance_ids == m.instance_ids);
    CHECK(back.rows == m.rows);

    std::stringstream j;
    write_feature_jsonl(m, j);
    std::string line;
    std::getline(j, line);
    CHECK(nlohmann::json::parse(line)["features"]["bigram:feel sad"].get<double>() == 1.0 / 3.0);

    std::istringstream bad("instance_id,x\na,1\nb,zz\n");
    CHECK_THROWS_AS(read_feature_csv(bad), ParseError);
}
