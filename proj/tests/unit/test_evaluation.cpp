#include "support.hpp"

#include <set>

#include "depsig/evaluation.hpp"
#include "../support/datasets.hpp"

using namespace depsig;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> iota_vec(std::size_t n, double start = 1.0) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), start);
    return v;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

const PValueOptions kAnalytic{PValueMethod::analytic, 0, 0};

}  // namespace

TEST_CASE("pearson of perfectly linear data", "[evaluation]") {
    const auto x = iota_vec(10);
    std::vector<double> up, down;
    for (double v : x) {
        up.push_back(3.0 * v + 1.0);
        down.push_back(-0.5 * v);
    }
    CHECK_THAT(pearson(x, up, kAnalytic).coefficient, WithinAbs(1.0, 1e-12));
    CHECK_THAT(pearson(x, down, kAnalytic).coefficient, WithinAbs(-1.0, 1e-12));
    CHECK(pearson(x, up, kAnalytic).p_value == 0.0);
}

TEST_CASE("pearson worked example and oracle", "[evaluation]") {
    const std::vector<double> x = {1, 2, 3, 4}, y = {1, 3, 2, 4};
    CHECK_THAT(pearson(x, y, kAnalytic).coefficient, WithinAbs(0.8, 1e-12));
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto a = gaussian(15, s), b = gaussian(15, s + 100);
        CHECK_THAT(pearson(a, b, kAnalytic).coefficient, WithinAbs(datasets::pearson_oracle(a, b), 1e-12));
    }
}

TEST_CASE("spearman examples", "[evaluation]") {
    const auto x = iota_vec(10);
    std::vector<double> e;
    for (double v : x) e.push_back(std::exp(v));
    CHECK_THAT(spearman(x, e, kAnalytic).coefficient, WithinAbs(1.0, 1e-12));
    CHECK_THAT(pearson(x, e, kAnalytic).coefficient, !WithinAbs(1.0, 1e-3));

    // Σd² = 30 over n = 5 gives 1 - 6·30/120.
    CHECK_THAT(spearman(iota_vec(5), std::vector<double>{3, 4, 5, 1, 2}, kAnalytic).coefficient,
               WithinAbs(-0.5, 1e-12));

    CHECK(average_ranks(std::vector<double>{1, 1, 2}) == std::vector<double>{1.5, 1.5, 3.0});
    CHECK(average_ranks(std::vector<double>{5, 2, 5, 5}) == std::vector<double>{3.0, 1.0, 3.0, 3.0});
}

TEST_CASE("spearman equals pearson of average ranks", "[evaluation]") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a, b;
        for (int i = 0; i < 25; ++i) {
            a.push_back(static_cast<double>(rng.below(6)));
            b.push_back(rng.normal());
        }
        const auto ra = average_ranks(a), rb = average_ranks(b);
        CHECK_THAT(spearman(a, b, kAnalytic).coefficient, WithinAbs(datasets::pearson_oracle(ra, rb), 1e-12));
    }
}

TEST_CASE("correlation invariances", "[evaluation]") {
    const auto x = gaussian(30, 1), y = gaussian(30, 2);
    const double r = pearson(x, y, kAnalytic).coefficient;
    std::vector<double> affine, negated, cubed;
    for (double v : x) {
        affine.push_back(4.0 * v - 7.0);
        negated.push_back(-v);
        cubed.push_back(v * v * v);
    }
    CHECK_THAT(pearson(affine, y, kAnalytic).coefficient, WithinAbs(r, 1e-12));
    CHECK_THAT(pearson(negated, y, kAnalytic).coefficient, WithinAbs(-r, 1e-12));
    CHECK_THAT(pearson(y, x, kAnalytic).coefficient, WithinAbs(r, 1e-12));
    CHECK_THAT(spearman(cubed, y, kAnalytic).coefficient, WithinAbs(spearman(x, y, kAnalytic).coefficient, 1e-12));
}

TEST_CASE("permutation p-values", "[evaluation]") {
    const auto x = gaussian(20, 3);
    std::vector<double> y;
    Rng rng(4);
    for (double v : x) y.push_back(v + 0.1 * rng.normal());
    const auto strong = pearson(x, y, {PValueMethod::permutation, 10000, 1});
    CHECK(strong.p_value <= 0.001);
    CHECK(strong.p_value >= 1.0 / 10001.0);
    CHECK(strong.method == PValueMethod::permutation);

    int insignificant = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        auto shuffled = y;
        Rng(s).shuffle(shuffled);
        insignificant += pearson(x, shuffled, {PValueMethod::permutation, 2000, s}).p_value > 0.05;
    }
    CHECK(insignificant >= 9);

    // Same seed, same p.
    const auto again = pearson(x, y, {PValueMethod::permutation, 10000, 1});
    CHECK(again.p_value == strong.p_value);
}

TEST_CASE("permutation and t-approximation p-values agree on moderate samples", "[evaluation]") {
    const auto x = gaussian(40, 8);
    std::vector<double> y;
    Rng rng(9);
    for (double v : x) y.push_back(0.3 * v + rng.normal());
    const double perm = pearson(x, y, {PValueMethod::permutation, 20000, 3}).p_value;
    const double t = pearson(x, y, kAnalytic).p_value;
    CHECK_THAT(perm, WithinAbs(t, 0.02));
}

TEST_CASE("correlation input errors", "[evaluation]") {
    CHECK_THROWS_WITH(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), ContainsSubstring("constant"));
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ValidationError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), ValidationError);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2, NAN}, std::vector<double>{1, 2, 3}), ValidationError);
    CHECK(parse_pvalue_method("t") == PValueMethod::analytic);
    CHECK_THROWS_AS(parse_pvalue_method("bootstrap"), ValidationError);
}

TEST_CASE("F1 report", "[evaluation]") {
    // tp 3, fp 1, fn 2, tn 2
    const std::vector<double> pred = {1, 1, 1, 1, 0, 0, 0, 0}, truth = {1, 1, 1, 0, 1, 1, 0, 0};
    const auto r = f1_report(pred, truth);
    CHECK(r.tp == 3);
    CHECK(r.fp == 1);
    CHECK(r.fn == 2);
    CHECK(r.tn == 2);
    CHECK_THAT(r.precision, WithinAbs(0.75, 1e-12));
    CHECK_THAT(r.recall, WithinAbs(0.6, 1e-12));
    CHECK_THAT(r.f1, WithinAbs(2.0 / 3.0, 1e-12));

    CHECK(f1_report(std::vector<double>{0, 0}, std::vector<double>{0, 0}).f1 == 0.0);
    CHECK(f1_report(truth, truth).f1 == 1.0);
    CHECK_THROWS_AS(f1_report(pred, std::vector<double>{1}), ValidationError);
}

TEST_CASE("stratified folds partition and balance", "[evaluation]") {
    std::vector<double> labels(103, 0.0);
    for (std::size_t i = 0; i < 103; i += 3) labels[i] = 1.0;
    const double positives = std::accumulate(labels.begin(), labels.end(), 0.0);
    const auto folds = stratified_kfold(labels, 5, 42);
    REQUIRE(folds.size() == 5);
    std::multiset<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK((f.test.size() == 20 || f.test.size() == 21));
        double pos = 0;
        for (auto i : f.test) pos += labels[i];
        CHECK(std::abs(pos - positives / 5.0) <= 1.0);
        std::set<std::size_t> train(f.train.begin(), f.train.end());
        CHECK(train.size() + f.test.size() == 103);
        for (auto i : f.test) CHECK_FALSE(train.count(i));
        seen.insert(f.test.begin(), f.test.end());
    }
    CHECK(seen.size() == 103);
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 103);

    CHECK(stratified_kfold(labels, 5, 42)[0].test == folds[0].test);
    CHECK(stratified_kfold(labels, 5, 43)[0].test != folds[0].test);
}

TEST_CASE("stratified folds on continuous targets use deciles", "[evaluation]") {
    const auto y = gaussian(100, 6);
    const auto bins = decile_bins(y);
    for (double b = 0; b < 10; ++b) CHECK(std::count(bins.begin(), bins.end(), b) == 10);
    const auto folds = stratified_kfold(y, 10, 1, true);
    for (const auto& f : folds) {
        std::set<double> deciles;
        for (auto i : f.test) deciles.insert(bins[i]);
        CHECK(deciles.size() == 10);
    }
}

TEST_CASE("stratified fold warnings and errors", "[evaluation]") {
    std::vector<double> labels(20, 0.0);
    labels[0] = labels[1] = 1.0;
    std::vector<std::string> warnings;
    stratified_kfold(labels, 5, 1, false, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK_THAT(warnings[0], ContainsSubstring("2 members for 5 folds"));
    CHECK_THROWS_AS(stratified_kfold(labels, 1, 1), ValidationError);
    CHECK_THROWS_AS(stratified_kfold(std::vector<double>{1, 0}, 3, 1), ValidationError);
}

TEST_CASE("temporal split holds out the last window", "[evaluation]") {
    const std::vector<std::size_t> w = {0, 2, 1, 2, 0};
    const auto f = temporal_split(w);
    CHECK(f.test == std::vector<std::size_t>{1, 3});
    CHECK(f.train == std::vector<std::size_t>{0, 2, 4});
    CHECK_THROWS_AS(temporal_split(std::vector<std::size_t>{3, 3}), ValidationError);
    CHECK_THROWS_AS(temporal_split(std::vector<std::size_t>{}), ValidationError);
}

TEST_CASE("cross-validation of a classifier", "[evaluation]") {
    const auto d = datasets::blobs(100, 11);
    ModelSpec spec;
    spec.kind = ModelKind::logistic;
    const auto rep = cross_validate(d.X, d.y, spec, stratified_kfold(d.y, 5, 1));
    CHECK(rep.metrics.at("f1") == 1.0);
    CHECK(rep.metrics.at("f1_mean") == 1.0);
    CHECK(rep.metrics.at("f1_std") == 0.0);
    CHECK(rep.per_fold.size() == 5);
    CHECK(rep.model == "lr");
    CHECK(rep.n_instances == 100);
}

TEST_CASE("cross-validation of a regressor pools out-of-fold predictions", "[evaluation]") {
    Matrix X(80, 2);
    Rng rng(2);
    std::vector<double> y;
    for (std::size_t i = 0; i < 80; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = rng.normal();
        y.push_back(2.0 * X(i, 0) + 0.2 * rng.normal());
    }
    ModelSpec spec;
    spec.kind = ModelKind::elastic_net;
    const auto folds = stratified_kfold(y, 10, 3, true);
    const auto rep = cross_validate(X, y, spec, folds, {{PValueMethod::permutation, 500, 1}, 0.5});
    CHECK(rep.metrics.at("pearson_r") > 0.95);
    CHECK(rep.p_values.at("pearson_r").first <= 1.0 / 501.0 + 1e-12);
    CHECK(rep.p_values.at("pearson_r").second == "permutation");

    // Oracle: refit by hand and correlate pooled predictions.
    std::vector<double> pooled(80);
    for (const auto& f : folds) {
        const auto m = fit_elastic_net(detail::take_rows(X, f.train), detail::take(y, f.train), spec.en_lambda,
                                       spec.en_l1_ratio, spec.en_tol, spec.en_max_iter);
        const auto p = predict(m, detail::take_rows(X, f.test));
        for (std::size_t k = 0; k < f.test.size(); ++k) pooled[f.test[k]] = p[k];
    }
    std::vector<double> ordered_pred, ordered_true;
    for (const auto& f : folds)
        for (auto i : f.test) {
            ordered_pred.push_back(pooled[i]);
            ordered_true.push_back(y[i]);
        }
    CHECK_THAT(rep.metrics.at("pearson_r"), WithinAbs(datasets::pearson_oracle(ordered_pred, ordered_true), 1e-12));
}

TEST_CASE("cross-validation names the failing fold", "[evaluation]") {
    const auto d = datasets::blobs(20, 1);
    std::vector<double> y(20, 0.0);
    y[3] = 1.0;
    ModelSpec spec;
    spec.kind = ModelKind::logistic;
    CHECK_THROWS_WITH(cross_validate(d.X, y, spec, stratified_kfold(y, 4, 1)), ContainsSubstring("fold "));
}

TEST_CASE("score binarization", "[evaluation]") {
    CHECK(binarize_scores(std::vector<double>{0, 5, 10, 4.9}) == std::vector<double>{0, 1, 1, 0});
    CHECK(binarize_scores(std::vector<double>{3, 3}) == std::vector<double>{0, 0});
    CHECK(binarize_scores(std::vector<double>{1, 2, 3, 4}, 0.25) == std::vector<double>{0, 1, 1, 1});
    CHECK(binarize_scores(std::vector<double>{}).empty());
}

TEST_CASE("report serialization", "[evaluation]") {
    EvalReport r;
    r.feature_set = "LIWC+PLUS";
    r.model = "svm";
    r.protocol = "kfold";
    r.n_instances = 4;
    r.metrics["f1"] = 0.5;
    r.p_values["pearson_r"] = {0.01, "permutation"};
    const auto j = r.to_json();
    CHECK(j.at("metrics").at("f1") == 0.5);
    CHECK(j.at("p_values").at("pearson_r").at("method") == "permutation");
    std::ostringstream csv;
    write_eval_csv_header(csv);
    write_eval_csv_row(r, csv);
    CHECK(csv.str() ==
          "feature_set,model,protocol,n_instances,pearson_r,pearson_r_mean_fold,precision,recall,f1,f1_mean,f1_std,"
          "p_value,p_method\n"
          "LIWC+PLUS,svm,kfold,4,,,,,0.5,,,0.01,permutation\n");
}
