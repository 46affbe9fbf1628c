#pragma once

// Correlation with permutation or analytic p-values, binary F1, stratified
// k-fold splits, the last-window temporal split, and cross-validation.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/models.hpp"

namespace depsig {

enum class PValueMethod { permutation, analytic };

inline std::string to_string(PValueMethod m) { return m == PValueMethod::permutation ? "permutation" : "t-approximation"; }

inline PValueMethod parse_pvalue_method(std::string_view s) {
    if (s == "permutation") return PValueMethod::permutation;
    if (s == "analytic" || s == "t") return PValueMethod::analytic;
    throw ValidationError("unknown p-value method '" + std::string(s) + "'");
}

struct PValueOptions {
    PValueMethod method = PValueMethod::permutation;
    std::size_t permutations = 10000;
    std::uint64_t seed = 1;
};

struct Correlation {
    double coefficient = 0.0;
    double p_value = 1.0;
    PValueMethod method = PValueMethod::permutation;
};

namespace detail {

inline void check_corr_input(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("correlation inputs differ in length");
    if (x.size() < 3) throw ValidationError("correlation needs at least 3 points");
    for (auto s : {x, y}) {
        for (double v : s)
            if (!std::isfinite(v)) throw ValidationError("non-finite correlation input");
        if (std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; }))
            throw ValidationError("correlation input is constant");
    }
}

inline double pearson_r(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Two-sided p-value. Permutation: (1 + #{|r_perm| >= |r|}) / (1 + n_perm).
inline double correlation_p(std::span<const double> x, std::span<const double> y, double r,
                            const PValueOptions& opts) {
    const std::size_t n = x.size();
    if (opts.method == PValueMethod::analytic) {
        if (std::abs(r) >= 1.0) return 0.0;
        const double df = static_cast<double>(n) - 2.0;
        const double t = r * std::sqrt(df / (1.0 - r * r));
        boost::math::students_t dist(df);
        return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
    }
    Rng rng(opts.seed);
    std::vector<double> perm(y.begin(), y.end());
    std::size_t extreme = 0;
    const double threshold = std::abs(r) - 1e-12;
    for (std::size_t k = 0; k < opts.permutations; ++k) {
        rng.shuffle(perm);
        if (std::abs(pearson_r(x, perm)) >= threshold) ++extreme;
    }
    return static_cast<double>(extreme + 1) / static_cast<double>(opts.permutations + 1);
}

}  // namespace detail

inline Correlation pearson(std::span<const double> x, std::span<const double> y, const PValueOptions& opts = {}) {
    detail::check_corr_input(x, y);
    Correlation c;
    c.coefficient = detail::pearson_r(x, y);
    c.method = opts.method;
    c.p_value = detail::correlation_p(x, y, c.coefficient, opts);
    return c;
}

/// 1-based ranks; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline Correlation spearman(std::span<const double> x, std::span<const double> y, const PValueOptions& opts = {}) {
    detail::check_corr_input(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    Correlation c;
    c.coefficient = detail::pearson_r(rx, ry);
    c.method = opts.method;
    c.p_value = detail::correlation_p(rx, ry, c.coefficient, opts);
    return c;
}

struct F1Report {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Precision/recall/F1 for the positive class (label 1).
inline F1Report f1_report(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw ValidationError("f1_report: length mismatch");
    F1Report r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] > 0.5, t = truth[i] > 0.5;
        if (p && t) ++r.tp;
        else if (p) ++r.fp;
        else if (t) ++r.fn;
        else ++r.tn;
    }
    r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Decile bin (0..9) of every value by rank.
inline std::vector<double> decile_bins(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> bins(values.size());
    for (std::size_t r = 0; r < idx.size(); ++r) bins[idx[r]] = static_cast<double>(r * 10 / idx.size());
    return bins;
}

/// Stratified folds. Each stratum is shuffled and dealt round-robin across
/// folds, continuing where the previous stratum stopped, so fold sizes and
/// per-stratum counts differ by at most one. Continuous targets are
/// stratified on decile bins.
inline std::vector<Fold> stratified_kfold(std::span<const double> labels, std::size_t k, std::uint64_t seed,
                                          bool continuous = false, std::vector<std::string>* warnings = nullptr) {
    if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
    if (labels.size() < k)
        throw ValidationError("stratified_kfold: " + std::to_string(labels.size()) + " instances for " +
                              std::to_string(k) + " folds");
    const auto strata_of = continuous ? decile_bins(labels) : std::vector<double>(labels.begin(), labels.end());
    std::map<double, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < strata_of.size(); ++i) strata[strata_of[i]].push_back(i);
    Rng rng(seed);
    std::vector<Fold> folds(k);
    std::size_t next = 0;
    for (auto& [label, members] : strata) {
        if (members.size() < k && warnings)
            warnings->push_back("stratum " + format_double(label) + " has " + std::to_string(members.size()) +
                                " members for " + std::to_string(k) + " folds");
        rng.shuffle(members);
        for (auto i : members) {
            folds[next].test.push_back(i);
            next = (next + 1) % k;
        }
    }
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(folds[f].test.begin(), folds[f].test.end());
        for (std::size_t g = 0; g < k; ++g)
            if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].test.begin(), folds[g].test.end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

/// Test = instances of the highest window index, train = the rest.
inline Fold temporal_split(std::span<const std::size_t> window_of_instance) {
    if (window_of_instance.empty()) throw ValidationError("temporal_split: no instances");
    const auto last = *std::max_element(window_of_instance.begin(), window_of_instance.end());
    const auto first = *std::min_element(window_of_instance.begin(), window_of_instance.end());
    if (first == last) throw ValidationError("temporal_split: needs at least two windows");
    Fold f;
    for (std::size_t i = 0; i < window_of_instance.size(); ++i)
        (window_of_instance[i] == last ? f.test : f.train).push_back(i);
    return f;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct EvalReport {
    std::string feature_set;
    std::string model;
    std::string protocol;
    std::uint64_t seed = 0;
    std::size_t n_instances = 0;
    std::map<std::string, double> metrics;
    std::map<std::string, std::pair<double, std::string>> p_values;  ///< metric -> (p, method)
    std::vector<std::map<std::string, double>> per_fold;
    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["feature_set"] = feature_set;
        j["model"] = model;
        j["protocol"] = protocol;
        j["seed"] = seed;
        j["n_instances"] = n_instances;
        j["metrics"] = metrics;
        auto& p = j["p_values"];
        p = nlohmann::ordered_json::object();
        for (const auto& [k, v] : p_values) p[k] = {{"p", v.first}, {"method", v.second}};
        j["per_fold"] = per_fold;
        j["warnings"] = warnings;
        return j;
    }
};

/// Flat CSV columns shared by every report row.
inline const std::vector<std::string>& eval_csv_metrics() {
    static const std::vector<std::string> cols = {"pearson_r", "pearson_r_mean_fold", "precision", "recall",
                                                  "f1",        "f1_mean",             "f1_std"};
    return cols;
}

inline void write_eval_csv_header(std::ostream& out) {
    out << "feature_set,model,protocol,n_instances";
    for (const auto& c : eval_csv_metrics()) out << ',' << c;
    out << ",p_value,p_method\n";
}

inline void write_eval_csv_row(const EvalReport& r, std::ostream& out) {
    out << csv_escape(r.feature_set) << ',' << r.model << ',' << r.protocol << ',' << r.n_instances;
    for (const auto& c : eval_csv_metrics()) {
        out << ',';
        if (const auto it = r.metrics.find(c); it != r.metrics.end()) out << format_double(it->second);
    }
    out << ',';
    if (const auto it = r.p_values.find("pearson_r"); it != r.p_values.end())
        out << format_double(it->second.first) << ',' << it->second.second;
    else
        out << ',';
    out << '\n';
}

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), X.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) std::copy(X.row(idx[r]).begin(), X.row(idx[r]).end(), out.row(r).begin());
    return out;
}

inline std::vector<double> take(std::span<const double> v, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace detail

struct CrossValidationOptions {
    PValueOptions p_value;
    /// Regression scores at or above this (after min-max scaling to [0,1])
    /// count as positive when a classifier metric is requested.
    double threshold = 0.5;
};

/// Fits on each fold's train indices and scores its test indices.
/// Regression: pooled-prediction Pearson r (with p) plus the mean per-fold r.
/// Classification: pooled precision/recall/F1 plus per-fold F1 mean and std.
inline EvalReport cross_validate(const Matrix& X, std::span<const double> y, const ModelSpec& spec,
                                 const std::vector<Fold>& folds, const CrossValidationOptions& opts = {}) {
    if (X.rows != y.size()) throw ValidationError("cross_validate: X and y differ in length");
    EvalReport rep;
    rep.model = to_string(spec.kind);
    rep.protocol = "kfold";
    rep.seed = spec.seed;
    rep.n_instances = X.rows;
    std::vector<double> pooled_pred, pooled_true, fold_r, fold_f1;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& fold = folds[f];
        Model model;
        try {
            model = fit_model(spec, detail::take_rows(X, fold.train), detail::take(y, fold.train));
        } catch (const Error& e) {
            throw Error("fold " + std::to_string(f) + ": " + e.what());
        }
        const auto pred = predict(model, detail::take_rows(X, fold.test));
        const auto truth = detail::take(y, fold.test);
        std::map<std::string, double> fm;
        fm["fold"] = static_cast<double>(f);
        fm["n_test"] = static_cast<double>(fold.test.size());
        if (spec.is_classifier()) {
            const auto r = f1_report(pred.labels, truth);
            fm["precision"] = r.precision;
            fm["recall"] = r.recall;
            fm["f1"] = r.f1;
            fold_f1.push_back(r.f1);
            pooled_pred.insert(pooled_pred.end(), pred.labels.begin(), pred.labels.end());
        } else {
            try {
                const double r = pearson(pred.scores, truth, {PValueMethod::analytic, 0, 0}).coefficient;
                fm["pearson_r"] = r;
                fold_r.push_back(r);
            } catch (const ValidationError&) {
                rep.warnings.push_back("fold " + std::to_string(f) + ": correlation undefined");
            }
            pooled_pred.insert(pooled_pred.end(), pred.scores.begin(), pred.scores.end());
        }
        pooled_true.insert(pooled_true.end(), truth.begin(), truth.end());
        rep.per_fold.push_back(std::move(fm));
    }
    if (spec.is_classifier()) {
        const auto r = f1_report(pooled_pred, pooled_true);
        rep.metrics["precision"] = r.precision;
        rep.metrics["recall"] = r.recall;
        rep.metrics["f1"] = r.f1;
        rep.metrics["f1_mean"] = detail::mean_of(fold_f1);
        rep.metrics["f1_std"] = detail::sample_std(fold_f1);
    } else {
        const auto c = pearson(pooled_pred, pooled_true, opts.p_value);
        rep.metrics["pearson_r"] = c.coefficient;
        rep.metrics["pearson_r_mean_fold"] = detail::mean_of(fold_r);
        rep.p_values["pearson_r"] = {c.p_value, to_string(c.method)};
    }
    return rep;
}

/// Min-max scales scores to [0,1] and thresholds them into {0,1} labels.
inline std::vector<double> binarize_scores(std::span<const double> scores, double threshold = 0.5) {
    if (scores.empty()) return {};
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    const double range = *hi - *lo;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double s = range > 0 ? (scores[i] - *lo) / range : 0.0;
        out[i] = s >= threshold ? 1.0 : 0.0;
    }
    return out;
}

}  // namespace depsig
