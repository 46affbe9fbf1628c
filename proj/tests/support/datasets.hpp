#pragma once

// Generators and independent oracles shared by the unit and acceptance tests.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "depsig/common.hpp"
#include "depsig/corpus.hpp"
#include "depsig/models.hpp"

namespace datasets {

struct Labeled {
    depsig::Matrix X;
    std::vector<double> y;  ///< {0, 1}
};

/// Documents alternating between two disjoint vocabularies of `words` words each.
inline std::vector<depsig::TokenizedDoc> two_source_corpus(std::uint64_t seed, std::vector<int>& source,
                                                           std::size_t n_docs = 200, std::size_t length = 20,
                                                           std::size_t words = 20) {
    depsig::Rng rng(seed);
    std::vector<depsig::TokenizedDoc> docs;
    source.clear();
    for (std::size_t d = 0; d < n_docs; ++d) {
        const int s = static_cast<int>(d % 2);
        std::vector<std::string> toks;
        for (std::size_t i = 0; i < length; ++i) toks.push_back((s ? "beta" : "alpha") + std::to_string(rng.below(words)));
        docs.emplace_back("d" + std::to_string(d), std::move(toks));
        source.push_back(s);
    }
    return docs;
}

/// Two Gaussian blobs at (-2,-2) and (2,2), sd 0.5; separable with a wide margin.
inline Labeled blobs(std::size_t n, std::uint64_t seed) {
    depsig::Rng rng(seed);
    Labeled d{depsig::Matrix(n, 2), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double c = i % 2 ? 2.0 : -2.0;
        d.X(i, 0) = c + 0.5 * rng.normal();
        d.X(i, 1) = c + 0.5 * rng.normal();
        d.y.push_back(i % 2 ? 1.0 : 0.0);
    }
    return d;
}

/// Two concentric circles, radius 1 (class 1) and radius 2 (class 0), with
/// ±0.05 radial jitter. No half-plane classifies more than about two thirds
/// of the points correctly.
inline Labeled circles(std::size_t n, std::uint64_t seed) {
    depsig::Rng rng(seed);
    Labeled d{depsig::Matrix(n, 2), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const bool inner = i % 2 == 0;
        const double r = (inner ? 1.0 : 2.0) + 0.1 * (rng.uniform() - 0.5);
        const double t = 2.0 * M_PI * rng.uniform();
        d.X(i, 0) = r * std::cos(t);
        d.X(i, 1) = r * std::sin(t);
        d.y.push_back(inner ? 1.0 : 0.0);
    }
    return d;
}

/// Ordinary least squares with intercept via the normal equations and
/// Gauss-Jordan elimination with partial pivoting. Returns {b0, b1..bp}.
inline std::vector<double> ols_normal_equations(const depsig::Matrix& X, const std::vector<double>& y) {
    const std::size_t p = X.cols + 1;
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < X.rows; ++i) {
        std::vector<double> row = {1.0};
        for (std::size_t j = 0; j < X.cols; ++j) row.push_back(X(i, j));
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c) a[r][c] += row[r] * row[c];
            a[r][p] += row[r] * y[i];
        }
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t r = 0; r < p; ++r) beta[r] = a[r][p] / a[r][r];
    return beta;
}

/// Pearson r straight from the covariance formula.
inline double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    return cov / std::sqrt(vx * vy);
}

inline double accuracy(const std::vector<double>& pred, const std::vector<double>& truth) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) ok += (pred[i] > 0.5) == (truth[i] > 0.5);
    return static_cast<double>(ok) / static_cast<double>(truth.size());
}

inline std::vector<double> to_pm1(const std::vector<double>& y) {
    std::vector<double> out;
    for (double v : y) out.push_back(v > 0.5 ? 1.0 : -1.0);
    return out;
}

}  // namespace datasets
