#pragma once

// Supervised learners: elastic-net linear regression (cyclic coordinate
// descent), L2 logistic regression (L-BFGS), soft-margin kernel SVM (SMO),
// and a Gini random forest.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "depsig/common.hpp"
#include "depsig/features.hpp"

namespace depsig {

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols) throw ValidationError("matrix rows have unequal length");
            std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
        }
        return m;
    }

    static Matrix from_features(const FeatureMatrix& f) { return from_rows(f.rows); }
};

namespace detail {

inline void check_xy(const Matrix& X, std::size_t n_targets, std::size_t min_rows) {
    if (X.rows != n_targets)
        throw ValidationError("X has " + std::to_string(X.rows) + " rows but y has " + std::to_string(n_targets));
    if (X.rows < min_rows) throw ValidationError("need at least " + std::to_string(min_rows) + " instances");
    for (double v : X.data)
        if (!std::isfinite(v)) throw ValidationError("non-finite value in X");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// Per-column mean and population standard deviation. Constant columns keep
/// scale 1 so they map to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& X) {
        Standardizer s;
        s.mean.assign(X.cols, 0.0);
        s.scale.assign(X.cols, 1.0);
        if (X.rows == 0) return s;
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols; ++j) s.mean[j] += X(i, j);
        for (auto& m : s.mean) m /= static_cast<double>(X.rows);
        std::vector<double> var(X.cols, 0.0);
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols; ++j) {
                const double d = X(i, j) - s.mean[j];
                var[j] += d * d;
            }
        for (std::size_t j = 0; j < X.cols; ++j) {
            const double sd = std::sqrt(var[j] / static_cast<double>(X.rows));
            s.scale[j] = sd > 1e-12 ? sd : 1.0;
        }
        return s;
    }

    static Standardizer identity(std::size_t cols) { return {std::vector<double>(cols, 0.0), std::vector<double>(cols, 1.0)}; }

    Matrix apply(const Matrix& X) const {
        if (X.cols != mean.size())
            throw ValidationError("expected " + std::to_string(mean.size()) + " features, got " + std::to_string(X.cols));
        Matrix Z(X.rows, X.cols);
        for (std::size_t i = 0; i < X.rows; ++i)
            for (std::size_t j = 0; j < X.cols; ++j) Z(i, j) = (X(i, j) - mean[j]) / scale[j];
        return Z;
    }
};

// ---------------------------------------------------------------------------
// Elastic net
// ---------------------------------------------------------------------------

struct ElasticNetModel {
    std::vector<double> weights;  ///< in original feature units
    double intercept = 0.0;
    double lambda = 0.01;
    double l1_ratio = 0.5;
    Standardizer standardizer;
    std::size_t iterations = 0;
    bool converged = false;
    /// Objective after each sweep (standardized problem).
    std::vector<double> objective_trace;
};

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

/// Minimizes (1/2N)||y - Zw - b||^2 + λ(ρ||w||_1 + (1-ρ)/2 ||w||^2) over the
/// standardized design Z by cyclic coordinate descent.
inline ElasticNetModel fit_elastic_net(const Matrix& X, std::span<const double> y, double lambda, double l1_ratio,
                                       double tol = 1e-7, std::size_t max_iter = 10000) {
    detail::check_xy(X, y.size(), 2);
    if (lambda < 0.0) throw ValidationError("elastic net lambda must be >= 0");
    if (l1_ratio < 0.0 || l1_ratio > 1.0) throw ValidationError("elastic net l1_ratio must lie in [0, 1]");
    for (double v : y)
        if (!std::isfinite(v)) throw ValidationError("non-finite value in y");
    const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    if (std::all_of(y.begin(), y.end(), [&](double v) { return std::abs(v - y_mean) < 1e-12; }))
        throw ValidationError("elastic net target is constant");

    ElasticNetModel m;
    m.lambda = lambda;
    m.l1_ratio = l1_ratio;
    m.standardizer = Standardizer::fit(X);
    const Matrix Z = m.standardizer.apply(X);
    const std::size_t N = Z.rows, P = Z.cols;
    const double n = static_cast<double>(N);

    // Column-major copy for the coordinate loops.
    std::vector<std::vector<double>> cols(P, std::vector<double>(N));
    std::vector<double> col_sq(P, 0.0);
    for (std::size_t j = 0; j < P; ++j) {
        for (std::size_t i = 0; i < N; ++i) cols[j][i] = Z(i, j);
        for (double v : cols[j]) col_sq[j] += v * v;
        col_sq[j] /= n;
    }
    std::vector<double> w(P, 0.0);
    std::vector<double> resid(N);
    for (std::size_t i = 0; i < N; ++i) resid[i] = y[i] - y_mean;

    const double l1 = lambda * l1_ratio;
    const double l2 = lambda * (1.0 - l1_ratio);
    auto objective = [&] {
        double rss = 0.0, a1 = 0.0, a2 = 0.0;
        for (double r : resid) rss += r * r;
        for (double v : w) {
            a1 += std::abs(v);
            a2 += v * v;
        }
        return rss / (2.0 * n) + l1 * a1 + 0.5 * l2 * a2;
    };

    for (m.iterations = 0; m.iterations < max_iter;) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < P; ++j) {
            if (col_sq[j] == 0.0) continue;
            const double old = w[j];
            double rho = 0.0;
            for (std::size_t i = 0; i < N; ++i) rho += cols[j][i] * resid[i];
            rho = rho / n + col_sq[j] * old;
            const double updated = soft_threshold(rho, l1) / (col_sq[j] + l2);
            if (updated != old) {
                const double delta = updated - old;
                for (std::size_t i = 0; i < N; ++i) resid[i] -= delta * cols[j][i];
                w[j] = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        ++m.iterations;
        m.objective_trace.push_back(objective());
        if (max_delta < tol) {
            m.converged = true;
            break;
        }
    }

    m.weights.resize(P);
    m.intercept = y_mean;
    for (std::size_t j = 0; j < P; ++j) {
        m.weights[j] = w[j] / m.standardizer.scale[j];
        m.intercept -= m.weights[j] * m.standardizer.mean[j];
    }
    return m;
}

inline std::vector<double> predict(const ElasticNetModel& m, const Matrix& X) {
    if (X.cols != m.weights.size())
        throw ValidationError("expected " + std::to_string(m.weights.size()) + " features, got " + std::to_string(X.cols));
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = m.intercept + detail::dot(X.row(i), m.weights);
    return out;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

/// Mean negative log-likelihood plus (l2/2)||w||^2; the intercept, stored
/// last in the parameter vector, is not penalized.
struct LogisticObjective {
    const Matrix& X;
    std::span<const double> y;
    double l2;

    double value(std::span<const double> params, std::vector<double>* grad = nullptr) const {
        const std::size_t P = X.cols;
        const double n = static_cast<double>(X.rows);
        double loss = 0.0;
        if (grad) grad->assign(P + 1, 0.0);
        for (std::size_t i = 0; i < X.rows; ++i) {
            const double s = detail::dot(X.row(i), params.first(P)) + params[P];
            // log(1 + e^s) computed stably
            const double softplus = s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
            loss += softplus - y[i] * s;
            if (grad) {
                const double p = 1.0 / (1.0 + std::exp(-s));
                const double r = (p - y[i]) / n;
                for (std::size_t j = 0; j < P; ++j) (*grad)[j] += r * X(i, j);
                (*grad)[P] += r;
            }
        }
        loss /= n;
        for (std::size_t j = 0; j < P; ++j) {
            loss += 0.5 * l2 * params[j] * params[j];
            if (grad) (*grad)[j] += l2 * params[j];
        }
        return loss;
    }
};

struct LogisticModel {
    std::vector<double> weights;  ///< in original feature units
    double intercept = 0.0;
    double l2_strength = 1e-3;
    bool standardized = true;
    Standardizer standardizer;
    std::size_t iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
};

namespace detail {

/// L-BFGS with Armijo backtracking. Returns the number of iterations run;
/// `converged` is set when the gradient infinity-norm drops below tol.
inline std::size_t lbfgs_minimize(const std::function<double(std::span<const double>, std::vector<double>*)>& f,
                                  std::vector<double>& x, double tol, std::size_t max_iter, bool& converged,
                                  double& grad_norm, std::size_t memory = 10) {
    const std::size_t n = x.size();
    std::vector<double> g, g_new, x_new(n), dir(n);
    double fx = f(x, &g);
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };
    converged = false;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        grad_norm = inf_norm(g);
        if (grad_norm < tol) {
            converged = true;
            break;
        }
        // Two-loop recursion.
        dir = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
            for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (auto& d : dir) d *= gamma;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], dir);
            for (std::size_t i = 0; i < n; ++i) dir[i] += s_hist[k][i] * (alpha[k] - beta);
        }
        for (auto& d : dir) d = -d;
        double slope = dot(g, dir);
        if (slope >= 0.0) {
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = dot(g, dir);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        double step = 1.0;
        double f_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
            f_new = f(x_new, &g_new);
            if (f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        std::vector<double> s(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            yv[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, yv);
        if (sy > 1e-16) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = x_new;
        g = g_new;
        fx = f_new;
    }
    grad_norm = inf_norm(g);
    if (grad_norm < tol) converged = true;
    return it;
}

inline void check_binary01(std::span<const double> y) {
    bool has0 = false, has1 = false;
    for (double v : y) {
        if (v == 0.0) has0 = true;
        else if (v == 1.0) has1 = true;
        else throw ValidationError("labels must be 0 or 1");
    }
    if (!has0 || !has1) throw ValidationError("training labels contain a single class");
}

}  // namespace detail

inline LogisticModel fit_logistic(const Matrix& X, std::span<const double> y, double l2_strength, double tol = 1e-6,
                                  std::size_t max_iter = 1000, bool standardize = true) {
    detail::check_xy(X, y.size(), 2);
    detail::check_binary01(y);
    if (l2_strength < 0.0) throw ValidationError("l2_strength must be >= 0");
    LogisticModel m;
    m.l2_strength = l2_strength;
    m.standardized = standardize;
    m.standardizer = standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols);
    const Matrix Z = m.standardizer.apply(X);
    const LogisticObjective obj{Z, y, l2_strength};
    std::vector<double> params(X.cols + 1, 0.0);
    m.iterations = detail::lbfgs_minimize(
        [&](std::span<const double> p, std::vector<double>* g) { return obj.value(p, g); }, params, tol, max_iter,
        m.converged, m.gradient_norm);
    m.weights.resize(X.cols);
    m.intercept = params[X.cols];
    for (std::size_t j = 0; j < X.cols; ++j) {
        m.weights[j] = params[j] / m.standardizer.scale[j];
        m.intercept -= m.weights[j] * m.standardizer.mean[j];
    }
    return m;
}

/// Positive-class probabilities.
inline std::vector<double> predict_proba(const LogisticModel& m, const Matrix& X) {
    if (X.cols != m.weights.size())
        throw ValidationError("expected " + std::to_string(m.weights.size()) + " features, got " + std::to_string(X.cols));
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double s = m.intercept + detail::dot(X.row(i), m.weights);
        out[i] = 1.0 / (1.0 + std::exp(-s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVM
// ---------------------------------------------------------------------------

enum class KernelKind { linear, rbf };

inline std::string to_string(KernelKind k) { return k == KernelKind::linear ? "linear" : "rbf"; }
inline KernelKind parse_kernel(std::string_view s) {
    if (s == "linear") return KernelKind::linear;
    if (s == "rbf") return KernelKind::rbf;
    throw ValidationError("unknown kernel '" + std::string(s) + "'");
}

struct SvmModel {
    KernelKind kernel = KernelKind::rbf;
    double gamma = 0.5;
    double lambda = 1e-4;
    double C = 0.0;
    double bias = 0.0;
    Standardizer standardizer;
    std::vector<std::vector<double>> support_vectors;  ///< standardized
    std::vector<double> dual_coef;                     ///< α_i, in [0, C]
    std::vector<double> sv_labels;                     ///< ±1
    std::vector<double> sv_margins;                    ///< decision value at each SV from the solver state
    std::vector<std::size_t> sv_indices;
    std::size_t iterations = 0;
    bool converged = false;
    double kkt_gap = 0.0;
};

inline double kernel_value(KernelKind kind, double gamma, std::span<const double> a, std::span<const double> b) {
    if (kind == KernelKind::linear) return detail::dot(a, b);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

/// Soft-margin dual solved by SMO with maximal-violating-pair selection.
/// C = 1/(λN). Stops when the KKT gap m(α) - M(α) falls below tol.
inline SvmModel fit_svm(const Matrix& X, std::span<const double> y, double lambda, KernelKind kernel, double gamma,
                        double tol = 1e-3, std::size_t max_iter = 0) {
    detail::check_xy(X, y.size(), 2);
    bool has_pos = false, has_neg = false;
    for (double v : y) {
        if (v == 1.0) has_pos = true;
        else if (v == -1.0) has_neg = true;
        else throw ValidationError("SVM labels must be -1 or +1");
    }
    if (!has_pos || !has_neg) throw ValidationError("training labels contain a single class");
    if (kernel == KernelKind::rbf && !(gamma > 0.0)) throw ValidationError("RBF gamma must be positive");
    if (!(lambda > 0.0)) throw ValidationError("SVM lambda must be positive");

    const std::size_t N = X.rows;
    SvmModel m;
    m.kernel = kernel;
    m.gamma = gamma;
    m.lambda = lambda;
    m.C = 1.0 / (lambda * static_cast<double>(N));
    m.standardizer = Standardizer::fit(X);
    const Matrix Z = m.standardizer.apply(X);
    if (max_iter == 0) max_iter = std::max<std::size_t>(10'000'000, 100 * N);

    // Kernel rows with a bounded FIFO cache.
    const std::size_t cache_rows = std::max<std::size_t>(2, (256u << 20) / (8 * N + 1));
    std::unordered_map<std::size_t, std::vector<double>> cache;
    std::deque<std::size_t> order;
    auto krow = [&](std::size_t i) -> const std::vector<double>& {
        if (auto it = cache.find(i); it != cache.end()) return it->second;
        if (cache.size() >= cache_rows) {
            cache.erase(order.front());
            order.pop_front();
        }
        std::vector<double> row(N);
        for (std::size_t j = 0; j < N; ++j) row[j] = kernel_value(kernel, gamma, Z.row(i), Z.row(j));
        order.push_back(i);
        return cache.emplace(i, std::move(row)).first->second;
    };
    std::vector<double> diag(N);
    for (std::size_t i = 0; i < N; ++i) diag[i] = kernel_value(kernel, gamma, Z.row(i), Z.row(i));

    const double C = m.C;
    std::vector<double> alpha(N, 0.0);
    std::vector<double> G(N, -1.0);  // gradient of ½αᵀQα - eᵀα
    auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
    auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        double g_max = -std::numeric_limits<double>::infinity(), g_min = std::numeric_limits<double>::infinity();
        std::size_t i = N, j = N;
        for (std::size_t t = 0; t < N; ++t) {
            const double v = -y[t] * G[t];
            if (in_up(t) && v > g_max) {
                g_max = v;
                i = t;
            }
            if (in_low(t) && v < g_min) {
                g_min = v;
                j = t;
            }
        }
        m.kkt_gap = g_max - g_min;
        if (i == N || j == N || m.kkt_gap < tol) {
            m.converged = true;
            break;
        }
        const auto& Ki = krow(i);
        const auto& Kj = krow(j);
        const double old_ai = alpha[i], old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = diag[i] + diag[j] - 2.0 * Ki[j];
            if (quad <= 0) quad = 1e-12;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = diag[i] + diag[j] - 2.0 * Ki[j];
            if (quad <= 0) quad = 1e-12;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < N; ++t) G[t] += y[t] * (y[i] * Ki[t] * dai + y[j] * Kj[t] * daj);
    }
    m.iterations = it;

    // Bias from free vectors, else the midpoint of the feasible interval.
    double sum_free = 0.0, ub = std::numeric_limits<double>::infinity(), lb = -ub;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < N; ++t) {
        const double yg = y[t] * G[t];
        if (alpha[t] > 0 && alpha[t] < C) {
            sum_free += yg;
            ++n_free;
        } else if ((alpha[t] >= C && y[t] < 0) || (alpha[t] <= 0 && y[t] > 0)) {
            ub = std::min(ub, yg);
        } else {
            lb = std::max(lb, yg);
        }
    }
    const double rho = n_free ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    m.bias = -rho;

    for (std::size_t t = 0; t < N; ++t) {
        if (alpha[t] <= 0.0) continue;
        m.support_vectors.emplace_back(Z.row(t).begin(), Z.row(t).end());
        m.dual_coef.push_back(alpha[t]);
        m.sv_labels.push_back(y[t]);
        m.sv_indices.push_back(t);
        // Σ_j α_j y_j K_tj = y_t (G_t + 1)
        m.sv_margins.push_back(y[t] * (G[t] + 1.0) + m.bias);
    }
    if (m.support_vectors.empty()) throw Error("SVM solver produced no support vectors");
    return m;
}

/// Signed decision values.
inline std::vector<double> decision_function(const SvmModel& m, const Matrix& X) {
    const Matrix Z = m.standardizer.apply(X);
    std::vector<double> out(Z.rows);
    for (std::size_t i = 0; i < Z.rows; ++i) {
        double s = m.bias;
        for (std::size_t k = 0; k < m.support_vectors.size(); ++k)
            s += m.dual_coef[k] * m.sv_labels[k] * kernel_value(m.kernel, m.gamma, m.support_vectors[k], Z.row(i));
        out[i] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct TreeNode {
    int feature = -1;  ///< -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double positive_fraction = 0.0;  ///< leaf class-1 share of the bootstrap sample
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    std::size_t depth(std::size_t node = 0) const {
        const auto& n = nodes[node];
        if (n.feature < 0) return 0;
        return 1 + std::max(depth(static_cast<std::size_t>(n.left)), depth(static_cast<std::size_t>(n.right)));
    }

    double leaf_value(std::span<const double> x) const {
        std::size_t i = 0;
        while (nodes[i].feature >= 0)
            i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                             ? nodes[i].left
                                             : nodes[i].right);
        return nodes[i].positive_fraction;
    }
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::size_t n_trees = 500;
    std::size_t max_depth = 3;
    std::size_t features_per_split = 30;
    std::uint64_t seed = 1;
    std::size_t n_features = 0;
};

namespace detail {

inline double gini(double pos, double total) {
    if (total <= 0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

inline int grow_node(DecisionTree& tree, const Matrix& X, std::span<const double> y, std::vector<std::size_t>& idx,
                     std::size_t depth, std::size_t max_depth, std::size_t mtry, Rng& rng) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double pos = 0.0;
    for (auto i : idx) pos += y[i];
    const double total = static_cast<double>(idx.size());
    tree.nodes[static_cast<std::size_t>(id)].positive_fraction = total > 0 ? pos / total : 0.0;
    if (depth >= max_depth || pos == 0.0 || pos == total || idx.size() < 2) return id;

    // Sample candidate features without replacement.
    std::vector<std::size_t> feats(X.cols);
    std::iota(feats.begin(), feats.end(), 0);
    const std::size_t k = std::min(mtry, X.cols);
    for (std::size_t f = 0; f < k; ++f) std::swap(feats[f], feats[f + rng.below(X.cols - f)]);
    feats.resize(k);

    const double parent = gini(pos, total);
    double best_impurity = parent;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, double>> vals(idx.size());
    for (auto f : feats) {
        for (std::size_t r = 0; r < idx.size(); ++r) vals[r] = {X(idx[r], f), y[idx[r]]};
        std::sort(vals.begin(), vals.end());
        double left_pos = 0.0;
        for (std::size_t r = 0; r + 1 < vals.size(); ++r) {
            left_pos += vals[r].second;
            if (vals[r].first == vals[r + 1].first) continue;
            const double nl = static_cast<double>(r + 1), nr = total - nl;
            const double impurity = (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / total;
            if (impurity < best_impurity - 1e-12) {
                best_impurity = impurity;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (vals[r].first + vals[r + 1].first);
            }
        }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (X(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow_node(tree, X, y, left, depth + 1, max_depth, mtry, rng);
    const int r = grow_node(tree, X, y, right, depth + 1, max_depth, mtry, rng);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
}

}  // namespace detail

/// Bootstrap-aggregated Gini trees. Tree t draws from its own RNG stream
/// derived from (seed, t), so a forest's first n trees do not depend on how
/// many trees follow.
inline ForestModel fit_random_forest(const Matrix& X, std::span<const double> y, std::size_t n_trees,
                                     std::size_t max_depth, std::size_t features_per_split, std::uint64_t seed) {
    detail::check_xy(X, y.size(), 2);
    for (double v : y)
        if (v != 0.0 && v != 1.0) throw ValidationError("forest labels must be 0 or 1");
    if (n_trees < 1) throw ValidationError("forest needs at least one tree");
    if (features_per_split < 1) throw ValidationError("features_per_split must be >= 1");
    ForestModel m;
    m.n_trees = n_trees;
    m.max_depth = max_depth;
    m.features_per_split = features_per_split;
    m.seed = seed;
    m.n_features = X.cols;
    for (std::size_t t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> sample(X.rows);
        for (auto& s : sample) s = rng.below(X.rows);
        DecisionTree tree;
        detail::grow_node(tree, X, y, sample, 0, max_depth, features_per_split, rng);
        m.trees.push_back(std::move(tree));
    }
    return m;
}

/// Fraction of trees voting for class 1 (each tree votes its leaf majority).
inline std::vector<double> vote_fraction(const ForestModel& m, const Matrix& X) {
    if (X.cols != m.n_features)
        throw ValidationError("expected " + std::to_string(m.n_features) + " features, got " + std::to_string(X.cols));
    std::vector<double> out(X.rows, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        std::size_t votes = 0;
        for (const auto& t : m.trees) votes += t.leaf_value(X.row(i)) > 0.5 ? 1 : 0;
        out[i] = static_cast<double>(votes) / static_cast<double>(m.trees.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uniform interface
// ---------------------------------------------------------------------------

enum class ModelKind { elastic_net, logistic, svm, forest };

inline std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::elastic_net: return "elastic_net";
    case ModelKind::logistic: return "lr";
    case ModelKind::svm: return "svm";
    case ModelKind::forest: return "rf";
    }
    return {};
}

inline ModelKind parse_model_kind(std::string_view s) {
    const auto v = ascii_lower(trim(s));
    if (v == "elastic_net" || v == "enet") return ModelKind::elastic_net;
    if (v == "lr" || v == "logistic") return ModelKind::logistic;
    if (v == "svm") return ModelKind::svm;
    if (v == "rf" || v == "forest" || v == "random_forest") return ModelKind::forest;
    throw ValidationError("unknown model '" + std::string(s) + "' (expected elastic_net, lr, svm or rf)");
}

/// Hyperparameters for every model kind. Defaults follow the reported
/// settings where they exist (SVM λ=1e-4, γ=0.5; forest 500 trees, depth 3,
/// 30 features per split).
struct ModelSpec {
    ModelKind kind = ModelKind::svm;
    double en_lambda = 0.01;
    double en_l1_ratio = 0.5;
    double en_tol = 1e-7;
    std::size_t en_max_iter = 10000;
    double lr_l2 = 1e-3;
    double lr_tol = 1e-6;
    std::size_t lr_max_iter = 1000;
    double svm_lambda = 1e-4;
    KernelKind svm_kernel = KernelKind::rbf;
    double svm_gamma = 0.5;  ///< 0 selects 1 / n_features at fit time
    double svm_tol = 1e-3;
    std::size_t rf_trees = 500;
    std::size_t rf_max_depth = 3;
    std::size_t rf_features = 30;
    std::uint64_t seed = 1;

    bool is_classifier() const { return kind != ModelKind::elastic_net; }
};

using Model = std::variant<ElasticNetModel, LogisticModel, SvmModel, ForestModel>;

/// Real-valued scores plus hard labels. Classifiers label in {0, 1}; the
/// elastic net's labels are empty.
struct Prediction {
    std::vector<double> scores;
    std::vector<double> labels;
};

/// Fits the model in `spec`. Classifier targets are {0, 1}; the SVM receives
/// them mapped to {-1, +1}.
inline Model fit_model(const ModelSpec& spec, const Matrix& X, std::span<const double> y) {
    switch (spec.kind) {
    case ModelKind::elastic_net:
        return fit_elastic_net(X, y, spec.en_lambda, spec.en_l1_ratio, spec.en_tol, spec.en_max_iter);
    case ModelKind::logistic: return fit_logistic(X, y, spec.lr_l2, spec.lr_tol, spec.lr_max_iter);
    case ModelKind::svm: {
        detail::check_binary01(y);
        std::vector<double> pm(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) pm[i] = y[i] > 0.5 ? 1.0 : -1.0;
        const double gamma = spec.svm_gamma > 0.0 ? spec.svm_gamma : 1.0 / static_cast<double>(std::max<std::size_t>(X.cols, 1));
        return fit_svm(X, pm, spec.svm_lambda, spec.svm_kernel, gamma, spec.svm_tol);
    }
    case ModelKind::forest:
        return fit_random_forest(X, y, spec.rf_trees, spec.rf_max_depth, spec.rf_features, spec.seed);
    }
    throw Error("unreachable model kind");
}

inline Prediction predict(const Model& model, const Matrix& X) {
    Prediction p;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ElasticNetModel>) {
                p.scores = predict(m, X);
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                p.scores = predict_proba(m, X);
                for (double s : p.scores) p.labels.push_back(s >= 0.5 ? 1.0 : 0.0);
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                if (!m.support_vectors.empty() && X.cols != m.support_vectors.front().size())
                    throw ValidationError("expected " + std::to_string(m.support_vectors.front().size()) +
                                          " features, got " + std::to_string(X.cols));
                p.scores = decision_function(m, X);
                for (double s : p.scores) p.labels.push_back(s >= 0.0 ? 1.0 : 0.0);
            } else {
                p.scores = vote_fraction(m, X);
                for (double s : p.scores) p.labels.push_back(s > 0.5 ? 1.0 : 0.0);
            }
        },
        model);
    return p;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Standardizer& s) {
    return {{"mean", s.mean}, {"scale", s.scale}};
}

inline Standardizer standardizer_from_json(const nlohmann::json& j) {
    return {j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

inline nlohmann::ordered_json model_to_json(const Model& model) {
    nlohmann::ordered_json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ElasticNetModel>) {
                j["type"] = "elastic_net";
                j["hyperparameters"] = {{"lambda", m.lambda}, {"l1_ratio", m.l1_ratio}};
                j["weights"] = m.weights;
                j["intercept"] = m.intercept;
                j["standardization"] = to_json(m.standardizer);
                j["iterations"] = m.iterations;
                j["converged"] = m.converged;
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                j["type"] = "lr";
                j["hyperparameters"] = {{"l2_strength", m.l2_strength}};
                j["weights"] = m.weights;
                j["intercept"] = m.intercept;
                j["standardization"] = to_json(m.standardizer);
                j["iterations"] = m.iterations;
                j["converged"] = m.converged;
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                j["type"] = "svm";
                j["hyperparameters"] = {{"lambda", m.lambda}, {"C", m.C}, {"kernel", to_string(m.kernel)}, {"gamma", m.gamma}};
                j["bias"] = m.bias;
                j["dual_coef"] = m.dual_coef;
                j["sv_labels"] = m.sv_labels;
                j["support_vectors"] = m.support_vectors;
                j["standardization"] = to_json(m.standardizer);
                j["iterations"] = m.iterations;
                j["converged"] = m.converged;
            } else {
                j["type"] = "rf";
                j["hyperparameters"] = {{"n_trees", m.n_trees}, {"max_depth", m.max_depth},
                                        {"features_per_split", m.features_per_split}};
                j["seed"] = m.seed;
                j["n_features"] = m.n_features;
                auto& trees = j["trees"];
                trees = nlohmann::ordered_json::array();
                for (const auto& t : m.trees) {
                    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
                    for (const auto& n : t.nodes)
                        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.positive_fraction});
                    trees.push_back(std::move(nodes));
                }
            }
        },
        model);
    return j;
}

inline Model model_from_json(const nlohmann::json& j) {
    try {
        const auto type = j.at("type").get<std::string>();
        const auto& h = j.at("hyperparameters");
        if (type == "elastic_net") {
            ElasticNetModel m;
            m.lambda = h.at("lambda").get<double>();
            m.l1_ratio = h.at("l1_ratio").get<double>();
            m.weights = j.at("weights").get<std::vector<double>>();
            m.intercept = j.at("intercept").get<double>();
            m.standardizer = standardizer_from_json(j.at("standardization"));
            return m;
        }
        if (type == "lr") {
            LogisticModel m;
            m.l2_strength = h.at("l2_strength").get<double>();
            m.weights = j.at("weights").get<std::vector<double>>();
            m.intercept = j.at("intercept").get<double>();
            m.standardizer = standardizer_from_json(j.at("standardization"));
            return m;
        }
        if (type == "svm") {
            SvmModel m;
            m.lambda = h.at("lambda").get<double>();
            m.C = h.at("C").get<double>();
            m.kernel = parse_kernel(h.at("kernel").get<std::string>());
            m.gamma = h.at("gamma").get<double>();
            m.bias = j.at("bias").get<double>();
            m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
            m.sv_labels = j.at("sv_labels").get<std::vector<double>>();
            m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
            m.standardizer = standardizer_from_json(j.at("standardization"));
            return m;
        }
        if (type == "rf") {
            ForestModel m;
            m.n_trees = h.at("n_trees").get<std::size_t>();
            m.max_depth = h.at("max_depth").get<std::size_t>();
            m.features_per_split = h.at("features_per_split").get<std::size_t>();
            m.seed = j.at("seed").get<std::uint64_t>();
            m.n_features = j.at("n_features").get<std::size_t>();
            for (const auto& t : j.at("trees")) {
                DecisionTree tree;
                for (const auto& n : t)
                    tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                          n.at(3).get<int>(), n.at(4).get<double>()});
                m.trees.push_back(std::move(tree));
            }
            return m;
        }
        throw ValidationError("unknown model type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model JSON: ") + e.what());
    }
}

}  // namespace depsig
