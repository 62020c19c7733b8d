#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <unordered_map>
#include <vector>

#include "dtscat/core/errors.hpp"
#include "dtscat/core/matrix.hpp"
#include "dtscat/core/parallel.hpp"

namespace dtscat::svm {

struct SvmParams {
    double c = 14.0;
    double gamma = 2e-5;
    double tol = 1e-3;
    uint64_t max_kernel_evals = 10'000'000;  // per binary problem
    size_t cache_bytes = size_t(256) << 20;
};

using MatF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

// Gaussian kernel rows over a fixed training set, with an LRU row cache.
class KernelCache {
  public:
    KernelCache(const float* X, size_t M, size_t dim, double gamma, size_t budget_bytes)
        : X_(X, long(M), long(dim)), M_(M), gamma_(gamma) {
        norms_.resize(M);
        for (size_t i = 0; i < M; ++i) norms_[i] = X_.row(long(i)).squaredNorm();
        max_rows_ = std::max<size_t>(2, budget_bytes / (sizeof(float) * M));
    }

    const std::vector<float>& row(size_t i) {
        auto it = slots_.find(i);
        if (it != slots_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.age);
            return it->second.values;
        }
        if (slots_.size() >= max_rows_) {
            slots_.erase(lru_.back());
            lru_.pop_back();
        }
        Slot s;
        s.values.resize(M_);
        Eigen::VectorXf dots = X_ * X_.row(long(i)).transpose();
        for (size_t j = 0; j < M_; ++j)
            s.values[j] = float(std::exp(-gamma_ * (norms_[i] + norms_[j] - 2.0 * dots[long(j)])));
        evals_ += M_;
        lru_.push_front(i);
        s.age = lru_.begin();
        return slots_.emplace(i, std::move(s)).first->second.values;
    }

    uint64_t evals() const { return evals_; }

  private:
    struct Slot {
        std::vector<float> values;
        std::list<size_t>::iterator age;
    };
    Eigen::Map<const MatF> X_;
    size_t M_;
    double gamma_;
    std::vector<double> norms_;
    size_t max_rows_;
    std::unordered_map<size_t, Slot> slots_;
    std::list<size_t> lru_;
    uint64_t evals_ = 0;
};

struct BinaryResult {
    std::vector<int> sv_rows;
    std::vector<double> alpha_y;  // alpha_i * y_i for the support rows
    double bias = 0;
    bool converged = true;
    double sum_alpha_y = 0;  // dual feasibility residual
};

// SMO with maximal-violating-pair working set selection. Deterministic:
// scans rows in index order, ties keep the lowest index.
inline BinaryResult solve_binary(const float* X, size_t M, size_t dim,
                                 const std::vector<int8_t>& y, const SvmParams& p) {
    KernelCache cache(X, M, dim, p.gamma, p.cache_bytes);
    std::vector<double> alpha(M, 0.0), grad(M, -1.0);
    const double C = p.c, tau = 1e-12;

    for (;;) {
        // i: the most violating index able to move up, j: able to move down
        int i = -1, j = -1;
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < M; ++t) {
            double v = -y[t] * grad[t];
            bool up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
            bool dn = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
            if (up && v > gmax) {
                gmax = v;
                i = int(t);
            }
            if (dn && v < gmin) {
                gmin = v;
                j = int(t);
            }
        }
        if (i < 0 || j < 0 || gmax - gmin <= p.tol) break;
        if (cache.evals() > p.max_kernel_evals) {
            BinaryResult r;
            r.converged = false;
            // extract the current (still feasible) alphas with a midpoint bias
            r.bias = 0.5 * (gmax + gmin);
            for (size_t t = 0; t < M; ++t)
                if (alpha[t] > 0) {
                    r.sv_rows.push_back(int(t));
                    r.alpha_y.push_back(alpha[t] * y[t]);
                    r.sum_alpha_y += alpha[t] * y[t];
                }
            return r;
        }

        const auto& Ki = cache.row(size_t(i));
        const auto& Kj = cache.row(size_t(j));
        double qii = Ki[size_t(i)], qjj = Kj[size_t(j)], qij = Ki[size_t(j)];
        double quad = std::max(qii + qjj - 2.0 * qij, tau);
        double delta = (gmax - gmin) / quad;

        // clip the step to the box, preserving sum(alpha*y)
        double ai = alpha[i], aj = alpha[j];
        double di = y[i] * delta, dj = -y[j] * delta;
        double ni = ai + di, nj = aj + dj;
        double scale = 1.0;
        auto limit = [&](double v, double d) {
            if (d > 0 && v > C) return (C - (v - d)) / d;
            if (d < 0 && v < 0) return (0 - (v - d)) / d;
            return 1.0;
        };
        scale = std::min(limit(ni, di), limit(nj, dj));
        ni = ai + scale * di;
        nj = aj + scale * dj;
        ni = std::clamp(ni, 0.0, C);
        nj = std::clamp(nj, 0.0, C);

        double dai = ni - ai, daj = nj - aj;
        if (std::abs(dai) < 1e-16 && std::abs(daj) < 1e-16) break;
        alpha[i] = ni;
        alpha[j] = nj;
        for (size_t t = 0; t < M; ++t)
            grad[t] += y[t] * (y[i] * dai * Ki[t] + y[j] * daj * Kj[t]);
    }

    BinaryResult r;
    // bias from the KKT conditions: average y_t - u_t over the free vectors,
    // or the midpoint rule when none are strictly inside the box
    double bsum = 0;
    int nfree = 0;
    for (size_t t = 0; t < M; ++t) {
        if (alpha[t] > 0 && alpha[t] < C) {
            // grad[t] = y_t * u_t - 1  =>  u_t = y_t * (grad[t] + 1)
            bsum += y[t] - y[t] * (grad[t] + 1.0);
            ++nfree;
        }
    }
    if (nfree > 0) {
        r.bias = bsum / nfree;
    } else {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < M; ++t) {
            double v = -y[t] * grad[t];
            bool up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
            bool dn = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
            if (up) gmax = std::max(gmax, v);
            if (dn) gmin = std::min(gmin, v);
        }
        r.bias = (gmax + gmin) / 2.0;
    }
    for (size_t t = 0; t < M; ++t)
        if (alpha[t] > 0) {
            r.sv_rows.push_back(int(t));
            r.alpha_y.push_back(alpha[t] * y[t]);
            r.sum_alpha_y += alpha[t] * y[t];
        }
    return r;
}

}  // namespace detail

struct SvmModel {
    double gamma = 0, c = 0;
    int64_t dim = 0;
    struct ClassModel {
        int32_t class_id = 0;
        FeatureMatrix support_vectors;  // nsv x dim
        std::vector<double> alpha_y;
        double bias = 0;
        bool converged = true;
    };
    std::vector<ClassModel> classes;
};

// One-versus-all training; the binary problems run concurrently.
inline SvmModel train(const FeatureMatrix& m, const SvmParams& p, int workers = 0) {
    if (!(p.c > 0) || !(p.gamma > 0)) throw usage_error("svm: c and gamma must be positive");
    if (m.labels.size() != size_t(m.rows)) throw usage_error("svm: labels required");
    for (float v : m.data)
        if (!std::isfinite(v)) throw numeric_error("svm: non-finite feature value");
    std::vector<int32_t> class_ids(m.labels.begin(), m.labels.end());
    std::sort(class_ids.begin(), class_ids.end());
    class_ids.erase(std::unique(class_ids.begin(), class_ids.end()), class_ids.end());
    if (class_ids.size() < 2) throw data_error("svm: need at least 2 classes");

    SvmModel model;
    model.gamma = p.gamma;
    model.c = p.c;
    model.dim = m.cols;
    model.classes.resize(class_ids.size());

    parallel_for(class_ids.size(), [&](size_t ci) {
        std::vector<int8_t> y(size_t(m.rows));
        for (int64_t i = 0; i < m.rows; ++i)
            y[size_t(i)] = m.labels[size_t(i)] == class_ids[ci] ? 1 : -1;
        auto r = detail::solve_binary(m.data.data(), size_t(m.rows), size_t(m.cols), y, p);
        auto& cm = model.classes[ci];
        cm.class_id = class_ids[ci];
        cm.bias = r.bias;
        cm.converged = r.converged;
        cm.alpha_y = r.alpha_y;
        cm.support_vectors.rows = int64_t(r.sv_rows.size());
        cm.support_vectors.cols = m.cols;
        cm.support_vectors.data.resize(r.sv_rows.size() * size_t(m.cols));
        for (size_t s = 0; s < r.sv_rows.size(); ++s)
            std::copy(m.row(r.sv_rows[s]), m.row(r.sv_rows[s]) + m.cols,
                      cm.support_vectors.data.begin() + s * size_t(m.cols));
    }, workers);
    return model;
}

// Per-class decision values for a block of rows.
inline std::vector<double> decision_values(const SvmModel& model, const FeatureMatrix& rows,
                                           int workers = 0) {
    if (rows.cols != model.dim) throw usage_error("predict: feature width mismatch");
    const size_t nc = model.classes.size();
    std::vector<double> dv(size_t(rows.rows) * nc);
    Eigen::Map<const MatF> R(rows.data.data(), long(rows.rows), long(rows.cols));
    Eigen::VectorXd rnorm(rows.rows);
    for (int64_t i = 0; i < rows.rows; ++i) rnorm[i] = R.row(long(i)).squaredNorm();

    parallel_for(nc, [&](size_t ci) {
        const auto& cm = model.classes[ci];
        const int64_t nsv = cm.support_vectors.rows;
        if (nsv == 0) {
            for (int64_t i = 0; i < rows.rows; ++i) dv[size_t(i) * nc + ci] = cm.bias;
            return;
        }
        Eigen::Map<const MatF> S(cm.support_vectors.data.data(), long(nsv), long(model.dim));
        Eigen::VectorXd snorm(nsv);
        for (int64_t s = 0; s < nsv; ++s) snorm[s] = S.row(long(s)).squaredNorm();
        const int64_t block = 512;
        for (int64_t base = 0; base < rows.rows; base += block) {
            int64_t nb = std::min(block, rows.rows - base);
            MatF dots = R.middleRows(long(base), long(nb)) * S.transpose();
            for (int64_t i = 0; i < nb; ++i) {
                double acc = cm.bias;
                for (int64_t s = 0; s < nsv; ++s)
                    acc += cm.alpha_y[size_t(s)] *
                           std::exp(-model.gamma *
                                    (rnorm[base + i] + snorm[s] - 2.0 * dots(long(i), long(s))));
                dv[size_t(base + i) * nc + ci] = acc;
            }
        }
    }, workers);
    return dv;
}

// Argmax over the per-class decision functions; ties go to the lowest class id.
inline std::vector<int32_t> predict(const SvmModel& model, const FeatureMatrix& rows,
                                    std::vector<double>* decisions = nullptr, int workers = 0) {
    auto dv = decision_values(model, rows, workers);
    const size_t nc = model.classes.size();
    std::vector<int32_t> out(size_t(rows.rows));
    for (int64_t i = 0; i < rows.rows; ++i) {
        size_t best = 0;
        for (size_t cidx = 1; cidx < nc; ++cidx)
            if (dv[size_t(i) * nc + cidx] > dv[size_t(i) * nc + best]) best = cidx;
        out[size_t(i)] = model.classes[best].class_id;
    }
    if (decisions) *decisions = std::move(dv);
    return out;
}

struct CrossValResult {
    double best_c = 0, best_gamma = 0;
    // mean accuracy per (c, gamma) cell, c-major
    std::vector<double> cell_accuracy;
};

// Stratified k-fold grid search. Folds are assigned deterministically by
// rank within each class (index order), so results are reproducible.
inline CrossValResult cross_validate(const FeatureMatrix& m, const std::vector<double>& c_grid,
                                     const std::vector<double>& gamma_grid, int folds,
                                     const SvmParams& base = {}, int workers = 0) {
    if (folds < 2) throw usage_error("cross_validate: folds must be >= 2");
    if (folds > m.rows) throw usage_error("cross_validate: more folds than rows");
    if (c_grid.empty() || gamma_grid.empty()) throw usage_error("cross_validate: empty grid");
    std::unordered_map<int32_t, int> counts;
    for (auto l : m.labels) counts[l]++;
    // folds == rows is leave-one-out, where per-fold stratification is moot
    if (folds < m.rows)
        for (auto& [cls, cnt] : counts)
            if (cnt < folds)
                throw data_error("cross_validate: class " + std::to_string(cls) +
                                 " has fewer rows than folds");

    std::vector<int> fold_of(size_t(m.rows));
    std::unordered_map<int32_t, int> seen;
    for (int64_t i = 0; i < m.rows; ++i) fold_of[size_t(i)] = seen[m.labels[size_t(i)]]++ % folds;

    CrossValResult res;
    res.cell_accuracy.assign(c_grid.size() * gamma_grid.size(), 0.0);
    for (int fold = 0; fold < folds; ++fold) {
        FeatureMatrix tr, te;
        tr.cols = te.cols = m.cols;
        for (int64_t i = 0; i < m.rows; ++i) {
            auto& dst = fold_of[size_t(i)] == fold ? te : tr;
            dst.data.insert(dst.data.end(), m.row(i), m.row(i) + m.cols);
            dst.labels.push_back(m.labels[size_t(i)]);
            dst.rows++;
        }
        for (size_t a = 0; a < c_grid.size(); ++a) {
            for (size_t b = 0; b < gamma_grid.size(); ++b) {
                SvmParams p = base;
                p.c = c_grid[a];
                p.gamma = gamma_grid[b];
                auto model = train(tr, p, workers);
                auto pred = predict(model, te, nullptr, workers);
                int64_t hits = 0;
                for (int64_t i = 0; i < te.rows; ++i)
                    if (pred[size_t(i)] == te.labels[size_t(i)]) ++hits;
                res.cell_accuracy[a * gamma_grid.size() + b] += double(hits) / double(te.rows);
            }
        }
    }
    double best = -1;
    for (size_t a = 0; a < c_grid.size(); ++a)
        for (size_t b = 0; b < gamma_grid.size(); ++b) {
            double& acc = res.cell_accuracy[a * gamma_grid.size() + b];
            acc /= folds;
            if (acc > best + 1e-15) {
                best = acc;
                res.best_c = c_grid[a];
                res.best_gamma = gamma_grid[b];
            }
        }
    return res;
}

// Dual feasibility of a trained model: box constraints and sum(alpha*y) = 0.
inline void check_dual_feasibility(const SvmModel& model, double tol = 1e-6) {
    for (const auto& cm : model.classes) {
        double s = 0;
        for (double ay : cm.alpha_y) {
            if (std::abs(ay) > model.c * (1 + 1e-9))
                throw numeric_error("svm: alpha exceeds the box constraint");
            s += ay;
        }
        if (std::abs(s) > tol)
            throw numeric_error("svm: sum(alpha*y) = " + std::to_string(s) +
                                " violates dual feasibility");
    }
}

}  // namespace dtscat::svm
