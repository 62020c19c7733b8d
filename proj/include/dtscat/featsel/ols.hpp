#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <set>
#include <vector>

#include "dtscat/core/errors.hpp"
#include "dtscat/core/matrix.hpp"
#include "dtscat/core/parallel.hpp"

namespace dtscat::featsel {

struct OlsOptions {
    // stop when no candidate reduces the residual by more than this
    double rank_tol = 1e-12;
    // drop candidates whose orthogonalized norm falls below this fraction of
    // their original norm (near-collinear with the selected subspace)
    double collinear_guard = 1e-10;
    // regress against the centered indicator (equivalent to an intercept)
    bool center_target = true;
};

struct OlsClassSelection {
    int class_id = -1;
    std::vector<int> indices;               // selection order
    std::vector<double> residual_history;   // RSS after each pick (non-increasing)
    bool exhausted = false;                 // stopped before `count` picks
};

struct OlsSelection {
    std::vector<OlsClassSelection> per_class;
    std::vector<int> union_indices;  // deduplicated, ascending
};

// Greedy orthogonal least squares against a 0/1 indicator target.
// Each step picks the column maximising the squared correlation of its
// component orthogonal to the selected subspace with the current residual,
// which ranks candidates identically to refitting the full regression.
inline OlsClassSelection ols_select(const float* X, size_t M, size_t N,
                                    const std::vector<float>& target, size_t count,
                                    const OlsOptions& opt = {}, int class_id = -1) {
    if (count > N) throw usage_error("ols_select: count exceeds feature dimensions");
    if (count >= M && count > 0) throw usage_error("ols_select: count must be below row count");
    if (target.size() != M) throw usage_error("ols_select: target length mismatch");

    using MatF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const MatF> Xm(X, long(M), long(N));

    OlsClassSelection sel;
    sel.class_id = class_id;
    if (count == 0) return sel;

    Eigen::VectorXd r = Eigen::VectorXd::Zero(long(M));
    for (size_t i = 0; i < M; ++i) r[long(i)] = target[i];
    if (opt.center_target) r.array() -= r.mean();
    double rss = r.squaredNorm();

    Eigen::VectorXd colnorm2 =
        Xm.cast<double>().colwise().squaredNorm().transpose();
    Eigen::VectorXd proj2 = Eigen::VectorXd::Zero(long(N));
    std::vector<Eigen::VectorXd> basis;
    std::vector<char> picked(N, 0);

    for (size_t step = 0; step < count; ++step) {
        Eigen::VectorXf rf = r.cast<float>();
        Eigen::VectorXf corr = Xm.transpose() * rf;

        int best = -1;
        double best_score = 0;
        for (size_t j = 0; j < N; ++j) {
            if (picked[j]) continue;
            double g = colnorm2[long(j)] - proj2[long(j)];
            double guard = opt.collinear_guard * opt.collinear_guard * colnorm2[long(j)];
            if (g <= guard || g <= 0) continue;
            double c = corr[long(j)];
            double score = c * c / g;
            if (score > best_score && (best < 0 || score > best_score)) {
                best_score = score;
                best = int(j);
            }
        }
        if (best < 0 || best_score <= opt.rank_tol) {
            sel.exhausted = true;
            break;
        }

        // orthogonalize the chosen column against the selected subspace
        Eigen::VectorXd q = Xm.col(best).cast<double>();
        for (const auto& b : basis) q -= b.dot(q) * b;
        double qn = q.norm();
        q /= qn;

        double alpha = q.dot(r);
        r -= alpha * q;
        rss = std::max(0.0, rss - alpha * alpha);
        sel.indices.push_back(best);
        sel.residual_history.push_back(rss);
        picked[best] = 1;

        Eigen::VectorXf qf = q.cast<float>();
        Eigen::VectorXf w = Xm.transpose() * qf;
        for (size_t j = 0; j < N; ++j) proj2[long(j)] += double(w[long(j)]) * w[long(j)];
        basis.push_back(std::move(q));
    }
    return sel;
}

// One-versus-all selection over every class present in `labels`.
inline OlsSelection select_all_classes(const FeatureMatrix& m,
                                       const std::vector<int32_t>& labels,
                                       size_t per_class_count, const OlsOptions& opt = {},
                                       int workers = 0) {
    if (int64_t(labels.size()) != m.rows)
        throw usage_error("select_all_classes: label count mismatch");
    std::set<int32_t> classes(labels.begin(), labels.end());
    if (classes.size() < 2) throw data_error("select_all_classes: need at least 2 classes");

    std::vector<int32_t> class_ids(classes.begin(), classes.end());
    OlsSelection out;
    out.per_class.resize(class_ids.size());
    parallel_for(class_ids.size(), [&](size_t ci) {
        std::vector<float> target(size_t(m.rows));
        for (int64_t i = 0; i < m.rows; ++i)
            target[size_t(i)] = labels[size_t(i)] == class_ids[ci] ? 1.f : 0.f;
        out.per_class[ci] = ols_select(m.data.data(), size_t(m.rows), size_t(m.cols), target,
                                       per_class_count, opt, class_ids[ci]);
    }, workers);

    std::set<int> u;
    for (const auto& c : out.per_class) u.insert(c.indices.begin(), c.indices.end());
    out.union_indices.assign(u.begin(), u.end());
    return out;
}

// Column subset in union order; rows unchanged.
inline FeatureMatrix apply_selection(const FeatureMatrix& m, const std::vector<int>& indices) {
    for (int idx : indices)
        if (idx < 0 || idx >= m.cols)
            throw usage_error("apply_selection: index " + std::to_string(idx) + " out of range");
    FeatureMatrix out;
    out.rows = m.rows;
    out.cols = int64_t(indices.size());
    out.labels = m.labels;
    out.data.resize(size_t(out.rows) * indices.size());
    for (int64_t r = 0; r < m.rows; ++r) {
        const float* src = m.row(r);
        float* dst = out.data.data() + size_t(r) * indices.size();
        for (size_t k = 0; k < indices.size(); ++k) dst[k] = src[indices[k]];
    }
    return out;
}

}  // namespace dtscat::featsel
