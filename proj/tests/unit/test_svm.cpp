#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dtscat/core/rng.hpp"
#include "dtscat/svm/svm.hpp"

using namespace dtscat;
using namespace dtscat::svm;

namespace {

// two well-separated gaussian blobs in 2-D
FeatureMatrix make_blobs(size_t per_class, double sep, SplitMix64& g) {
    FeatureMatrix m;
    m.rows = int64_t(2 * per_class);
    m.cols = 2;
    for (size_t i = 0; i < 2 * per_class; ++i) {
        int cls = i < per_class ? 0 : 1;
        double cx = cls == 0 ? -sep / 2 : sep / 2;
        m.data.push_back(float(cx + 0.4 * g.normal()));
        m.data.push_back(float(0.4 * g.normal()));
        m.labels.push_back(cls);
    }
    return m;
}

}  // namespace

TEST_CASE("train: separable blobs reach full training accuracy with few SVs") {
    SplitMix64 g(201);
    auto m = make_blobs(60, 8.0, g);
    SvmParams p;
    p.c = 10;
    p.gamma = 0.5;
    auto model = train(m, p);
    check_dual_feasibility(model);
    auto pred = predict(model, m);
    for (int64_t i = 0; i < m.rows; ++i) CHECK(pred[size_t(i)] == m.labels[size_t(i)]);
    for (const auto& cm : model.classes)
        CHECK(cm.support_vectors.rows < int64_t(0.2 * double(m.rows)));
}

TEST_CASE("train: XOR is solved exactly by the RBF kernel") {
    FeatureMatrix m;
    m.rows = 4;
    m.cols = 2;
    m.data = {0, 0, 0, 1, 1, 0, 1, 1};
    m.labels = {0, 1, 1, 0};
    SvmParams p;
    p.c = 10;
    p.gamma = 1.0;
    auto model = train(m, p);
    check_dual_feasibility(model);
    auto pred = predict(model, m);
    CHECK(pred == m.labels);
}

TEST_CASE("train: conflicting duplicate rows stay feasible") {
    FeatureMatrix m;
    m.rows = 8;
    m.cols = 2;
    for (int i = 0; i < 8; ++i) {
        m.data.push_back(0.3f);
        m.data.push_back(-0.2f);
        m.labels.push_back(i % 2);
    }
    SvmParams p;
    p.c = 5;
    p.gamma = 1.0;
    auto model = train(m, p);
    check_dual_feasibility(model);
    auto dv = decision_values(model, m);
    for (double v : dv) CHECK(std::isfinite(v));
}

TEST_CASE("predict: zero-support-vector class falls back to its bias") {
    SvmModel model;
    model.gamma = 0.1;
    model.c = 1;
    model.dim = 2;
    model.classes.resize(2);
    model.classes[0].class_id = 0;
    model.classes[0].bias = -0.25;
    model.classes[1].class_id = 1;
    model.classes[1].bias = 0.75;
    FeatureMatrix rows;
    rows.rows = 1;
    rows.cols = 2;
    rows.data = {0.1f, 0.2f};
    std::vector<double> dv;
    auto pred = predict(model, rows, &dv);
    CHECK(dv[0] == -0.25);
    CHECK(dv[1] == 0.75);
    CHECK(pred[0] == 1);

    FeatureMatrix bad;
    bad.rows = 1;
    bad.cols = 3;
    bad.data = {0.f, 0.f, 0.f};
    CHECK_THROWS_AS(predict(model, bad), usage_error);
}

TEST_CASE("kernel: Gram symmetry and positive semidefiniteness on a sample") {
    SplitMix64 g(211);
    const int n = 50, dim = 8;
    Eigen::MatrixXd X(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) X(i, j) = g.normal();
    Eigen::MatrixXd K(n, n);
    const double gamma = 0.3;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            K(i, j) = std::exp(-gamma * (X.row(i) - X.row(j)).squaredNorm());
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("KKT margin: free support vectors sit on their label side") {
    SplitMix64 g(223);
    auto m = make_blobs(50, 3.0, g);  // moderate overlap so some SVs are free
    SvmParams p;
    p.c = 2.0;
    p.gamma = 0.7;
    p.tol = 1e-4;
    auto model = train(m, p);
    check_dual_feasibility(model);
    for (const auto& cm : model.classes) {
        std::vector<double> dv;
        FeatureMatrix svs = cm.support_vectors;
        SvmModel single;
        single.gamma = model.gamma;
        single.c = model.c;
        single.dim = model.dim;
        single.classes = {cm};
        dv = decision_values(single, svs);
        int checked = 0;
        for (size_t s = 0; s < cm.alpha_y.size(); ++s) {
            double a = std::abs(cm.alpha_y[s]);
            if (a > 1e-8 && a < model.c * (1 - 1e-6)) {
                double y = cm.alpha_y[s] > 0 ? 1.0 : -1.0;
                CHECK(y * dv[s] == Catch::Approx(1.0).margin(5e-3));
                ++checked;
            }
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("scaling contract: gamma * s equals features * sqrt(s)") {
    SplitMix64 g(227);
    auto m = make_blobs(30, 3.0, g);
    const double s = 4.0;
    FeatureMatrix ms = m;
    for (auto& v : ms.data) v *= float(std::sqrt(s));
    SvmParams p1;
    p1.c = 3;
    p1.gamma = 0.5 * s;
    SvmParams p2;
    p2.c = 3;
    p2.gamma = 0.5;
    auto m1 = train(m, p1);
    auto m2 = train(ms, p2);
    auto d1 = decision_values(m1, m);
    auto d2 = decision_values(m2, ms);
    REQUIRE(d1.size() == d2.size());
    for (size_t i = 0; i < d1.size(); ++i) CHECK(d1[i] == Catch::Approx(d2[i]).margin(1e-6));
}

TEST_CASE("cross_validate: picks the separating cell, handles LOO and errors") {
    SplitMix64 g(229);
    // XOR clusters: a vanishing gamma degenerates to a linear rule and fails,
    // so the known-good nonlinear cell must win
    FeatureMatrix m;
    m.cols = 2;
    for (int corner = 0; corner < 4; ++corner) {
        double cx = corner & 1 ? 1.0 : 0.0, cy = corner & 2 ? 1.0 : 0.0;
        for (int i = 0; i < 10; ++i) {
            m.data.push_back(float(cx + 0.05 * g.normal()));
            m.data.push_back(float(cy + 0.05 * g.normal()));
            m.labels.push_back(int32_t((corner == 1 || corner == 2) ? 1 : 0));
            m.rows++;
        }
    }
    auto res = cross_validate(m, {10.0}, {1e-8, 1.0}, 5);
    CHECK(res.best_gamma == 1.0);
    double best_acc = *std::max_element(res.cell_accuracy.begin(), res.cell_accuracy.end());
    CHECK(best_acc > 0.95);

    FeatureMatrix small;
    small.rows = 20;
    small.cols = 2;
    for (int i = 0; i < 20; ++i) {
        small.data.push_back(float(i < 10 ? -2.0 + 0.1 * i : 2.0 + 0.1 * i));
        small.data.push_back(0.f);
        small.labels.push_back(i < 10 ? 0 : 1);
    }
    auto loo = cross_validate(small, {1.0}, {0.3}, 20);  // leave-one-out
    CHECK(loo.cell_accuracy.size() == 1);

    CHECK_THROWS_AS(cross_validate(small, {1.0}, {0.3}, 11), data_error);
}

TEST_CASE("train: argument validation") {
    FeatureMatrix m;
    m.rows = 2;
    m.cols = 1;
    m.data = {0.f, 1.f};
    m.labels = {0, 1};
    SvmParams p;
    p.c = -1;
    CHECK_THROWS_AS(train(m, p), usage_error);
    p.c = 1;
    p.gamma = 1;
    m.labels = {3, 3};
    CHECK_THROWS_AS(train(m, p), data_error);
    m.labels = {0, 1};
    m.data[0] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(train(m, p), numeric_error);
}
