#include <doctest.h>

#include <cmath>

#include "core/rng.hpp"
#include "core/svm.hpp"
#include "test_util.hpp"

using namespace cfv;
using namespace cfv::svm;
using testutil::random_matrix;

namespace {

// Two separable blobs at (+/-2, 0).
struct Toy {
    Matrix x;
    std::vector<int> y;
};
Toy separable_toy(Rng& rng, std::size_t per_class = 20) {
    Toy t;
    t.x = Matrix(2 * per_class, 2);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int cls = i < per_class ? 0 : 1;
        t.x(i, 0) = (cls == 0 ? -2.0 : 2.0) + 0.1 * (rng.next_double() - 0.5);
        t.x(i, 1) = 0.5 * (rng.next_double() - 0.5);
        t.y.push_back(cls);
    }
    return t;
}

}  // namespace

TEST_CASE("train_ova separates the toy problem along the x axis") {
    Rng rng(401);
    Toy t = separable_toy(rng);
    TrainConfig cfg;
    cfg.seed = 5;
    LinearSvmModel model = train_ova(t.x, t.y, cfg);
    CHECK(model.num_classes == 2);
    EvalResult r = evaluate(model, t.x, t.y);
    CHECK(r.accuracy == 1.0);
    // Class 0 sits at x = -2: its weight vector points along -x.
    CHECK(model.weights(0, 0) < 0.0);
    CHECK(std::abs(model.weights(0, 1)) < 0.1 * std::abs(model.weights(0, 0)));
    CHECK(model.weights(1, 0) > 0.0);
}

TEST_CASE("duplicating every row leaves the separable decision function unchanged") {
    Rng rng(403);
    Toy t = separable_toy(rng);
    Toy dup;
    dup.x = Matrix(2 * t.x.rows(), 2);
    for (std::size_t i = 0; i < t.x.rows(); ++i) {
        for (std::size_t j = 0; j < 2; ++j) dup.x(2 * i, j) = dup.x(2 * i + 1, j) = t.x(i, j);
        dup.y.push_back(t.y[i]);
        dup.y.push_back(t.y[i]);
    }
    TrainConfig cfg;
    cfg.seed = 5;
    cfg.tolerance = 1e-10;
    cfg.max_epochs = 5000;
    LinearSvmModel a = train_ova(t.x, t.y, cfg);
    LinearSvmModel b = train_ova(dup.x, dup.y, cfg);
    Rng probe(404);
    for (int i = 0; i < 50; ++i) {
        const double px = 6.0 * (probe.next_double() - 0.5);
        const double py = 2.0 * (probe.next_double() - 0.5);
        for (std::size_t c = 0; c < 2; ++c) {
            const double sa = a.weights(c, 0) * px + a.weights(c, 1) * py + a.biases[c];
            const double sb = b.weights(c, 0) * px + b.weights(c, 1) * py + b.biases[c];
            CHECK(std::abs(sa - sb) < 1e-6);
        }
    }
}

TEST_CASE("flipping all labels negates the binary weight vectors") {
    Rng rng(405);
    Toy t = separable_toy(rng);
    std::vector<int> flipped;
    for (int y : t.y) flipped.push_back(1 - y);
    TrainConfig cfg;
    cfg.seed = 5;
    cfg.tolerance = 1e-10;
    cfg.max_epochs = 5000;
    LinearSvmModel a = train_ova(t.x, t.y, cfg);
    LinearSvmModel b = train_ova(t.x, flipped, cfg);
    // Class 0 of the flipped problem is class 1 of the original.
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(b.weights(0, j) == doctest::Approx(a.weights(1, j)).epsilon(1e-3));
        CHECK(b.weights(0, j) == doctest::Approx(-a.weights(0, j)).epsilon(1e-3));
    }
}

TEST_CASE("predict breaks ties toward the lowest class id") {
    LinearSvmModel model;
    model.num_classes = 3;
    model.feature_dim = 2;
    model.class_ids = {2, 5, 9};
    model.weights = Matrix(3, 2);
    model.biases = {0.0, 0.0, 0.0};
    Matrix x(1, 2);
    x(0, 0) = 1.0;
    CHECK(predict(model, x)[0] == 2);

    // Single-class degenerate model predicts its class everywhere.
    LinearSvmModel single;
    single.num_classes = 1;
    single.feature_dim = 2;
    single.class_ids = {7};
    single.weights = Matrix(1, 2);
    single.biases = {0.0};
    CHECK(predict(single, x)[0] == 7);
}

TEST_CASE("argmax prediction is invariant under a constant score shift") {
    Rng rng(407);
    LinearSvmModel model;
    model.num_classes = 4;
    model.feature_dim = 3;
    model.class_ids = {0, 1, 2, 3};
    model.weights = random_matrix(rng, 4, 3);
    model.biases = {0.1, -0.2, 0.3, 0.0};
    LinearSvmModel shifted = model;
    for (double& b : shifted.biases) b += 17.5;
    Matrix x = random_matrix(rng, 30, 3, -2.0, 2.0);
    CHECK(predict(model, x) == predict(shifted, x));
}

TEST_CASE("evaluate: accuracy, confusion counts, and chance level") {
    Rng rng(409);
    Toy t = separable_toy(rng);
    TrainConfig cfg;
    cfg.seed = 2;
    LinearSvmModel model = train_ova(t.x, t.y, cfg);
    EvalResult r = evaluate(model, t.x, t.y);
    CHECK(r.accuracy == 1.0);
    CHECK(r.confusion(0, 0) == 20.0);
    CHECK(r.confusion(1, 1) == 20.0);
    CHECK(r.confusion(0, 1) == 0.0);

    // Constant predictor on balanced 10-class data is exactly at chance.
    LinearSvmModel constant;
    constant.num_classes = 10;
    constant.feature_dim = 1;
    for (int c = 0; c < 10; ++c) constant.class_ids.push_back(c);
    constant.weights = Matrix(10, 1);
    constant.biases.assign(10, 0.0);
    constant.biases[3] = 1.0;  // always predicts class 3
    const std::size_t n = 500;
    Matrix x(n, 1);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 10);
    Rng shuffler(55);
    shuffler.shuffle(labels);
    EvalResult chance = evaluate(constant, x, labels);
    CHECK(chance.accuracy == doctest::Approx(0.1));
    // Confusion rows sum to per-class counts.
    for (std::size_t c = 0; c < 10; ++c) {
        double row = 0.0;
        for (std::size_t j = 0; j < 10; ++j) row += chance.confusion(c, j);
        CHECK(row == 50.0);
    }
}

TEST_CASE("dual objective is non-increasing across epochs") {
    Rng rng(411);
    const std::size_t n = 60;
    Matrix x = random_matrix(rng, n, 4, -1.0, 1.0);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(rng.next_index(3));
    TrainConfig cfg;
    cfg.seed = 3;
    cfg.max_epochs = 50;
    std::vector<SolverTrace> traces;
    train_ova(x, y, cfg, &traces);
    REQUIRE(traces.size() == 3);
    for (const auto& t : traces)
        for (std::size_t e = 1; e < t.objective_per_epoch.size(); ++e)
            CHECK(t.objective_per_epoch[e] <= t.objective_per_epoch[e - 1] + 1e-8);
}

TEST_CASE("feature scaling by s with C/s^2 keeps separable predictions") {
    Rng rng(413);
    Toy t = separable_toy(rng);
    const double s = 4.0;
    Matrix scaled(t.x.rows(), 2);
    for (std::size_t i = 0; i < t.x.rows(); ++i)
        for (std::size_t j = 0; j < 2; ++j) scaled(i, j) = s * t.x(i, j);
    TrainConfig cfg;
    cfg.seed = 5;
    cfg.tolerance = 1e-8;
    cfg.max_epochs = 2000;
    TrainConfig cfg_scaled = cfg;
    cfg_scaled.C = cfg.C / (s * s);
    LinearSvmModel a = train_ova(t.x, t.y, cfg);
    LinearSvmModel b = train_ova(scaled, scaled.rows() ? t.y : t.y, cfg_scaled);
    CHECK(predict(a, t.x) == predict(b, scaled));
}

TEST_CASE("train_ova input validation") {
    Matrix x(4, 2);
    TrainConfig cfg;
    CHECK_THROWS_AS(train_ova(x, {0, 0, 0, 0}, cfg), Error);     // single class
    CHECK_THROWS_AS(train_ova(x, {0, 1}, cfg), Error);           // length mismatch
    TrainConfig bad;
    bad.C = 0.0;
    CHECK_THROWS_AS(train_ova(x, {0, 1, 0, 1}, bad), Error);
    LinearSvmModel m;
    m.num_classes = 1;
    m.feature_dim = 3;
    m.class_ids = {0};
    m.weights = Matrix(1, 3);
    m.biases = {0.0};
    CHECK_THROWS_AS(predict(m, x), Error);  // dimension mismatch
}
