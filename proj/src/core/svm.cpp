#include "svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "reduce.hpp"
#include "rng.hpp"

namespace cfv::svm {

void TrainConfig::validate() const {
    require(C > 0.0, ErrorCode::validation, "TrainConfig: C must be positive");
    require(max_epochs > 0, ErrorCode::validation, "TrainConfig: max_epochs must be positive");
    require(tolerance > 0.0, ErrorCode::validation, "TrainConfig: tolerance must be positive");
}

namespace {

// Dual coordinate descent for min_w 0.5|w|^2 + C sum max(0, 1 - y_i w.x_i),
// with x_i implicitly augmented by a constant 1 for the bias. Returns the
// weight vector of length dim+1 (bias last).
Vector solve_binary(const Matrix& x, const std::vector<double>& y, const TrainConfig& config,
                    Rng rng, Vector* objective_per_epoch) {
    const std::size_t m = x.rows(), dim = x.cols();
    Vector w(dim + 1, 0.0);
    Vector alpha(m, 0.0);
    Vector qii(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 1.0;  // the augmented bias feature
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < dim; ++j) s += xi[j] * xi[j];
        qii[i] = s;
    }
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        rng.shuffle(order);
        double max_violation = 0.0;
        for (std::size_t idx : order) {
            const double* xi = x.row(idx);
            double g = w[dim];
            for (std::size_t j = 0; j < dim; ++j) g += w[j] * xi[j];
            g = y[idx] * g - 1.0;  // gradient of the dual coordinate

            // Projected gradient against the box [0, C].
            double pg = g;
            if (alpha[idx] <= 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[idx] >= config.C)
                pg = std::max(g, 0.0);
            max_violation = std::max(max_violation, std::abs(pg));
            if (pg == 0.0) continue;

            const double old = alpha[idx];
            alpha[idx] = std::min(std::max(old - g / qii[idx], 0.0), config.C);
            const double delta = (alpha[idx] - old) * y[idx];
            if (delta != 0.0) {
                for (std::size_t j = 0; j < dim; ++j) w[j] += delta * xi[j];
                w[dim] += delta;
            }
        }
        if (objective_per_epoch) {
            // Dual objective 0.5|w|^2 - sum alpha.
            double obj = 0.0;
            for (double v : w) obj += v * v;
            obj *= 0.5;
            for (double a : alpha) obj -= a;
            objective_per_epoch->push_back(obj);
        }
        if (max_violation < config.tolerance) break;
    }
    return w;
}

}  // namespace

LinearSvmModel train_ova(const Matrix& features, const std::vector<int>& labels,
                         const TrainConfig& config, std::vector<SolverTrace>* traces) {
    config.validate();
    const std::size_t m = features.rows(), dim = features.cols();
    require(m >= 2, ErrorCode::validation, "train_ova: need at least two samples");
    require(labels.size() == m, ErrorCode::validation,
            "train_ova: labels/features length mismatch");
    require(features.all_finite(), ErrorCode::numeric, "train_ova: non-finite features");

    std::set<int> distinct(labels.begin(), labels.end());
    require(distinct.size() >= 2, ErrorCode::validation,
            "train_ova: need at least two distinct classes");

    LinearSvmModel model;
    model.num_classes = distinct.size();
    model.feature_dim = dim;
    model.class_ids.assign(distinct.begin(), distinct.end());
    model.weights = Matrix(model.num_classes, dim);
    model.biases.assign(model.num_classes, 0.0);
    if (traces) traces->assign(model.num_classes, {});

    // Independent one-vs-rest problems; safe to train in parallel.
    parallel_for(model.num_classes, config.workers, [&](std::size_t c) {
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i)
            y[i] = labels[i] == model.class_ids[c] ? 1.0 : -1.0;
        Rng rng = Rng::stream(config.seed + static_cast<std::uint64_t>(c), "svm-shuffle");
        Vector w = solve_binary(features, y, config, rng,
                                traces ? &(*traces)[c].objective_per_epoch : nullptr);
        for (std::size_t j = 0; j < dim; ++j) model.weights(c, j) = w[j];
        model.biases[c] = w[dim];
    });
    return model;
}

std::vector<int> predict(const LinearSvmModel& model, const Matrix& features) {
    require(features.cols() == model.feature_dim, ErrorCode::validation,
            "predict: feature dimension mismatch");
    std::vector<int> out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const double* x = features.row(i);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t c = 0; c < model.num_classes; ++c) {
            double s = model.biases[c];
            for (std::size_t j = 0; j < model.feature_dim; ++j) s += model.weights(c, j) * x[j];
            if (s > best) {  // strict: ties stay with the lowest class id
                best = s;
                arg = c;
            }
        }
        out[i] = model.class_ids[arg];
    }
    return out;
}

EvalResult evaluate(const LinearSvmModel& model, const Matrix& features,
                    const std::vector<int>& labels) {
    require(features.rows() >= 1, ErrorCode::validation, "evaluate: empty input");
    require(labels.size() == features.rows(), ErrorCode::validation,
            "evaluate: labels/features length mismatch");
    const std::vector<int> pred = predict(model, features);

    EvalResult r;
    r.class_ids = model.class_ids;
    r.confusion = Matrix(model.num_classes, model.num_classes);
    auto class_index = [&](int id) -> std::size_t {
        auto it = std::lower_bound(r.class_ids.begin(), r.class_ids.end(), id);
        require(it != r.class_ids.end() && *it == id, ErrorCode::validation,
                "evaluate: label not covered by the model: " + std::to_string(id));
        return static_cast<std::size_t>(it - r.class_ids.begin());
    };
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        r.confusion(class_index(labels[i]), class_index(pred[i])) += 1.0;
        if (pred[i] == labels[i]) ++correct;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    r.per_class_accuracy.assign(model.num_classes, 0.0);
    for (std::size_t c = 0; c < model.num_classes; ++c) {
        double row_total = 0.0;
        for (std::size_t j = 0; j < model.num_classes; ++j) row_total += r.confusion(c, j);
        r.per_class_accuracy[c] = row_total > 0.0 ? r.confusion(c, c) / row_total : 0.0;
    }
    return r;
}

}  // namespace cfv::svm
