#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace cfv::svm {

struct TrainConfig {
    double C = 1.0;
    int max_epochs = 100;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

struct LinearSvmModel {
    std::size_t num_classes = 0, feature_dim = 0;
    std::vector<int> class_ids;  // ascending
    Matrix weights;              // num_classes x feature_dim
    Vector biases;               // num_classes
};

// Dual objective value per outer epoch, for each one-vs-rest problem
// (non-increasing under exact coordinate steps).
struct SolverTrace {
    Vector objective_per_epoch;
};

// One-vs-all L2-regularized L1-hinge SVM via dual coordinate descent. The bias
// is an augmented constant feature inside the solver. Deterministic given the
// seed (coordinate order is a seeded shuffle per epoch, one sub-stream per
// class problem).
LinearSvmModel train_ova(const Matrix& features, const std::vector<int>& labels,
                         const TrainConfig& config,
                         std::vector<SolverTrace>* traces = nullptr);

// argmax_c w_c . x + b_c; ties go to the lowest class id.
std::vector<int> predict(const LinearSvmModel& model, const Matrix& features);

struct EvalResult {
    double accuracy = 0.0;
    Matrix confusion;                // true class (row) x predicted class (col)
    Vector per_class_accuracy;       // indexed like model.class_ids
    std::vector<int> class_ids;
};

EvalResult evaluate(const LinearSvmModel& model, const Matrix& features,
                    const std::vector<int>& labels);

}  // namespace cfv::svm
