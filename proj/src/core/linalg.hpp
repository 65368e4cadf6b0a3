#pragma once

#include "types.hpp"

namespace cfv::linalg {

// Eigenvalues sorted descending; eigenvector columns orthonormal, column i
// paired with eigenvalue i. Sign convention: the largest-magnitude entry of
// each eigenvector is positive.
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;  // dim x dim
};

struct Moments {
    Vector mean;
    SymMatrix cov;
};

// Population moments of weighted points (weights form a pmf: non-negative,
// summing to 1 within 1e-9). mean = sum w_n x_n, cov = sum w_n (x-mean)(x-mean)^T.
Moments weighted_moments(const Matrix& points, const Vector& weights);

EigenDecomposition eigh(const SymMatrix& m);

// V diag(max(w, eigen_floor))^{-1/2} V^T; symmetric positive definite.
SymMatrix inv_sqrt(const SymMatrix& m, double eigen_floor);
SymMatrix inv_sqrt(const SymMatrix& m);  // floor = default_eigen_floor(m)

// Relative floor guarding near-singular inputs: 1e-6 * trace/dim.
double default_eigen_floor(const SymMatrix& m);

// V diag(max(w, eigen_floor))^{1/2} V^T, the symmetric matrix square root.
SymMatrix sqrt_spd(const SymMatrix& m, double eigen_floor);

struct PcaModel {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    Vector mean;         // input_dim
    Matrix basis;        // input_dim x output_dim, orthonormal columns
    Vector eigenvalues;  // output_dim retained variances, descending
    bool whiten = false; // optional per-axis rescale by eigenvalue^{-1/2}
};

PcaModel pca_fit(const Matrix& points, std::size_t output_dim, bool whiten = false);

// Row n of the result is basis^T (x_n - mean) (divided by sqrt(eigenvalue)
// per axis when model.whiten is set).
Matrix pca_apply(const PcaModel& model, const Matrix& points);

}  // namespace cfv::linalg
