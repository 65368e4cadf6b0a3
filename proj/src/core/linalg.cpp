#include "linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "reduce.hpp"

namespace cfv::linalg {

Moments weighted_moments(const Matrix& points, const Vector& weights) {
    const std::size_t n = points.rows(), d = points.cols();
    require(n >= 1 && d >= 1, ErrorCode::validation, "weighted_moments: empty input");
    require(weights.size() == n, ErrorCode::validation,
            "weighted_moments: weights length does not match point count");
    double wsum = 0.0;
    for (double w : weights) {
        require(w >= 0.0, ErrorCode::validation, "weighted_moments: negative weight");
        wsum += w;
    }
    require(std::abs(wsum - 1.0) <= 1e-9, ErrorCode::validation,
            "weighted_moments: weights must sum to 1 within 1e-9");

    Moments out;
    out.mean.assign(d, 0.0);
    pairwise_accumulate(n, d, out.mean.data(), [&](std::size_t i0, std::size_t i1, double* acc) {
        for (std::size_t i = i0; i < i1; ++i) {
            const double w = weights[i];
            const double* x = points.row(i);
            for (std::size_t j = 0; j < d; ++j) acc[j] += w * x[j];
        }
    });

    out.cov = SymMatrix(d);
    const std::size_t packed = d * (d + 1) / 2;
    pairwise_accumulate(n, packed, out.cov.packed().data(),
                        [&](std::size_t i0, std::size_t i1, double* acc) {
                            Vector dx(d);
                            for (std::size_t i = i0; i < i1; ++i) {
                                const double w = weights[i];
                                const double* x = points.row(i);
                                for (std::size_t j = 0; j < d; ++j) dx[j] = x[j] - out.mean[j];
                                std::size_t idx = 0;
                                for (std::size_t r = 0; r < d; ++r) {
                                    const double wr = w * dx[r];
                                    for (std::size_t c = r; c < d; ++c) acc[idx++] += wr * dx[c];
                                }
                            }
                        });
    return out;
}

EigenDecomposition eigh(const SymMatrix& m) {
    require(m.all_finite(), ErrorCode::numeric, "eigh: non-finite entries");
    const std::size_t d = m.dim();
    Matrix dense = m.dense();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        dense.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    require(solver.info() == Eigen::Success, ErrorCode::numeric, "eigh: eigensolver failed");

    // Eigen returns ascending order; flip to descending and fix signs.
    EigenDecomposition out;
    out.eigenvalues.assign(d, 0.0);
    out.eigenvectors = Matrix(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        const Eigen::Index src = static_cast<Eigen::Index>(d - 1 - c);
        out.eigenvalues[c] = solver.eigenvalues()(src);
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            const double v = std::abs(solver.eigenvectors()(static_cast<Eigen::Index>(r), src));
            if (v > best) {
                best = v;
                arg = r;
            }
        }
        const double sign = solver.eigenvectors()(static_cast<Eigen::Index>(arg), src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < d; ++r)
            out.eigenvectors(r, c) = sign * solver.eigenvectors()(static_cast<Eigen::Index>(r), src);
    }
    return out;
}

static SymMatrix rebuild_from_eigs(const EigenDecomposition& e, const Vector& w) {
    const std::size_t d = e.eigenvalues.size();
    SymMatrix out(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c)
                acc += e.eigenvectors(i, c) * w[c] * e.eigenvectors(j, c);
            out.at(i, j) = acc;
        }
    }
    return out;
}

double default_eigen_floor(const SymMatrix& m) {
    double t = m.trace() / static_cast<double>(m.dim());
    return 1e-6 * std::max(t, 1e-300);
}

SymMatrix inv_sqrt(const SymMatrix& m, double eigen_floor) {
    require(eigen_floor > 0.0, ErrorCode::validation, "inv_sqrt: eigen_floor must be positive");
    EigenDecomposition e = eigh(m);
    Vector w(m.dim());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = 1.0 / std::sqrt(std::max(e.eigenvalues[i], eigen_floor));
    return rebuild_from_eigs(e, w);
}

SymMatrix inv_sqrt(const SymMatrix& m) { return inv_sqrt(m, default_eigen_floor(m)); }

SymMatrix sqrt_spd(const SymMatrix& m, double eigen_floor) {
    require(eigen_floor > 0.0, ErrorCode::validation, "sqrt_spd: eigen_floor must be positive");
    EigenDecomposition e = eigh(m);
    Vector w(m.dim());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::sqrt(std::max(e.eigenvalues[i], eigen_floor));
    return rebuild_from_eigs(e, w);
}

PcaModel pca_fit(const Matrix& points, std::size_t output_dim, bool whiten) {
    const std::size_t n = points.rows(), d = points.cols();
    require(output_dim >= 1, ErrorCode::validation, "pca_fit: output_dim must be >= 1");
    require(output_dim <= d, ErrorCode::validation,
            "pca_fit: output_dim exceeds input dimension");
    require(n > output_dim, ErrorCode::validation,
            "pca_fit: need more points than output dimensions");
    require(points.all_finite(), ErrorCode::numeric, "pca_fit: non-finite input");

    Vector uniform(n, 1.0 / static_cast<double>(n));
    Moments mom = weighted_moments(points, uniform);
    require(mom.cov.trace() > 1e-24, ErrorCode::validation,
            "pca_fit: degenerate input (all points identical)");

    EigenDecomposition e = eigh(mom.cov);
    PcaModel model;
    model.input_dim = d;
    model.output_dim = output_dim;
    model.mean = mom.mean;
    model.whiten = whiten;
    model.basis = Matrix(d, output_dim);
    model.eigenvalues.assign(output_dim, 0.0);
    for (std::size_t c = 0; c < output_dim; ++c) {
        model.eigenvalues[c] = std::max(e.eigenvalues[c], 0.0);
        for (std::size_t r = 0; r < d; ++r) model.basis(r, c) = e.eigenvectors(r, c);
    }
    return model;
}

Matrix pca_apply(const PcaModel& model, const Matrix& points) {
    require(points.cols() == model.input_dim, ErrorCode::validation,
            "pca_apply: point dimension does not match model input_dim");
    const std::size_t n = points.rows(), d = model.input_dim, k = model.output_dim;
    Vector scale(k, 1.0);
    if (model.whiten)
        for (std::size_t c = 0; c < k; ++c)
            scale[c] = 1.0 / std::sqrt(std::max(model.eigenvalues[c], 1e-12));
    Matrix out(n, k);
    Vector dx(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = points.row(i);
        for (std::size_t j = 0; j < d; ++j) dx[j] = x[j] - model.mean[j];
        for (std::size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += model.basis(j, c) * dx[j];
            out(i, c) = acc * scale[c];
        }
    }
    return out;
}

}  // namespace cfv::linalg
