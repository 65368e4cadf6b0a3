#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "types.hpp"

namespace cfv::gmm {

enum class CovarianceKind { diagonal, full };

struct EmConfig {
    int max_iters = 200;
    double rel_tol = 1e-6;
    // Absent -> 1e-4 of the mean per-axis variance of the training data.
    std::optional<double> covariance_floor;
    std::uint64_t seed = 0;
    int restarts = 1;
    int workers = 1;

    void validate() const;
};

// K-component mixture with diagonal or full covariances. Immutable after
// construction; the whitening cache (inv_sqrt_cov, log_det) is built once and
// shared by concurrent readers.
struct GmmModel {
    CovarianceKind kind = CovarianceKind::diagonal;
    std::size_t K = 0, D = 0;
    Vector priors;                        // K, strictly positive, sums to 1
    Matrix means;                         // K x D
    std::vector<SymMatrix> covariances;   // K, diagonal kind keeps off-diagonals at 0
    double floor_used = 0.0;

    // cache
    std::vector<SymMatrix> inv_sqrt_cov;  // K, Sigma_k^{-1/2}
    std::vector<Vector> inv_sigma;        // K x D, 1/sigma_dk (diagonal kind fast path)
    Vector log_dets;                      // K, log|Sigma_k| after flooring

    static GmmModel create(CovarianceKind kind, Vector priors, Matrix means,
                           std::vector<SymMatrix> covariances, double floor);

    void rebuild_cache();
    // Checks inv_sqrt_cov * Sigma_k * inv_sqrt_cov = I within tol.
    void verify_cache(double tol = 1e-6) const;

    // log pi_k + log N(x; mu_k, Sigma_k)
    void weighted_log_densities(const double* x, double* out) const;

    // Posterior soft assignment (log-sum-exp stabilized); sums to 1.
    Vector posterior(const Vector& x) const;

    // N x K matrix of posteriors.
    Matrix posteriors(const Matrix& points, int workers = 1) const;

    double log_likelihood(const Matrix& points, int workers = 1) const;

    // Draws n points; component by prior-categorical draw, point via the
    // symmetric square root of Sigma_k. Deterministic given seed.
    Matrix sample(std::size_t n, std::uint64_t seed,
                  std::vector<int>* components = nullptr) const;
};

// Per-descriptor soft assignments plus the per-component masses
// lambda_k = sum_n lambda_nk and normalized rows lambda_nk / lambda_k.
struct Posteriors {
    Matrix assignments;  // N x K, rows sum to 1
    Vector mass;         // K

    static Posteriors compute(const GmmModel& model, const Matrix& points, int workers = 1);
    // lambda_nk / lambda_k for component k (zero column if mass is 0).
    Vector normalized_column(std::size_t k) const;
};

struct KmeansResult {
    Matrix centers;               // K x D
    std::vector<int> assignments; // N
};

// k-means++ seeding followed by Lloyd iterations (<= 100); empty clusters are
// re-seeded from the farthest point.
KmeansResult kmeans_init(const Matrix& points, std::size_t K, std::uint64_t seed);

struct FitResult {
    GmmModel model;
    Vector loglik_per_iter;             // of the selected restart
    std::vector<std::string> warnings;
};

FitResult fit_em(const Matrix& points, std::size_t K, CovarianceKind kind,
                 const EmConfig& config);

// Alternative full-covariance path: keep a diagonal-trained model's
// responsibilities fixed and re-estimate priors/means/full covariances in a
// single M-step.
GmmModel refit_full_from_posteriors(const GmmModel& diagonal_model, const Matrix& points,
                                    std::optional<double> covariance_floor = std::nullopt,
                                    int workers = 1);

}  // namespace cfv::gmm
