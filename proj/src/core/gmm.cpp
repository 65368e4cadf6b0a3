#include "gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reduce.hpp"
#include "rng.hpp"

namespace cfv::gmm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double logsumexp(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

// Mean per-axis variance of the data; basis for the default covariance floor.
double mean_feature_variance(const Matrix& points) {
    const std::size_t n = points.rows(), d = points.cols();
    Vector uniform(n, 1.0 / static_cast<double>(n));
    linalg::Moments mom = linalg::weighted_moments(points, uniform);
    return std::max(mom.cov.trace() / static_cast<double>(d), 1e-300);
}

}  // namespace

void EmConfig::validate() const {
    require(max_iters > 0, ErrorCode::validation, "EmConfig: max_iters must be positive");
    require(rel_tol > 0.0, ErrorCode::validation, "EmConfig: rel_tol must be positive");
    require(restarts > 0, ErrorCode::validation, "EmConfig: restarts must be positive");
    if (covariance_floor)
        require(*covariance_floor > 0.0, ErrorCode::validation,
                "EmConfig: covariance_floor must be positive");
}

GmmModel GmmModel::create(CovarianceKind kind, Vector priors, Matrix means,
                          std::vector<SymMatrix> covariances, double floor) {
    GmmModel m;
    m.kind = kind;
    m.K = priors.size();
    m.D = means.cols();
    require(m.K >= 1, ErrorCode::validation, "GmmModel: need at least one component");
    require(means.rows() == m.K, ErrorCode::validation, "GmmModel: means/priors size mismatch");
    require(covariances.size() == m.K, ErrorCode::validation,
            "GmmModel: covariances/priors size mismatch");
    require(floor > 0.0, ErrorCode::validation, "GmmModel: covariance floor must be positive");
    double psum = 0.0;
    for (double p : priors) {
        require(p >= 0.0, ErrorCode::validation, "GmmModel: negative prior");
        psum += p;
    }
    require(std::abs(psum - 1.0) <= 1e-9, ErrorCode::validation,
            "GmmModel: priors must sum to 1 within 1e-9");
    for (const auto& c : covariances)
        require(c.dim() == m.D, ErrorCode::validation, "GmmModel: covariance dimension mismatch");
    require(means.all_finite(), ErrorCode::numeric, "GmmModel: non-finite means");

    m.priors = std::move(priors);
    m.means = std::move(means);
    m.covariances = std::move(covariances);
    m.floor_used = floor;

    // Flooring: per-axis for diagonal, eigenvalue for full.
    for (std::size_t k = 0; k < m.K; ++k) {
        require(m.covariances[k].all_finite(), ErrorCode::numeric,
                "GmmModel: non-finite covariance");
        if (m.kind == CovarianceKind::diagonal) {
            for (std::size_t d = 0; d < m.D; ++d)
                m.covariances[k].at(d, d) = std::max(m.covariances[k].at(d, d), floor);
        } else {
            linalg::EigenDecomposition e = linalg::eigh(m.covariances[k]);
            bool below = false;
            for (double w : e.eigenvalues)
                if (w < floor) below = true;
            if (below) {
                Vector w(m.D);
                for (std::size_t i = 0; i < m.D; ++i) w[i] = std::max(e.eigenvalues[i], floor);
                SymMatrix rebuilt(m.D);
                for (std::size_t i = 0; i < m.D; ++i)
                    for (std::size_t j = i; j < m.D; ++j) {
                        double acc = 0.0;
                        for (std::size_t c = 0; c < m.D; ++c)
                            acc += e.eigenvectors(i, c) * w[c] * e.eigenvectors(j, c);
                        rebuilt.at(i, j) = acc;
                    }
                m.covariances[k] = rebuilt;
            }
        }
    }
    m.rebuild_cache();
    return m;
}

void GmmModel::rebuild_cache() {
    inv_sqrt_cov.assign(K, SymMatrix(D));
    inv_sigma.assign(K, Vector(D, 0.0));
    log_dets.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        if (kind == CovarianceKind::diagonal) {
            double ld = 0.0;
            SymMatrix w(D);
            for (std::size_t d = 0; d < D; ++d) {
                const double var = covariances[k].at(d, d);
                require(var > 0.0, ErrorCode::numeric, "GmmModel: non-positive variance");
                inv_sigma[k][d] = 1.0 / std::sqrt(var);
                w.at(d, d) = inv_sigma[k][d];
                ld += std::log(var);
            }
            inv_sqrt_cov[k] = w;
            log_dets[k] = ld;
        } else {
            linalg::EigenDecomposition e = linalg::eigh(covariances[k]);
            double ld = 0.0;
            Vector w(D);
            for (std::size_t i = 0; i < D; ++i) {
                const double ev = std::max(e.eigenvalues[i], floor_used);
                w[i] = 1.0 / std::sqrt(ev);
                ld += std::log(ev);
            }
            SymMatrix ws(D);
            for (std::size_t i = 0; i < D; ++i)
                for (std::size_t j = i; j < D; ++j) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < D; ++c)
                        acc += e.eigenvectors(i, c) * w[c] * e.eigenvectors(j, c);
                    ws.at(i, j) = acc;
                }
            inv_sqrt_cov[k] = ws;
            log_dets[k] = ld;
        }
    }
}

void GmmModel::verify_cache(double tol) const {
    for (std::size_t k = 0; k < K; ++k) {
        const Matrix w = inv_sqrt_cov[k].dense();
        const Matrix s = covariances[k].dense();
        // max |W S W - I|
        Matrix ws(D, D);
        for (std::size_t i = 0; i < D; ++i)
            for (std::size_t j = 0; j < D; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < D; ++t) acc += w(i, t) * s(t, j);
                ws(i, j) = acc;
            }
        for (std::size_t i = 0; i < D; ++i)
            for (std::size_t j = 0; j < D; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < D; ++t) acc += ws(i, t) * w(t, j);
                const double expect = (i == j) ? 1.0 : 0.0;
                require(std::abs(acc - expect) <= tol, ErrorCode::numeric,
                        "GmmModel: whitening cache fails invariant");
            }
    }
}

void GmmModel::weighted_log_densities(const double* x, double* out) const {
    Vector dx(D), wx(D);
    for (std::size_t k = 0; k < K; ++k) {
        if (priors[k] <= 0.0) {
            out[k] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const double* mu = means.row(k);
        double q = 0.0;
        if (kind == CovarianceKind::diagonal) {
            for (std::size_t d = 0; d < D; ++d) {
                const double t = (x[d] - mu[d]) * inv_sigma[k][d];
                q += t * t;
            }
        } else {
            for (std::size_t d = 0; d < D; ++d) dx[d] = x[d] - mu[d];
            inv_sqrt_cov[k].multiply(dx.data(), wx.data());
            for (std::size_t d = 0; d < D; ++d) q += wx[d] * wx[d];
        }
        out[k] = std::log(priors[k]) -
                 0.5 * (static_cast<double>(D) * kLog2Pi + log_dets[k] + q);
    }
}

Vector GmmModel::posterior(const Vector& x) const {
    require(x.size() == D, ErrorCode::validation, "posterior: dimension mismatch");
    for (double v : x)
        require(std::isfinite(v), ErrorCode::numeric, "posterior: non-finite input");
    Vector logd(K);
    weighted_log_densities(x.data(), logd.data());
    const double lse = logsumexp(logd.data(), K);
    require(std::isfinite(lse), ErrorCode::numeric, "posterior: all densities vanished");
    Vector out(K);
    for (std::size_t k = 0; k < K; ++k) out[k] = std::exp(logd[k] - lse);
    return out;
}

Matrix GmmModel::posteriors(const Matrix& points, int workers) const {
    require(points.cols() == D, ErrorCode::validation, "posteriors: dimension mismatch");
    require(points.all_finite(), ErrorCode::numeric, "posteriors: non-finite input");
    const std::size_t n = points.rows();
    Matrix out(n, K);
    parallel_for(n, workers, [&](std::size_t i) {
        Vector logd(K);
        weighted_log_densities(points.row(i), logd.data());
        const double lse = logsumexp(logd.data(), K);
        for (std::size_t k = 0; k < K; ++k) out(i, k) = std::exp(logd[k] - lse);
    });
    return out;
}

double GmmModel::log_likelihood(const Matrix& points, int workers) const {
    require(points.cols() == D, ErrorCode::validation, "log_likelihood: dimension mismatch");
    require(points.all_finite(), ErrorCode::numeric, "log_likelihood: non-finite input");
    const std::size_t n = points.rows();
    Vector row_ll(n);
    parallel_for(n, workers, [&](std::size_t i) {
        Vector logd(K);
        weighted_log_densities(points.row(i), logd.data());
        row_ll[i] = logsumexp(logd.data(), K);
    });
    double total = 0.0;
    pairwise_accumulate(n, 1, &total, [&](std::size_t i0, std::size_t i1, double* acc) {
        for (std::size_t i = i0; i < i1; ++i) acc[0] += row_ll[i];
    });
    return total;
}

Matrix GmmModel::sample(std::size_t n, std::uint64_t seed, std::vector<int>* components) const {
    require(n >= 1, ErrorCode::validation, "sample: n must be >= 1");
    Rng rng(seed);
    Vector cdf(K);
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        acc += priors[k];
        cdf[k] = acc;
    }
    // Symmetric square roots, computed once per call.
    std::vector<SymMatrix> roots;
    roots.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (kind == CovarianceKind::diagonal) {
            SymMatrix r(D);
            for (std::size_t d = 0; d < D; ++d) r.at(d, d) = std::sqrt(covariances[k].at(d, d));
            roots.push_back(r);
        } else {
            roots.push_back(linalg::sqrt_spd(covariances[k], std::min(floor_used, 1e-12)));
        }
    }
    Matrix out(n, D);
    if (components) components->assign(n, 0);
    Vector z(D), y(D);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        std::size_t k = 0;
        while (k + 1 < K && u >= cdf[k]) ++k;
        if (components) (*components)[i] = static_cast<int>(k);
        for (std::size_t d = 0; d < D; ++d) z[d] = rng.next_gaussian();
        roots[k].multiply(z.data(), y.data());
        const double* mu = means.row(k);
        for (std::size_t d = 0; d < D; ++d) out(i, d) = mu[d] + y[d];
    }
    return out;
}

Posteriors Posteriors::compute(const GmmModel& model, const Matrix& points, int workers) {
    Posteriors p;
    p.assignments = model.posteriors(points, workers);
    p.mass.assign(model.K, 0.0);
    pairwise_accumulate(points.rows(), model.K, p.mass.data(),
                        [&](std::size_t i0, std::size_t i1, double* acc) {
                            for (std::size_t i = i0; i < i1; ++i)
                                for (std::size_t k = 0; k < model.K; ++k)
                                    acc[k] += p.assignments(i, k);
                        });
    return p;
}

Vector Posteriors::normalized_column(std::size_t k) const {
    const std::size_t n = assignments.rows();
    Vector out(n, 0.0);
    if (mass[k] <= 0.0) return out;
    for (std::size_t i = 0; i < n; ++i) out[i] = assignments(i, k) / mass[k];
    return out;
}

KmeansResult kmeans_init(const Matrix& points, std::size_t K, std::uint64_t seed) {
    const std::size_t n = points.rows(), d = points.cols();
    require(K >= 1, ErrorCode::validation, "kmeans_init: K must be >= 1");
    require(K <= n, ErrorCode::validation, "kmeans_init: K exceeds point count");
    Rng rng(seed);

    auto sqdist = [&](const double* a, const double* b) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double t = a[j] - b[j];
            s += t * t;
        }
        return s;
    };

    // k-means++ seeding.
    Matrix centers(K, d);
    Vector mind(n, std::numeric_limits<double>::infinity());
    std::size_t first = static_cast<std::size_t>(rng.next_index(n));
    for (std::size_t j = 0; j < d; ++j) centers(0, j) = points(first, j);
    for (std::size_t c = 1; c < K; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mind[i] = std::min(mind[i], sqdist(points.row(i), centers.row(c - 1)));
            total += mind[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += mind[i];
                if (cum >= target) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        } else {
            pick = static_cast<std::size_t>(rng.next_index(n));
        }
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = points(pick, j);
    }

    // Lloyd iterations.
    std::vector<int> assign(n, -1);
    std::vector<int> counts(K, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (std::size_t c = 0; c < K; ++c) {
                const double dd = sqdist(points.row(i), centers.row(c));
                if (dd < best) {
                    best = dd;
                    arg = static_cast<int>(c);
                }
            }
            if (assign[i] != arg) {
                assign[i] = arg;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        centers = Matrix(K, d);
        counts.assign(K, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            const double* x = points.row(i);
            for (std::size_t j = 0; j < d; ++j) centers(assign[i], j) += x[j];
        }
        for (std::size_t c = 0; c < K; ++c) {
            if (counts[c] > 0) {
                for (std::size_t j = 0; j < d; ++j) centers(c, j) /= counts[c];
            } else {
                // Re-seed empty cluster from the point farthest from its center.
                std::size_t far = 0;
                double best = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dd = sqdist(points.row(i), centers.row(assign[i]));
                    if (dd > best) {
                        best = dd;
                        far = i;
                    }
                }
                for (std::size_t j = 0; j < d; ++j) centers(c, j) = points(far, j);
            }
        }
    }
    return {std::move(centers), std::move(assign)};
}

namespace {

struct MStepOut {
    Vector priors;
    Matrix means;
    std::vector<SymMatrix> covs;
    std::vector<std::size_t> reset_components;
};

MStepOut m_step(const Matrix& points, const Matrix& post, CovarianceKind kind, double floor,
                const linalg::Moments& global, Rng& reset_rng) {
    const std::size_t n = points.rows(), d = points.cols(), K = post.cols();
    MStepOut out;

    // Pass A: component masses and weighted coordinate sums.
    Vector accA(K + K * d, 0.0);
    pairwise_accumulate(n, accA.size(), accA.data(),
                        [&](std::size_t i0, std::size_t i1, double* acc) {
                            for (std::size_t i = i0; i < i1; ++i) {
                                const double* x = points.row(i);
                                const double* p = post.row(i);
                                for (std::size_t k = 0; k < K; ++k) {
                                    const double w = p[k];
                                    acc[k] += w;
                                    double* xs = acc + K + k * d;
                                    for (std::size_t j = 0; j < d; ++j) xs[j] += w * x[j];
                                }
                            }
                        });

    out.priors.assign(K, 0.0);
    out.means = Matrix(K, d);
    Vector mass(K);
    for (std::size_t k = 0; k < K; ++k) {
        mass[k] = accA[k];
        if (mass[k] < 1e-10 * static_cast<double>(n)) {
            // Underflowed component: reset to a random data point with the
            // global covariance.
            out.reset_components.push_back(k);
            const std::size_t pick = static_cast<std::size_t>(reset_rng.next_index(n));
            for (std::size_t j = 0; j < d; ++j) out.means(k, j) = points(pick, j);
            out.priors[k] = 1.0 / static_cast<double>(n);
            continue;
        }
        out.priors[k] = mass[k] / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) out.means(k, j) = accA[K + k * d + j] / mass[k];
    }
    double psum = 0.0;
    for (double p : out.priors) psum += p;
    for (double& p : out.priors) p /= psum;

    // Pass B: per-component scatter around the new means.
    const std::size_t packed = d * (d + 1) / 2;
    const std::size_t cov_width = (kind == CovarianceKind::diagonal) ? d : packed;
    Vector accB(K * cov_width, 0.0);
    pairwise_accumulate(n, accB.size(), accB.data(),
                        [&](std::size_t i0, std::size_t i1, double* acc) {
                            Vector dx(d);
                            for (std::size_t i = i0; i < i1; ++i) {
                                const double* x = points.row(i);
                                const double* p = post.row(i);
                                for (std::size_t k = 0; k < K; ++k) {
                                    const double w = p[k];
                                    if (w == 0.0) continue;
                                    const double* mu = out.means.row(k);
                                    double* a = acc + k * cov_width;
                                    if (kind == CovarianceKind::diagonal) {
                                        for (std::size_t j = 0; j < d; ++j) {
                                            const double t = x[j] - mu[j];
                                            a[j] += w * t * t;
                                        }
                                    } else {
                                        for (std::size_t j = 0; j < d; ++j) dx[j] = x[j] - mu[j];
                                        std::size_t idx = 0;
                                        for (std::size_t r = 0; r < d; ++r) {
                                            const double wr = w * dx[r];
                                            for (std::size_t c2 = r; c2 < d; ++c2)
                                                a[idx++] += wr * dx[c2];
                                        }
                                    }
                                }
                            }
                        });

    out.covs.assign(K, SymMatrix(d));
    for (std::size_t k = 0; k < K; ++k) {
        const bool reset = std::find(out.reset_components.begin(), out.reset_components.end(),
                                     k) != out.reset_components.end();
        if (reset) {
            out.covs[k] = (kind == CovarianceKind::diagonal)
                              ? SymMatrix::diagonal(global.cov.diag())
                              : global.cov;
            continue;
        }
        const double* a = accB.data() + k * cov_width;
        if (kind == CovarianceKind::diagonal) {
            for (std::size_t j = 0; j < d; ++j) out.covs[k].at(j, j) = a[j] / mass[k];
        } else {
            std::size_t idx = 0;
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c2 = r; c2 < d; ++c2) out.covs[k].at(r, c2) = a[idx++] / mass[k];
        }
    }
    (void)floor;
    return out;
}

}  // namespace

FitResult fit_em(const Matrix& points, std::size_t K, CovarianceKind kind,
                 const EmConfig& config) {
    config.validate();
    const std::size_t n = points.rows(), d = points.cols();
    require(n >= 1, ErrorCode::validation, "fit_em: empty input");
    require(K >= 1, ErrorCode::validation, "fit_em: K must be >= 1");
    require(K <= n, ErrorCode::validation, "fit_em: K exceeds point count");
    require(points.all_finite(), ErrorCode::numeric, "fit_em: non-finite input");

    FitResult result;
    if (n < K * (d + 3))
        result.warnings.push_back("fit_em: fewer points than K*(D+3); estimates may be poor");

    const double floor = config.covariance_floor.value_or(1e-4 * mean_feature_variance(points));
    Vector uniform(n, 1.0 / static_cast<double>(n));
    const linalg::Moments global = linalg::weighted_moments(points, uniform);

    double best_ll = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < config.restarts; ++restart) {
        std::uint64_t sm = config.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(restart);
        Rng reset_rng = Rng::stream(splitmix64(sm), "gmm-reset");

        // Initialize from k-means.
        KmeansResult km = kmeans_init(points, K, splitmix64(sm));
        Vector priors(K, 0.0);
        std::vector<SymMatrix> covs(K, SymMatrix(d));
        std::vector<int> counts(K, 0);
        for (int a : km.assignments) ++counts[a];
        for (std::size_t k = 0; k < K; ++k)
            priors[k] = std::max(counts[k], 1) / static_cast<double>(n);
        double psum = 0.0;
        for (double p : priors) psum += p;
        for (double& p : priors) p /= psum;
        for (std::size_t k = 0; k < K; ++k) {
            if (counts[k] < 2) {
                covs[k] = (kind == CovarianceKind::diagonal)
                              ? SymMatrix::diagonal(global.cov.diag())
                              : global.cov;
                continue;
            }
            Vector w(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (km.assignments[i] == static_cast<int>(k)) w[i] = 1.0 / counts[k];
            linalg::Moments mom = linalg::weighted_moments(points, w);
            covs[k] = (kind == CovarianceKind::diagonal) ? SymMatrix::diagonal(mom.cov.diag())
                                                         : mom.cov;
        }
        GmmModel model = GmmModel::create(kind, priors, km.centers, covs, floor);

        Vector ll_seq;
        for (int iter = 0; iter < config.max_iters; ++iter) {
            // E-step (also yields the log-likelihood of the current params).
            Matrix post(n, model.K);
            Vector row_ll(n);
            parallel_for(n, config.workers, [&](std::size_t i) {
                Vector logd(model.K);
                model.weighted_log_densities(points.row(i), logd.data());
                const double lse = logsumexp(logd.data(), model.K);
                row_ll[i] = lse;
                for (std::size_t k = 0; k < model.K; ++k) post(i, k) = std::exp(logd[k] - lse);
            });
            double ll = 0.0;
            pairwise_accumulate(n, 1, &ll, [&](std::size_t i0, std::size_t i1, double* acc) {
                for (std::size_t i = i0; i < i1; ++i) acc[0] += row_ll[i];
            });
            require(std::isfinite(ll), ErrorCode::numeric, "fit_em: log-likelihood diverged");

            const bool converged =
                !ll_seq.empty() && (ll - ll_seq.back()) <= config.rel_tol * (1.0 + std::abs(ll));
            ll_seq.push_back(ll);
            if (converged) break;

            MStepOut ms = m_step(points, post, kind, floor, global, reset_rng);
            model = GmmModel::create(kind, std::move(ms.priors), std::move(ms.means),
                                     std::move(ms.covs), floor);
            if (!ms.reset_components.empty())
                result.warnings.push_back("fit_em: re-seeded " +
                                          std::to_string(ms.reset_components.size()) +
                                          " underflowed component(s)");
        }
        if (ll_seq.back() > best_ll) {
            best_ll = ll_seq.back();
            result.model = std::move(model);
            result.loglik_per_iter = std::move(ll_seq);
        }
    }
    return result;
}

GmmModel refit_full_from_posteriors(const GmmModel& diagonal_model, const Matrix& points,
                                    std::optional<double> covariance_floor, int workers) {
    require(diagonal_model.kind == CovarianceKind::diagonal, ErrorCode::validation,
            "refit_full_from_posteriors: expected a diagonal-covariance model");
    const std::size_t n = points.rows();
    const double floor =
        covariance_floor.value_or(std::max(diagonal_model.floor_used, 1e-300));
    Posteriors post = Posteriors::compute(diagonal_model, points, workers);

    Vector uniform(n, 1.0 / static_cast<double>(n));
    const linalg::Moments global = linalg::weighted_moments(points, uniform);

    const std::size_t K = diagonal_model.K, d = diagonal_model.D;
    Vector priors(K);
    Matrix means(K, d);
    std::vector<SymMatrix> covs(K, SymMatrix(d));
    for (std::size_t k = 0; k < K; ++k) {
        if (post.mass[k] < 1e-10 * static_cast<double>(n)) {
            priors[k] = 1.0 / static_cast<double>(n);
            for (std::size_t j = 0; j < d; ++j) means(k, j) = diagonal_model.means(k, j);
            covs[k] = global.cov;
            continue;
        }
        priors[k] = post.mass[k] / static_cast<double>(n);
        Vector w = post.normalized_column(k);
        linalg::Moments mom = linalg::weighted_moments(points, w);
        for (std::size_t j = 0; j < d; ++j) means(k, j) = mom.mean[j];
        covs[k] = mom.cov;
    }
    double psum = 0.0;
    for (double p : priors) psum += p;
    for (double& p : priors) p /= psum;
    return GmmModel::create(CovarianceKind::full, std::move(priors), std::move(means),
                            std::move(covs), floor);
}

}  // namespace cfv::gmm
