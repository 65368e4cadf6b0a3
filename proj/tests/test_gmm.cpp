#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/gmm.hpp"
#include "core/rng.hpp"
#include "core/synthdata.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cfv;
using namespace cfv::gmm;
using testutil::random_matrix;
using testutil::random_model;

namespace {

GmmModel model_1d(Vector priors, Vector means, Vector vars) {
    const std::size_t k = priors.size();
    Matrix mu(k, 1);
    std::vector<SymMatrix> covs;
    for (std::size_t i = 0; i < k; ++i) {
        mu(i, 0) = means[i];
        SymMatrix c(1);
        c.at(0, 0) = vars[i];
        covs.push_back(c);
    }
    return GmmModel::create(CovarianceKind::diagonal, priors, mu, covs, 1e-12);
}

}  // namespace

TEST_CASE("posterior: K=1 is always 1") {
    GmmModel m = model_1d({1.0}, {0.3}, {2.0});
    for (double x : {-5.0, 0.0, 7.5}) {
        Vector p = m.posterior({x});
        CHECK(p.size() == 1);
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("posterior: identical components with equal priors split evenly") {
    GmmModel m = model_1d({0.5, 0.5}, {1.0, 1.0}, {2.0, 2.0});
    Vector p = m.posterior({0.123});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("posterior: well-separated components saturate") {
    GmmModel m = model_1d({0.5, 0.5}, {-10.0, 10.0}, {1.0, 1.0});
    Vector p = m.posterior({10.0});
    // Direct density evaluation: the far component is e^{-200} relative.
    CHECK(std::abs(p[1] - 1.0) < 1e-10);
    CHECK(p[0] < 1e-10);
}

TEST_CASE("posterior rows sum to 1 and match the naive oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t K = 1 + rng.next_index(6), D = 1 + rng.next_index(5);
        const auto kind = trial % 2 ? CovarianceKind::full : CovarianceKind::diagonal;
        GmmModel m = random_model(rng, K, D, kind);
        Matrix x = testutil::random_descriptors(rng, m, 20);
        Matrix post = m.posteriors(x);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double sum = 0.0;
            Vector naive = oracle::posterior(m, x.row(i));
            for (std::size_t k = 0; k < K; ++k) {
                sum += post(i, k);
                CHECK(post(i, k) >= 0.0);
                CHECK(post(i, k) <= 1.0 + 1e-12);
                CHECK(std::abs(post(i, k) - naive[k]) < 1e-10);
            }
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("posterior is invariant under prior rescaling before renormalization") {
    Rng rng(103);
    GmmModel m = random_model(rng, 4, 3, CovarianceKind::full);
    // Same components, priors scaled by 3 then renormalized (identical model).
    Vector scaled = m.priors;
    for (double& p : scaled) p *= 3.0;
    double total = 0.0;
    for (double p : scaled) total += p;
    for (double& p : scaled) p /= total;
    GmmModel m2 = GmmModel::create(m.kind, scaled, m.means, m.covariances, m.floor_used);
    Vector x = {0.2, -0.4, 0.9};
    Vector p1 = m.posterior(x), p2 = m2.posterior(x);
    for (std::size_t k = 0; k < 4; ++k) CHECK(p1[k] == doctest::Approx(p2[k]).epsilon(1e-12));
}

TEST_CASE("posterior: diagonal kind agrees with an equivalent full model") {
    Rng rng(107);
    GmmModel diag = random_model(rng, 5, 4, CovarianceKind::diagonal);
    GmmModel full =
        GmmModel::create(CovarianceKind::full, diag.priors, diag.means, diag.covariances,
                         diag.floor_used);
    for (int trial = 0; trial < 25; ++trial) {
        Vector x(4);
        for (double& v : x) v = 3.0 * (rng.next_double() - 0.5);
        Vector pd = diag.posterior(x), pf = full.posterior(x);
        for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(pd[k] - pf[k]) < 1e-10);
    }
}

TEST_CASE("posterior rejects non-finite input") {
    GmmModel m = model_1d({1.0}, {0.0}, {1.0});
    CHECK_THROWS_AS(m.posterior({std::nan("")}), Error);
}

TEST_CASE("log_likelihood: standard normal at zero") {
    GmmModel m = model_1d({1.0}, {0.0}, {1.0});
    Matrix x(1, 1);
    CHECK(m.log_likelihood(x) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("log_likelihood: duplicating points doubles the value") {
    Rng rng(109);
    GmmModel m = random_model(rng, 3, 2, CovarianceKind::diagonal);
    Matrix x = testutil::random_descriptors(rng, m, 50);
    Matrix xx(100, 2);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 2; ++j) xx(i, j) = xx(i + 50, j) = x(i, j);
    CHECK(m.log_likelihood(xx) == doctest::Approx(2.0 * m.log_likelihood(x)).epsilon(1e-12));
}

TEST_CASE("log_likelihood matches the naive density-product oracle") {
    Rng rng(113);
    GmmModel m = random_model(rng, 2, 2, CovarianceKind::full);
    Matrix x = testutil::random_descriptors(rng, m, 5);
    double naive = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        double density = 0.0;
        for (std::size_t k = 0; k < m.K; ++k)
            density += m.priors[k] * oracle::gaussian_pdf(x.row(i), m.means.row(k),
                                                          m.covariances[k]);
        naive += std::log(density);
    }
    CHECK(m.log_likelihood(x) == doctest::Approx(naive).epsilon(1e-10));
}

TEST_CASE("kmeans_init: K=N picks every point; K=1 finds the mean") {
    Matrix pts(3, 1);
    pts(0, 0) = 0.0;
    pts(1, 0) = 5.0;
    pts(2, 0) = 9.0;
    KmeansResult r = kmeans_init(pts, 3, 7);
    Vector centers = {r.centers(0, 0), r.centers(1, 0), r.centers(2, 0)};
    std::sort(centers.begin(), centers.end());
    CHECK(centers[0] == doctest::Approx(0.0));
    CHECK(centers[1] == doctest::Approx(5.0));
    CHECK(centers[2] == doctest::Approx(9.0));

    KmeansResult r1 = kmeans_init(pts, 1, 7);
    CHECK(r1.centers(0, 0) == doctest::Approx(14.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("kmeans_init: two tight clusters at distance 10") {
    Rng rng(127);
    const std::size_t n = 100;
    Matrix pts(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = i < n / 2 ? 0.0 : 10.0;
        pts(i, 0) = cx + 0.01 * (2.0 * rng.next_double() - 1.0);
        pts(i, 1) = 0.01 * (2.0 * rng.next_double() - 1.0);
    }
    KmeansResult r = kmeans_init(pts, 2, 99);
    Vector xs = {r.centers(0, 0), r.centers(1, 0)};
    std::sort(xs.begin(), xs.end());
    CHECK(std::abs(xs[0] - 0.0) < 0.05);
    CHECK(std::abs(xs[1] - 10.0) < 0.05);
    CHECK_THROWS_AS(kmeans_init(pts, n + 1, 0), Error);
}

TEST_CASE("fit_em: K=1 recovers sample moments in one step") {
    Rng rng(131);
    Matrix pts = random_matrix(rng, 80, 3, -2.0, 2.0);
    EmConfig cfg;
    cfg.seed = 1;
    FitResult fit = fit_em(pts, 1, CovarianceKind::full, cfg);
    Vector w(pts.rows(), 1.0 / pts.rows());
    linalg::Moments mom = linalg::weighted_moments(pts, w);
    CHECK(fit.model.priors[0] == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(fit.model.means(0, j) == doctest::Approx(mom.mean[j]).epsilon(1e-12));
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a; b < 3; ++b)
            CHECK(fit.model.covariances[0].at(a, b) ==
                  doctest::Approx(mom.cov.at(a, b)).epsilon(1e-10));
}

TEST_CASE("fit_em: recovers two well-separated gaussians") {
    Rng rng(137);
    const std::size_t n = 400;
    Matrix pts(n, 2);
    const double mu[2][2] = {{-4.0, 0.0}, {4.0, 1.0}};
    for (std::size_t i = 0; i < n; ++i) {
        const int c = i < n / 2 ? 0 : 1;
        pts(i, 0) = mu[c][0] + 0.7 * rng.next_gaussian();
        pts(i, 1) = mu[c][1] + 0.5 * rng.next_gaussian();
    }
    EmConfig cfg;
    cfg.seed = 11;
    for (auto kind : {CovarianceKind::diagonal, CovarianceKind::full}) {
        FitResult fit = fit_em(pts, 2, kind, cfg);
        // Match components to truth by nearest mean.
        for (int c = 0; c < 2; ++c) {
            double best = 1e18;
            for (std::size_t k = 0; k < 2; ++k) {
                const double dx = fit.model.means(k, 0) - mu[c][0];
                const double dy = fit.model.means(k, 1) - mu[c][1];
                best = std::min(best, std::sqrt(dx * dx + dy * dy));
            }
            CHECK(best < 0.1);
        }
        // Monotone log-likelihood.
        for (std::size_t t = 1; t < fit.loglik_per_iter.size(); ++t)
            CHECK(fit.loglik_per_iter[t] >= fit.loglik_per_iter[t - 1] - 1e-8);
    }
}

TEST_CASE("fit_em: figure-1 data yields correlated full covariances") {
    synth::Figure1Data fig = synth::figure1_dataset(2024);
    EmConfig cfg;
    cfg.seed = 5;
    cfg.restarts = 3;
    FitResult fit = fit_em(fig.points, 4, CovarianceKind::full, cfg);
    for (std::size_t k = 0; k < 4; ++k) {
        double max_offdiag = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j)
                max_offdiag = std::max(max_offdiag, std::abs(fit.model.covariances[k].at(i, j)));
        CHECK(max_offdiag > 0.1);
    }
}

TEST_CASE("fit_em input validation") {
    Matrix pts(3, 2);
    EmConfig cfg;
    CHECK_THROWS_AS(fit_em(Matrix(), 1, CovarianceKind::diagonal, cfg), Error);
    CHECK_THROWS_AS(fit_em(pts, 4, CovarianceKind::diagonal, cfg), Error);  // K > N
    EmConfig bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(fit_em(pts, 1, CovarianceKind::diagonal, bad), Error);
}

TEST_CASE("fit_em warns when data is scarce") {
    Rng rng(139);
    Matrix pts = random_matrix(rng, 12, 3, -1.0, 1.0);
    EmConfig cfg;
    cfg.seed = 3;
    FitResult fit = fit_em(pts, 3, CovarianceKind::diagonal, cfg);  // N < K*(D+3)
    CHECK(!fit.warnings.empty());
}

TEST_CASE("sample: degenerate prior sends everything to component 1") {
    Matrix mu(2, 1);
    mu(0, 0) = -3.0;
    mu(1, 0) = 3.0;
    std::vector<SymMatrix> covs(2, SymMatrix::identity(1));
    GmmModel m = GmmModel::create(CovarianceKind::diagonal, {1.0, 0.0}, mu, covs, 1e-12);
    std::vector<int> comps;
    Matrix x = m.sample(500, 42, &comps);
    for (int c : comps) CHECK(c == 0);
    for (std::size_t i = 0; i < x.rows(); ++i) CHECK(x(i, 0) < 3.0);
}

TEST_CASE("sample: moments and component frequencies concentrate") {
    // K=1 standard normal in 3D, n = 100,000, fixed seed.
    Matrix mu(1, 3);
    std::vector<SymMatrix> covs(1, SymMatrix::identity(3));
    GmmModel m = GmmModel::create(CovarianceKind::diagonal, {1.0}, mu, covs, 1e-12);
    Matrix x = m.sample(100000, 7);
    Vector mean(3, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < 3; ++j) mean[j] += x(i, j);
    for (double& v : mean) v /= 100000.0;
    for (double v : mean) CHECK(std::abs(v) < 0.02);
    // Exact regression values recorded from the oracle run.
    CHECK(mean[0] == doctest::Approx(-0.0075089037829).epsilon(1e-8));
    CHECK(mean[1] == doctest::Approx(-0.0040006607838).epsilon(1e-8));
    CHECK(mean[2] == doctest::Approx(0.0041998900196).epsilon(1e-8));

    // Component frequencies against priors.
    Rng rng(149);
    GmmModel mix = random_model(rng, 4, 2, CovarianceKind::diagonal);
    std::vector<int> comps;
    mix.sample(100000, 77, &comps);
    Vector freq(4, 0.0);
    for (int c : comps) freq[c] += 1.0 / 100000.0;
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(freq[k] - mix.priors[k]) < 0.01);
}

TEST_CASE("sample: full covariance matches target moments at scale") {
    Rng rng(151);
    GmmModel m = random_model(rng, 1, 3, CovarianceKind::full);
    Matrix x = m.sample(200000, 3);
    Vector w(x.rows(), 1.0 / x.rows());
    linalg::Moments mom = linalg::weighted_moments(x, w);
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(std::abs(mom.mean[a] - m.means(0, a)) < 0.02);
        for (std::size_t b = a; b < 3; ++b)
            CHECK(std::abs(mom.cov.at(a, b) - m.covariances[0].at(a, b)) < 0.02);
    }
}

TEST_CASE("refit_full_from_posteriors keeps responsibilities but fills correlations") {
    synth::Figure1Data fig = synth::figure1_dataset(77);
    EmConfig cfg;
    cfg.seed = 9;
    FitResult diag = fit_em(fig.points, 4, CovarianceKind::diagonal, cfg);
    GmmModel full = refit_full_from_posteriors(diag.model, fig.points);
    CHECK(full.kind == CovarianceKind::full);
    full.verify_cache(1e-6);
    double max_offdiag = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j)
                max_offdiag = std::max(max_offdiag, std::abs(full.covariances[k].at(i, j)));
    CHECK(max_offdiag > 0.1);
    CHECK_THROWS_AS(refit_full_from_posteriors(full, fig.points), Error);
}

TEST_CASE("GmmModel cache invariant holds and serialized floors are respected") {
    Rng rng(157);
    GmmModel m = random_model(rng, 3, 4, CovarianceKind::full);
    m.verify_cache(1e-6);
    // Posteriors computed with many workers equal the single-threaded result.
    Matrix x = testutil::random_descriptors(rng, m, 64);
    Matrix p1 = m.posteriors(x, 1), p4 = m.posteriors(x, 4);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < m.K; ++k) CHECK(p1(i, k) == p4(i, k));
}
