#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "core/linalg.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cfv;
using namespace cfv::linalg;
using testutil::random_matrix;
using testutil::random_spd;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace

TEST_CASE("weighted_moments: two symmetric points") {
    Matrix pts(2, 2);
    pts(0, 0) = 1.0;
    pts(1, 0) = -1.0;
    Moments m = weighted_moments(pts, {0.5, 0.5});
    CHECK(m.mean[0] == doctest::Approx(0.0));
    CHECK(m.mean[1] == doctest::Approx(0.0));
    CHECK(m.cov.at(0, 0) == doctest::Approx(1.0));
    CHECK(m.cov.at(0, 1) == doctest::Approx(0.0));
    CHECK(m.cov.at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("weighted_moments: single point has zero covariance") {
    Matrix pts(1, 2);
    pts(0, 0) = 3.0;
    pts(0, 1) = 4.0;
    Moments m = weighted_moments(pts, {1.0});
    CHECK(m.mean[0] == 3.0);
    CHECK(m.mean[1] == 4.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(m.cov.at(i, j) == 0.0);
}

TEST_CASE("weighted_moments: monte-carlo recovery of known gaussian") {
    // 10,000 draws from N((1,2), [[2,1],[1,2]]) via the Cholesky factor
    // [[sqrt(2),0],[1/sqrt(2),sqrt(1.5)]]; seed fixed.
    Rng rng(20240601);
    const std::size_t n = 10000;
    Matrix pts(n, 2);
    const double l00 = std::sqrt(2.0), l10 = 1.0 / std::sqrt(2.0), l11 = std::sqrt(1.5);
    for (std::size_t i = 0; i < n; ++i) {
        const double z0 = rng.next_gaussian(), z1 = rng.next_gaussian();
        pts(i, 0) = 1.0 + l00 * z0;
        pts(i, 1) = 2.0 + l10 * z0 + l11 * z1;
    }
    Vector w(n, 1.0 / n);
    Moments m = weighted_moments(pts, w);
    CHECK(std::abs(m.mean[0] - 1.0) < 0.1);
    CHECK(std::abs(m.mean[1] - 2.0) < 0.1);
    CHECK(std::abs(m.cov.at(0, 0) - 2.0) < 0.15);
    CHECK(std::abs(m.cov.at(0, 1) - 1.0) < 0.15);
    CHECK(std::abs(m.cov.at(1, 1) - 2.0) < 0.15);
    // Exact regression values recorded from the oracle run.
    CHECK(m.mean[0] == doctest::Approx(0.9796206861398).epsilon(1e-9));
    CHECK(m.mean[1] == doctest::Approx(1.9938864918233).epsilon(1e-9));
    CHECK(m.cov.at(0, 0) == doctest::Approx(2.0163077711617).epsilon(1e-9));
    CHECK(m.cov.at(0, 1) == doctest::Approx(1.0136966072314).epsilon(1e-9));
    CHECK(m.cov.at(1, 1) == doctest::Approx(1.9816082951219).epsilon(1e-9));
}

TEST_CASE("weighted_moments: uniform weights equal unweighted sample moments") {
    Rng rng(5);
    const std::size_t n = 137, d = 4;
    Matrix pts = random_matrix(rng, n, d, -2.0, 2.0);
    Vector w(n, 1.0 / n);
    Moments m = weighted_moments(pts, w);
    // Direct biased sample moments.
    Vector mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += pts(i, j) / n;
    for (std::size_t j = 0; j < d; ++j) CHECK(m.mean[j] == doctest::Approx(mean[j]).epsilon(1e-12));
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                c += (pts(i, a) - mean[a]) * (pts(i, b) - mean[b]) / n;
            CHECK(m.cov.at(a, b) == doctest::Approx(c).epsilon(1e-12));
        }
}

TEST_CASE("weighted_moments: input validation") {
    Matrix pts(2, 2);
    CHECK_THROWS_AS(weighted_moments(pts, {0.5}), Error);
    CHECK_THROWS_AS(weighted_moments(pts, {-0.1, 1.1}), Error);
    CHECK_THROWS_AS(weighted_moments(pts, {0.7, 0.7}), Error);
}

TEST_CASE("eigh: identity and diagonal") {
    EigenDecomposition e = eigh(SymMatrix::identity(3));
    for (double w : e.eigenvalues) CHECK(w == doctest::Approx(1.0));

    SymMatrix d2(2);
    d2.at(0, 0) = 4.0;
    d2.at(1, 1) = 1.0;
    e = eigh(d2);
    CHECK(e.eigenvalues[0] == doctest::Approx(4.0));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
    // Eigenvectors are the standard basis up to sign; sign convention makes
    // the largest entry positive.
    CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(0, 0) > 0.0);
    CHECK(std::abs(e.eigenvectors(1, 1)) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(1, 1) > 0.0);
}

TEST_CASE("eigh: [[2,1],[1,2]] has eigenvalues 3 and 1") {
    SymMatrix m(2);
    m.at(0, 0) = 2.0;
    m.at(0, 1) = 1.0;
    m.at(1, 1) = 2.0;
    EigenDecomposition e = eigh(m);
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh: reconstruction and orthonormality invariants") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + rng.next_index(12);
        SymMatrix m = random_spd(rng, d);
        // Make some of them indefinite.
        if (trial % 3 == 0)
            for (std::size_t i = 0; i < d; ++i) m.at(i, i) -= 0.5;
        EigenDecomposition e = eigh(m);
        double norm_max = 0.0;
        for (double v : m.packed()) norm_max = std::max(norm_max, std::abs(v));
        const double tol = 1e-10 * std::max(1.0, norm_max);
        // V diag(w) V^T == m
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < d; ++c)
                    acc += e.eigenvectors(i, c) * e.eigenvalues[c] * e.eigenvectors(j, c);
                CHECK(std::abs(acc - m.at(i, j)) < tol);
            }
        // V^T V == I
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                double acc = 0.0;
                for (std::size_t r = 0; r < d; ++r)
                    acc += e.eigenvectors(r, a) * e.eigenvectors(r, b);
                CHECK(std::abs(acc - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
        // Sorted descending.
        for (std::size_t c = 1; c < d; ++c) CHECK(e.eigenvalues[c - 1] >= e.eigenvalues[c]);
    }
}

TEST_CASE("eigh rejects non-finite input") {
    SymMatrix m(2);
    m.at(0, 1) = std::nan("");
    CHECK_THROWS_AS(eigh(m), Error);
}

TEST_CASE("inv_sqrt: identity and analytic diagonal") {
    SymMatrix id = SymMatrix::identity(4);
    SymMatrix r = inv_sqrt(id, 1e-9);
    CHECK(max_abs_diff(r.dense(), Matrix::identity(4)) < 1e-12);

    SymMatrix d2(2);
    d2.at(0, 0) = 4.0;
    d2.at(1, 1) = 9.0;
    r = inv_sqrt(d2, 1e-9);
    CHECK(r.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.at(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("inv_sqrt: R S R = I on random SPD matrices") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + rng.next_index(15);
        SymMatrix s = random_spd(rng, d);
        SymMatrix r = inv_sqrt(s, 1e-12);
        const Matrix rd = r.dense(), sd = s.dense();
        Matrix rs(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < d; ++t) acc += rd(i, t) * sd(t, j);
                rs(i, j) = acc;
            }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < d; ++t) acc += rs(i, t) * rd(t, j);
                CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-8);
            }
        // Agreement with the independent Jacobi route.
        CHECK(max_abs_diff(rd, oracle::inv_sqrt_jacobi(s)) < 1e-8);
    }
}

TEST_CASE("inv_sqrt flooring caps small eigenvalues") {
    SymMatrix s(2);
    s.at(0, 0) = 1.0;
    s.at(1, 1) = 1e-12;  // way below the floor
    SymMatrix r = inv_sqrt(s, 1e-4);
    CHECK(r.at(1, 1) == doctest::Approx(100.0).epsilon(1e-9));  // (1e-4)^{-1/2}
    CHECK(r.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pca_fit: planar data drops the flat axis") {
    Rng rng(31);
    const std::size_t n = 200;
    Matrix pts(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        pts(i, 0) = 2.0 * rng.next_gaussian();
        pts(i, 1) = rng.next_gaussian();
        pts(i, 2) = 0.0;
    }
    // Full-spectrum check through eigh on the universal covariance.
    Vector w(n, 1.0 / n);
    Moments mom = weighted_moments(pts, w);
    EigenDecomposition full = eigh(mom.cov);
    CHECK(std::abs(full.eigenvalues[2]) < 1e-12);

    PcaModel model = pca_fit(pts, 2);
    Matrix proj = pca_apply(model, pts);
    Moments pm = weighted_moments(proj, w);
    CHECK(std::abs(pm.cov.at(0, 1)) < 1e-8 * std::abs(pm.cov.at(0, 0)));
}

TEST_CASE("pca_fit: full-dimensional projection preserves distances") {
    Rng rng(37);
    const std::size_t n = 60, d = 5;
    Matrix pts = random_matrix(rng, n, d, -2.0, 2.0);
    PcaModel model = pca_fit(pts, d);
    Matrix proj = pca_apply(model, pts);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double d0 = 0.0, d1 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                d0 += (pts(i, c) - pts(j, c)) * (pts(i, c) - pts(j, c));
                d1 += (proj(i, c) - proj(j, c)) * (proj(i, c) - proj(j, c));
            }
            CHECK(std::abs(std::sqrt(d0) - std::sqrt(d1)) < 1e-9);
        }
}

TEST_CASE("pca_apply: mean maps to zero; identity basis passes through") {
    PcaModel model;
    model.input_dim = 2;
    model.output_dim = 2;
    model.mean = {1.0, -2.0};
    model.basis = Matrix::identity(2);
    model.eigenvalues = {1.0, 1.0};
    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = -2.0;
    Matrix y = pca_apply(model, x);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == 0.0);

    model.mean = {0.0, 0.0};
    x(0, 0) = 3.5;
    x(0, 1) = -7.25;
    y = pca_apply(model, x);
    CHECK(y(0, 0) == 3.5);
    CHECK(y(0, 1) == -7.25);
}

TEST_CASE("pca roundtrip reconstructs data living in the retained span") {
    Rng rng(41);
    const std::size_t n = 100, d = 6, r = 3;
    // Rank-r data: combinations of r fixed directions.
    Matrix dirs = random_matrix(rng, r, d, -1.0, 1.0);
    Matrix pts(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < r; ++c) {
            const double coef = rng.next_gaussian();
            for (std::size_t j = 0; j < d; ++j) pts(i, j) += coef * dirs(c, j);
        }
    PcaModel model = pca_fit(pts, r);
    Matrix proj = pca_apply(model, pts);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double rec = model.mean[j];
            for (std::size_t c = 0; c < r; ++c) rec += model.basis(j, c) * proj(i, c);
            CHECK(std::abs(rec - pts(i, j)) < 1e-9);
        }
}

TEST_CASE("pca_fit: projected covariance is diagonal for any dataset") {
    Rng rng(43);
    Matrix pts = random_matrix(rng, 300, 5, -3.0, 1.0);
    for (std::size_t i = 0; i < pts.rows(); ++i) pts(i, 3) = 0.7 * pts(i, 0) + 0.1 * pts(i, 1);
    PcaModel model = pca_fit(pts, 4);
    Matrix proj = pca_apply(model, pts);
    Vector w(proj.rows(), 1.0 / proj.rows());
    Moments pm = weighted_moments(proj, w);
    double scale = 0.0;
    for (std::size_t i = 0; i < 4; ++i) scale = std::max(scale, pm.cov.at(i, i));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            CHECK(std::abs(pm.cov.at(i, j)) < 1e-8 * scale);
    // basis^T basis = I
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            double acc = 0.0;
            for (std::size_t r2 = 0; r2 < 5; ++r2)
                acc += model.basis(r2, a) * model.basis(r2, b);
            CHECK(std::abs(acc - (a == b ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("pca_fit input validation") {
    Rng rng(47);
    Matrix pts = random_matrix(rng, 10, 3);
    CHECK_THROWS_AS(pca_fit(pts, 4), Error);   // output_dim > D
    CHECK_THROWS_AS(pca_fit(pts, 0), Error);   // output_dim < 1
    Matrix small = random_matrix(rng, 2, 3);
    CHECK_THROWS_AS(pca_fit(small, 2), Error);  // N <= output_dim
    Matrix constant(10, 3);
    CHECK_THROWS_AS(pca_fit(constant, 2), Error);  // degenerate
}
