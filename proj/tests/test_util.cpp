#include <doctest.h>

#include <qpa/errors.hpp>
#include <qpa/jacobi.hpp>
#include <qpa/util.hpp>

#include <atomic>
#include <cmath>
#include <complex>
#include <random>

using namespace qpa;

TEST_SUITE("util") {

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 12638187200555641996ull);
    CHECK(fnv1a64("foobar") == 9625390261332436968ull);
}

TEST_CASE("line fit recovers an exact line") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(-0.5 * v + 2.0);
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.residual == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h = 0;
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    parallel_for(hits.size(), 1, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 2);
}

TEST_CASE("bisection and golden section on toy functions") {
    auto f = [](double x) { return x * x - 2.0; };
    const double r = bisect_root(f, 0.0, 2.0, f(0.0), f(2.0), 1e-12);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

    auto g = [](double x) { return -(x - 0.3) * (x - 0.3) + 1.5; };
    auto [xm, fm] = golden_max(g, -1.0, 2.0, 1e-10);
    CHECK(xm == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(fm == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("jacobi solves small hand matrices") {
    using C = std::complex<double>;

    // [[2,1],[1,2]] -> {1,3}
    std::vector<C> A = {C(2, 0), C(1, 0), C(1, 0), C(2, 0)};
    HermitianEigen e = hermitian_eigen(A, 2);
    CHECK(std::abs(e.values[0] - 1.0) <= 1e-14);
    CHECK(std::abs(e.values[1] - 3.0) <= 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(e.vectors[0][0]) - r) <= 1e-12);
    CHECK(std::abs(e.vectors[0][0] + e.vectors[0][1]) <= 1e-12);

    // [[0,i],[-i,0]] -> {-1,1}
    std::vector<C> B = {C(0, 0), C(0, 1), C(0, -1), C(0, 0)};
    HermitianEigen eb = hermitian_eigen(B, 2);
    CHECK(std::abs(eb.values[0] + 1.0) <= 1e-14);
    CHECK(std::abs(eb.values[1] - 1.0) <= 1e-14);

    // identity stays put
    std::vector<C> I = {C(1, 0), C(0, 0), C(0, 0), C(1, 0)};
    HermitianEigen ei = hermitian_eigen(I, 2);
    CHECK(ei.values[0] == 1.0);
    CHECK(ei.values[1] == 1.0);
    CHECK(std::abs(ei.vectors[0][0] - 1.0) <= 1e-15);

    // non-Hermitian input is rejected
    std::vector<C> N = {C(1, 0), C(1, 0), C(2, 0), C(1, 0)};
    CHECK_THROWS_AS(hermitian_eigen(N, 2), InconsistentInputError);
}

TEST_CASE("jacobi residuals and orthonormality on a random hermitian matrix") {
    using C = std::complex<double>;
    const size_t n = 24;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<C> A(n * n);
    for (size_t i = 0; i < n; ++i) {
        A[i * n + i] = C(3.0 * U(rng), 0.0);
        for (size_t j = i + 1; j < n; ++j) {
            C v(U(rng), U(rng));
            A[i * n + j] = v;
            A[j * n + i] = std::conj(v);
        }
    }
    HermitianEigen e = hermitian_eigen(A, n);

    // ascending order
    for (size_t i = 0; i + 1 < n; ++i) CHECK(e.values[i] <= e.values[i + 1]);

    // trace preserved
    double tr = 0.0, sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        tr += A[i * n + i].real();
        sum += e.values[i];
    }
    CHECK(std::abs(tr - sum) <= 1e-11);

    // residual ||A v - lambda v|| small, vectors orthonormal
    for (size_t i = 0; i < n; ++i) {
        double res = 0.0;
        for (size_t r2 = 0; r2 < n; ++r2) {
            C acc(0, 0);
            for (size_t c2 = 0; c2 < n; ++c2) acc += A[r2 * n + c2] * e.vectors[i][c2];
            acc -= e.values[i] * e.vectors[i][r2];
            res += std::norm(acc);
        }
        CHECK(std::sqrt(res) <= 1e-12 * (1.0 + std::abs(e.values[i])) * n);
        for (size_t j = 0; j <= i; ++j) {
            C dot(0, 0);
            for (size_t k = 0; k < n; ++k) dot += std::conj(e.vectors[i][k]) * e.vectors[j][k];
            if (i == j)
                CHECK(std::abs(dot - C(1, 0)) <= 1e-12);
            else
                CHECK(std::abs(dot) <= 1e-12);
        }
    }

    // deterministic phase convention: largest component real positive
    for (size_t i = 0; i < n; ++i) {
        size_t kmax = 0;
        double best = -1.0;
        for (size_t k = 0; k < n; ++k)
            if (std::abs(e.vectors[i][k]) > best) {
                best = std::abs(e.vectors[i][k]);
                kmax = k;
            }
        CHECK(e.vectors[i][kmax].real() > 0.0);
        CHECK(std::abs(e.vectors[i][kmax].imag()) <= 1e-13);
    }
}

} // TEST_SUITE
