#include <doctest.h>

#include <random>

#include "sefm/linalg.hpp"
#include "support/oracles.hpp"

using namespace sefm;

namespace {

MatX random_matrix(std::mt19937_64& rng, int rows, int cols) {
    MatX a(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) a(r, c) = oracle::uniform(rng, -5.0, 5.0);
    return a;
}

double reconstruction_error(const MatX& a, const SvdResult& d) {
    double err = 0.0, scale = 0.0;
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            double v = 0.0;
            for (int k = 0; k < a.cols(); ++k)
                v += d.u(r, k) * d.s[size_t(k)] * d.v(c, k);
            err += (v - a(r, c)) * (v - a(r, c));
            scale += a(r, c) * a(r, c);
        }
    }
    return std::sqrt(err) / std::max(std::sqrt(scale), 1e-300);
}

}  // namespace

TEST_CASE("svd reconstructs random small matrices to machine precision") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int rows = 3 + int(oracle::uniform01(rng) * 6);
        int cols = 3 + int(oracle::uniform01(rng) * 4);
        MatX a = random_matrix(rng, rows, cols);
        SvdResult d = svd(a);
        CHECK(reconstruction_error(a, d) < 1e-12);
        for (size_t i = 1; i < d.s.size(); ++i) CHECK(d.s[i - 1] >= d.s[i]);
    }
}

TEST_CASE("svd V columns are orthonormal") {
    std::mt19937_64 rng(12);
    MatX a = random_matrix(rng, 9, 9);
    SvdResult d = svd(a);
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            double dotv = 0.0;
            for (int r = 0; r < 9; ++r) dotv += d.v(r, i) * d.v(r, j);
            CHECK(dotv == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("svd handles wide matrices via zero-row padding") {
    std::mt19937_64 rng(13);
    MatX a = random_matrix(rng, 8, 9);
    SvdResult d = svd(a);
    CHECK(reconstruction_error(a, d) < 1e-12);
    // Rank cannot exceed 8, so the smallest singular value vanishes.
    CHECK(d.s[8] < 1e-12 * d.s[0]);
}

TEST_CASE("null_vector3 finds the kernel of a rank-2 matrix") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        Vec3 u{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
               oracle::uniform(rng, -1, 1)};
        Vec3 v{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
               oracle::uniform(rng, -1, 1)};
        // rows u, v, u+v: the kernel is orthogonal to span(u, v)
        Mat3 a;
        for (int c = 0; c < 3; ++c) {
            a(0, c) = u[c];
            a(1, c) = v[c];
            a(2, c) = u[c] + v[c];
        }
        Vec3 n = null_vector3(a);
        CHECK(norm(a * n) < 1e-12);
        CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("svd3 completes U for rank-deficient inputs") {
    Mat3 a = Mat3::zero();
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;  // rank 2
    Svd3Result d = svd3(a);
    CHECK(d.s[0] == doctest::Approx(2.0));
    CHECK(d.s[1] == doctest::Approx(1.0));
    CHECK(d.s[2] == doctest::Approx(0.0));
    CHECK(std::abs(det(d.u)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverse times original is identity") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        Mat3 a;
        for (double& e : a.m) e = oracle::uniform(rng, -3.0, 3.0);
        if (std::abs(det(a)) < 0.1) continue;
        Mat3 prod = inverse(a) * a;
        Mat3 eye = Mat3::identity();
        for (int i = 0; i < 9; ++i)
            CHECK(prod.m[i] == doctest::Approx(eye.m[i]).epsilon(1e-10));
    }
}

TEST_CASE("skew matrix reproduces the cross product") {
    Vec3 t{1.0, -2.0, 0.5};
    Vec3 x{0.3, 0.7, -1.2};
    Vec3 a = skew(t) * x;
    Vec3 b = cross(t, x);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]));
}
