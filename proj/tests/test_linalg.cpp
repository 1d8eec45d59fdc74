#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gpe/linalg.hpp"

using namespace gpe;

namespace {

// dense 3x3 multiply oracle: (L L^T)_ij from explicit loops
double dense_llt(const LowerTri3& l, int i, int j) {
    double s = 0;
    for (int k = 0; k < 3; ++k) s += l(i, k) * l(j, k);
    return s;
}

LowerTri3 random_lower(Rng& rng, double diag_lo = 0.3, double diag_hi = 2.0) {
    LowerTri3 l;
    l.l11 = rng.uniform(diag_lo, diag_hi);
    l.l22 = rng.uniform(diag_lo, diag_hi);
    l.l33 = rng.uniform(diag_lo, diag_hi);
    l.l21 = rng.uniform(-1.0, 1.0);
    l.l31 = rng.uniform(-1.0, 1.0);
    l.l32 = rng.uniform(-1.0, 1.0);
    return l;
}

SymMat3 random_spd(Rng& rng) { return chol_to_precision(random_lower(rng)); }

// largest real root of det(M - x I) = 0 by bisection on the cubic
double eig_max_oracle(const SymMat3& s) {
    auto poly = [&](double x) {
        double a = s(0, 0) - x, b = s(1, 1) - x, c = s(2, 2) - x;
        double d = s(1, 0), e = s(2, 0), f = s(2, 1);
        return a * (b * c - f * f) - d * (d * c - f * e) + e * (d * f - b * e);
    };
    // Gershgorin upper bound
    double hi = -1e300;
    for (int i = 0; i < 3; ++i) {
        double row = s(i, i);
        for (int j = 0; j < 3; ++j)
            if (j != i) row += std::abs(s(i, j));
        hi = std::max(hi, row);
    }
    double lo = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;  // mean <= max eigenvalue
    // poly(x) -> -inf as x -> +inf; the largest root is the last sign change
    while (poly(lo) < 0) lo -= std::max(1.0, std::abs(lo));
    hi += 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (poly(mid) >= 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("chol_to_precision identity and diagonal") {
    LowerTri3 id;
    SymMat3 p = chol_to_precision(id);
    CHECK(p(0, 0) == 1.0);
    CHECK(p(1, 1) == 1.0);
    CHECK(p(2, 2) == 1.0);
    CHECK(p(1, 0) == 0.0);

    LowerTri3 d;
    d.l11 = 2;
    p = chol_to_precision(d);
    CHECK(p(0, 0) == 4.0);
    CHECK(p(1, 1) == 1.0);
    CHECK(p(2, 2) == 1.0);
}

TEST_CASE("chol_to_precision matches dense multiply oracle") {
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        LowerTri3 l = random_lower(rng);
        SymMat3 p = chol_to_precision(l);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(p(i, j) - dense_llt(l, i, j)) <= 1e-12);
    }
}

TEST_CASE("chol_to_precision is PSD for arbitrary finite L") {
    Rng rng(7);
    for (int t = 0; t < 500; ++t) {
        LowerTri3 l;
        for (int i = 0; i < 6; ++i) l[i] = rng.uniform(-5.0, 5.0);
        SymMat3 p = chol_to_precision(l);
        // all eigenvalues >= -1e-12: check via v^T P v over random v
        for (int k = 0; k < 20; ++k) {
            Vec3 v{rng.normal(), rng.normal(), rng.normal()};
            CHECK(quadratic_form(p, v) >= -1e-12 * std::max(1.0, v.squared_norm()));
        }
    }
}

TEST_CASE("precision_to_covariance closed forms") {
    LowerTri3 id;
    SymMat3 c = precision_to_covariance(id);
    CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    LowerTri3 d;
    d.l11 = 2;
    c = precision_to_covariance(d);
    CHECK(c(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(c(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("precision_to_covariance round-trips against chol_to_precision") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        LowerTri3 l = random_lower(rng);
        SymMat3 p = chol_to_precision(l);
        SymMat3 c = precision_to_covariance(l);
        // P * C should be the identity
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += p(i, k) * c(k, j);
                CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-9);
            }
    }
}

TEST_CASE("precision_to_covariance rejects tiny diagonals") {
    LowerTri3 l;
    l.l22 = 1e-7;
    CHECK_THROWS_AS(precision_to_covariance(l), NearSingular);
}

TEST_CASE("quadratic_form closed forms and naive loop oracle") {
    CHECK(quadratic_form(SymMat3::identity(), {1, 0, 0}) == 1.0);
    CHECK(quadratic_form(SymMat3::diag(4, 1, 1), {1, 0, 0}) == 4.0);

    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        SymMat3 m = random_spd(rng);
        Vec3 d{rng.normal(), rng.normal(), rng.normal()};
        double naive = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) naive += d[i] * m(i, j) * d[j];
        CHECK(std::abs(quadratic_form(m, d) - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
    }
}

TEST_CASE("sym_eig_max trivial cases") {
    CHECK(sym_eig_max(SymMat3::identity()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sym_eig_max(SymMat3::diag(0.25, 1, 9)) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("sym_eig_max matches characteristic polynomial root") {
    Rng rng(17);
    for (int t = 0; t < 300; ++t) {
        SymMat3 m = random_spd(rng);
        double got = sym_eig_max(m);
        double want = eig_max_oracle(m);
        CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("sym_eig_max dominates Rayleigh quotients") {
    Rng rng(19);
    for (int t = 0; t < 100; ++t) {
        SymMat3 m = random_spd(rng);
        double lam = sym_eig_max(m);
        for (int k = 0; k < 30; ++k) {
            Vec3 v{rng.normal(), rng.normal(), rng.normal()};
            double rq = quadratic_form(m, v) / v.squared_norm();
            CHECK(lam >= rq - 1e-9 * std::max(1.0, std::abs(rq)));
        }
    }
}

TEST_CASE("mat3_inverse identity, diagonal, rotation") {
    Mat3 i = Mat3::identity();
    Mat3 inv = mat3_inverse(i);
    for (int k = 0; k < 9; ++k) CHECK(inv.m[k] == doctest::Approx(i.m[k]).epsilon(1e-14));

    Mat3 d = Mat3::identity();
    d(0, 0) = d(1, 1) = d(2, 2) = 2;
    inv = mat3_inverse(d);
    CHECK(inv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

    Rng rng(23);
    for (int t = 0; t < 100; ++t) {
        // random rotation from normalized cross products
        Vec3 a{rng.normal(), rng.normal(), rng.normal()};
        Vec3 b{rng.normal(), rng.normal(), rng.normal()};
        a *= 1.0 / a.norm();
        Vec3 c{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
        if (c.norm() < 1e-6) continue;
        c *= 1.0 / c.norm();
        Vec3 d2{c.y * a.z - c.z * a.y, c.z * a.x - c.x * a.z, c.x * a.y - c.y * a.x};
        Mat3 r{{a.x, c.x, d2.x, a.y, c.y, d2.y, a.z, c.z, d2.z}};
        Mat3 rinv = mat3_inverse(r);
        Mat3 rt = r.transposed();
        for (int k = 0; k < 9; ++k) CHECK(std::abs(rinv.m[k] - rt.m[k]) <= 1e-9);
    }
}

TEST_CASE("mat3_inverse rejects singular input") {
    Mat3 z{};
    CHECK_THROWS_AS(mat3_inverse(z), Singular);
}

TEST_CASE("mat3_inverse satisfies T * T^-1 = I") {
    Rng rng(29);
    for (int t = 0; t < 200; ++t) {
        Mat3 m;
        for (int k = 0; k < 9; ++k) m.m[k] = rng.uniform(-2.0, 2.0);
        if (std::abs(mat3_det(m)) < 1e-3) continue;
        Mat3 prod = mat3_mul(m, mat3_inverse(m));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9);
    }
}

TEST_CASE("cholesky3 reconstructs SPD input") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        SymMat3 a = random_spd(rng);
        LowerTri3 l = cholesky3(a);
        SymMat3 back = chol_to_precision(l);
        for (int i = 0; i < 6; ++i) CHECK(std::abs(back.m[i] - a.m[i]) <= 1e-10);
        CHECK(l.l11 > 0);
        CHECK(l.l22 > 0);
        CHECK(l.l33 > 0);
    }
}

TEST_CASE("congruence matches dense T^T S T") {
    Rng rng(37);
    for (int t = 0; t < 100; ++t) {
        Mat3 m;
        for (int k = 0; k < 9; ++k) m.m[k] = rng.uniform(-2.0, 2.0);
        SymMat3 s = random_spd(rng);
        SymMat3 r = congruence(m, s);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double want = 0;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) want += m(a, i) * s(a, b) * m(b, j);
                CHECK(std::abs(r(i, j) - want) <= 1e-11 * std::max(1.0, std::abs(want)));
            }
    }
}

}  // TEST_SUITE
