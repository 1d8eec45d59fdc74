#include "gpe/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace gpe {

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

double mat3_det(const Mat3& t) {
    return t(0, 0) * (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) -
           t(0, 1) * (t(1, 0) * t(2, 2) - t(1, 2) * t(2, 0)) +
           t(0, 2) * (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0));
}

SymMat3 chol_to_precision(const LowerTri3& l) {
    // rows of L: (l11,0,0), (l21,l22,0), (l31,l32,l33)
    SymMat3 p;
    p.m[0] = l.l11 * l.l11;
    p.m[1] = l.l21 * l.l11;
    p.m[2] = l.l21 * l.l21 + l.l22 * l.l22;
    p.m[3] = l.l31 * l.l11;
    p.m[4] = l.l31 * l.l21 + l.l32 * l.l22;
    p.m[5] = l.l31 * l.l31 + l.l32 * l.l32 + l.l33 * l.l33;
    return p;
}

SymMat3 precision_to_covariance(const LowerTri3& l) {
    if (std::abs(l.l11) < kDiagEps || std::abs(l.l22) < kDiagEps ||
        std::abs(l.l33) < kDiagEps)
        throw NearSingular("Cholesky diagonal below 1e-6; covariance undefined");

    // Solve L * Y = I (forward), then L^T * X = Y (backward); X = (L L^T)^-1.
    // Columns of Y computed explicitly.
    double inv11 = 1.0 / l.l11, inv22 = 1.0 / l.l22, inv33 = 1.0 / l.l33;
    // Y = L^-1 (lower triangular)
    double y11 = inv11;
    double y21 = -l.l21 * y11 * inv22;
    double y22 = inv22;
    double y31 = -(l.l31 * y11 + l.l32 * y21) * inv33;
    double y32 = -l.l32 * y22 * inv33;
    double y33 = inv33;
    // X = Y^T * Y, symmetric
    SymMat3 c;
    c.m[0] = y11 * y11 + y21 * y21 + y31 * y31;
    c.m[1] = y21 * y22 + y31 * y32;
    c.m[2] = y22 * y22 + y32 * y32;
    c.m[3] = y31 * y33;
    c.m[4] = y32 * y33;
    c.m[5] = y33 * y33;
    return c;
}

namespace {

// p(x) = det(M - x I) evaluated with its derivative, for Newton polish.
void char_poly(const SymMat3& s, double x, double& p, double& dp) {
    double a = s.m[0] - x, b = s.m[2] - x, c = s.m[5] - x;
    double d = s.m[1], e = s.m[3], f = s.m[4];
    p = a * (b * c - f * f) - d * (d * c - f * e) + e * (d * f - b * e);
    // derivative of det along -I: -(sum of principal 2x2 minors of (M - xI))
    dp = -((b * c - f * f) + (a * c - e * e) + (a * b - d * d));
}

}  // namespace

double sym_eig_max(const SymMat3& s) {
    double p1 = s.m[1] * s.m[1] + s.m[3] * s.m[3] + s.m[4] * s.m[4];
    double lam;
    if (p1 == 0.0) {
        return std::max({s.m[0], s.m[2], s.m[5]});
    }
    double q = s.trace() / 3.0;
    double p2 = (s.m[0] - q) * (s.m[0] - q) + (s.m[2] - q) * (s.m[2] - q) +
                (s.m[5] - q) * (s.m[5] - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    Mat3 b;  // (M - qI) / p
    b(0, 0) = (s.m[0] - q) / p;
    b(1, 1) = (s.m[2] - q) / p;
    b(2, 2) = (s.m[5] - q) / p;
    b(0, 1) = b(1, 0) = s.m[1] / p;
    b(0, 2) = b(2, 0) = s.m[3] / p;
    b(1, 2) = b(2, 1) = s.m[4] / p;
    double r = std::clamp(mat3_det(b) / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    lam = q + 2.0 * p * std::cos(phi);

    // Newton polish; skipped near repeated roots where p' vanishes.
    double scale = std::max({std::abs(s.m[0]), std::abs(s.m[2]), std::abs(s.m[5]), p1, 1e-300});
    for (int it = 0; it < 3; ++it) {
        double f, df;
        char_poly(s, lam, f, df);
        if (std::abs(df) < 1e-8 * scale * scale) break;
        double step = f / df;
        lam -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(lam))) break;
    }
    return lam;
}

Mat3 mat3_inverse(const Mat3& t) {
    double det = mat3_det(t);
    if (std::abs(det) < 1e-8) throw Singular("3x3 determinant below 1e-8");
    double inv = 1.0 / det;
    Mat3 r;
    r(0, 0) = (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) * inv;
    r(0, 1) = (t(0, 2) * t(2, 1) - t(0, 1) * t(2, 2)) * inv;
    r(0, 2) = (t(0, 1) * t(1, 2) - t(0, 2) * t(1, 1)) * inv;
    r(1, 0) = (t(1, 2) * t(2, 0) - t(1, 0) * t(2, 2)) * inv;
    r(1, 1) = (t(0, 0) * t(2, 2) - t(0, 2) * t(2, 0)) * inv;
    r(1, 2) = (t(0, 2) * t(1, 0) - t(0, 0) * t(1, 2)) * inv;
    r(2, 0) = (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0)) * inv;
    r(2, 1) = (t(0, 1) * t(2, 0) - t(0, 0) * t(2, 1)) * inv;
    r(2, 2) = (t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0)) * inv;
    return r;
}

SymMat3 congruence(const Mat3& t, const SymMat3& s) {
    // R = T^T S T
    Mat3 st;  // S*T
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0;
            for (int k = 0; k < 3; ++k) acc += s(i, k) * t(k, j);
            st(i, j) = acc;
        }
    SymMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0;
            for (int k = 0; k < 3; ++k) acc += t(k, i) * st(k, j);
            r.at(i, j) = acc;
        }
    return r;
}

namespace {

bool try_cholesky3(const SymMat3& a, LowerTri3& l) {
    double d0 = a(0, 0);
    if (d0 <= 0) return false;
    l.l11 = std::sqrt(d0);
    l.l21 = a(1, 0) / l.l11;
    double d1 = a(1, 1) - l.l21 * l.l21;
    if (d1 <= 0) return false;
    l.l22 = std::sqrt(d1);
    l.l31 = a(2, 0) / l.l11;
    l.l32 = (a(2, 1) - l.l31 * l.l21) / l.l22;
    double d2 = a(2, 2) - l.l31 * l.l31 - l.l32 * l.l32;
    if (d2 <= 0) return false;
    l.l33 = std::sqrt(d2);
    return true;
}

}  // namespace

LowerTri3 cholesky3(const SymMat3& a, double jitter) {
    LowerTri3 l;
    if (try_cholesky3(a, l)) return l;
    SymMat3 aj = a;
    double bump = jitter * std::max(1.0, a.trace() / 3.0);
    aj.m[0] += bump;
    aj.m[2] += bump;
    aj.m[5] += bump;
    if (try_cholesky3(aj, l)) return l;
    throw NearSingular("matrix not positive definite after jitter");
}

}  // namespace gpe
