#pragma once

#include <array>
#include <cmath>

#include "gpe/common.hpp"

namespace gpe {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Lower-triangular 3x3 factor. Entries are stored raw (diagonals may be
// negative or zero); the product L*L^T is PSD for any values.
struct LowerTri3 {
    double l11 = 1, l21 = 0, l22 = 1, l31 = 0, l32 = 0, l33 = 1;

    double& operator[](int i) { return (&l11)[i]; }     // serialization order
    double operator[](int i) const { return (&l11)[i]; }
    static constexpr int kEntries = 6;

    double operator()(int r, int c) const {
        static constexpr int idx[3][3] = {{0, -1, -1}, {1, 2, -1}, {3, 4, 5}};
        int i = idx[r][c];
        return i < 0 ? 0.0 : (&l11)[i];
    }

    bool finite() const {
        for (int i = 0; i < 6; ++i)
            if (!std::isfinite((&l11)[i])) return false;
        return true;
    }
};

// Symmetric 3x3, six stored entries (lower triangle, row-major:
// m00, m10, m11, m20, m21, m22). Symmetry is exact by storage.
struct SymMat3 {
    std::array<double, 6> m{};

    static SymMat3 identity() { return SymMat3{{1, 0, 1, 0, 0, 1}}; }
    static SymMat3 diag(double a, double b, double c) { return SymMat3{{a, 0, b, 0, 0, c}}; }

    double operator()(int r, int c) const {
        if (r < c) std::swap(r, c);
        static constexpr int base[3] = {0, 1, 3};
        return m[base[r] + c];
    }
    double& at(int r, int c) {
        if (r < c) std::swap(r, c);
        static constexpr int base[3] = {0, 1, 3};
        return m[base[r] + c];
    }

    double trace() const { return m[0] + m[2] + m[5]; }
    bool finite() const {
        for (double v : m)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// General 3x3, row-major.
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

    double operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c) { return m[3 * r + c]; }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transposed() const {
        return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }

    bool finite() const {
        for (double v : m)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

Mat3 mat3_mul(const Mat3& a, const Mat3& b);
double mat3_det(const Mat3& t);

// Clamp threshold for Cholesky diagonals when inverting the precision.
inline constexpr double kDiagEps = 1e-6;

// L -> L*L^T (the precision matrix). Total function, PSD by construction.
SymMat3 chol_to_precision(const LowerTri3& l);

// L -> (L*L^T)^-1 via two triangular solves. Throws NearSingular when any
// |diagonal| < kDiagEps.
SymMat3 precision_to_covariance(const LowerTri3& l);

// d^T M d
inline double quadratic_form(const SymMat3& m, const Vec3& d) {
    return m.m[0] * d.x * d.x + m.m[2] * d.y * d.y + m.m[5] * d.z * d.z +
           2.0 * (m.m[1] * d.x * d.y + m.m[3] * d.x * d.z + m.m[4] * d.y * d.z);
}

// Largest eigenvalue of a symmetric 3x3 (closed form plus a guarded Newton
// polish on the characteristic polynomial).
double sym_eig_max(const SymMat3& m);

// Inverse via adjugate. Throws Singular when |det| < 1e-8.
Mat3 mat3_inverse(const Mat3& t);

// T^T * S * T for symmetric S (used to carry a precision through a point
// transform).
SymMat3 congruence(const Mat3& t, const SymMat3& s);

// Cholesky factor of an SPD symmetric matrix; adds `jitter` to the diagonal
// and retries once if a pivot fails. Throws NearSingular if that also fails.
LowerTri3 cholesky3(const SymMat3& a, double jitter = 1e-10);

}  // namespace gpe
