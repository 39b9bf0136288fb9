#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sefm {

// Subpixel image coordinate.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

struct Vec3 {
    double v[3] = {0.0, 0.0, 0.0};

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
    return {s * a[0], s * a[1], s * a[2]};
}
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return n > 0.0 ? (1.0 / n) * a : a;
}

// Homogeneous image point / line. A point p lies on line l iff dot(l, p) == 0.
using HomPoint2 = Vec3;
using HomLine2 = Vec3;

inline HomPoint2 hom(Point2 p) { return {p.x, p.y, 1.0}; }
inline Point2 dehom(const HomPoint2& p) { return {p[0] / p[2], p[1] / p[2]}; }

struct Mat3 {
    // Row-major.
    double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};

    double& operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
    static Mat3 zero() { return {}; }

    Vec3 row(int r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
    Vec3 col(int c) const { return {m[c], m[c + 3], m[c + 6]}; }
    void set_col(int c, const Vec3& v) {
        m[c] = v[0];
        m[c + 3] = v[1];
        m[c + 6] = v[2];
    }
};

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}
inline Vec3 operator*(const Mat3& a, const Vec3& x) {
    return {dot(a.row(0), x), dot(a.row(1), x), dot(a.row(2), x)};
}
inline Mat3 operator*(double s, const Mat3& a) {
    Mat3 r = a;
    for (double& e : r.m) e *= s;
    return r;
}
inline Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}
inline Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
}
inline Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
    return r;
}
inline double det(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}
inline double frobenius_norm(const Mat3& a) {
    double s = 0.0;
    for (double e : a.m) s += e * e;
    return std::sqrt(s);
}
// Cross-product matrix: skew(t) * x == cross(t, x).
inline Mat3 skew(const Vec3& t) {
    return {{0, -t[2], t[1], t[2], 0, -t[0], -t[1], t[0], 0}};
}
Mat3 inverse(const Mat3& a);

// 3x4 projection matrix, row-major.
struct Mat34 {
    double m[12] = {0};

    double& operator()(int r, int c) { return m[4 * r + c]; }
    double operator()(int r, int c) const { return m[4 * r + c]; }

    Vec3 col(int c) const { return {m[c], m[c + 4], m[c + 8]}; }
    Mat3 left3() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(i, j);
        return r;
    }
    static Mat34 from(const Mat3& a, const Vec3& t) {
        Mat34 p;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) p(i, j) = a(i, j);
            p(i, 3) = t[i];
        }
        return p;
    }
};

// Projects a homogeneous 3D point (x, y, z, w).
inline Vec3 operator*(const Mat34& p, const std::array<double, 4>& x) {
    Vec3 r;
    for (int i = 0; i < 3; ++i)
        r[i] = p(i, 0) * x[0] + p(i, 1) * x[1] + p(i, 2) * x[2] + p(i, 3) * x[3];
    return r;
}
inline Vec3 project_point(const Mat34& p, const Vec3& x) {
    return p * std::array<double, 4>{x[0], x[1], x[2], 1.0};
}

// Small dense row-major matrix for the estimation systems (N x 9, 4 x 4).
class MatX {
public:
    MatX() = default;
    MatX(int rows, int cols) : rows_(rows), cols_(cols), d_(size_t(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return d_[size_t(r) * cols_ + c]; }
    double operator()(int r, int c) const { return d_[size_t(r) * cols_ + c]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> d_;
};

// Thin SVD A = U * diag(s) * V^T computed by one-sided Jacobi rotations.
// Singular values are sorted descending; V columns are orthonormal. Columns
// of U matching zero singular values are left as zero vectors.
struct SvdResult {
    MatX u;                  // rows(A) x cols(A)
    std::vector<double> s;   // cols(A)
    MatX v;                  // cols(A) x cols(A)
};
SvdResult svd(const MatX& a);

struct Svd3Result {
    Mat3 u;   // completed to a full basis even when rank < 3
    Vec3 s;
    Mat3 v;
};
Svd3Result svd3(const Mat3& a);

// Right null vector (last column of V). For rank-deficient A this is the
// direction with the smallest singular value.
Vec3 null_vector3(const Mat3& a);

}  // namespace sefm
