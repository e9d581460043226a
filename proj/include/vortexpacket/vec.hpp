#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace vortex {

// Small fixed-size 3-vector used for positions, momenta, fields.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    constexpr Vec3& operator/=(double s) { x /= s; y /= s; z /= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a /= s; }
    friend constexpr bool operator==(const Vec3& a, const Vec3& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

constexpr double norm2(const Vec3& a) { return dot(a, a); }

inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

inline bool finite(const Vec3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

// Row-major 3x3 matrix; used for field Jacobians and the implicit velocity solve.
struct Mat3 {
    std::array<double, 9> a{};  // a[3*row + col]

    constexpr double& operator()(int r, int c) { return a[3 * r + c]; }
    constexpr double operator()(int r, int c) const { return a[3 * r + c]; }

    static constexpr Mat3 zero() { return {}; }
    static constexpr Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }
    // m_ij = u_i v_j
    static constexpr Mat3 outer(const Vec3& u, const Vec3& v) {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = u[i] * v[j];
        return m;
    }

    constexpr Mat3& operator+=(const Mat3& o) {
        for (int i = 0; i < 9; ++i) a[i] += o.a[i];
        return *this;
    }
    constexpr Mat3& operator*=(double s) {
        for (double& v : a) v *= s;
        return *this;
    }
    friend constexpr Mat3 operator+(Mat3 m, const Mat3& o) { return m += o; }
    friend constexpr Mat3 operator*(Mat3 m, double s) { return m *= s; }
    friend constexpr Mat3 operator*(double s, Mat3 m) { return m *= s; }

    // matrix * vector
    friend constexpr Vec3 operator*(const Mat3& m, const Vec3& v) {
        return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
                m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
                m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
    }

    constexpr Mat3 transposed() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
        return t;
    }

    // contraction v_j M_ji (vector from the left)
    friend constexpr Vec3 operator*(const Vec3& v, const Mat3& m) {
        return {v.x * m(0, 0) + v.y * m(1, 0) + v.z * m(2, 0),
                v.x * m(0, 1) + v.y * m(1, 1) + v.z * m(2, 1),
                v.x * m(0, 2) + v.y * m(1, 2) + v.z * m(2, 2)};
    }
};

}  // namespace vortex
