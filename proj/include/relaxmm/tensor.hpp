#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace relaxmm {

using Vec3 = std::array<double, 3>;
using Point = std::array<double, 3>;

/// Dense 3x3 tensor stored row-major; entry (i, j) lives at index 3*i + j.
struct Tensor3 {
    std::array<double, 9> a{};

    static constexpr Tensor3 zero() { return {}; }
    static constexpr Tensor3 identity() {
        Tensor3 t;
        t.a[0] = t.a[4] = t.a[8] = 1.0;
        return t;
    }

    constexpr double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
    constexpr double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

    constexpr Tensor3& operator+=(const Tensor3& o) {
        for (std::size_t c = 0; c < 9; ++c) a[c] += o.a[c];
        return *this;
    }
    constexpr Tensor3& operator-=(const Tensor3& o) {
        for (std::size_t c = 0; c < 9; ++c) a[c] -= o.a[c];
        return *this;
    }
    constexpr Tensor3& operator*=(double s) {
        for (auto& v : a) v *= s;
        return *this;
    }
    friend constexpr Tensor3 operator+(Tensor3 x, const Tensor3& y) { return x += y; }
    friend constexpr Tensor3 operator-(Tensor3 x, const Tensor3& y) { return x -= y; }
    friend constexpr Tensor3 operator*(double s, Tensor3 x) { return x *= s; }
    friend constexpr Tensor3 operator*(Tensor3 x, double s) { return x *= s; }
    friend constexpr bool operator==(const Tensor3&, const Tensor3&) = default;
};

constexpr Tensor3 transpose(const Tensor3& x) {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = x(j, i);
    return t;
}

constexpr double trace(const Tensor3& x) { return x.a[0] + x.a[4] + x.a[8]; }

constexpr Tensor3 sym(const Tensor3& x) { return 0.5 * (x + transpose(x)); }

constexpr Tensor3 skew(const Tensor3& x) { return 0.5 * (x - transpose(x)); }

/// Deviatoric part X - tr(X)/3 Id.
constexpr Tensor3 dev(const Tensor3& x) { return x - (trace(x) / 3.0) * Tensor3::identity(); }

/// Frobenius inner product <X, Y> = tr(X Y^T).
constexpr double dot(const Tensor3& x, const Tensor3& y) {
    double s = 0.0;
    for (std::size_t c = 0; c < 9; ++c) s += x.a[c] * y.a[c];
    return s;
}

constexpr double norm_squared(const Tensor3& x) { return dot(x, x); }

constexpr double dot(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

constexpr Vec3 cross(const Vec3& x, const Vec3& y) {
    return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

/// Matrix-vector product X v.
constexpr Vec3 matvec(const Tensor3& x, const Vec3& v) {
    return {x(0, 0) * v[0] + x(0, 1) * v[1] + x(0, 2) * v[2], x(1, 0) * v[0] + x(1, 1) * v[1] + x(1, 2) * v[2],
            x(2, 0) * v[0] + x(2, 1) * v[1] + x(2, 2) * v[2]};
}

constexpr Vec3 row(const Tensor3& x, int i) { return {x(i, 0), x(i, 1), x(i, 2)}; }

struct Decomposition {
    Tensor3 sym;
    Tensor3 skew;
    double trace;
};

constexpr Decomposition decompose(const Tensor3& x) { return {sym(x), skew(x), trace(x)}; }

}  // namespace relaxmm
