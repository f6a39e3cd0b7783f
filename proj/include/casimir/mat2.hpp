#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace casimir {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> a{};

    constexpr Mat2() = default;
    constexpr Mat2(cplx m11, cplx m12, cplx m21, cplx m22) : a{m11, m12, m21, m22} {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr cplx& operator()(int r, int c) { return a[2 * r + c]; }
    constexpr const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }
    cplx trace() const { return a[0] + a[3]; }

    Mat2 adjoint() const { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
                x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a[0] + y.a[0], x.a[1] + y.a[1], x.a[2] + y.a[2], x.a[3] + y.a[3]};
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {x.a[0] - y.a[0], x.a[1] - y.a[1], x.a[2] - y.a[2], x.a[3] - y.a[3]};
    }
    friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a[0], s * x.a[1], s * x.a[2], s * x.a[3]}; }
};

/// Largest elementwise deviation between two matrices.
inline double max_abs_diff(const Mat2& x, const Mat2& y) { return (x - y).max_abs(); }

}  // namespace casimir
