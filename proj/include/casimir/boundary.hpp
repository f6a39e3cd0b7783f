#pragma once

// U(2) boundary conditions for -d^2/dx^2 on [0, L]:
//
//   ( f(0) + i f'(0) )       ( f(0) - i f'(0) )
//   ( f(L) - i f'(L) )  = U  ( f(L) + i f'(L) )
//
// The boundary length scale is fixed to 1 throughout the library.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "casimir/errors.hpp"
#include "casimir/mat2.hpp"

namespace casimir {

/// (alpha, beta, n) coordinates of U = e^{i alpha}[cos(beta) 1 + i sin(beta) n.sigma].
struct BoundaryParams {
    double alpha = 0.0;
    double beta = 0.0;
    std::array<double, 3> n{0.0, 0.0, 1.0};

    /// Reduce alpha to [0, 2pi) and beta to [-pi/2, pi/2] without changing the matrix.
    BoundaryParams canonical() const {
        constexpr double pi = std::numbers::pi;
        BoundaryParams out = *this;
        double b = std::remainder(out.beta, 2.0 * pi);  // (-pi, pi]
        if (b > pi / 2) {
            b -= pi;
            out.alpha += pi;
        } else if (b < -pi / 2) {
            b += pi;
            out.alpha += pi;
        }
        out.beta = b;
        out.alpha = std::fmod(out.alpha, 2.0 * pi);
        if (out.alpha < 0) out.alpha += 2.0 * pi;
        return out;
    }

    double n_norm() const { return std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]); }
};

inline constexpr double kUnitVectorTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-10;

/// A validated unitary boundary matrix together with its determinant and trace.
class BoundaryCondition {
public:
    /// Accepts any 2x2 matrix that is unitary to 1e-10 elementwise.
    static BoundaryCondition from_matrix(const Mat2& u) {
        const Mat2 gram = u.adjoint() * u;
        const double dev = max_abs_diff(gram, Mat2::identity());
        if (!(dev <= kUnitarityTol))
            throw ValidationError("boundary matrix is not unitary (max |U^dag U - 1| = " + std::to_string(dev) + ")");
        return BoundaryCondition(u, std::nullopt);
    }

    /// As above, recording the (alpha, beta, n) coordinates the caller knows for u.
    static BoundaryCondition from_matrix(const Mat2& u, const BoundaryParams& params) {
        BoundaryCondition bc = from_matrix(u);
        bc.params_ = params.canonical();
        return bc;
    }

    const Mat2& u() const { return u_; }
    cplx det_u() const { return det_; }
    cplx tr_u() const { return tr_; }
    /// U12 + U21, the off-diagonal coupling entering the spectral function.
    cplx offdiag_sum() const { return u_(0, 1) + u_(1, 0); }
    const std::optional<BoundaryParams>& params() const { return params_; }

    /// One branch of sqrt(det U); U / phase() lies in SU(2).
    cplx phase() const { return std::sqrt(det_); }

    /// Eigenvalues of U (roots of z^2 - tr z + det).
    std::array<cplx, 2> eigenvalues() const {
        const cplx disc = std::sqrt(tr_ * tr_ - 4.0 * det_);
        return {0.5 * (tr_ + disc), 0.5 * (tr_ - disc)};
    }

private:
    friend BoundaryCondition build_unitary(const BoundaryParams& params);

    BoundaryCondition(const Mat2& u, std::optional<BoundaryParams> params)
        : u_(u), det_(u.det()), tr_(u.trace()), params_(std::move(params)) {}

    Mat2 u_;
    cplx det_;
    cplx tr_;
    std::optional<BoundaryParams> params_;
};

/// e^{i alpha}[cos(beta) 1 + i sin(beta) (n . sigma)].
inline BoundaryCondition build_unitary(const BoundaryParams& params) {
    const double norm = params.n_norm();
    if (!(std::abs(norm - 1.0) <= kUnitVectorTol))
        throw ValidationError("boundary direction n is not a unit vector (|n| = " + std::to_string(norm) + ")");
    const auto& n = params.n;
    // n.sigma = [[n3, n1 - i n2], [n1 + i n2, -n3]]
    const Mat2 n_sigma{n[2], cplx(n[0], -n[1]), cplx(n[0], n[1]), -n[2]};
    const cplx c = std::cos(params.beta);
    const cplx is = I * std::sin(params.beta);
    const Mat2 su2 = c * Mat2::identity() + is * n_sigma;
    const Mat2 u = std::polar(1.0, params.alpha) * su2;
    return BoundaryCondition(u, params.canonical());
}

/// c_U(z) = det(U) - tr(U) z + z^2 = det(z - U).
inline cplx char_poly(const BoundaryCondition& bc, cplx z) { return bc.det_u() - bc.tr_u() * z + z * z; }

namespace boundary {

// The named conditions below use exact matrix entries; build_unitary at the
// recorded parameters reproduces them up to rounding in the trig functions.

/// U = -1.
inline BoundaryCondition dirichlet() {
    return BoundaryCondition::from_matrix({-1.0, 0.0, 0.0, -1.0}, {std::numbers::pi, 0.0, {0.0, 0.0, 1.0}});
}

/// U = +1.
inline BoundaryCondition neumann() {
    return BoundaryCondition::from_matrix(Mat2::identity(), {0.0, 0.0, {0.0, 0.0, 1.0}});
}

/// Bloch quasi-periodic condition U = [[0, e^{i theta}], [e^{-i theta}, 0]].
inline BoundaryCondition quasi_periodic(double theta) {
    const Mat2 u{0.0, std::polar(1.0, theta), std::polar(1.0, -theta), 0.0};
    return BoundaryCondition::from_matrix(
        u, {1.5 * std::numbers::pi, 0.5 * std::numbers::pi, {std::cos(theta), -std::sin(theta), 0.0}});
}

/// U = e^{i phi} 1: decoupled Robin ends f'(0) = tan(phi/2) f(0), f'(L) = -tan(phi/2) f(L).
inline BoundaryCondition robin(double phi) { return build_unitary({phi, 0.0, {0.0, 0.0, 1.0}}); }

}  // namespace boundary

}  // namespace casimir
