#pragma once

// Spectral function of the plate problem,
//
//   h_U(k, L) = -2k(det U - 1) cos(kL) - 2k(U12 + U21)
//               + i[(k^2 + 1)(det U + 1) + (k^2 - 1) tr U] sin(kL),
//
// whose real zeros are the normal-mode momenta, and its large-L asymptote
// h_U^inf(i kappa) = (1/2)(kappa - i)^2 c_U(-(kappa + i)/(kappa - i)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "casimir/boundary.hpp"
#include "casimir/errors.hpp"
#include "casimir/roots.hpp"

namespace casimir {

struct SpectralEvaluation {
    cplx k;
    cplx value;
    cplx log_deriv;  ///< d/dk log h at k
};

/// h_U(k, L) from det U, tr U and U12 + U21.
inline cplx h_u(const BoundaryCondition& bc, cplx k, double L) {
    const cplx d = bc.det_u();
    const cplx t = bc.tr_u();
    const cplx s = bc.offdiag_sum();
    const cplx kl = k * L;
    return -2.0 * k * (d - 1.0) * std::cos(kl) - 2.0 * k * s + I * ((k * k + 1.0) * (d + 1.0) + (k * k - 1.0) * t) * std::sin(kl);
}

/// dh_U/dk.
inline cplx h_u_derivative(const BoundaryCondition& bc, cplx k, double L) {
    const cplx d = bc.det_u();
    const cplx t = bc.tr_u();
    const cplx s = bc.offdiag_sum();
    const cplx kl = k * L;
    const cplx c = std::cos(kl);
    const cplx sn = std::sin(kl);
    const cplx poly = (k * k + 1.0) * (d + 1.0) + (k * k - 1.0) * t;
    const cplx dpoly = 2.0 * k * (d + 1.0 + t);
    return -2.0 * (d - 1.0) * c + 2.0 * k * L * (d - 1.0) * sn - 2.0 * s + I * (dpoly * sn + poly * L * c);
}

inline SpectralEvaluation evaluate_h_u(const BoundaryCondition& bc, cplx k, double L) {
    const cplx v = h_u(bc, k, L);
    const cplx dv = h_u_derivative(bc, k, L);
    return {k, v, dv / v};
}

/// The (alpha, beta, n1) form:
/// 2i e^{i alpha}[((k^2-1)cos beta + (k^2+1)cos alpha) sin kL - 2k sin alpha cos kL - 2k n1 sin beta].
inline cplx h_u_parametric(const BoundaryParams& p, cplx k, double L) {
    const cplx kl = k * L;
    const cplx bracket = ((k * k - 1.0) * std::cos(p.beta) + (k * k + 1.0) * std::cos(p.alpha)) * std::sin(kl) -
                         2.0 * k * std::sin(p.alpha) * std::cos(kl) - 2.0 * k * p.n[0] * std::sin(p.beta);
    return 2.0 * I * std::polar(1.0, p.alpha) * bracket;
}

/// h_U^inf(i kappa) = (1/2)(kappa - i)^2 c_U(-(kappa + i)/(kappa - i)).
inline cplx h_u_infinity(const BoundaryCondition& bc, double kappa) {
    const cplx km = kappa - I;
    const cplx z = -(kappa + I) / km;
    return 0.5 * km * km * char_poly(bc, z);
}

namespace detail {

// On the imaginary axis, H(kappa) = h_U(i kappa, L) = A kappa cosh(kappa L) + B kappa + C(kappa) sinh(kappa L)
// with A = -2i(det - 1), B = -2i(U12 + U21), C = (kappa^2 - 1)(det + 1) + (kappa^2 + 1) tr.
// Expanding the exponentials, 2 H^inf = A kappa + C.
struct ImagAxisForm {
    cplx a;
    cplx b;
    cplx a_plus_b;  // -2i(det - 1 + U12 + U21), kept separate so small-kappa cancellation is exact
    cplx c2;  // C = kappa^2 c2 + c0, grouped so Neumann-like cancellations stay exact
    cplx c0;

    explicit ImagAxisForm(const BoundaryCondition& bc)
        : a(-2.0 * I * (bc.det_u() - 1.0)),
          b(-2.0 * I * bc.offdiag_sum()),
          a_plus_b(-2.0 * I * (bc.det_u() - 1.0 + bc.offdiag_sum())),
          c2(bc.det_u() + 1.0 + bc.tr_u()),
          c0(bc.tr_u() - (bc.det_u() + 1.0)) {}

    cplx c(double kappa) const { return kappa * kappa * c2 + c0; }
    cplx dc(double kappa) const { return 2.0 * kappa * c2; }

    cplx h_inf(double kappa) const { return 0.5 * (a * kappa + c(kappa)); }
    cplx dh_inf(double kappa) const { return 0.5 * (a + dc(kappa)); }

    double scale(double kappa) const {
        return std::abs(a) * kappa + std::abs(b) * kappa + std::abs(c(kappa)) + 1e-300;
    }
};

// Below this kappa*L the unscaled hyperbolic form is used.
inline constexpr double kSmallArgument = 1.0;

struct ImagAxisValue {
    cplx scaled;      // e^{-kappa L} h(i kappa)
    cplx log_deriv;   // d/dkappa log h(i kappa) - L
};

inline ImagAxisValue imag_axis_value(const ImagAxisForm& f, double kappa, double L) {
    const double x = kappa * L;
    const cplx c = f.c(kappa);
    const cplx dc = f.dc(kappa);
    if (x <= kSmallArgument) {
        const double sh = std::sinh(x);
        const double ch = std::cosh(x);
        const double cm1 = 2.0 * std::sinh(0.5 * x) * std::sinh(0.5 * x);
        const cplx h = f.a_plus_b * kappa + f.a * kappa * cm1 + c * sh;
        const cplx dh = f.a_plus_b + f.a * cm1 + f.a * x * sh + dc * sh + c * L * ch;
        return {h * std::exp(-x), dh / h - L};
    }
    const double e1 = std::exp(-x);
    const double e2 = e1 * e1;
    const cplx g = 0.5 * (f.a * kappa * (1.0 + e2) + c * (1.0 - e2)) + f.b * kappa * e1;
    const cplx dg = 0.5 * (f.a * (1.0 + e2) - 2.0 * L * f.a * kappa * e2 + dc * (1.0 - e2) + 2.0 * L * c * e2) +
                    f.b * e1 * (1.0 - x);
    return {g, dg / g};
}

}  // namespace detail

/// e^{-kappa L} h_U(i kappa, L), finite for all kappa >= 0.
inline cplx scaled_h_imag(const BoundaryCondition& bc, double kappa, double L) {
    return detail::imag_axis_value(detail::ImagAxisForm(bc), kappa, L).scaled;
}

/// d/dkappa log h_U(i kappa, L).
inline cplx log_deriv_h_imag(const BoundaryCondition& bc, double kappa, double L) {
    return L + detail::imag_axis_value(detail::ImagAxisForm(bc), kappa, L).log_deriv;
}

/// d/dkappa log h_U^inf(i kappa).
inline cplx log_deriv_h_infinity(const BoundaryCondition& bc, double kappa) {
    const detail::ImagAxisForm f(bc);
    return f.dh_inf(kappa) / f.h_inf(kappa);
}

struct PlateBracket {
    double value;         ///< real part of the bracket
    double imag_residual; ///< |Im| / max(|Re|, tiny)
};

/// L - d/dkappa log h_U(i kappa, L) + d/dkappa log h_U^inf(i kappa).
///
/// For kappa L > 1 the difference between h and its asymptote is formed
/// explicitly, so the exponentially small bracket is computed without
/// cancellation.
inline PlateBracket bracket_plates(const BoundaryCondition& bc, double kappa, double L) {
    const detail::ImagAxisForm f(bc);
    const double x = kappa * L;
    const cplx h_inf = f.h_inf(kappa);
    const cplx dh_inf = f.dh_inf(kappa);
    const double scale = f.scale(kappa);
    if (std::abs(h_inf) <= 1e-14 * scale)
        throw SingularPointError("h_U^inf(i kappa) vanishes at kappa = " + std::to_string(kappa));

    cplx value;
    if (x <= detail::kSmallArgument) {
        const auto v = detail::imag_axis_value(f, kappa, L);
        if (std::abs(v.scaled) <= 1e-14 * scale * x)
            throw SingularPointError("h_U(i kappa, L) vanishes at kappa = " + std::to_string(kappa));
        value = -v.log_deriv + dh_inf / h_inf;
    } else {
        const double e1 = std::exp(-x);
        const double e2 = e1 * e1;
        const cplx c = f.c(kappa);
        const cplx dc = f.dc(kappa);
        const cplx delta = 0.5 * e2 * (f.a * kappa - c) + f.b * kappa * e1;
        const cplx ddelta = 0.5 * (-2.0 * L * e2 * (f.a * kappa - c) + e2 * (f.a - dc)) + f.b * e1 * (1.0 - x);
        const cplx g = h_inf + delta;
        if (std::abs(g) <= 1e-14 * scale)
            throw SingularPointError("h_U(i kappa, L) vanishes at kappa = " + std::to_string(kappa));
        value = -(ddelta * h_inf - delta * dh_inf) / (g * h_inf);
    }
    const double re = value.real();
    return {re, std::abs(value.imag()) / std::max(std::abs(re), 1e-300)};
}

namespace detail {

// h_U / (2i sqrt(det U)) is real on the real axis.
struct RealAxisForm {
    const BoundaryCondition& bc;
    double L;
    cplx norm;

    RealAxisForm(const BoundaryCondition& b, double length) : bc(b), L(length), norm(1.0 / (2.0 * I * b.phase())) {}

    double f(double k) const { return (h_u(bc, k, L) * norm).real(); }
    double df(double k) const { return (h_u_derivative(bc, k, L) * norm).real(); }
};

}  // namespace detail

/// Zeros of h_U(k, L) on (0, k_max], ascending. Double roots appear twice.
///
/// The axis is scanned in cells of pi/(4L); each cell is split at critical
/// points of the real-normalized h so close pairs and tangential zeros are
/// not lost. Roots are bisected to 1e-12.
inline std::vector<double> real_spectrum(const BoundaryCondition& bc, double L, double k_max) {
    if (!(L > 0.0)) throw ValidationError("real_spectrum: L must be positive");
    if (!(k_max > 0.0)) throw ValidationError("real_spectrum: k_max must be positive");

    const detail::RealAxisForm form(bc, L);
    auto F = [&](double k) { return form.f(k); };
    auto dF = [&](double k) { return form.df(k); };
    auto tol_at = [](double k) { return 1e-10 * (1.0 + k * k); };

    constexpr int kSub = 4;
    const double step = std::numbers::pi / (4.0 * L) / kSub;
    const double k0 = 1e-9 / L;

    std::vector<double> roots;
    auto bracketed = [&](double a, double b) {
        const double r = detail::bisect_root(F, a, b, 1e-12);
        if (std::abs(F(r)) > tol_at(r) * 1e2)
            throw NumericalError("real_spectrum: bisection on [" + std::to_string(a) + ", " + std::to_string(b) +
                                 "] did not converge to a root");
        roots.push_back(r);
    };

    double a = k0;
    double fa = F(a);
    double dfa = dF(a);
    while (a < k_max) {
        const double b = std::min(a + step, k_max);
        const double fb = F(b);
        const double dfb = dF(b);
        if (std::signbit(dfa) != std::signbit(dfb) && dfa != 0.0 && dfb != 0.0) {
            const double c = detail::bisect_root(dF, a, b, 1e-13);
            const double fc = F(c);
            const bool left = std::signbit(fa) != std::signbit(fc);
            const bool right = std::signbit(fc) != std::signbit(fb);
            if (left) bracketed(a, c);
            if (right) bracketed(c, b);
            if (!left && !right && std::abs(fc) <= tol_at(c)) {
                roots.push_back(c);
                roots.push_back(c);
            }
        } else if (std::signbit(fa) != std::signbit(fb)) {
            bracketed(a, b);
        }
        a = b;
        fa = fb;
        dfa = dfb;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace casimir
