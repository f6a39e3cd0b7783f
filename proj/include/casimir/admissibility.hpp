#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "casimir/boundary.hpp"
#include "casimir/roots.hpp"
#include "casimir/spectral.hpp"

namespace casimir {

struct AdmissibilityReport {
    bool admissible = true;
    /// kappa > 0 where h_U(i kappa, L) changes sign (negative modes -kappa^2).
    std::vector<double> candidate_zeros;
    /// Set when |h_U(i kappa)| dips within 1e-8 (relative) of zero without crossing.
    bool near_zero_warning = false;
    std::vector<double> near_zero_points;
    /// kappa > 0 where h_U^inf(i kappa) vanishes, i.e. eigenvalues of U in the open lower half plane.
    std::vector<double> asymptotic_zeros;
};

namespace detail {
inline constexpr int kAdmissibilityGrid = 2000;
inline constexpr double kNearZeroTol = 1e-8;
}  // namespace detail

/// Zeros of h_U^inf(i kappa) for kappa > 0: an eigenvalue e^{i phi} of U with
/// phi in (-pi, 0) produces one at kappa = -tan(phi / 2).
inline std::vector<double> asymptotic_zeros(const BoundaryCondition& bc) {
    std::vector<double> out;
    for (const cplx& ev : bc.eigenvalues()) {
        const double phi = std::arg(ev);
        if (phi < -1e-12 && phi > -std::numbers::pi + 1e-12) out.push_back(-std::tan(0.5 * phi));
    }
    return out;
}

/// Numerical stand-in for membership in the non-negative set: scans the
/// real-normalized e^{-kappa L} h_U(i kappa, L) on a geometric grid from
/// 1e-6/L to kappa_max, splits cells at critical points and bisects every
/// sign change.
inline AdmissibilityReport is_admissible(const BoundaryCondition& bc, double L, double kappa_max) {
    if (!(L > 0.0)) throw ValidationError("is_admissible: L must be positive");
    if (!(kappa_max > 0.0)) throw ValidationError("is_admissible: kappa_max must be positive");

    const detail::ImagAxisForm form(bc);
    // e^{-i alpha} h_U(i kappa) is real.
    const cplx unphase = 1.0 / bc.phase();
    auto r = [&](double kappa) { return (detail::imag_axis_value(form, kappa, L).scaled * unphase).real(); };
    auto rel = [&](double kappa, double v) { return std::abs(v) / form.scale(kappa); };

    AdmissibilityReport report;
    const double lo = 1e-6 / L;
    const double hi = std::max(kappa_max, 2.0 * lo);
    const int n = detail::kAdmissibilityGrid;

    std::vector<double> grid(n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = detail::geometric_point(lo, hi, i, n);
        vals[i] = r(grid[i]);
    }
    auto dr = [&](double kappa) {
        const auto v = detail::imag_axis_value(form, kappa, L);
        return (v.scaled * v.log_deriv * unphase).real();
    };
    auto add_root = [&](double a, double b) {
        report.candidate_zeros.push_back(detail::bisect_root(r, a, b, 1e-12 * std::max(1.0, a)));
    };
    // Cells are split at critical points so a close pair of zeros inside one
    // cell is still bracketed.
    double d_prev = dr(grid[0]);
    for (int i = 0; i + 1 < n; ++i) {
        const double d_next = dr(grid[i + 1]);
        if (d_prev != 0.0 && d_next != 0.0 && std::signbit(d_prev) != std::signbit(d_next)) {
            const double c = detail::bisect_root(dr, grid[i], grid[i + 1], 1e-14 * std::max(1.0, grid[i]));
            const double rc = r(c);
            if (std::signbit(vals[i]) != std::signbit(rc)) add_root(grid[i], c);
            if (std::signbit(rc) != std::signbit(vals[i + 1])) add_root(c, grid[i + 1]);
        } else if (std::signbit(vals[i]) != std::signbit(vals[i + 1])) {
            add_root(grid[i], grid[i + 1]);
        }
        d_prev = d_next;
    }
    for (int i = 1; i + 1 < n; ++i) {
        const double v = std::abs(vals[i]);
        if (v <= std::abs(vals[i - 1]) && v <= std::abs(vals[i + 1]) && rel(grid[i], vals[i]) < detail::kNearZeroTol &&
            std::signbit(vals[i - 1]) == std::signbit(vals[i + 1])) {
            report.near_zero_warning = true;
            report.near_zero_points.push_back(grid[i]);
        }
    }
    report.asymptotic_zeros = asymptotic_zeros(bc);
    report.admissible = report.candidate_zeros.empty();
    return report;
}

}  // namespace casimir
