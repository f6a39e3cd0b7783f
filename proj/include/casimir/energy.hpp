#pragma once

// Vacuum energies.
//
//   plates:  E/S = -w(D) int_0^inf dk k^D [L - d/dk log h_U(ik, L) + d/dk log h_U^inf(ik)]
//   cell:    E0(theta) = -(1/2pi) int_0^inf dk k [-L + d/dk log f_theta(ik) + d/dk log t(ik)]
//   comb:    E_comb = int_{-pi}^{pi} dtheta/(2pi) E0(theta)
//
// w(D) = -sqrt(pi) / ((4pi)^{(D+1)/2} Gamma(D/2 + 1)) reproduces the
// zeta-regularized Dirichlet mode sum in every dimension; w(1) = -1/(2pi).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "casimir/admissibility.hpp"
#include "casimir/boundary.hpp"
#include "casimir/errors.hpp"
#include "casimir/potential.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/scattering.hpp"
#include "casimir/spectral.hpp"

namespace casimir {

struct EnergyResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    double k_truncation = 0.0;
    std::size_t n_evaluations = 0;
    /// Largest |Im| / |Re| of the integrand seen along the path.
    double max_imag_residual = 0.0;
    /// (kappa, integrand) pairs on a uniform grid up to k_truncation.
    std::vector<std::pair<double, double>> samples;
};

/// How d/dkappa log f_theta(i kappa) is obtained in the cell integrand.
enum class DerivativeMode { Analytic, FiniteDifference };

struct EnergyOptions {
    QuadratureOptions quadrature{};
    DerivativeMode derivative = DerivativeMode::Analytic;
    /// Gauss-Legendre order per theta panel on [0, pi].
    int theta_order = 64;
    double theta_gap_tol = 1e-8;
    int max_theta_panels = 16;
    int n_samples = 16;
};

inline double w_factor(double d) {
    if (!(d >= 1.0)) throw ValidationError("dimension D must be >= 1");
    constexpr double pi = std::numbers::pi;
    return -std::sqrt(pi) / (std::pow(4.0 * pi, 0.5 * (d + 1.0)) * std::tgamma(0.5 * d + 1.0));
}

namespace detail {

template <class F>
std::vector<std::pair<double, double>> sample_integrand(F&& f, double k_max, int n) {
    std::vector<std::pair<double, double>> out;
    if (n <= 0 || !std::isfinite(k_max)) return out;
    for (int i = 1; i <= n; ++i) {
        const double k = k_max * i / n;
        out.emplace_back(k, f(k));
    }
    return out;
}

inline EnergyResult finish(const QuadratureResult& q, double prefactor) {
    EnergyResult r;
    r.value = prefactor * q.value;
    r.abs_error_estimate = std::abs(prefactor) * q.abs_error;
    r.k_truncation = q.k_truncation;
    r.n_evaluations = q.n_evaluations;
    return r;
}

inline void require_plate_inputs(const BoundaryCondition& bc, double L, double d) {
    if (!(L > 0.0)) throw ValidationError("plate separation L must be positive");
    if (!(d >= 1.0)) throw ValidationError("dimension D must be >= 1");
    const auto report = is_admissible(bc, L, 50.0 / L);
    if (!report.admissible)
        throw BoundStateError("boundary condition admits a negative mode at kappa = " +
                              std::to_string(report.candidate_zeros.front()));
    if (!report.asymptotic_zeros.empty())
        throw BoundStateError("h_U^inf(i kappa) vanishes at kappa = " + std::to_string(report.asymptotic_zeros.front()) +
                              " (half-line bound state)");
}

}  // namespace detail

/// Casimir energy per unit plate area in D spatial dimensions.
inline EnergyResult plate_energy(const BoundaryCondition& bc, double L, double d, const EnergyOptions& opt = {}) {
    detail::require_plate_inputs(bc, L, d);
    double max_imag = 0.0;
    auto integrand = [&](double kappa) {
        const auto b = bracket_plates(bc, kappa, L);
        const double v = std::pow(kappa, d) * b.value;
        if (v != 0.0) max_imag = std::max(max_imag, b.imag_residual);
        return v;
    };
    const auto q = integrate_semi_infinite(integrand, L, d, opt.quadrature);
    EnergyResult r = detail::finish(q, -w_factor(d));
    r.max_imag_residual = max_imag;
    r.samples = detail::sample_integrand(integrand, q.k_truncation, opt.n_samples);
    return r;
}

/// The regulated form with reference separation L0,
///   w(D) L0^D/(L^D - L0^D) int dk k^D [L - L0 - d/dk log(h_U(ik, L)/h_U(ik, L0))],
/// which tends to plate_energy as L0 -> infinity. Used to validate the limit.
inline EnergyResult regulated_plate_energy(const BoundaryCondition& bc, double L, double L0, double d,
                                           const EnergyOptions& opt = {}) {
    detail::require_plate_inputs(bc, L, d);
    detail::require_plate_inputs(bc, L0, d);
    if (L0 == L) throw ValidationError("regulated_plate_energy: L0 must differ from L");
    const detail::ImagAxisForm form(bc);
    auto integrand = [&](double kappa) {
        // L - L0 - (L + g_L'/g_L) + (L0 + g_0'/g_0)
        const cplx x = detail::imag_axis_value(form, kappa, L0).log_deriv -
                       detail::imag_axis_value(form, kappa, L).log_deriv;
        return std::pow(kappa, d) * x.real();
    };
    const auto q = integrate_semi_infinite(integrand, std::min(L, L0), d, opt.quadrature);
    const double ratio = std::pow(L0, d) / (std::pow(L, d) - std::pow(L0, d));
    return detail::finish(q, w_factor(d) * ratio);
}

namespace detail {

inline double bound_state_scan_limit(const PotentialModel& v, double L) {
    double strength = 0.0;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, potential::Delta>) {
                strength = std::abs(p.w0);
            } else if constexpr (std::is_same_v<P, potential::DeltaPrime>) {
                strength = std::abs(p.w0) / std::abs(1.0 - p.w1 * p.w1);
            } else if constexpr (std::is_same_v<P, potential::SquareBarrier>) {
                strength = std::sqrt(std::abs(p.height));
            } else if constexpr (std::is_same_v<P, potential::PiecewiseConstant>) {
                for (const auto& l : p.layers) strength = std::max(strength, std::sqrt(std::abs(l.value)));
            }
        },
        v.variant());
    return 50.0 / L + 2.0 * strength;
}

inline void require_bound_state_free(const PotentialModel& v, double L) {
    const auto report = assert_no_bound_states(v, bound_state_scan_limit(v, L));
    if (!report.bound_state_free)
        throw BoundStateError("potential has a bound state at kappa = " + std::to_string(report.candidate_kappas.front()));
}

// Fourth-order central difference with one Richardson step.
template <class F>
double richardson_derivative(F&& f, double x, double h) {
    auto d4 = [&](double s) { return (-f(x + 2 * s) + 8 * f(x + s) - 8 * f(x - s) + f(x - 2 * s)) / (12 * s); };
    const double coarse = d4(h);
    const double fine = d4(0.5 * h);
    return (16.0 * fine - coarse) / 15.0;
}

inline double cell_bracket(const PotentialModel& v, double kappa, double theta, double L, DerivativeMode mode,
                           double& max_imag) {
    const auto ci = cell_integrand(v, kappa, theta, L);
    if (mode == DerivativeMode::Analytic) {
        max_imag = std::max(max_imag, ci.imag_residual);
        return ci.bracket;
    }
    const double h = std::min(std::max(1e-3, 1e-3 * kappa), 0.25 * kappa);
    const double dlog_f = richardson_derivative([&](double k) { return log_abs_scaled_f(v, k, theta, L); }, kappa, h);
    return dlog_f + ci.log_deriv_t;
}

}  // namespace detail

/// Vacuum energy of the cell problem at Bloch angle theta.
inline EnergyResult cell_energy_theta(const PotentialModel& v, double L, double theta, const EnergyOptions& opt = {}) {
    require_fits_in_cell(v, L);
    detail::require_bound_state_free(v, L);
    const double rate = L - v.support_width();
    QuadratureOptions quad = opt.quadrature;
    if (opt.derivative == DerivativeMode::FiniteDifference) {
        // Difference quotients carry ~1e-12 noise; finer Kronrod bisection only chases it.
        quad.panel_rel_tol = std::max(quad.panel_rel_tol, 1e-10);
        quad.panel_max_depth = std::min(quad.panel_max_depth, 6u);
    }
    double max_imag = 0.0;
    auto integrand = [&](double kappa) {
        return kappa * detail::cell_bracket(v, kappa, theta, L, opt.derivative, max_imag);
    };
    const auto q = integrate_semi_infinite(integrand, rate, 1.0, quad);
    EnergyResult r = detail::finish(q, -1.0 / (2.0 * std::numbers::pi));
    r.max_imag_residual = max_imag;
    r.samples = detail::sample_integrand(integrand, q.k_truncation, opt.n_samples);
    return r;
}

/// Vacuum energy per unit cell of the comb: the Bloch-angle average of
/// cell_energy_theta, folded onto [0, pi] by the theta -> -theta symmetry.
/// Gauss-Legendre panels are doubled until successive estimates agree.
inline EnergyResult comb_energy(const PotentialModel& v, double L, const EnergyOptions& opt = {}) {
    require_fits_in_cell(v, L);
    detail::require_bound_state_free(v, L);
    EnergyOptions inner = opt;
    inner.n_samples = 0;

    EnergyResult total;
    auto average = [&](int panels) {
        double sum = 0.0;
        double err = 0.0;
        const double width = std::numbers::pi / panels;
        for (int p = 0; p < panels; ++p) {
            const auto rule = gauss_legendre(opt.theta_order, p * width, (p + 1) * width);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const auto e = cell_energy_theta(v, L, rule.nodes[i], inner);
                sum += rule.weights[i] * e.value;
                err += rule.weights[i] * e.abs_error_estimate;
                total.n_evaluations += e.n_evaluations;
                total.k_truncation = std::max(total.k_truncation, e.k_truncation);
                total.max_imag_residual = std::max(total.max_imag_residual, e.max_imag_residual);
            }
        }
        return std::pair{sum / std::numbers::pi, err / std::numbers::pi};
    };

    int panels = 1;
    auto [prev, prev_err] = average(panels);
    while (true) {
        panels *= 2;
        auto [next, next_err] = average(panels);
        const double gap = std::abs(next - prev);
        if (gap <= opt.theta_gap_tol || panels >= opt.max_theta_panels) {
            if (gap > opt.theta_gap_tol)
                throw NumericalError("comb_energy: theta quadrature gap " + std::to_string(gap) + " above tolerance");
            total.value = next;
            total.abs_error_estimate = next_err + gap;
            break;
        }
        prev = next;
        prev_err = next_err;
    }
    return total;
}

}  // namespace casimir
