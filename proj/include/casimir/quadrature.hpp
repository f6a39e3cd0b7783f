#pragma once

// Integration over [0, inf) of integrands that decay like exp(-rate * kappa)
// times a polynomial. Two independent schemes are provided so results can be
// cross-checked:
//
//   AdaptivePanels  Gauss-Kronrod (7,15) adaptive bisection on panels of width
//                   1/rate, truncated once a tail bound drops below tolerance.
//   ExpSinh         double-exponential exp-sinh rule on [kappa_0, inf).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "casimir/errors.hpp"

namespace casimir {

enum class QuadratureScheme { AdaptivePanels, ExpSinh };

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    QuadratureScheme scheme = QuadratureScheme::AdaptivePanels;
    /// Relative tolerance and bisection depth of Gauss-Kronrod inside each panel.
    double panel_rel_tol = 1e-13;
    unsigned panel_max_depth = 12;
    /// Largest kappa * rate examined before giving up on the tail.
    double max_decay_lengths = 740.0;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    double k_truncation = std::numeric_limits<double>::infinity();
    double tail_estimate = 0.0;
    std::size_t n_evaluations = 0;
};

namespace detail {

// Past this many e-foldings the integrand is below the smallest normal double.
inline constexpr double kUnderflowDecay = 745.0;
inline constexpr int kFirstPanelLevels = 30;
inline constexpr unsigned kGradedPanelDepth = 6;

template <class F>
QuadratureResult integrate_panels(F&& f, double rate, double power, const QuadratureOptions& opt) {
    using boost::math::quadrature::gauss_kronrod;
    QuadratureResult out;
    auto counted = [&](double x) {
        ++out.n_evaluations;
        return f(x);
    };
    const double width = 1.0 / rate;
    const double tail_target = 1e-3 * opt.abs_tol;
    const double min_stop = 2.0 * (power + 1.0) / rate;

    auto integrate = [&](double a, double b, unsigned depth) {
        double err = 0.0;
        double l1 = 0.0;
        const double piece = gauss_kronrod<double, 15>::integrate(counted, a, b, depth, opt.panel_rel_tol, &err, &l1);
        if (!std::isfinite(piece))
            throw NumericalError("quadrature: non-finite integrand on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
        out.value += piece;
        out.abs_error += err;
        return piece;
    };

    // The first panel is graded geometrically toward 0, where the integrand
    // can vary on scales much shorter than 1/rate (near-zero modes). Below
    // kappa0 the integrand behaves as kappa^(power - 1), so the sliver is
    // kappa0 f(kappa0) / power; evaluating closer to 0 only samples rounding.
    const double kappa0 = std::ldexp(width, -kFirstPanelLevels);
    const double sliver = kappa0 * counted(kappa0) / std::max(power, 1.0);
    if (!std::isfinite(sliver)) throw NumericalError("quadrature: non-finite integrand near 0");
    out.value += sliver;
    out.abs_error += std::abs(sliver) * 1e-6;
    const unsigned graded_depth = std::min(opt.panel_max_depth, kGradedPanelDepth);
    for (int j = kFirstPanelLevels; j > 0; --j)
        integrate(std::ldexp(width, -j), std::ldexp(width, -j + 1), graded_depth);

    double a = width;
    for (int panel = 0;; ++panel) {
        const double b = a + width;
        const double piece = integrate(a, b, opt.panel_max_depth);
        a = b;

        if (a * rate >= kUnderflowDecay) {
            out.k_truncation = a;
            out.tail_estimate = 0.0;
            break;
        }
        if (a >= min_stop) {
            // |f| ~ kappa^p e^{-rate kappa}: the tail integral is at most |f(a)| / (rate - p/a).
            const double fa = std::abs(counted(a));
            const double tail = fa / (rate - power / a);
            if (tail < tail_target && std::abs(piece) < tail_target * 1e3) {
                out.k_truncation = a;
                out.tail_estimate = tail;
                break;
            }
        }
        if (a * rate > opt.max_decay_lengths)
            throw NumericalError("quadrature: tail did not decay by kappa = " + std::to_string(a));
    }
    out.abs_error += out.tail_estimate;
    return out;
}

template <class F>
QuadratureResult integrate_exp_sinh(F&& f, double rate, const QuadratureOptions& opt) {
    QuadratureResult out;
    auto guarded = [&](double x) -> double {
        if (x * rate >= kUnderflowDecay) return 0.0;
        ++out.n_evaluations;
        return f(x);
    };
    // The sliver [0, x0] is taken by the midpoint rule; its error is O(x0^2).
    const double x0 = 1e-9 / rate;
    boost::math::quadrature::exp_sinh<double> rule;
    double err = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    const double body = rule.integrate(guarded, x0, std::numeric_limits<double>::infinity(), 1e-12, &err, &l1, &levels);
    const double sliver = guarded(0.5 * x0) * x0;
    out.value = body + sliver;
    out.abs_error = err + std::abs(sliver) * 1e-3;
    out.k_truncation = kUnderflowDecay / rate;
    if (!std::isfinite(out.value)) throw NumericalError("quadrature: exp-sinh produced a non-finite value");
    return out;
}

}  // namespace detail

/// Integral of f over [0, inf). `rate` is the slowest exponential decay of f
/// and `power` the polynomial growth of its prefactor.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double rate, double power, const QuadratureOptions& opt = {}) {
    if (!(rate > 0.0)) throw ValidationError("quadrature: decay rate must be positive");
    QuadratureResult r = opt.scheme == QuadratureScheme::AdaptivePanels ? detail::integrate_panels(f, rate, power, opt)
                                                                        : detail::integrate_exp_sinh(f, rate, opt);
    if (r.abs_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value))) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "quadrature: error estimate %.3e exceeds tolerance (value %.12g)", r.abs_error, r.value);
        throw NumericalError(msg);
    }
    return r;
}

/// n-point Gauss-Legendre nodes and weights on [a, b].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendreRule gauss_legendre(int n, double a, double b) {
    // legendre_p_zeros returns the non-negative zeros in ascending order.
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x;
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it)
        if (*it != 0.0) x.push_back(-*it);
    for (double z : zeros) x.push_back(z);
    GaussLegendreRule rule;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (double xi : x) {
        const double dp = boost::math::legendre_p_prime(n, xi);
        rule.nodes.push_back(mid + half * xi);
        rule.weights.push_back(half * 2.0 / ((1.0 - xi * xi) * dp * dp));
    }
    return rule;
}

}  // namespace casimir
