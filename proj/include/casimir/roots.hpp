#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "casimir/errors.hpp"

namespace casimir::detail {

/// Bisection on a bracketing interval [lo, hi] down to an absolute width.
/// Returns the midpoint of the final bracket.
template <class F>
double bisect_root(F&& f, double lo, double hi, double abs_tol = 1e-12) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (std::signbit(f_lo) == std::signbit(f_hi))
        throw NumericalError("bisect_root: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    std::uintmax_t max_iter = 200;
    auto done = [abs_tol](double a, double b) { return std::abs(b - a) <= abs_tol; };
    auto [a, b] = boost::math::tools::bisect(f, lo, hi, done, max_iter);
    return 0.5 * (a + b);
}

/// Geometric grid from lo to hi (inclusive), n points.
inline double geometric_point(double lo, double hi, int i, int n) {
    return lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
}

}  // namespace casimir::detail
