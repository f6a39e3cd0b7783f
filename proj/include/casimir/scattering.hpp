#pragma once

// One-dimensional scattering off a compact-support potential.
//
// Transfer matrices act on (psi, psi') and are accumulated with a running
// logarithmic scale, so evanescent layers at large imaginary momentum do not
// overflow. Scattering amplitudes follow from the plane-wave form
//   T = W(x1)^{-1} M W(x0),  W(x) = [[e^{ikx}, e^{-ikx}], [ik e^{ikx}, -ik e^{-ikx}]]
// with t = 1/T22, r_L = -T21/T22, r_R = T12/T22. The support is centred at
// the origin when reporting reflection phases.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/mat2.hpp"
#include "casimir/potential.hpp"
#include "casimir/roots.hpp"

namespace casimir {

struct ScatteringData {
    cplx k;
    cplx t;
    cplx r_l;
    cplx r_r;
};

struct BandStructure {
    struct Band {
        double k_lo;
        double k_hi;
        std::vector<double> k;      ///< sample momenta across the band
        std::vector<double> theta;  ///< Bloch angle in [0, pi] at each sample
    };
    std::vector<Band> bands;
};

struct BoundStateReport {
    bool bound_state_free = true;
    std::vector<double> candidate_kappas;
};

namespace detail {

/// M = e^{log_scale} m and dM/dk = e^{log_scale} dm.
struct ScaledTransfer {
    Mat2 m = Mat2::identity();
    Mat2 dm{};
    double log_scale = 0.0;

    void renormalize() {
        const double s = std::max(m.max_abs(), dm.max_abs());
        if (s > 0.0 && std::isfinite(s)) {
            m = (1.0 / s) * m;
            dm = (1.0 / s) * dm;
            log_scale += std::log(s);
        }
    }

    /// Applies `next` after this one: (next . this).
    ScaledTransfer then(const ScaledTransfer& next) const {
        ScaledTransfer out;
        out.m = next.m * m;
        out.dm = next.dm * m + next.m * dm;
        out.log_scale = log_scale + next.log_scale;
        out.renormalize();
        return out;
    }
};

inline void require_nonzero_k(cplx k) {
    if (k == cplx(0.0)) throw ValidationError("transfer matrix: k = 0 is not allowed");
}

// Constant layer V of width a: [[cos qa, sin(qa)/q], [-q sin qa, cos qa]], q^2 = k^2 - V.
inline ScaledTransfer layer_transfer(double value, double a, cplx k) {
    const cplx q2 = k * k - value;
    const cplx q = std::sqrt(q2);
    const cplx qa = q * a;
    ScaledTransfer out;
    cplx cos_qa;
    cplx sinc;       // sin(qa)/q
    cplx dsinc_dq2;  // d(sin(qa)/q)/d(q^2)
    double y = 0.0;
    if (std::abs(qa) < 0.1) {
        const cplx z = q2 * a * a;
        cos_qa = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0 + z * z * z * z / 40320.0;
        sinc = a * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0 + z * z * z * z / 362880.0);
        dsinc_dq2 = a * a * a * (-1.0 / 6.0 + z / 60.0 - z * z / 1680.0 + z * z * z / 90720.0);
    } else {
        y = std::abs(qa.imag());
        const cplx ep = std::exp(I * qa - y);
        const cplx em = std::exp(-I * qa - y);
        cos_qa = 0.5 * (ep + em);
        const cplx sin_qa = (ep - em) / (2.0 * I);
        sinc = sin_qa / q;
        dsinc_dq2 = (a * cos_qa - sinc) / (2.0 * q2);
    }
    // d/dk = 2k d/d(q^2)
    const cplx dcos = -a * k * sinc;
    const cplx dsinc = 2.0 * k * dsinc_dq2;
    out.m = {cos_qa, sinc, -q2 * sinc, cos_qa};
    out.dm = {dcos, dsinc, -2.0 * k * sinc - q2 * dsinc, dcos};
    out.log_scale = y;
    return out;
}

inline ScaledTransfer point_transfer(const Mat2& m) {
    ScaledTransfer out;
    out.m = m;
    out.dm = Mat2{};
    return out;
}

inline Mat2 delta_prime_matrix(const potential::DeltaPrime& p) {
    const double w1 = p.convention == DeltaPrimeConvention::Standard ? p.w1 : -p.w1;
    return {(1.0 + w1) / (1.0 - w1), 0.0, p.w0 / (1.0 - w1 * w1), (1.0 - w1) / (1.0 + w1)};
}

inline ScaledTransfer scaled_transfer(const PotentialModel& v, cplx k) {
    require_nonzero_k(k);
    return std::visit(
        [&](const auto& p) -> ScaledTransfer {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, potential::Free>) {
                return ScaledTransfer{};
            } else if constexpr (std::is_same_v<P, potential::Delta>) {
                return point_transfer({1.0, 0.0, p.w0, 1.0});
            } else if constexpr (std::is_same_v<P, potential::DeltaPrime>) {
                return point_transfer(delta_prime_matrix(p));
            } else if constexpr (std::is_same_v<P, potential::SquareBarrier>) {
                auto t = layer_transfer(p.height, p.width, k);
                t.renormalize();
                return t;
            } else {
                ScaledTransfer acc;
                for (const auto& layer : p.layers) acc = acc.then(layer_transfer(layer.value, layer.width, k));
                return acc;
            }
        },
        v.variant());
}

// P = W(0)^{-1} M W(0) and dP/dk, in the scale of the input.
struct PlaneWaveForm {
    Mat2 p;
    Mat2 dp;
    double log_scale;
    double width;
};

inline PlaneWaveForm plane_wave_form(const PotentialModel& v, cplx k) {
    const ScaledTransfer st = scaled_transfer(v, k);
    const auto& m = st.m;
    const auto& dm = st.dm;
    const cplx sum = 0.5 * (m(0, 0) + m(1, 1));
    const cplx dif = 0.5 * (m(0, 0) - m(1, 1));
    const cplx up = 0.5 * I * k * m(0, 1);      // i k m12 / 2
    const cplx dn = 0.5 * I * m(1, 0) / k;      // i m21 / (2k)
    const cplx dsum = 0.5 * (dm(0, 0) + dm(1, 1));
    const cplx ddif = 0.5 * (dm(0, 0) - dm(1, 1));
    const cplx dup = 0.5 * I * (m(0, 1) + k * dm(0, 1));
    const cplx ddn = 0.5 * I * (dm(1, 0) / k - m(1, 0) / (k * k));
    PlaneWaveForm out;
    out.p = {sum + up - dn, dif - up - dn, dif + up + dn, sum - up + dn};
    out.dp = {dsum + dup - ddn, ddif - dup - ddn, ddif + dup + ddn, dsum - dup + ddn};
    out.log_scale = st.log_scale;
    out.width = v.support_width();
    return out;
}

}  // namespace detail

/// Transfer matrix across the support, acting on (psi, psi').
inline Mat2 transfer_matrix(const PotentialModel& v, cplx k) {
    const auto st = detail::scaled_transfer(v, k);
    return std::exp(st.log_scale) * st.m;
}

/// d/dk of transfer_matrix.
inline Mat2 transfer_matrix_derivative(const PotentialModel& v, cplx k) {
    const auto st = detail::scaled_transfer(v, k);
    return std::exp(st.log_scale) * st.dm;
}

/// {t, r_L, r_R} at complex k. A vanishing 1/t (transmission pole) signals a
/// bound state when k lies on the positive imaginary axis.
inline ScatteringData scattering_data(const PotentialModel& v, cplx k) {
    const auto pw = detail::plane_wave_form(v, k);
    const cplx n22 = pw.p(1, 1);
    if (std::abs(n22) <= 1e-14 * pw.p.max_abs())
        throw BoundStateError("transmission pole at k = (" + std::to_string(k.real()) + ", " + std::to_string(k.imag()) +
                              ")");
    const cplx ikw = I * k * pw.width;
    const cplx t = std::exp(-ikw - pw.log_scale) / n22;
    const cplx shift = std::exp(-ikw);
    return {k, t, -pw.p(1, 0) * shift / n22, pw.p(0, 1) * shift / n22};
}

/// (1/2t)[e^{-ikL} + e^{ikL}(t^2 - r_R r_L)], equal to half the trace of the
/// unit-cell transfer matrix in the plane-wave basis.
inline cplx bloch_half_trace(const PotentialModel& v, cplx k, double L) {
    const auto pw = detail::plane_wave_form(v, k);
    const cplx ph = I * k * (L - pw.width);
    return 0.5 * (std::exp(-ph + pw.log_scale) * pw.p(1, 1) + std::exp(ph + pw.log_scale) * pw.p(0, 0));
}

inline void require_fits_in_cell(const PotentialModel& v, double L) {
    if (!(L > 0.0)) throw ValidationError("cell length L must be positive");
    if (!(v.support_width() < L))
        throw ValidationError("potential support (" + std::to_string(v.support_width()) +
                              ") must be strictly smaller than the cell length (" + std::to_string(L) + ")");
}

/// f_theta(k) = cos(theta) - (1/2t)[e^{-ikL} + e^{ikL}(t^2 - r_R r_L)], evaluated
/// from the scattering data.
inline cplx f_theta(const PotentialModel& v, cplx k, double theta, double L) {
    require_fits_in_cell(v, L);
    ScatteringData sd;
    try {
        sd = scattering_data(v, k);
    } catch (const BoundStateError&) {
        throw SingularPointError("f_theta: 1/t vanishes at the requested momentum");
    }
    if (sd.t == cplx(0.0) || !std::isfinite(std::abs(sd.t)))
        throw SingularPointError("f_theta: transmission amplitude vanishes");
    const cplx e = std::exp(I * k * L);
    return std::cos(theta) - (1.0 / (2.0 * sd.t)) * (1.0 / e + e * (sd.t * sd.t - sd.r_r * sd.r_l));
}

namespace detail {

// Pieces of the comb integrand at k = i kappa, with f_theta(i kappa) written as
//   f = -(1/2) T22 e^{kappa L} (1 + eps),
//   eps = e^{-2 kappa L} T11/T22 - 2 cos(theta) e^{-kappa L}/T22.
struct CellIntegrand {
    double bracket;        ///< -L + d/dkappa log f_theta(i kappa) + d/dkappa log t(i kappa)
    double imag_residual;
    double log_deriv_t;    ///< d/dkappa log t(i kappa)
};

// f_theta(i kappa) and its kappa-derivative from the (psi, psi') cell matrix
// W = F M, with F the free propagator across the gap. Written as
// f = -[(W - 1)/2 traced + 2 sin^2(theta/2)] so that the near-cancellation of
// cos(theta) against tr W / 2 at small kappa is carried exactly.
struct CellFunction {
    cplx f;
    cplx df;
};

inline constexpr double kCellSmallArgument = 1.0;
inline constexpr double kCellMaxLogScale = 30.0;

inline CellFunction small_kappa_cell_function(const ScaledTransfer& st, double kappa, double theta, double gap) {
    const double x = kappa * gap;
    const double sh = std::sinh(x);
    const double ch = std::cosh(x);
    const double cm1 = 2.0 * std::sinh(0.5 * x) * std::sinh(0.5 * x);
    const double sh_over_k = x == 0.0 ? gap : sh / kappa;
    // d/dkappa (sinh(x)/kappa) = gap^2 (x cosh x - sinh x)/x^2
    const double d12 = x < 1e-2 ? gap * gap * x * (1.0 / 3.0 + x * x / 30.0 + x * x * x * x / 840.0)
                                : gap * gap * (x * ch - sh) / (x * x);
    const Mat2 f_minus_1{cm1, sh_over_k, kappa * sh, cm1};
    const Mat2 df{gap * sh, d12, sh + x * ch, gap * sh};
    const Mat2& m = st.m;
    const Mat2 dm = I * st.dm;  // d/dkappa = i d/dk
    const double s = std::exp(st.log_scale);
    const cplx tr_m_minus_2 = st.log_scale == 0.0 ? (m(0, 0) - 1.0) + (m(1, 1) - 1.0) : s * m.trace() - 2.0;
    const cplx g_minus_1 = 0.5 * (s * (f_minus_1 * m).trace() + tr_m_minus_2);
    const cplx dg = 0.5 * s * ((df * m).trace() + dm.trace() + (f_minus_1 * dm).trace());
    const double half = std::sin(0.5 * theta);
    return {-(g_minus_1 + 2.0 * half * half), -dg};
}

inline bool use_small_kappa_form(const ScaledTransfer& st, double kappa, double L) {
    return kappa * L <= kCellSmallArgument && st.log_scale < kCellMaxLogScale;
}

inline CellIntegrand cell_integrand(const PotentialModel& v, double kappa, double theta, double L) {
    const cplx k = I * kappa;
    if (const auto st = scaled_transfer(v, k); use_small_kappa_form(st, kappa, L)) {
        const auto pw = plane_wave_form(v, k);
        const cplx n22 = pw.p(1, 1);
        if (std::abs(n22) <= 1e-14 * pw.p.max_abs())
            throw BoundStateError("bound state at kappa = " + std::to_string(kappa));
        const auto cf = small_kappa_cell_function(st, kappa, theta, L - pw.width);
        if (cf.f == cplx(0.0))
            throw SingularPointError("f_theta(i kappa) vanishes at kappa = " + std::to_string(kappa));
        const cplx dlt = pw.width - I * (pw.dp(1, 1) / n22);
        const cplx br = -L + cf.df / cf.f + dlt;
        const double re = br.real();
        return {re, std::abs(br.imag()) / std::max(std::abs(re), 1e-300), dlt.real()};
    }
    const auto pw = plane_wave_form(v, k);
    const double gap = L - pw.width;
    const cplx n11 = pw.p(0, 0), n22 = pw.p(1, 1);
    const cplx d11 = pw.dp(0, 0), d22 = pw.dp(1, 1);
    if (std::abs(n22) <= 1e-14 * pw.p.max_abs())
        throw BoundStateError("bound state at kappa = " + std::to_string(kappa));
    const double e1 = std::exp(-kappa * gap);
    const double e2 = e1 * e1;
    const double es = std::exp(-kappa * gap - pw.log_scale);
    const cplx c = std::cos(theta);
    // derivatives in k; at k = i kappa, e^{ik gap} = e^{-kappa gap}
    const cplx ell22 = d22 / n22;
    const cplx a = e2 * n11 / n22;
    const cplx da = e2 * (2.0 * I * gap * n11 + d11 - n11 * ell22) / n22;
    const cplx b = -2.0 * c * es / n22;
    const cplx db = b * (I * gap - ell22);
    const cplx eps = a + b;
    const cplx one_plus = 1.0 + eps;
    if (std::abs(one_plus) <= 1e-14)
        throw SingularPointError("f_theta(i kappa) vanishes at kappa = " + std::to_string(kappa));
    const cplx br = I * (da + db) / one_plus;
    // t = e^{-ikw}/P22 -> d/dkappa log t = i(-i w - ell22) = w - i ell22
    const cplx dlt = pw.width - I * ell22;
    const double re = br.real();
    return {re, std::abs(br.imag()) / std::max(std::abs(re), 1e-300), dlt.real()};
}

// log|e^{-kappa L} f_theta(i kappa)| = log(1/2) + log|T22| + log|1 + eps|.
inline double log_abs_scaled_f(const PotentialModel& v, double kappa, double theta, double L) {
    const cplx k = I * kappa;
    if (const auto st = scaled_transfer(v, k); use_small_kappa_form(st, kappa, L))
        return -kappa * L + std::log(std::abs(small_kappa_cell_function(st, kappa, theta, L - v.support_width()).f));
    const auto pw = plane_wave_form(v, k);
    const double gap = L - pw.width;
    const cplx n11 = pw.p(0, 0), n22 = pw.p(1, 1);
    const double e1 = std::exp(-kappa * gap);
    const cplx eps = e1 * e1 * n11 / n22 - 2.0 * std::cos(theta) * std::exp(-kappa * gap - pw.log_scale) / n22;
    // |T22| = e^{-kappa w + log_scale}|N22|
    return std::log(0.5) - kappa * pw.width + pw.log_scale + std::log(std::abs(n22)) + std::log(std::abs(1.0 + eps));
}

}  // namespace detail

/// Scans 1/t(i kappa) on a geometric grid from 1e-6 to kappa_max and bisects
/// sign changes; any zero is a bound state at energy -kappa^2.
inline BoundStateReport assert_no_bound_states(const PotentialModel& v, double kappa_max) {
    if (!(kappa_max > 0.0)) throw ValidationError("assert_no_bound_states: kappa_max must be positive");
    auto inv_t = [&](double kappa) {
        // 1/t(i kappa) = e^{-kappa w + log_scale} N22; the positive prefactor does not affect the sign.
        return detail::plane_wave_form(v, I * kappa).p(1, 1).real();
    };
    constexpr int n = 2000;
    const double lo = 1e-6;
    const double hi = std::max(kappa_max, 2.0 * lo);
    BoundStateReport report;
    double prev_k = lo;
    double prev_v = inv_t(lo);
    for (int i = 1; i < n; ++i) {
        const double kk = detail::geometric_point(lo, hi, i, n);
        const double vv = inv_t(kk);
        if (std::signbit(prev_v) != std::signbit(vv))
            report.candidate_kappas.push_back(detail::bisect_root(inv_t, prev_k, kk, 1e-13 * std::max(1.0, kk)));
        prev_k = kk;
        prev_v = vv;
    }
    report.bound_state_free = report.candidate_kappas.empty();
    return report;
}

/// Allowed bands on (0, k_max]: maximal intervals where |g(k)| <= 1 with
/// g = Re (1/2t)[e^{-ikL} + e^{ikL}(t^2 - r_R r_L)]. Edges are bisected to
/// 1e-13; tangential contacts with |g| = 1 do not split a band.
inline BandStructure band_structure(const PotentialModel& v, double L, double k_max, int samples_per_band = 33) {
    require_fits_in_cell(v, L);
    if (!(k_max > 0.0)) throw ValidationError("band_structure: k_max must be positive");

    auto g = [&](double k) { return bloch_half_trace(v, k, L).real(); };
    auto dg = [&](double k) {
        const auto pw = detail::plane_wave_form(v, k);
        const double gap = L - pw.width;
        const cplx ph = I * k * gap;
        const cplx em = std::exp(-ph + pw.log_scale);
        const cplx ep = std::exp(ph + pw.log_scale);
        return (0.5 * (em * (-I * gap * pw.p(1, 1) + pw.dp(1, 1)) + ep * (I * gap * pw.p(0, 0) + pw.dp(0, 0)))).real();
    };

    const double k0 = 1e-9 / L;
    const double step = std::numbers::pi / (32.0 * L);
    std::vector<double> edges;
    auto add_crossings = [&](double a, double b, double ga, double gb) {
        for (double level : {-1.0, 1.0}) {
            const double fa = ga - level;
            const double fb = gb - level;
            if (fa != 0.0 && fb != 0.0 && std::signbit(fa) != std::signbit(fb))
                edges.push_back(detail::bisect_root([&](double k) { return g(k) - level; }, a, b, 1e-13));
        }
    };

    double a = k0;
    double ga = g(a);
    double dga = dg(a);
    while (a < k_max) {
        const double b = std::min(a + step, k_max);
        const double gb = g(b);
        const double dgb = dg(b);
        if (dga != 0.0 && dgb != 0.0 && std::signbit(dga) != std::signbit(dgb)) {
            const double c = detail::bisect_root(dg, a, b, 1e-14);
            const double gc = g(c);
            add_crossings(a, c, ga, gc);
            add_crossings(c, b, gc, gb);
        } else {
            add_crossings(a, b, ga, gb);
        }
        a = b;
        ga = gb;
        dga = dgb;
    }
    std::sort(edges.begin(), edges.end());

    std::vector<double> cuts{k0};
    cuts.insert(cuts.end(), edges.begin(), edges.end());
    cuts.push_back(k_max);

    BandStructure out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        if (std::abs(g(0.5 * (lo + hi))) > 1.0) continue;
        const double band_lo = (i == 0) ? 0.0 : lo;
        if (!out.bands.empty() && out.bands.back().k_hi == lo)
            out.bands.back().k_hi = hi;
        else
            out.bands.push_back({band_lo, hi, {}, {}});
    }
    for (auto& band : out.bands) {
        const double lo = std::max(band.k_lo, k0);
        for (int j = 0; j < samples_per_band; ++j) {
            const double k = lo + (band.k_hi - lo) * j / std::max(1, samples_per_band - 1);
            band.k.push_back(k);
            band.theta.push_back(std::acos(std::clamp(g(k), -1.0, 1.0)));
        }
    }
    return out;
}

}  // namespace casimir
