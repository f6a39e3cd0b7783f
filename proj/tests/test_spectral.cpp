#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "casimir/admissibility.hpp"
#include "casimir/boundary.hpp"
#include "casimir/spectral.hpp"
#include "oracles.hpp"

using namespace casimir;

namespace {

constexpr double pi = std::numbers::pi;

BoundaryParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    std::uniform_real_distribution<double> half(-pi / 2, pi / 2);
    std::normal_distribution<double> gauss;
    BoundaryParams p{angle(rng), half(rng), {gauss(rng), gauss(rng), gauss(rng)}};
    const double norm = p.n_norm();
    for (auto& c : p.n) c /= norm;
    return p;
}

// Random U whose plate problem has no negative modes and a zero-free asymptote.
BoundaryCondition random_admissible(std::mt19937_64& rng, double L) {
    while (true) {
        const auto bc = build_unitary(random_params(rng));
        const auto r = is_admissible(bc, L, 50.0 / L);
        if (r.admissible && r.asymptotic_zeros.empty() && !r.near_zero_warning) return bc;
    }
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(SpectralFunction, ClosedFormsOnRealAxis) {
    const double L = 1.3;
    for (double k : {0.2, 1.0, 2.7, 9.5}) {
        EXPECT_LT(std::abs(h_u(boundary::dirichlet(), k, L) - 4.0 * I * std::sin(k * L)), 1e-13);
        EXPECT_LT(std::abs(h_u(boundary::neumann(), k, L) - 4.0 * I * k * k * std::sin(k * L)), 1e-12);
        for (double theta : {0.0, 0.9, pi}) {
            const cplx expected = 4.0 * k * (std::cos(k * L) - std::cos(theta));
            EXPECT_LT(std::abs(h_u(boundary::quasi_periodic(theta), k, L) - expected), 1e-12);
        }
    }
}

TEST(SpectralFunction, ParametricFormAgrees) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> kd(-5.0, 5.0);
    for (int i = 0; i < 300; ++i) {
        const auto p = random_params(rng);
        const auto bc = build_unitary(p);
        const cplx k(kd(rng), kd(rng) * 0.3);
        const double L = 0.5 + std::abs(kd(rng));
        const cplx a = h_u(bc, k, L);
        EXPECT_LT(std::abs(a - h_u_parametric(p, k, L)), 1e-11 * std::max(1.0, std::abs(a)));
    }
}

TEST(SpectralFunction, LogDerivativeMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto bc = build_unitary(random_params(rng));
        const double L = 0.3 + 3.0 * u(rng);
        const double kappa = 0.05 + 8.0 * u(rng);
        // Real and imaginary parts of log h(i kappa) differentiated separately.
        const auto re = [&](double x) { return std::log(std::abs(h_u(bc, I * x, L))); };
        const auto im = [&](double x) { return std::arg(h_u(bc, I * x, L) * std::conj(h_u(bc, I * kappa, L))); };
        const double h = 1e-4 * std::max(1.0, kappa);
        const cplx fd(oracle::derivative(re, kappa, h), oracle::derivative(im, kappa, h));
        const cplx analytic = log_deriv_h_imag(bc, kappa, L);
        const cplx via_k = I * evaluate_h_u(bc, I * kappa, L).log_deriv;
        EXPECT_LT(rel(analytic, fd), 1e-7) << "kappa=" << kappa << " L=" << L;
        EXPECT_LT(rel(analytic, via_k), 1e-10);
    }
}

TEST(SpectralFunction, ScaledImaginaryAxisValue) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50; ++i) {
        const auto bc = build_unitary(random_params(rng));
        for (double kappa : {1e-4, 0.3, 2.0, 10.0}) {
            const double L = 1.7;
            const cplx direct = h_u(bc, I * kappa, L) * std::exp(-kappa * L);
            EXPECT_LT(std::abs(scaled_h_imag(bc, kappa, L) - direct), 1e-12 * std::max(1.0, std::abs(direct)) * (1 + kappa * kappa));
        }
    }
}

TEST(Asymptote, Examples) {
    for (double kappa : {0.1, 1.0, 5.0}) {
        EXPECT_LT(std::abs(h_u_infinity(boundary::dirichlet(), kappa) + 2.0), 1e-14);
        for (double theta : {0.0, 1.0, pi})
            EXPECT_LT(std::abs(h_u_infinity(boundary::quasi_periodic(theta), kappa) - 2.0 * I * kappa), 1e-14);
    }
}

TEST(Asymptote, FiniteSeparationLimit) {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i) {
        const auto bc = random_admissible(rng, 1.0);
        for (double kappa : {0.5, 1.0, 3.0}) {
            const double L0 = 40.0 / kappa;
            const cplx approach = h_u(bc, I * kappa, L0) * std::exp(-kappa * L0);
            EXPECT_LT(std::abs(approach - h_u_infinity(bc, kappa)), 1e-6 * (1.0 + kappa * kappa));
        }
    }
}

TEST(Asymptote, LogDerivativeLimitIsMonotone) {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 20; ++i) {
        const auto bc = random_admissible(rng, 1.0);
        const double kappa = 1.0;
        const cplx target = log_deriv_h_infinity(bc, kappa);
        double prev = INFINITY;
        for (double L0 : {5.0, 10.0, 20.0, 40.0}) {
            const cplx finite = I * evaluate_h_u(bc, I * kappa, L0).log_deriv - L0;
            const double err = std::abs(finite - target);
            EXPECT_LE(err, prev) << "L0=" << L0;
            prev = err;
        }
        EXPECT_LT(prev, 1e-6);
    }
}

TEST(PlateBracket, ClosedForms) {
    const double L = 1.4;
    for (double kappa : {1e-3, 0.2, 0.7, 1.0, 3.0, 12.0}) {
        const double x = kappa * L;
        EXPECT_NEAR(bracket_plates(boundary::dirichlet(), kappa, L).value, L * (1.0 - 1.0 / std::tanh(x)),
                    1e-12 * (1.0 + 1.0 / x));
        for (double theta : {0.4, pi / 2, pi}) {
            const double expected = L * (1.0 - std::sinh(x) / (std::cosh(x) - std::cos(theta)));
            EXPECT_NEAR(bracket_plates(boundary::quasi_periodic(theta), kappa, L).value, expected, 1e-12);
        }
    }
}

TEST(PlateBracket, DecaysAndIsReal) {
    std::mt19937_64 rng(16);
    for (int i = 0; i < 30; ++i) {
        const double L = 1.0;
        const auto bc = random_admissible(rng, L);
        EXPECT_LT(std::abs(bracket_plates(bc, 10.0 / L, L).value), 1e-3 * std::abs(bracket_plates(bc, 1.0 / L, L).value));
        for (double kappa = 1e-3; kappa <= 50.0; kappa *= 1.7) {
            const auto b = bracket_plates(bc, kappa, L);
            if (b.value != 0.0) EXPECT_LT(b.imag_residual, 1e-9) << "kappa=" << kappa;
        }
    }
}

TEST(PlateBracket, StableFormMatchesDirectDifference) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 30; ++i) {
        const auto bc = random_admissible(rng, 1.0);
        for (double kappa : {0.5, 1.5, 4.0}) {
            const cplx direct = 1.0 - log_deriv_h_imag(bc, kappa, 1.0) + log_deriv_h_infinity(bc, kappa);
            EXPECT_NEAR(bracket_plates(bc, kappa, 1.0).value, direct.real(), 1e-12);
        }
    }
}

TEST(Realness, NormalizedSpectralFunction) {
    std::mt19937_64 rng(18);
    for (int i = 0; i < 50; ++i) {
        const auto bc = build_unitary(random_params(rng));
        const cplx phase = bc.phase();
        for (double k : {0.3, 2.0, 7.0}) {
            const cplx v = h_u(bc, k, 1.1) / (2.0 * I * phase);
            EXPECT_LT(std::abs(v.imag()), 1e-12 * std::max(1.0, std::abs(v)));
            const cplx w = h_u(bc, I * k, 1.1) / phase;
            EXPECT_LT(std::abs(w.imag()), 1e-12 * std::max(1.0, std::abs(w)));
        }
    }
}

TEST(RealSpectrum, DirichletAndNeumannIntegers) {
    for (const auto& bc : {boundary::dirichlet(), boundary::neumann()}) {
        const auto roots = real_spectrum(bc, pi, 10.5);
        ASSERT_EQ(roots.size(), 10u);
        for (int n = 1; n <= 10; ++n) EXPECT_NEAR(roots[n - 1], n, 1e-11);
    }
}

TEST(RealSpectrum, QuasiPeriodicRoots) {
    for (double theta : {0.5, 1.0, 2.9}) {
        std::vector<double> expected;
        for (int n = -5; n <= 5; ++n)
            for (double s : {-1.0, 1.0}) {
                const double k = std::abs(2 * pi * n + s * theta);
                if (k > 0 && k <= 30.0) expected.push_back(k);
            }
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                       expected.end());
        const auto roots = real_spectrum(boundary::quasi_periodic(theta), 1.0, 30.0);
        ASSERT_EQ(roots.size(), expected.size()) << "theta=" << theta;
        for (std::size_t i = 0; i < roots.size(); ++i) EXPECT_NEAR(roots[i], expected[i], 1e-11);
    }
}

TEST(RealSpectrum, RootsAreZerosOfDirectEvaluation) {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 20; ++i) {
        const auto bc = random_admissible(rng, 2.0);
        for (double k : real_spectrum(bc, 2.0, 25.0))
            EXPECT_LT(std::abs(h_u(bc, k, 2.0)), 1e-9 * (1 + k * k)) << "k=" << k;
    }
}

TEST(RealSpectrum, WeylCounting) {
    std::mt19937_64 rng(20);
    for (int i = 0; i < 20; ++i) {
        const double L = 1.5;
        const auto bc = random_admissible(rng, L);
        for (double K : {40.0, 80.0}) {
            const double n = real_spectrum(bc, L, K).size();
            EXPECT_LE(std::abs(n - K * L / pi), 3.0) << "K=" << K;
        }
    }
}

TEST(RealSpectrum, RejectsBadArguments) {
    EXPECT_THROW(real_spectrum(boundary::dirichlet(), -1.0, 5.0), ValidationError);
    EXPECT_THROW(real_spectrum(boundary::dirichlet(), 1.0, 0.0), ValidationError);
}
