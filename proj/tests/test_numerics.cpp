#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "tsgof/empirical.hpp"
#include "tsgof/optimize.hpp"
#include "tsgof/polynomial.hpp"
#include "tsgof/random.hpp"

using namespace tsgof;

namespace {

std::vector<double> sorted_real_parts(const std::vector<std::complex<double>>& roots) {
    std::vector<double> out;
    for (const auto& r : roots) out.push_back(r.real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

// ---- polynomial roots ------------------------------------------------------

TEST(PolyRoots, SymmetricQuadratic) {
    const auto roots = poly_roots(Polynomial{1.0, 0.0, -1.0});
    ASSERT_EQ(roots.size(), 2u);
    const auto re = sorted_real_parts(roots);
    EXPECT_NEAR(re[0], -1.0, 1e-12);
    EXPECT_NEAR(re[1], 1.0, 1e-12);
}

TEST(PolyRoots, LinearNonCausal) {
    const auto roots = poly_roots(Polynomial{1.0, -1.67});
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_NEAR(roots[0].real(), 1.0 / 1.67, 1e-14);
    EXPECT_NEAR(min_root_modulus(Polynomial{1.0, -1.67}), 0.5988023952095808, 1e-12);
}

TEST(PolyRoots, ArmaArPolynomialFactors) {
    // 1 - 1.2 z + 0.32 z^2 = 0.32 (z - 2.5)(z - 1.25)
    const Polynomial p{1.0, -1.2, 0.32};
    const auto re = sorted_real_parts(poly_roots(p));
    EXPECT_NEAR(re[0], 1.25, 1e-10);
    EXPECT_NEAR(re[1], 2.5, 1e-10);
    EXPECT_NEAR(min_root_modulus(p), 1.25, 1e-10);
}

TEST(PolyRoots, ComplexPairAndResidualBound) {
    // (1 - 0.5z + 0.5 z^2)(1 + 2 z)(3 - z) has a complex pair plus two real roots.
    const Polynomial p{3.0, 4.5, -3.5, 3.5, -1.0};
    const auto roots = poly_roots(p);
    ASSERT_EQ(roots.size(), p.degree());
    for (const auto& r : roots) EXPECT_LT(std::abs(p(r)), 1e-8 * p.max_abs_coeff());
    int complex_roots = 0;
    for (const auto& r : roots) complex_roots += r.imag() != 0.0;
    EXPECT_EQ(complex_roots, 2);
}

TEST(PolyRoots, RandomPolynomialsResidualProperty) {
    Rng rng(RngSeed{99, 0});
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t deg = 1 + rng.index(8);
        std::vector<double> c(deg + 1);
        for (auto& v : c) v = rng.normal();
        if (c.back() == 0.0) c.back() = 1.0;
        const Polynomial p(c);
        const auto roots = poly_roots(p);
        ASSERT_EQ(roots.size(), p.degree());
        for (const auto& r : roots) {
            EXPECT_LT(std::abs(p(r)), std::max(1e-8 * p.max_abs_coeff(), evaluation_floor(p, r)));
            if (std::abs(r) < 4.0) EXPECT_LT(std::abs(p(r)), 1e-8 * p.max_abs_coeff());
        }
    }
}

TEST(PolyRoots, DoubleRoot) {
    // (1 - 0.8z)^2
    const auto re = sorted_real_parts(poly_roots(Polynomial{1.0, -1.6, 0.64}));
    EXPECT_NEAR(re[0], 1.25, 1e-6);
    EXPECT_NEAR(re[1], 1.25, 1e-6);
}

TEST(PolyRoots, ConstantHasNoRoots) {
    EXPECT_THROW((void)poly_roots(Polynomial{2.0}), Error);
    EXPECT_TRUE(std::isinf(min_root_modulus(Polynomial{1.0})));
    // trailing zeros are trimmed
    EXPECT_EQ(Polynomial({1.0, 0.0, 0.0}).degree(), 0u);
}

TEST(MinRootModulus, SimpleCases) {
    EXPECT_NEAR(min_root_modulus(Polynomial{1.0, -0.5}), 2.0, 1e-14);
}

// ---- Nelder-Mead -----------------------------------------------------------

TEST(NelderMead, OneDimensionalQuadratic) {
    const auto r = nelder_mead([](std::span<const double> x) { return (x[0] - 2.0) * (x[0] - 2.0); }, {0.0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.argmin[0], 2.0, 1e-6);
}

TEST(NelderMead, Bowl) {
    const auto r = nelder_mead([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }, {3.0, -4.0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.argmin[0], 0.0, 1e-6);
    EXPECT_NEAR(r.argmin[1], 0.0, 1e-6);
}

TEST(NelderMead, Rosenbrock) {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
    };
    NelderMeadOptions opt;
    opt.max_iter = 5000;
    const auto r = nelder_mead(rosen, {-1.2, 1.0}, opt);
    EXPECT_NEAR(r.argmin[0], 1.0, 1e-3);
    EXPECT_NEAR(r.argmin[1], 1.0, 1e-3);
}

TEST(NelderMead, ConvexQuadraticsFromRandomStarts) {
    Rng rng(RngSeed{5, 0});
    for (int trial = 0; trial < 25; ++trial) {
        const double c0 = 4.0 * rng.uniform() - 2.0;
        const double c1 = 4.0 * rng.uniform() - 2.0;
        const double c2 = 4.0 * rng.uniform() - 2.0;
        auto f = [&](std::span<const double> x) {
            const double a = x[0] - c0;
            const double b = x[1] - c1;
            const double c = x[2] - c2;
            return a * a + 2.0 * b * b + 0.5 * c * c + 0.3 * a * b;
        };
        std::vector<double> x0{10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0};
        NelderMeadOptions opt;
        opt.initial_step = 0.5;
        const auto r = nelder_mead(f, x0, opt);
        ASSERT_TRUE(r.converged);
        EXPECT_NEAR(r.argmin[0], c0, 1e-6);
        EXPECT_NEAR(r.argmin[1], c1, 1e-6);
        EXPECT_NEAR(r.argmin[2], c2, 1e-6);
    }
}

TEST(NelderMead, BestValueNeverIncreases) {
    NelderMeadOptions opt;
    opt.record_trace = true;
    const auto r = nelder_mead(
        [](std::span<const double> x) { return std::pow(x[0] - 1.0, 4) + std::abs(x[1] + 2.0) + x[0] * x[1] * 0.1; },
        {3.0, 3.0}, opt);
    ASSERT_FALSE(r.best_trace.empty());
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) EXPECT_LE(r.best_trace[i], r.best_trace[i - 1]);
}

TEST(NelderMead, MaxIterReturnsBestUnconverged) {
    NelderMeadOptions opt;
    opt.max_iter = 5;
    const auto r = nelder_mead([](std::span<const double> x) { return x[0] * x[0]; }, {100.0}, opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 5);
    EXPECT_LT(r.objective_value, 100.0 * 100.0);
}

TEST(NelderMead, NonFiniteStartIsAnError) {
    try {
        (void)nelder_mead([](std::span<const double>) { return NAN; }, {0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFiniteObjective);
    }
}

TEST(NelderMead, InfeasibleProposalsAreRejected) {
    // Minimum of (x - 2)^2 restricted to x <= 1 is at the boundary.
    auto f = [](std::span<const double> x) {
        return x[0] > 1.0 ? std::numeric_limits<double>::infinity() : (x[0] - 2.0) * (x[0] - 2.0);
    };
    const auto r = nelder_mead(f, {0.0});
    EXPECT_NEAR(r.argmin[0], 1.0, 1e-6);
}

// ---- random streams --------------------------------------------------------

TEST(Rng, SameSeedSameStream) {
    EXPECT_EQ(draw_normal(100, {7, 3}), draw_normal(100, {7, 3}));
    EXPECT_EQ(draw_student_t(2.5, 100, {7, 3}), draw_student_t(2.5, 100, {7, 3}));
}

TEST(Rng, NeighbouringStreamsDiffer) {
    EXPECT_NE(draw_normal(10, {7, 3}), draw_normal(10, {7, 4}));
    EXPECT_NE(draw_normal(10, {7, 3}), draw_normal(10, {8, 3}));
    EXPECT_NE((RngSeed{7, 3}.substream(1)), (RngSeed{7, 3}.substream(2)));
}

TEST(Rng, FrozenFirstDraws) {
    // Reference values from an independent MT19937-64 + SplitMix64 implementation.
    EXPECT_EQ(Rng(RngSeed{0, 0}).next_u64(), 420042965745491204ULL);
    EXPECT_EQ(Rng(RngSeed{42, 7}).next_u64(), 14088956076275870458ULL);
    Rng a(RngSeed{0, 0});
    (void)a.next_u64();
    const double u = a.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
}

TEST(Rng, NormalVariance) {
    const auto x = draw_normal(100000, {1, 0});
    const double v = stats::variance(x);
    EXPECT_GT(v, 0.97);
    EXPECT_LT(v, 1.03);
    EXPECT_NEAR(stats::mean(x), 0.0, 3.0 / std::sqrt(100000.0) * 1.5);
}

TEST(Rng, StudentTVariance) {
    const auto x = draw_student_t(2.5, 100000, {2, 0});
    const double v = stats::variance(x);
    EXPECT_GT(v, 3.5);
    EXPECT_LT(v, 7.0);
}

TEST(Rng, GammaMean) {
    Rng rng(RngSeed{3, 0});
    for (double shape : {0.4, 1.25, 7.0}) {
        double s = 0.0;
        const int n = 50000;
        for (int i = 0; i < n; ++i) s += rng.gamma(shape);
        EXPECT_NEAR(s / n, shape, 4.0 * std::sqrt(shape / n));
    }
}

TEST(Rng, IndexIsUniform) {
    Rng rng(RngSeed{4, 0});
    std::vector<int> counts(3, 0);
    const int n = 30000;
    for (int i = 0; i < n; ++i) ++counts[rng.index(3)];
    for (int c : counts) EXPECT_NEAR(c, n / 3, 4.0 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
}

TEST(Rng, RejectsBadArguments) {
    EXPECT_THROW((void)draw_student_t(0.0, 10, {}), Error);
    EXPECT_THROW((void)draw_normal(0, {}), Error);
}

// ---- empirical law ---------------------------------------------------------

TEST(Empirical, MeanCorrected) {
    const auto d = make_empirical(std::vector<double>{1, 2, 3}, false);
    EXPECT_EQ(d.atoms, (std::vector<double>{-1, 0, 1}));
    EXPECT_EQ(d.mean, 0.0);
}

TEST(Empirical, RescaledUnitSampleSd) {
    const auto d = make_empirical(std::vector<double>{1, 2, 3}, true);
    EXPECT_EQ(d.atoms, (std::vector<double>{-1, 0, 1}));
    EXPECT_NEAR(d.variance, 1.0, 1e-12);
}

TEST(Empirical, AtomsAlwaysMeanZero) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto x = draw_student_t(3.0, 500, {50, s}).values();
        for (auto& v : x) v += 1e3;
        const auto d = make_empirical(x, s % 2 == 0);
        EXPECT_LT(std::abs(stats::mean(d.atoms)), 1e-12);
        if (d.rescaled) {
            EXPECT_NEAR(stats::variance(d.atoms), 1.0, 1e-10);
        }
    }
}

TEST(Empirical, DegenerateInputs) {
    EXPECT_THROW((void)make_empirical(std::vector<double>{1.0}, false), Error);
    try {
        (void)make_empirical(std::vector<double>{2, 2, 2}, false);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSeries);
    }
}

TEST(Empirical, SamplingIsDeterministicAndCentered) {
    const auto d = make_empirical(std::vector<double>{-1, 0, 1}, false);
    EXPECT_EQ(sample_empirical(d, 50, {9, 1}), sample_empirical(d, 50, {9, 1}));
    EXPECT_NE(sample_empirical(d, 50, {9, 1}), sample_empirical(d, 50, {9, 2}));
    const std::size_t n = 100000;
    const auto x = sample_empirical(d, n, {9, 3});
    const double sd = std::sqrt(2.0 / 3.0);
    EXPECT_LT(std::abs(stats::mean(x)), 3.0 * sd / std::sqrt(static_cast<double>(n)));
    for (double v : x) EXPECT_TRUE(v == -1.0 || v == 0.0 || v == 1.0);
}
