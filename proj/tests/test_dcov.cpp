#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "tsgof/dcov.hpp"
#include "tsgof/quadrature.hpp"
#include "tsgof/random.hpp"

using namespace tsgof;

namespace {

const std::vector<double> kSmall{0.5, -1.2, 0.3, 2.0, -0.7};

// Literal triple/quadruple sums over the pairs, no product-measure factorization.
double brute_force_adcv(const std::vector<double>& x, std::size_t h, const WeightMeasure& mu) {
    const std::size_t N = x.size() - h;
    auto muhat = [&](double a, double b) { return fourier_weight(mu, a, b); };
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            t1 += muhat(x[i] - x[j], x[i + h] - x[j + h]);
            for (std::size_t k = 0; k < N; ++k) {
                t3 += muhat(x[i] - x[j], x[i + h] - x[k + h]);
                for (std::size_t l = 0; l < N; ++l) t2 += muhat(x[i] - x[j], x[k + h] - x[l + h]);
            }
        }
    }
    const double n = static_cast<double>(N);
    return t1 / (n * n) + t2 / (n * n * n * n) - 2.0 * t3 / (n * n * n);
}

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    return draw_normal(n, RngSeed{seed, stream}).values();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

TEST(FourierWeight, OriginIsOne) {
    EXPECT_DOUBLE_EQ(fourier_weight(WeightMeasure(0.5), 0.0, 0.0), 1.0);
}

TEST(FourierWeight, MatchesQuadratureOfCharacteristicFunction) {
    // Adaptive quadrature of E cos(2S), S ~ N(0, 0.25), and of E cos(S + T) for the product.
    EXPECT_NEAR(fourier_weight(WeightMeasure(0.5), 2.0, 0.0), 0.6065306597126361, 1e-12);
    EXPECT_NEAR(fourier_weight(WeightMeasure(0.5), 1.0, 1.0), 0.7788007830714049, 1e-12);
}

TEST(FourierWeight, AlwaysInUnitInterval) {
    const WeightMeasure mu(0.3, 1.7);
    for (double x : {-40.0, -2.0, 0.1, 3.0}) {
        for (double y : {-5.0, 0.0, 0.2, 70.0}) {
            const double w = fourier_weight(mu, x, y);
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, 1.0);
        }
    }
}

TEST(WeightMeasure, RejectsNonPositiveBandwidth) {
    EXPECT_THROW(WeightMeasure(0.0, 1.0), Error);
    EXPECT_THROW(WeightMeasure(1.0, -0.5), Error);
}

TEST(EcfDiff, ConstantSeriesIsZero) {
    const std::vector<double> c{3.0, 3.0, 3.0, 3.0};
    const auto v = ecf_diff(c, 1, 0.7, -1.3);
    EXPECT_NEAR(std::abs(v), 0.0, 1e-15);
}

TEST(EcfDiff, ZeroFrequencyIsZero) {
    EXPECT_EQ(ecf_diff(kSmall, 1, 0.0, 0.0), std::complex<double>(0.0, 0.0));
}

TEST(EcfDiff, MatchesDirectSummation) {
    // numpy direct evaluation of both sums with 1/(n-h) normalization.
    const auto v = ecf_diff(kSmall, 1, 0.3, -0.7);
    EXPECT_NEAR(v.real(), -0.10327904239746566, 1e-14);
    EXPECT_NEAR(v.imag(), -0.026951280077691486, 1e-14);
}

TEST(EcfDiff, LagTooLarge) {
    try {
        (void)ecf_diff(kSmall, 4, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LagTooLarge);
    }
}

TEST(Adcv, ConstantSeriesIsZero) {
    EXPECT_EQ(adcv(std::vector<double>{1, 1, 1, 1, 1}, 1, WeightMeasure(0.5)), 0.0);
}

TEST(Adcv, MatchesBruteForceQuadrupleSum) {
    const WeightMeasure mu(0.5);
    for (std::size_t h = 0; h <= 3; ++h) {
        EXPECT_NEAR(adcv(kSmall, h, mu), brute_force_adcv(kSmall, h, mu), 1e-14) << "h=" << h;
    }
    const auto x = normal_sample(9, 4);
    const WeightMeasure skew(0.4, 1.3);
    EXPECT_NEAR(adcv(x, 2, skew), brute_force_adcv(x, 2, skew), 1e-14);
}

TEST(Adcv, MatchesAdaptiveQuadratureValue) {
    // scipy dblquad of |C_n|^2 under N(0, 0.25) x N(0, 0.25).
    EXPECT_LT(rel_diff(adcv(kSmall, 1, WeightMeasure(0.5)), 0.009324671425771704), 1e-6);
}

TEST(Adcv, LocationInvariance) {
    const WeightMeasure mu(0.5);
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto x = normal_sample(60, 11, s);
        const double base = adcv(x, 2, mu);
        for (auto& v : x) v += 10.0;
        EXPECT_NEAR(adcv(x, 2, mu), base, 1e-12);
    }
}

TEST(Adcv, ScaleBandwidthDuality) {
    const WeightMeasure mu(0.5, 0.8);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto x = normal_sample(60, 12, s);
        const double a = 0.5 + 0.3 * static_cast<double>(s);
        std::vector<double> ax(x);
        for (auto& v : ax) v *= a;
        EXPECT_NEAR(adcv(ax, 1, mu), adcv(x, 1, mu.scaled(a)), 1e-10);
    }
}

TEST(Adcv, PairOrderDoesNotMatter) {
    const WeightMeasure mu(0.5);
    const auto x = normal_sample(40, 13);
    const std::size_t h = 3;
    const std::size_t N = x.size() - h;
    std::vector<std::size_t> perm(N);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::reverse(perm.begin(), perm.end());
    const double permuted = detail::vstatistic(
        N, [&](std::size_t i, std::size_t j) { return mu.kernel_s(x[perm[i]] - x[perm[j]]); },
        [&](std::size_t i, std::size_t j) { return mu.kernel_t(x[perm[i] + h] - x[perm[j] + h]); });
    EXPECT_NEAR(permuted, adcv(x, h, mu), 1e-14);
}

TEST(Adcv, NonnegativeOnRandomInputs) {
    const WeightMeasure mu(0.5);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto x = normal_sample(20, 14, s);
        EXPECT_GE(adcv(x, 1 + s % 5, mu), 0.0);
    }
}

TEST(Adcv, LagTooLarge) {
    try {
        (void)adcv(kSmall, 4, WeightMeasure(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LagTooLarge);
    }
}

TEST(Adcv, RejectsNonFiniteInput) {
    const std::vector<double> x{1.0, NAN, 2.0, 3.0};
    EXPECT_THROW((void)adcv(x, 1, WeightMeasure(0.5)), Error);
}

TEST(Adcf, LagZeroIsOne) {
    const WeightMeasure mu(0.5);
    for (std::uint64_t s = 0; s < 10; ++s) {
        EXPECT_NEAR(adcf(normal_sample(40, 15, s), 0, mu), 1.0, 1e-10);
    }
}

TEST(Adcf, ConstantSeriesIsDegenerate) {
    try {
        (void)adcf(std::vector<double>{2, 2, 2, 2, 2, 2}, 1, WeightMeasure(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSeries);
    }
}

TEST(Adcf, ConstantFrontWindowIsDegenerate) {
    const std::vector<double> x{1, 1, 1, 1, 5};
    EXPECT_THROW((void)adcf(x, 1, WeightMeasure(0.5)), Error);
}

TEST(Adcf, WithinUnitInterval) {
    const WeightMeasure mu(0.5);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = normal_sample(50, 16, s);
        for (std::size_t h = 1; h <= 5; ++h) {
            const double r = adcf(x, h, mu);
            EXPECT_GE(r, 0.0);
            EXPECT_LE(r, 1.0 + 1e-10);
        }
    }
}

TEST(Adcf, IidReferenceQuantile) {
    // 95% quantile of n * R-hat at lag 1 for iid N(0,1), n = 500, sigma = 0.5, from an
    // independent numpy implementation with 2000 replications: 4.355.
    const std::size_t n = 500;
    std::vector<double> stats;
    for (std::uint64_t r = 0; r < 500; ++r) {
        stats.push_back(static_cast<double>(n) * adcf(normal_sample(n, 17, r), 1, WeightMeasure(0.5)));
    }
    std::sort(stats.begin(), stats.end());
    const double q95 = stats[474];
    EXPECT_NEAR(q95, 4.355, 0.2 * 4.355);
}

TEST(AdcvCurve, OneResultPerLagInRange) {
    const auto x = normal_sample(100, 18);
    const auto curve = adcv_curve(x, 10, WeightMeasure(0.5));
    ASSERT_EQ(curve.size(), 10u);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        EXPECT_EQ(curve[i].lag, i + 1);
        EXPECT_EQ(curve[i].n_pairs, 100 - (i + 1));
        EXPECT_GE(curve[i].r_stat, 0.0);
        EXPECT_LE(curve[i].r_stat, 1.0);
    }
}

TEST(AdcvCurve, MaxLagTooLarge) {
    const auto x = normal_sample(30, 19);
    EXPECT_THROW((void)adcv_curve(x, 29, WeightMeasure(0.5)), Error);
    EXPECT_NO_THROW((void)adcv_curve(x, 28, WeightMeasure(0.5)));
}

TEST(AdcvCurve, BitIdenticalToPerLagCalls) {
    const auto x = normal_sample(80, 20);
    for (const WeightMeasure& mu : {WeightMeasure(0.5), WeightMeasure(0.3, 1.1)}) {
        const auto curve = adcv_curve(x, 6, mu);
        for (const auto& c : curve) {
            EXPECT_EQ(c.t_stat, adcv(x, c.lag, mu));
            EXPECT_EQ(c.r_stat, adcf(x, c.lag, mu));
        }
    }
}

TEST(AdcvCurve, UncachedPathForLongSeries) {
    const auto x = normal_sample(kCachedKernelLimit + 10, 21);
    const auto curve = adcv_curve(x, 1, WeightMeasure(0.5));
    EXPECT_EQ(curve[0].t_stat, adcv(x, 1, WeightMeasure(0.5)));
}

TEST(GaussHermite, Moments) {
    for (std::size_t n : {16u, 17u, 64u, 96u}) {
        const auto rule = gauss_hermite(n);
        double m0 = 0.0;
        double m2 = 0.0;
        double m4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x2 = rule.nodes[i] * rule.nodes[i];
            m0 += rule.weights[i];
            m2 += rule.weights[i] * x2;
            m4 += rule.weights[i] * x2 * x2;
        }
        const double sqrt_pi = std::sqrt(std::numbers::pi);
        EXPECT_NEAR(m0, sqrt_pi, 1e-13) << n;
        EXPECT_NEAR(m2, sqrt_pi / 2.0, 1e-13) << n;
        EXPECT_NEAR(m4, 3.0 * sqrt_pi / 4.0, 1e-12) << n;
    }
}

TEST(QuadratureOracle, ConstantSeriesIsZero) {
    EXPECT_NEAR(adcv_quadrature_oracle(std::vector<double>{4, 4, 4, 4}, 1, WeightMeasure(0.5)), 0.0, 1e-14);
}

TEST(QuadratureOracle, ConvergedAt64Nodes) {
    const auto x = normal_sample(30, 22);
    const double a = adcv_quadrature_oracle(x, 1, WeightMeasure(0.5), 64);
    const double b = adcv_quadrature_oracle(x, 1, WeightMeasure(0.5), 96);
    EXPECT_LT(std::abs(a - b), 1e-9);
}

TEST(QuadratureOracle, AgreesWithVStatistic) {
    const WeightMeasure mu(0.5);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = normal_sample(30, 23, s);
        const double v = adcv(x, 1, mu);
        EXPECT_LT(std::abs(v - adcv_quadrature_oracle(x, 1, mu)) / std::max(v, 1e-12), 1e-6);
    }
}

TEST(QuadratureOracle, RejectsTooFewNodes) {
    EXPECT_THROW((void)adcv_quadrature_oracle(kSmall, 1, WeightMeasure(0.5), 8), Error);
}
