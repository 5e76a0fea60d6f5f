#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsgof/error.hpp"
#include "tsgof/quadrature.hpp"
#include "tsgof/series.hpp"

namespace tsgof {

/// Gaussian product weight measure N(0, sigma_s^2) x N(0, sigma_t^2) on R^2.
/// Finite, so the sample ADCV has the O(N^2) V-statistic form below.
class WeightMeasure {
public:
    WeightMeasure() = default;
    WeightMeasure(double sigma_s, double sigma_t) : sigma_s_(sigma_s), sigma_t_(sigma_t) {
        if (!(sigma_s > 0.0) || !(sigma_t > 0.0) || !std::isfinite(sigma_s) || !std::isfinite(sigma_t)) {
            throw Error(ErrorCode::InvalidArgument, "weight measure bandwidths must be positive and finite");
        }
    }
    explicit WeightMeasure(double sigma) : WeightMeasure(sigma, sigma) {}

    [[nodiscard]] double sigma_s() const noexcept { return sigma_s_; }
    [[nodiscard]] double sigma_t() const noexcept { return sigma_t_; }

    /// Fourier transform of the s-factor, exp(-sigma_s^2 x^2 / 2).
    [[nodiscard]] double kernel_s(double x) const noexcept { return std::exp(-0.5 * sigma_s_ * sigma_s_ * x * x); }
    [[nodiscard]] double kernel_t(double y) const noexcept { return std::exp(-0.5 * sigma_t_ * sigma_t_ * y * y); }

    [[nodiscard]] WeightMeasure scaled(double a) const { return {a * sigma_s_, a * sigma_t_}; }

private:
    double sigma_s_ = 0.5;
    double sigma_t_ = 0.5;
};

struct AdcvResult {
    std::size_t lag = 0;
    double t_stat = 0.0;
    double r_stat = 0.0;
    std::size_t n_pairs = 0;
};

[[nodiscard]] inline double fourier_weight(const WeightMeasure& mu, double x, double y) {
    return std::exp(-0.5 * (mu.sigma_s() * mu.sigma_s() * x * x + mu.sigma_t() * mu.sigma_t() * y * y));
}

namespace detail {

inline std::size_t pair_count(std::size_t n, std::size_t h) {
    if (h >= n || n - h < 2) {
        throw Error(ErrorCode::LagTooLarge,
                    "lag " + std::to_string(h) + " leaves fewer than 2 pairs in a series of length " +
                        std::to_string(n));
    }
    return n - h;
}

inline void require_finite(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorCode::InvalidArgument, "empty series");
    for (double v : x) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "series contains a non-finite value");
    }
}

/// Sample distance covariance of pairs (u_i, v_i), i < N, for a product kernel given by
/// ks(i, j) = mu_1-hat(u_i - u_j) and kt(i, j) = mu_2-hat(v_i - v_j):
///   (1/N^2) sum ks kt + (1/N^4)(sum ks)(sum kt) - (2/N^3) sum_i (sum_j ks)(sum_k kt).
/// The loop order is fixed, so every caller passing identical kernel values gets identical bits.
template <class KS, class KT>
[[nodiscard]] double vstatistic(std::size_t N, KS&& ks, KT&& kt) {
    std::vector<double> a(N, 1.0);
    std::vector<double> b(N, 1.0);
    double cross = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < N; ++j) {
            const double u = ks(i, j);
            const double v = kt(i, j);
            a[i] += u;
            a[j] += u;
            b[i] += v;
            b[j] += v;
            row += u * v;
        }
        cross += 1.0 + 2.0 * row;
    }
    double sa = 0.0;
    double sb = 0.0;
    double sab = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        sa += a[i];
        sb += b[i];
        sab += a[i] * b[i];
    }
    const double nd = static_cast<double>(N);
    const double term1 = cross / (nd * nd);
    const double term2 = (sa / (nd * nd)) * (sb / (nd * nd));
    const double term3 = 2.0 * sab / (nd * nd * nd);
    const double t = term1 + term2 - term3;
    if (t < 0.0) {
        if (t < -1e-12) {
            throw Error(ErrorCode::NumericalError, "distance covariance evaluated to a negative value");
        }
        return 0.0;
    }
    return t;
}

}  // namespace detail

/// Difference of empirical characteristic functions of the N = n - h lag-h pairs:
/// joint ECF at (s, t) minus the product of the marginal ECFs. Uses 1/N throughout.
[[nodiscard]] inline std::complex<double> ecf_diff(std::span<const double> x, std::size_t h, double s, double t) {
    detail::require_finite(x);
    const std::size_t N = detail::pair_count(x.size(), h);
    std::complex<double> joint(0.0, 0.0);
    std::complex<double> front(0.0, 0.0);
    std::complex<double> back(0.0, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        const double a = s * x[j];
        const double b = t * x[j + h];
        joint += std::polar(1.0, a + b);
        front += std::polar(1.0, a);
        back += std::polar(1.0, b);
    }
    const double inv = 1.0 / static_cast<double>(N);
    return joint * inv - (front * inv) * (back * inv);
}

/// Sample auto-distance covariance at lag h.
[[nodiscard]] inline double adcv(std::span<const double> x, std::size_t h, const WeightMeasure& mu) {
    detail::require_finite(x);
    const std::size_t N = detail::pair_count(x.size(), h);
    return detail::vstatistic(
        N, [&](std::size_t i, std::size_t j) { return mu.kernel_s(x[i] - x[j]); },
        [&](std::size_t i, std::size_t j) { return mu.kernel_t(x[i + h] - x[j + h]); });
}

/// Distance variance of the window x[first, first + N) under mu, i.e. the ADCV of the
/// pairs (x_j, x_j).
[[nodiscard]] inline double distance_variance(std::span<const double> x, std::size_t first, std::size_t N,
                                              const WeightMeasure& mu) {
    return detail::vstatistic(
        N, [&](std::size_t i, std::size_t j) { return mu.kernel_s(x[first + i] - x[first + j]); },
        [&](std::size_t i, std::size_t j) { return mu.kernel_t(x[first + i] - x[first + j]); });
}

namespace detail {

inline double normalize(double t, double v_front, double v_back) {
    if (!(v_front > 0.0) || !(v_back > 0.0)) {
        throw Error(ErrorCode::DegenerateSeries, "distance variance is zero (constant segment)");
    }
    return t / std::sqrt(v_front * v_back);
}

}  // namespace detail

/// Sample auto-distance correlation: ADCV over the geometric mean of the distance
/// variances of the front window x[0, n-h) and the back window x[h, n).
[[nodiscard]] inline double adcf(std::span<const double> x, std::size_t h, const WeightMeasure& mu) {
    detail::require_finite(x);
    const std::size_t N = detail::pair_count(x.size(), h);
    const double t = adcv(x, h, mu);
    const double vf = distance_variance(x, 0, N, mu);
    const double vb = h == 0 ? vf : distance_variance(x, h, N, mu);
    return detail::normalize(t, vf, vb);
}

/// Longest series for which adcv_curve caches the n x n kernel matrix.
inline constexpr std::size_t kCachedKernelLimit = 4096;

/// ADCV and ADCF for h = 1..max_lag. Kernel matrices are computed once for the whole
/// series and reused across lags; values agree bit-for-bit with adcv()/adcf().
[[nodiscard]] inline std::vector<AdcvResult> adcv_curve(std::span<const double> x, std::size_t max_lag,
                                                       const WeightMeasure& mu) {
    detail::require_finite(x);
    if (max_lag == 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be positive");
    const std::size_t n = x.size();
    detail::pair_count(n, max_lag);

    std::vector<AdcvResult> out;
    out.reserve(max_lag);
    if (n > kCachedKernelLimit) {
        for (std::size_t h = 1; h <= max_lag; ++h) {
            const std::size_t N = n - h;
            const double t = adcv(x, h, mu);
            out.push_back({h, t, detail::normalize(t, distance_variance(x, 0, N, mu), distance_variance(x, h, N, mu)), N});
        }
        return out;
    }

    const bool same = mu.sigma_s() == mu.sigma_t();
    std::vector<double> ks(n * n);
    std::vector<double> kt(same ? 0 : n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double d = x[i] - x[j];
            ks[i * n + j] = ks[j * n + i] = mu.kernel_s(d);
            if (!same) kt[i * n + j] = kt[j * n + i] = mu.kernel_t(d);
        }
    }
    const std::vector<double>& kt_ref = same ? ks : kt;

    auto window_variance = [&](std::size_t first, std::size_t N) {
        return detail::vstatistic(
            N, [&](std::size_t i, std::size_t j) { return ks[(first + i) * n + first + j]; },
            [&](std::size_t i, std::size_t j) { return kt_ref[(first + i) * n + first + j]; });
    };

    for (std::size_t h = 1; h <= max_lag; ++h) {
        const std::size_t N = n - h;
        const double t = detail::vstatistic(
            N, [&](std::size_t i, std::size_t j) { return ks[i * n + j]; },
            [&](std::size_t i, std::size_t j) { return kt_ref[(i + h) * n + j + h]; });
        const double r = detail::normalize(t, window_variance(0, N), window_variance(h, N));
        out.push_back({h, t, r, N});
    }
    return out;
}

/// Direct numerical integral of |ecf_diff(s, t)|^2 against mu with a tensor Gauss-Hermite
/// rule (s = sqrt(2) sigma_s u). Slow; a reference for adcv().
[[nodiscard]] inline double adcv_quadrature_oracle(std::span<const double> x, std::size_t h,
                                                   const WeightMeasure& mu, std::size_t nodes = 64) {
    detail::require_finite(x);
    detail::pair_count(x.size(), h);
    if (nodes < 16) throw Error(ErrorCode::InvalidArgument, "quadrature oracle needs at least 16 nodes");
    const GaussHermiteRule rule = gauss_hermite(nodes);
    const double scale_s = std::sqrt(2.0) * mu.sigma_s();
    const double scale_t = std::sqrt(2.0) * mu.sigma_t();
    double total = 0.0;
    for (std::size_t a = 0; a < nodes; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < nodes; ++b) {
            row += rule.weights[b] * std::norm(ecf_diff(x, h, scale_s * rule.nodes[a], scale_t * rule.nodes[b]));
        }
        total += rule.weights[a] * row;
    }
    return total / std::numbers::pi;
}

}  // namespace tsgof
