#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsgof/empirical.hpp"
#include "tsgof/error.hpp"
#include "tsgof/optimize.hpp"
#include "tsgof/polynomial.hpp"
#include "tsgof/random.hpp"
#include "tsgof/series.hpp"

namespace tsgof::arma {

/// X_t = sum phi_i X_{t-i} + Z_t + sum theta_j Z_{t-j}, Var Z = sigma2.
struct ArmaModel {
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma2 = 1.0;

    [[nodiscard]] std::size_t p() const noexcept { return phi.size(); }
    [[nodiscard]] std::size_t q() const noexcept { return theta.size(); }
    [[nodiscard]] Polynomial ar_polynomial() const { return Polynomial::one_minus(phi); }
    [[nodiscard]] Polynomial ma_polynomial() const { return Polynomial::one_plus(theta); }
};

struct ArmaValidity {
    bool causal = false;
    bool invertible = false;
};

struct ArmaFit {
    ArmaModel model;
    Series residuals;
    double mean = 0.0;             // subtracted before filtering
    double objective_value = 0.0;  // (n/2) log sigma2-hat
    double loglik = 0.0;           // conditional Gaussian log-likelihood
    bool converged = false;
    int attempts = 0;
};

struct FitOptions {
    std::uint64_t seed = 0x41524D41ULL;  // jitter stream for restarts
    int max_attempts = 5;
    NelderMeadOptions optimizer{};
};

[[nodiscard]] inline ArmaValidity validate(const ArmaModel& model) {
    auto outside_unit_circle = [](const Polynomial& poly) {
        try {
            return min_root_modulus(poly) > 1.0;
        } catch (const Error&) {
            return false;
        }
    };
    return {outside_unit_circle(model.ar_polynomial()), outside_unit_circle(model.ma_polynomial())};
}

/// Coefficients pi_0..pi_m of phi(z) / theta(z).
[[nodiscard]] inline std::vector<double> pi_coeffs(const ArmaModel& model, std::size_t m) {
    if (!validate(model).invertible) throw Error(ErrorCode::NotInvertible, "MA polynomial is not invertible");
    std::vector<double> pi(m + 1, 0.0);
    pi[0] = 1.0;
    for (std::size_t j = 1; j <= m; ++j) {
        double v = j <= model.p() ? -model.phi[j - 1] : 0.0;
        for (std::size_t k = 1; k <= std::min(j, model.q()); ++k) v -= model.theta[k - 1] * pi[j - k];
        pi[j] = v;
    }
    return pi;
}

namespace detail {

/// Truncated inversion with zero pre-sample values; no validity checks.
inline void filter_residuals(std::span<const double> x, std::span<const double> phi,
                             std::span<const double> theta, std::vector<double>& z) {
    const std::size_t n = x.size();
    z.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        for (std::size_t i = 0; i < phi.size() && i < t; ++i) v -= phi[i] * x[t - 1 - i];
        for (std::size_t j = 0; j < theta.size() && j < t; ++j) v -= theta[j] * z[t - 1 - j];
        z[t] = v;
    }
}

inline double gaussian_loglik(std::size_t n, double sigma2) {
    const double nd = static_cast<double>(n);
    return -0.5 * nd * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

}  // namespace detail

/// Residuals from the observed stretch only: Z-hat_t = sum_{j < t} pi_j X_{t-j}, computed by
/// the equivalent O(n (p + q)) recursion with zero pre-sample values.
[[nodiscard]] inline Series residuals(std::span<const double> x, const ArmaModel& model) {
    if (!validate(model).invertible) throw Error(ErrorCode::NotInvertible, "MA polynomial is not invertible");
    std::vector<double> z;
    detail::filter_residuals(x, model.phi, model.theta, z);
    return Series(std::move(z));
}

/// burn_in + n steps of the ARMA recursion from zero initial conditions; keeps the last n.
[[nodiscard]] inline Series simulate(const ArmaModel& model, std::size_t n, const InnovationLaw& law,
                                     std::size_t burn_in, RngSeed seed) {
    const auto validity = validate(model);
    if (!validity.causal) throw Error(ErrorCode::NotCausal, "AR polynomial has a root inside the unit circle");
    if (!validity.invertible) throw Error(ErrorCode::NotInvertible, "MA polynomial is not invertible");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    Rng rng(seed);
    const std::size_t total = burn_in + n;
    const std::vector<double> z = draw_innovations(law, total, rng);
    std::vector<double> x(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        double v = z[t];
        for (std::size_t i = 0; i < model.p() && i < t; ++i) v += model.phi[i] * x[t - 1 - i];
        for (std::size_t j = 0; j < model.q() && j < t; ++j) v += model.theta[j] * z[t - 1 - j];
        x[t] = v;
    }
    return Series(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end()));
}

struct NoncausalPath {
    Series x;
    Series z;  // innovations aligned with x: x_t = phi x_{t-1} + z_t
};

/// Stationary solution of X_t = phi X_{t-1} + Z_t with |phi| > 1 and t(df) innovations,
/// X_t = -sum_{j>=1} phi^{-j} Z_{t+j}. Innovations run `horizon` steps past the sample and
/// the path is filtered backward from X = 0 at the far end.
[[nodiscard]] inline NoncausalPath noncausal_ar1_path(double phi, std::size_t n, double df, std::size_t horizon,
                                                      RngSeed seed) {
    if (!(std::abs(phi) > 1.0)) throw Error(ErrorCode::NotNoncausal, "non-causal AR(1) needs |phi| > 1");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    Rng rng(seed);
    const std::size_t total = n + horizon;
    const std::vector<double> z = draw_innovations(StudentTLaw{df}, total, rng);
    std::vector<double> x(total, 0.0);
    for (std::size_t t = total - 1; t > 0; --t) x[t - 1] = (x[t] - z[t]) / phi;
    return {Series(std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n))),
            Series(std::vector<double>(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)))};
}

[[nodiscard]] inline Series simulate_noncausal_ar1(double phi, std::size_t n, double df, std::size_t horizon,
                                                   RngSeed seed) {
    return noncausal_ar1_path(phi, n, df, horizon, seed).x;
}

namespace detail {

inline bool valid_coefficients(std::span<const double> beta, std::size_t p) {
    const ArmaModel m{std::vector<double>(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(p)),
                      std::vector<double>(beta.begin() + static_cast<std::ptrdiff_t>(p), beta.end()), 1.0};
    const auto v = validate(m);
    return v.causal && v.invertible;
}

/// Least-squares regression of y on the columns of `design`.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    return design.colPivHouseholderQr().solve(y);
}

/// Hannan-Rissanen start: long autoregression for innovation proxies, then a regression of
/// X_t on its own lags and lagged proxies. Shrunk toward zero until causal and invertible.
inline std::vector<double> hannan_rissanen(std::span<const double> x, std::size_t p, std::size_t q) {
    const std::size_t n = x.size();
    std::vector<double> beta(p + q, 0.0);
    if (p + q == 0) return beta;

    std::vector<double> e(n, 0.0);
    std::size_t m_long = 0;
    if (q > 0) {
        m_long = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(10.0 * std::log10(static_cast<double>(n)))),
                                         p + q + 1, n / 4);
        const std::size_t rows = n - m_long;
        Eigen::MatrixXd design(rows, m_long);
        Eigen::VectorXd y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = r + m_long;
            y(r) = x[t];
            for (std::size_t i = 0; i < m_long; ++i) design(r, i) = x[t - 1 - i];
        }
        const Eigen::VectorXd a = least_squares(design, y);
        for (std::size_t t = m_long; t < n; ++t) {
            double v = x[t];
            for (std::size_t i = 0; i < m_long; ++i) v -= a(i) * x[t - 1 - i];
            e[t] = v;
        }
    }
    const std::size_t start = m_long + std::max(p, q);
    if (start + p + q + 1 >= n) return beta;
    const std::size_t rows = n - start;
    Eigen::MatrixXd design(rows, p + q);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + start;
        y(r) = x[t];
        for (std::size_t i = 0; i < p; ++i) design(r, i) = x[t - 1 - i];
        for (std::size_t j = 0; j < q; ++j) design(r, p + j) = e[t - 1 - j];
    }
    const Eigen::VectorXd c = least_squares(design, y);
    for (std::size_t k = 0; k < p + q; ++k) beta[k] = std::isfinite(c(k)) ? c(k) : 0.0;

    for (int shrink = 0; shrink < 60 && !valid_coefficients(beta, p); ++shrink) {
        for (auto& b : beta) b *= 0.8;
    }
    if (!valid_coefficients(beta, p)) std::fill(beta.begin(), beta.end(), 0.0);
    return beta;
}

}  // namespace detail

/// Conditional Gaussian pseudo-MLE of an ARMA(p, q) model. The series is centered first;
/// sigma^2 is profiled out as the mean squared residual, leaving (n/2) log sigma2-hat to be
/// minimized over causal, invertible coefficients. Starts from a Hannan-Rissanen estimate and
/// retries from jittered starts until one optimizer run converges.
[[nodiscard]] inline ArmaFit fit(std::span<const double> series, std::size_t p, std::size_t q,
                                 const FitOptions& options = {}) {
    const std::size_t n = series.size();
    if (n <= 10 * (p + q + 1)) {
        throw Error(ErrorCode::InvalidArgument, "series of length " + std::to_string(n) +
                                                    " is too short to fit ARMA(" + std::to_string(p) + "," +
                                                    std::to_string(q) + ")");
    }
    ArmaFit out;
    out.mean = stats::mean(series);
    std::vector<double> x(series.begin(), series.end());
    for (auto& v : x) v -= out.mean;
    const double nd = static_cast<double>(n);

    std::vector<double> z;
    auto objective = [&](std::span<const double> beta) {
        if (!detail::valid_coefficients(beta, p)) return std::numeric_limits<double>::infinity();
        detail::filter_residuals(x, beta.subspan(0, p), beta.subspan(p), z);
        const double s2 = stats::mean_square(z);
        return s2 > 0.0 ? 0.5 * nd * std::log(s2) : std::numeric_limits<double>::infinity();
    };

    std::vector<double> best_beta(p + q, 0.0);
    if (p + q > 0) {
        const std::vector<double> start = detail::hannan_rissanen(x, p, q);
        Rng jitter(RngSeed{options.seed, 0});
        double best_value = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
            std::vector<double> x0 = start;
            if (attempt > 0) {
                for (int tries = 0; tries < 100; ++tries) {
                    for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = start[k] + 0.1 * jitter.normal();
                    if (detail::valid_coefficients(x0, p)) break;
                    x0 = start;
                }
            }
            ++out.attempts;
            const OptimResult r = nelder_mead(objective, x0, options.optimizer);
            if (r.objective_value < best_value) {
                best_value = r.objective_value;
                best_beta = r.argmin;
            }
            if (r.converged && std::isfinite(r.objective_value)) {
                out.converged = true;
                break;
            }
        }
        if (!out.converged) {
            throw Error(ErrorCode::FitDiverged, "ARMA optimizer failed to converge from all starting points");
        }
    }

    out.model.phi.assign(best_beta.begin(), best_beta.begin() + static_cast<std::ptrdiff_t>(p));
    out.model.theta.assign(best_beta.begin() + static_cast<std::ptrdiff_t>(p), best_beta.end());
    detail::filter_residuals(x, out.model.phi, out.model.theta, z);
    out.model.sigma2 = stats::mean_square(z);
    if (!(out.model.sigma2 > 0.0)) throw Error(ErrorCode::DegenerateSeries, "series is constant");
    out.objective_value = 0.5 * nd * std::log(out.model.sigma2);
    out.loglik = detail::gaussian_loglik(n, out.model.sigma2);
    out.converged = true;
    out.residuals = Series(std::move(z));
    return out;
}

}  // namespace tsgof::arma
