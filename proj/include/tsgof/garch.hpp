#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tsgof/empirical.hpp"
#include "tsgof/error.hpp"
#include "tsgof/optimize.hpp"
#include "tsgof/polynomial.hpp"
#include "tsgof/random.hpp"
#include "tsgof/series.hpp"

namespace tsgof::garch {

/// X_t = sigma_t Z_t, sigma_t^2 = alpha0 + sum alpha_i X_{t-i}^2 + sum beta_j sigma_{t-j}^2.
struct GarchModel {
    double alpha0 = 1.0;
    std::vector<double> alpha;
    std::vector<double> beta;

    [[nodiscard]] std::size_t p() const noexcept { return alpha.size(); }
    [[nodiscard]] std::size_t q() const noexcept { return beta.size(); }

    [[nodiscard]] double persistence() const noexcept {
        double s = 0.0;
        for (double a : alpha) s += a;
        for (double b : beta) s += b;
        return s;
    }

    [[nodiscard]] double unconditional_variance() const noexcept { return alpha0 / (1.0 - persistence()); }
};

struct GarchValidation {
    bool valid = true;
    std::vector<std::string> reasons;
    /// Non-fatal findings, e.g. a non-minimal representation.
    std::vector<std::string> warnings;
};

struct GarchFit {
    GarchModel model;
    Series residuals;
    Series sigma2_path;
    double loglik = 0.0;  // sum_t -(log sigma_t^2 + X_t^2 / sigma_t^2) / 2
    bool converged = false;
    int attempts = 0;
};

struct FitOptions {
    std::uint64_t seed = 0x47415243ULL;  // jitter stream for restarts
    int max_attempts = 5;
    NelderMeadOptions optimizer{};
};

/// How the unobserved pre-sample X^2 and sigma^2 values are filled in.
enum class FilterInit {
    /// Both set to the sample second moment of the series (the zero-mean variance estimate).
    SampleVariance,
    /// X^2 = 0 and sigma^2 = alpha0 / (1 - sum beta): reproduces the truncated expansion
    /// c_0 + sum_{i<t} c_i X_{t-i}^2 exactly.
    TruncatedExpansion,
};

[[nodiscard]] inline GarchValidation validate(const GarchModel& model) {
    GarchValidation v;
    auto fail = [&](std::string reason) {
        v.valid = false;
        v.reasons.push_back(std::move(reason));
    };
    if (!(model.alpha0 > 0.0) || !std::isfinite(model.alpha0)) fail("alpha0 must be positive");
    for (std::size_t i = 0; i < model.p(); ++i) {
        if (!(model.alpha[i] >= 0.0) || !std::isfinite(model.alpha[i])) {
            fail("alpha" + std::to_string(i + 1) + " must be nonnegative");
        }
    }
    for (std::size_t j = 0; j < model.q(); ++j) {
        if (!(model.beta[j] >= 0.0) || !std::isfinite(model.beta[j])) {
            fail("beta" + std::to_string(j + 1) + " must be nonnegative");
        }
    }
    if (!(model.persistence() < 1.0)) fail("sum of alpha and beta must be below 1");

    // Minimality: A(z)/z = alpha_1 + alpha_2 z + ... and B(z) = 1 - sum beta_j z^j share no root.
    if (v.valid && model.p() >= 2 && model.q() >= 1) {
        try {
            const auto a_roots = poly_roots(Polynomial(std::vector<double>(model.alpha.begin(), model.alpha.end())));
            const auto b_roots = poly_roots(Polynomial::one_minus(model.beta));
            for (const auto& ra : a_roots) {
                for (const auto& rb : b_roots) {
                    if (std::abs(ra - rb) < 1e-6) {
                        v.warnings.push_back("A(z) and B(z) share a root; representation is not minimal");
                    }
                }
            }
        } catch (const Error&) {
            // Degenerate A(z) (e.g. trailing zeros trimmed to a constant) has no roots to compare.
        }
    } else if (v.valid && model.p() == 1 && model.alpha[0] == 0.0 && model.q() >= 1) {
        v.warnings.push_back("alpha1 = 0 makes beta unidentifiable; representation is not minimal");
    }
    return v;
}

namespace detail {

inline void require_valid(const GarchModel& model) {
    const auto v = validate(model);
    if (!v.valid) throw Error(ErrorCode::InvalidModel, "invalid GARCH model: " + v.reasons.front());
}

/// Variance recursion without validity checks. Writes sigma^2 into `s2`.
inline void filter(std::span<const double> x, double alpha0, std::span<const double> alpha,
                   std::span<const double> beta, FilterInit init, std::vector<double>& s2) {
    const std::size_t n = x.size();
    s2.resize(n);
    double pre_x2 = 0.0;
    double pre_s2 = 0.0;
    if (init == FilterInit::SampleVariance) {
        pre_x2 = pre_s2 = stats::mean_square(x);
    } else {
        double sb = 0.0;
        for (double b : beta) sb += b;
        pre_s2 = alpha0 / (1.0 - sb);
    }
    for (std::size_t t = 0; t < n; ++t) {
        double v = alpha0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            v += alpha[i] * (t > i ? x[t - 1 - i] * x[t - 1 - i] : pre_x2);
        }
        for (std::size_t j = 0; j < beta.size(); ++j) {
            v += beta[j] * (t > j ? s2[t - 1 - j] : pre_s2);
        }
        s2[t] = v;
    }
}

}  // namespace detail

/// Conditional variance path sigma-hat_t^2, t = 1..n, from the observed stretch.
[[nodiscard]] inline Series sigma2_filter(std::span<const double> x, const GarchModel& model,
                                          FilterInit init = FilterInit::SampleVariance) {
    detail::require_valid(model);
    std::vector<double> s2;
    detail::filter(x, model.alpha0, model.alpha, model.beta, init, s2);
    return Series(std::move(s2));
}

/// Coefficients of sigma_t^2 = c_0 + sum_i c_i X_{t-i}^2 for GARCH(1,1).
[[nodiscard]] inline std::vector<double> c_coeffs(const GarchModel& model, std::size_t m) {
    if (model.p() != 1 || model.q() != 1) {
        throw Error(ErrorCode::UnsupportedOrder, "closed-form expansion coefficients exist only for GARCH(1,1)");
    }
    const double b = model.beta[0];
    if (!(b < 1.0)) throw Error(ErrorCode::InvalidModel, "beta1 must be below 1");
    std::vector<double> c(m + 1);
    c[0] = model.alpha0 / (1.0 - b);
    double power = 1.0;
    for (std::size_t i = 1; i <= m; ++i) {
        c[i] = model.alpha[0] * power;
        power *= b;
    }
    return c;
}

/// Path of length n after burn_in steps, started at the unconditional variance.
/// Innovations should have mean 0 and variance 1.
[[nodiscard]] inline Series simulate(const GarchModel& model, std::size_t n, const InnovationLaw& law,
                                     std::size_t burn_in, RngSeed seed) {
    detail::require_valid(model);
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    Rng rng(seed);
    const std::size_t total = burn_in + n;
    const std::vector<double> z = draw_innovations(law, total, rng);
    const double s2_0 = model.unconditional_variance();
    std::vector<double> x(total);
    std::vector<double> s2(total);
    for (std::size_t t = 0; t < total; ++t) {
        double v = model.alpha0;
        for (std::size_t i = 0; i < model.p(); ++i) v += model.alpha[i] * (t > i ? x[t - 1 - i] * x[t - 1 - i] : s2_0);
        for (std::size_t j = 0; j < model.q(); ++j) v += model.beta[j] * (t > j ? s2[t - 1 - j] : s2_0);
        s2[t] = v;
        x[t] = std::sqrt(v) * z[t];
    }
    return Series(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end()));
}

[[nodiscard]] inline Series residuals(std::span<const double> x, const GarchModel& model,
                                      FilterInit init = FilterInit::SampleVariance) {
    const Series s2 = sigma2_filter(x, model, init);
    std::vector<double> z(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) z[t] = x[t] / std::sqrt(s2[t]);
    return Series(std::move(z));
}

namespace detail {

inline constexpr double kParamFloor = 1e-6;
inline constexpr double kMaxPersistence = 0.999;

/// Unconstrained u -> (alpha0, alpha, beta). alpha0 = floor + exp(u_0); the remaining k
/// coefficients are floor + (0.999 - k floor) e^{u_i} / (1 + sum e^{u}), which maps R^k onto
/// {each >= floor, sum < 0.999}.
inline GarchModel from_unconstrained(std::span<const double> u, std::size_t p, std::size_t q) {
    GarchModel m;
    m.alpha0 = kParamFloor + std::exp(u[0]);
    const std::size_t k = p + q;
    double denom = 1.0;
    for (std::size_t i = 1; i <= k; ++i) denom += std::exp(u[i]);
    const double room = kMaxPersistence - static_cast<double>(k) * kParamFloor;
    m.alpha.resize(p);
    m.beta.resize(q);
    for (std::size_t i = 0; i < k; ++i) {
        const double c = kParamFloor + room * std::exp(u[i + 1]) / denom;
        if (i < p) {
            m.alpha[i] = c;
        } else {
            m.beta[i - p] = c;
        }
    }
    return m;
}

inline std::vector<double> to_unconstrained(const GarchModel& m) {
    const std::size_t k = m.p() + m.q();
    std::vector<double> u(k + 1);
    u[0] = std::log(std::max(m.alpha0 - kParamFloor, 1e-300));
    const double room = kMaxPersistence - static_cast<double>(k) * kParamFloor;
    std::vector<double> share(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double c = i < m.p() ? m.alpha[i] : m.beta[i - m.p()];
        share[i] = std::max((c - kParamFloor) / room, 1e-12);
        total += share[i];
    }
    if (total >= 1.0) {
        for (auto& s : share) s *= 0.99 / total;
        total = 0.99;
    }
    for (std::size_t i = 0; i < k; ++i) u[i + 1] = std::log(share[i] / (1.0 - total));
    return u;
}

}  // namespace detail

/// Gaussian quasi-MLE maximizing sum_t -(log sigma-hat_t^2 + X_t^2 / sigma-hat_t^2) / 2 over
/// alpha0 >= 1e-6, alpha_i, beta_j >= 1e-6, sum alpha + sum beta <= 0.999.
[[nodiscard]] inline GarchFit fit(std::span<const double> series, std::size_t p, std::size_t q,
                                  const FitOptions& options = {}) {
    const std::size_t n = series.size();
    if (n <= 200) throw Error(ErrorCode::InvalidArgument, "GARCH fit needs more than 200 observations");
    const double m2 = stats::mean_square(series);
    if (!(stats::variance(series) > 0.0)) throw Error(ErrorCode::DegenerateSeries, "series is constant");

    std::vector<double> s2;
    auto neg_loglik = [&](const GarchModel& m) {
        detail::filter(series, m.alpha0, m.alpha, m.beta, FilterInit::SampleVariance, s2);
        double total = 0.0;
        for (std::size_t t = 0; t < n; ++t) total += std::log(s2[t]) + series[t] * series[t] / s2[t];
        return 0.5 * total;
    };
    auto objective = [&](std::span<const double> u) { return neg_loglik(detail::from_unconstrained(u, p, q)); };

    GarchModel start;
    const double a_total = q == 0 ? 0.3 : 0.05;
    start.alpha.assign(p, p > 0 ? a_total / static_cast<double>(p) : 0.0);
    start.beta.assign(q, q > 0 ? 0.9 / static_cast<double>(q) : 0.0);
    start.alpha0 = std::max(m2 * (1.0 - start.persistence()), 2.0 * detail::kParamFloor);
    const std::vector<double> u_start = detail::to_unconstrained(start);

    GarchFit out;
    Rng jitter(RngSeed{options.seed, 0});
    std::vector<double> best_u = u_start;
    double best_value = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        std::vector<double> u0 = u_start;
        if (attempt > 0) {
            for (auto& v : u0) v += 0.5 * jitter.normal();
        }
        ++out.attempts;
        NelderMeadOptions nm = options.optimizer;
        if (nm.initial_step == 0.0) nm.initial_step = 0.1;
        const OptimResult r = nelder_mead(objective, u0, nm);
        if (r.objective_value < best_value) {
            best_value = r.objective_value;
            best_u = r.argmin;
        }
        if (r.converged) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) throw Error(ErrorCode::FitDiverged, "GARCH optimizer failed to converge from all starting points");

    out.model = detail::from_unconstrained(best_u, p, q);
    out.loglik = -neg_loglik(out.model);
    out.sigma2_path = Series(s2);
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = series[t] / std::sqrt(s2[t]);
    out.residuals = Series(std::move(z));
    return out;
}

}  // namespace tsgof::garch
