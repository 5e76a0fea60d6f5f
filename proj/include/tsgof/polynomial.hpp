#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "tsgof/error.hpp"

namespace tsgof {

/// Real polynomial c_0 + c_1 z + ... + c_m z^m, constant term first.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }

    /// 1 - a_1 z - ... - a_k z^k, the AR-type polynomial.
    [[nodiscard]] static Polynomial one_minus(std::span<const double> a) {
        std::vector<double> c(a.size() + 1);
        c[0] = 1.0;
        for (std::size_t i = 0; i < a.size(); ++i) c[i + 1] = -a[i];
        return Polynomial(std::move(c));
    }

    /// 1 + a_1 z + ... + a_k z^k, the MA-type polynomial.
    [[nodiscard]] static Polynomial one_plus(std::span<const double> a) {
        std::vector<double> c(a.size() + 1);
        c[0] = 1.0;
        for (std::size_t i = 0; i < a.size(); ++i) c[i + 1] = a[i];
        return Polynomial(std::move(c));
    }

    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }

    [[nodiscard]] double max_abs_coeff() const noexcept {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    template <class T>
    [[nodiscard]] T operator()(T z) const {
        T acc = T(coeffs_.back());
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + T(coeffs_[k]);
        return acc;
    }

private:
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
        if (coeffs_.empty()) coeffs_.push_back(0.0);
    }

    std::vector<double> coeffs_;
};

/// All complex roots by simultaneous Durand-Kerner iteration.
/// Rounding error bound for Horner evaluation of p at z: 4 m eps sum_k |c_k| |z|^k.
[[nodiscard]] inline double evaluation_floor(const Polynomial& p, std::complex<double> z) {
    const auto& c = p.coeffs();
    const double az = std::abs(z);
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * az + std::abs(c[k]);
    return 4.0 * static_cast<double>(c.size()) * std::numeric_limits<double>::epsilon() * acc;
}

[[nodiscard]] inline std::vector<std::complex<double>> poly_roots(const Polynomial& p,
                                                                  int max_sweeps = 1000) {
    using cd = std::complex<double>;
    const std::size_t m = p.degree();
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "poly_roots needs degree >= 1");
    const auto& c = p.coeffs();
    const double lead = c[m];

    if (m == 1) return {cd(-c[0] / c[1], 0.0)};

    // Monic coefficients; roots lie inside the Cauchy radius 1 + max|c_k / c_m|.
    std::vector<double> a(m + 1);
    double bound = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        a[k] = c[k] / lead;
        if (k < m) bound = std::max(bound, std::abs(a[k]));
    }
    const double radius = 1.0 + bound;
    auto monic = [&](cd z) {
        cd acc(1.0, 0.0);
        for (std::size_t k = m; k-- > 0;) acc = acc * z + a[k];
        return acc;
    };

    std::vector<cd> z(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m) + 0.4;
        z[k] = std::polar(radius, angle);
    }

    bool done = false;
    for (int sweep = 0; sweep < max_sweeps && !done; ++sweep) {
        double max_step = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            cd denom(1.0, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                if (j != k) denom *= (z[k] - z[j]);
            }
            if (denom == cd(0.0, 0.0)) denom = cd(1e-300, 0.0);
            const cd step = monic(z[k]) / denom;
            z[k] -= step;
            max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
        }
        done = max_step < 1e-15;
    }

    // |p(r)| < 1e-8 max|c|, relaxed to the rounding floor of evaluating p at r for large roots.
    const double tol = 1e-8 * p.max_abs_coeff();
    for (const auto& r : z) {
        if (!(std::abs(p(r)) < std::max(tol, evaluation_floor(p, r)))) {
            throw Error(ErrorCode::NoConvergence, "Durand-Kerner iteration did not converge");
        }
    }
    // Tiny imaginary parts on real roots are iteration noise.
    for (auto& r : z) {
        if (std::abs(r.imag()) < 1e-12 * std::max(1.0, std::abs(r.real()))) r = cd(r.real(), 0.0);
    }
    return z;
}

/// Smallest root modulus; +infinity for a nonzero constant polynomial (no roots).
[[nodiscard]] inline double min_root_modulus(const Polynomial& p) {
    if (p.degree() == 0) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : poly_roots(p)) best = std::min(best, std::abs(r));
    return best;
}

}  // namespace tsgof
