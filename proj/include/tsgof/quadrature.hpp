#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tsgof/error.hpp"

namespace tsgof {

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights for the integral of f(x) exp(-x^2) over the real line.
/// Newton iteration on the orthonormal Hermite recurrence, seeded from the usual
/// asymptotic guesses for the largest roots and then extrapolating inward.
[[nodiscard]] inline GaussHermiteRule gauss_hermite(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "gauss_hermite needs n >= 1");
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    const std::size_t half = (n + 1) / 2;
    const double nd = static_cast<double>(n);
    GaussHermiteRule rule{std::vector<double>(n), std::vector<double>(n)};

    double z = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(nd, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        bool ok = false;
        for (int its = 0; its < 100; ++its) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * nd) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                ok = true;
                break;
            }
        }
        if (!ok) throw Error(ErrorCode::NoConvergence, "Gauss-Hermite node iteration did not converge");
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

}  // namespace tsgof
