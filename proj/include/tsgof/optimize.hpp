#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "tsgof/error.hpp"

namespace tsgof {

struct OptimResult {
    std::vector<double> argmin;
    double objective_value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Best objective value after each iteration.
    std::vector<double> best_trace;
};

struct NelderMeadOptions {
    double tol = 1e-8;
    int max_iter = 5000;
    /// Edge length of the initial simplex per coordinate; 0 picks 5% of |x0_i| (0.00025 at zero).
    double initial_step = 0.0;
    bool record_trace = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex minimizer with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// Converged when both the simplex diameter and the objective spread fall below tol.
/// Non-finite objective values away from x0 are treated as +infinity (rejected proposals).
/// Running out of iterations returns the best vertex with converged = false.
[[nodiscard]] inline OptimResult nelder_mead(const Objective& objective, std::vector<double> x0,
                                             const NelderMeadOptions& opt = {}) {
    const std::size_t dim = x0.size();
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "nelder_mead needs at least one parameter");
    if (!(opt.tol > 0.0) || opt.max_iter <= 0) {
        throw Error(ErrorCode::InvalidArgument, "nelder_mead needs tol > 0 and max_iter > 0");
    }

    OptimResult res;
    auto eval = [&](std::span<const double> x) {
        ++res.evaluations;
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    const double f0 = objective(x0);
    ++res.evaluations;
    if (!std::isfinite(f0)) throw Error(ErrorCode::NonFiniteObjective, "objective is not finite at x0");

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    std::vector<double> fvals(dim + 1, f0);
    for (std::size_t i = 0; i < dim; ++i) {
        double step = opt.initial_step;
        if (step == 0.0) step = x0[i] != 0.0 ? 0.05 * std::abs(x0[i]) : 0.00025;
        simplex[i + 1][i] += step;
        fvals[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);

    auto diameter = [&](std::size_t best) {
        double d = 0.0;
        for (std::size_t v = 0; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i) d = std::max(d, std::abs(simplex[v][i] - simplex[best][i]));
        }
        return d;
    };
    auto affine = [&](std::vector<double>& out, double t, const std::vector<double>& towards) {
        for (std::size_t i = 0; i < dim; ++i) out[i] = centroid[i] + t * (towards[i] - centroid[i]);
    };

    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[dim - 1];

        if (opt.record_trace) res.best_trace.push_back(fvals[best]);
        if (diameter(best) < opt.tol && std::abs(fvals[worst] - fvals[best]) < opt.tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == worst) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v][i];
        }
        for (auto& c : centroid) c /= static_cast<double>(dim);

        affine(xr, -1.0, simplex[worst]);
        const double fr = eval(xr);
        if (fr < fvals[best]) {
            affine(xe, -2.0, simplex[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fvals[worst] = fe;
            } else {
                simplex[worst] = xr;
                fvals[worst] = fr;
            }
            continue;
        }
        if (fr < fvals[second]) {
            simplex[worst] = xr;
            fvals[worst] = fr;
            continue;
        }
        // Contraction: outside when the reflected point beats the worst, inside otherwise.
        const bool outside = fr < fvals[worst];
        affine(xc, outside ? -0.5 : 0.5, simplex[worst]);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fvals[worst])) {
            simplex[worst] = xc;
            fvals[worst] = fc;
            continue;
        }
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == best) continue;
            for (std::size_t i = 0; i < dim; ++i) {
                simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
            }
            fvals[v] = eval(simplex[v]);
        }
    }

    const auto best_it = std::min_element(fvals.begin(), fvals.end());
    const auto best = static_cast<std::size_t>(best_it - fvals.begin());
    res.argmin = simplex[best];
    res.objective_value = fvals[best];
    return res;
}

}  // namespace tsgof
