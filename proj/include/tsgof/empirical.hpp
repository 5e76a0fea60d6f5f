#pragma once

#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "tsgof/error.hpp"
#include "tsgof/random.hpp"
#include "tsgof/series.hpp"

namespace tsgof {

/// Equal-weight distribution on mean-corrected residuals, the bootstrap innovation law.
struct EmpiricalDist {
    std::vector<double> atoms;
    double mean = 0.0;
    double variance = 0.0;  // divisor n-1
    bool rescaled = false;
};

[[nodiscard]] inline EmpiricalDist make_empirical(std::span<const double> residuals,
                                                  bool rescale_unit_variance) {
    if (residuals.size() < 2) {
        throw Error(ErrorCode::DegenerateSeries, "empirical distribution needs at least two residuals");
    }
    EmpiricalDist dist;
    dist.atoms.assign(residuals.begin(), residuals.end());
    // Two centering passes so the stored atoms average to zero at machine precision.
    for (int pass = 0; pass < 2; ++pass) {
        const double m = stats::mean(dist.atoms);
        for (auto& a : dist.atoms) a -= m;
    }
    double var = stats::variance(dist.atoms);
    if (!(var > 0.0)) {
        throw Error(ErrorCode::DegenerateSeries, "residuals are constant");
    }
    if (rescale_unit_variance) {
        const double sd = std::sqrt(var);
        for (auto& a : dist.atoms) a /= sd;
        const double m = stats::mean(dist.atoms);
        for (auto& a : dist.atoms) a -= m;
        var = stats::variance(dist.atoms);
        dist.rescaled = true;
    }
    dist.mean = stats::mean(dist.atoms);
    dist.variance = var;
    return dist;
}

[[nodiscard]] inline Series sample_empirical(const EmpiricalDist& dist, std::size_t n, RngSeed seed) {
    if (dist.atoms.empty()) throw Error(ErrorCode::InvalidArgument, "empty empirical distribution");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = dist.atoms[rng.index(dist.atoms.size())];
    return Series(std::move(out));
}

/// N(0, sd^2) innovations.
struct NormalLaw {
    double sd = 1.0;
};

/// Student t innovations with real-valued degrees of freedom (not rescaled).
struct StudentTLaw {
    double df = 5.0;
};

using InnovationLaw = std::variant<NormalLaw, StudentTLaw, EmpiricalDist>;

/// Draws `n` innovations from `law`, consuming the stream of `rng` in order.
[[nodiscard]] inline std::vector<double> draw_innovations(const InnovationLaw& law, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    if (const auto* nl = std::get_if<NormalLaw>(&law)) {
        for (auto& v : out) v = nl->sd * rng.normal();
    } else if (const auto* tl = std::get_if<StudentTLaw>(&law)) {
        if (!(tl->df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
        for (auto& v : out) v = rng.student_t(tl->df);
    } else {
        const auto& ed = std::get<EmpiricalDist>(law);
        if (ed.atoms.empty()) throw Error(ErrorCode::InvalidArgument, "empty empirical distribution");
        for (auto& v : out) v = ed.atoms[rng.index(ed.atoms.size())];
    }
    return out;
}

}  // namespace tsgof
