#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsgof/arma.hpp"
#include "tsgof/dcov.hpp"
#include "tsgof/empirical.hpp"
#include "tsgof/error.hpp"
#include "tsgof/garch.hpp"
#include "tsgof/parallel.hpp"
#include "tsgof/random.hpp"
#include "tsgof/series.hpp"

namespace tsgof::gof {

enum class ModelKind { Arma, Garch };

struct ModelSpec {
    ModelKind kind = ModelKind::Arma;
    std::size_t p = 0;
    std::size_t q = 0;
};

enum class Statistic { Adcv, Adcf };

struct BootstrapConfig {
    std::size_t replicates = 500;
    std::size_t max_lag = 20;
    double lo = 0.05;
    double hi = 0.95;
    WeightMeasure measure{0.5};
    RngSeed seed{};
    Statistic statistic = Statistic::Adcf;
    std::size_t burn_in = 500;
    /// 0 = ADCV_THREADS or hardware concurrency. Never affects results.
    unsigned threads = 0;
    double max_drop_rate = 0.05;
};

using FittedModel = std::variant<arma::ArmaFit, garch::GarchFit>;

/// Row-major replicate-by-lag matrix.
struct ReplicateMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data).subspan(r * cols, cols);
    }
    [[nodiscard]] std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows);
        for (std::size_t r = 0; r < rows; ++r) out[r] = data[r * cols + c];
        return out;
    }
};

struct LagBand {
    std::size_t lag = 0;
    double lo = 0.0;
    double hi = 0.0;
    double observed = 0.0;
    double p_value = 1.0;
    /// n times the observed ADCV at this lag.
    double observed_n_adcv = 0.0;
};

struct BandResult {
    std::vector<LagBand> lags;
    std::size_t replicates = 0;
    std::size_t n = 0;
    std::string model;
};

struct BootstrapRun {
    FittedModel fit;
    std::vector<AdcvResult> observed_curve;
    std::vector<double> observed;  // the configured statistic, lags 1..H
    ReplicateMatrix replicates;    // kept replicates only, in stream order
    std::vector<std::size_t> dropped;
    std::vector<std::string> drop_log;
    std::size_t n = 0;
};

struct GofReport {
    FittedModel fit;
    BandResult bands;
    std::vector<bool> reject;
    ReplicateMatrix replicates;
    /// Max over lags of the statistic and its bootstrap p-value (not calibrated per lag).
    double max_statistic = 0.0;
    double max_statistic_p_value = 1.0;
    std::vector<std::size_t> dropped;
    std::vector<std::string> drop_log;
};

[[nodiscard]] inline std::string describe(const ModelSpec& spec) {
    const std::string orders = "(" + std::to_string(spec.p) + "," + std::to_string(spec.q) + ")";
    return (spec.kind == ModelKind::Arma ? "ARMA" : "GARCH") + orders;
}

[[nodiscard]] inline std::vector<double> select_statistic(std::span<const AdcvResult> curve, Statistic which) {
    std::vector<double> out;
    out.reserve(curve.size());
    for (const auto& c : curve) out.push_back(which == Statistic::Adcf ? c.r_stat : c.t_stat);
    return out;
}

[[nodiscard]] inline const Series& fitted_residuals(const FittedModel& fit) {
    return std::visit([](const auto& f) -> const Series& { return f.residuals; }, fit);
}

[[nodiscard]] inline FittedModel fit_model(std::span<const double> series, const ModelSpec& spec) {
    if (spec.kind == ModelKind::Arma) return arma::fit(series, spec.p, spec.q);
    return garch::fit(series, spec.p, spec.q);
}

/// Empirical quantile per column as the order statistic at ceil(B * level) (type 1).
[[nodiscard]] inline double type1_quantile(std::vector<double> values, double level) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double b = static_cast<double>(values.size());
    auto k = static_cast<std::size_t>(std::ceil(b * level - 1e-9));
    k = std::clamp<std::size_t>(k, 1, values.size());
    return values[k - 1];
}

[[nodiscard]] inline std::vector<LagBand> quantile_bands(const ReplicateMatrix& reps, double lo, double hi) {
    if (reps.rows < 20) throw Error(ErrorCode::InvalidArgument, "quantile bands need at least 20 replicates");
    if (!(lo < hi) || !(lo > 0.0) || !(hi < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "quantile levels must satisfy 0 < lo < hi < 1");
    }
    std::vector<LagBand> out(reps.cols);
    for (std::size_t c = 0; c < reps.cols; ++c) {
        const std::vector<double> col = reps.column(c);
        out[c].lag = c + 1;
        out[c].lo = type1_quantile(col, lo);
        out[c].hi = type1_quantile(col, hi);
    }
    return out;
}

/// Monte Carlo p-values (1 + #{replicate >= observed}) / (B + 1), per lag.
[[nodiscard]] inline std::vector<double> pvalues(const ReplicateMatrix& reps, std::span<const double> observed) {
    if (reps.rows < 20) throw Error(ErrorCode::InvalidArgument, "p-values need at least 20 replicates");
    if (observed.size() != reps.cols) throw Error(ErrorCode::InvalidArgument, "observed curve length mismatch");
    std::vector<double> out(reps.cols);
    for (std::size_t c = 0; c < reps.cols; ++c) {
        std::size_t exceed = 0;
        for (std::size_t r = 0; r < reps.rows; ++r) {
            if (reps(r, c) >= observed[c]) ++exceed;
        }
        out[c] = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(reps.rows) + 1.0);
    }
    return out;
}

namespace detail {

inline constexpr std::uint64_t kBootstrapTag = 0xB0075;

inline bool droppable(ErrorCode code) {
    switch (code) {
        case ErrorCode::FitDiverged:
        case ErrorCode::DegenerateSeries:
        case ErrorCode::NumericalError:
        case ErrorCode::NoConvergence:
            return true;
        default:
            return false;
    }
}

/// Collects per-task rows where some tasks may fail, then compacts the survivors in index order.
struct RowCollector {
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<char> ok;
    std::vector<std::string> why;

    RowCollector(std::size_t count, std::size_t width) : cols(width), data(count * width), ok(count, 0), why(count) {}

    void put(std::size_t i, std::span<const double> values) {
        std::copy(values.begin(), values.end(), data.begin() + static_cast<std::ptrdiff_t>(i * cols));
        ok[i] = 1;
    }

    ReplicateMatrix compact(std::vector<std::size_t>& dropped, std::vector<std::string>& log) const {
        ReplicateMatrix m;
        m.cols = cols;
        for (std::size_t i = 0; i < ok.size(); ++i) {
            if (ok[i]) {
                m.data.insert(m.data.end(), data.begin() + static_cast<std::ptrdiff_t>(i * cols),
                              data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
                ++m.rows;
            } else {
                dropped.push_back(i);
                log.push_back("replicate " + std::to_string(i) + " dropped: " + why[i]);
            }
        }
        return m;
    }
};

inline void check_drop_rate(std::size_t dropped, std::size_t total, double max_rate) {
    if (static_cast<double>(dropped) > max_rate * static_cast<double>(total)) {
        throw Error(ErrorCode::DropRateExceeded, std::to_string(dropped) + " of " + std::to_string(total) +
                                                     " replicate fits failed, above the allowed rate");
    }
}

}  // namespace detail

/// Parametric bootstrap of the residual statistic curve:
///  1. fit the model and form the mean-corrected residual law (unit variance for GARCH);
///  2. replicate i draws a series of the observed length from the fitted model using stream
///     (seed, i) and resampled residuals;
///  3. refits the same model class and records the statistic of the refitted residuals, h = 1..H.
/// Replicates whose refit fails are dropped; more than max_drop_rate of them aborts the run.
[[nodiscard]] inline BootstrapRun parametric_bootstrap(std::span<const double> series, const ModelSpec& spec,
                                                       const BootstrapConfig& config) {
    if (config.replicates == 0) throw Error(ErrorCode::InvalidArgument, "replicates must be positive");
    if (config.max_lag == 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be positive");

    BootstrapRun run;
    run.n = series.size();
    run.fit = fit_model(series, spec);
    const Series& resid = fitted_residuals(run.fit);
    run.observed_curve = adcv_curve(resid, config.max_lag, config.measure);
    run.observed = select_statistic(run.observed_curve, config.statistic);

    const bool is_garch = spec.kind == ModelKind::Garch;
    const InnovationLaw law = make_empirical(resid, is_garch);
    const std::uint64_t base = config.seed.substream(detail::kBootstrapTag).base_seed;

    detail::RowCollector rows(config.replicates, config.max_lag);
    parallel_for(config.replicates, resolve_threads(config.threads), [&](std::size_t i) {
        const RngSeed stream{base, i};
        try {
            Series x_star;
            FittedModel refit;
            if (is_garch) {
                const auto& f = std::get<garch::GarchFit>(run.fit);
                x_star = garch::simulate(f.model, run.n, law, config.burn_in, stream);
                refit = garch::fit(x_star, spec.p, spec.q);
            } else {
                const auto& f = std::get<arma::ArmaFit>(run.fit);
                x_star = arma::simulate(f.model, run.n, law, config.burn_in, stream);
                refit = arma::fit(x_star, spec.p, spec.q);
            }
            const auto curve = adcv_curve(fitted_residuals(refit), config.max_lag, config.measure);
            rows.put(i, select_statistic(curve, config.statistic));
        } catch (const Error& e) {
            if (!detail::droppable(e.code())) throw;
            rows.why[i] = e.what();
        }
    });
    run.replicates = rows.compact(run.dropped, run.drop_log);
    detail::check_drop_rate(run.dropped.size(), config.replicates, config.max_drop_rate);
    return run;
}

[[nodiscard]] inline GofReport gof_test(std::span<const double> series, const ModelSpec& spec,
                                        const BootstrapConfig& config) {
    BootstrapRun run = parametric_bootstrap(series, spec, config);
    GofReport report;
    report.bands.lags = quantile_bands(run.replicates, config.lo, config.hi);
    const std::vector<double> p = pvalues(run.replicates, run.observed);
    const double nd = static_cast<double>(run.n);
    report.reject.resize(config.max_lag);
    for (std::size_t h = 0; h < config.max_lag; ++h) {
        auto& band = report.bands.lags[h];
        band.observed = run.observed[h];
        band.p_value = p[h];
        band.observed_n_adcv = nd * run.observed_curve[h].t_stat;
        report.reject[h] = band.observed > band.hi;
    }
    report.bands.replicates = run.replicates.rows;
    report.bands.n = run.n;
    report.bands.model = describe(spec);

    report.max_statistic = *std::max_element(run.observed.begin(), run.observed.end());
    std::size_t exceed = 0;
    for (std::size_t r = 0; r < run.replicates.rows; ++r) {
        const auto row = run.replicates.row(r);
        if (*std::max_element(row.begin(), row.end()) >= report.max_statistic) ++exceed;
    }
    report.max_statistic_p_value =
        (1.0 + static_cast<double>(exceed)) / (static_cast<double>(run.replicates.rows) + 1.0);

    report.fit = std::move(run.fit);
    report.replicates = std::move(run.replicates);
    report.dropped = std::move(run.dropped);
    report.drop_log = std::move(run.drop_log);
    return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo band studies: iid innovations vs. estimated residuals vs. bootstrap.

struct ArmaTruth {
    arma::ArmaModel model;
    InnovationLaw innovations = NormalLaw{};
};

struct GarchTruth {
    garch::GarchModel model;
    InnovationLaw innovations = NormalLaw{};
};

/// X_t = phi X_{t-1} + Z_t with |phi| > 1 and t(df) noise; fitted with a causal model.
struct NoncausalAr1Truth {
    double phi = 1.67;
    double df = 2.5;
};

using StudyTruth = std::variant<ArmaTruth, GarchTruth, NoncausalAr1Truth>;

struct BandPanel {
    std::vector<LagBand> bands;  // lo/hi per lag
    ReplicateMatrix values;
    std::vector<std::size_t> dropped;
};

struct BandStudy {
    BandPanel iid;         // statistic of fresh iid innovation samples
    BandPanel residuals;   // statistic of refitted residuals, independent realizations
    BandPanel bootstrap;   // parametric bootstrap from a single realization
    std::size_t n = 0;
};

namespace detail {

inline constexpr std::uint64_t kIidTag = 0xA;
inline constexpr std::uint64_t kSimTag = 0xB;
inline constexpr std::uint64_t kRealizationTag = 0xC;

inline Series simulate_truth(const StudyTruth& truth, std::size_t n, std::size_t burn_in, RngSeed seed) {
    if (const auto* a = std::get_if<ArmaTruth>(&truth)) return arma::simulate(a->model, n, a->innovations, burn_in, seed);
    if (const auto* g = std::get_if<GarchTruth>(&truth)) return garch::simulate(g->model, n, g->innovations, burn_in, seed);
    const auto& nc = std::get<NoncausalAr1Truth>(truth);
    return arma::simulate_noncausal_ar1(nc.phi, n, nc.df, burn_in, seed);
}

inline Series draw_truth_innovations(const StudyTruth& truth, std::size_t n, RngSeed seed) {
    Rng rng(seed);
    if (const auto* a = std::get_if<ArmaTruth>(&truth)) return Series(draw_innovations(a->innovations, n, rng));
    if (const auto* g = std::get_if<GarchTruth>(&truth)) return Series(draw_innovations(g->innovations, n, rng));
    return Series(draw_innovations(StudentTLaw{std::get<NoncausalAr1Truth>(truth).df}, n, rng));
}

}  // namespace detail

/// Three band sets for one data-generating process: (a) iid innovations over `reps`
/// samples, (b) residuals of `fit_spec` refitted to `reps` independent realizations, and
/// (c) a parametric bootstrap with config.replicates draws from one realization.
[[nodiscard]] inline BandStudy mc_band_study(const StudyTruth& truth, const ModelSpec& fit_spec, std::size_t n,
                                             std::size_t reps, const BootstrapConfig& config) {
    if (reps < 100) throw Error(ErrorCode::InvalidArgument, "band study needs at least 100 repetitions");
    const unsigned threads = resolve_threads(config.threads);
    const std::size_t H = config.max_lag;
    BandStudy study;
    study.n = n;

    {
        const std::uint64_t base = config.seed.substream(detail::kIidTag).base_seed;
        detail::RowCollector rows(reps, H);
        parallel_for(reps, threads, [&](std::size_t r) {
            const Series z = detail::draw_truth_innovations(truth, n, RngSeed{base, r});
            rows.put(r, select_statistic(adcv_curve(z, H, config.measure), config.statistic));
        });
        std::vector<std::string> unused;
        study.iid.values = rows.compact(study.iid.dropped, unused);
        study.iid.bands = quantile_bands(study.iid.values, config.lo, config.hi);
    }
    {
        const std::uint64_t base = config.seed.substream(detail::kSimTag).base_seed;
        detail::RowCollector rows(reps, H);
        parallel_for(reps, threads, [&](std::size_t r) {
            try {
                const Series x = detail::simulate_truth(truth, n, config.burn_in, RngSeed{base, r});
                const FittedModel f = fit_model(x, fit_spec);
                rows.put(r, select_statistic(adcv_curve(fitted_residuals(f), H, config.measure), config.statistic));
            } catch (const Error& e) {
                if (!detail::droppable(e.code())) throw;
                rows.why[r] = e.what();
            }
        });
        std::vector<std::string> unused;
        study.residuals.values = rows.compact(study.residuals.dropped, unused);
        detail::check_drop_rate(study.residuals.dropped.size(), reps, config.max_drop_rate);
        study.residuals.bands = quantile_bands(study.residuals.values, config.lo, config.hi);
    }
    {
        const RngSeed realization{config.seed.substream(detail::kRealizationTag).base_seed, 0};
        const Series x = detail::simulate_truth(truth, n, config.burn_in, realization);
        BootstrapRun run = parametric_bootstrap(x, fit_spec, config);
        study.bootstrap.bands = quantile_bands(run.replicates, config.lo, config.hi);
        for (std::size_t h = 0; h < H; ++h) study.bootstrap.bands[h].observed = run.observed[h];
        study.bootstrap.values = std::move(run.replicates);
        study.bootstrap.dropped = std::move(run.dropped);
    }
    return study;
}

}  // namespace tsgof::gof
