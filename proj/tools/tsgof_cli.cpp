#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsgof/tsgof.hpp"

namespace {

using nlohmann::ordered_json;
using namespace tsgof;

enum Exit : int {
    kOk = 0,
    kUsage = 2,
    kModel = 3,
    kFit = 4,
    kIo = 5,
    kDegenerate = 6,
    kDropRate = 7,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::LagTooLarge:
            return kUsage;
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidModel:
        case ErrorCode::NotCausal:
        case ErrorCode::NotInvertible:
        case ErrorCode::NotNoncausal:
        case ErrorCode::UnsupportedOrder:
            return kModel;
        case ErrorCode::FitDiverged:
        case ErrorCode::ReplicateFitDiverged:
        case ErrorCode::NoConvergence:
        case ErrorCode::MaxIterExceeded:
        case ErrorCode::NonFiniteObjective:
            return kFit;
        case ErrorCode::DegenerateSeries:
        case ErrorCode::NumericalError:
            return kDegenerate;
        case ErrorCode::DropRateExceeded:
            return kDropRate;
    }
    return kModel;
}

// ---------------------------------------------------------------------------
// Formatting

std::string shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        double v = 0.0;
        const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || r.ec != std::errc{} || r.ptr != item.data() + item.size() || !std::isfinite(v)) {
            throw UsageError(std::string("invalid number in ") + flag + ": '" + item + "'");
        }
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

std::pair<double, double> parse_level(const std::string& text) {
    const auto v = parse_list(text, "--level");
    if (v.size() != 2 || !(0.0 < v[0] && v[0] < v[1] && v[1] < 1.0)) {
        throw UsageError("--level must be two values lo,hi with 0 < lo < hi < 1");
    }
    return {v[0], v[1]};
}

// ---------------------------------------------------------------------------
// Data I/O

Series read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const char* b = line.data() + first;
        const char* e = line.data() + line.size();
        double v = 0.0;
        const auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc{} || r.ptr != e) {
            if (values.empty() && line_no == 1) continue;  // header
            throw IoError(path + ":" + std::to_string(line_no) + ": not a number: '" + line + "'");
        }
        if (!std::isfinite(v)) throw IoError(path + ":" + std::to_string(line_no) + ": non-finite value");
        values.push_back(v);
    }
    if (values.empty()) throw IoError("data file '" + path + "' contains no observations");
    return Series(std::move(values));
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw IoError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
};

// ---------------------------------------------------------------------------
// Options

struct ModelFlags {
    std::string model;
    std::string phi, theta, alpha, beta;
    double sigma2 = 1.0;
    double alpha0 = 0.0;
    double df = 2.5;
    std::optional<std::size_t> p, q;
};

struct RunFlags {
    std::string data;
    std::string output;
    std::string format = "csv";
    std::size_t n = 0;
    std::size_t max_lag = 20;
    std::size_t replicates = 500;
    std::size_t reps = 300;
    std::size_t burn_in = 500;
    double bandwidth = 0.5;
    std::string level = "0.05,0.95";
    std::string statistic = "adcf";
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

void add_truth_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--phi", m.phi, "AR coefficients, comma separated");
    cmd->add_option("--theta", m.theta, "MA coefficients, comma separated");
    cmd->add_option("--sigma2", m.sigma2, "ARMA innovation variance")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha0", m.alpha0, "GARCH constant");
    cmd->add_option("--alpha", m.alpha, "GARCH ARCH coefficients, comma separated");
    cmd->add_option("--beta", m.beta, "GARCH GARCH coefficients, comma separated");
    cmd->add_option("--df", m.df, "Student t degrees of freedom (noncausal-ar1)")->check(CLI::PositiveNumber);
}

void add_order_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--p", m.p, "AR order (ARMA) or ARCH order (GARCH)");
    cmd->add_option("--q", m.q, "MA order (ARMA) or GARCH order (GARCH)");
}

void add_bootstrap_flags(CLI::App* cmd, RunFlags& r) {
    cmd->add_option("--lags,-H", r.max_lag, "largest lag H")->check(CLI::PositiveNumber);
    cmd->add_option("--replicates,-B", r.replicates, "bootstrap replicates B")->check(CLI::PositiveNumber);
    cmd->add_option("--sigma", r.bandwidth, "Gaussian weight bandwidth")->check(CLI::PositiveNumber);
    cmd->add_option("--level", r.level, "quantile pair lo,hi");
    cmd->add_option("--statistic", r.statistic, "adcf or adcv")->check(CLI::IsMember({"adcf", "adcv"}));
    cmd->add_option("--seed", r.seed, "random seed");
    cmd->add_option("--burn-in", r.burn_in, "burn-in length for simulated series");
    cmd->add_option("--threads", r.threads, "worker threads (0: ADCV_THREADS or all cores)");
    cmd->add_option("--format", r.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output,-o", r.output, "output path (default stdout)");
}

// Normalized model name: "arma", "garch" or "noncausal-ar1".
std::string model_kind(const std::string& name) {
    if (name == "arma" || name == "ar") return "arma";
    if (name == "garch") return "garch";
    if (name == "noncausal-ar1") return "noncausal-ar1";
    throw UsageError("unknown model '" + name + "' (expected arma, ar, garch or noncausal-ar1)");
}

arma::ArmaModel arma_from_flags(const ModelFlags& m) {
    arma::ArmaModel model{parse_list(m.phi, "--phi"), parse_list(m.theta, "--theta"), m.sigma2};
    if (m.model == "ar" && !model.theta.empty()) throw UsageError("--model ar takes no --theta");
    return model;
}

garch::GarchModel garch_from_flags(const ModelFlags& m) {
    if (m.alpha0 == 0.0 && m.alpha.empty() && m.beta.empty()) {
        throw UsageError("--model garch requires --alpha0, --alpha and --beta");
    }
    return garch::GarchModel{m.alpha0, parse_list(m.alpha, "--alpha"), parse_list(m.beta, "--beta")};
}

void require_valid(const garch::GarchModel& model) {
    const auto v = garch::validate(model);
    if (!v.valid) throw Error(ErrorCode::InvalidModel, "invalid GARCH model: " + v.reasons.front());
}

gof::StudyTruth truth_from_flags(const ModelFlags& m) {
    const std::string kind = model_kind(m.model);
    if (kind == "arma") {
        const auto model = arma_from_flags(m);
        return gof::ArmaTruth{model, NormalLaw{std::sqrt(model.sigma2)}};
    }
    if (kind == "garch") {
        const auto model = garch_from_flags(m);
        require_valid(model);
        return gof::GarchTruth{model, NormalLaw{}};
    }
    const auto phi = parse_list(m.phi, "--phi");
    if (phi.size() != 1) throw UsageError("--model noncausal-ar1 requires a single --phi");
    return gof::NoncausalAr1Truth{phi[0], m.df};
}

gof::ModelSpec fit_spec(const ModelFlags& m) {
    const std::string kind = model_kind(m.model);
    if (kind == "noncausal-ar1") throw UsageError("noncausal-ar1 cannot be fitted; use --model ar --p 1");
    gof::ModelSpec spec;
    spec.kind = kind == "garch" ? gof::ModelKind::Garch : gof::ModelKind::Arma;
    if (!m.p) throw UsageError("--p is required");
    spec.p = *m.p;
    spec.q = m.q.value_or(0);
    if (m.model == "ar" && spec.q != 0) throw UsageError("--model ar takes --q 0");
    return spec;
}

gof::BootstrapConfig bootstrap_config(const RunFlags& r) {
    gof::BootstrapConfig c;
    c.replicates = r.replicates;
    c.max_lag = r.max_lag;
    std::tie(c.lo, c.hi) = parse_level(r.level);
    c.measure = WeightMeasure(r.bandwidth, r.bandwidth);
    c.seed = RngSeed{r.seed, 0};
    c.statistic = r.statistic == "adcv" ? gof::Statistic::Adcv : gof::Statistic::Adcf;
    c.burn_in = r.burn_in;
    c.threads = r.threads;
    return c;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const ModelFlags& m, const RunFlags& r) {
    const gof::StudyTruth truth = truth_from_flags(m);
    const RngSeed seed{r.seed, 0};
    Series x;
    if (const auto* a = std::get_if<gof::ArmaTruth>(&truth)) {
        x = arma::simulate(a->model, r.n, a->innovations, r.burn_in, seed);
    } else if (const auto* g = std::get_if<gof::GarchTruth>(&truth)) {
        x = garch::simulate(g->model, r.n, g->innovations, r.burn_in, seed);
    } else {
        const auto& nc = std::get<gof::NoncausalAr1Truth>(truth);
        x = arma::simulate_noncausal_ar1(nc.phi, r.n, nc.df, r.burn_in, seed);
    }
    Output out(r.output);
    out.stream() << "x\n";
    for (double v : x.view()) out.stream() << shortest(v) << '\n';
    out.finish();
    std::cerr << "seed " << r.seed << '\n';
    return kOk;
}

int cmd_fit(const ModelFlags& m, const RunFlags& r) {
    const gof::ModelSpec spec = fit_spec(m);
    const Series x = read_series(r.data);
    const gof::FittedModel fitted = gof::fit_model(x, spec);
    ordered_json j;
    j["model_kind"] = spec.kind == gof::ModelKind::Arma ? "arma" : "garch";
    j["orders"] = {{"p", spec.p}, {"q", spec.q}};
    if (const auto* a = std::get_if<arma::ArmaFit>(&fitted)) {
        j["coefficients"] = {{"phi", a->model.phi}, {"theta", a->model.theta}};
        j["sigma2"] = a->model.sigma2;
        j["mean"] = a->mean;
        j["converged"] = a->converged;
        j["loglik"] = a->loglik;
    } else {
        const auto& g = std::get<garch::GarchFit>(fitted);
        j["coefficients"] = {{"alpha", g.model.alpha}, {"beta", g.model.beta}};
        j["alpha0"] = g.model.alpha0;
        j["converged"] = g.converged;
        j["loglik"] = g.loglik;
    }
    j["n"] = x.size();
    Output out(r.output);
    out.stream() << j.dump(2) << '\n';
    out.finish();
    return kOk;
}

int cmd_adcf(const RunFlags& r) {
    const Series x = read_series(r.data);
    const auto curve = adcv_curve(x, r.max_lag, WeightMeasure(r.bandwidth, r.bandwidth));
    Output out(r.output);
    if (r.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& c : curve) {
            rows.push_back({{"lag", c.lag}, {"adcv", c.t_stat}, {"adcf", c.r_stat}, {"n_pairs", c.n_pairs}});
        }
        out.stream() << ordered_json{{"sigma", r.bandwidth}, {"n", x.size()}, {"lags", rows}}.dump(2) << '\n';
    } else {
        out.stream() << "lag,adcv,adcf,n_pairs\n";
        for (const auto& c : curve) {
            out.stream() << c.lag << ',' << sig12(c.t_stat) << ',' << sig12(c.r_stat) << ',' << c.n_pairs << '\n';
        }
    }
    out.finish();
    return kOk;
}

ordered_json band_json(const gof::LagBand& b, bool reject) {
    return {{"lag", b.lag}, {"lo", b.lo},           {"hi", b.hi},
            {"observed", b.observed}, {"p_value", b.p_value}, {"reject", reject}};
}

void write_band_row(std::ostream& os, const gof::LagBand& b, bool reject) {
    os << b.lag << ',' << sig12(b.lo) << ',' << sig12(b.hi) << ',' << sig12(b.observed) << ',' << sig12(b.p_value)
       << ',' << (reject ? 1 : 0);
}

int cmd_gof(const ModelFlags& m, const RunFlags& r) {
    const gof::ModelSpec spec = fit_spec(m);
    const gof::BootstrapConfig config = bootstrap_config(r);
    const Series x = read_series(r.data);
    const gof::GofReport report = gof::gof_test(x, spec, config);
    for (const auto& line : report.drop_log) std::cerr << line << '\n';

    Output out(r.output);
    if (r.format == "json") {
        ordered_json lags = ordered_json::array();
        for (std::size_t h = 0; h < report.bands.lags.size(); ++h) {
            lags.push_back(band_json(report.bands.lags[h], report.reject[h]));
        }
        ordered_json j{{"model", report.bands.model},
                       {"n", report.bands.n},
                       {"replicates", report.bands.replicates},
                       {"statistic", r.statistic},
                       {"sigma", r.bandwidth},
                       {"seed", r.seed},
                       {"lags", lags},
                       {"max_statistic", report.max_statistic},
                       {"max_statistic_p_value", report.max_statistic_p_value},
                       {"dropped", report.dropped}};
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << "lag,lo,hi,observed,p_value,reject\n";
        for (std::size_t h = 0; h < report.bands.lags.size(); ++h) {
            write_band_row(out.stream(), report.bands.lags[h], report.reject[h]);
            out.stream() << '\n';
        }
    }
    out.finish();
    return kOk;
}

// Monte Carlo band study for a simulated truth: iid, residual and bootstrap panels.
int cmd_bands(const ModelFlags& truth_flags, const ModelFlags& fit_flags, const RunFlags& r) {
    const gof::StudyTruth truth = truth_from_flags(truth_flags);
    ModelFlags fit = fit_flags;
    if (fit.model.empty()) fit.model = truth_flags.model == "noncausal-ar1" ? "ar" : truth_flags.model;
    if (!fit.p) {
        if (truth_flags.model == "noncausal-ar1") {
            fit.p = 1;
        } else if (model_kind(truth_flags.model) == "garch") {
            fit.p = parse_list(truth_flags.alpha, "--alpha").size();
            fit.q = parse_list(truth_flags.beta, "--beta").size();
        } else {
            fit.p = parse_list(truth_flags.phi, "--phi").size();
            fit.q = parse_list(truth_flags.theta, "--theta").size();
        }
    }
    const gof::ModelSpec spec = fit_spec(fit);
    const gof::BootstrapConfig config = bootstrap_config(r);
    const gof::BandStudy study = gof::mc_band_study(truth, spec, r.n, r.reps, config);

    const auto& boot = study.bootstrap.bands;
    std::vector<double> observed(boot.size());
    for (std::size_t h = 0; h < boot.size(); ++h) observed[h] = boot[h].observed;
    const auto p = gof::pvalues(study.bootstrap.values, observed);

    struct Panel {
        const char* name;
        const gof::BandPanel* data;
    };
    const Panel panels[] = {{"iid", &study.iid}, {"residuals", &study.residuals}, {"bootstrap", &study.bootstrap}};

    Output out(r.output);
    if (r.format == "json") {
        ordered_json j{{"model", gof::describe(spec)}, {"n", r.n}, {"reps", r.reps}, {"replicates", r.replicates},
                       {"statistic", r.statistic}, {"sigma", r.bandwidth}, {"seed", r.seed}};
        for (const auto& panel : panels) {
            ordered_json rows = ordered_json::array();
            for (std::size_t h = 0; h < panel.data->bands.size(); ++h) {
                const auto& b = panel.data->bands[h];
                if (panel.data == &study.bootstrap) {
                    gof::LagBand full = b;
                    full.p_value = p[h];
                    rows.push_back(band_json(full, b.observed > b.hi));
                } else {
                    rows.push_back({{"lag", b.lag}, {"lo", b.lo}, {"hi", b.hi}});
                }
            }
            j[panel.name] = {{"samples", panel.data->values.rows}, {"lags", rows}};
        }
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << "panel,lag,lo,hi,observed,p_value,reject\n";
        for (const auto& panel : panels) {
            for (std::size_t h = 0; h < panel.data->bands.size(); ++h) {
                const auto& b = panel.data->bands[h];
                out.stream() << panel.name << ',';
                if (panel.data == &study.bootstrap) {
                    gof::LagBand full = b;
                    full.p_value = p[h];
                    write_band_row(out.stream(), full, b.observed > b.hi);
                } else {
                    out.stream() << b.lag << ',' << sig12(b.lo) << ',' << sig12(b.hi) << ",,,";
                }
                out.stream() << '\n';
            }
        }
    }
    out.finish();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residual goodness-of-fit tests for ARMA and GARCH models based on auto-distance correlation"};
    app.require_subcommand(1);

    ModelFlags model;
    ModelFlags fit_model;
    RunFlags run;

    auto* sim = app.add_subcommand("simulate", "simulate a series and write it as single-column CSV");
    sim->add_option("--model", model.model, "arma, ar, garch or noncausal-ar1")->required();
    add_truth_flags(sim, model);
    sim->add_option("--n", run.n, "series length")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", run.seed, "random seed");
    sim->add_option("--burn-in", run.burn_in, "burn-in (ARMA/GARCH) or look-ahead horizon (noncausal-ar1)");
    sim->add_option("--output,-o", run.output, "output path (default stdout)");

    auto* fit = app.add_subcommand("fit", "fit an ARMA or GARCH model and print a JSON summary");
    fit->add_option("--model", model.model, "arma, ar or garch")->required();
    add_order_flags(fit, model);
    fit->add_option("--data", run.data, "single-column CSV")->required();
    fit->add_option("--output,-o", run.output, "output path (default stdout)");

    auto* adcf = app.add_subcommand("adcf", "auto-distance covariance and correlation for lags 1..H");
    adcf->add_option("--data", run.data, "single-column CSV")->required();
    adcf->add_option("--lags,-H", run.max_lag, "largest lag H")->check(CLI::PositiveNumber);
    adcf->add_option("--sigma", run.bandwidth, "Gaussian weight bandwidth")->check(CLI::PositiveNumber);
    adcf->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    adcf->add_option("--output,-o", run.output, "output path (default stdout)");

    auto* gof_cmd = app.add_subcommand("gof", "parametric bootstrap goodness-of-fit test on residual ADCF");
    gof_cmd->add_option("--model", model.model, "arma, ar or garch")->required();
    add_order_flags(gof_cmd, model);
    gof_cmd->add_option("--data", run.data, "single-column CSV")->required();
    add_bootstrap_flags(gof_cmd, run);

    auto* bands = app.add_subcommand("bands", "Monte Carlo quantile bands: iid, residual and bootstrap panels");
    bands->add_option("--model", model.model, "data-generating model: arma, ar, garch or noncausal-ar1")->required();
    add_truth_flags(bands, model);
    bands->add_option("--fit", fit_model.model, "fitted model class (default: same as --model, ar for noncausal-ar1)");
    add_order_flags(bands, fit_model);
    bands->add_option("--n", run.n, "series length")->required()->check(CLI::PositiveNumber);
    bands->add_option("--reps", run.reps, "Monte Carlo repetitions for the iid and residual panels")
        ->check(CLI::Range(100, 1000000));
    add_bootstrap_flags(bands, run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*sim) {
            model_kind(model.model);
            return cmd_simulate(model, run);
        }
        if (*fit) return cmd_fit(model, run);
        if (*adcf) return cmd_adcf(run);
        if (*gof_cmd) return cmd_gof(model, run);
        if (*bands) return cmd_bands(model, fit_model, run);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code(e.code());
    }
    return kUsage;
}
