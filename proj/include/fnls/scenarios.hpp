#pragma once

#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fnls/blowup.hpp"
#include "fnls/initial_data.hpp"
#include "fnls/integrator.hpp"

namespace fnls {

using json = nlohmann::json;

// A named run: initial data family + simulation parameters + the checks the
// run is expected to satisfy.
struct ExperimentSpec {
    std::string name = "experiment";
    int dim = 1;
    std::size_t n = 2048;
    double box = 16.0;
    SimParams sim;
    InitialData initial;
    std::vector<json> expectations;
    long checkpoint_every = 0;  // steps; 0 = final checkpoint only (when enabled)
    double groundstate_tol = 1e-10;

    std::shared_ptr<const Grid> make_grid_for() const {
        return std::make_shared<const Grid>(dim, n, box);
    }
};

inline ExperimentSpec experiment_from_json(const json& j) {
    ExperimentSpec e;
    e.name = j.at("name").get<std::string>();
    e.dim = j.at("dim").get<int>();
    e.n = j.at("n").get<std::size_t>();
    e.box = j.at("box").get<double>();
    e.sim.d = e.dim;
    e.sim.s = j.at("s").get<double>();
    e.sim.a = j.at("a").get<double>();
    e.sim.dt0 = j.at("dt0").get<double>();
    const auto rule = j.value("dt_rule", std::string("fixed"));
    if (rule == "fixed")
        e.sim.dt_rule = DtRule::fixed;
    else if (rule == "adaptive")
        e.sim.dt_rule = DtRule::adaptive;
    else
        throw domain_error("dt_rule must be 'fixed' or 'adaptive'");
    e.sim.cfl_c = j.value("cfl_c", 0.05);
    e.sim.t_end = j.at("t_end").get<double>();
    e.sim.grad_stop = j.value("grad_stop", 1e9);
    e.sim.sample_every = j.value("sample_every", 10);
    e.sim.tail_threshold = j.value("tail_threshold", 1e-6);
    e.groundstate_tol = j.value("groundstate_tol", 1e-10);
    e.checkpoint_every = j.value("checkpoint_every", 0L);

    const json& init = j.at("initial");
    e.initial.kind = initial_kind_from_string(init.at("kind").get<std::string>());
    e.initial.delta = init.value("delta", 0.0);
    e.initial.t0 = init.value("t0", -1.0);
    e.initial.amplitude = init.value("amplitude", 1.0);
    e.initial.width = init.value("width", 1.0);
    if (init.contains("velocity")) {
        const auto v = init.at("velocity").get<std::vector<double>>();
        for (std::size_t a = 0; a < v.size() && a < 4; ++a) e.initial.velocity[a] = v[a];
    }
    e.initial.noise_amp = init.value("noise_amp", 0.0);
    e.initial.noise_seed = init.value("noise_seed", std::uint64_t{0});
    e.initial.groundstate_tol = e.groundstate_tol;

    if (j.contains("expectations"))
        for (const auto& x : j.at("expectations")) e.expectations.push_back(x);
    return e;
}

inline json experiment_to_json(const ExperimentSpec& e) {
    json init{{"kind", to_string(e.initial.kind)}};
    init["delta"] = e.initial.delta;
    init["t0"] = e.initial.t0;
    init["amplitude"] = e.initial.amplitude;
    init["width"] = e.initial.width;
    init["velocity"] = std::vector<double>(e.initial.velocity, e.initial.velocity + e.dim);
    if (e.initial.noise_amp != 0.0) {
        init["noise_amp"] = e.initial.noise_amp;
        init["noise_seed"] = e.initial.noise_seed;
    }
    json j{{"name", e.name},
           {"dim", e.dim},
           {"n", e.n},
           {"box", e.box},
           {"s", e.sim.s},
           {"a", e.sim.a},
           {"dt0", e.sim.dt0},
           {"dt_rule", e.sim.dt_rule == DtRule::fixed ? "fixed" : "adaptive"},
           {"cfl_c", e.sim.cfl_c},
           {"t_end", e.sim.t_end},
           {"grad_stop", e.sim.grad_stop},
           {"sample_every", e.sim.sample_every},
           {"tail_threshold", e.sim.tail_threshold},
           {"groundstate_tol", e.groundstate_tol},
           {"initial", init}};
    if (!e.expectations.empty()) j["expectations"] = e.expectations;
    return j;
}

struct ExpectationResult {
    std::string label;
    bool pass = false;
    double observed = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    RunOutcome outcome = RunOutcome::completed;
    std::string reason;
    Trace trace;
    double initial_l2 = 0.0, requested_l2 = 0.0;
    double mass_residual = std::numeric_limits<double>::quiet_NaN();
    double energy_residual = std::numeric_limits<double>::quiet_NaN();
    double momentum_residual = std::numeric_limits<double>::quiet_NaN();
    std::optional<BlowupReport> report;
    std::vector<ExpectationResult> expectations;
    std::shared_ptr<const ComplexField> final_field;
    double final_t = 0.0;

    bool all_pass() const {
        for (const auto& x : expectations)
            if (!x.pass) return false;
        return true;
    }
};

// Fitted prefactors of the blow-up growth bounds
//   |E(t)| <= C_E log(1/lambda) lambda^{-2s},
//   |P(t)| <= C_P log(1/lambda) lambda^{-2s/(s+1)},
// over the resolved window. Requires a detected blow-up.
inline std::pair<double, double> check_growth_bounds(const Trace& trace, double s,
                                                     double tail_threshold = 1e-6) {
    if (!detect_blowup(trace, 1e6, tail_threshold).detected)
        throw not_applicable_error("growth-bound check needs a detected blow-up");
    double ce = 0.0, cp = 0.0;
    for (const auto& r : trace) {
        if (r.tail_fraction > tail_threshold || !(r.lambda > 0.0) || !std::isfinite(r.lambda))
            continue;
        const double lg = std::max(1.0, std::log(1.0 / r.lambda));
        double pnorm = 0.0;
        for (int j = 0; j < r.dim; ++j) pnorm += r.momentum[j] * r.momentum[j];
        pnorm = std::sqrt(pnorm);
        ce = std::max(ce, std::abs(r.energy) / (lg * std::pow(r.lambda, -2.0 * s)));
        cp = std::max(cp, pnorm / (lg * std::pow(r.lambda, -2.0 * s / (s + 1.0))));
    }
    return {ce, cp};
}

// Regression slope of log(|E| / (log(1/lambda) lambda^{-2s})) against
// log(1/lambda) over the focused, resolved part of the trace. A slope near
// zero means the bound's prefactor shows no growth trend.
inline double growth_bound_trend(const Trace& trace, double s, double tail_threshold = 1e-6) {
    std::vector<double> x, y;
    for (const auto& r : trace) {
        if (r.tail_fraction > tail_threshold || !(r.lambda > 0.0) || !std::isfinite(r.lambda))
            continue;
        if (r.lambda >= 1.0) continue;  // only the focused regime
        const double lg = std::max(1.0, std::log(1.0 / r.lambda));
        const double ratio = std::abs(r.energy) / (lg * std::pow(r.lambda, -2.0 * s));
        if (!(ratio > 0.0)) continue;
        x.push_back(std::log(1.0 / r.lambda));
        y.push_back(std::log(ratio));
    }
    if (x.size() < 4) throw not_applicable_error("growth-bound trend needs a focused window");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline double trace_min_grad(const Trace& tr) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : tr) m = std::min(m, r.grad_norm_sq);
    return m;
}

// Power-law exponent against a KNOWN blow-up time over samples t >= t_from.
inline double alpha_with_known_tstar(const Trace& tr, double t_star, double t_from,
                                     double tail_threshold) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto& r : tr) {
        if (r.t < t_from || r.tail_fraction > tail_threshold || !(r.grad_norm_sq > 0.0)) continue;
        if (!(t_star - r.t > 0.0)) continue;
        const double x = std::log(t_star - r.t);
        const double y = 0.5 * std::log(r.grad_norm_sq);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
    }
    if (n < 4) throw not_applicable_error("not enough samples for the fixed-T* exponent fit");
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

struct RunArtifacts {
    std::string out_dir;  // empty: no files written
    bool checkpoints = false;
};

inline ExperimentResult run_experiment(const ExperimentSpec& spec, const RunArtifacts& art = {}) {
    ExperimentResult res;
    res.name = spec.name;

    auto grid = spec.make_grid_for();
    auto& table = GroundStateTable::instance();
    const auto canonical = table.ensure_canonical(spec.dim);

    InitialData init = spec.initial;
    init.grid = grid;
    init.groundstate_tol = spec.groundstate_tol;
    const InitialDataResult u0 = make_initial_data(init);
    res.initial_l2 = u0.actual_l2;
    res.requested_l2 = u0.requested_l2;

    DiagnosticsContext ctx{spec.dim, spec.sim.s, spec.sim.a, canonical->grad_norm_sq};

    std::unique_ptr<TraceSink> sink;
    if (!art.out_dir.empty())
        sink = std::make_unique<CsvTraceSink>(art.out_dir + "/" + spec.name + "_diagnostics.csv",
                                              spec.dim);
    else
        sink = std::make_unique<TraceSink>();

    CheckpointOptions copts;
    if (!art.out_dir.empty() && art.checkpoints) {
        copts.dir = art.out_dir;
        copts.tag = spec.name;
        copts.every_steps = spec.checkpoint_every;
    }

    EvolveResult ev = evolve(u0.field, spec.sim, ctx, *sink, copts);
    res.outcome = ev.outcome;
    res.reason = ev.detail;
    res.trace = sink->trace();
    res.final_field = std::make_shared<const ComplexField>(ev.state.field);
    res.final_t = ev.state.t;

    if (res.trace.size() >= 2) {
        res.mass_residual = mass_identity_residual(res.trace);
        res.energy_residual = energy_identity_residual(res.trace);
        res.momentum_residual = momentum_identity_residual(res.trace);
    }

    const auto detection = detect_blowup(res.trace, 1e6, spec.sim.tail_threshold);
    if (detection.detected) {
        // fit T* from deep in the focusing phase (gradient 100x off its floor)
        // where the power law is clean; fall back to 5x for short traces
        const double gmin = detail::trace_min_grad(res.trace);
        double t_lo = res.trace.front().t;
        for (double growth : {1e4, 25.0}) {
            double cand = res.trace.front().t;
            std::size_t beyond = 0;
            for (const auto& r : res.trace) {
                if (r.grad_norm_sq >= growth * gmin) {
                    if (beyond == 0) cand = r.t;
                    if (r.tail_fraction <= spec.sim.tail_threshold) ++beyond;
                }
            }
            if (beyond >= 20) {
                t_lo = cand;
                break;
            }
        }
        try {
            const double t_star = estimate_t_star(res.trace, t_lo, spec.sim.tail_threshold);
            RateFitContext rctx;
            rctx.s = spec.sim.s;
            rctx.tail_threshold = spec.sim.tail_threshold;
            rctx.subcritical_mass = res.initial_l2 <= critical_mass(spec.dim) * (1.0 + 1e-12);
            res.report = fit_rate_models(res.trace, t_star, rctx);
        } catch (const std::exception&) {
            BlowupReport rep;
            rep.detected = true;
            rep.t_star = std::numeric_limits<double>::quiet_NaN();
            res.report = rep;
        }
    }

    // expectations
    for (const auto& x : spec.expectations) {
        ExpectationResult er;
        const std::string check = x.at("check").get<std::string>();
        er.label = check;
        try {
            if (check == "outcome") {
                const std::string want = x.at("equals").get<std::string>();
                er.detail = std::string(to_string(res.outcome)) + " vs " + want;
                er.pass = want == to_string(res.outcome);
            } else if (check == "mass_identity") {
                er.limit = x.at("max").get<double>();
                er.observed = res.mass_residual;
                er.pass = res.mass_residual <= er.limit;
            } else if (check == "energy_identity") {
                er.limit = x.at("max").get<double>();
                er.observed = res.energy_residual;
                er.pass = res.energy_residual <= er.limit;
            } else if (check == "momentum_identity") {
                er.limit = x.at("max").get<double>();
                er.observed = res.momentum_residual;
                er.pass = res.momentum_residual <= er.limit;
            } else if (check == "mass_drift_per_time") {
                er.limit = x.at("max").get<double>();
                const double m0 = res.trace.front().mass_sq;
                double worst = 0.0;
                for (const auto& r : res.trace)
                    if (r.t > 0.0) worst = std::max(worst, std::abs(r.mass_sq - m0) / (m0 * r.t));
                er.observed = worst;
                er.pass = worst <= er.limit;
            } else if (check == "energy_drift_per_time") {
                er.limit = x.at("max").get<double>();
                const double e0 = res.trace.front().energy;
                double worst = 0.0;
                for (const auto& r : res.trace)
                    if (r.t > 0.0) worst = std::max(worst, std::abs(r.energy - e0) / r.t);
                er.observed = worst;
                er.pass = worst <= er.limit;
            } else if (check == "momentum_drift_per_time") {
                er.limit = x.at("max").get<double>();
                const double m0 = res.trace.front().mass_sq;
                double worst = 0.0;
                for (int j = 0; j < spec.dim; ++j) {
                    const double p0 = res.trace.front().momentum[j];
                    const double denom = std::max(std::abs(p0), 1e-3 * m0);
                    for (const auto& r : res.trace)
                        if (r.t > 0.0)
                            worst = std::max(worst,
                                             std::abs(r.momentum[j] - p0) / (denom * r.t));
                }
                er.observed = worst;
                er.pass = worst <= er.limit;
            } else if (check == "shape_error_soliton") {
                // final state against the phase-rotated ground state e^{i t} Q
                er.limit = x.at("max").get<double>();
                const auto gs = table.get_or_solve(grid, spec.groundstate_tol);
                const double c = x.value("scale", 1.0);
                const complex rot(std::cos(res.final_t), std::sin(res.final_t));
                double err2 = 0.0;
                const ComplexField& uf = *res.final_field;
                for (std::size_t i = 0; i < uf.size(); ++i)
                    err2 += std::norm(uf[i] - c * rot * gs->Q[i].real());
                err2 *= grid->cell_volume();
                er.observed = std::sqrt(err2 / gs->mass_sq);
                er.pass = er.observed <= er.limit;
            } else if (check == "alpha_vs_known_tstar") {
                const double t_star = x.at("t_star").get<double>();
                const double t_from = x.value("t_from", res.trace.front().t);
                const double lo = x.at("lo").get<double>();
                const double hi = x.at("hi").get<double>();
                er.observed = detail::alpha_with_known_tstar(res.trace, t_star, t_from,
                                                             spec.sim.tail_threshold);
                er.limit = hi;
                er.pass = er.observed >= lo && er.observed <= hi;
            } else if (check == "grad_ratio") {
                er.limit = x.at("max").get<double>();
                double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                for (const auto& r : res.trace) {
                    lo = std::min(lo, r.grad_norm_sq);
                    hi = std::max(hi, r.grad_norm_sq);
                }
                er.observed = std::sqrt(hi / lo);
                er.pass = er.observed < er.limit;
            } else if (check == "mass_strictly_decreasing") {
                bool ok = true;
                double worst = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 1; i < res.trace.size(); ++i) {
                    const double diff = res.trace[i].mass_sq - res.trace[i - 1].mass_sq;
                    worst = std::max(worst, diff);
                    if (!(diff < 0.0)) ok = false;
                }
                er.observed = worst;
                er.pass = ok;
            } else if (check == "energy_nonincreasing") {
                er.limit = x.value("slack", 1e-10);
                double worst = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 1; i < res.trace.size(); ++i)
                    worst = std::max(worst, res.trace[i].energy - res.trace[i - 1].energy);
                er.observed = worst;
                er.pass = worst <= er.limit;
            } else if (check == "blowup_detected") {
                er.pass = detection.detected;
                er.observed = detection.detected ? 1.0 : 0.0;
                er.limit = 1.0;
            } else if (check == "grad_growth_min") {
                er.limit = x.at("min").get<double>();
                const double gmin = detail::trace_min_grad(res.trace);
                double gmax = 0.0;
                for (const auto& r : res.trace)
                    if (r.tail_fraction <= spec.sim.tail_threshold)
                        gmax = std::max(gmax, r.grad_norm_sq);
                er.observed = std::sqrt(gmax / gmin);
                er.pass = er.observed >= er.limit;
            } else if (check == "alpha_fit_range") {
                if (!res.report) throw not_applicable_error("no blow-up report");
                er.observed = res.report->alpha_fit;
                er.limit = x.at("hi").get<double>();
                er.pass = er.observed >= x.at("lo").get<double>() && er.observed <= er.limit;
            } else if (check == "loglog_gain_min") {
                if (!res.report) throw not_applicable_error("no blow-up report");
                er.limit = x.at("min").get<double>();
                er.observed = res.report->loglog_gain;
                er.pass = er.observed >= er.limit;
            } else if (check == "growth_bound_trend") {
                er.limit = x.at("max").get<double>();
                er.observed = growth_bound_trend(res.trace, spec.sim.s, spec.sim.tail_threshold);
                er.pass = er.observed <= er.limit;
            } else {
                er.detail = "unknown check";
                er.pass = false;
            }
        } catch (const std::exception& err) {
            er.pass = false;
            er.detail = err.what();
        }
        res.expectations.push_back(er);
    }

    if (!art.out_dir.empty()) {
        json rep;
        rep["name"] = res.name;
        rep["outcome"] = to_string(res.outcome);
        rep["reason"] = res.reason;
        rep["initial_l2"] = res.initial_l2;
        rep["requested_l2"] = res.requested_l2;
        rep["final_t"] = res.final_t;
        rep["residuals"] = {{"mass", res.mass_residual},
                            {"energy", res.energy_residual},
                            {"momentum", res.momentum_residual}};
        if (res.report) rep["blowup"] = json::parse(to_json(*res.report));
        json ex = json::array();
        for (const auto& x : res.expectations)
            ex.push_back({{"check", x.label},
                          {"pass", x.pass},
                          {"observed", x.observed},
                          {"limit", x.limit},
                          {"detail", x.detail}});
        rep["expectations"] = ex;
        std::ofstream of(art.out_dir + "/" + spec.name + "_report.json");
        of << rep.dump(2) << '\n';
    }
    return res;
}

// ------------------------------------------------------------------ sweeps

struct SweepSpec {
    ExperimentSpec base;                    // initial.kind is forced to scaled_soliton
    std::vector<double> s_axis, a_axis, delta_axis;
};

inline SweepSpec sweep_from_json(const json& j) {
    SweepSpec sw;
    sw.base = experiment_from_json(j);
    const json& axes = j.at("axes");
    sw.s_axis = axes.at("s").get<std::vector<double>>();
    sw.a_axis = axes.at("a").get<std::vector<double>>();
    sw.delta_axis = axes.at("delta").get<std::vector<double>>();
    return sw;
}

struct SweepRow {
    double s = 0, a = 0, delta = 0;
    std::string outcome;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double alpha_fit = std::numeric_limits<double>::quiet_NaN();
    double loglog_gain = std::numeric_limits<double>::quiet_NaN();
    double max_identity_residual = std::numeric_limits<double>::quiet_NaN();
};

inline std::string sweep_csv_header() {
    return "s,a,delta,outcome,t_star,alpha_fit,loglog_gain,max_identity_residual";
}

inline std::string sweep_csv_row(const SweepRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g", r.s, r.a,
                  r.delta, r.outcome.c_str(), r.t_star, r.alpha_fit, r.loglog_gain,
                  r.max_identity_residual);
    return buf;
}

// Run the (s, a, delta) product grid; rows ordered lexicographically, each
// experiment independent, partial failures recorded in their row.
inline std::vector<SweepRow> run_sweep(const SweepSpec& sw, int workers = 1,
                                       const std::string& out_csv = {}) {
    std::vector<SweepRow> rows;
    std::vector<ExperimentSpec> specs;
    for (double s : sw.s_axis)
        for (double a : sw.a_axis)
            for (double delta : sw.delta_axis) {
                ExperimentSpec e = sw.base;
                e.sim.s = s;
                e.sim.a = a;
                e.initial.kind = InitialKind::scaled_soliton;
                e.initial.delta = delta;
                char tag[96];
                std::snprintf(tag, sizeof tag, "%s_s%g_a%g_d%g", sw.base.name.c_str(), s, a, delta);
                e.name = tag;
                specs.push_back(std::move(e));
                SweepRow row;
                row.s = s;
                row.a = a;
                row.delta = delta;
                rows.push_back(row);
            }

    // ground states shared by every row: solve before going parallel
    GroundStateTable::instance().ensure_canonical(sw.base.dim);
    GroundStateTable::instance().get_or_solve(sw.base.make_grid_for(), sw.base.groundstate_tol);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            SweepRow& row = rows[i];
            try {
                const ExperimentResult r = run_experiment(specs[i]);
                row.outcome = to_string(r.outcome);
                double ident = std::max(r.mass_residual,
                                        std::max(r.energy_residual, r.momentum_residual));
                row.max_identity_residual = ident;
                if (r.report) {
                    row.t_star = r.report->t_star;
                    row.alpha_fit = r.report->alpha_fit;
                    row.loglog_gain = r.report->loglog_gain;
                }
            } catch (const std::exception& err) {
                row.outcome = std::string("error:") + err.what();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!out_csv.empty()) {
        std::ofstream of(out_csv);
        of << sweep_csv_header() << '\n';
        for (const auto& r : rows) of << sweep_csv_row(r) << '\n';
    }
    return rows;
}

}  // namespace fnls
