#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "fnls/checkpoint.hpp"
#include "fnls/diagnostics.hpp"

namespace fnls {

enum class DtRule { fixed, adaptive };

struct SimParams {
    int d = 1;
    double s = 1.0;      // dissipation order
    double a = 0.0;      // friction coefficient
    double dt0 = 1e-3;   // base step
    DtRule dt_rule = DtRule::fixed;
    double cfl_c = 0.05;           // adaptive constant
    double t_end = 1.0;
    double grad_stop = 1e9;        // stop threshold on ||grad u||_{L2}
    int sample_every = 10;         // diagnostics cadence in steps
    double tail_threshold = 1e-6;  // resolution-exhaustion trigger
    bool nonlinearity = true;      // test hook: false collapses the step to the linear flow

    void validate() const {
        if (d < 1 || d > 4) throw domain_error("d must be in 1..4");
        if (!(a >= 0.0)) throw domain_error("a must be >= 0");
        if (!(s >= 0.0)) throw domain_error("s must be >= 0");
        if (!(dt0 > 0.0)) throw domain_error("dt0 must be positive");
        if (!(grad_stop > 0.0)) throw domain_error("grad_stop must be positive");
        if (sample_every < 1) throw domain_error("sample_every must be >= 1");
    }
};

struct StepState {
    ComplexField field;
    double t = 0.0;
    double dt_current = 0.0;
    long steps_taken = 0;
};

enum class RunOutcome { completed, blowup_suspected, under_resolved };

inline const char* to_string(RunOutcome o) {
    switch (o) {
        case RunOutcome::completed: return "completed";
        case RunOutcome::blowup_suspected: return "blowup-suspected";
        case RunOutcome::under_resolved: return "under-resolved";
    }
    return "?";
}

// Exact solution of the Delta-free sub-flow i u_t = -|u|^{4/d} u:
// u -> u e^{i |u|^{4/d} dt}, pointwise modulus-preserving.
inline ComplexField nonlinear_phase_step(const ComplexField& f, double dt, int d) {
    if (f.space() != Space::physical)
        throw contract_error("nonlinear_phase_step expects a physical-space field");
    ComplexField out = f;
    for (auto& v : out.values()) {
        const double phase = nonlinear_power(std::norm(v), d) * dt;
        v *= complex(std::cos(phase), std::sin(phase));
    }
    return out;
}

// dt = min(dt0, cfl_c / (1 + ||grad f||^2)); strictly positive and
// nonincreasing in the gradient norm.
inline double adaptive_dt(const ComplexField& f, const SimParams& p) {
    if (p.dt_rule != DtRule::adaptive)
        throw contract_error("adaptive_dt called with a fixed-step rule");
    return std::min(p.dt0, p.cfl_c / (1.0 + grad_norm_sq(f)));
}

namespace detail {

// Per-run buffers and spectral tables for the split step. The half-step
// multiplier is cached on its dt; fixed-step runs compute it once.
struct StrangWorkspace {
    const Grid* grid = nullptr;
    double a = 0.0, s = 0.0;
    std::vector<double> k2, k2s;
    std::vector<unsigned char> keep;  // 2/3-rule mask
    std::vector<unsigned char> tail;  // top sixth of the retained band
    std::vector<complex> half_mult, spec;
    double half_mult_dt = std::numeric_limits<double>::quiet_NaN();

    // post-step spectral sums (after dealiasing)
    double sum_mass = 0.0, sum_grad = 0.0, sum_tail = 0.0;

    void prepare(const Grid& g, double a_, double s_) {
        if (grid && grid->same_shape(g) && a == a_ && s == s_) return;
        grid = &g;
        a = a_;
        s = s_;
        half_mult_dt = std::numeric_limits<double>::quiet_NaN();
        const std::size_t N = g.size();
        k2.resize(N);
        k2s.resize(N);
        keep.resize(N);
        tail.resize(N);
        std::size_t idx[4];
        for (std::size_t i = 0; i < N; ++i) {
            g.unravel(i, idx);
            double kk = 0.0;
            bool kept = true, in_tail = false;
            for (int ax = 0; ax < g.dim(); ++ax) {
                const double k = g.wavenumber(ax, idx[ax]);
                kk += k * k;
                const std::size_t n = g.points(ax);
                const std::size_t m = idx[ax];
                const std::size_t abs_m = (m <= n / 2) ? m : n - m;
                const std::size_t cut = dealias_cutoff_index(g, ax);
                if (abs_m > cut) kept = false;
                if (abs_m > 5 * cut / 6) in_tail = true;
            }
            k2[i] = kk;
            k2s[i] = std::pow(kk, s);
            keep[i] = kept ? 1 : 0;
            tail[i] = in_tail ? 1 : 0;
        }
    }

    void ensure_half_mult(double dt) {
        if (dt == half_mult_dt) return;
        half_mult_dt = dt;
        const double h = 0.5 * dt;
        half_mult.resize(k2.size());
        for (std::size_t i = 0; i < k2.size(); ++i) {
            const double damp = (a > 0.0) ? std::exp(-a * k2s[i] * h) : 1.0;
            const double phase = -k2[i] * h;
            half_mult[i] = complex(damp * std::cos(phase), damp * std::sin(phase));
        }
    }

    // Refresh the cached sums from an arbitrary spectral array.
    void stats_from(const std::vector<complex>& sp) {
        sum_mass = sum_grad = sum_tail = 0.0;
        for (std::size_t i = 0; i < sp.size(); ++i) {
            const double w = std::norm(sp[i]);
            sum_mass += w;
            sum_grad += k2[i] * w;
            if (tail[i]) sum_tail += w;
        }
    }

    double grad_norm_sq_cached() const { return grid->box_volume() * sum_grad; }
    double tail_fraction_cached() const { return sum_mass > 0.0 ? sum_tail / sum_mass : 0.0; }
    bool finite() const { return std::isfinite(sum_mass) && std::isfinite(sum_grad); }
};

inline void strang_step_inplace(StepState& st, const SimParams& p, double dt,
                                StrangWorkspace& ws) {
    const Grid& g = st.field.grid();
    ws.prepare(g, p.a, p.s);
    ws.ensure_half_mult(dt);
    auto& u = st.field.values();

    forward_fft(g, u, ws.spec);
    if (p.nonlinearity) {
        for (std::size_t i = 0; i < ws.spec.size(); ++i) ws.spec[i] *= ws.half_mult[i];
        backward_fft(g, ws.spec, u);
        for (auto& v : u) {
            const double phase = nonlinear_power(std::norm(v), p.d) * dt;
            v *= complex(std::cos(phase), std::sin(phase));
        }
        forward_fft(g, u, ws.spec);
    } else {
        for (std::size_t i = 0; i < ws.spec.size(); ++i) ws.spec[i] *= ws.half_mult[i];
    }
    ws.sum_mass = ws.sum_grad = ws.sum_tail = 0.0;
    for (std::size_t i = 0; i < ws.spec.size(); ++i) {
        complex v = ws.keep[i] ? ws.spec[i] * ws.half_mult[i] : complex(0.0, 0.0);
        ws.spec[i] = v;
        const double w = std::norm(v);
        ws.sum_mass += w;
        ws.sum_grad += ws.k2[i] * w;
        if (ws.tail[i]) ws.sum_tail += w;
    }
    backward_fft(g, ws.spec, u);

    st.t += dt;
    st.dt_current = dt;
    st.steps_taken += 1;
}

}  // namespace detail

// One Strang step: half linear flow, full nonlinear phase, dealiasing, half
// linear flow. Second order in dt for smooth solutions.
inline StepState strang_step(const StepState& state, const SimParams& p) {
    if (!(state.dt_current > 0.0)) throw contract_error("strang_step needs dt_current > 0");
    StepState out = state;
    detail::StrangWorkspace ws;
    detail::strang_step_inplace(out, p, state.dt_current, ws);
    if (!ws.finite())
        throw numeric_error("non-finite field after step (under-resolved blow-up?)", out.t);
    return out;
}

struct CheckpointOptions {
    std::string dir;       // empty disables checkpointing
    std::string tag = "run";
    long every_steps = 0;  // 0: final checkpoint only
    bool enabled() const { return !dir.empty(); }
};

struct EvolveResult {
    StepState state;
    RunOutcome outcome = RunOutcome::completed;
    std::string detail;
};

namespace detail {

inline std::string checkpoint_path(const CheckpointOptions& c, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return c.dir + "/run_" + c.tag + "_t" + buf + ".fnls";
}

}  // namespace detail

// Drive the initial-value problem from u0 until t_end, gradient blow-past, or
// resolution exhaustion. Emits a diagnostics record every sample_every steps
// (plus the initial and final states). Deterministic for identical inputs.
inline EvolveResult evolve(const ComplexField& u0, const SimParams& p,
                           const DiagnosticsContext& ctx, DiagnosticsSink& sink,
                           const CheckpointOptions& copts = {}) {
    p.validate();
    if (u0.grid().dim() != p.d) throw contract_error("initial field dimension != params.d");

    StepState st{to_space(u0, Space::physical), 0.0, p.dt0, 0};
    detail::StrangWorkspace ws;
    ws.prepare(st.field.grid(), p.a, p.s);
    {
        std::vector<complex> spec0;
        detail::forward_fft(st.field.grid(), st.field.values(), spec0);
        ws.stats_from(spec0);
    }

    sink.on_record(compute_record(st.field, ctx, st.t));
    ComplexField last_good = st.field;
    double last_good_t = st.t;
    long last_sampled_step = 0;

    const double t_eps = 1e-12 * std::max(1.0, std::abs(p.t_end));
    RunOutcome outcome = RunOutcome::completed;
    std::string why = "reached t_end";

    while (true) {
        if (st.t >= p.t_end - t_eps) break;
        if (ws.grad_norm_sq_cached() >= p.grad_stop * p.grad_stop) {
            outcome = RunOutcome::blowup_suspected;
            why = "gradient norm crossed grad_stop";
            break;
        }
        if (ws.tail_fraction_cached() > p.tail_threshold) {
            outcome = RunOutcome::under_resolved;
            why = "spectral tail exceeded threshold";
            break;
        }

        double dt = p.dt0;
        if (p.dt_rule == DtRule::adaptive)
            dt = std::min(p.dt0, p.cfl_c / (1.0 + ws.grad_norm_sq_cached()));
        dt = std::min(dt, p.t_end - st.t);

        detail::strang_step_inplace(st, p, dt, ws);
        if (!ws.finite()) {
            if (copts.enabled())
                write_checkpoint(detail::checkpoint_path(copts, last_good_t), last_good,
                                 last_good_t, p.s, p.a);
            throw numeric_error("non-finite field at t = " + std::to_string(st.t) +
                                    " (under-resolved blow-up?)",
                                st.t);
        }

        if (st.steps_taken % p.sample_every == 0) {
            sink.on_record(compute_record(st.field, ctx, st.t));
            last_sampled_step = st.steps_taken;
            last_good = st.field;
            last_good_t = st.t;
            if (copts.enabled() && copts.every_steps > 0 &&
                st.steps_taken % copts.every_steps == 0)
                write_checkpoint(detail::checkpoint_path(copts, st.t), st.field, st.t, p.s, p.a);
        }
    }

    if (st.steps_taken != last_sampled_step)
        sink.on_record(compute_record(st.field, ctx, st.t));
    if (copts.enabled())
        write_checkpoint(detail::checkpoint_path(copts, st.t), st.field, st.t, p.s, p.a);
    return EvolveResult{std::move(st), outcome, why};
}

}  // namespace fnls
