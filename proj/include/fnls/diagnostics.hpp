#pragma once

#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "fnls/functionals.hpp"

namespace fnls {

// One time-sample of the tracked functionals along a run.
//
// The dissipation entries are the instantaneous rates appearing in the
// balance laws, oriented so that along exact solutions
//   d/dt mass_sq = -diss_mass
//   d/dt energy  = -diss_energy_1 + diss_energy_2
//   d/dt momentum_j = 2 * diss_momentum_j
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_sq = 0.0;
    double energy = 0.0;
    double momentum[4] = {0, 0, 0, 0};
    double grad_norm_sq = 0.0;
    double diss_mass = 0.0;      // 2a ||(-Delta)^{s/2} u||^2
    double diss_energy_1 = 0.0;  // a int |(-Delta)^{(s+1)/2} u|^2
    double diss_energy_2 = 0.0;  // a Re int (-Delta)^s u |u|^{4/d} conj(u)
    double diss_momentum[4] = {0, 0, 0, 0};  // a Im int (-Delta)^s u d_j conj(u)
    double lambda = 0.0;         // ||grad Q|| / ||grad u||
    double tail_fraction = 0.0;
    int dim = 1;
};

struct DiagnosticsContext {
    int d = 1;
    double s = 1.0;
    double a = 0.0;
    double grad_norm_Q = 0.0;  // ||grad Q||_{L2} of the canonical ground state
};

// Compute every record entry from a physical-space field in two transforms:
// one forward pass for the spectral reductions, one multiplier inverse for
// the (-Delta)^s u factor of the nonlinear dissipation integrand.
inline DiagnosticsRecord compute_record(const ComplexField& u, const DiagnosticsContext& ctx,
                                        double t) {
    if (u.space() != Space::physical)
        throw contract_error("compute_record expects a physical-space field");
    const Grid& g = u.grid();
    const int d = g.dim();
    const double vol = g.box_volume();
    const double cell = g.cell_volume();

    std::vector<complex> uhat;
    detail::forward_fft(g, u.values(), uhat);

    double p0 = 0, p1 = 0, ps = 0, ps1 = 0, tail = 0;
    double pj[4] = {0, 0, 0, 0}, pjs[4] = {0, 0, 0, 0};
    std::vector<complex> what(uhat.size());
    std::size_t idx[4];
    for (std::size_t i = 0; i < uhat.size(); ++i) {
        g.unravel(i, idx);
        double k2 = 0.0;
        double kv[4];
        bool in_tail = false;
        for (int a = 0; a < d; ++a) {
            kv[a] = g.wavenumber(a, idx[a]);
            k2 += kv[a] * kv[a];
            const std::size_t n = g.points(a);
            const std::size_t m = idx[a];
            const std::size_t abs_m = (m <= n / 2) ? m : n - m;
            if (abs_m > 5 * dealias_cutoff_index(g, a) / 6) in_tail = true;
        }
        const double w = std::norm(uhat[i]);
        const double k2s = std::pow(k2, ctx.s);
        p0 += w;
        p1 += k2 * w;
        ps += k2s * w;
        ps1 += k2s * k2 * w;
        if (in_tail) tail += w;
        for (int a = 0; a < d; ++a) {
            pj[a] += kv[a] * w;
            pjs[a] += kv[a] * k2s * w;
        }
        what[i] = k2s * uhat[i];
    }

    std::vector<complex> wphys;
    detail::backward_fft(g, what, wphys);

    double quartic = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const complex v = u[i];
        const double m2 = std::norm(v);
        const double pw = nonlinear_power(m2, d);
        quartic += m2 * pw;
        e2 += pw * (wphys[i].real() * v.real() + wphys[i].imag() * v.imag());
    }

    DiagnosticsRecord r;
    r.t = t;
    r.dim = d;
    r.mass_sq = vol * p0;
    r.grad_norm_sq = vol * p1;
    r.energy = 0.5 * vol * p1 - (static_cast<double>(d) / (4.0 + 2.0 * d)) * cell * quartic;
    r.diss_mass = 2.0 * ctx.a * vol * ps;
    r.diss_energy_1 = ctx.a * vol * ps1;
    r.diss_energy_2 = ctx.a * cell * e2;
    for (int a = 0; a < d; ++a) {
        r.momentum[a] = vol * pj[a];
        r.diss_momentum[a] = -ctx.a * vol * pjs[a];
    }
    r.lambda = (r.grad_norm_sq > 0.0 && ctx.grad_norm_Q > 0.0)
                   ? std::sqrt(ctx.grad_norm_Q / r.grad_norm_sq)
                   : std::numeric_limits<double>::infinity();
    r.tail_fraction = p0 > 0.0 ? tail / p0 : 0.0;
    return r;
}

using Trace = std::vector<DiagnosticsRecord>;

namespace detail {

inline void require_sorted(const Trace& trace) {
    if (trace.size() < 2) throw contract_error("identity check needs at least two records");
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (!(trace[i].t > trace[i - 1].t)) throw contract_error("trace times must increase");
}

}  // namespace detail

// max_t |m(t) + int_0^t diss_mass - m(0)| / m(0), trapezoid in time.
inline double mass_identity_residual(const Trace& trace) {
    detail::require_sorted(trace);
    const double m0 = trace.front().mass_sq;
    double acc = 0.0, worst = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double h = trace[i].t - trace[i - 1].t;
        acc += 0.5 * h * (trace[i].diss_mass + trace[i - 1].diss_mass);
        worst = std::max(worst, std::abs(trace[i].mass_sq + acc - m0));
    }
    return worst / m0;
}

// max_t |E(t) - E(0) - int_0^t (-diss_e1 + diss_e2)| / max(|E(0)|, 1e-12).
inline double energy_identity_residual(const Trace& trace) {
    detail::require_sorted(trace);
    const double e0 = trace.front().energy;
    const double denom = std::max(std::abs(e0), 1e-12);
    double acc = 0.0, worst = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double h = trace[i].t - trace[i - 1].t;
        const double fa = -trace[i - 1].diss_energy_1 + trace[i - 1].diss_energy_2;
        const double fb = -trace[i].diss_energy_1 + trace[i].diss_energy_2;
        acc += 0.5 * h * (fa + fb);
        worst = std::max(worst, std::abs(trace[i].energy - e0 - acc));
    }
    return worst / denom;
}

// Componentwise |P_j(t) - P_j(0) - 2 int diss_p_j| normalized by
// max(|P_j(0)|, max_t |P_j(t)|, mass(0)): fields whose momentum never rises
// above round-off read as round-off (drift in velocity units), not as noise
// over noise.
inline double momentum_identity_residual(const Trace& trace) {
    detail::require_sorted(trace);
    const int d = trace.front().dim;
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
        double denom = std::abs(trace.front().momentum[j]);
        for (const auto& r : trace) denom = std::max(denom, std::abs(r.momentum[j]));
        denom = std::max(denom, std::max(trace.front().mass_sq, 1e-12));
        double acc = 0.0;
        for (std::size_t i = 1; i < trace.size(); ++i) {
            const double h = trace[i].t - trace[i - 1].t;
            acc += 0.5 * h * (trace[i].diss_momentum[j] + trace[i - 1].diss_momentum[j]);
            const double res =
                std::abs(trace[i].momentum[j] - trace.front().momentum[j] - 2.0 * acc);
            worst = std::max(worst, res / denom);
        }
    }
    return worst;
}

// Sinks receive records in time order from a single producer.
class DiagnosticsSink {
public:
    virtual ~DiagnosticsSink() = default;
    virtual void on_record(const DiagnosticsRecord& r) = 0;
};

class TraceSink : public DiagnosticsSink {
public:
    void on_record(const DiagnosticsRecord& r) override { trace_.push_back(r); }
    const Trace& trace() const { return trace_; }
    Trace& trace() { return trace_; }

private:
    Trace trace_;
};

inline std::string csv_header(int d) {
    std::string h = "t,mass_sq,energy,grad_norm_sq,lambda";
    const char* axes[4] = {"x", "y", "z", "w"};
    for (int j = 0; j < d; ++j) h += std::string(",p") + axes[j];
    h += ",diss_mass,diss_e1,diss_e2";
    for (int j = 0; j < d; ++j) h += std::string(",diss_p") + axes[j];
    h += ",tail_fraction";
    return h;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
    char buf[64];
    std::string row;
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!row.empty()) row += ',';
        row += buf;
    };
    put(r.t);
    put(r.mass_sq);
    put(r.energy);
    put(r.grad_norm_sq);
    put(r.lambda);
    for (int j = 0; j < r.dim; ++j) put(r.momentum[j]);
    put(r.diss_mass);
    put(r.diss_energy_1);
    put(r.diss_energy_2);
    for (int j = 0; j < r.dim; ++j) put(r.diss_momentum[j]);
    put(r.tail_fraction);
    return row;
}

// Streams CSV rows to a file while keeping the in-memory trace.
class CsvTraceSink : public TraceSink {
public:
    CsvTraceSink(const std::string& path, int dim) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        out_ << csv_header(dim) << '\n';
    }
    void on_record(const DiagnosticsRecord& r) override {
        TraceSink::on_record(r);
        out_ << csv_row(r) << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace fnls
