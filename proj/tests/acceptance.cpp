// Acceptance suite: one pass/fail line per criterion, artifacts under --out.
//
// Each criterion runs at its stated tolerance. Two sub-checks (criterion 8's
// log-log RMS comparison and criterion 9's monotone lambda^2|E| decrease) are
// known to fail at desk scale: the dynamics at reachable focusing depths sits
// between the pure square-root law and the asymptotic log-log shape, so the
// free power law always out-fits the fixed log-log model, and the dissipative
// energy growth makes lambda^2|E| saturate from below instead of decreasing.
// They are reported honestly rather than loosened.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <optional>
#include <vector>

#include "fnls/fnls.hpp"
#include "oracles.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

struct Line {
    bool pass;
    std::string text;
};

std::vector<Line> g_lines;
int g_criterion = 0;

void check(bool pass, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    g_lines.push_back({pass, buf});
    std::printf("  [%s] %s\n", pass ? "ok" : "FAIL", buf);
}

struct CriterionTimer {
    explicit CriterionTimer(int id, const char* label) : start(clock_t::now()) {
        g_criterion = id;
        std::printf("criterion %d: %s\n", id, label);
        std::fflush(stdout);
    }
    double seconds() const {
        return std::chrono::duration<double>(clock_t::now() - start).count();
    }
    using clock_t = std::chrono::steady_clock;
    clock_t::time_point start;
};

double rel_l2_err(const ComplexField& a, const ComplexField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

std::string g_out = "acceptance_out";

ExperimentResult run_named(const std::string& name) {
    RunArtifacts art;
    art.out_dir = g_out;
    return run_experiment(builtin_experiment(name), art);
}

// ------------------------------------------------------------------ criteria

void criterion_1() {
    CriterionTimer timer(1, "ground-state fidelity in d=1");
    auto grid = make_grid(1, 2048, 24.0);
    const GroundState gs = solve_ground_state(grid, 1e-10);
    double worst = 0.0;
    for (std::size_t i = 0; i < gs.Q.size(); ++i)
        worst = std::max(worst, std::abs(gs.Q[i].real() - oracle::q1d(grid->coordinate(0, i))));
    check(worst <= 1e-8, "pointwise match of the closed form: %.3e <= 1e-8", worst);
    check(gs.residual <= 1e-10, "profile-equation residual: %.3e <= 1e-10", gs.residual);
    check(std::abs(gs.energy) <= 1e-6 * gs.grad_norm_sq, "E(Q) = 0: |%.3e| <= 1e-6 * %.4f",
          gs.energy, gs.grad_norm_sq);
    const double secs = timer.seconds();
    check(secs < 10.0, "runtime %.1f s < 10 s", secs);
}

void criterion_2() {
    CriterionTimer timer(2, "linear-propagator exactness");
    auto g = make_grid(1, 64, Grid::pi());
    double worst_step = 0.0;
    for (const auto& [m, a, s, t] :
         {std::tuple{1, 1.0, 1.0, 1.0}, {2, 0.7, 0.5, 0.3}, {5, 0.0, 1.0, 0.5},
          std::tuple{3, 0.2, 1.5, 0.05}}) {
        ComplexField f(g, Space::spectral);
        f[static_cast<std::size_t>(m)] = complex(0.8, -0.4);
        const double k2 = std::pow(g->wavenumber(0, static_cast<std::size_t>(m)), 2);
        const complex want =
            complex(0.8, -0.4) * std::exp(complex(-a * std::pow(k2, s) * t, -k2 * t));
        const auto out = linear_propagate(f, t, a, s);
        worst_step = std::max(worst_step,
                              std::abs(out[static_cast<std::size_t>(m)] - want) / std::abs(want));
    }
    check(worst_step <= 1e-13, "single-mode closed form per step: %.3e <= 1e-13", worst_step);

    auto gg = make_grid(1, 256, 8.0);
    ComplexField f(gg, Space::spectral);
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    for (std::size_t i = 0; i < 30; ++i) f[i] = complex(gauss(rng), gauss(rng));
    auto phys = inverse_transform(f);
    ComplexField stepped = phys;
    for (int step = 0; step < 10; ++step) stepped = linear_propagate(stepped, 0.075, 0.3, 0.6);
    const auto whole = linear_propagate(phys, 0.75, 0.3, 0.6);
    const double comp = rel_l2_err(stepped, whole);
    check(comp <= 1e-12, "ten-step semigroup composition: %.3e <= 1e-12", comp);
    (void)timer;
}

std::optional<ExperimentResult> g_identity_run;

void criterion_3() {
    CriterionTimer timer(3, "mass balance along the dissipative near-soliton run");
    g_identity_run = run_named("mass-identity");
    const double base = g_identity_run->mass_residual;
    check(base <= 1e-6, "max relative mass residual: %.3e <= 1e-6", base);

    ExperimentSpec halved = builtin_experiment("mass-identity");
    halved.name = "mass-identity-dt-halved";
    halved.sim.dt0 *= 0.5;
    halved.sim.cfl_c *= 0.5;
    RunArtifacts art;
    art.out_dir = g_out;
    const auto fine = run_experiment(halved, art);
    const double ratio = base / fine.mass_residual;
    check(ratio >= 3.5, "residual drop under dt halving: %.2fx >= 3.5x", ratio);
    const double secs = timer.seconds();
    check(secs < 120.0, "runtime %.1f s < 2 min", secs);
}

void criterion_4() {
    CriterionTimer timer(4, "energy and momentum balances");
    check(g_identity_run->energy_residual <= 1e-5,
          "energy residual on the same run: %.3e <= 1e-5", g_identity_run->energy_residual);
    const auto boosted = run_named("boosted-momentum");
    check(boosted.momentum_residual <= 1e-5, "boosted-soliton momentum residual: %.3e <= 1e-5",
          boosted.momentum_residual);
    (void)timer;
}

void criterion_5() {
    CriterionTimer timer(5, "conservative soliton regression");
    const auto res = run_named("soliton-conservative");
    for (const auto& x : res.expectations)
        check(x.pass, "%s: observed %.3e vs limit %.3e", x.label.c_str(), x.observed, x.limit);
    (void)timer;
}

void criterion_6() {
    CriterionTimer timer(6, "pseudo-conformal 1/t rate");
    const auto res = run_named("pseudo-conformal-rate");
    for (const auto& x : res.expectations)
        if (x.label == "alpha_vs_known_tstar")
            check(x.pass, "fitted alpha against T* = 0: %.4f in [0.95, 1.05]", x.observed);
        else
            check(x.pass, "%s", x.label.c_str());
    const double secs = timer.seconds();
    check(secs < 300.0, "runtime %.1f s < 5 min", secs);
}

void criterion_7() {
    CriterionTimer timer(7, "global existence for s >= 1 at supercritical mass");
    for (const char* name : {"global-s1-d2", "global-s15-d1"}) {
        const auto res = run_named(name);
        for (const auto& x : res.expectations)
            check(x.pass, "%s %s: observed %.3e limit %.3e %s", name, x.label.c_str(), x.observed,
                  x.limit, x.detail.c_str());
    }
    const double secs = timer.seconds();
    check(secs < 600.0, "total runtime %.1f s < 10 min", secs);
}

std::optional<ExperimentResult> g_blowup_run;

void criterion_8() {
    CriterionTimer timer(8, "fractional-dissipation blow-up regime (s = 0.5, a = 0.01)");
    g_blowup_run = run_named("loglog-blowup");
    const auto& res = *g_blowup_run;

    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (const auto& r : res.trace) {
        gmin = std::min(gmin, r.grad_norm_sq);
        if (r.tail_fraction <= 1e-6) gmax = std::max(gmax, r.grad_norm_sq);
    }
    const double growth = std::sqrt(gmax / gmin);
    const bool detected = detect_blowup(res.trace, 1e6, 1e-6).detected;
    check(detected && growth >= 1e3, "blow-up detected with gradient growth %.0fx >= 1000x",
          growth);
    check(res.report.has_value(), "rate report produced");
    if (!res.report) return;

    ExperimentSpec refined = builtin_experiment("loglog-blowup");
    refined.name = "loglog-blowup-2n";
    refined.n *= 2;
    RunArtifacts art;
    art.out_dir = g_out;
    const auto res2 = run_experiment(refined, art);
    const double t1 = res.report->t_star;
    const double t2 = res2.report ? res2.report->t_star : 0.0;
    check(res2.report && std::abs(t2 - t1) <= 0.05 * t1,
          "T* stable under n -> 2n: %.7f vs %.7f (%.2e relative)", t1, t2,
          std::abs(t2 - t1) / t1);

    const double alpha = res.report->alpha_fit;
    check(alpha >= 0.45 && alpha <= 0.7, "alpha_fit %.4f in [0.45, 0.7]", alpha);
    check(res.report->loglog_gain >= 0.0,
          "loglog RMS <= power RMS: gain %.3f (identifiability: at reachable depths the "
          "free power law out-fits the fixed log-log shape; both RMS values are in the report)",
          res.report->loglog_gain);
    const double secs = timer.seconds();
    check(secs < 900.0, "runtime %.1f s < 15 min", secs);
}

void criterion_9() {
    CriterionTimer timer(9, "energy growth bounds along the blow-up run");
    const auto& trace = g_blowup_run->trace;
    const double s = 0.5;
    const double slope = growth_bound_trend(trace, s, 1e-6);
    check(slope <= 0.05, "|E|/(log(1/lambda) lambda^{-2s}) trend slope %.3f <= 0.05", slope);

    // lambda^2 |E| over the last resolved decade of T* - t
    const double t_star = g_blowup_run->report->t_star;
    double tau_min = std::numeric_limits<double>::infinity();
    for (const auto& r : trace)
        if (r.tail_fraction <= 1e-6) tau_min = std::min(tau_min, t_star - r.t);
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    double first = -1.0, last = -1.0;
    for (const auto& r : trace) {
        const double tau = t_star - r.t;
        if (r.tail_fraction > 1e-6 || tau > 10.0 * tau_min || !(tau > 0.0)) continue;
        const double v = r.lambda * r.lambda * std::abs(r.energy);
        if (first < 0.0) first = v;
        last = v;
        if (v > prev) monotone = false;
        prev = v;
    }
    check(monotone,
          "lambda^2|E| monotone decreasing over the last resolved decade "
          "(observed %.3e -> %.3e: saturates from below instead; it stays << 1 as the "
          "bound requires, but does not decrease monotonically at this depth)",
          first, last);
    (void)timer;
}

void criterion_10() {
    CriterionTimer timer(10, "nonincreasing energy for small-mass data");
    for (const char* name : {"small-mass-c01", "small-mass-c02", "small-mass-c03"}) {
        const auto res = run_named(name);
        for (const auto& x : res.expectations)
            if (x.label == "energy_nonincreasing")
                check(x.pass, "%s: max consecutive energy increment %.3e <= 1e-10", name,
                      x.observed);
            else
                check(x.pass, "%s: %s", name, x.label.c_str());
    }
    (void)timer;
}

void criterion_11() {
    CriterionTimer timer(11, "excluded-rate-window arithmetic");
    check(rate_window_check(0.3, 0.3, 0.6) == true, "(0.3, 0.3, 0.6) inside the window");
    check(rate_window_check(0.5, 0.5, 0.4) == true, "(0.5, 0.5, 0.4) inside the window");
    check(rate_window_check(2.0, 1.0, 0.5) == false, "(2, 1, 0.5) outside the window");
    (void)timer;
}

void criterion_12() {
    CriterionTimer timer(12, "sweep determinism and the arrest transition");
    const SweepSpec sw = builtin_sweep();
    const std::string csv_a = g_out + "/sweep_run1.csv";
    const std::string csv_b = g_out + "/sweep_run2.csv";
    const auto rows = run_sweep(sw, 3, csv_a);
    run_sweep(sw, 2, csv_b);
    std::ifstream fa(csv_a), fb(csv_b);
    std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    check(!ca.empty() && ca == cb, "two sweep runs produce byte-identical CSV (%zu rows)",
          rows.size());

    bool transition = false;
    for (double s : sw.s_axis)
        for (double delta : sw.delta_axis) {
            bool seen_blowup = false;
            for (double a : sw.a_axis)
                for (const auto& r : rows)
                    if (r.s == s && r.a == a && r.delta == delta) {
                        if (r.outcome == "blowup-suspected") seen_blowup = true;
                        if (seen_blowup && r.outcome == "completed") transition = true;
                    }
        }
    check(transition, "at least one (s, delta) row flips blow-up -> completed as a grows");
    (void)timer;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
            g_out = argv[++i];
        else
            only.push_back(std::atoi(argv[i]));
    }
    fs::create_directories(g_out);
    auto wants = [&](int id) {
        return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
    };

    const auto t0 = std::chrono::steady_clock::now();
    struct {
        int id;
        void (*fn)();
        const char* label;
    } table[] = {
        {1, criterion_1, "ground-state fidelity"},
        {2, criterion_2, "linear-propagator exactness"},
        {3, criterion_3, "mass balance"},
        {4, criterion_4, "energy and momentum balances"},
        {5, criterion_5, "conservative soliton regression"},
        {6, criterion_6, "pseudo-conformal rate"},
        {7, criterion_7, "global existence, s >= 1"},
        {8, criterion_8, "blow-up regime"},
        {9, criterion_9, "growth bounds"},
        {10, criterion_10, "small-mass energy monotonicity"},
        {11, criterion_11, "rate-window arithmetic"},
        {12, criterion_12, "sweep determinism"},
    };

    int failures = 0;
    for (const auto& row : table) {
        if (!wants(row.id)) continue;
        if ((row.id == 4 && !g_identity_run) || (row.id == 9 && !g_blowup_run)) {
            std::printf("criterion %d: %s\n  [skip] depends on criterion %d\n", row.id, row.label,
                        row.id - 1);
            continue;
        }
        const std::size_t before = g_lines.size();
        try {
            row.fn();
        } catch (const std::exception& e) {
            check(false, "unexpected exception: %s", e.what());
        }
        bool pass = true;
        for (std::size_t i = before; i < g_lines.size(); ++i) pass = pass && g_lines[i].pass;
        std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", row.id, row.label);
        std::fflush(stdout);
        if (!pass) ++failures;
    }

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance: %d criterion(s) failed, %.0f s total\n", failures, total);
    return failures;
}
