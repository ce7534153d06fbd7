#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fnls/blowup.hpp"
#include "oracles.hpp"

using namespace fnls;

TEST_CASE("detection needs a 1e6 growth factor while resolved", "[blowup]") {
    SECTION("flat soliton trace is quiet") {
        Trace tr;
        for (int i = 0; i < 50; ++i) {
            DiagnosticsRecord r;
            r.t = 0.02 * i;
            r.grad_norm_sq = 1.36 * (1.0 + 1e-9 * i);
            tr.push_back(r);
        }
        CHECK_FALSE(detect_blowup(tr).detected);
    }
    SECTION("1/(1-t) sampled to 0.999 grows only 1e3: not detected") {
        Trace tr;
        for (int i = 0; i <= 2000; ++i) {
            DiagnosticsRecord r;
            r.t = 0.999 * i / 2000.0;
            r.grad_norm_sq = 1.0 / (1.0 - r.t);
            tr.push_back(r);
        }
        CHECK_FALSE(detect_blowup(tr).detected);
    }
    SECTION("same family pushed to 1-1e-7 crosses the factor") {
        Trace tr;
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
            DiagnosticsRecord r;
            // log-spaced approach so the crossing is sampled
            const double tau = std::pow(10.0, -7.0 * i / n);
            r.t = 1.0 - tau;
            r.grad_norm_sq = 1.0 / tau;
            tr.push_back(r);
        }
        const auto det = detect_blowup(tr);
        REQUIRE(det.detected);
        CHECK(det.t_detect >= 1.0 - 1.01e-6);
        CHECK(det.t_detect <= 1.0 - 0.99e-7);
    }
    SECTION("growth behind an unresolved tail does not count") {
        Trace tr;
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
            DiagnosticsRecord r;
            const double tau = std::pow(10.0, -7.0 * i / n);
            r.t = 1.0 - tau;
            r.grad_norm_sq = 1.0 / tau;
            r.tail_fraction = (r.grad_norm_sq > 1e4) ? 1e-3 : 0.0;
            tr.push_back(r);
        }
        CHECK_FALSE(detect_blowup(tr).detected);
    }
}

TEST_CASE("blow-up time recovery on synthetic data", "[blowup]") {
    SECTION("exact square-root law round trip") {
        const auto tr = oracle::power_law_trace(1.0, 0.5, 0.0, 0.999, 400);
        const double t_star = estimate_t_star(tr, 0.0);
        CHECK(std::abs(t_star - 1.0) <= 1e-6);
        RateFitContext ctx;
        ctx.s = 0.5;
        const auto rep = fit_rate_models(tr, t_star, ctx);
        CHECK(std::abs(rep.alpha_fit - 0.5) <= 1e-6);
    }
    SECTION("log-log data: power-law model still localizes T* to 1e-3") {
        // the slowly varying factor biases T* by ~ tau_lo; approach to 1e-4
        const auto tr = oracle::loglog_trace(1.0, 0.0, 0.9999, 600);
        const double t_star = estimate_t_star(tr, 0.0);
        CHECK(std::abs(t_star - 1.0) <= 1e-3);
    }
    SECTION("1% multiplicative noise: T* within 1e-2 over 100 seeds") {
        double worst = 0.0;
        for (unsigned seed = 1; seed <= 100; ++seed) {
            auto tr = oracle::power_law_trace(1.0, 0.5, 0.0, 0.995, 300);
            oracle::perturb_grad(tr, 0.01, seed);
            const double t_star = estimate_t_star(tr, 0.0);
            worst = std::max(worst, std::abs(t_star - 1.0));
        }
        CHECK(worst <= 1e-2);
    }
    SECTION("time rescaling is equivariant") {
        auto tr = oracle::power_law_trace(1.0, 0.55, 0.0, 0.99, 250);
        oracle::perturb_grad(tr, 0.003, 42);
        const double t1 = estimate_t_star(tr, 0.0);
        Trace scaled = tr;
        const double c = 4.0;
        for (auto& r : scaled) r.t *= c;
        const double t2 = estimate_t_star(scaled, 0.0);
        CHECK(std::abs(t2 - c * t1) <= 1e-9 * c * t1);
    }
    SECTION("too few samples is a contract violation") {
        const auto tr = oracle::power_law_trace(1.0, 0.5, 0.0, 0.9, 10);
        CHECK_THROWS_AS(estimate_t_star(tr, 0.0), contract_error);
    }
    SECTION("flat data cannot be fit") {
        Trace tr;
        for (int i = 0; i < 100; ++i) {
            DiagnosticsRecord r;
            r.t = 0.01 * i;
            r.grad_norm_sq = 2.0;
            tr.push_back(r);
        }
        CHECK_THROWS_AS(estimate_t_star(tr, 0.0), inconclusive_error);
    }
}

TEST_CASE("rate model discrimination", "[blowup]") {
    SECTION("pure log-log data prefers model B inside the band") {
        const auto tr = oracle::loglog_trace(1.0, 0.0, 0.9999, 800);
        const auto rep = fit_rate_models(tr, 1.0, RateFitContext{0.5, false, 0.05, 1e-6, 0.4, 0.7});
        CHECK(rep.loglog_gain > 0.5);
        CHECK(rep.window_verdict == WindowVerdict::log_log_consistent);
        CHECK(rep.rms_loglog < rep.rms_power);
        CHECK(rep.t_star > rep.fit_hi);
        CHECK(rep.fit_hi >= rep.fit_lo);
    }
    SECTION("alpha = 1 data (the explicit-solution rate) lands inconclusive") {
        const auto tr = oracle::power_law_trace(1.0, 1.0, 0.0, 0.9995, 600);
        auto rep = fit_rate_models(tr, 1.0, RateFitContext{0.5, false, 0.05, 1e-6, 0.4, 0.7});
        CHECK(std::abs(rep.alpha_fit - 1.0) <= 0.02);
        CHECK(rep.window_verdict == WindowVerdict::inconclusive);
    }
    SECTION("alpha = 0.3 with subcritical mass at s = 0.6 trips the exclusion alarm") {
        const auto tr = oracle::power_law_trace(1.0, 0.3, 0.0, 0.9995, 600);
        auto rep = fit_rate_models(tr, 1.0, RateFitContext{0.6, true, 0.05, 1e-6, 0.4, 0.7});
        CHECK(std::abs(rep.alpha_fit - 0.3) <= 0.01);
        CHECK(rep.window_verdict == WindowVerdict::excluded_by_thm4);
        // same data without the mass flag: merely a lower-bound violation
        auto rep2 = fit_rate_models(tr, 1.0, RateFitContext{0.6, false, 0.05, 1e-6, 0.4, 0.7});
        CHECK(rep2.window_verdict == WindowVerdict::lower_bound_violated);
    }
    SECTION("model A recovery within 2% under 1% noise") {
        std::mt19937 pick(7);
        for (unsigned seed = 200; seed < 210; ++seed) {
            const double alpha = 0.45 + 0.3 * (seed - 200) / 10.0;
            auto tr = oracle::power_law_trace(1.0, alpha, 0.0, 0.999, 500);
            oracle::perturb_grad(tr, 0.01, seed);
            const auto rep = fit_rate_models(tr, 1.0, RateFitContext{});
            REQUIRE(std::abs(rep.alpha_fit - alpha) <= 0.02 * std::max(1.0, alpha));
        }
    }
    SECTION("window shorter than half a decade is inconclusive") {
        // samples only over tau in [1e-3, 2e-3]
        Trace tr;
        for (int i = 0; i <= 100; ++i) {
            DiagnosticsRecord r;
            const double tau = 1e-3 * (1.0 + i / 100.0);
            r.t = 1.0 - tau;
            r.grad_norm_sq = 1.0 / tau;
            tr.push_back(r);
        }
        std::sort(tr.begin(), tr.end(),
                  [](const DiagnosticsRecord& a, const DiagnosticsRecord& b) { return a.t < b.t; });
        auto rep = fit_rate_models(tr, 1.0, RateFitContext{});
        CHECK(rep.window_verdict == WindowVerdict::inconclusive);
    }
}

TEST_CASE("rate window membership arithmetic", "[blowup]") {
    // worked examples, zero tolerance
    CHECK(rate_window_check(0.3, 0.3, 0.6) == true);
    CHECK(rate_window_check(0.5, 0.5, 0.4) == true);
    CHECK(rate_window_check(2.0, 1.0, 0.5) == false);

    CHECK_THROWS_AS(rate_window_check(0.5, 0.5, 1.0), domain_error);
    CHECK_THROWS_AS(rate_window_check(0.5, 0.5, 0.0), domain_error);
    CHECK_THROWS_AS(rate_window_check(0.5, 0.5, -0.2), domain_error);

    SECTION("monotone in alpha: one true-to-false flip past beta") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> uni(0.05, 0.95);
        for (int trial = 0; trial < 100; ++trial) {
            const double s = uni(rng);
            const double beta = uni(rng) / (2.0 * s);
            bool seen_false_after_true = false;
            bool prev = false;
            for (double alpha = 0.0; alpha <= 2.0; alpha += 0.01) {
                const bool now = rate_window_check(alpha, beta, s);
                if (prev && !now) seen_false_after_true = true;
                REQUIRE_FALSE((seen_false_after_true && now));  // never flips back
                prev = now;
            }
        }
    }
}

TEST_CASE("report serializes to the reporting schema", "[blowup]") {
    BlowupReport r;
    r.detected = true;
    r.t_star = 1.25;
    r.alpha_fit = 0.55;
    r.loglog_gain = 0.12;
    r.window_verdict = WindowVerdict::log_log_consistent;
    r.fit_lo = 1.0;
    r.fit_hi = 1.2;
    r.rms_power = 0.01;
    r.rms_loglog = 0.008;
    const std::string j = to_json(r);
    CHECK(j.find("\"detected\": true") != std::string::npos);
    CHECK(j.find("\"window_verdict\": \"log-log-consistent\"") != std::string::npos);
    CHECK(j.find("\"fit_window\": [1, 1.2]") != std::string::npos);
    CHECK(j.find("\"rms\": {\"power\":") != std::string::npos);
}
