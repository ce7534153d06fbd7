#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fnls/diagnostics.hpp"

namespace fnls {

enum class WindowVerdict { excluded_by_thm4, log_log_consistent, lower_bound_violated, inconclusive };

inline const char* to_string(WindowVerdict v) {
    switch (v) {
        case WindowVerdict::excluded_by_thm4: return "excluded-by-thm4";
        case WindowVerdict::log_log_consistent: return "log-log-consistent";
        case WindowVerdict::lower_bound_violated: return "lower-bound-violated";
        case WindowVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct BlowupReport {
    bool detected = false;
    double t_star = 0.0;
    double alpha_fit = 0.0;
    double loglog_gain = 0.0;
    WindowVerdict window_verdict = WindowVerdict::inconclusive;
    double fit_lo = 0.0, fit_hi = 0.0;
    double rms_power = 0.0, rms_loglog = 0.0;
};

struct BlowupDetection {
    bool detected = false;
    double t_detect = 0.0;
};

// Detected iff grad_norm_sq grows by >= growth_factor from its running
// minimum while the spectral tail stays below the resolution threshold.
inline BlowupDetection detect_blowup(const Trace& trace, double growth_factor = 1e6,
                                     double tail_threshold = 1e-6) {
    if (trace.empty()) throw contract_error("detect_blowup on an empty trace");
    double running_min = std::numeric_limits<double>::infinity();
    for (const auto& r : trace) {
        if (r.tail_fraction > tail_threshold) break;  // only resolved samples count
        running_min = std::min(running_min, r.grad_norm_sq);
        if (running_min > 0.0 && r.grad_norm_sq >= growth_factor * running_min)
            return {true, r.t};
    }
    return {false, 0.0};
}

namespace detail {

struct PowerFit {
    double alpha = 0.0;  // grad_norm ~ (T*-t)^{-alpha}
    double logc = 0.0;
    double rss = 0.0;
};

// Least squares of y_i = logc + 2 alpha log(T - t_i) with y = log(1/grad^2).
inline PowerFit fit_power_given_tstar(const std::vector<double>& t, const std::vector<double>& y,
                                      double T) {
    const std::size_t n = t.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(T - t[i]);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double den = n * sxx - sx * sx;
    PowerFit f;
    const double slope = (den != 0.0) ? (n * sxy - sx * sy) / den : 0.0;
    f.logc = (sy - slope * sx) / static_cast<double>(n);
    f.alpha = 0.5 * slope;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.logc + slope * std::log(T - t[i]));
        f.rss += r * r;
    }
    return f;
}

inline double golden_minimize(double lo, double hi, int iters,
                              const std::function<double(double)>& f) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// Extrapolate the blow-up time by fitting 1/grad_norm^2 ~ c (T*-t)^{2 alpha}
// jointly over (c, alpha, T*): inner linear least squares, outer golden
// section on T*. Uses resolved samples with t >= t_lo.
inline double estimate_t_star(const Trace& trace, double t_lo, double tail_threshold = 1e-6) {
    std::vector<double> t, y;
    for (const auto& r : trace) {
        if (r.t < t_lo || r.tail_fraction > tail_threshold || !(r.grad_norm_sq > 0.0)) continue;
        t.push_back(r.t);
        y.push_back(std::log(1.0 / r.grad_norm_sq));
    }
    if (t.size() < 20) throw contract_error("estimate_t_star needs >= 20 resolved samples");

    const double t_last = t.back();
    const double span = t_last - t.front();
    if (!(span > 0.0)) throw contract_error("estimate_t_star needs a nontrivial window");
    const double lo = t_last + 1e-12 * span;
    const double hi = t_last + 4.0 * span;
    auto rss = [&](double T) { return detail::fit_power_given_tstar(t, y, T).rss; };

    // data with no growth signal has nothing to localize
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    if (var <= 1e-20 * static_cast<double>(y.size()) * (1.0 + mean * mean))
        throw inconclusive_error("blow-up time fit: gradient history is flat");
    const double probe_lo = rss(t_last + 1e-3 * span);
    const double probe_hi = rss(hi);
    if (std::abs(probe_lo - probe_hi) <= 1e-12 * var)
        throw inconclusive_error("blow-up time fit: objective is flat over the search bracket");

    return detail::golden_minimize(lo, hi, 200, rss);
}

// 0 < beta < 1/(2s) and beta(1+s) - 1/2 < alpha <= beta.
inline bool rate_window_check(double alpha, double beta, double s) {
    if (!(s > 0.0) || !(s < 1.0)) throw domain_error("rate_window_check needs s in (0,1)");
    return beta > 0.0 && beta < 1.0 / (2.0 * s) && beta * (1.0 + s) - 0.5 < alpha && alpha <= beta;
}

struct RateFitContext {
    double s = 0.5;
    bool subcritical_mass = false;  // ||u0|| <= ||Q||
    double fit_tolerance = 0.05;
    double tail_threshold = 1e-6;
    double loglog_band_lo = 0.4, loglog_band_hi = 0.7;
};

// Fit the pure power law (model A) and the fixed-shape log-log law (model B)
// over the last resolved decade of (T*-t), and classify. Discrimination at
// desk scale is weak; the report always carries both residuals.
inline BlowupReport fit_rate_models(const Trace& trace, double t_star, const RateFitContext& ctx) {
    BlowupReport rep;
    rep.t_star = t_star;
    rep.detected = detect_blowup(trace, 1e6, ctx.tail_threshold).detected;

    std::vector<double> t, logg;
    for (const auto& r : trace) {
        if (r.tail_fraction > ctx.tail_threshold || !(r.grad_norm_sq > 0.0)) continue;
        if (!(t_star - r.t > 0.0)) continue;
        t.push_back(r.t);
        logg.push_back(0.5 * std::log(r.grad_norm_sq));
    }
    if (t.size() < 4) {
        rep.window_verdict = WindowVerdict::inconclusive;
        return rep;
    }

    // window: last decade of tau = T* - t
    const double tau_min = t_star - t.back();
    std::vector<double> wt, wy;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t_star - t[i] <= 10.0 * tau_min) {
            wt.push_back(t[i]);
            wy.push_back(logg[i]);
        }
    rep.fit_lo = wt.front();
    rep.fit_hi = wt.back();
    const double tau_max = t_star - wt.front();
    if (wt.size() < 4 || tau_max / tau_min < std::sqrt(10.0)) {
        rep.window_verdict = WindowVerdict::inconclusive;
        return rep;
    }

    auto fit_alpha = [&](std::size_t lo, std::size_t hi, double& rms) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            const double x = std::log(t_star - wt[i]);
            sx += x;
            sy += wy[i];
            sxx += x * x;
            sxy += x * wy[i];
        }
        const double den = n * sxx - sx * sx;
        const double slope = (den != 0.0) ? (n * sxy - sx * sy) / den : 0.0;
        const double c = (sy - slope * sx) / n;
        double rss = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double r = wy[i] - (c + slope * std::log(t_star - wt[i]));
            rss += r * r;
        }
        rms = std::sqrt(rss / n);
        return -slope;  // grad ~ tau^{-alpha}
    };

    rep.alpha_fit = fit_alpha(0, wt.size(), rep.rms_power);

    // model B: log grad = 1/2 log( log|log tau| / tau ) + c, only c free
    bool model_b_ok = true;
    double mean_dev = 0.0;
    std::vector<double> shape(wt.size());
    for (std::size_t i = 0; i < wt.size(); ++i) {
        const double tau = t_star - wt[i];
        const double ll = std::log(std::abs(std::log(tau)));
        if (!(ll > 0.0)) {
            model_b_ok = false;
            break;
        }
        shape[i] = 0.5 * std::log(ll / tau);
        mean_dev += wy[i] - shape[i];
    }
    if (model_b_ok) {
        mean_dev /= static_cast<double>(wt.size());
        double rss = 0.0;
        for (std::size_t i = 0; i < wt.size(); ++i) {
            const double r = wy[i] - shape[i] - mean_dev;
            rss += r * r;
        }
        rep.rms_loglog = std::sqrt(rss / static_cast<double>(wt.size()));
        rep.loglog_gain =
            (rep.rms_power - rep.rms_loglog) / std::max(rep.rms_power, 1e-300);
    } else {
        rep.rms_loglog = std::numeric_limits<double>::quiet_NaN();
        rep.loglog_gain = 0.0;
    }

    // "persistently" below the lower bound: full window and both halves agree
    double rms_half;
    const double alpha_h1 = fit_alpha(0, wt.size() / 2, rms_half);
    const double alpha_h2 = fit_alpha(wt.size() / 2, wt.size(), rms_half);
    const double lower = 0.5 - ctx.fit_tolerance;

    if (ctx.s < 1.0 && ctx.subcritical_mass &&
        rate_window_check(rep.alpha_fit, rep.alpha_fit, ctx.s))
        rep.window_verdict = WindowVerdict::excluded_by_thm4;
    else if (rep.loglog_gain > 0.0 && rep.alpha_fit >= ctx.loglog_band_lo &&
             rep.alpha_fit <= ctx.loglog_band_hi)
        rep.window_verdict = WindowVerdict::log_log_consistent;
    else if (rep.alpha_fit < lower && alpha_h1 < lower && alpha_h2 < lower)
        rep.window_verdict = WindowVerdict::lower_bound_violated;
    else
        rep.window_verdict = WindowVerdict::inconclusive;
    return rep;
}

inline std::string to_json(const BlowupReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "{\"detected\": %s, \"t_star\": %.17g, \"alpha_fit\": %.17g, "
                  "\"loglog_gain\": %.17g, \"window_verdict\": \"%s\", "
                  "\"fit_window\": [%.17g, %.17g], \"rms\": {\"power\": %.17g, \"loglog\": %.17g}}",
                  r.detected ? "true" : "false", r.t_star, r.alpha_fit, r.loglog_gain,
                  to_string(r.window_verdict), r.fit_lo, r.fit_hi, r.rms_power, r.rms_loglog);
    return std::string(buf);
}

}  // namespace fnls
