#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>

#include "fnls/fft.hpp"
#include "fnls/field.hpp"

namespace fnls {

// Forward transform: physical samples -> Fourier coefficients of e^{i k.x}.
// Normalized so a constant field c maps to coefficient c at k = 0.
inline ComplexField forward_transform(const ComplexField& f) {
    if (f.space() != Space::physical)
        throw contract_error("forward_transform expects a physical-space field");
    std::vector<complex> out;
    detail::forward_fft(f.grid(), f.values(), out);
    return f.with_values(std::move(out), Space::spectral);
}

inline ComplexField inverse_transform(const ComplexField& f) {
    if (f.space() != Space::spectral)
        throw contract_error("inverse_transform expects a spectral-space field");
    std::vector<complex> out;
    detail::backward_fft(f.grid(), f.values(), out);
    return f.with_values(std::move(out), Space::physical);
}

inline ComplexField to_space(const ComplexField& f, Space s) {
    if (f.space() == s) return f;
    return s == Space::spectral ? forward_transform(f) : inverse_transform(f);
}

// A Fourier multiplier g(k): acts diagonally on spectral coefficients.
struct Multiplier {
    std::function<complex(const double* k, double k_sq)> symbol;
    std::string description;
};

namespace detail {

inline std::string format_wavevector(const double* k, int d) {
    std::string s = "(";
    char buf[32];
    for (int a = 0; a < d; ++a) {
        std::snprintf(buf, sizeof buf, "%g", k[a]);
        s += buf;
        if (a + 1 < d) s += ", ";
    }
    return s + ")";
}

// Apply symbol(k) to spectral values in place.
template <typename Symbol>
void apply_symbol(const Grid& g, std::vector<complex>& vals, Symbol&& symbol,
                  const char* what) {
    std::size_t idx[4];
    double k[4];
    for (std::size_t i = 0; i < vals.size(); ++i) {
        g.unravel(i, idx);
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            k[a] = g.wavenumber(a, idx[a]);
            k2 += k[a] * k[a];
        }
        const complex s = symbol(k, k2);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw numeric_error(std::string("non-finite symbol '") + what + "' at k = " +
                                format_wavevector(k, g.dim()));
        vals[i] *= s;
    }
}

}  // namespace detail

// Pointwise product symbol(k) * f_hat(k); output space matches the input space.
inline ComplexField apply_multiplier(const ComplexField& f, const Multiplier& m) {
    ComplexField spec = to_space(f, Space::spectral);
    detail::apply_symbol(spec.grid(), spec.values(), m.symbol, m.description.c_str());
    return f.space() == Space::physical ? inverse_transform(spec) : spec;
}

// (-Delta)^order: symbol |k|^(2*order). By continuity |0|^(2*order) = 0 for
// order > 0; for order = 0 the operator is the identity (pow(0,0) = 1).
inline ComplexField fractional_laplacian(const ComplexField& f, double order) {
    if (!(order >= 0.0) || !std::isfinite(order))
        throw domain_error("fractional_laplacian order must be finite and >= 0");
    ComplexField spec = to_space(f, Space::spectral);
    detail::apply_symbol(
        spec.grid(), spec.values(),
        [order](const double*, double k2) { return complex(std::pow(k2, order), 0.0); },
        "(-Delta)^order");
    return f.space() == Space::physical ? inverse_transform(spec) : spec;
}

// Exact propagator of u_t = i Delta u - a (-Delta)^s u:
// each coefficient is multiplied by e^{-i|k|^2 t - a|k|^{2s} t}.
// An L2 isometry for a = 0 and a strict contraction on nonconstant fields for a > 0.
inline ComplexField linear_propagate(const ComplexField& f, double t, double a, double s) {
    if (a < 0.0) throw domain_error("friction coefficient a must be >= 0");
    if (s < 0.0) throw domain_error("dissipation order s must be >= 0");
    if (t < 0.0 && a > 0.0)
        throw domain_error("backward propagation is ill-posed for a > 0");
    ComplexField spec = to_space(f, Space::spectral);
    detail::apply_symbol(
        spec.grid(), spec.values(),
        [t, a, s](const double*, double k2) {
            const double damp = (a > 0.0) ? std::exp(-a * std::pow(k2, s) * t) : 1.0;
            const double phase = -k2 * t;
            return complex(damp * std::cos(phase), damp * std::sin(phase));
        },
        "exp(i Delta t - a(-Delta)^s t)");
    return f.space() == Space::physical ? inverse_transform(spec) : spec;
}

// Largest retained |k|-index per axis under the 2/3 rule.
inline std::size_t dealias_cutoff_index(const Grid& g, int axis) { return g.points(axis) / 3; }

// Zero every coefficient with any per-axis |k|-index above the 2/3 cutoff.
inline ComplexField dealias(const ComplexField& f) {
    ComplexField spec = to_space(f, Space::spectral);
    const Grid& g = spec.grid();
    std::size_t idx[4];
    for (std::size_t i = 0; i < spec.size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t n = g.points(a);
            const std::size_t m = idx[a];
            const std::size_t abs_m = (m <= n / 2) ? m : n - m;
            if (abs_m > dealias_cutoff_index(g, a)) {
                spec[i] = complex(0.0, 0.0);
                break;
            }
        }
    }
    return f.space() == Space::physical ? inverse_transform(spec) : spec;
}

// ||u||_{L2}^2 over the box. Physical: rectangle rule (exact for the
// trigonometric interpolant); spectral: Parseval.
inline double l2_norm_sq(const ComplexField& f) {
    double s = 0.0;
    for (const complex& v : f.values()) s += std::norm(v);
    return f.space() == Space::physical ? s * f.grid().cell_volume()
                                        : s * f.grid().box_volume();
}

// ||(-Delta)^{sigma/2} u||_{L2}^2 = (2L)^d sum |k|^{2 sigma} |u_hat|^2.
inline double sobolev_seminorm_sq(const ComplexField& f, double sigma) {
    ComplexField spec = to_space(f, Space::spectral);
    const Grid& g = spec.grid();
    std::size_t idx[4];
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        g.unravel(i, idx);
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double k = g.wavenumber(a, idx[a]);
            k2 += k * k;
        }
        s += std::pow(k2, sigma) * std::norm(spec[i]);
    }
    return s * g.box_volume();
}

inline double grad_norm_sq(const ComplexField& f) { return sobolev_seminorm_sq(f, 1.0); }

// Fraction of spectral mass carried by modes in the top sixth of the retained
// (dealiased) band on any axis. The resolution-exhaustion indicator.
inline double tail_fraction(const ComplexField& f) {
    ComplexField spec = to_space(f, Space::spectral);
    const Grid& g = spec.grid();
    std::size_t idx[4];
    double total = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double p = std::norm(spec[i]);
        total += p;
        g.unravel(i, idx);
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t n = g.points(a);
            const std::size_t m = idx[a];
            const std::size_t abs_m = (m <= n / 2) ? m : n - m;
            if (abs_m > 5 * dealias_cutoff_index(g, a) / 6) {
                tail += p;
                break;
            }
        }
    }
    return total > 0.0 ? tail / total : 0.0;
}

// Integral of a pointwise function of the physical samples, rectangle rule.
template <typename F>
double integrate_physical(const ComplexField& f, F&& fn) {
    if (f.space() != Space::physical)
        throw contract_error("integrate_physical expects a physical-space field");
    double s = 0.0;
    for (const complex& v : f.values()) s += fn(v);
    return s * f.grid().cell_volume();
}

}  // namespace fnls
