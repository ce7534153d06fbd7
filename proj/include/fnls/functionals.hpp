#pragma once

#include <array>
#include <cmath>

#include "fnls/spectral.hpp"

namespace fnls {

// |u|^{4/d} as a function of m2 = |u|^2. Integer-power fast paths for the
// quintic (d=1) and cubic (d=2) cases; all paths agree with pow(m2, 2/d)
// to within a few ulp.
inline double nonlinear_power(double m2, int d) {
    switch (d) {
        case 1: return m2 * m2;
        case 2: return m2;
        case 3: return std::cbrt(m2 * m2);
        case 4: return std::sqrt(m2);
        default: return std::pow(m2, 2.0 / d);
    }
}

// |u|^{4/d + 2} = m2 * |u|^{4/d}.
inline double nonlinear_density(double m2, int d) { return m2 * nonlinear_power(m2, d); }

inline double mass_sq(const ComplexField& u) { return l2_norm_sq(u); }

// E(u) = 1/2 ||grad u||^2 - d/(4+2d) ||u||_{L^{4/d+2}}^{4/d+2}
inline double energy(const ComplexField& u) {
    const int d = u.grid().dim();
    const ComplexField phys = to_space(u, Space::physical);
    const double quartic =
        integrate_physical(phys, [d](const complex& v) { return nonlinear_density(std::norm(v), d); });
    return 0.5 * grad_norm_sq(phys) - (static_cast<double>(d) / (4.0 + 2.0 * d)) * quartic;
}

// P(u) = Im int grad(u) conj(u) dx, componentwise: (2L)^d sum k_j |u_hat|^2.
inline std::array<double, 4> momentum(const ComplexField& u) {
    const ComplexField spec = to_space(u, Space::spectral);
    const Grid& g = spec.grid();
    std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};
    std::size_t idx[4];
    for (std::size_t i = 0; i < spec.size(); ++i) {
        g.unravel(i, idx);
        const double w = std::norm(spec[i]);
        for (int a = 0; a < g.dim(); ++a) p[static_cast<std::size_t>(a)] += g.wavenumber(a, idx[a]) * w;
    }
    const double vol = g.box_volume();
    for (auto& c : p) c *= vol;
    return p;
}

}  // namespace fnls
