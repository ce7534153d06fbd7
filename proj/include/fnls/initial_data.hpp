#pragma once

#include <cmath>
#include <random>
#include <string>

#include "fnls/ground_state.hpp"

namespace fnls {

enum class InitialKind { soliton, scaled_soliton, pseudo_conformal, gaussian, boosted_soliton };

inline const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::soliton: return "soliton";
        case InitialKind::scaled_soliton: return "scaled_soliton";
        case InitialKind::pseudo_conformal: return "pseudo_conformal";
        case InitialKind::gaussian: return "gaussian";
        case InitialKind::boosted_soliton: return "boosted_soliton";
    }
    return "?";
}

inline InitialKind initial_kind_from_string(const std::string& s) {
    if (s == "soliton") return InitialKind::soliton;
    if (s == "scaled_soliton") return InitialKind::scaled_soliton;
    if (s == "pseudo_conformal") return InitialKind::pseudo_conformal;
    if (s == "gaussian") return InitialKind::gaussian;
    if (s == "boosted_soliton") return InitialKind::boosted_soliton;
    throw domain_error("unknown initial data kind '" + s + "'");
}

struct InitialData {
    InitialKind kind = InitialKind::soliton;
    std::shared_ptr<const Grid> grid;

    double delta = 0.0;        // scaled_soliton: mass excess over ||Q||
    double t0 = -1.0;          // pseudo_conformal: negative initial time
    double velocity[4] = {0, 0, 0, 0};  // boosted_soliton: each v_j/2 snapped to the lattice
    double amplitude = 1.0;    // gaussian
    double width = 1.0;        // gaussian

    double noise_amp = 0.0;    // optional smooth perturbation, relative L2 size
    std::uint64_t noise_seed = 0;

    double groundstate_tol = 1e-10;
};

struct InitialDataResult {
    ComplexField field;
    double requested_l2 = 0.0;  // L2 norm the family prescribes
    double actual_l2 = 0.0;     // as constructed on the grid
    double actual_velocity[4] = {0, 0, 0, 0};
};

namespace detail {

// Smooth random perturbation: Gaussian coefficients on the lowest octave of
// modes, scaled to a prescribed relative L2 size. Deterministic per seed.
inline void add_smooth_noise(ComplexField& u_phys, double rel_amp, std::uint64_t seed) {
    if (rel_amp == 0.0) return;
    const Grid& g = u_phys.grid();
    ComplexField noise(u_phys.grid_ptr(), Space::spectral);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t idx[4];
    for (std::size_t i = 0; i < noise.size(); ++i) {
        g.unravel(i, idx);
        bool low = true;
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t n = g.points(a);
            const std::size_t m = idx[a];
            const std::size_t abs_m = (m <= n / 2) ? m : n - m;
            if (abs_m > n / 16) {
                low = false;
                break;
            }
        }
        if (low) noise[i] = complex(gauss(rng), gauss(rng));
    }
    const double target = rel_amp * std::sqrt(l2_norm_sq(u_phys));
    const double have = std::sqrt(l2_norm_sq(noise));
    if (have == 0.0) return;
    ComplexField noise_phys = inverse_transform(noise);
    const double scale = target / have;
    for (std::size_t i = 0; i < u_phys.size(); ++i) u_phys[i] += scale * noise_phys[i];
}

}  // namespace detail

// Build the initial datum family member on its grid. Families involving Q pull
// the ground state for that grid from the shared table (solving on demand).
inline InitialDataResult make_initial_data(const InitialData& spec) {
    if (!spec.grid) throw contract_error("initial data spec carries no grid");
    const Grid& g = *spec.grid;
    const int d = g.dim();
    auto& table = GroundStateTable::instance();

    InitialDataResult out{ComplexField(spec.grid, Space::physical), 0.0, 0.0, {0, 0, 0, 0}};

    switch (spec.kind) {
        case InitialKind::soliton: {
            auto gs = table.get_or_solve(spec.grid, spec.groundstate_tol);
            out.field = gs->Q;
            out.requested_l2 = gs->l2_norm();
            break;
        }
        case InitialKind::scaled_soliton: {
            auto gs = table.get_or_solve(spec.grid, spec.groundstate_tol);
            const double mQ = gs->l2_norm();
            const double c = (mQ + spec.delta) / mQ;
            out.field = gs->Q;
            for (auto& v : out.field.values()) v *= c;
            out.requested_l2 = mQ + spec.delta;
            break;
        }
        case InitialKind::pseudo_conformal: {
            if (spec.t0 == 0.0)
                throw singularity_error("pseudo-conformal profile is singular at t0 = 0");
            const double at0 = std::abs(spec.t0);
            // Q(x/t0) sampled on this lattice equals the ground state solved on
            // the box scaled by 1/|t0|; the rescaled solve must still resolve Q
            // and the chirp e^{-i|x|^2/4t0} must fit under the dealias cutoff.
            const double k_cut_rescaled =
                Grid::pi() * static_cast<double>(dealias_cutoff_index(g, 0)) / (g.half_period(0) / at0);
            if (k_cut_rescaled < 20.0)
                throw resolution_error("pseudo-conformal width |t0| too small for this grid");
            double max_chirp = 0.0;
            for (int a = 0; a < d; ++a) max_chirp += std::pow(g.half_period(a) / (2.0 * at0), 2);
            max_chirp = std::sqrt(max_chirp);
            const double k_cut = Grid::pi() * static_cast<double>(dealias_cutoff_index(g, 0)) / g.half_period(0);
            if (max_chirp > 0.9 * k_cut)
                throw resolution_error("pseudo-conformal chirp exceeds the resolved band");

            std::vector<std::size_t> n(static_cast<std::size_t>(d));
            std::vector<double> L(static_cast<std::size_t>(d));
            for (int a = 0; a < d; ++a) {
                n[static_cast<std::size_t>(a)] = g.points(a);
                L[static_cast<std::size_t>(a)] = g.half_period(a) / at0;
            }
            auto rescaled = std::make_shared<const Grid>(d, n, L);
            auto gs = table.get_or_solve(rescaled, spec.groundstate_tol);

            const double amp = std::pow(at0, -0.5 * d);
            std::size_t idx[4];
            for (std::size_t i = 0; i < out.field.size(); ++i) {
                g.unravel(i, idx);
                double x2 = 0.0;
                for (int a = 0; a < d; ++a) {
                    const double x = g.coordinate(a, idx[a]);
                    x2 += x * x;
                }
                // focusing chirp: the t0 < 0 profile sharpens toward t = 0
                const double phase = x2 / (4.0 * spec.t0) - 1.0 / spec.t0;
                out.field[i] = amp * gs->Q[i].real() * complex(std::cos(phase), std::sin(phase));
            }
            out.requested_l2 = gs->l2_norm();
            break;
        }
        case InitialKind::gaussian: {
            const double A = spec.amplitude, w = spec.width;
            if (!(w > 0.0)) throw domain_error("gaussian width must be positive");
            out.field = sample_physical(spec.grid, [A, w](const double* x, int dim) {
                double r2 = 0.0;
                for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
                return complex(A * std::exp(-r2 / (2.0 * w * w)), 0.0);
            });
            out.requested_l2 =
                std::abs(A) * std::pow(w * std::sqrt(Grid::pi()), 0.5 * d);
            break;
        }
        case InitialKind::boosted_soliton: {
            auto gs = table.get_or_solve(spec.grid, spec.groundstate_tol);
            double v[4] = {0, 0, 0, 0};
            for (int a = 0; a < d; ++a) {
                // snap v/2 to the wavenumber lattice so the phase is periodic
                const double k0 = Grid::pi() / g.half_period(a);
                const double m = std::round(spec.velocity[a] / (2.0 * k0));
                v[a] = 2.0 * k0 * m;
                out.actual_velocity[a] = v[a];
            }
            std::size_t idx[4];
            for (std::size_t i = 0; i < out.field.size(); ++i) {
                g.unravel(i, idx);
                double phase = 0.0;
                for (int a = 0; a < d; ++a) phase += 0.5 * v[a] * g.coordinate(a, idx[a]);
                out.field[i] = gs->Q[i].real() * complex(std::cos(phase), std::sin(phase));
            }
            out.requested_l2 = gs->l2_norm();
            break;
        }
    }

    detail::add_smooth_noise(out.field, spec.noise_amp, spec.noise_seed);
    out.actual_l2 = std::sqrt(l2_norm_sq(out.field));
    return out;
}

}  // namespace fnls
