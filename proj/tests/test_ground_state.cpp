#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fnls/ground_state.hpp"
#include "oracles.hpp"

using namespace fnls;

namespace {

// localized wave packet: gaussian envelope times a low-order trig polynomial,
// the discrete stand-in for an H^1(R^d) test function on the box
ComplexField random_packet(const std::shared_ptr<const Grid>& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double w = 0.8 + 1.2 * uni(rng);
    const double amp = 0.2 + 1.3 * uni(rng);
    const int modes = 1 + static_cast<int>(3.0 * uni(rng));
    std::vector<std::array<double, 4>> kvecs;
    std::vector<complex> coeffs;
    for (int m = 0; m < modes; ++m) {
        std::array<double, 4> k{};
        for (int a = 0; a < g->dim(); ++a) k[a] = std::round(4.0 * (uni(rng) - 0.5));
        kvecs.push_back(k);
        coeffs.push_back(complex(gauss(rng), gauss(rng)));
    }
    return sample_physical(g, [&](const double* x, int d) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
        complex mix(0.0, 0.0);
        for (std::size_t m = 0; m < kvecs.size(); ++m) {
            double ph = 0.0;
            for (int a = 0; a < d; ++a) ph += kvecs[m][a] * x[a];
            mix += coeffs[m] * complex(std::cos(ph), std::sin(ph));
        }
        return amp * std::exp(-r2 / (2.0 * w * w)) * mix;
    });
}

}  // namespace

TEST_CASE("closed form 3^{1/4} sech^{1/2}(2x) solves the profile equation", "[groundstate]") {
    // oracle self-check, run before anything depends on the closed form
    for (double x : {0.0, 0.3, 1.0, 2.5, 4.0})
        CHECK(std::abs(oracle::q1d_ode_residual(x)) < 1e-8);
    // and its exact integrals against plain quadrature
    const double mass = oracle::simpson([](double x) { return oracle::q1d(x) * oracle::q1d(x); },
                                        -30.0, 30.0, 20000);
    CHECK(std::abs(mass - oracle::q1d_mass_sq()) < 1e-10);
}

TEST_CASE("d=1 solver matches the closed form", "[groundstate]") {
    auto grid = make_grid(1, 2048, 24.0);
    const GroundState gs = solve_ground_state(grid, 1e-10);

    CHECK(gs.residual <= 1e-10);
    CHECK(gs.residual <= 1e-10 * gs.l2_norm());

    double worst = 0.0, worst_imag = 0.0, min_val = 1e30;
    for (std::size_t i = 0; i < gs.Q.size(); ++i) {
        const double x = grid->coordinate(0, i);
        worst = std::max(worst, std::abs(gs.Q[i].real() - oracle::q1d(x)));
        worst_imag = std::max(worst_imag, std::abs(gs.Q[i].imag()));
        min_val = std::min(min_val, gs.Q[i].real());
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_imag <= 1e-12);
    CHECK(min_val > 0.0);  // positive at every sample

    CHECK(std::abs(gs.mass_sq - oracle::q1d_mass_sq()) < 1e-9);
    CHECK(std::abs(gs.grad_norm_sq - oracle::q1d_grad_sq()) < 1e-9);
    CHECK(std::abs(gs.energy) <= 1e-6 * gs.grad_norm_sq);
}

TEST_CASE("d=1 solve on the desk-scale box carries the periodic image error", "[groundstate]") {
    // at L = 16 the periodic solution differs from the closed form by the
    // image tail ~ e^{-16}; the deviation must stay near that scale
    auto grid = make_grid(1, 1024, 16.0);
    const GroundState gs = solve_ground_state(grid, 1e-10);
    double worst = 0.0;
    for (std::size_t i = 0; i < gs.Q.size(); ++i)
        worst = std::max(worst, std::abs(gs.Q[i].real() - oracle::q1d(grid->coordinate(0, i))));
    CHECK(worst < 5e-7);
    CHECK(gs.residual <= 1e-10);
}

TEST_CASE("solver reports non-convergence with its last residual", "[groundstate]") {
    auto grid = make_grid(1, 256, 16.0);
    try {
        solve_ground_state(grid, 1e-10, 3);
        FAIL("expected iteration_error");
    } catch (const iteration_error& e) {
        CHECK(e.iterations == 3);
        CHECK(e.last_residual > 0.0);
    }
}

TEST_CASE("critical mass values and cache determinism", "[groundstate]") {
    auto& table = GroundStateTable::instance();
    table.ensure_canonical(1);
    const double m1 = critical_mass(1);
    CHECK(std::abs(m1 - 1.6494542) < 1e-6);
    CHECK(critical_mass(1) == m1);  // cached: bit-identical

    CHECK_THROWS_AS(critical_mass(3), missing_prerequisite_error);
}

TEST_CASE("d=2 mass against the radial shooting oracle", "[groundstate]") {
    const oracle::RadialProfile townes = oracle::solve_townes();
    CHECK(std::abs(townes.q0 - 2.2062) < 2e-3);
    CHECK(std::abs(townes.mass_sq - 11.7009) < 2e-3);

    auto grid = make_grid(2, 512, 16.0);
    const GroundState gs = solve_ground_state(grid, 1e-10);
    CHECK(std::abs(gs.mass_sq - townes.mass_sq) < 1e-4 * townes.mass_sq);
    CHECK(std::abs(gs.energy) <= 1e-6 * gs.grad_norm_sq);

    GroundStateTable::instance().ensure_canonical(2);
    CHECK(std::abs(critical_mass(2) - 3.4207) < 2e-3);
}

TEST_CASE("solution is invariant under doubling the box", "[groundstate]") {
    auto small = make_grid(1, 2048, 24.0);
    auto big = make_grid(1, 4096, 48.0);  // same resolution density
    const GroundState qs = solve_ground_state(small, 1e-10);
    const GroundState qb = solve_ground_state(big, 1e-10);
    double worst = 0.0;
    for (std::size_t j = 0; j < qs.Q.size(); ++j)
        worst = std::max(worst, std::abs(qs.Q[j].real() - qb.Q[j + 1024].real()));
    CHECK(worst <= 1e-8);
}

TEST_CASE("critical scaling preserves the mass", "[groundstate]") {
    // mass of mu^{d/2} Q(mu x) by quadrature of the verified closed form
    for (double mu : {0.5, 2.0, 3.7}) {
        const double L = std::max(24.0, 24.0 / mu);
        const auto n = static_cast<std::size_t>(4096);
        const double dx = 2.0 * L / static_cast<double>(n);
        double mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -L + dx * static_cast<double>(j);
            const double q = std::sqrt(mu) * oracle::q1d(mu * x);
            mass += q * q;
        }
        mass *= dx;
        CHECK(std::abs(mass - oracle::q1d_mass_sq()) <= 1e-10);
    }
}

TEST_CASE("weinstein gap vanishes on the Q family and is positive off it", "[groundstate]") {
    auto& table = GroundStateTable::instance();
    const auto gs = table.ensure_canonical(1);
    auto grid = gs->Q.grid_ptr();

    SECTION("u = Q: the gap is E(Q)") {
        CHECK(std::abs(weinstein_gap(gs->Q, 1)) <= 1e-6 * gs->grad_norm_sq);
    }
    SECTION("u = 0") {
        ComplexField zero(grid, Space::physical);
        CHECK(weinstein_gap(zero, 1) == 0.0);
    }
    SECTION("u = 0.5 Q sits on the extremal family: gap stays at discretization zero") {
        ComplexField half = gs->Q;
        for (auto& v : half.values()) v *= 0.5;
        CHECK(std::abs(weinstein_gap(half, 1)) <= 1e-6 * gs->grad_norm_sq);
    }
    SECTION("a gaussian is not extremal: strictly positive gap") {
        auto f = sample_physical(grid, [](const double* x, int) {
            return complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
        });
        CHECK(weinstein_gap(f, 1) > 1e-3);
    }
}

TEST_CASE("weinstein gap is nonnegative over random localized fields", "[groundstate]") {
    auto& table = GroundStateTable::instance();
    table.ensure_canonical(1);
    table.ensure_canonical(2);
    std::mt19937 rng(2024);
    {
        auto g = make_grid(1, 512, 16.0);
        for (int trial = 0; trial < 1000; ++trial)
            REQUIRE(weinstein_gap(random_packet(g, rng), 1) >= -1e-8);
    }
    {
        auto g = make_grid(2, 64, 12.0);
        for (int trial = 0; trial < 1000; ++trial)
            REQUIRE(weinstein_gap(random_packet(g, rng), 2) >= -1e-8);
    }
}
