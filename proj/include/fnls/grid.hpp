#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fnls/errors.hpp"

namespace fnls {

// Periodic box [-L, L)^d sampled on n points per axis (n a power of two).
//
// Physical lattice per axis:    x_j = -L + j * (2L/n), j = 0..n-1
// Wavenumber lattice per axis:  k_m = pi * m~ / L with m~ = m for m <= n/2,
//                               m - n otherwise (standard FFT ordering).
class Grid {
public:
    // Isotropic box.
    Grid(int dim, std::size_t points_per_axis, double half_period,
         std::size_t memory_budget_bytes = default_memory_budget())
        : Grid(dim,
               std::vector<std::size_t>(static_cast<std::size_t>(dim), points_per_axis),
               std::vector<double>(static_cast<std::size_t>(dim), half_period),
               memory_budget_bytes) {}

    Grid(int dim, std::vector<std::size_t> points, std::vector<double> half_periods,
         std::size_t memory_budget_bytes = default_memory_budget())
        : d_(dim), n_(std::move(points)), L_(std::move(half_periods)) {
        if (d_ < 1 || d_ > 4) throw domain_error("grid dimension must be in 1..4");
        if (n_.size() != static_cast<std::size_t>(d_) || L_.size() != static_cast<std::size_t>(d_))
            throw domain_error("grid axis count mismatch");
        std::size_t total = 1;
        for (int a = 0; a < d_; ++a) {
            const std::size_t n = n_[a];
            if (n < 8 || (n & (n - 1)) != 0)
                throw domain_error("points per axis must be a power of two >= 8");
            if (!(L_[a] > 0.0)) throw domain_error("box half-period must be positive");
            total *= n;
        }
        if (total > memory_budget_bytes / 16)
            throw domain_error("grid of " + std::to_string(total) +
                               " points exceeds the memory budget");
        size_ = total;
        wavenumbers_.resize(d_);
        for (int a = 0; a < d_; ++a) {
            const std::size_t n = n_[a];
            auto& k = wavenumbers_[a];
            k.resize(n);
            const double k0 = pi() / L_[a];
            for (std::size_t m = 0; m < n; ++m) {
                const auto signed_m = (m <= n / 2) ? static_cast<std::ptrdiff_t>(m)
                                                   : static_cast<std::ptrdiff_t>(m) -
                                                         static_cast<std::ptrdiff_t>(n);
                k[m] = k0 * static_cast<double>(signed_m);
            }
            // index n/2 carries the Nyquist frequency; use the negative branch
            k[n / 2] = -k0 * static_cast<double>(n / 2);
        }
    }

    int dim() const { return d_; }
    std::size_t size() const { return size_; }
    std::size_t points(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
    double half_period(int axis) const { return L_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const {
        return 2.0 * L_[static_cast<std::size_t>(axis)] / static_cast<double>(n_[static_cast<std::size_t>(axis)]);
    }
    double coordinate(int axis, std::size_t index) const {
        return -L_[static_cast<std::size_t>(axis)] + spacing(axis) * static_cast<double>(index);
    }
    // k_m for FFT bin m on the given axis.
    double wavenumber(int axis, std::size_t m) const {
        return wavenumbers_[static_cast<std::size_t>(axis)][m];
    }
    const std::vector<double>& wavenumbers(int axis) const {
        return wavenumbers_[static_cast<std::size_t>(axis)];
    }

    // Volume element dx^d and box volume (2L)^d.
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < d_; ++a) v *= spacing(a);
        return v;
    }
    double box_volume() const {
        double v = 1.0;
        for (int a = 0; a < d_; ++a) v *= 2.0 * L_[static_cast<std::size_t>(a)];
        return v;
    }

    // Decompose a row-major flat index (axis 0 slowest) into per-axis indices.
    void unravel(std::size_t flat, std::size_t* idx) const {
        for (int a = d_ - 1; a >= 0; --a) {
            const std::size_t n = n_[static_cast<std::size_t>(a)];
            idx[a] = flat % n;
            flat /= n;
        }
    }

    bool same_shape(const Grid& other) const {
        return d_ == other.d_ && n_ == other.n_ && L_ == other.L_;
    }

    static constexpr std::size_t default_memory_budget() { return std::size_t(4) << 30; }
    static constexpr double pi() { return 3.141592653589793238462643383279502884; }

private:
    int d_;
    std::vector<std::size_t> n_;
    std::vector<double> L_;
    std::size_t size_ = 0;
    std::vector<std::vector<double>> wavenumbers_;
};

}  // namespace fnls
