#pragma once

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/grid.hpp"

namespace fnls {

using complex = std::complex<double>;

enum class Space { physical, spectral };

// Complex-valued samples of u on a Grid (row-major), tagged with the space
// they live in. Fields are plain values: copy freely, never mutate shared state.
class ComplexField {
public:
    ComplexField(std::shared_ptr<const Grid> grid, Space space)
        : grid_(std::move(grid)), space_(space), values_(grid_->size(), complex(0.0, 0.0)) {}

    ComplexField(std::shared_ptr<const Grid> grid, Space space, std::vector<complex> values)
        : grid_(std::move(grid)), space_(space), values_(std::move(values)) {
        if (values_.size() != grid_->size())
            throw contract_error("field sample count does not match grid size");
    }

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    Space space() const { return space_; }

    const std::vector<complex>& values() const { return values_; }
    std::vector<complex>& values() { return values_; }
    std::size_t size() const { return values_.size(); }

    const complex& operator[](std::size_t i) const { return values_[i]; }
    complex& operator[](std::size_t i) { return values_[i]; }

    ComplexField with_values(std::vector<complex> v, Space s) const {
        return ComplexField(grid_, s, std::move(v));
    }

private:
    std::shared_ptr<const Grid> grid_;
    Space space_;
    std::vector<complex> values_;
};

inline std::shared_ptr<const Grid> make_grid(int dim, std::size_t n, double L) {
    return std::make_shared<const Grid>(dim, n, L);
}

// Evaluate f(x) at every physical lattice point. F: (const double* x, int d) -> complex.
template <typename F>
ComplexField sample_physical(const std::shared_ptr<const Grid>& grid, F&& f) {
    ComplexField out(grid, Space::physical);
    const Grid& g = *grid;
    std::size_t idx[4];
    double x[4];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < g.dim(); ++a) x[a] = g.coordinate(a, idx[a]);
        out[i] = f(x, g.dim());
    }
    return out;
}

}  // namespace fnls
