#pragma once

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <vector>

#include "fnls/field.hpp"

namespace fnls {
namespace detail {

// Process-lifetime FFTW plan cache keyed by grid shape. Planning is guarded
// (the FFTW planner is not thread-safe); execution via fftw_execute_dft on
// caller-owned buffers is. FFTW_ESTIMATE keeps plan selection deterministic
// across processes, which the reproducibility guarantees rely on.
struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<signed char> parity;  // (-1)^(sum of per-axis indices), per flat index
};

inline const FftPlans& plans_for(const Grid& g) {
    using Key = std::array<std::size_t, 5>;
    Key key{};
    key[0] = static_cast<std::size_t>(g.dim());
    for (int a = 0; a < g.dim(); ++a) key[static_cast<std::size_t>(a) + 1] = g.points(a);

    static std::mutex mu;
    static std::map<Key, FftPlans>* cache = new std::map<Key, FftPlans>();
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;

    FftPlans p;
    int n[4];
    for (int a = 0; a < g.dim(); ++a) n[a] = static_cast<int>(g.points(a));
    std::vector<complex> in(g.size()), out(g.size());
    auto* fin = reinterpret_cast<fftw_complex*>(in.data());
    auto* fout = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.forward = fftw_plan_dft(g.dim(), n, fin, fout, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft(g.dim(), n, fin, fout, FFTW_BACKWARD, flags);

    p.parity.resize(g.size());
    std::size_t idx[4];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unravel(i, idx);
        std::size_t s = 0;
        for (int a = 0; a < g.dim(); ++a) s += idx[a];
        p.parity[i] = (s & 1u) ? -1 : 1;
    }
    return cache->emplace(key, std::move(p)).first->second;
}

// DFT bin m of the lattice sampled on [-L, L) differs from the coefficient of
// e^{i k_m x} by (-1)^m per axis; the parity table absorbs that phase so that
// spectral values are true Fourier coefficients (constant field -> k=0 bin).
inline void forward_fft(const Grid& g, const std::vector<complex>& in, std::vector<complex>& out) {
    const FftPlans& p = plans_for(g);
    out.resize(in.size());
    fftw_execute_dft(p.forward,
                     reinterpret_cast<fftw_complex*>(const_cast<complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] *= scale * static_cast<double>(p.parity[i]);
}

inline void backward_fft(const Grid& g, const std::vector<complex>& in, std::vector<complex>& out) {
    const FftPlans& p = plans_for(g);
    std::vector<complex> tmp(in.size());
    for (std::size_t i = 0; i < in.size(); ++i)
        tmp[i] = in[i] * static_cast<double>(p.parity[i]);
    out.resize(in.size());
    fftw_execute_dft(p.backward, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail
}  // namespace fnls
