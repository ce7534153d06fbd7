#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fnls/spectral.hpp"

namespace fnls {

// Binary field checkpoint:
//   magic "FNLS" | u32 version=1 | u8 d | u64 n per axis | f64 L per axis |
//   f64 time | f64 s | f64 a | n^d interleaved (re, im) f64
// little-endian, samples row-major in physical space.
struct CheckpointHeader {
    int d = 1;
    std::vector<std::uint64_t> n;
    std::vector<double> L;
    double time = 0.0;
    double s = 0.0;
    double a = 0.0;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace detail

inline void write_checkpoint(const std::string& path, const ComplexField& field, double time,
                             double s, double a) {
    const ComplexField phys = to_space(field, Space::physical);
    const Grid& g = phys.grid();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write("FNLS", 4);
    detail::write_pod(os, std::uint32_t{1});
    detail::write_pod(os, static_cast<std::uint8_t>(g.dim()));
    for (int ax = 0; ax < g.dim(); ++ax)
        detail::write_pod(os, static_cast<std::uint64_t>(g.points(ax)));
    for (int ax = 0; ax < g.dim(); ++ax) detail::write_pod(os, g.half_period(ax));
    detail::write_pod(os, time);
    detail::write_pod(os, s);
    detail::write_pod(os, a);
    static_assert(sizeof(complex) == 16);
    os.write(reinterpret_cast<const char*>(phys.values().data()),
             static_cast<std::streamsize>(phys.size() * sizeof(complex)));
    if (!os) throw std::runtime_error("short write to " + path);
}

inline std::pair<ComplexField, CheckpointHeader> read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FNLS", 4) != 0)
        throw std::runtime_error(path + ": not a field checkpoint");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1) throw std::runtime_error(path + ": unsupported checkpoint version");
    CheckpointHeader h;
    h.d = detail::read_pod<std::uint8_t>(is);
    if (h.d < 1 || h.d > 4) throw std::runtime_error(path + ": bad dimension");
    h.n.resize(static_cast<std::size_t>(h.d));
    h.L.resize(static_cast<std::size_t>(h.d));
    for (auto& v : h.n) v = detail::read_pod<std::uint64_t>(is);
    for (auto& v : h.L) v = detail::read_pod<double>(is);
    h.time = detail::read_pod<double>(is);
    h.s = detail::read_pod<double>(is);
    h.a = detail::read_pod<double>(is);

    std::vector<std::size_t> n(h.n.begin(), h.n.end());
    auto grid = std::make_shared<const Grid>(h.d, n, h.L);
    ComplexField field(grid, Space::physical);
    is.read(reinterpret_cast<char*>(field.values().data()),
            static_cast<std::streamsize>(field.size() * sizeof(complex)));
    if (!is) throw std::runtime_error(path + ": truncated checkpoint");
    return {std::move(field), h};
}

}  // namespace fnls
