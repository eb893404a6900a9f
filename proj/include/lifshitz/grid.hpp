#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lifshitz {

// Uniform grid on the torus [0,M)^d with n points per unit length, so lattice
// sites coincide with grid nodes.  Fields are length N^d, row-major.
struct TorusGrid {
    std::int64_t M = 1;
    int d = 1;
    std::int64_t n = 8;
    std::int64_t N = 8; // N = n*M

    double spacing() const { return 1.0 / static_cast<double>(n); }
    std::int64_t total() const {
        std::int64_t v = 1;
        for (int i = 0; i < d; ++i) v *= N;
        return v;
    }
};

TorusGrid make_grid(std::int64_t M, int d, std::int64_t n = 8,
                    std::int64_t dof_cap = (std::int64_t{1} << 22));

// Flat binary layout: header (d, M, n, N as 64-bit little-endian integers)
// followed by N^d doubles in row-major order.
void write_field(const std::string& path, const TorusGrid& grid, const std::vector<double>& field);
std::pair<TorusGrid, std::vector<double>> read_field(const std::string& path);

// Same layout with a leading 64-bit seed word (configuration files).
void write_seeded_field(const std::string& path, std::uint64_t seed, const TorusGrid& grid,
                        const std::vector<double>& field);
std::tuple<std::uint64_t, TorusGrid, std::vector<double>> read_seeded_field(const std::string& path);

} // namespace lifshitz
