#include "lifshitz/grid.hpp"
#include "lifshitz/errors.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>
#include <tuple>

namespace lifshitz {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; byte swapping is not implemented");

TorusGrid make_grid(std::int64_t M, int d, std::int64_t n, std::int64_t dof_cap) {
    if (M < 1) throw UsageError("make_grid: M must be >= 1");
    if (d < 1 || d > 3) throw UsageError("make_grid: d must be in {1,2,3}");
    if (n < 1) throw UsageError("make_grid: oversampling n must be >= 1");
    TorusGrid g;
    g.M = M;
    g.d = d;
    g.n = n;
    g.N = n * M;
    if (g.total() > dof_cap)
        throw UsageError("make_grid: N^d = " + std::to_string(g.total()) +
                         " exceeds the degree-of-freedom cap " + std::to_string(dof_cap));
    return g;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void write_u64(std::FILE* f, std::uint64_t v) {
    if (std::fwrite(&v, sizeof v, 1, f) != 1) throw UsageError("field write failed");
}

std::uint64_t read_u64(std::FILE* f) {
    std::uint64_t v = 0;
    if (std::fread(&v, sizeof v, 1, f) != 1) throw UsageError("field read failed");
    return v;
}

void write_body(std::FILE* f, const TorusGrid& grid, const std::vector<double>& field) {
    if (static_cast<std::int64_t>(field.size()) != grid.total())
        throw UsageError("write_field: field size does not match grid");
    write_u64(f, static_cast<std::uint64_t>(grid.d));
    write_u64(f, static_cast<std::uint64_t>(grid.M));
    write_u64(f, static_cast<std::uint64_t>(grid.n));
    write_u64(f, static_cast<std::uint64_t>(grid.N));
    if (!field.empty() &&
        std::fwrite(field.data(), sizeof(double), field.size(), f) != field.size())
        throw UsageError("field write failed");
}

std::pair<TorusGrid, std::vector<double>> read_body(std::FILE* f) {
    TorusGrid g;
    g.d = static_cast<int>(read_u64(f));
    g.M = static_cast<std::int64_t>(read_u64(f));
    g.n = static_cast<std::int64_t>(read_u64(f));
    g.N = static_cast<std::int64_t>(read_u64(f));
    if (g.d < 1 || g.d > 3 || g.M < 1 || g.n < 1 || g.N != g.n * g.M)
        throw UsageError("field file has an inconsistent header");
    std::vector<double> field(static_cast<std::size_t>(g.total()));
    if (!field.empty() &&
        std::fread(field.data(), sizeof(double), field.size(), f) != field.size())
        throw UsageError("field read failed");
    return {g, std::move(field)};
}

} // namespace

void write_field(const std::string& path, const TorusGrid& grid, const std::vector<double>& field) {
    File f(std::fopen(path.c_str(), "wb"));
    if (!f) throw UsageError("cannot open for writing: " + path);
    write_body(f.get(), grid, field);
}

std::pair<TorusGrid, std::vector<double>> read_field(const std::string& path) {
    File f(std::fopen(path.c_str(), "rb"));
    if (!f) throw UsageError("cannot open for reading: " + path);
    return read_body(f.get());
}

void write_seeded_field(const std::string& path, std::uint64_t seed, const TorusGrid& grid,
                        const std::vector<double>& field) {
    File f(std::fopen(path.c_str(), "wb"));
    if (!f) throw UsageError("cannot open for writing: " + path);
    write_u64(f.get(), seed);
    write_body(f.get(), grid, field);
}

std::tuple<std::uint64_t, TorusGrid, std::vector<double>> read_seeded_field(
    const std::string& path) {
    File f(std::fopen(path.c_str(), "rb"));
    if (!f) throw UsageError("cannot open for reading: " + path);
    std::uint64_t seed = read_u64(f.get());
    auto [grid, field] = read_body(f.get());
    return {seed, grid, std::move(field)};
}

} // namespace lifshitz
