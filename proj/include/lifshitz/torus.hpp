#pragma once

#include "lifshitz/bernstein.hpp"
#include "lifshitz/grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace lifshitz {

// phi(-Laplacian) on the torus [0,M)^d, discretized on the grid's Fourier
// modes with the exact continuum symbol phi(|2 pi k / M|^2).
struct SpectralOperator {
    TorusGrid grid;
    BernsteinSpec phi;
    std::vector<double> multiplier; // N^d values, FFT index order
};

SpectralOperator make_spectral(const TorusGrid& grid, const BernsteinSpec& phi);

struct SchrodingerOperator {
    SpectralOperator kinetic;
    std::vector<double> potential; // N^d values >= 0
};

SchrodingerOperator make_schrodinger(SpectralOperator kinetic, std::vector<double> potential);

// The `count` smallest values of phi(|2 pi k / M|^2) over k in Z^d, sorted
// ascending with multiplicity.
std::vector<double> kinetic_eigenvalues(std::int64_t M, const BernsteinSpec& phi, int count,
                                        int d);

// p_t^M(x,y) = M^{-d} sum_k exp(-t phi(|2 pi k/M|^2)) cos((2 pi k/M).(y-x)),
// truncated with a certified tail bound <= 1e-12 of the value.
double torus_heat_kernel(const TorusGrid& grid, const BernsteinSpec& phi, double t,
                         const std::array<double, 3>& x, const std::array<double, 3>& y);

// Upper bound on the image tail sum_{i notin [-nM,nM]^d} g_t(x, y+i) of the
// Gaussian kernel g_t(z) = (4 pi t)^{-d/2} exp(-|z|^2/4t), any x,y in the box.
double gaussian_image_tail_bound(std::int64_t M, std::int64_t n, double t, int d);

// H psi = ifft(multiplier * fft(psi)) + V * psi.
std::vector<double> apply_H(const SchrodingerOperator& op, const std::vector<double>& psi);
void apply_H(const SchrodingerOperator& op, const std::vector<double>& psi,
             std::vector<double>& out);

} // namespace lifshitz
