#pragma once

#include "lifshitz/alloy.hpp"
#include "lifshitz/bernstein.hpp"

#include <cmath>
#include <cstdint>

namespace lifshitz {

// Second eigenvalue of -Laplacian on the unit torus; analytically forced,
// cross-checked against kinetic_eigenvalues(M=1) in the tests.
inline const double MU21 = 4.0 * 3.14159265358979323846 * 3.14159265358979323846;

struct TempleInputs {
    double intV = 0.0;   // integral of the truncated potential over the torus
    double intV2 = 0.0;  // integral of its square
    std::int64_t M = 1;
    int d = 1;
    double alpha = 2.0;
    double C1 = 1.0;
    double D0 = 1.0;
    double normW1 = 1.0;
    bool quadrature = false; // true when intV/intV2 came from grid sums
};

// Closed-form moments; valid when periodized site supports are disjoint
// (support radius <= 1/2).
TempleInputs temple_inputs(const Configuration& truncated, const SingleSite& site,
                           const BernsteinSpec& phi, double D0);
// Grid-quadrature fallback for overlapping supports; flagged.
TempleInputs temple_inputs_grid(const Configuration& truncated, const SingleSite& site,
                                const TorusGrid& grid, const BernsteinSpec& phi, double D0);

// M^{-d} [ intV - intV2 / ((C1 mu21^{alpha/2} - D0 ||W||_1) M^{-alpha}) ];
// may be negative, never clamped here.
double temple_lower_bound(const TempleInputs& in);

// D0 delta [ ||W||_1 - (2 M0)^d D0 ||W||_2^2 / (C1 mu21^{alpha/2} -
// D0 ||W||_1) ] M^{-alpha}, the uniform bound over configurations with at
// least delta M^d couplings above D0 / M^alpha.
double temple_delta_bound(double delta, double D0, std::int64_t M, double alpha,
                          const SingleSite& site, double C1);

// ((1-p)/(1-gamma))^{(1-gamma) n} (p/gamma)^{gamma n} >= P[B(n,p) >= gamma n].
double binomial_tail_bound(int n, double p, double gamma);

// pM^{(1-delta0) M^d / 2}; requires the smallness condition
// (1/(1-delta0)) (1/delta0)^{delta0/(1-delta0)} sqrt(pM) <= 1.
double complement_probability_bound(std::int64_t M, int d, double delta0, double pM);

// Phi(d pi^2 / M^2) + e * p_{1/Phi(d pi^2/M^2)}(0) * ||V||_1.
double dirichlet_upper_bound(const BernsteinSpec& phi, std::int64_t M, int d, double normV1);

} // namespace lifshitz
