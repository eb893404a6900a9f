#pragma once

#include "lifshitz/bernstein.hpp"
#include "lifshitz/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lifshitz {

// Single-site profile W >= 0 supported in [-M0, M0]^d.  Norms are closed
// forms of the profile parameters, never grid sums, so structural constants
// derived from them are grid-independent.
enum class SiteProfile { box, bump, trunc_power };

struct SingleSite {
    SiteProfile profile = SiteProfile::box;
    int d = 1;
    double h = 0.5;      // half-width (box, bump)
    double height = 1.0; // bump peak value
    double beta = 0.0;   // trunc_power singularity exponent
    double radius = 0.5; // trunc_power support radius
    std::int64_t M0 = 1; // integer support radius
    double norm1 = 1.0;  // ||W||_1
    double norm2sq = 1.0; // ||W||_2^2
};

SingleSite make_box_site(double h, int d);
SingleSite make_bump_site(double h, double height, int d);
// Admissible only when beta < min(alpha, d/2).
SingleSite make_trunc_power_site(double beta, double radius, int d, double alpha);

// Pointwise evaluation; `floor_radius` regularizes the trunc_power
// singularity by clamping |x| from below (half a grid cell in practice).
double site_eval(const SingleSite& site, const double* x, double floor_radius = 0.0);

std::string format_site(const SingleSite& site);
// Parsing needs the ambient dimension, and the kinetic exponent to validate
// the truncated-power profile.
SingleSite parse_site(const std::string& text, int d, double alpha);

// Lattice coupling laws.  All four are exactly invertible:
//   atom:        mass p0 at 0, density `slope` up to min((1-p0)/slope, inf);
//                slope = 0 puts the remaining mass at kappa = 1
//   power:       F(k) = (k/cap)^gamma on [0, cap]
//   exponential: F(k) = exp(-k^{-gamma})
//   doubleexp:   F(k) = exp(1 - exp(1/k))
enum class LawFamily { atom, power, exponential, doubleexp };

struct TailIndex {
    bool infinite = false;
    double value = 0.0;
};

struct LatticeLaw {
    LawFamily family = LawFamily::atom;
    double p0 = 0.0;
    double slope = 0.0;
    double gamma = 1.0;
    double cap = 1.0;
    // continuity window [0, kappa0] of F_q (infinity when F_q never jumps
    // nor saturates) and the CDF decay index a of -log F_q near 0.
    double kappa0 = 1.0;
    TailIndex a;
    bool degenerate = false; // q == 0 a.s. (test-only control laws)
};

LatticeLaw make_atom_law(double p0, double slope, bool allow_degenerate = false);
LatticeLaw make_power_law(double gamma, double cap = 1.0);
LatticeLaw make_exponential_law(double gamma);
LatticeLaw make_doubleexp_law();

double cdf_eval(const LatticeLaw& law, double kappa);
// log F_q(kappa) evaluated in closed form; finite for kappa > 0.
double log_cdf_eval(const LatticeLaw& law, double kappa);
double quantile(const LatticeLaw& law, double u);

std::string format_law(const LatticeLaw& law);
LatticeLaw parse_law(const std::string& text);

struct Configuration {
    std::int64_t M = 1;
    int d = 1;
    std::vector<double> values; // q at lattice sites, row-major over [0,M)^d
    std::uint64_t seed = 0;
    LatticeLaw law;
};

Configuration sample_config(const LatticeLaw& law, std::int64_t M, int d, std::uint64_t seed);

// V(x) = sum_i q_{i mod M} W(x - i) over all integer translates, sampled at
// the grid nodes j * spacing.
std::vector<double> periodized_potential(const Configuration& config, const SingleSite& site,
                                         const TorusGrid& grid);

// D0 = (1/2) C1 (mu21)^{alpha/2} ||W||_1 / (||W||_1^2 + (2 M0)^d ||W||_2^2),
// with the admissibility ratio (2M0)^d D0 ||W||_2^2 / ((C1 mu21^{a/2} -
// D0||W||_1) ||W||_1) < 1 checked defensively.
double compute_D0(const SingleSite& site, const BernsteinSpec& phi);

Configuration truncate_config(const Configuration& config, double D0, double alpha);

// True iff at least delta * M^d couplings exceed D0 / M^alpha.
bool in_A_delta(const Configuration& config, double delta, double D0, double alpha);

void write_config(const std::string& path, const Configuration& config);

} // namespace lifshitz
