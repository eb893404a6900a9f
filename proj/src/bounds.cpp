#include "lifshitz/bounds.hpp"

#include "lifshitz/errors.hpp"

#include <cmath>
#include <cstdio>

namespace lifshitz {

namespace {

double support_radius(const SingleSite& site) {
    return site.profile == SiteProfile::trunc_power ? site.radius : site.h;
}

double pow_int(double base, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

} // namespace

TempleInputs temple_inputs(const Configuration& truncated, const SingleSite& site,
                           const BernsteinSpec& phi, double D0) {
    if (support_radius(site) > 0.5)
        throw UsageError("temple_inputs: closed forms need disjoint site supports "
                         "(radius <= 1/2); use the grid variant");
    if (site.d != truncated.d) throw UsageError("temple_inputs: dimension mismatch");
    TempleInputs in;
    double s1 = 0.0, s2 = 0.0;
    for (double q : truncated.values) {
        s1 += q;
        s2 += q * q;
    }
    in.intV = s1 * site.norm1;
    in.intV2 = s2 * site.norm2sq;
    in.M = truncated.M;
    in.d = truncated.d;
    in.alpha = phi.alpha;
    in.C1 = phi.c1;
    in.D0 = D0;
    in.normW1 = site.norm1;
    in.quadrature = false;
    return in;
}

TempleInputs temple_inputs_grid(const Configuration& truncated, const SingleSite& site,
                                const TorusGrid& grid, const BernsteinSpec& phi, double D0) {
    std::vector<double> V = periodized_potential(truncated, site, grid);
    const double cell = std::pow(grid.spacing(), grid.d);
    double s1 = 0.0, s2 = 0.0;
    for (double v : V) {
        s1 += v;
        s2 += v * v;
    }
    TempleInputs in;
    in.intV = s1 * cell;
    in.intV2 = s2 * cell;
    in.M = truncated.M;
    in.d = truncated.d;
    in.alpha = phi.alpha;
    in.C1 = phi.c1;
    in.D0 = D0;
    in.normW1 = site.norm1;
    in.quadrature = true;
    return in;
}

double temple_lower_bound(const TempleInputs& in) {
    const double Md = pow_int(static_cast<double>(in.M), in.d);
    const double lam2_free = in.C1 * std::pow(MU21, 0.5 * in.alpha) *
                             std::pow(static_cast<double>(in.M), -in.alpha);
    const double mean_energy = in.intV / Md;
    if (!(mean_energy < lam2_free)) {
        char msg[200];
        std::snprintf(msg, sizeof msg,
                      "temple_lower_bound: applicability fails: <psi,H psi> = %.6g "
                      ">= C1 (mu21)^{alpha/2} M^{-alpha} = %.6g",
                      mean_energy, lam2_free);
        throw UsageError(msg);
    }
    const double gap = (in.C1 * std::pow(MU21, 0.5 * in.alpha) - in.D0 * in.normW1) *
                       std::pow(static_cast<double>(in.M), -in.alpha);
    if (!(gap > 0.0))
        throw UsageError("temple_lower_bound: D0 ||W||_1 exceeds the spectral gap scale");
    return (in.intV - in.intV2 / gap) / Md;
}

double temple_delta_bound(double delta, double D0, std::int64_t M, double alpha,
                          const SingleSite& site, double C1) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw UsageError("temple_delta_bound: delta must lie in (0,1)");
    if (M < site.M0) throw UsageError("temple_delta_bound: M must be at least M0");
    const double A = C1 * std::pow(MU21, 0.5 * alpha);
    const double denom = A - D0 * site.norm1;
    if (!(denom > 0.0))
        throw UsageError("temple_delta_bound: D0 ||W||_1 exceeds the spectral gap scale");
    const double vol = std::pow(2.0 * static_cast<double>(site.M0), site.d);
    const double bracket = site.norm1 - vol * D0 * site.norm2sq / denom;
    if (!(bracket > 0.0))
        throw UsageError("temple_delta_bound: structural constants inconsistent "
                         "(bracket nonpositive; D0 not admissible for this site)");
    return D0 * delta * bracket * std::pow(static_cast<double>(M), -alpha);
}

double binomial_tail_bound(int n, double p, double gamma) {
    if (n < 1) throw UsageError("binomial_tail_bound: n must be positive");
    if (!(p > 0.0) || !(p < 1.0)) throw UsageError("binomial_tail_bound: p must lie in (0,1)");
    if (!(gamma > p)) throw UsageError("binomial_tail_bound: gamma must exceed p");
    if (!(gamma <= 1.0)) throw UsageError("binomial_tail_bound: gamma must be at most 1");
    const double t1 = gamma < 1.0
                          ? (1.0 - gamma) * std::log((1.0 - p) / (1.0 - gamma))
                          : 0.0;
    const double t2 = gamma * std::log(p / gamma);
    return std::exp(static_cast<double>(n) * (t1 + t2));
}

double complement_probability_bound(std::int64_t M, int d, double delta0, double pM) {
    if (M < 1 || d < 1) throw UsageError("complement_probability_bound: bad M or d");
    if (!(delta0 > 0.0) || !(delta0 < 1.0))
        throw UsageError("complement_probability_bound: delta0 must lie in (0,1)");
    if (!(pM > 0.0) || !(pM < 1.0))
        throw UsageError("complement_probability_bound: pM must lie in (0,1)");
    const double small = (1.0 / (1.0 - delta0)) *
                         std::pow(1.0 / delta0, delta0 / (1.0 - delta0)) * std::sqrt(pM);
    if (!(small <= 1.0))
        throw UsageError("complement_probability_bound: smallness condition fails; "
                         "use a smaller pM (larger M) or smaller delta0");
    const double Md = pow_int(static_cast<double>(M), d);
    return std::exp(0.5 * (1.0 - delta0) * Md * std::log(pM));
}

double dirichlet_upper_bound(const BernsteinSpec& phi, std::int64_t M, int d, double normV1) {
    if (M < 1) throw UsageError("dirichlet_upper_bound: M must be positive");
    if (!(normV1 >= 0.0)) throw UsageError("dirichlet_upper_bound: normV1 must be nonnegative");
    const double mu1 = static_cast<double>(d) * M_PI * M_PI /
                       (static_cast<double>(M) * static_cast<double>(M));
    const double lam = phi_eval(phi, mu1);
    if (!(lam > 0.0)) throw NumericError("dirichlet_upper_bound: free level is not positive");
    if (normV1 == 0.0) return lam;
    return lam + M_E * heat_kernel_at_zero(phi, 1.0 / lam, d) * normV1;
}

} // namespace lifshitz
