#pragma once

#include <string>
#include <vector>

namespace lifshitz {

// Complete Bernstein functions evaluated from closed-form family formulas.
// Each spec carries its low-frequency scaling window: c1*l^{alpha/2} <=
// phi(l) <= c2*l^{alpha/2} on (0, lambda0).
enum class BernsteinFamily { drift, stable, mixture, stable_drift, relativistic, stablelog };

struct BernsteinSpec {
    BernsteinFamily family = BernsteinFamily::drift;
    double b = 0.0;              // drift coefficient
    std::vector<double> alphas;  // stable exponents (one entry unless mixture)
    double theta = 0.0;          // relativistic order
    double m = 0.0;              // relativistic mass
    double beta = 0.0;           // log exponent

    // scaling-window metadata
    double alpha = 2.0; // low-frequency order in (0,2]
    double c1 = 1.0;
    double c2 = 1.0;
    double lambda0 = 1.0;
};

// Constructors fill canonical window metadata; callers may override fields.
BernsteinSpec make_drift(double b = 1.0);
BernsteinSpec make_stable(double alpha);
BernsteinSpec make_mixture(const std::vector<double>& alphas);
BernsteinSpec make_stable_drift(double b, double alpha);
BernsteinSpec make_relativistic(double theta, double m);
BernsteinSpec make_stablelog(double alpha, double beta);

double phi_eval(const BernsteinSpec& spec, double lam);

struct WindowCheck {
    bool ok = false;
    double min_ratio = 0.0; // extremal values of phi(l)/l^{alpha/2} on the grid
    double max_ratio = 0.0;
};
WindowCheck scaling_window_check(const BernsteinSpec& spec, const std::vector<double>& grid);

// p_t(0) = (2 pi)^{-d} omega_{d-1} int_0^inf exp(-t phi(r^2)) r^{d-1} dr.
double heat_kernel_at_zero(const BernsteinSpec& spec, double t, int d);

// int u^{-gamma} eta_t(du) = Gamma(gamma+1)^{-1} int_0^inf exp(-t phi(l^{1/gamma})) dl.
double moment_integral(const BernsteinSpec& spec, double gamma, double t);

struct MomentBoundCheck {
    bool ok = false;
    double c_tilde = 0.0; // max over the grid of moment * t^{2 gamma / alpha}
};
MomentBoundCheck moment_bound_check(const BernsteinSpec& spec, double gamma, double t0,
                                    const std::vector<double>& tgrid);

// Canonical text forms, e.g. drift(b=1.0), stable(alpha=1.0),
// mixture(alphas=[1.0,0.5]), stabledrift(b=1.0,alpha=1.0),
// relativistic(theta=1.0,m=1.0), stablelog(alpha=1.0,beta=0.5).
std::string format_spec(const BernsteinSpec& spec);
BernsteinSpec parse_bernstein(const std::string& text);

} // namespace lifshitz
