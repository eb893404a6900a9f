#pragma once

#include "lifshitz/alloy.hpp"

#include <functional>
#include <string>

namespace lifshitz {

// Rate-function algebra for one (dimension, kinetic order, D0, law) tuple:
//   g(x) = -log F_q(D0/x)        j(x) = x^{d+alpha} g(x^alpha)
//   x_t  = j^{-1}(t)             h(t) = g(x_t^alpha)
// x0 = (D0/kappa0)^{1/alpha} and t0 = j(x0) bound the valid query range.
struct RateBundle {
    int d = 1;
    double alpha = 2.0;
    double D0 = 1.0;
    LatticeLaw law;
    double gamma = 1.0 / 3.0; // d/(d+alpha)
    double x0 = 0.0;
    double t0 = 0.0;
};

RateBundle make_rate_bundle(int d, double alpha, double D0, const LatticeLaw& law);

double g_eval(const RateBundle& bundle, double x);
double j_eval(const RateBundle& bundle, double x);
// Bracketed bisection inverse of j; the double-exponential family seeds the
// bracket from its asymptotic inverse.
double x_t(const RateBundle& bundle, double t);
double h_eval(const RateBundle& bundle, double t);
// t^gamma h(t)^{1-gamma} = t / x_t^alpha.
double rate_denominator(const RateBundle& bundle, double t);

// b = 1/(d + (a+1) alpha), c = 1 - (d+alpha) b, with 1/inf = 0.
std::pair<double, double> loglog_limits(const TailIndex& a, int d, double alpha);

struct TauberBound {
    double constant = 0.0;
    std::function<double(double)> normalizer; // x -> x^{d/alpha} / g(B/x)
};

// constant = -A1 B1^{d/alpha}, packaged claim
// liminf_{x->0+} normalizer(x) log rho(x) >= constant.
TauberBound tauber_lower(const RateBundle& bundle, double A1, double B1);
// constant = -(A2-B2) B2^{d/alpha}, limsup counterpart.
TauberBound tauber_upper(const RateBundle& bundle, double A2, double B2);

struct Substitution {
    double x = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};
// x = B t^{gamma-1} h^{1-gamma}; lhs = t^gamma h^{1-gamma};
// rhs = B^{d/alpha} x^{-d/alpha} g(B/x).  lhs = rhs identically.
Substitution tauber_substitution(const RateBundle& bundle, double t, double B);

// Canonical text form rates(d=1,alpha=2,D0=...,law=...).
std::string format_bundle(const RateBundle& bundle);
RateBundle parse_bundle(const std::string& text);

} // namespace lifshitz
