#pragma once

#include <functional>

namespace lifshitz {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // accumulated error estimate
    int panels = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-10,
                     int max_panels = 4000);

// Integral over [0,inf) via the substitution r = tan(theta), theta in (0,pi/2).
QuadResult integrate_halfline(const std::function<double(double)>& f,
                              double abs_tol = 1e-12, double rel_tol = 1e-10,
                              int max_panels = 4000);

// Throwing wrappers: NumericError if the tolerance was not reached.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-10);
double integrate_halfline_or_throw(const std::function<double(double)>& f,
                                   double abs_tol = 1e-12, double rel_tol = 1e-10);

} // namespace lifshitz
