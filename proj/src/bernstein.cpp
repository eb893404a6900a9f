#include "lifshitz/bernstein.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/quadrature.hpp"

#include "parse_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lifshitz {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_alpha_range(double a, const char* who) {
    if (!(a > 0.0 && a <= 2.0)) throw UsageError(std::string(who) + ": exponent must be in (0,2]");
}

// Smallest lam with phi(lam) >= target, by log-space bisection. Used to pick
// the substitution scale that keeps quadrature integrands localized at unit
// argument no matter how large t is.
double inverse_phi(const BernsteinSpec& spec, double target) {
    double ylo = -690.0, yhi = 690.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (ylo + yhi);
        (phi_eval(spec, std::exp(mid)) >= target ? yhi : ylo) = mid;
    }
    return std::exp(0.5 * (ylo + yhi));
}

} // namespace

BernsteinSpec make_drift(double b) {
    if (!(b > 0.0)) throw UsageError("drift: b must be positive");
    BernsteinSpec s;
    s.family = BernsteinFamily::drift;
    s.b = b;
    s.alpha = 2.0;
    s.c1 = s.c2 = b;
    s.lambda0 = std::numeric_limits<double>::infinity();
    return s;
}

BernsteinSpec make_stable(double alpha) {
    require_alpha_range(alpha, "stable");
    BernsteinSpec s;
    s.family = BernsteinFamily::stable;
    s.alphas = {alpha};
    s.alpha = alpha;
    s.c1 = s.c2 = 1.0;
    s.lambda0 = std::numeric_limits<double>::infinity();
    return s;
}

BernsteinSpec make_mixture(const std::vector<double>& alphas) {
    if (alphas.empty()) throw UsageError("mixture: needs at least one exponent");
    for (double a : alphas) require_alpha_range(a, "mixture");
    BernsteinSpec s;
    s.family = BernsteinFamily::mixture;
    s.alphas = alphas;
    s.alpha = *std::min_element(alphas.begin(), alphas.end());
    s.lambda0 = 1.0;
    s.c1 = 1.0;
    // on (0,1) every term lambda^{(a_i - a_min)/2} is at most 1 and the
    // minimal-exponent term is exactly 1
    s.c2 = static_cast<double>(alphas.size());
    return s;
}

BernsteinSpec make_stable_drift(double b, double alpha) {
    if (!(b > 0.0)) throw UsageError("stabledrift: b must be positive");
    if (!(alpha > 0.0 && alpha < 2.0)) throw UsageError("stabledrift: alpha must be in (0,2)");
    BernsteinSpec s;
    s.family = BernsteinFamily::stable_drift;
    s.b = b;
    s.alphas = {alpha};
    s.alpha = alpha; // the stable term dominates at low frequency
    s.lambda0 = 1.0;
    s.c1 = 1.0;
    s.c2 = 1.0 + b;
    return s;
}

BernsteinSpec make_relativistic(double theta, double m) {
    if (!(theta > 0.0 && theta < 2.0)) throw UsageError("relativistic: theta must be in (0,2)");
    if (!(m > 0.0)) throw UsageError("relativistic: m must be positive");
    BernsteinSpec s;
    s.family = BernsteinFamily::relativistic;
    s.theta = theta;
    s.m = m;
    s.alpha = 2.0; // phi(l) ~ (theta/2) m^{1-2/theta} l near zero
    s.lambda0 = 1.0;
    s.c2 = 0.5 * theta * std::pow(m, 1.0 - 2.0 / theta);
    s.c1 = std::pow(1.0 + std::pow(m, 2.0 / theta), 0.5 * theta) - m; // phi(lambda0)/lambda0
    return s;
}

BernsteinSpec make_stablelog(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw UsageError("stablelog: alpha must be in (0,2)");
    bool ok = (beta > -alpha && beta < 0.0) || (beta > 0.0 && beta < 2.0 - alpha);
    if (!ok) throw UsageError("stablelog: beta must be in (-alpha,0) or (0,2-alpha)");
    BernsteinSpec s;
    s.family = BernsteinFamily::stablelog;
    s.alphas = {alpha};
    s.beta = beta;
    s.alpha = alpha + beta; // log(1+l) ~ l shifts the low-frequency order
    s.lambda0 = 1.0;
    const double edge = std::pow(std::log(2.0), 0.5 * beta); // ratio at lambda0
    if (beta > 0.0) {
        s.c1 = edge;
        s.c2 = 1.0;
    } else {
        s.c1 = 1.0;
        s.c2 = edge;
    }
    return s;
}

double phi_eval(const BernsteinSpec& spec, double lam) {
    if (!(lam > 0.0)) throw UsageError("phi_eval: lambda must be positive");
    switch (spec.family) {
    case BernsteinFamily::drift:
        return spec.b * lam;
    case BernsteinFamily::stable:
        return std::pow(lam, 0.5 * spec.alphas[0]);
    case BernsteinFamily::mixture: {
        double v = 0.0;
        for (double a : spec.alphas) v += std::pow(lam, 0.5 * a);
        return v;
    }
    case BernsteinFamily::stable_drift:
        return spec.b * lam + std::pow(lam, 0.5 * spec.alphas[0]);
    case BernsteinFamily::relativistic:
        return std::pow(lam + std::pow(spec.m, 2.0 / spec.theta), 0.5 * spec.theta) - spec.m;
    case BernsteinFamily::stablelog:
        return std::pow(lam, 0.5 * spec.alphas[0]) *
               std::pow(std::log1p(lam), 0.5 * spec.beta);
    }
    throw UsageError("phi_eval: unknown family");
}

WindowCheck scaling_window_check(const BernsteinSpec& spec, const std::vector<double>& grid) {
    if (grid.empty()) throw UsageError("scaling_window_check: empty grid");
    WindowCheck out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    out.max_ratio = 0.0;
    for (double lam : grid) {
        if (!(lam > 0.0 && lam < spec.lambda0))
            throw UsageError("scaling_window_check: grid point outside (0, lambda0)");
        const double r = phi_eval(spec, lam) / std::pow(lam, 0.5 * spec.alpha);
        out.min_ratio = std::min(out.min_ratio, r);
        out.max_ratio = std::max(out.max_ratio, r);
    }
    const double slack = 1e-12;
    out.ok = out.min_ratio >= spec.c1 * (1.0 - slack) && out.max_ratio <= spec.c2 * (1.0 + slack);
    return out;
}

double heat_kernel_at_zero(const BernsteinSpec& spec, double t, int d) {
    if (!(t > 0.0)) throw UsageError("heat_kernel_at_zero: t must be positive");
    if (d < 1) throw UsageError("heat_kernel_at_zero: d must be >= 1");
    const double omega = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
    const double rstar = std::sqrt(inverse_phi(spec, 1.0 / t));
    const double integral = integrate_halfline_or_throw(
        [&](double u) {
            const double r = rstar * u;
            if (!(r * r > 0.0)) return std::pow(u, d - 1); // underflow: exponent ~ 0
            const double e = t * phi_eval(spec, r * r);
            if (e > 745.0) return 0.0;
            return std::exp(-e) * std::pow(u, d - 1);
        },
        1e-300, 1e-10);
    return std::pow(2.0 * kPi, -d) * omega * std::pow(rstar, d) * integral;
}

double moment_integral(const BernsteinSpec& spec, double gamma, double t) {
    if (!(gamma > 0.0)) throw UsageError("moment_integral: gamma must be positive");
    if (!(t > 0.0)) throw UsageError("moment_integral: t must be positive");
    const double lstar = std::pow(inverse_phi(spec, 1.0 / t), gamma);
    const double integral = integrate_halfline_or_throw(
        [&](double u) {
            const double x = std::pow(lstar * u, 1.0 / gamma);
            if (!(x > 0.0)) return 1.0; // underflow: exponent ~ 0
            const double e = t * phi_eval(spec, x);
            if (e > 745.0) return 0.0;
            return std::exp(-e);
        },
        1e-300, 1e-10);
    return lstar * integral / std::tgamma(gamma + 1.0);
}

MomentBoundCheck moment_bound_check(const BernsteinSpec& spec, double gamma, double t0,
                                    const std::vector<double>& tgrid) {
    if (tgrid.empty()) throw UsageError("moment_bound_check: empty grid");
    MomentBoundCheck out;
    out.ok = true;
    for (double t : tgrid) {
        if (t < t0) throw UsageError("moment_bound_check: grid point below t0");
        const double v = moment_integral(spec, gamma, t);
        if (!std::isfinite(v)) {
            out.ok = false;
            continue;
        }
        out.c_tilde = std::max(out.c_tilde, v * std::pow(t, 2.0 * gamma / spec.alpha));
    }
    return out;
}

std::string format_spec(const BernsteinSpec& spec) {
    using detail::fmt_num;
    switch (spec.family) {
    case BernsteinFamily::drift:
        return "drift(b=" + fmt_num(spec.b) + ")";
    case BernsteinFamily::stable:
        return "stable(alpha=" + fmt_num(spec.alphas[0]) + ")";
    case BernsteinFamily::mixture: {
        std::string s = "mixture(alphas=[";
        for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
            if (i) s += ",";
            s += fmt_num(spec.alphas[i]);
        }
        return s + "])";
    }
    case BernsteinFamily::stable_drift:
        return "stabledrift(b=" + fmt_num(spec.b) + ",alpha=" + fmt_num(spec.alphas[0]) + ")";
    case BernsteinFamily::relativistic:
        return "relativistic(theta=" + fmt_num(spec.theta) + ",m=" + fmt_num(spec.m) + ")";
    case BernsteinFamily::stablelog:
        return "stablelog(alpha=" + fmt_num(spec.alphas[0]) + ",beta=" + fmt_num(spec.beta) + ")";
    }
    throw UsageError("format_spec: unknown family");
}

BernsteinSpec parse_bernstein(const std::string& text) {
    detail::ParsedCall call = detail::parse_call(text);
    if (call.name == "drift") return make_drift(call.num_or("b", 1.0));
    if (call.name == "stable") return make_stable(call.num("alpha"));
    if (call.name == "mixture") return make_mixture(call.list("alphas"));
    if (call.name == "stabledrift") return make_stable_drift(call.num("b"), call.num("alpha"));
    if (call.name == "relativistic") return make_relativistic(call.num("theta"), call.num("m"));
    if (call.name == "stablelog") return make_stablelog(call.num("alpha"), call.num("beta"));
    throw UsageError("parse_bernstein: unknown family '" + call.name + "'");
}

} // namespace lifshitz
