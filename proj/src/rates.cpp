#include "lifshitz/rates.hpp"

#include "lifshitz/errors.hpp"
#include "parse_util.hpp"

#include <cmath>
#include <limits>

namespace lifshitz {

namespace {

// g at the argument y = x or y = x^alpha; 0 at the window edge.
double g_raw(const RateBundle& bundle, double y) {
    return -log_cdf_eval(bundle.law, bundle.D0 / y);
}

} // namespace

RateBundle make_rate_bundle(int d, double alpha, double D0, const LatticeLaw& law) {
    if (d < 1 || d > 3) throw UsageError("rate bundle: d must be 1, 2, or 3");
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw UsageError("rate bundle: alpha must lie in (0,2]");
    if (!(D0 > 0.0)) throw UsageError("rate bundle: D0 must be positive");
    if (law.degenerate)
        throw UsageError("rate bundle: degenerate law has no rate function");
    RateBundle b;
    b.d = d;
    b.alpha = alpha;
    b.D0 = D0;
    b.law = law;
    b.gamma = static_cast<double>(d) / (d + alpha);
    b.x0 = std::isinf(law.kappa0) ? 0.0 : std::pow(D0 / law.kappa0, 1.0 / alpha);
    b.t0 = b.x0 == 0.0 ? 0.0
                       : std::pow(b.x0, d + alpha) * g_raw(b, std::pow(b.x0, alpha));
    if (b.t0 == 0.0) b.t0 = 0.0; // scrub the sign of x0^{d+alpha} * (-0)
    return b;
}

double g_eval(const RateBundle& bundle, double x) {
    if (!(x > 0.0)) throw UsageError("g_eval: x must be positive");
    const double lc = log_cdf_eval(bundle.law, bundle.D0 / x);
    if (lc == -std::numeric_limits<double>::infinity())
        throw UsageError("g_eval: F_q(D0/x) = 0, x is below the family support");
    if (!(lc < 0.0))
        throw UsageError("g_eval: F_q(D0/x) = 1, x is below the rate-function window");
    return -lc;
}

double j_eval(const RateBundle& bundle, double x) {
    if (!(x >= bundle.x0)) throw UsageError("j_eval: x must be at least x0");
    if (x == 0.0) return 0.0;
    return std::pow(x, bundle.d + bundle.alpha) * g_raw(bundle, std::pow(x, bundle.alpha));
}

double x_t(const RateBundle& bundle, double t) {
    if (!(t > 0.0) || !(t >= bundle.t0))
        throw UsageError("x_t: t must be positive and at least t0");
    double lo = bundle.x0;
    double hi;
    if (bundle.law.family == LawFamily::doubleexp) {
        const double y = bundle.D0 * std::log1p(t);
        hi = 2.0 * std::max(std::pow(std::max(y, 1e-6), 1.0 / bundle.alpha), 1.0);
    } else {
        hi = std::max(2.0 * bundle.x0, 1.0);
    }
    int doublings = 0;
    while (j_eval(bundle, hi) < t) {
        hi *= 2.0;
        if (++doublings > 1000)
            throw NumericError("x_t: bracket expansion exceeded 1000 doublings");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (j_eval(bundle, mid) < t)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double h_eval(const RateBundle& bundle, double t) {
    const double xt = x_t(bundle, t);
    return g_raw(bundle, std::pow(xt, bundle.alpha));
}

double rate_denominator(const RateBundle& bundle, double t) {
    const double h = h_eval(bundle, t);
    return std::pow(t, bundle.gamma) * std::pow(h, 1.0 - bundle.gamma);
}

std::pair<double, double> loglog_limits(const TailIndex& a, int d, double alpha) {
    if (d < 1) throw UsageError("loglog_limits: d must be positive");
    if (!(alpha > 0.0)) throw UsageError("loglog_limits: alpha must be positive");
    if (!a.infinite && !(a.value >= 0.0))
        throw UsageError("loglog_limits: a must be nonnegative");
    const double b = a.infinite ? 0.0 : 1.0 / (d + (a.value + 1.0) * alpha);
    return {b, 1.0 - (d + alpha) * b};
}

TauberBound tauber_lower(const RateBundle& bundle, double A1, double B1) {
    if (!(A1 > 0.0) || !(B1 > A1))
        throw UsageError("tauber_lower: need B1 > A1 > 0");
    const double ex = static_cast<double>(bundle.d) / bundle.alpha;
    TauberBound out;
    out.constant = -A1 * std::pow(B1, ex);
    out.normalizer = [bundle, B1, ex](double x) {
        return std::pow(x, ex) / g_eval(bundle, B1 / x);
    };
    return out;
}

TauberBound tauber_upper(const RateBundle& bundle, double A2, double B2) {
    if (!(B2 > 0.0) || !(B2 < A2))
        throw UsageError("tauber_upper: need 0 < B2 < A2");
    const double ex = static_cast<double>(bundle.d) / bundle.alpha;
    TauberBound out;
    out.constant = -(A2 - B2) * std::pow(B2, ex);
    out.normalizer = [bundle, B2, ex](double x) {
        return std::pow(x, ex) / g_eval(bundle, B2 / x);
    };
    return out;
}

Substitution tauber_substitution(const RateBundle& bundle, double t, double B) {
    if (!(B > 0.0)) throw UsageError("tauber_substitution: B must be positive");
    const double h = h_eval(bundle, t);
    Substitution s;
    s.x = B * std::pow(t, bundle.gamma - 1.0) * std::pow(h, 1.0 - bundle.gamma);
    s.lhs = std::pow(t, bundle.gamma) * std::pow(h, 1.0 - bundle.gamma);
    const double ex = static_cast<double>(bundle.d) / bundle.alpha;
    s.rhs = std::pow(B, ex) * std::pow(s.x, -ex) * g_eval(bundle, B / s.x);
    return s;
}

std::string format_bundle(const RateBundle& bundle) {
    using detail::fmt_num;
    return "rates(d=" + std::to_string(bundle.d) + ",alpha=" + fmt_num(bundle.alpha) +
           ",D0=" + fmt_num(bundle.D0) + ",law=" + format_law(bundle.law) + ")";
}

RateBundle parse_bundle(const std::string& text) {
    detail::ParsedCall call = detail::parse_call(text);
    if (call.name != "rates") throw UsageError("expected rates(...): " + text);
    auto it = call.args.find("law");
    if (it == call.args.end()) throw UsageError("rates: missing law=...");
    return make_rate_bundle(static_cast<int>(call.num("d")), call.num("alpha"),
                            call.num("D0"), parse_law(it->second));
}

} // namespace lifshitz
