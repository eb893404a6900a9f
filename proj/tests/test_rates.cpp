#include "lifshitz/errors.hpp"
#include "lifshitz/rates.hpp"
#include "lifshitz/rng.hpp"

#include "harness.hpp"

#include <cmath>
#include <vector>

using namespace lifshitz;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kD0 = 2.0 * kPi * kPi / 3.0;

std::vector<double> logspace(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = lo * std::pow(hi / lo, i / double(count - 1));
    return g;
}

std::vector<RateBundle> desk_bundles() {
    return {
        make_rate_bundle(1, 2.0, kD0, make_atom_law(std::exp(-1.0), 0.3)),
        make_rate_bundle(1, 2.0, kD0, make_power_law(1.0)),
        make_rate_bundle(1, 2.0, kD0, make_exponential_law(1.0)),
        make_rate_bundle(1, 2.0, kD0, make_doubleexp_law()),
    };
}

void test_bundle() {
    {
        const auto b = make_rate_bundle(1, 2.0, kD0, make_exponential_law(1.0));
        CHECK_CLOSE(b.gamma, 1.0 / 3.0, 1e-15);
        CHECK_ABS(b.x0, 0.0, 0.0);
        CHECK_ABS(b.t0, 0.0, 0.0);
        CHECK(!std::signbit(b.t0));
    }
    {
        const auto b = make_rate_bundle(2, 2.0, 1.0, make_doubleexp_law());
        CHECK_CLOSE(b.gamma, 0.5, 1e-15);
        CHECK_ABS(b.x0, 0.0, 0.0);
    }
    {
        // point mass at 1 above the atom: kappa0 = 1/2
        const auto b = make_rate_bundle(1, 1.0, 1.0, make_atom_law(std::exp(-1.0), 0.0));
        CHECK_CLOSE(b.x0, 2.0, 1e-14);
        CHECK_CLOSE(b.t0, 4.0, 1e-14);
    }
    {
        const auto b = make_rate_bundle(1, 2.0, kD0, make_atom_law(std::exp(-1.0), 0.3));
        const double kappa0 = (1.0 - std::exp(-1.0)) / 0.3;
        CHECK_CLOSE(b.x0, std::sqrt(kD0 / kappa0), 1e-14);
        CHECK_ABS(b.t0, 0.0, 0.0); // F is continuous at kappa0, so j(x0) = 0
    }
    CHECK_THROWS(make_rate_bundle(0, 2.0, 1.0, make_power_law(1.0)), UsageError);
    CHECK_THROWS(make_rate_bundle(1, 2.5, 1.0, make_power_law(1.0)), UsageError);
    CHECK_THROWS(make_rate_bundle(1, 2.0, 0.0, make_power_law(1.0)), UsageError);
    CHECK_THROWS(make_rate_bundle(1, 2.0, 1.0, make_atom_law(1.0, 0.0, true)), UsageError);
}

void test_g_eval() {
    CHECK_CLOSE(g_eval(make_rate_bundle(1, 2.0, 1.0, make_exponential_law(2.0)), 3.0), 9.0,
                1e-14);
    CHECK_CLOSE(g_eval(make_rate_bundle(1, 2.0, 1.0, make_doubleexp_law()), 1.0),
                std::exp(1.0) - 1.0, 1e-14);
    CHECK_CLOSE(g_eval(make_rate_bundle(1, 2.0, 1.0, make_doubleexp_law()), 100.0),
                std::expm1(100.0), 1e-12);
    CHECK_CLOSE(g_eval(make_rate_bundle(1, 2.0, 1.0, make_power_law(1.0)), std::exp(1.0)),
                1.0, 1e-13);
    {
        const auto b = make_rate_bundle(1, 2.0, 1.0, make_atom_law(std::exp(-1.0), 0.3));
        CHECK_CLOSE(g_eval(b, 1e8), -std::log(std::exp(-1.0) + 0.3e-8), 1e-12);
        CHECK_CLOSE(g_eval(b, 1e12), 1.0, 1e-6); // the atom mass fixes the limit
    }

    // domain edges
    {
        const auto b = make_rate_bundle(1, 2.0, kD0, make_atom_law(std::exp(-1.0), 0.3));
        CHECK_THROWS(g_eval(b, 0.9 * b.x0 * b.x0), UsageError); // F = 1 side
        CHECK_THROWS(g_eval(b, 0.0), UsageError);
    }
    {
        const auto b = make_rate_bundle(1, 2.0, 1.0, make_doubleexp_law());
        CHECK_THROWS(g_eval(b, 1.0 / 0.001), UsageError); // F underflows to 0
    }
}

void test_x_t() {
    // pure power law: j(x) = x^5, exactly invertible
    {
        const auto b = make_rate_bundle(1, 2.0, 1.0, make_exponential_law(1.0));
        CHECK_CLOSE(j_eval(b, 2.0), 32.0, 1e-13);
        CHECK_CLOSE(x_t(b, 10.0), std::pow(10.0, 0.2), 1e-12);
        CHECK_CLOSE(x_t(b, 1e6), std::pow(10.0, 1.2), 1e-12);
    }

    // round trips and monotonicity across all four desk families
    for (const auto& b : desk_bundles()) {
        double prev = 0.0;
        for (double t : logspace(std::max(b.t0 * 1.0000001, 1e-3), 1e9, 40)) {
            const double x = x_t(b, t);
            CHECK_CLOSE(j_eval(b, x), t, 1e-10);
            CHECK(x > prev);
            prev = x;
        }
        CHECK(x_t(b, 1e12) > prev); // far tail stays bracketable
    }

    {
        const auto b = make_rate_bundle(1, 1.0, 1.0, make_atom_law(std::exp(-1.0), 0.0));
        CHECK_THROWS(x_t(b, 3.9), UsageError); // below t0 = 4
        CHECK_THROWS(x_t(b, 0.0), UsageError);
        CHECK_CLOSE(x_t(b, 100.0), 10.0, 1e-12);
    }
}

void test_h_and_denominator() {
    // h is g at the inverted point
    for (const auto& b : desk_bundles())
        for (double t : {1.0, 1e3, 1e6}) {
            const double x = x_t(b, t);
            CHECK_CLOSE(h_eval(b, t), g_eval(b, std::pow(x, b.alpha)), 1e-12);
        }

    // atom: h approaches the atom mass -log p0 = 1
    {
        const auto b = make_rate_bundle(1, 2.0, kD0, make_atom_law(std::exp(-1.0), 0.3));
        CHECK_CLOSE(h_eval(b, 1e10), 1.0, 1e-3);
    }

    // exponential family: exact power laws for h and the denominator
    {
        const auto b = make_rate_bundle(1, 2.0, kD0, make_exponential_law(1.0));
        const double slope_h = std::log(h_eval(b, 1e9) / h_eval(b, 1e6)) / (3.0 * std::log(10.0));
        const auto [bb, cc] = loglog_limits(make_exponential_law(1.0).a, 1, 2.0);
        CHECK_ABS(slope_h, cc, 1e-3);
        CHECK_CLOSE(cc, 0.4, 1e-15);
        const double slope_den =
            std::log(rate_denominator(b, 1e9) / rate_denominator(b, 1e6)) /
            (3.0 * std::log(10.0));
        CHECK_ABS(slope_den, 0.6, 1e-3);
        (void)bb;
    }

    // h(t)/t vanishes at the desk horizon
    for (const auto& b : desk_bundles()) {
        const double r = h_eval(b, 1e12) / 1e12;
        CHECK(r < 0.01);
        if (b.law.family != LawFamily::doubleexp) CHECK(r < 1e-6);
    }

    // the two denominator forms are one identity
    for (const auto& b : desk_bundles())
        for (double t : logspace(std::max(b.t0 * 1.01, 1e-2), 1e9, 50)) {
            const double lhs = rate_denominator(b, t);
            const double rhs = t / std::pow(x_t(b, t), b.alpha);
            CHECK_CLOSE(lhs, rhs, 1e-9);
        }
}

void test_loglog() {
    {
        const auto [b, c] = loglog_limits(TailIndex{false, 0.0}, 1, 2.0);
        CHECK_CLOSE(b, 1.0 / 3.0, 1e-15);
        CHECK_ABS(c, 0.0, 1e-15);
    }
    {
        const auto [b, c] = loglog_limits(TailIndex{false, 1.0}, 1, 2.0);
        CHECK_CLOSE(b, 0.2, 1e-15);
        CHECK_CLOSE(c, 0.4, 1e-15);
    }
    {
        const auto [b, c] = loglog_limits(TailIndex{false, 2.0}, 1, 2.0);
        CHECK_CLOSE(b, 1.0 / 7.0, 1e-15);
        CHECK_CLOSE(c, 4.0 / 7.0, 1e-15);
    }
    {
        // infinite decay index: pure (0,1) limits with no overflow artifacts
        const auto [b, c] = loglog_limits(TailIndex{true, 0.0}, 1, 2.0);
        CHECK_ABS(b, 0.0, 0.0);
        CHECK_CLOSE(c, 1.0, 1e-15);
    }
    CHECK_THROWS(loglog_limits(TailIndex{false, -1.0}, 1, 2.0), UsageError);
    CHECK_THROWS(loglog_limits(TailIndex{false, 1.0}, 0, 2.0), UsageError);
}

void test_tauber_bounds() {
    const auto b = make_rate_bundle(1, 2.0, 1.0, make_exponential_law(1.0));
    CHECK_CLOSE(tauber_lower(b, 2.0, 2.5).constant, -2.0 * std::sqrt(2.5), 1e-14);
    CHECK_CLOSE(tauber_upper(b, 2.0, 0.5).constant, -1.5 * std::sqrt(0.5), 1e-14);

    // normalizer: x^{d/alpha} / g(B/x) with g(y) = y/D0 here
    {
        const auto tb = tauber_lower(b, 2.0, 2.5);
        const double x = 0.01;
        CHECK_CLOSE(tb.normalizer(x), std::sqrt(x) / (2.5 / x), 1e-12);
    }

    // interior optimum of (A2-B2) B2^{d/alpha} sits at A2 (d/alpha)/(1+d/alpha)
    {
        const double A2 = 2.0, s = 0.5;
        double best = 0.0, bestB = 0.0;
        for (int i = 1; i < 2000; ++i) {
            const double B2 = A2 * i / 2000.0;
            const double v = (A2 - B2) * std::pow(B2, s);
            if (v > best) {
                best = v;
                bestB = B2;
            }
        }
        const double closed = A2 * s / (1.0 + s);
        CHECK_ABS(bestB, closed, 2.0 * A2 / 2000.0);
        CHECK_CLOSE(tauber_upper(b, A2, closed).constant, -best, 1e-6);
    }

    // canonical density rho(x) = exp(-1/x), d = alpha = 1, g -> 1:
    // the normalized log sits at -1, inside both packaged claims
    {
        const auto ba = make_rate_bundle(1, 1.0, 1.0, make_atom_law(std::exp(-1.0), 0.0));
        const auto lo = tauber_lower(ba, 2.0, 2.5);
        const auto up = tauber_upper(ba, 2.0, 0.5);
        const double x = 1e-6;
        const double vlo = lo.normalizer(x) * (-1.0 / x);
        const double vup = up.normalizer(x) * (-1.0 / x);
        CHECK_CLOSE(vlo, -1.0, 1e-12);
        CHECK_CLOSE(vup, -1.0, 1e-12);
        CHECK(vlo >= lo.constant);
        CHECK(vup <= up.constant);
        CHECK_CLOSE(lo.constant, -5.0, 1e-14);
        CHECK_CLOSE(up.constant, -0.75, 1e-14);
    }

    CHECK_THROWS(tauber_lower(b, 0.0, 1.0), UsageError);
    CHECK_THROWS(tauber_lower(b, 2.0, 2.0), UsageError);
    CHECK_THROWS(tauber_upper(b, 2.0, 2.0), UsageError);
    CHECK_THROWS(tauber_upper(b, 2.0, 0.0), UsageError);
}

void test_substitution() {
    // worked point: atom with the mass at one, t = 100, B = 1
    {
        const auto b = make_rate_bundle(1, 1.0, 1.0, make_atom_law(std::exp(-1.0), 0.0));
        const auto s = tauber_substitution(b, 100.0, 1.0);
        CHECK_CLOSE(s.x, 0.1, 1e-12);
        CHECK_CLOSE(s.lhs, 10.0, 1e-12);
        CHECK_CLOSE(s.rhs, 10.0, 1e-12);
    }

    // identity fuzz: 1000 draws per family
    for (const auto& b : desk_bundles()) {
        const double tlo = std::max(b.t0 * 1.01, 1e-2);
        for (int i = 0; i < 1000; ++i) {
            const double t = tlo * std::pow(1e8 / tlo, uniform_at(501, i));
            const double B = 0.1 * std::pow(100.0, uniform_at(503, i));
            const auto s = tauber_substitution(b, t, B);
            CHECK_CLOSE(s.lhs, s.rhs, 1e-8);
            CHECK(s.x > 0.0);
        }
        // the substitution point collapses as t grows
        CHECK(tauber_substitution(b, 1e8, 1.0).x < tauber_substitution(b, 1e2, 1.0).x);
    }
}

void test_serialization() {
    for (const auto& b : desk_bundles()) {
        const auto b2 = parse_bundle(format_bundle(b));
        CHECK(format_bundle(b) == format_bundle(b2));
        CHECK(b2.d == b.d);
        CHECK_CLOSE(b2.alpha, b.alpha, 1e-15);
        CHECK_CLOSE(b2.D0, b.D0, 1e-15);
        for (double t : {1.0, 100.0}) CHECK_CLOSE(x_t(b, t), x_t(b2, t), 1e-13);
    }
    CHECK_THROWS(parse_bundle("rates(d=1)"), UsageError);
    CHECK_THROWS(parse_bundle("spectral(d=1,alpha=2,D0=1,law=doubleexp())"), UsageError);
}

} // namespace

int main() {
    test_bundle();
    test_g_eval();
    test_x_t();
    test_h_and_denominator();
    test_loglog();
    test_tauber_bounds();
    test_substitution();
    test_serialization();
    return harness_exit("test_rates");
}
