#include "lifshitz/alloy.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/quadrature.hpp"
#include "lifshitz/rng.hpp"

#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

using namespace lifshitz;

namespace {

constexpr double kPi = 3.14159265358979323846;

double surface(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

void test_sites() {
    // box: indicator of [-h,h)^d
    {
        const auto s = make_box_site(0.5, 1);
        CHECK(s.M0 == 1);
        CHECK_CLOSE(s.norm1, 1.0, 1e-15);
        CHECK_CLOSE(s.norm2sq, 1.0, 1e-15);
        double x = 0.3;
        CHECK_CLOSE(site_eval(s, &x), 1.0, 1e-15);
        x = 0.5;
        CHECK_ABS(site_eval(s, &x), 0.0, 0.0);
        x = -0.5;
        CHECK_CLOSE(site_eval(s, &x), 1.0, 1e-15);
        const auto s2 = make_box_site(0.3, 2);
        CHECK_CLOSE(s2.norm1, 0.36, 1e-15);
        CHECK_CLOSE(s2.norm2sq, 0.36, 1e-15);
    }

    // bump: quadrature oracle for both norms
    {
        const auto s = make_bump_site(0.5, 2.0, 1);
        const double n1 = integrate_or_throw(
            [&](double x) { return site_eval(s, &x); }, -0.5, 0.5, 1e-14, 1e-12);
        const double n2 = integrate_or_throw(
            [&](double x) {
                const double w = site_eval(s, &x);
                return w * w;
            },
            -0.5, 0.5, 1e-14, 1e-12);
        CHECK_CLOSE(s.norm1, n1, 1e-10);
        CHECK_CLOSE(s.norm2sq, n2, 1e-10);
        CHECK_CLOSE(s.norm1, 2.0 * 0.5, 1e-13);              // height * h^d
        CHECK_CLOSE(s.norm2sq, 4.0 * 0.375, 1e-13);          // height^2 (3h/4)^d
        double x = 0.0;
        CHECK_CLOSE(site_eval(s, &x), 2.0, 1e-15);
        CHECK(make_bump_site(2.3, 1.0, 1).M0 == 3);
    }
    {
        const auto s = make_bump_site(0.5, 1.0, 2);
        // product structure: the 2d norms are squares of the 1d ones
        CHECK_CLOSE(s.norm1, 0.25, 1e-13);
        CHECK_CLOSE(s.norm2sq, 0.375 * 0.375, 1e-13);
        double x[2] = {0.1, -0.2};
        const double c1 = std::cos(kPi * 0.1), c2 = std::cos(kPi * -0.2);
        CHECK_CLOSE(site_eval(s, x), c1 * c1 * c2 * c2, 1e-14);
    }

    // trunc_power: calculus closed forms and the singularity floor
    {
        const auto s = make_trunc_power_site(0.3, 0.5, 1, 2.0);
        CHECK_CLOSE(s.norm1, surface(1) * std::pow(0.5, 0.7) / 0.7, 1e-13);
        CHECK_CLOSE(s.norm2sq, surface(1) * std::pow(0.5, 0.4) / 0.4, 1e-13);
        double x = 0.25;
        CHECK_CLOSE(site_eval(s, &x), std::pow(0.25, -0.3), 1e-14);
        x = 0.7;
        CHECK_ABS(site_eval(s, &x), 0.0, 0.0);
        x = 1e-12;
        CHECK_CLOSE(site_eval(s, &x, 0.0625), std::pow(0.0625, -0.3), 1e-14);
        CHECK(make_trunc_power_site(0.3, 1.5, 1, 2.0).M0 == 2);

        const auto s2 = make_trunc_power_site(0.8, 1.0, 2, 2.0);
        CHECK_CLOSE(s2.norm1, surface(2) / 1.2, 1e-13);
        CHECK_CLOSE(s2.norm2sq, surface(2) / 0.4, 1e-13);
    }
    CHECK_THROWS(make_trunc_power_site(0.6, 0.5, 1, 2.0), UsageError); // beta >= d/2
    CHECK_THROWS(make_trunc_power_site(0.3, 0.5, 1, 0.2), UsageError); // beta >= alpha
    CHECK_THROWS(make_box_site(0.0, 1), UsageError);
    CHECK_THROWS(make_bump_site(0.5, -1.0, 1), UsageError);

    // text round trips
    for (const char* txt :
         {"box(h=0.5)", "box(h=1.7)", "bump(h=0.5,height=2)", "truncpower(beta=0.3,r=0.5)"}) {
        const auto s = parse_site(txt, 1, 2.0);
        const auto s2 = parse_site(format_site(s), 1, 2.0);
        CHECK(format_site(s) == format_site(s2));
        double x = 0.21;
        CHECK_CLOSE(site_eval(s, &x, 1e-3) + 1.0, site_eval(s2, &x, 1e-3) + 1.0, 1e-15);
    }
    CHECK_THROWS(parse_site("cone(h=1)", 1, 2.0), UsageError);
}

void test_laws() {
    // closed-form CDF values
    CHECK_CLOSE(cdf_eval(make_exponential_law(1.0), 1.0), std::exp(-1.0), 1e-15);
    CHECK_CLOSE(cdf_eval(make_exponential_law(1.0), 0.5), std::exp(-2.0), 1e-15);
    CHECK_CLOSE(cdf_eval(make_exponential_law(2.0), 2.0), std::exp(-0.25), 1e-15);
    CHECK_CLOSE(cdf_eval(make_doubleexp_law(), 1.0), std::exp(1.0 - std::exp(1.0)), 1e-15);
    CHECK_CLOSE(cdf_eval(make_atom_law(0.3, 0.7), 0.0), 0.3, 1e-15);
    CHECK_CLOSE(cdf_eval(make_atom_law(0.3, 0.7), 0.5), 0.65, 1e-15);
    CHECK_CLOSE(cdf_eval(make_atom_law(0.3, 0.7), 2.0), 1.0, 1e-15);
    CHECK_CLOSE(cdf_eval(make_atom_law(0.4, 0.0), 0.999), 0.4, 1e-15);
    CHECK_CLOSE(cdf_eval(make_atom_law(0.4, 0.0), 1.0), 1.0, 1e-15);
    CHECK_CLOSE(cdf_eval(make_power_law(2.0), 0.5), 0.25, 1e-15);
    CHECK_CLOSE(cdf_eval(make_power_law(1.0, 2.0), 1.0), 0.5, 1e-15);

    // continuity windows and decay indices
    CHECK_CLOSE(make_atom_law(0.3, 0.7).kappa0, 1.0, 1e-15);
    CHECK_CLOSE(make_atom_law(0.4, 0.0).kappa0, 0.5, 1e-15);
    CHECK_CLOSE(make_power_law(1.5, 2.0).kappa0, 2.0, 1e-15);
    CHECK(std::isinf(make_exponential_law(1.0).kappa0));
    CHECK(std::isinf(make_doubleexp_law().kappa0));
    CHECK(!make_atom_law(0.3, 0.7).a.infinite);
    CHECK_ABS(make_atom_law(0.3, 0.7).a.value, 0.0, 0.0);
    CHECK(!make_power_law(2.0).a.infinite);
    CHECK_ABS(make_power_law(2.0).a.value, 0.0, 0.0);
    CHECK(!make_exponential_law(1.5).a.infinite);
    CHECK_CLOSE(make_exponential_law(1.5).a.value, 1.5, 1e-15);
    CHECK(make_doubleexp_law().a.infinite);

    // log CDF stays finite deep in the tail and matches the CDF where both live
    for (double k : {0.01, 0.1, 1.0, 5.0}) {
        CHECK_CLOSE(std::exp(log_cdf_eval(make_exponential_law(1.0), k)),
                    cdf_eval(make_exponential_law(1.0), k), 1e-13);
        CHECK_CLOSE(std::exp(log_cdf_eval(make_doubleexp_law(), k)),
                    cdf_eval(make_doubleexp_law(), k), 1e-13);
    }
    CHECK_CLOSE(log_cdf_eval(make_exponential_law(2.0), 1e-3), -1e6, 1e-12);
    CHECK(std::isfinite(log_cdf_eval(make_doubleexp_law(), 0.02)));

    // monotone CDFs
    for (const auto& law : {make_atom_law(0.3, 0.7), make_power_law(2.0),
                            make_exponential_law(1.0), make_doubleexp_law()}) {
        double prev = -1.0;
        for (int i = 0; i <= 60; ++i) {
            const double k = 5.0 * i / 60.0;
            const double F = cdf_eval(law, k);
            CHECK(F >= prev - 1e-15);
            CHECK(F >= 0.0 && F <= 1.0);
            prev = F;
        }
    }

    // inverse property on the continuous families
    for (const auto& law :
         {make_power_law(2.0), make_exponential_law(1.0), make_doubleexp_law()})
        for (int i = 1; i < 40; ++i) {
            const double u = i / 40.0;
            CHECK_CLOSE(cdf_eval(law, quantile(law, u)), u, 1e-12);
        }
    // atom quantile hits the atom below p0 and is linear above
    {
        const auto law = make_atom_law(0.3, 0.7);
        CHECK_ABS(quantile(law, 0.2), 0.0, 0.0);
        CHECK_CLOSE(quantile(law, 0.65), 0.5, 1e-13);
    }

    CHECK_THROWS(make_atom_law(1.0, 0.0), UsageError);
    CHECK(make_atom_law(1.0, 0.0, true).degenerate);
    CHECK(parse_law("atom(p0=1,slope=0)").degenerate);
    CHECK_THROWS(make_atom_law(-0.1, 0.5), UsageError);
    CHECK_THROWS(make_power_law(0.0), UsageError);
    CHECK_THROWS(make_exponential_law(-1.0), UsageError);
    CHECK_THROWS(quantile(make_power_law(1.0), 1.5), UsageError);

    // text round trips
    for (const char* txt : {"atom(p0=0.3,slope=0.7)", "atom(p0=0.4,slope=0)",
                            "power(gamma=2,cap=1)", "exponential(gamma=1.5)", "doubleexp()"}) {
        const auto l = parse_law(txt);
        const auto l2 = parse_law(format_law(l));
        CHECK(format_law(l) == format_law(l2));
        for (double k : {0.1, 0.7, 1.3}) CHECK_CLOSE(cdf_eval(l, k), cdf_eval(l2, k), 1e-15);
    }
    CHECK_THROWS(parse_law("cauchy(s=1)"), UsageError);
}

void test_sampling() {
    // Kolmogorov-Smirnov against the closed-form CDF at 1e5 draws
    for (const auto& law :
         {make_power_law(2.0), make_exponential_law(1.0), make_doubleexp_law()}) {
        const int n = 100000;
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = quantile(law, uniform_at(1234, i));
        std::sort(xs.begin(), xs.end());
        double ks = 0.0;
        for (int i = 0; i < n; ++i) {
            const double F = cdf_eval(law, xs[i]);
            ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
            ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
        }
        CHECK(ks <= 0.02);
    }

    // atom masses by exact frequency counts
    {
        const auto law = make_atom_law(0.36787944117144233, 0.3);
        const int n = 100000;
        int zeros = 0;
        for (int i = 0; i < n; ++i)
            if (quantile(law, uniform_at(777, i)) == 0.0) ++zeros;
        const double p = 0.36787944117144233;
        const double sd = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(zeros / static_cast<double>(n) - p) <= 3.0 * sd);
    }
    {
        const auto law = make_atom_law(0.4, 0.0);
        const int n = 100000;
        int ones = 0;
        for (int i = 0; i < n; ++i)
            if (quantile(law, uniform_at(778, i)) == 1.0) ++ones;
        const double sd = std::sqrt(0.6 * 0.4 / n);
        CHECK(std::abs(ones / static_cast<double>(n) - 0.6) <= 3.0 * sd);
    }

    // configurations are pure functions of (seed, site index)
    {
        const auto law = make_exponential_law(1.0);
        const auto c1 = sample_config(law, 4, 2, 99);
        const auto c2 = sample_config(law, 4, 2, 99);
        const auto c3 = sample_config(law, 4, 2, 100);
        CHECK(c1.values == c2.values);
        CHECK(c1.values != c3.values);
        CHECK(c1.values.size() == 16);
        CHECK(c1.seed == 99);
        for (double v : c1.values) CHECK(v > 0.0);
    }
}

void test_periodized() {
    // couplings q == c with the unit box tile the line exactly
    for (int d : {1, 2}) {
        const auto site = make_box_site(0.5, d);
        const auto law = make_exponential_law(1.0);
        auto config = sample_config(law, 4, d, 5);
        for (auto& v : config.values) v = 0.7;
        const TorusGrid grid = make_grid(4, d);
        const auto V = periodized_potential(config, site, grid);
        for (double v : V) CHECK_ABS(v, 0.7, 1e-12);
    }

    // single occupied site contributes through the periodic wrap
    {
        Configuration config;
        config.M = 4;
        config.d = 1;
        config.values = {1.0, 0.0, 0.0, 0.0};
        config.law = make_exponential_law(1.0);
        const TorusGrid grid = make_grid(4, 1);
        const auto V = periodized_potential(config, make_box_site(0.5, 1), grid);
        CHECK_CLOSE(V[0], 1.0, 1e-15);          // x = 0
        CHECK_CLOSE(V[3], 1.0, 1e-15);          // x = 0.375
        CHECK_ABS(V[4], 0.0, 0.0);              // x = 0.5: half-open edge
        CHECK_ABS(V[16], 0.0, 0.0);             // x = 2
        CHECK_CLOSE(V[29], 1.0, 1e-15);         // x = 3.625, wraps to -0.375
    }

    // grid integral of V approaches ||W||_1 * sum(q)
    {
        const auto site = make_bump_site(0.5, 1.0, 1);
        const auto law = make_power_law(1.0);
        const auto config = sample_config(law, 8, 1, 12);
        double qsum = 0.0;
        for (double q : config.values) qsum += q;
        const double exact = site.norm1 * qsum;
        double errs[2];
        int idx = 0;
        for (std::int64_t n : {8, 16}) {
            const TorusGrid grid = make_grid(8, 1, n);
            const auto V = periodized_potential(config, site, grid);
            double s = 0.0;
            for (double v : V) s += v;
            s *= grid.spacing();
            errs[idx++] = std::abs(s - exact) / exact;
        }
        CHECK(errs[0] <= 0.01);
        CHECK(errs[1] <= errs[0] + 1e-12);
    }

    // the trunc_power floor clamps the on-site singularity to half a cell
    {
        Configuration config;
        config.M = 4;
        config.d = 1;
        config.values = {1.0, 0.0, 0.0, 0.0};
        config.law = make_exponential_law(1.0);
        const TorusGrid grid = make_grid(4, 1);
        const auto site = make_trunc_power_site(0.3, 0.5, 1, 2.0);
        const auto V = periodized_potential(config, site, grid);
        CHECK_CLOSE(V[0], std::pow(0.5 * grid.spacing(), -0.3), 1e-13);
    }

    // truncation caps couplings at D0 M^{-alpha} and dominates pointwise
    {
        const auto law = make_exponential_law(1.0);
        const auto config = sample_config(law, 4, 1, 31);
        const double D0 = 2.0, alpha = 2.0;
        const auto trunc = truncate_config(config, D0, alpha);
        const double cap = D0 * std::pow(4.0, -alpha);
        for (std::size_t i = 0; i < config.values.size(); ++i) {
            CHECK_CLOSE(trunc.values[i] + 1.0, std::min(config.values[i], cap) + 1.0, 1e-15);
        }
        const auto twice = truncate_config(trunc, D0, alpha);
        CHECK(twice.values == trunc.values);
        const TorusGrid grid = make_grid(4, 1);
        const auto site = make_box_site(0.5, 1);
        const auto V = periodized_potential(config, site, grid);
        const auto Vt = periodized_potential(trunc, site, grid);
        for (std::size_t i = 0; i < V.size(); ++i) CHECK(Vt[i] <= V[i] + 1e-15);
    }
}

void test_D0() {
    CHECK_CLOSE(compute_D0(make_box_site(0.5, 1), make_drift(1.0)),
                2.0 * kPi * kPi / 3.0, 1e-13);
    CHECK_CLOSE(compute_D0(make_box_site(0.5, 1), make_drift(2.0)),
                4.0 * kPi * kPi / 3.0, 1e-13);
    CHECK_CLOSE(compute_D0(make_box_site(0.5, 1), make_stable(1.0)), kPi / 3.0, 1e-13);
    CHECK_CLOSE(compute_D0(make_bump_site(0.5, 1.0, 1), make_drift(1.0)), kPi * kPi, 1e-13);
}

// Exact n = 4 binomial tail, enumerated directly.
double binom4_tail(double p, int kmin) {
    double s = 0.0;
    for (int k = kmin; k <= 4; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c = c * (4 - i) / (i + 1);
        s += c * std::pow(p, k) * std::pow(1.0 - p, 4 - k);
    }
    return s;
}

void test_in_A_delta() {
    const double D0 = 1.0, alpha = 2.0;
    {
        Configuration config;
        config.M = 4;
        config.d = 1;
        config.values = {1.0, 1.0, 1.0, 1.0};
        CHECK(in_A_delta(config, 0.99, D0, alpha));
        config.values = {0.0, 0.0, 0.0, 0.0};
        CHECK(!in_A_delta(config, 0.25, D0, alpha));
        // threshold is D0 M^{-alpha} = 1/16: exactly two sites above
        config.values = {0.1, 0.1, 0.0, 0.0};
        CHECK(in_A_delta(config, 0.5, D0, alpha));
        CHECK(!in_A_delta(config, 0.75, D0, alpha));
    }

    // empirical frequency against the exact binomial, 1e4 configurations
    {
        const auto law = make_exponential_law(1.0);
        const double thr = D0 * std::pow(4.0, -alpha);
        const double p = 1.0 - cdf_eval(law, thr);
        const double exact = binom4_tail(p, 2); // delta 0.5, M^d = 4
        const int n = 10000;
        int hits = 0;
        for (int s = 0; s < n; ++s)
            if (in_A_delta(sample_config(law, 4, 1, 5000 + s), 0.5, D0, alpha)) ++hits;
        const double sd = std::sqrt(exact * (1.0 - exact) / n);
        CHECK(std::abs(hits / static_cast<double>(n) - exact) <= 3.0 * sd);
    }

    // monotone in delta and in D0
    {
        const auto law = make_exponential_law(1.0);
        for (int s = 0; s < 50; ++s) {
            const auto c = sample_config(law, 4, 1, 900 + s);
            if (in_A_delta(c, 0.9, D0, alpha)) CHECK(in_A_delta(c, 0.1, D0, alpha));
            if (in_A_delta(c, 0.5, 3.0, alpha)) CHECK(in_A_delta(c, 0.5, 1.0, alpha));
        }
    }
}

void test_config_io() {
    const auto law = make_power_law(2.0);
    const auto config = sample_config(law, 3, 2, 41);
    write_config("test_alloy_config.bin", config);
    const auto [seed, grid, values] = read_seeded_field("test_alloy_config.bin");
    CHECK(seed == 41);
    CHECK(grid.M == 3);
    CHECK(grid.d == 2);
    CHECK(grid.n == 1);
    CHECK(values == config.values);
    std::remove("test_alloy_config.bin");
}

} // namespace

int main() {
    test_sites();
    test_laws();
    test_sampling();
    test_periodized();
    test_D0();
    test_in_A_delta();
    test_config_io();
    return harness_exit("test_alloy");
}
