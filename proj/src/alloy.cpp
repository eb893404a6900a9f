#include "lifshitz/alloy.hpp"

#include "lifshitz/errors.hpp"
#include "lifshitz/rng.hpp"
#include "parse_util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lifshitz {

namespace {

double unit_ball_surface(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

void check_dim(int d) {
    if (d < 1 || d > 3) throw UsageError("single-site profile: d must be 1, 2, or 3");
}

std::int64_t int_radius(double r) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(r - 1e-12)));
}

} // namespace

SingleSite make_box_site(double h, int d) {
    check_dim(d);
    if (!(h > 0.0)) throw UsageError("box profile: half-width must be positive");
    SingleSite s;
    s.profile = SiteProfile::box;
    s.d = d;
    s.h = h;
    s.M0 = int_radius(h);
    s.norm1 = std::pow(2.0 * h, d);
    s.norm2sq = s.norm1;
    return s;
}

SingleSite make_bump_site(double h, double height, int d) {
    check_dim(d);
    if (!(h > 0.0) || !(height > 0.0))
        throw UsageError("bump profile: half-width and height must be positive");
    SingleSite s;
    s.profile = SiteProfile::bump;
    s.d = d;
    s.h = h;
    s.height = height;
    s.M0 = int_radius(h);
    s.norm1 = height * std::pow(h, d);
    s.norm2sq = height * height * std::pow(0.75 * h, d);
    return s;
}

SingleSite make_trunc_power_site(double beta, double radius, int d, double alpha) {
    check_dim(d);
    if (!(radius > 0.0)) throw UsageError("truncated-power profile: radius must be positive");
    if (!(beta > 0.0) || !(beta < std::min(alpha, 0.5 * d)))
        throw UsageError("truncated-power profile admissible only for 0 < beta < min(alpha, d/2)");
    SingleSite s;
    s.profile = SiteProfile::trunc_power;
    s.d = d;
    s.beta = beta;
    s.radius = radius;
    s.M0 = int_radius(radius);
    const double omega = unit_ball_surface(d);
    s.norm1 = omega * std::pow(radius, d - beta) / (d - beta);
    s.norm2sq = omega * std::pow(radius, d - 2.0 * beta) / (d - 2.0 * beta);
    return s;
}

double site_eval(const SingleSite& site, const double* x, double floor_radius) {
    switch (site.profile) {
    case SiteProfile::box:
        for (int c = 0; c < site.d; ++c)
            if (x[c] < -site.h || x[c] >= site.h) return 0.0;
        return 1.0;
    case SiteProfile::bump: {
        double v = site.height;
        for (int c = 0; c < site.d; ++c) {
            if (std::abs(x[c]) >= site.h) return 0.0;
            const double cs = std::cos(0.5 * M_PI * x[c] / site.h);
            v *= cs * cs;
        }
        return v;
    }
    case SiteProfile::trunc_power: {
        double r2 = 0.0;
        for (int c = 0; c < site.d; ++c) r2 += x[c] * x[c];
        const double r = std::max(std::sqrt(r2), floor_radius);
        if (r > site.radius) return 0.0;
        return std::pow(r, -site.beta);
    }
    }
    throw UsageError("site_eval: unknown profile");
}

std::string format_site(const SingleSite& site) {
    using detail::fmt_num;
    switch (site.profile) {
    case SiteProfile::box:
        return "box(h=" + fmt_num(site.h) + ")";
    case SiteProfile::bump:
        return "bump(h=" + fmt_num(site.h) + ",height=" + fmt_num(site.height) + ")";
    case SiteProfile::trunc_power:
        return "truncpower(beta=" + fmt_num(site.beta) + ",r=" + fmt_num(site.radius) + ")";
    }
    throw UsageError("format_site: unknown profile");
}

SingleSite parse_site(const std::string& text, int d, double alpha) {
    detail::ParsedCall call = detail::parse_call(text);
    if (call.name == "box") return make_box_site(call.num("h"), d);
    if (call.name == "bump") return make_bump_site(call.num("h"), call.num_or("height", 1.0), d);
    if (call.name == "truncpower")
        return make_trunc_power_site(call.num("beta"), call.num("r"), d, alpha);
    throw UsageError("unknown site profile: " + call.name);
}

LatticeLaw make_atom_law(double p0, double slope, bool allow_degenerate) {
    if (!(p0 >= 0.0) || !(p0 <= 1.0)) throw UsageError("atom law: p0 must lie in [0,1]");
    if (!(slope >= 0.0)) throw UsageError("atom law: slope must be nonnegative");
    LatticeLaw law;
    law.family = LawFamily::atom;
    law.p0 = p0;
    law.slope = slope;
    law.a = {false, 0.0};
    if (p0 == 1.0) {
        if (!allow_degenerate)
            throw UsageError("atom law: p0 = 1 is degenerate (q = 0 a.s.); "
                             "allowed only as an explicit control law");
        law.degenerate = true;
        law.kappa0 = std::numeric_limits<double>::infinity();
        return law;
    }
    if (slope == 0.0 && p0 == 0.0)
        throw UsageError("atom law: p0 = 0 with zero slope makes F_q vanish near 0");
    law.kappa0 = slope > 0.0 ? (1.0 - p0) / slope : 0.5;
    return law;
}

LatticeLaw make_power_law(double gamma, double cap) {
    if (!(gamma > 0.0)) throw UsageError("power law: gamma must be positive");
    if (!(cap > 0.0)) throw UsageError("power law: cap must be positive");
    LatticeLaw law;
    law.family = LawFamily::power;
    law.gamma = gamma;
    law.cap = cap;
    law.kappa0 = cap;
    law.a = {false, 0.0};
    return law;
}

LatticeLaw make_exponential_law(double gamma) {
    if (!(gamma > 0.0)) throw UsageError("exponential law: gamma must be positive");
    LatticeLaw law;
    law.family = LawFamily::exponential;
    law.gamma = gamma;
    law.kappa0 = std::numeric_limits<double>::infinity();
    law.a = {false, gamma};
    return law;
}

LatticeLaw make_doubleexp_law() {
    LatticeLaw law;
    law.family = LawFamily::doubleexp;
    law.kappa0 = std::numeric_limits<double>::infinity();
    law.a = {true, 0.0};
    return law;
}

double cdf_eval(const LatticeLaw& law, double kappa) {
    if (!(kappa >= 0.0)) throw UsageError("cdf_eval: kappa must be nonnegative");
    if (law.degenerate) return 1.0;
    switch (law.family) {
    case LawFamily::atom:
        if (law.slope > 0.0) return std::min(law.p0 + law.slope * kappa, 1.0);
        return kappa >= 1.0 ? 1.0 : law.p0;
    case LawFamily::power:
        return kappa >= law.cap ? 1.0 : std::pow(kappa / law.cap, law.gamma);
    case LawFamily::exponential:
        return kappa == 0.0 ? 0.0 : std::exp(-std::pow(kappa, -law.gamma));
    case LawFamily::doubleexp:
        return kappa == 0.0 ? 0.0 : std::exp(1.0 - std::exp(1.0 / kappa));
    }
    throw UsageError("cdf_eval: unknown family");
}

double log_cdf_eval(const LatticeLaw& law, double kappa) {
    if (!(kappa >= 0.0)) throw UsageError("log_cdf_eval: kappa must be nonnegative");
    if (law.degenerate) return 0.0;
    switch (law.family) {
    case LawFamily::atom:
        if (law.slope > 0.0) return std::log(std::min(law.p0 + law.slope * kappa, 1.0));
        return kappa >= 1.0 ? 0.0 : std::log(law.p0);
    case LawFamily::power:
        return kappa >= law.cap ? 0.0 : law.gamma * (std::log(kappa) - std::log(law.cap));
    case LawFamily::exponential:
        return -std::pow(kappa, -law.gamma);
    case LawFamily::doubleexp:
        return -std::expm1(1.0 / kappa);
    }
    throw UsageError("log_cdf_eval: unknown family");
}

double quantile(const LatticeLaw& law, double u) {
    if (!(u > 0.0) || !(u < 1.0)) throw UsageError("quantile: u must lie in (0,1)");
    if (law.degenerate) return 0.0;
    switch (law.family) {
    case LawFamily::atom:
        if (u <= law.p0) return 0.0;
        return law.slope > 0.0 ? std::min((u - law.p0) / law.slope,
                                          (1.0 - law.p0) / law.slope)
                               : 1.0;
    case LawFamily::power:
        return law.cap * std::pow(u, 1.0 / law.gamma);
    case LawFamily::exponential:
        return std::pow(-std::log(u), -1.0 / law.gamma);
    case LawFamily::doubleexp:
        return 1.0 / std::log(1.0 - std::log(u));
    }
    throw UsageError("quantile: unknown family");
}

std::string format_law(const LatticeLaw& law) {
    using detail::fmt_num;
    switch (law.family) {
    case LawFamily::atom:
        return "atom(p0=" + fmt_num(law.p0) + ",slope=" + fmt_num(law.slope) + ")";
    case LawFamily::power:
        if (law.cap == 1.0) return "power(gamma=" + fmt_num(law.gamma) + ")";
        return "power(gamma=" + fmt_num(law.gamma) + ",cap=" + fmt_num(law.cap) + ")";
    case LawFamily::exponential:
        return "exponential(gamma=" + fmt_num(law.gamma) + ")";
    case LawFamily::doubleexp:
        return "doubleexp()";
    }
    throw UsageError("format_law: unknown family");
}

LatticeLaw parse_law(const std::string& text) {
    detail::ParsedCall call = detail::parse_call(text);
    if (call.name == "atom") return make_atom_law(call.num("p0"), call.num("slope"), true);
    if (call.name == "power") return make_power_law(call.num("gamma"), call.num_or("cap", 1.0));
    if (call.name == "exponential") return make_exponential_law(call.num("gamma"));
    if (call.name == "doubleexp") return make_doubleexp_law();
    throw UsageError("unknown lattice law: " + call.name);
}

Configuration sample_config(const LatticeLaw& law, std::int64_t M, int d, std::uint64_t seed) {
    if (M < 1) throw UsageError("sample_config: M must be positive");
    check_dim(d);
    Configuration cfg;
    cfg.M = M;
    cfg.d = d;
    cfg.seed = seed;
    cfg.law = law;
    std::int64_t count = 1;
    for (int c = 0; c < d; ++c) count *= M;
    cfg.values.resize(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        cfg.values[static_cast<std::size_t>(i)] =
            quantile(law, uniform_at(seed, static_cast<std::uint64_t>(i)));
    return cfg;
}

std::vector<double> periodized_potential(const Configuration& config, const SingleSite& site,
                                         const TorusGrid& grid) {
    if (grid.M != config.M || grid.d != config.d)
        throw UsageError("periodized_potential: grid and configuration disagree on (M, d)");
    if (site.d != grid.d)
        throw UsageError("periodized_potential: site profile dimension mismatch");
    const int d = grid.d;
    const std::int64_t M = grid.M;
    const std::int64_t N = grid.N;
    const double sp = grid.spacing();
    const double srad =
        site.profile == SiteProfile::trunc_power ? site.radius : site.h;
    const double floor_r = site.profile == SiteProfile::trunc_power ? 0.5 * sp : 0.0;
    const std::int64_t total = grid.total();
    std::vector<double> out(static_cast<std::size_t>(total));

    std::array<std::int64_t, 3> jj{0, 0, 0};
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::int64_t rem = flat;
        for (int c = d - 1; c >= 0; --c) {
            jj[c] = rem % N;
            rem /= N;
        }
        for (int c = 0; c < d; ++c) {
            x[c] = static_cast<double>(jj[c]) * sp;
            lo[c] = static_cast<std::int64_t>(std::floor(x[c] - srad)) - 1;
            hi[c] = static_cast<std::int64_t>(std::ceil(x[c] + srad)) + 1;
        }
        double acc = 0.0;
        std::array<double, 3> disp{0.0, 0.0, 0.0};
        for (std::int64_t i0 = lo[0]; i0 <= hi[0]; ++i0) {
            disp[0] = x[0] - static_cast<double>(i0);
            const std::int64_t m0 = ((i0 % M) + M) % M;
            for (std::int64_t i1 = (d > 1 ? lo[1] : 0); i1 <= (d > 1 ? hi[1] : 0); ++i1) {
                if (d > 1) disp[1] = x[1] - static_cast<double>(i1);
                const std::int64_t m1 = d > 1 ? ((i1 % M) + M) % M : 0;
                for (std::int64_t i2 = (d > 2 ? lo[2] : 0); i2 <= (d > 2 ? hi[2] : 0); ++i2) {
                    if (d > 2) disp[2] = x[2] - static_cast<double>(i2);
                    const std::int64_t m2 = d > 2 ? ((i2 % M) + M) % M : 0;
                    const double w = site_eval(site, disp.data(), floor_r);
                    if (w != 0.0) {
                        std::int64_t q_idx = m0;
                        if (d > 1) q_idx = q_idx * M + m1;
                        if (d > 2) q_idx = q_idx * M + m2;
                        acc += config.values[static_cast<std::size_t>(q_idx)] * w;
                    }
                }
            }
        }
        out[static_cast<std::size_t>(flat)] = acc;
    }
    return out;
}

double compute_D0(const SingleSite& site, const BernsteinSpec& phi) {
    const double mu21 = 4.0 * M_PI * M_PI;
    const double A = phi.c1 * std::pow(mu21, 0.5 * phi.alpha);
    const double w1 = site.norm1;
    const double w2 = site.norm2sq;
    const double vol = std::pow(2.0 * static_cast<double>(site.M0), site.d);
    const double D0 = 0.5 * A * w1 / (w1 * w1 + vol * w2);
    const double denom = A - D0 * w1;
    if (!(denom > 0.0))
        throw NumericError("compute_D0: admissibility denominator nonpositive");
    const double ratio = vol * D0 * w2 / (denom * w1);
    if (!(ratio < 1.0))
        throw NumericError("compute_D0: admissibility ratio >= 1");
    return D0;
}

Configuration truncate_config(const Configuration& config, double D0, double alpha) {
    if (!(D0 > 0.0)) throw UsageError("truncate_config: D0 must be positive");
    Configuration out = config;
    const double thr = D0 * std::pow(static_cast<double>(config.M), -alpha);
    for (double& v : out.values) v = std::min(v, thr);
    return out;
}

bool in_A_delta(const Configuration& config, double delta, double D0, double alpha) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw UsageError("in_A_delta: delta must lie in (0,1)");
    if (!(D0 > 0.0)) throw UsageError("in_A_delta: D0 must be positive");
    const double thr = D0 * std::pow(static_cast<double>(config.M), -alpha);
    std::int64_t count = 0;
    for (double v : config.values)
        if (v > thr) ++count;
    return static_cast<double>(count) >=
           delta * static_cast<double>(config.values.size());
}

void write_config(const std::string& path, const Configuration& config) {
    TorusGrid lattice;
    lattice.M = config.M;
    lattice.d = config.d;
    lattice.n = 1;
    lattice.N = config.M;
    write_seeded_field(path, config.seed, lattice, config.values);
}

} // namespace lifshitz
