#include "lifshitz/bernstein.hpp"
#include "lifshitz/bounds.hpp"
#include "lifshitz/errors.hpp"
#include "lifshitz/grid.hpp"
#include "lifshitz/lab.hpp"
#include "lifshitz/lanczos.hpp"
#include "lifshitz/rates.hpp"
#include "lifshitz/rng.hpp"
#include "lifshitz/torus.hpp"
#include "parse_util.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

using namespace lifshitz;

namespace {

struct Opts {
    std::string phi = "drift(b=1)";
    std::string site = "box(h=0.5)";
    std::string law = "atom(p0=0.36787944117144233,slope=0.3)";
    std::string potential_law; // defaults to law
    int d = 1;
    std::string Ms = "[4]";
    std::int64_t M = 4;
    std::int64_t n = 8;
    int K = 64;
    std::string t_grid;
    std::string lambda_grid;
    std::string x_grid = "[0.001,0.01,0.1]";
    int samples = 1;
    std::uint64_t seed = 1;
    double eig_tol = 1e-8;
    double trace_tol = 1e-6;
    int threads = 0;
    std::string out = "run";
    double D0 = 0.0; // 0: derive from site and phi
    double delta = 0.5;
    double coeff = 1.0;
    double power = 1.0;
    bool allow_degenerate = false;
    std::string save_config;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config file: expected key=value, got: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

double to_num(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config file: bad number for '" + key + "': " + value);
    }
}

void apply_config(Opts& o, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "phi") o.phi = value;
        else if (key == "site") o.site = value;
        else if (key == "law") o.law = value;
        else if (key == "potential_law") o.potential_law = value;
        else if (key == "d") o.d = static_cast<int>(to_num(key, value));
        else if (key == "Ms") o.Ms = value;
        else if (key == "M") o.M = static_cast<std::int64_t>(to_num(key, value));
        else if (key == "n") o.n = static_cast<std::int64_t>(to_num(key, value));
        else if (key == "K") o.K = static_cast<int>(to_num(key, value));
        else if (key == "t_grid") o.t_grid = value;
        else if (key == "lambda_grid") o.lambda_grid = value;
        else if (key == "x_grid") o.x_grid = value;
        else if (key == "samples") o.samples = static_cast<int>(to_num(key, value));
        else if (key == "seed") o.seed = static_cast<std::uint64_t>(to_num(key, value));
        else if (key == "eig_tol") o.eig_tol = to_num(key, value);
        else if (key == "trace_tol") o.trace_tol = to_num(key, value);
        else if (key == "threads") o.threads = static_cast<int>(to_num(key, value));
        else if (key == "out") o.out = value;
        else if (key == "D0") o.D0 = to_num(key, value);
        else if (key == "delta") o.delta = to_num(key, value);
        else if (key == "coeff") o.coeff = to_num(key, value);
        else if (key == "power") o.power = to_num(key, value);
        else if (key == "allow_degenerate") o.allow_degenerate = to_num(key, value) != 0.0;
        else throw UsageError("config file: unknown key '" + key + "'");
    }
}

// Grids are written [v,v,...] or logspace(lo=...,hi=...,count=...).
std::vector<double> parse_grid(const std::string& text, const char* what) {
    if (text.empty()) throw UsageError(std::string("missing ") + what);
    std::vector<double> out;
    if (text.front() == '[') {
        if (text.back() != ']') throw UsageError(std::string(what) + ": unbalanced [..]");
        std::string item;
        for (std::size_t i = 1; i < text.size(); ++i) {
            const char ch = text[i];
            if (ch == ',' || ch == ']') {
                item = trim(item);
                if (!item.empty()) out.push_back(to_num(what, item));
                item.clear();
            } else {
                item += ch;
            }
        }
    } else {
        detail::ParsedCall call = detail::parse_call(text);
        if (call.name != "logspace")
            throw UsageError(std::string(what) + ": expected [..] or logspace(...)");
        const double lo = call.num("lo"), hi = call.num("hi");
        const int count = static_cast<int>(call.num("count"));
        if (!(lo > 0.0) || !(hi > lo) || count < 2)
            throw UsageError(std::string(what) + ": logspace needs 0 < lo < hi, count >= 2");
        for (int i = 0; i < count; ++i)
            out.push_back(std::exp(std::log(lo) +
                                   (std::log(hi) - std::log(lo)) * i / (count - 1.0)));
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty grid");
    return out;
}

std::vector<std::int64_t> parse_M_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (double v : parse_grid(text, "Ms")) {
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9 || r < 1.0)
            throw UsageError("Ms: entries must be positive integers");
        out.push_back(static_cast<std::int64_t>(r));
    }
    return out;
}

LatticeLaw checked_law(const std::string& text, bool allow_degenerate) {
    LatticeLaw law = parse_law(text);
    if (law.degenerate && !allow_degenerate)
        throw UsageError("degenerate law (q = 0 a.s.) requires --allow-degenerate");
    return law;
}

struct Model {
    BernsteinSpec phi;
    SingleSite site;
    double D0 = 0.0;
};

Model build_model(const Opts& o) {
    Model m;
    m.phi = parse_bernstein(o.phi);
    m.site = parse_site(o.site, o.d, m.phi.alpha);
    m.D0 = o.D0 > 0.0 ? o.D0 : compute_D0(m.site, m.phi);
    return m;
}

ExperimentConfig build_experiment(const Opts& o, const Model& m) {
    ExperimentConfig cfg;
    cfg.phi = m.phi;
    cfg.site = m.site;
    cfg.law = checked_law(o.potential_law.empty() ? o.law : o.potential_law,
                          o.allow_degenerate);
    cfg.d = o.d;
    cfg.Ms = parse_M_list(o.Ms);
    cfg.n = o.n;
    cfg.K = o.K;
    if (!o.t_grid.empty()) cfg.t_grid = parse_grid(o.t_grid, "t_grid");
    if (!o.lambda_grid.empty()) cfg.lambda_grid = parse_grid(o.lambda_grid, "lambda_grid");
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.eig_tol = o.eig_tol;
    cfg.trace_tol = o.trace_tol;
    cfg.threads = o.threads;
    cfg.out = o.out;
    return cfg;
}

int run_rates(const Opts& o) {
    const Model m = build_model(o);
    const RateBundle bundle =
        make_rate_bundle(o.d, m.phi.alpha, m.D0, checked_law(o.law, false));
    std::printf("bundle: %s\n", format_bundle(bundle).c_str());
    std::printf("x0: %.17g\nt0: %.17g\n", bundle.x0, bundle.t0);
    const auto [b, c] = loglog_limits(bundle.law.a, bundle.d, bundle.alpha);
    std::printf("loglog_b: %.17g\nloglog_c: %.17g\n", b, c);
    if (!o.t_grid.empty()) {
        std::printf("t,x_t,h,denominator,M_upper\n");
        for (double t : parse_grid(o.t_grid, "t_grid")) {
            const double xt = x_t(bundle, t);
            std::printf("%.17g,%.17g,%.17g,%.17g,%lld\n", t, xt, h_eval(bundle, t),
                        rate_denominator(bundle, t),
                        static_cast<long long>(choose_M_of_t(bundle, t, true)));
        }
    }
    return 0;
}

int run_spectrum(const Opts& o) {
    const Model m = build_model(o);
    const LatticeLaw law = checked_law(o.law, o.allow_degenerate);
    const TorusGrid grid = make_grid(o.M, o.d, o.n);
    const Configuration config = sample_config(law, o.M, o.d, o.seed);
    if (!o.save_config.empty()) write_config(o.save_config, config);
    const SchrodingerOperator op = make_schrodinger(
        make_spectral(grid, m.phi), periodized_potential(config, m.site, grid));
    const int K = static_cast<int>(std::min<std::int64_t>(o.K, grid.total()));
    const EigenResult eig = lowest_eigenpairs(op, K, o.eig_tol, mix64(o.seed, 0x9d5b));
    std::printf("k,lambda,residual\n");
    for (std::size_t k = 0; k < eig.values.size(); ++k)
        std::printf("%zu,%.17g,%.17g\n", k, eig.values[k], eig.residuals[k]);
    return 0;
}

int run_laplace(const Opts& o) {
    const Model m = build_model(o);
    ExperimentConfig cfg = build_experiment(o, m);
    const std::vector<LaplaceCell> cells = estimate_laplace(cfg);
    std::vector<std::vector<double>> rows;
    bool flagged = false;
    for (const LaplaceCell& c : cells) {
        rows.push_back({static_cast<double>(c.M), c.t, c.mean, c.stderr_,
                        c.flagged ? 1.0 : 0.0});
        flagged = flagged || c.flagged;
    }
    write_csv(cfg.out + "_laplace.csv", {"M", "t", "L_hat", "stderr", "flagged"}, rows);
    std::printf("torus-proxy heat trace per volume (upper object)\n");
    std::printf("M,t,L_hat,stderr,flagged\n");
    for (const std::vector<double>& r : rows)
        std::printf("%.17g,%.17g,%.17g,%.17g,%g\n", r[0], r[1], r[2], r[3], r[4]);
    return flagged ? 3 : 0;
}

int run_ids(const Opts& o) {
    const Model m = build_model(o);
    ExperimentConfig cfg = build_experiment(o, m);
    const std::vector<IdsCell> cells = estimate_ids(cfg);
    std::vector<std::vector<double>> rows;
    bool flagged = false;
    for (const IdsCell& c : cells) {
        rows.push_back({static_cast<double>(c.M), c.lambda, c.mean, c.stderr_,
                        c.flagged ? 1.0 : 0.0});
        flagged = flagged || c.flagged;
    }
    write_csv(cfg.out + "_ids.csv", {"M", "lambda", "l_hat", "stderr", "flagged"}, rows);
    std::printf("torus-proxy integrated counting per volume\n");
    std::printf("M,lambda,l_hat,stderr,flagged\n");
    for (const std::vector<double>& r : rows)
        std::printf("%.17g,%.17g,%.17g,%.17g,%g\n", r[0], r[1], r[2], r[3], r[4]);
    return flagged ? 3 : 0;
}

int run_tauber(const Opts& o) {
    const Model m = build_model(o);
    const RateBundle bundle =
        make_rate_bundle(o.d, m.phi.alpha, m.D0, checked_law(o.law, false));
    const SyntheticDensity rho{o.coeff, o.power};
    const TauberReport rep =
        verify_tauberian_numeric(bundle, rho, parse_grid(o.t_grid, "t_grid"),
                                 parse_grid(o.x_grid, "x_grid"));
    std::printf("t,logL,ratio\n");
    for (const TauberRow& r : rep.rows)
        std::printf("%.17g,%.17g,%.17g\n", r.t, r.logL, r.ratio);
    std::printf("A_measured: %.17g\n", rep.A_measured);
    std::printf("x,B1,B2,lower_const,lower_value,upper_value,upper_const,ok\n");
    for (const SandwichRow& r : rep.sandwich)
        std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.x, r.B1, r.B2,
                    r.lower_const, r.lower_value, r.upper_value, r.upper_const,
                    r.ok ? 1 : 0);
    std::printf("sandwich_ok: %d\n", rep.sandwich_ok ? 1 : 0);
    return rep.sandwich_ok ? 0 : 3;
}

int run_study(const Opts& o) {
    const Model m = build_model(o);
    ExperimentConfig cfg = build_experiment(o, m);
    const RateBundle bundle =
        make_rate_bundle(o.d, m.phi.alpha, m.D0, checked_law(o.law, false));
    const auto start = std::chrono::steady_clock::now();
    const StudyReport rep = scaling_study(cfg, bundle);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_study_outputs(cfg, bundle, rep, wall);
    bool flagged = false;
    for (const StudyTimeRow& r : rep.time_rows) flagged = flagged || r.flagged;
    for (const StudyIdsRow& r : rep.ids_rows) flagged = flagged || r.flagged;
    std::printf("rows: %zu time, %zu lambda (ids at M=%lld)\n", rep.time_rows.size(),
                rep.ids_rows.size(), static_cast<long long>(rep.ids_M));
    std::printf("ratio_band: [%.17g,%.17g]\n", rep.ratio_band_lo, rep.ratio_band_hi);
    std::printf("ratio_slope: %.17g\n", rep.ratio_slope);
    if (rep.ids_fit_ok)
        std::printf("ids_slope: %.17g (stderr %.17g)\n", rep.ids_slope,
                    rep.ids_slope_stderr);
    std::printf("outputs: %s_laplace.csv %s_ids.csv %s.meta.txt\n", cfg.out.c_str(),
                cfg.out.c_str(), cfg.out.c_str());
    return flagged ? 3 : 0;
}

int run_verify(const Opts& o) {
    const Model m = build_model(o);
    std::printf("phi: %s\n", format_spec(m.phi).c_str());
    std::printf("window: alpha=%.17g c1=%.17g c2=%.17g lambda0=%.17g\n", m.phi.alpha,
                m.phi.c1, m.phi.c2, m.phi.lambda0);
    const double top = std::isfinite(m.phi.lambda0) ? 0.999 * m.phi.lambda0 : 1e6;
    std::vector<double> probe;
    for (int i = 0; i <= 40; ++i)
        probe.push_back(top * std::pow(10.0, -8.0 + 8.0 * i / 40.0));
    const WindowCheck wc = scaling_window_check(m.phi, probe);
    std::printf("window_check: ok=%d min_ratio=%.17g max_ratio=%.17g\n", wc.ok ? 1 : 0,
                wc.min_ratio, wc.max_ratio);
    std::printf("site: %s\n", format_site(m.site).c_str());
    std::printf("norm1: %.17g\nnorm2sq: %.17g\nM0: %lld\n", m.site.norm1, m.site.norm2sq,
                static_cast<long long>(m.site.M0));
    std::printf("D0: %.17g\n", m.D0);
    const LatticeLaw law = checked_law(o.law, false);
    const RateBundle bundle = make_rate_bundle(o.d, m.phi.alpha, m.D0, law);
    std::printf("bundle: %s\n", format_bundle(bundle).c_str());
    std::printf("x0: %.17g\nt0: %.17g\n", bundle.x0, bundle.t0);
    std::printf("M,threshold,temple_delta_bound\n");
    for (std::int64_t M : parse_M_list(o.Ms))
        std::printf("%lld,%.17g,%.17g\n", static_cast<long long>(M),
                    m.D0 * std::pow(static_cast<double>(M), -m.phi.alpha),
                    temple_delta_bound(o.delta, m.D0, M, m.phi.alpha, m.site, m.phi.c1));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Opts o;
    try {
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") apply_config(o, load_config_file(argv[i + 1]));
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }

    CLI::App app{"Torus spectral laboratory for nonlocal alloy-type random operators"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value defaults file (flags override)");

    const auto add_model = [&](CLI::App* sub) {
        sub->add_option("--phi", o.phi, "kinetic symbol, e.g. drift(b=1), stable(alpha=1)");
        sub->add_option("--site", o.site, "single-site profile, e.g. box(h=0.5)");
        sub->add_option("--law", o.law, "coupling law, e.g. atom(p0=0.37,slope=0.3)");
        sub->add_option("--d", o.d, "dimension (1..3)");
        sub->add_option("--D0", o.D0, "override the derived coupling threshold scale");
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output path stem");
        sub->add_option("--threads", o.threads, "worker count (0: LIFSHITZ_THREADS or hardware)");
    };
    const auto add_ensemble = [&](CLI::App* sub) {
        sub->add_option("--potential-law", o.potential_law,
                        "law for the sampled potential when it differs from --law");
        sub->add_option("--Ms", o.Ms, "torus sizes, e.g. [4,8,16]");
        sub->add_option("--n", o.n, "grid oversampling per unit length");
        sub->add_option("--K", o.K, "eigencount (auto-escalates on tail failure)");
        sub->add_option("--samples", o.samples, "ensemble size");
        sub->add_option("--eig-tol", o.eig_tol, "eigenpair certification tolerance");
        sub->add_option("--trace-tol", o.trace_tol, "relative heat-trace tail tolerance");
        sub->add_flag("--allow-degenerate", o.allow_degenerate,
                      "accept the q = 0 control law for the potential");
    };

    CLI::App* rates = app.add_subcommand("rates", "rate-function bundle tables");
    add_model(rates);
    rates->add_option("--t-grid", o.t_grid, "[..] or logspace(lo=,hi=,count=)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "certified eigenvalues, one sample");
    add_model(spectrum);
    add_ensemble(spectrum);
    spectrum->add_option("--M", o.M, "torus size");
    spectrum->add_option("--save-config", o.save_config, "write the sampled couplings here");

    CLI::App* laplace = app.add_subcommand("laplace", "ensemble heat-trace table");
    add_model(laplace);
    add_ensemble(laplace);
    laplace->add_option("--t-grid", o.t_grid, "[..] or logspace(lo=,hi=,count=)");

    CLI::App* ids = app.add_subcommand("ids", "ensemble eigenvalue-counting table");
    add_model(ids);
    add_ensemble(ids);
    ids->add_option("--lambda-grid", o.lambda_grid, "[..] or logspace(lo=,hi=,count=)");

    CLI::App* tauber = app.add_subcommand("tauber", "numeric transfer-of-decay report");
    add_model(tauber);
    tauber->add_option("--t-grid", o.t_grid, "[..] or logspace(lo=,hi=,count=)");
    tauber->add_option("--x-grid", o.x_grid, "small-x probe grid");
    tauber->add_option("--coeff", o.coeff, "synthetic density: log rho = -coeff x^-power");
    tauber->add_option("--power", o.power, "synthetic density exponent");

    CLI::App* study = app.add_subcommand("study", "scaling study with M matched to t");
    add_model(study);
    add_ensemble(study);
    study->add_option("--t-grid", o.t_grid, "[..] or logspace(lo=,hi=,count=)");
    study->add_option("--lambda-grid", o.lambda_grid, "counting grid at the finest M");

    CLI::App* verify = app.add_subcommand("verify", "structural constants and windows");
    add_model(verify);
    verify->add_option("--Ms", o.Ms, "torus sizes for threshold rows");
    verify->add_option("--delta", o.delta, "occupation fraction for the uniform bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(rates)) return run_rates(o);
        if (app.got_subcommand(spectrum)) return run_spectrum(o);
        if (app.got_subcommand(laplace)) return run_laplace(o);
        if (app.got_subcommand(ids)) return run_ids(o);
        if (app.got_subcommand(tauber)) return run_tauber(o);
        if (app.got_subcommand(study)) return run_study(o);
        if (app.got_subcommand(verify)) return run_verify(o);
        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 2;
    }
}
