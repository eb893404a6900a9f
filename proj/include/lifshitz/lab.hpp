#pragma once

#include "lifshitz/alloy.hpp"
#include "lifshitz/bernstein.hpp"
#include "lifshitz/rates.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lifshitz {

// One ensemble experiment: operator family, disorder, grids, and budget.
struct ExperimentConfig {
    BernsteinSpec phi;
    SingleSite site;
    LatticeLaw law;
    int d = 1;
    std::vector<std::int64_t> Ms = {4};
    std::int64_t n = 8;
    int K = 64; // eigencount; auto-escalates when trace tails fail to certify
    std::vector<double> t_grid;
    std::vector<double> lambda_grid;
    int samples = 1;
    std::uint64_t seed = 1;
    double eig_tol = 1e-8;
    double trace_tol = 1e-6;
    int threads = 0; // 0: LIFSHITZ_THREADS env, else hardware count
    std::string out = "run";
};

void validate_config(const ExperimentConfig& cfg);

// Ensemble mean of M^{-d} sum_k exp(-t lambda_k) with certified trace tails;
// cells whose tail cannot be certified at the K cap are flagged, not filled.
struct LaplaceCell {
    std::int64_t M = 0;
    double t = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    bool flagged = false;
};
std::vector<LaplaceCell> estimate_laplace(const ExperimentConfig& cfg);

// Ensemble mean of M^{-d} #{k : lambda_k <= lambda}; flagged where the
// lambda value reaches beyond the resolved part of the spectrum.
struct IdsCell {
    std::int64_t M = 0;
    double lambda = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    bool flagged = false;
};
std::vector<IdsCell> estimate_ids(const ExperimentConfig& cfg);

// floor(x_t) + 1 for the upper-bound experiment, floor(x_t) for the lower.
std::int64_t choose_M_of_t(const RateBundle& bundle, double t, bool upper);

// Least-squares slope of log|log l| against log lambda; returns (slope,
// standard error).  Points must satisfy lambda > 0 and l in (0,1).
std::pair<double, double> fit_lifshitz_exponent(
    const std::vector<std::pair<double, double>>& series);

// Synthetic spectral-bottom measure with log rho(x) = -coeff * x^{-power}.
struct SyntheticDensity {
    double coeff = 1.0;
    double power = 1.0;
};

// log integral_0^inf e^{-t x} rho(x) dx, evaluated by adaptive quadrature
// around the Laplace point entirely in the log domain.
double log_laplace_transform(const SyntheticDensity& rho, double t);

struct TauberRow {
    double t = 0.0;
    double logL = 0.0;
    double ratio = 0.0; // logL / rate_denominator(t)
};
struct SandwichRow {
    double x = 0.0;
    double B1 = 0.0, B2 = 0.0;
    double lower_const = 0.0, upper_const = 0.0;
    double lower_value = 0.0, upper_value = 0.0;
    bool ok = false;
};
struct TauberReport {
    std::vector<TauberRow> rows;
    double A_measured = 0.0;
    std::vector<SandwichRow> sandwich;
    bool sandwich_ok = false;
};
TauberReport verify_tauberian_numeric(const RateBundle& bundle, const SyntheticDensity& rho,
                                      const std::vector<double>& t_grid,
                                      const std::vector<double>& x_grid);

struct StudyTimeRow {
    double t = 0.0;
    std::int64_t M = 0;
    double Lhat = 0.0;
    double stderr_ = 0.0;
    double denom = 0.0;
    double ratio = 0.0; // log Lhat / denom
    bool flagged = false;
};
struct StudyIdsRow {
    double lambda = 0.0;
    double lhat = 0.0;
    double stderr_ = 0.0;
    double normalized = 0.0; // lambda^{d/alpha}/g(D0/lambda) * log lhat
    bool flagged = false;
};
struct StudyReport {
    std::vector<StudyTimeRow> time_rows;
    std::vector<StudyIdsRow> ids_rows; // at the finest M of the sweep
    std::int64_t ids_M = 0;
    double ratio_band_lo = 0.0; // min/max ratio over the upper half t-grid
    double ratio_band_hi = 0.0;
    double ratio_slope = 0.0; // drift of ratio against log t, upper half
    double ids_slope = 0.0;
    double ids_slope_stderr = 0.0;
    bool ids_fit_ok = false;
};

// Torus-proxy scaling experiment with M(t) = floor(x_t)+1 per t.
StudyReport scaling_study(const ExperimentConfig& cfg, const RateBundle& bundle);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// <out>_laplace.csv and <out>_ids.csv hold only deterministic values; the
// metadata document (config echo, seeds, fit summaries, wall time) goes to
// <out>.meta.txt.
void write_study_outputs(const ExperimentConfig& cfg, const RateBundle& bundle,
                         const StudyReport& report, double wall_seconds);

} // namespace lifshitz
