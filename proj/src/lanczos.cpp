#include "lifshitz/lanczos.hpp"

#include "lifshitz/errors.hpp"
#include "lifshitz/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace lifshitz {

namespace {

constexpr int kBlock = 2;

void apply_to_column(const SchrodingerOperator& op, const Eigen::MatrixXd& src, int col,
                     Eigen::MatrixXd& dst, int dcol, std::vector<double>& in,
                     std::vector<double>& out, int& matvecs) {
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) in[i] = src(static_cast<Eigen::Index>(i), col);
    apply_H(op, in, out);
    for (std::size_t i = 0; i < n; ++i) dst(static_cast<Eigen::Index>(i), dcol) = out[i];
    ++matvecs;
}

void fill_random_column(Eigen::MatrixXd& m, int col, std::uint64_t seed, std::uint64_t& counter) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        m(i, col) = u01(counter_hash(seed, counter++)) - 0.5;
}

// Orthonormalize column `col` of Q against V[:,0:m), earlier Q columns, and
// itself.  Returns false when the column is numerically dependent.
bool orthonormalize_column(const Eigen::MatrixXd& V, int m, Eigen::MatrixXd& Q, int col) {
    double norm0 = Q.col(col).norm();
    if (norm0 == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
        if (m > 0) Q.col(col) -= V.leftCols(m) * (V.leftCols(m).transpose() * Q.col(col));
        for (int j = 0; j < col; ++j) Q.col(col) -= Q.col(j) * Q.col(j).dot(Q.col(col));
    }
    double norm1 = Q.col(col).norm();
    if (!(norm1 > 1e-10 * norm0)) return false;
    Q.col(col) /= norm1;
    return true;
}

} // namespace

EigenResult lowest_eigenpairs(const SchrodingerOperator& op, int K, double tol,
                              std::uint64_t seed, const EigenOptions& opts) {
    const std::size_t n_sz = op.kinetic.grid.total();
    const int n = static_cast<int>(n_sz);
    if (K < 1) throw UsageError("lowest_eigenpairs: K must be positive");
    if (K > n) throw UsageError("lowest_eigenpairs: K exceeds the number of degrees of freedom");
    if (!(tol > 0.0)) throw UsageError("lowest_eigenpairs: tol must be positive");

    const int p = std::min(kBlock, n);
    const int mcap = std::min(n, std::max(4 * K + 2 * p + 32, 96));
    const int keep = std::min(K + std::min(K, 20) + p, mcap - p);

    Eigen::MatrixXd V(n, mcap);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mcap, mcap);
    Eigen::MatrixXd W(n, p), Q(n, p), R(p, p);
    std::vector<double> buf_in(n_sz), buf_out(n_sz);
    std::uint64_t draw = 0;
    int matvecs = 0;

    for (int c = 0; c < p; ++c) {
        bool ok = false;
        for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
            fill_random_column(V, c, seed, draw);
            ok = orthonormalize_column(V, c, V, c);
        }
        if (!ok) throw NumericError("eigensolver: could not seed an orthonormal start block");
    }
    int m = p;

    double last_certified_gate = std::numeric_limits<double>::infinity();

    auto budget_error = [&](double worst) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "eigensolver: matvec budget %d exhausted (worst residual estimate %.3e, tol %.3e)",
                      opts.max_matvec, worst, tol);
        return NumericError(msg);
    };

    while (true) {
        // Expand: apply H to the trailing block and complete the projection T.
        for (int c = 0; c < p; ++c) {
            if (matvecs >= opts.max_matvec) throw budget_error(std::numeric_limits<double>::quiet_NaN());
            apply_to_column(op, V, m - p + c, W, c, buf_in, buf_out, matvecs);
        }
        Eigen::MatrixXd H = V.leftCols(m).transpose() * W;
        W -= V.leftCols(m) * H;
        Eigen::MatrixXd H2 = V.leftCols(m).transpose() * W;
        W -= V.leftCols(m) * H2;
        H += H2;
        T.block(0, m - p, m, p) = H;
        T.block(m - p, 0, p, m) = H.transpose();

        // QR of the residual block.  Rank-deficient columns are replaced by
        // fresh random directions so the expansion never stalls; once the
        // basis spans the whole space no replacement exists and the exact
        // Ritz pairs below must settle it.
        const bool basis_full = (m >= n);
        bool exhausted = false;
        R.setZero();
        for (int c = 0; c < p; ++c) {
            double nrm = W.col(c).norm();
            for (int j = 0; j < c; ++j) {
                double proj = Q.col(j).dot(W.col(c));
                R(j, c) = proj;
                W.col(c) -= proj * Q.col(j);
            }
            double nrm2 = W.col(c).norm();
            Q.col(c) = W.col(c);
            if (nrm2 > 1e-12 * std::max(nrm, 1.0) && orthonormalize_column(V, m, Q, c)) {
                R(c, c) = Q.col(c).dot(W.col(c));
            } else if (basis_full) {
                exhausted = true;
            } else {
                bool ok = false;
                for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
                    fill_random_column(Q, c, seed, draw);
                    ok = orthonormalize_column(V, m, Q, c);
                }
                if (!ok) exhausted = true;
            }
        }

        // Rayleigh-Ritz on the completed m x m projection.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
        const Eigen::VectorXd& ritz_vals = es.eigenvalues();
        const Eigen::MatrixXd& ritz_vecs = es.eigenvectors();

        if (m >= K) {
            Eigen::MatrixXd coupling = R * ritz_vecs.bottomRows(p);
            double worst_est = 0.0;
            for (int i = 0; i < K; ++i)
                worst_est = std::max(worst_est, coupling.col(i).norm() /
                                                    std::max(std::abs(ritz_vals[i]), 1.0));
            if (worst_est <= 0.5 * tol &&
                worst_est < 0.25 * last_certified_gate + 1e-300) {
                last_certified_gate = worst_est;
                Eigen::MatrixXd X = V.leftCols(m) * ritz_vecs.leftCols(K);
                Eigen::VectorXd resid(K);
                Eigen::MatrixXd HX(n, 1);
                bool all_ok = true;
                for (int i = 0; i < K; ++i) {
                    if (matvecs >= opts.max_matvec) throw budget_error(worst_est);
                    apply_to_column(op, X, i, HX, 0, buf_in, buf_out, matvecs);
                    resid[i] = (HX.col(0) - ritz_vals[i] * X.col(i)).norm();
                    if (!(resid[i] <= tol * std::max(std::abs(ritz_vals[i]), 1.0))) all_ok = false;
                }
                if (all_ok) {
                    EigenResult out;
                    out.matvecs = matvecs;
                    out.values.resize(K);
                    out.residuals.resize(K);
                    for (int i = 0; i < K; ++i) {
                        out.values[i] = ritz_vals[i];
                        out.residuals[i] = resid[i];
                    }
                    if (opts.want_vectors) {
                        out.vectors.assign(K, std::vector<double>(n_sz));
                        for (int i = 0; i < K; ++i)
                            for (std::size_t r = 0; r < n_sz; ++r)
                                out.vectors[i][r] = X(static_cast<Eigen::Index>(r), i);
                    }
                    return out;
                }
            }
        }

        if (exhausted)
            throw NumericError("eigensolver: tolerance unreachable even on the full space");
        if (matvecs >= opts.max_matvec) {
            double worst = std::numeric_limits<double>::quiet_NaN();
            if (m >= K) {
                Eigen::MatrixXd coupling = R * ritz_vecs.bottomRows(p);
                worst = 0.0;
                for (int i = 0; i < K; ++i)
                    worst = std::max(worst, coupling.col(i).norm() /
                                                std::max(std::abs(ritz_vals[i]), 1.0));
            }
            throw budget_error(worst);
        }

        if (m + p <= mcap) {
            V.middleCols(m, p) = Q;
            m += p;
        } else {
            // Thick restart: compress onto the lowest `keep` Ritz vectors and
            // re-append the residual block with its arrow coupling.
            Eigen::MatrixXd Y = V.leftCols(m) * ritz_vecs.leftCols(keep);
            Eigen::MatrixXd C = R * ritz_vecs.bottomRows(p).leftCols(keep);
            V.leftCols(keep) = Y;
            V.middleCols(keep, p) = Q;
            T.setZero();
            for (int i = 0; i < keep; ++i) T(i, i) = ritz_vals[i];
            T.block(keep, 0, p, keep) = C;
            T.block(0, keep, keep, p) = C.transpose();
            m = keep + p;
        }
    }
}

std::vector<double> lowest_eigenvalues(const SchrodingerOperator& op, int K, double tol,
                                       std::uint64_t seed) {
    return lowest_eigenpairs(op, K, tol, seed).values;
}

std::pair<double, std::vector<double>> ground_state(const SchrodingerOperator& op, double tol,
                                                    std::uint64_t seed) {
    EigenOptions opts;
    opts.want_vectors = true;
    EigenResult r = lowest_eigenpairs(op, 1, tol, seed, opts);
    return {r.values[0], std::move(r.vectors[0])};
}

std::pair<double, double> heat_trace(const SchrodingerOperator& op, double t, int K, double tol,
                                     std::uint64_t seed) {
    if (!(t > 0.0)) throw UsageError("heat_trace: t must be positive");
    const double n = static_cast<double>(op.kinetic.grid.total());
    std::vector<double> vals = lowest_eigenvalues(op, K, tol, seed);
    double lead = 0.0, comp = 0.0;
    for (double v : vals) {
        double term = std::exp(-t * v), y = term - comp, s = lead + y;
        comp = (s - lead) - y;
        lead = s;
    }
    double rem = (n - static_cast<double>(K)) * std::exp(-t * vals.back());
    return {lead, rem};
}

} // namespace lifshitz
