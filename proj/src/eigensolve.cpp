#include "magwell/eigensolve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace magwell {

namespace {

using Factor = Eigen::SimplicialLDLT<SparseHermitian, Eigen::Lower>;

double norm1_of(const SparseHermitian& H) {
    double best = 0.0;
    for (int k = 0; k < H.outerSize(); ++k) {
        double col = 0.0;
        for (SparseHermitian::InnerIterator it(H, k); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

SparseHermitian shifted(const SparseHermitian& H, double s) {
    SparseHermitian I(H.rows(), H.cols());
    I.setIdentity();
    SparseHermitian out = H - s * I;
    out.makeCompressed();
    return out;
}

// factorization quality: all pivots finite and away from zero
bool pivots_ok(const Factor& f, double* min_abs = nullptr) {
    auto d = f.vectorD();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        double v = std::abs(d(i).real());
        if (!std::isfinite(v)) return false;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (min_abs) *min_abs = lo;
    return hi > 0 && lo > 1e-13 * hi;
}

int negative_pivots(const Factor& f) {
    auto d = f.vectorD();
    int n = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) n += d(i).real() < 0.0;
    return n;
}

Eigen::VectorXcd random_start(std::mt19937_64& rng, long n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (long i = 0; i < n; ++i) {
        double re = g(rng);
        double im = g(rng);
        v(i) = Complex(re, im);
    }
    return v;
}

void orthogonalize_against(Eigen::VectorXcd& w, const Eigen::MatrixXcd& X, long cols) {
    if (cols == 0) return;
    auto Xv = X.leftCols(cols);
    w.noalias() -= Xv * (Xv.adjoint() * w);
    w.noalias() -= Xv * (Xv.adjoint() * w);
}

} // namespace

double EigenResult::max_residual() const {
    double r = 0.0;
    for (double x : residuals) r = std::max(r, x);
    return r;
}

int eigen_count_below(const SparseHermitian& H, double threshold) {
    Factor f;
    f.compute(shifted(H, threshold));
    double min_piv = 0.0;
    if (f.info() != Eigen::Success || !pivots_ok(f, &min_piv)) {
        std::ostringstream msg;
        msg << "eigen_count_below: threshold " << threshold
            << " coincides with an eigenvalue within working precision; "
            << "retry with a perturbed threshold";
        throw NumericalError(msg.str());
    }
    return negative_pivots(f);
}

int eigen_count_below(const MagneticOperator& op, double threshold) {
    if (threshold < 0) throw ValidationError("eigen_count_below: threshold must be >= 0");
    return eigen_count_below(op.matrix, threshold);
}

EigenResult lowest_eigenpairs(const SparseHermitian& H, int count, const LanczosOptions& opts) {
    const long n = H.rows();
    if (count < 1) throw ValidationError("lowest_eigenpairs: count must be >= 1");
    if (count > n) throw ValidationError("lowest_eigenpairs: count exceeds matrix dimension");
    if (!opts.shift) throw ValidationError("lowest_eigenpairs: shift required");

    const double norm1 = norm1_of(H);
    const double abs_tol = opts.tol * std::max(norm1, 1e-300);

    double sigma = *opts.shift;
    Factor factor;
    {
        int attempt = 0;
        for (;; ++attempt) {
            factor.compute(shifted(H, sigma));
            if (factor.info() == Eigen::Success && pivots_ok(factor)) break;
            if (attempt >= 3)
                throw NumericalError("lowest_eigenpairs: factorization breakdown near shift " +
                                     std::to_string(sigma) + " after 3 retries");
            sigma = sigma * (1.0 + 1e-3) + (attempt + 1) * 1e-10 * std::max(norm1, 1.0);
        }
    }

    EigenResult out;
    out.meta.shift = sigma;
    out.meta.tol = abs_tol;
    out.meta.dim = n;
    out.meta.seed = opts.seed;

    std::mt19937_64 rng(opts.seed);
    Eigen::MatrixXcd X(n, count + 8); // converged vectors
    std::vector<double> lam, res;
    long nconv = 0;

    int target = count;          // may grow to the inertia-certified count
    bool certified = false;
    int budget = opts.basis_budget;

    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        if (nconv >= target) {
            // certify completeness: the spectrum below the top accepted value
            // must all be present (multiple eigenvalues arrive one copy per
            // restart)
            std::vector<std::size_t> order(lam.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return lam[a] < lam[b]; });
            double top = lam[order[std::min<std::size_t>(count, lam.size()) - 1]];
            double guard = 1e-11 * std::max(norm1, 1.0);
            int true_below = -1;
            double probe = top + guard;
            for (int k = 0; k < 6 && true_below < 0; ++k) {
                try {
                    true_below = eigen_count_below(H, probe);
                } catch (const NumericalError&) {
                    probe += guard;
                }
            }
            if (true_below < 0)
                throw NumericalError("lowest_eigenpairs: could not certify enumeration");
            if (true_below <= static_cast<int>(nconv)) {
                certified = true;
                break;
            }
            target = true_below; // copies missing below the current top; keep going
        }

        out.meta.restarts = restart + 1;
        int need = target - static_cast<int>(nconv);
        int m = budget > 0 ? budget
                           : static_cast<int>(std::min<long>(n - nconv,
                                 std::max(48, 2 * need + 32)));
        if (m < 1) break;

        Eigen::VectorXcd v = random_start(rng, n);
        orthogonalize_against(v, X, nconv);
        double vn = v.norm();
        if (vn < 1e-8) continue;
        v /= vn;

        Eigen::MatrixXcd V(n, m + 1);
        V.col(0) = v;
        std::vector<double> alpha, beta;
        int built = 0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXcd w = factor.solve(V.col(j));
            ++out.meta.iterations;
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            double a = (V.col(j).adjoint() * w).value().real();
            w -= a * V.col(j);
            orthogonalize_against(w, X, nconv);
            // second full reorthogonalization against the Krylov basis
            auto Vj = V.leftCols(j + 1);
            w.noalias() -= Vj * (Vj.adjoint() * w);
            w.noalias() -= Vj * (Vj.adjoint() * w);
            double b = w.norm();
            alpha.push_back(a);
            built = j + 1;
            if (b < 1e-13 * std::max(1.0, std::abs(a))) break; // invariant subspace exhausted
            beta.push_back(b);
            V.col(j + 1) = w / b;
        }

        // Ritz extraction from the tridiagonal
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
        for (int i = 0; i < built; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < built) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

        struct Candidate {
            double lambda;
            int idx;
        };
        std::vector<Candidate> cands;
        double theta_max = 0.0;
        for (int i = 0; i < built; ++i) theta_max = std::max(theta_max, std::abs(es.eigenvalues()(i)));
        for (int i = 0; i < built; ++i) {
            double theta = es.eigenvalues()(i);
            if (std::abs(theta) < 1e-14 * std::max(theta_max, 1.0)) continue;
            cands.push_back({sigma + 1.0 / theta, i});
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });

        // accept a monotone prefix of converged candidates so nothing below
        // an accepted value can be skipped
        int accepted = 0;
        for (const Candidate& c : cands) {
            if (static_cast<int>(nconv) >= target + 4) break;
            Eigen::VectorXcd y = V.leftCols(built) * es.eigenvectors().col(c.idx);
            orthogonalize_against(y, X, nconv);
            double yn = y.norm();
            if (yn < 1e-6) continue; // already represented by a converged vector
            y /= yn;
            Eigen::VectorXcd Hy = H * y;
            double rayleigh = (y.adjoint() * Hy).value().real();
            double r = (Hy - rayleigh * y).norm();
            if (r > abs_tol) break; // stop at the first unconverged candidate
            if (nconv >= static_cast<long>(X.cols())) {
                Eigen::MatrixXcd bigger(n, X.cols() * 2);
                bigger.leftCols(X.cols()) = X;
                X = std::move(bigger);
            }
            X.col(nconv) = y;
            lam.push_back(rayleigh);
            res.push_back(r);
            ++nconv;
            ++accepted;
        }
        if (accepted == 0) {
            // enlarge the Krylov budget while restarts stall
            budget = static_cast<int>(std::min<long>(n, 2L * m));
        } else {
            budget = opts.basis_budget;
        }
    }

    if (!certified && nconv < count)
        throw NumericalError("lowest_eigenpairs: non-convergence within the restart cap (" +
                             std::to_string(nconv) + "/" + std::to_string(count) + " pairs)");
    if (!certified) {
        // loop ended exactly at the cap with enough pairs but no certificate
        throw NumericalError("lowest_eigenpairs: enumeration certificate unavailable");
    }

    std::vector<std::size_t> order(lam.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lam[a] < lam[b]; });

    out.eigenvalues.resize(count);
    out.residuals.resize(count);
    out.vectors.resize(n, count);
    for (int i = 0; i < count; ++i) {
        out.eigenvalues[i] = lam[order[i]];
        out.residuals[i] = res[order[i]];
        out.vectors.col(i) = X.col(order[i]);
    }

    // result invariants: unit norms, mutual orthogonality
    for (int i = 0; i < count; ++i) {
        if (std::abs(out.vectors.col(i).norm() - 1.0) > 1e-12)
            throw NumericalError("lowest_eigenpairs: eigenvector norm drift");
        for (int j = 0; j < i; ++j)
            if (std::abs((out.vectors.col(i).adjoint() * out.vectors.col(j)).value()) > 1e-8)
                throw NumericalError("lowest_eigenpairs: eigenvector orthogonality drift");
    }
    return out;
}

EigenResult lowest_eigenpairs(const MagneticOperator& op, int count, double tol,
                              std::optional<double> shift, std::uint64_t seed) {
    LanczosOptions opts;
    opts.tol = tol;
    opts.seed = seed;
    opts.shift = shift ? *shift : 0.5 * op.h * op.field_min;
    return lowest_eigenpairs(op.matrix, count, opts);
}

EigenResult enumerate_below(const MagneticOperator& op, double hi, double tol,
                            std::optional<double> shift, std::uint64_t seed) {
    int target = 0;
    double probe = hi;
    for (int attempt = 0;; ++attempt) {
        try {
            target = eigen_count_below(op.matrix, probe);
            break;
        } catch (const NumericalError&) {
            if (attempt >= 5) throw;
            probe += 1e-10 * std::max(1.0, std::abs(hi));
        }
    }
    if (target == 0) {
        EigenResult empty;
        empty.meta.dim = op.dim();
        empty.meta.tol = tol * op.norm1();
        return empty;
    }
    EigenResult r = lowest_eigenpairs(op, target, tol, shift, seed);
    if (!r.eigenvalues.empty() && r.eigenvalues.back() >= probe)
        throw NumericalError("enumerate_below: inertia count mismatch (window not fully resolved)");
    return r;
}

std::vector<double> dense_eigenvalues(const SparseHermitian& H) {
    if (H.rows() > 6000)
        throw ValidationError("dense_eigenvalues: matrix too large for the dense oracle");
    Eigen::MatrixXcd D(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
    return out;
}

} // namespace magwell
