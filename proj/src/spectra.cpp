#include "magwell/spectra.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace magwell {

ClusterReport cluster_check(const EigenResult& supercell, const EigenResult& wells, double h,
                            double eps1, double b0) {
    ClusterReport rep;
    rep.h = h;
    rep.window = {0.0, h * (b0 + eps1)};
    for (double lam : supercell.eigenvalues)
        if (lam >= rep.window.lo && lam <= rep.window.hi) rep.supercell.push_back(lam);
    rep.dirichlet = wells.eigenvalues;
    if (rep.supercell.empty())
        throw WindowEmptyError("cluster_check: no supercell eigenvalues in [0, " +
                               std::to_string(rep.window.hi) + "]");
    if (rep.dirichlet.empty())
        throw WindowEmptyError("cluster_check: Dirichlet well spectrum is empty near the window");
    for (double lam : rep.supercell) {
        double d = std::numeric_limits<double>::infinity();
        for (double mu : rep.dirichlet) d = std::min(d, std::abs(lam - mu));
        rep.distances.push_back(d);
        rep.delta = std::max(rep.delta, d);
    }
    rep.solver_floor = 10.0 * std::max(supercell.max_residual(), wells.max_residual());
    rep.below_solver_floor = rep.delta < rep.solver_floor;
    return rep;
}

GapCensus gap_census(const EigenResult& eig, double h, Interval window, double M,
                     int inertia_count_in_window) {
    GapCensus g;
    g.h = h;
    g.window = window;
    g.M = M;
    g.guard = 10.0 * eig.max_residual();
    for (double lam : eig.eigenvalues)
        if (lam >= window.lo && lam < window.hi) g.eigenvalues.push_back(lam);
    if (static_cast<int>(g.eigenvalues.size()) != inertia_count_in_window) {
        std::ostringstream msg;
        msg << "gap_census: enumerated " << g.eigenvalues.size() << " eigenvalues in ["
            << window.lo << ", " << window.hi << ") but inertia counts "
            << inertia_count_in_window;
        throw NumericalError(msg.str());
    }
    if (g.eigenvalues.empty()) {
        g.gaps.push_back(window);
        g.count_ge_hM = window.width() >= std::pow(h, M) ? 1 : 0;
        return g;
    }
    double hM = std::pow(h, M);
    for (std::size_t i = 0; i + 1 < g.eigenvalues.size(); ++i) {
        double a = g.eigenvalues[i], b = g.eigenvalues[i + 1];
        if (b - a <= g.guard) continue; // not resolvable as a gap at this tolerance
        g.gaps.push_back({a, b});
        if (b - a >= hM) ++g.count_ge_hM;
    }
    return g;
}

SpacingReport spacing_bound_check(const EigenResult& wells, double h, double alpha, double beta) {
    SpacingReport r;
    r.h = h;
    r.alpha = alpha;
    r.beta = beta;
    std::vector<double> in;
    for (double lam : wells.eigenvalues)
        if (lam >= h * alpha && lam <= h * beta) in.push_back(lam);
    r.count = static_cast<int>(in.size());
    if (r.count < 2)
        throw WindowEmptyError("spacing_bound_check: fewer than 2 eigenvalues in [" +
                               std::to_string(h * alpha) + ", " + std::to_string(h * beta) + "]");
    for (std::size_t i = 0; i + 1 < in.size(); ++i)
        r.max_spacing = std::max(r.max_spacing, in[i + 1] - in[i]);
    r.edge_lo = in.front() - h * alpha;
    r.edge_hi = h * beta - in.back();
    return r;
}

WeylReport weyl_count_check(const std::vector<std::pair<double, int>>& counts, int n) {
    if (counts.empty()) throw ValidationError("weyl_count_check: no counts");
    WeylReport r;
    for (auto& [h, N] : counts) {
        double s = N * std::pow(h, n);
        r.scaled.push_back(s);
        r.sup_scaled = std::max(r.sup_scaled, s);
    }
    if (counts.size() >= 2) {
        double a = r.scaled[r.scaled.size() - 1];
        double b = r.scaled[r.scaled.size() - 2];
        if (a > 0 && b > 0) r.finest_ratio = std::max(a / b, b / a);
    }
    return r;
}

AwayReport away_region_check(const FieldModel& model, const GaugeField& gauge, const Grid& grid,
                             double h, double eta, double eps1, double b0, double tol,
                             std::uint64_t seed) {
    AwayReport r;
    r.h = h;
    r.eta = eta;
    r.level = b0 + eps1 + eta;
    r.window_top = h * (b0 + eps1);
    DomainMask away = mask_away(grid, model, b0, eps1, eta);
    if (away.count() == 0) throw ValidationError("away_region_check: empty away mask");
    MagneticOperator op = assemble(model, gauge, grid, away, h);
    r.b0_region = op.field_min;
    EigenResult eig = lowest_eigenpairs(op, 1, tol, {}, seed);
    r.lambda_min = eig.eigenvalues.front();
    r.deficit = (h * r.b0_region - r.lambda_min) / std::pow(h, 1.25);
    r.window_clear = r.lambda_min > r.window_top;
    return r;
}

double conjugated_resolvent_norm(const MagneticOperator& op, const WeightFunction& w,
                                 const AgmonField& dist, Complex z) {
    require_weight_class(w, dist);
    const long N = op.dim();
    if (static_cast<long>(w.phi.size()) != N)
        throw ValidationError("conjugated_resolvent_norm: weight size mismatch");
    double margin = op.h * op.field_min - z.real();
    if (!(margin > 0))
        throw ValidationError("conjugated_resolvent_norm: Re z must stay below h * min(Tr+B)");

    SparseHermitian I(N, N);
    I.setIdentity();
    SparseHermitian A = op.matrix - z * I;
    A.makeCompressed();
    Eigen::SparseLU<SparseHermitian> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw NumericalError("conjugated_resolvent_norm: factorization near-singular at z");
    Eigen::SparseLU<SparseHermitian> lu_adj;
    bool z_real = z.imag() == 0.0;
    if (!z_real) {
        SparseHermitian B = op.matrix - std::conj(z) * I;
        B.makeCompressed();
        lu_adj.compute(B);
        if (lu_adj.info() != Eigen::Success)
            throw NumericalError("conjugated_resolvent_norm: adjoint factorization failed");
    }

    const double sqrt_h = std::sqrt(op.h);
    Eigen::VectorXd ep(N), em(N);
    for (long i = 0; i < N; ++i) {
        ep(i) = std::exp(w.phi[i] / sqrt_h);
        em(i) = 1.0 / ep(i);
    }
    auto apply_K = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        Eigen::VectorXcd t = em.cast<Complex>().cwiseProduct(v);
        Eigen::VectorXcd s = lu.solve(t);
        return ep.cast<Complex>().cwiseProduct(s);
    };
    auto apply_K_adj = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        Eigen::VectorXcd t = ep.cast<Complex>().cwiseProduct(v);
        Eigen::VectorXcd s = z_real ? lu.solve(t) : lu_adj.solve(t);
        return em.cast<Complex>().cwiseProduct(s);
    };

    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(N);
    for (long i = 0; i < N; ++i) {
        double re = g(rng);
        double im = g(rng);
        v(i) = Complex(re, im);
    }
    v /= v.norm();
    double est = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXcd u = apply_K(v);
        Eigen::VectorXcd s = apply_K_adj(u);
        double nn = s.norm();
        if (nn == 0.0) return 0.0;
        double next = std::sqrt(nn); // ||K||^2 estimate is ||K* K v||
        s /= nn;
        bool settled = it > 2 && std::abs(next - est) <= 2.5e-3 * next;
        est = next;
        v = s;
        if (settled) break;
    }
    return est;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double exp_fit_slope(const std::vector<double>& h, const std::vector<double>& y) {
    if (h.size() != y.size() || h.size() < 2) throw ValidationError("exp_fit_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double lx = 1.0 / std::sqrt(h[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(h.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace magwell
