#pragma once

// Second-smallest eigenvalue of the symmetric normalized Laplacian
// N = I - D^{-1/2} A D^{-1/2} via Lanczos with full reorthogonalization.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tempocom/graph.hpp"

namespace tempocom {

struct EigResult {
    double lambda2 = 0.0;
    double residual = 0.0;  // ||N x - lambda2 x|| for the unit Ritz vector x
    std::size_t iterations = 0;

    /// lambda2 lowered by the residual; never above the true eigenvalue the
    /// Ritz value approximates.
    double lower() const noexcept { return std::max(0.0, lambda2 - residual); }
};

struct LanczosOptions {
    double tol = 1e-8;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
    std::size_t max_iterations = 0;  // 0 -> 10 n
};

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x.
inline std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
        q = diag[i] - x - (i == 0 ? 0.0 : b2 / q);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by bisection.
inline double tridiagonal_min_eigenvalue(std::span<const double> diag, std::span<const double> off) {
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < diag.size() ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(diag, off, mid) >= 1) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Unit eigenvector for eigenvalue `theta` of a symmetric tridiagonal matrix by
/// inverse iteration (LU with partial pivoting, as in LAPACK gttrf/gttrs).
inline std::vector<double> tridiagonal_eigenvector(std::span<const double> diag, std::span<const double> off,
                                                   double theta) {
    const std::size_t m = diag.size();
    std::vector<double> x(m, 1.0 / std::sqrt(static_cast<double>(m)));
    if (m == 1) return {1.0};

    double scale = 0.0;
    for (double a : diag) scale = std::max(scale, std::abs(a));
    for (double b : off) scale = std::max(scale, std::abs(b));
    const double tiny = std::max(scale, 1.0) * 1e-14;

    std::vector<double> dl(off.begin(), off.end()), d(m), du(off.begin(), off.end()), du2(m, 0.0);
    std::vector<char> swapped(m, 0);
    for (std::size_t i = 0; i < m; ++i) d[i] = diag[i] - theta;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - f * d[i + 1];
            if (i + 2 < m) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (d[m - 1] == 0.0) d[m - 1] = tiny;

    for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (!swapped[i]) {
                x[i + 1] -= dl[i] * x[i];
            } else {
                const double tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - dl[i] * x[i];
            }
        }
        x[m - 1] /= d[m - 1];
        x[m - 2] = (x[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
        for (std::size_t k = m - 2; k-- > 0;) {
            x[k] = (x[k] - du[k] * x[k + 1] - du2[k] * x[k + 2]) / d[k];
        }
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) break;
        for (double& v : x) v /= norm;
    }
    return x;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// y = N x with N = I - D^{-1/2} A D^{-1/2}; inv_sqrt holds D^{-1/2}.
inline void apply_normalized_laplacian(const AggregatedGraph& ag, std::span<const double> inv_sqrt,
                                       std::span<const double> x, std::span<double> y) {
    for (std::size_t u = 0; u < ag.node_count(); ++u) {
        double acc = 0.0;
        for (const auto& nb : ag.neighbors(static_cast<NodeId>(u))) acc += nb.w * inv_sqrt[nb.node] * x[nb.node];
        y[u] = x[u] - inv_sqrt[u] * acc;
    }
}

}  // namespace detail

/// lambda_2 of the normalized Laplacian of `ag`. Disconnected graphs (including
/// any node with zero volume) return exactly 0 without running the solver.
inline EigResult lambda2(const AggregatedGraph& ag, const LanczosOptions& opts = {}) {
    const std::size_t n = ag.node_count();
    if (n < 2) throw ArgumentError("lambda2 needs at least two nodes");
    if (component_count(ag) > 1) return {0.0, 0.0, 0};

    std::vector<double> inv_sqrt(n), q0(n);
    double norm0 = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        const double s = std::sqrt(ag.volume(static_cast<NodeId>(u)));
        inv_sqrt[u] = 1.0 / s;
        q0[u] = s;
        norm0 += s * s;
    }
    norm0 = std::sqrt(norm0);
    for (double& v : q0) v /= norm0;

    const std::size_t dim = n - 1;  // dimension of the complement of the null vector
    const std::size_t cap = opts.max_iterations ? opts.max_iterations : 10 * n;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = unif(rng);
    for (int pass = 0; pass < 2; ++pass) detail::axpy(-detail::dot(q0, v), q0, v);
    {
        const double nv = std::sqrt(detail::dot(v, v));
        for (double& x : v) x /= nv;
    }

    std::vector<std::vector<double>> basis;
    std::vector<double> alphas, betas;
    std::vector<double> w(n), ritz(n), resid(n);

    for (std::size_t j = 0; j < cap; ++j) {
        basis.push_back(v);
        detail::apply_normalized_laplacian(ag, inv_sqrt, basis.back(), w);
        const double alpha = detail::dot(basis.back(), w);
        alphas.push_back(alpha);
        detail::axpy(-alpha, basis.back(), w);
        if (j > 0) detail::axpy(-betas.back(), basis[j - 1], w);
        for (int pass = 0; pass < 2; ++pass) {
            detail::axpy(-detail::dot(q0, w), q0, w);
            for (const auto& b : basis) detail::axpy(-detail::dot(b, w), b, w);
        }
        const double beta = std::sqrt(detail::dot(w, w));

        const double theta = detail::tridiagonal_min_eigenvalue(alphas, betas);
        const auto s = detail::tridiagonal_eigenvector(alphas, betas, theta);
        const double estimate = beta * std::abs(s.back());
        const bool exhausted = basis.size() >= dim || beta <= 1e-12;

        if (estimate <= opts.tol || exhausted) {
            std::fill(ritz.begin(), ritz.end(), 0.0);
            for (std::size_t i = 0; i < basis.size(); ++i) detail::axpy(s[i], basis[i], ritz);
            const double nr = std::sqrt(detail::dot(ritz, ritz));
            for (double& x : ritz) x /= nr;
            detail::apply_normalized_laplacian(ag, inv_sqrt, ritz, resid);
            detail::axpy(-theta, ritz, resid);
            const double r = std::sqrt(detail::dot(resid, resid));
            if (r <= opts.tol || exhausted) {
                if (r > opts.tol) throw NumericalError("Lanczos residual above tolerance", j + 1);
                return {std::max(0.0, theta), r, j + 1};
            }
        }
        betas.push_back(beta);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / beta;
    }
    throw NumericalError("Lanczos did not converge", cap);
}

inline EigResult lambda2(const AggregatedGraph& ag, double tol) {
    LanczosOptions opts;
    opts.tol = tol;
    return lambda2(ag, opts);
}

/// eta * lambda2 / 2, a lower bound on the conductance of every node set in the interval.
inline double cheeger_lower_bound(const AggregatedGraph& ag, const NormalizationConfig& cfg,
                                  const LanczosOptions& opts = {}) {
    return eta(ag.interval(), cfg) * lambda2(ag, opts).lower() / 2.0;
}

}  // namespace tempocom
