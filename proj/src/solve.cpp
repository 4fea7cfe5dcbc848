#include "dd/solve.hpp"

#include <cmath>
#include <sstream>

#include "dd/error.hpp"
#include "dd/parallel.hpp"

namespace dd {

std::string SolveStats::summary() const {
    std::ostringstream os;
    os << (converged ? "converged" : "not converged") << " after " << iterations << " iterations, relative residual "
       << relative_residual;
    if (breakdown) os << " (breakdown p'Mp <= 0 at iteration " << breakdown_iteration << ")";
    return os.str();
}

namespace {

void precondition(const std::vector<double>& inv_diag, const std::vector<double>& r, std::vector<double>& z) {
    if (inv_diag.empty()) {
        z = r;
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(r.size()); ++i) z[i] = inv_diag[i] * r[i];
}

}  // namespace

SolveResult cg_solve(const CsrMatrix& M, const std::vector<double>& b, const SolveOptions& opts) {
    DD_REQUIRE(b.size() == M.n, "right-hand side size does not match the matrix");
    DD_REQUIRE(opts.tol > 0.0 && opts.tol < 1.0, "tolerance must lie in (0, 1)");
    DD_REQUIRE(opts.maxit >= 1, "maxit must be positive");
    const std::size_t n = M.n;
    const auto len = static_cast<std::ptrdiff_t>(n);

    std::vector<double> inv_diag;
    if (opts.precond == Preconditioner::Jacobi) {
        inv_diag = M.diagonal();
        for (double& d : inv_diag) {
            DD_REQUIRE(d > 0.0, "Jacobi preconditioner needs a positive diagonal");
            d = 1.0 / d;
        }
    }

    SolveResult out;
    SolveStats& st = out.stats;
    std::vector<double>& x = out.x;
    x.assign(n, 0.0);
    const double bnorm = std::sqrt(deterministic_dot(b, b));
    if (bnorm == 0.0) {
        st.converged = true;
        return out;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    // Restarts recompute the true residual when the recursive one has drifted.
    for (int restart = 0; restart < 5; ++restart) {
        M.multiply(x, q);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < len; ++i) r[i] = b[i] - q[i];
        double rel = std::sqrt(deterministic_dot(r, r)) / bnorm;
        if (rel <= opts.tol) break;
        precondition(inv_diag, r, z);
        p = z;
        double rz = deterministic_dot(r, z);
        while (st.iterations < opts.maxit) {
            M.multiply(p, q);
            const double pq = deterministic_dot(p, q);
            ++st.iterations;
            if (!(pq > 0.0)) {
                st.breakdown = true;
                st.breakdown_iteration = st.iterations;
                break;
            }
            const double alpha = rz / pq;
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < len; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            rel = std::sqrt(deterministic_dot(r, r)) / bnorm;
            if (opts.record_history) {
                st.residual_history.push_back(rel);
                const double xbr = deterministic_reduce(n, [&](std::size_t i) { return x[i] * (b[i] + r[i]); });
                st.energy_history.push_back(-0.5 * xbr);
            }
            if (rel <= opts.tol) break;
            precondition(inv_diag, r, z);
            const double rz_new = deterministic_dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < len; ++i) p[i] = z[i] + beta * p[i];
        }
        if (st.breakdown || st.iterations >= opts.maxit) break;
    }

    M.multiply(x, q);
    st.relative_residual =
        std::sqrt(deterministic_reduce(n, [&](std::size_t i) { return (b[i] - q[i]) * (b[i] - q[i]); })) / bnorm;
    st.converged = !st.breakdown && st.relative_residual <= opts.tol;
    return out;
}

}  // namespace dd
