#pragma once

#include <string>
#include <vector>

#include "dd/sparse.hpp"

namespace dd {

enum class Preconditioner { None, Jacobi };

struct SolveOptions {
    double tol{1e-10};
    int maxit{50000};
    Preconditioner precond{Preconditioner::Jacobi};
    /// Keep per-iteration residual and energy histories.
    bool record_history{true};
};

struct SolveStats {
    int iterations{0};
    /// ||b - M x|| / ||b|| recomputed from the returned x.
    double relative_residual{0};
    bool converged{false};
    bool breakdown{false};
    int breakdown_iteration{-1};
    std::vector<double> residual_history;
    /// Energy functional 1/2 x'Mx - b'x after each iteration; non-increasing in exact arithmetic.
    std::vector<double> energy_history;

    std::string summary() const;
};

struct SolveResult {
    std::vector<double> x;
    SolveStats stats;
};

/**
 * Preconditioned conjugate gradients from a zero initial guess.
 *
 * Inner products use the fixed-block pairwise reduction, so the iterates are
 * bit-identical for any thread count. A non-positive curvature p'Mp stops the
 * iteration and is reported as a breakdown; neither breakdown nor hitting
 * maxit throws.
 */
SolveResult cg_solve(const CsrMatrix& M, const std::vector<double>& b, const SolveOptions& opts = {});

}  // namespace dd
