#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "dd/assembly.hpp"
#include "dd/error.hpp"
#include "dd/parallel.hpp"
#include "dd/solve.hpp"
#include "dd/sparse.hpp"

using namespace dd;

namespace {

ProblemSpec robin_spec(double eps) {
    ProblemSpec spec;
    spec.variant = Variant::RDD;
    spec.epsilon = eps;
    spec.g = SurfaceData::constant(1.0);
    return spec;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("csr basics") {
    const CsrMatrix m = CsrMatrix::from_dense({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}});
    CHECK(m.nnz() == 7);
    CHECK(m.max_asymmetry() == 0.0);
    const auto y = m.multiply({1, 1, 1});
    CHECK(y == std::vector<double>{1, 0, 1});
    CHECK(m.diagonal() == std::vector<double>{2, 2, 2});
    CHECK(m.entry(0, 2) == 0.0);
}

TEST_CASE("cg on small systems") {
    const auto id = cg_solve(CsrMatrix::identity(5), {1, 2, 3, 4, 5});
    CHECK(id.stats.iterations <= 1);
    CHECK(id.x == std::vector<double>{1, 2, 3, 4, 5});
    const auto d = cg_solve(CsrMatrix::from_dense({{2, 0}, {0, 8}}), {2, 8});
    CHECK(d.x[0] == doctest::Approx(1.0));
    CHECK(d.x[1] == doctest::Approx(1.0));
    CHECK(d.stats.converged);
}

TEST_CASE("cg reports breakdown on an indefinite matrix") {
    SolveOptions opts;
    opts.precond = Preconditioner::None;
    const auto r = cg_solve(CsrMatrix::from_dense({{1, 0}, {0, -1}}), {1, 1}, opts);
    CHECK(r.stats.breakdown);
    CHECK_FALSE(r.stats.converged);
}

TEST_CASE("cg rejects bad arguments") {
    SolveOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(cg_solve(CsrMatrix::identity(2), {1, 1}, bad), PreconditionError);
    CHECK_THROWS_AS(cg_solve(CsrMatrix::identity(2), {1, 1, 1}), PreconditionError);
}

TEST_CASE("deterministic reductions do not depend on the thread count") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(100003), b(100003);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng) * 1e6;
    set_threads(1);
    const double d1 = deterministic_dot(a, b);
    set_threads(4);
    const double d4 = deterministic_dot(a, b);
    set_threads(0);
    CHECK(std::memcmp(&d1, &d4, sizeof(double)) == 0);
}

TEST_CASE("quadrature subdivisions") {
    QuadSpec q;
    CHECK(q.subdivisions(0.025, 0.1) == 1);
    CHECK(q.subdivisions(0.1, 0.1) == 2);
    CHECK(q.subdivisions(0.1, 0.03) == 7);
    q.subdiv = 3;
    CHECK(q.subdivisions(0.1, 0.03) == 3);
}

TEST_CASE("RDD assembly is symmetric, positive and reproduces constants") {
    ProblemSpec spec = robin_spec(0.2);
    spec.f = BulkData::constant(1.0);
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.05);
    const SparseSystem sys = eliminate_degenerate_dofs(assemble(spec, grid));
    CHECK(sys.matrix.max_asymmetry() == 0.0);
    const SpdReport spd = spd_probe(sys, 4, 11);
    CHECK(spd.passed());
    const std::vector<double> ones(sys.matrix.n, 1.0);
    const auto r = sys.matrix.multiply(ones);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - sys.rhs[i]));
    CHECK(worst < 1e-13);
}

TEST_CASE("double well weights never need elimination") {
    ProblemSpec spec = robin_spec(0.1);
    spec.profile = Profile::double_well();
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.05);
    const SparseSystem sys = eliminate_degenerate_dofs(assemble(spec, grid));
    CHECK(sys.eliminated_u.empty());
    CHECK(sys.dofs.num_u == grid.num_nodes());
}

TEST_CASE("double obstacle weights drop the outer nodes") {
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.05);
    const SparseSystem sys = eliminate_degenerate_dofs(assemble(robin_spec(0.1), grid));
    CHECK(sys.dofs.num_u < grid.num_nodes());
    const auto x = cg_solve(sys.matrix, sys.rhs);
    CHECK(x.stats.converged);
}

TEST_CASE("coupled and surface systems pass the positivity probe") {
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.05);
    ProblemSpec cdd = robin_spec(0.2);
    cdd.variant = Variant::CDD;
    cdd.f = BulkData::constant(1.0);
    cdd.g = SurfaceData::constant(0.0);
    const SparseSystem sc = eliminate_degenerate_dofs(assemble(cdd, grid));
    CHECK(sc.dofs.num_v > 0);
    CHECK(spd_probe(sc, 4, 5).passed());

    ProblemSpec sdd = robin_spec(0.2);
    sdd.variant = Variant::SDD;
    sdd.g = SurfaceData::fourier({{1, 1.0, 0.0}});
    const SparseSystem ss = eliminate_degenerate_dofs(assemble(sdd, grid));
    CHECK(ss.dofs.num_u == 0);
    CHECK(spd_probe(ss, 4, 5).passed());
}

TEST_CASE("coupled system with b below K runs the probe") {
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.1);
    ProblemSpec cdd = robin_spec(0.2);
    cdd.variant = Variant::CDD;
    cdd.b = BulkData::constant(0.0);
    cdd.skip_coefficient_checks = true;
    const SparseSystem sc = eliminate_degenerate_dofs(assemble(cdd, grid));
    const SpdReport r = spd_probe(sc, 8, 1);
    CHECK(r.trials == 8);
    CHECK(r.symmetric);
    CHECK(std::isfinite(r.min_rayleigh));
    CHECK(r.failures == static_cast<int>(r.witnesses.size()));
}

TEST_CASE("assembly refuses b below K unless told otherwise") {
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.1);
    ProblemSpec cdd = robin_spec(0.2);
    cdd.variant = Variant::CDD;
    cdd.b = BulkData::constant(0.0);
    CHECK_THROWS_AS(assemble(cdd, grid), PreconditionError);
}

TEST_CASE("assembly and solve are bit-identical across thread counts") {
    ProblemSpec spec = robin_spec(0.1);
    spec.f = BulkData::modal({{1, 1, 1.0, 0.0}});
    const BoxGrid grid = BoxGrid::with_spacing({-2, 2, -2, 2}, 0.025);
    set_threads(1);
    const SparseSystem s1 = eliminate_degenerate_dofs(assemble(spec, grid));
    const auto x1 = cg_solve(s1.matrix, s1.rhs);
    set_threads(4);
    const SparseSystem s4 = eliminate_degenerate_dofs(assemble(spec, grid));
    const auto x4 = cg_solve(s4.matrix, s4.rhs);
    set_threads(0);
    CHECK(bitwise_equal(s1.matrix.vals, s4.matrix.vals));
    CHECK(bitwise_equal(s1.rhs, s4.rhs));
    CHECK(bitwise_equal(x1.x, x4.x));
}

TEST_CASE("RDD disc problem on a 160 squared grid converges within 3000 iterations") {
    const BoxGrid grid(-2, 2, -2, 2, 160, 160);
    const SparseSystem sys = eliminate_degenerate_dofs(assemble(robin_spec(0.1), grid));
    const auto r = cg_solve(sys.matrix, sys.rhs);
    CHECK(r.stats.converged);
    CHECK(r.stats.iterations <= 3000);
    CHECK(r.stats.relative_residual <= 1e-10);
    // Energy 1/2 x'Mx - b'x never increases.
    for (std::size_t i = 1; i < r.stats.energy_history.size(); ++i)
        CHECK(r.stats.energy_history[i] <= r.stats.energy_history[i - 1] + 1e-12 * std::abs(r.stats.energy_history[i - 1]));
}
