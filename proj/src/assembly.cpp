#include "dd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <random>
#include <sstream>

#include "dd/error.hpp"
#include "dd/extensions.hpp"
#include "dd/quadrature.hpp"

namespace dd {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::CDD: return "cdd";
        case Variant::SDD: return "sdd";
        case Variant::RDD: return "rdd";
        case Variant::DDDH: return "dddh";
        case Variant::NDDH: return "nddh";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::CDD, Variant::SDD, Variant::RDD, Variant::DDDH, Variant::NDDH})
        if (name == variant_name(v)) return v;
    throw PreconditionError("unknown problem variant '" + name + "'");
}

bool has_bulk(Variant v) { return v != Variant::SDD; }
bool has_surface(Variant v) { return v == Variant::CDD || v == Variant::SDD; }

int QuadSpec::subdivisions(double h, double eps) const {
    if (subdiv > 0) return subdiv;
    return std::max(1, static_cast<int>(std::ceil(2.0 * h / eps)));
}

namespace {

// Local node a of a cell sits at (i + kDi[a], j + kDj[a]).
constexpr int kDi[4] = {0, 1, 0, 1};
constexpr int kDj[4] = {0, 0, 1, 1};

constexpr int stencil_slot(int di, int dj) { return (dj + 1) * 3 + (di + 1); }

struct RefPoint {
    double s, t, w;  // unit-cell coordinates and weight
    double N[4];
    Vec2 dN[4];      // gradients on the unit cell
};

std::vector<RefPoint> reference_rule(int order, int ns) {
    std::vector<RefPoint> pts;
    for (const CellPoint& c : cell_rule(order, ns)) {
        RefPoint p{};
        p.s = c.s;
        p.t = c.t;
        p.w = c.w;
        const double s = c.s, t = c.t;
        p.N[0] = (1 - s) * (1 - t);
        p.N[1] = s * (1 - t);
        p.N[2] = (1 - s) * t;
        p.N[3] = s * t;
        p.dN[0] = {-(1 - t), -(1 - s)};
        p.dN[1] = {(1 - t), -s};
        p.dN[2] = {-t, (1 - s)};
        p.dN[3] = {t, s};
        pts.push_back(p);
    }
    return pts;
}

double sampled_min(const BoxGrid& grid, const std::function<double(Vec2)>& f) {
    const int stride = std::max(1, std::max(grid.nx(), grid.ny()) / 200);
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= grid.ny(); j += stride)
        for (int i = 0; i <= grid.nx(); i += stride) m = std::min(m, f(grid.node(i, j)));
    return m;
}

void check_spec(const ProblemSpec& spec, const BoxGrid& grid) {
    DD_REQUIRE(spec.epsilon > 0.0, "epsilon must be positive");
    DD_REQUIRE(spec.profile.verified(), "profile '" + spec.profile.name() + "' has not passed verification");
    DD_REQUIRE(spec.allow_coarse || grid.h() <= spec.epsilon * (1.0 + 1e-12),
               "grid spacing exceeds epsilon (set allow_coarse to override)");
    DD_REQUIRE(spec.geometry.clearance(grid.box()) >= 4.0 * grid.h(),
               "curve must stay at least 4h away from the box boundary");
    if (spec.variant == Variant::DDDH) DD_REQUIRE(spec.m > 0.0 && spec.m <= 1.0, "penalty exponent m must lie in (0, 1]");
    if (spec.variant == Variant::RDD || spec.variant == Variant::CDD)
        DD_REQUIRE(spec.beta > 0.0, "beta must be positive");
    if (spec.variant == Variant::CDD) DD_REQUIRE(spec.K > 0.0, "K must be positive");
    if (spec.skip_coefficient_checks) return;
    if (has_bulk(spec.variant)) {
        DD_REQUIRE(sampled_min(grid, [&](Vec2 x) { return min_eigenvalue(spec.A.value(x)); }) > 0.0,
                   "A is not uniformly elliptic on the sample grid");
        DD_REQUIRE(sampled_min(grid, [&](Vec2 x) { return spec.a.value(x); }) > 0.0,
                   "bulk reaction a must be bounded below by a positive constant");
    }
    if (has_surface(spec.variant)) {
        DD_REQUIRE(sampled_min(grid, [&](Vec2 x) { return min_eigenvalue(spec.B.value(x)); }) > 0.0,
                   "B is not uniformly elliptic on the sample grid");
        const double bmin = sampled_min(grid, [&](Vec2 x) { return spec.b.value(x); });
        DD_REQUIRE(bmin > 0.0, "surface reaction b must be bounded below by a positive constant");
        if (spec.variant == Variant::CDD)
            DD_REQUIRE(bmin >= spec.K, "coupled problem needs theta_3 >= K (sampled min b = " + std::to_string(bmin) + ")");
    }
}

struct Activity {
    std::vector<bool> u, v;
};

DofMap build_dofmap(const BoxGrid& grid, const Activity& act) {
    DofMap map;
    const std::size_t n = grid.num_nodes();
    map.u_dof.assign(n, -1);
    map.v_dof.assign(n, -1);
    for (std::size_t k = 0; k < n; ++k)
        if (!act.u.empty() && act.u[k]) {
            map.u_dof[k] = static_cast<int>(map.node_of.size());
            map.node_of.push_back(k);
            map.block_of.push_back(Block::U);
        }
    map.num_u = map.node_of.size();
    for (std::size_t k = 0; k < n; ++k)
        if (!act.v.empty() && act.v[k]) {
            map.v_dof[k] = static_cast<int>(map.node_of.size());
            map.node_of.push_back(k);
            map.block_of.push_back(Block::V);
        }
    map.num_v = map.node_of.size() - map.num_u;
    DD_REQUIRE(map.size() > 0, "no active degrees of freedom");
    return map;
}

// CSR rows from the stencils; columns come out sorted because u dofs precede v dofs
// and stencil slots are visited in increasing node order.
void build_csr(SparseSystem& sys) {
    const Stencils& st = *sys.stencils;
    const BoxGrid& g = sys.grid;
    const DofMap& map = sys.dofs;
    CsrMatrix& M = sys.matrix;
    M = CsrMatrix{};
    M.n = map.size();
    M.row_ptr.assign(M.n + 1, 0);
    sys.rhs.assign(M.n, 0.0);

    auto visit_row = [&](std::size_t row, auto&& emit) {
        const std::size_t node = map.node_of[row];
        const int i = static_cast<int>(node % (g.nx() + 1));
        const int j = static_cast<int>(node / (g.nx() + 1));
        const bool is_u = map.block_of[row] == Block::U;
        // Pass 0 emits u columns, pass 1 v columns.
        for (int pass = 0; pass < 2; ++pass) {
            const std::vector<int>& cols = pass == 0 ? map.u_dof : map.v_dof;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni > g.nx() || nj > g.ny()) continue;
                    const std::size_t nb = g.node_index(ni, nj);
                    const int col = cols[nb];
                    if (col < 0) continue;
                    double val = 0.0;
                    if (is_u && pass == 0) val = st.uu[node][stencil_slot(di, dj)];
                    else if (!is_u && pass == 1) val = st.vv[node][stencil_slot(di, dj)];
                    else if (is_u) val = st.uv[node][stencil_slot(di, dj)];       // (u_node, v_nb)
                    else val = st.uv[nb][stencil_slot(-di, -dj)];                // (v_node, u_nb)
                    if (val != 0.0 || static_cast<std::size_t>(col) == row) emit(col, val);
                }
        }
    };

    for (std::size_t row = 0; row < M.n; ++row) {
        std::size_t count = 0;
        visit_row(row, [&](int, double) { ++count; });
        M.row_ptr[row + 1] = M.row_ptr[row] + count;
    }
    M.cols.resize(M.row_ptr[M.n]);
    M.vals.resize(M.row_ptr[M.n]);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t row = 0; row < static_cast<std::ptrdiff_t>(M.n); ++row) {
        std::size_t k = M.row_ptr[row];
        visit_row(static_cast<std::size_t>(row), [&](int col, double val) {
            M.cols[k] = col;
            M.vals[k] = val;
            ++k;
        });
        const std::size_t node = map.node_of[row];
        sys.rhs[row] = map.block_of[row] == Block::U ? st.fu[node] : st.fv[node];
    }
}

Activity activity(const SparseSystem& sys, double floor_u, double floor_v) {
    const Stencils& st = *sys.stencils;
    const std::size_t n = sys.grid.num_nodes();
    Activity act;
    const int centre = stencil_slot(0, 0);
    if (has_bulk(sys.variant)) {
        act.u.assign(n, false);
        for (std::size_t k = 0; k < n; ++k)
            act.u[k] = sys.xi_measure[k] > floor_u && st.uu[k][centre] > 0.0;
    }
    if (has_surface(sys.variant)) {
        act.v.assign(n, false);
        for (std::size_t k = 0; k < n; ++k)
            act.v[k] = sys.delta_measure[k] > floor_v && st.vv[k][centre] > 0.0;
    }
    return act;
}

void record_eliminated(SparseSystem& sys) {
    sys.eliminated_u.clear();
    sys.eliminated_v.clear();
    for (std::size_t k = 0; k < sys.grid.num_nodes(); ++k) {
        if (has_bulk(sys.variant) && sys.dofs.u_dof[k] < 0) sys.eliminated_u.push_back(k);
        if (has_surface(sys.variant) && sys.dofs.v_dof[k] < 0) sys.eliminated_v.push_back(k);
    }
}

}  // namespace

SparseSystem assemble(const ProblemSpec& spec, const BoxGrid& grid, const QuadSpec& quad) {
    check_spec(spec, grid);
    const Variant var = spec.variant;
    const bool bulk = has_bulk(var);
    const bool surf = has_surface(var);
    const double h = grid.h();
    const double eps = spec.epsilon;
    const double eta = spec.eta > 0.0 ? spec.eta : default_eta(spec.geometry, grid.box());
    const ScaledWeights weights(spec.profile, eps, spec.geometry);
    const SignedGeometry& geom = spec.geometry;

    // Extended and lifted data, built only where the variant needs them.
    BulkData g_ext, lift;
    if (var == Variant::RDD || var == Variant::CDD || var == Variant::SDD)
        g_ext = constant_normal_extension(spec.g, geom, eta);
    if (var == Variant::DDDH) lift = dirichlet_lifting(spec.g, geom, eta);
    if (var == Variant::NDDH) lift = neumann_lifting(spec.g, spec.A, geom, eta);
    const double penalty = var == Variant::DDDH ? std::pow(eps, -spec.m) : 0.0;

    const int ns = quad.subdivisions(h, eps);
    const std::vector<RefPoint> rule = reference_rule(quad.order, ns);
    const std::size_t nn = grid.num_nodes();

    auto st = std::make_shared<Stencils>();
    const std::array<double, 9> zero9{};
    if (bulk) {
        st->uu.assign(nn, zero9);
        st->fu.assign(nn, 0.0);
    }
    if (surf) {
        st->vv.assign(nn, zero9);
        st->fv.assign(nn, 0.0);
    }
    if (bulk && surf) st->uv.assign(nn, zero9);
    std::vector<double> xi_measure(nn, 0.0), delta_measure(nn, 0.0);

    auto cell_work = [&](int ci, int cj) {
        double Luu[4][4] = {}, Lvv[4][4] = {}, Luv[4][4] = {};
        double Fu[4] = {}, Fv[4] = {};
        double mxi = 0.0, mdelta = 0.0;
        const Vec2 origin = grid.node(ci, cj);
        const double area = h * h;
        const double invh = 1.0 / h;
        for (const RefPoint& q : rule) {
            const Vec2 x = origin + Vec2{q.s * h, q.t * h};
            const double w = q.w * area;
            const double d = sdf(geom, x);
            const double xi = weights.xi_from_distance(d);
            const double de = weights.delta_from_distance(d);
            if (xi == 0.0 && de == 0.0) continue;
            mxi += w * xi;
            mdelta += w * de;
            Vec2 grad[4];
            for (int a = 0; a < 4; ++a) grad[a] = invh * q.dN[a];
            const bool in_tube = std::abs(d) < eta;

            if (bulk && xi > 0.0) {
                const Mat2 Am = spec.A.value(x);
                const double av = spec.a.value(x);
                double src = spec.f.value(x);
                Vec2 lift_grad;
                double lift_val = 0.0;
                if (var == Variant::DDDH && in_tube) {
                    lift_val = lift.value(x);
                    lift_grad = lift.grad(x);
                }
                if (var == Variant::NDDH && in_tube) src += conormal_divergence(lift, spec.A, x) - av * lift.value(x);
                const double wx = w * xi;
                for (int a = 0; a < 4; ++a) {
                    const Vec2 Ag = Am * grad[a];
                    for (int b = a; b < 4; ++b) Luu[a][b] += wx * (dot(Ag, grad[b]) + av * q.N[a] * q.N[b]);
                    double rhs = src * q.N[a];
                    if (var == Variant::DDDH && in_tube) rhs -= dot(Am * lift_grad, grad[a]) + av * lift_val * q.N[a];
                    Fu[a] += wx * rhs;
                }
            }
            if (de > 0.0) {
                const double wd = w * de;
                double gval = 0.0;
                if (var == Variant::RDD || var == Variant::CDD || var == Variant::SDD) gval = g_ext.value(x);
                if (var == Variant::RDD || var == Variant::DDDH) {
                    const double c = var == Variant::RDD ? spec.beta : penalty;
                    for (int a = 0; a < 4; ++a) {
                        for (int b = a; b < 4; ++b) Luu[a][b] += c * wd * q.N[a] * q.N[b];
                        if (var == Variant::RDD) Fu[a] += spec.beta * wd * gval * q.N[a];
                    }
                }
                if (surf) {
                    const Mat2 Bm = spec.B.value(x);
                    const double bv = spec.b.value(x);
                    const double coupling = var == Variant::CDD ? spec.K : 0.0;
                    const double gscale = var == Variant::CDD ? spec.beta : 1.0;
                    for (int a = 0; a < 4; ++a) {
                        const Vec2 Bg = Bm * grad[a];
                        for (int b = a; b < 4; ++b)
                            Lvv[a][b] += wd * (dot(Bg, grad[b]) + (bv + coupling) * q.N[a] * q.N[b]);
                        Fv[a] += gscale * wd * gval * q.N[a];
                        if (var == Variant::CDD) {
                            for (int b = a; b < 4; ++b) Luu[a][b] += coupling * wd * q.N[a] * q.N[b];
                            for (int b = 0; b < 4; ++b) Luv[a][b] -= coupling * wd * q.N[a] * q.N[b];
                        }
                    }
                }
            }
        }
        // Scatter. Only the upper triangle was integrated; mirror it exactly.
        for (int a = 0; a < 4; ++a) {
            const std::size_t na = grid.node_index(ci + kDi[a], cj + kDj[a]);
            xi_measure[na] += mxi;
            delta_measure[na] += mdelta;
            for (int b = 0; b < 4; ++b) {
                const int slot = stencil_slot(kDi[b] - kDi[a], kDj[b] - kDj[a]);
                const int lo = std::min(a, b), hi = std::max(a, b);
                if (bulk) st->uu[na][slot] += Luu[lo][hi];
                if (surf) st->vv[na][slot] += Lvv[lo][hi];
                if (bulk && surf) st->uv[na][slot] += Luv[a][b];
            }
            if (bulk) st->fu[na] += Fu[a];
            if (surf) st->fv[na] += Fv[a];
        }
    };

    // Four-colour sweep: cells of one colour share no nodes.
    for (int colour = 0; colour < 4; ++colour) {
        const int pi = colour % 2, pj = colour / 2;
        const int nci = (grid.nx() - pi + 1) / 2;
        const int ncj = (grid.ny() - pj + 1) / 2;
        const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(nci) * ncj;
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t k = 0; k < total; ++k) {
            const int ci = pi + 2 * static_cast<int>(k % nci);
            const int cj = pj + 2 * static_cast<int>(k / nci);
            cell_work(ci, cj);
        }
    }

    SparseSystem sys;
    sys.variant = var;
    sys.grid = grid;
    sys.epsilon = eps;
    sys.eta = eta;
    sys.subdivisions = ns;
    sys.xi_measure = std::move(xi_measure);
    sys.delta_measure = std::move(delta_measure);
    sys.stencils = st;
    sys.compact_profile = spec.profile.compact();
    sys.dofs = build_dofmap(grid, activity(sys, 0.0, 0.0));
    build_csr(sys);
    record_eliminated(sys);
    return sys;
}

SparseSystem eliminate_degenerate_dofs(const SparseSystem& system, double floor) {
    DD_REQUIRE(floor >= 0.0, "floor must be non-negative");
    SparseSystem sys = system;
    const double h2 = sys.grid.h() * sys.grid.h();
    const double threshold = sys.compact_profile ? floor * h2 : 0.0;
    sys.dofs = build_dofmap(sys.grid, activity(sys, threshold, threshold));
    build_csr(sys);
    record_eliminated(sys);
    return sys;
}

ExpandedSolution expand_solution(const SparseSystem& system, const std::vector<double>& x) {
    DD_REQUIRE(x.size() == system.dofs.size(), "solution size does not match the dof map");
    const BoxGrid& g = system.grid;
    const std::size_t n = g.num_nodes();
    std::vector<double> u(n, 0.0), v(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (system.dofs.u_dof[k] >= 0) u[k] = x[system.dofs.u_dof[k]];
    }
    if (has_surface(system.variant)) {
        // Multi-source breadth-first fill from the active nodes, in node order.
        std::vector<char> set(n, 0);
        std::deque<std::size_t> queue;
        for (std::size_t k = 0; k < n; ++k)
            if (system.dofs.v_dof[k] >= 0) {
                v[k] = x[system.dofs.v_dof[k]];
                set[k] = 1;
                queue.push_back(k);
            }
        while (!queue.empty()) {
            const std::size_t k = queue.front();
            queue.pop_front();
            const int i = static_cast<int>(k % (g.nx() + 1));
            const int j = static_cast<int>(k / (g.nx() + 1));
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni > g.nx() || nj > g.ny()) continue;
                    const std::size_t nb = g.node_index(ni, nj);
                    if (set[nb]) continue;
                    set[nb] = 1;
                    v[nb] = v[k];
                    queue.push_back(nb);
                }
        }
    }
    return {NodalField(g, std::move(u)), NodalField(g, std::move(v))};
}

std::vector<double> restrict_to_dofs(const SparseSystem& system, const std::vector<double>& nodal, Block block) {
    DD_REQUIRE(nodal.size() == system.grid.num_nodes(), "nodal vector size does not match the grid");
    std::vector<double> out(system.dofs.size(), 0.0);
    for (std::size_t r = 0; r < out.size(); ++r)
        if (system.dofs.block_of[r] == block) out[r] = nodal[system.dofs.node_of[r]];
    return out;
}

SpdReport spd_probe(const SparseSystem& system, int trials, std::uint64_t seed) {
    DD_REQUIRE(trials >= 1, "need at least one trial");
    SpdReport rep;
    rep.trials = trials;
    rep.max_asymmetry = system.matrix.max_asymmetry();
    rep.symmetric = rep.max_asymmetry == 0.0;
    rep.min_rayleigh = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const std::size_t n = system.matrix.n;
    std::vector<double> x(n), y;
    for (int t = 0; t < trials; ++t) {
        for (double& xi : x) xi = dist(rng);
        system.matrix.multiply(x, y);
        double xmx = 0.0, xx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xmx += x[i] * y[i];
            xx += x[i] * x[i];
        }
        rep.min_rayleigh = std::min(rep.min_rayleigh, xmx / xx);
        if (!(xmx > 0.0)) {
            ++rep.failures;
            // FNV-1a over the witness bytes.
            std::uint64_t hash = 1469598103934665603ull;
            for (double xi : x) {
                unsigned char bytes[sizeof(double)];
                std::memcpy(bytes, &xi, sizeof(double));
                for (unsigned char c : bytes) hash = (hash ^ c) * 1099511628211ull;
            }
            std::ostringstream os;
            os << "trial " << t << ": x'Mx = " << xmx << ", witness hash " << std::hex << hash;
            rep.witnesses.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace dd
