#include "dd/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <set>

#include "dd/error.hpp"
#include "dd/extensions.hpp"
#include "dd/quadrature.hpp"

namespace dd {
namespace {

constexpr double kPi = std::numbers::pi;

// Per-mode radial data: f_k(r) for the cos and sin parts and the curve coefficients g_k.
struct ModeData {
    std::vector<std::pair<int, double>> f_cos;  // (power, amplitude)
    std::vector<std::pair<int, double>> f_sin;
    double g_cos{0};
    double g_sin{0};
};

double eval_poly(const std::vector<std::pair<int, double>>& terms, double r) {
    double s = 0.0;
    for (const auto& [p, c] : terms) s += c * std::pow(r, p);
    return s;
}

// Boundary law for one radial solve.
struct RadialBC {
    bool dirichlet{false};
    double value{0};  // Dirichlet value
    double sigma{0};  // alpha u'(R) = sigma - tau u(R)
    double tau{0};
};

struct Coeffs {
    std::function<double(double)> alpha;
    std::function<double(double)> a;
};

// Vertex-centred finite volumes on N cells; returns u at r_i = i R / N.
std::vector<double> fv_solve(int k, int N, double R, const Coeffs& c, const std::function<double(double)>& src,
                             const RadialBC& bc) {
    const double dr = R / N;
    const double k2 = static_cast<double>(k) * k;
    const int first = k == 0 ? 0 : 1;
    const int last = bc.dirichlet ? N - 1 : N;
    const int n = last - first + 1;
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
    for (int i = first; i <= last; ++i) {
        const int row = i - first;
        const double ri = i * dr;
        if (i == 0) {
            const double fl = 0.5 * dr * c.alpha(0.5 * dr) / dr;
            const double vol = dr * dr / 8.0;
            di[row] = fl + c.a(0.0) * vol;
            up[row] = -fl;
            rhs[row] = src(0.0) * vol;
            continue;
        }
        const double rm = ri - 0.5 * dr;
        const double fm = rm * c.alpha(rm) / dr;
        if (i == N) {
            const double half = 0.5 * dr;
            di[row] = fm + R * bc.tau + (c.alpha(R) * k2 / R + c.a(R) * R) * half;
            lo[row] = -fm;
            rhs[row] = R * src(R) * half + R * bc.sigma;
            continue;
        }
        const double rp = ri + 0.5 * dr;
        const double fp = rp * c.alpha(rp) / dr;
        di[row] = fm + fp + (c.alpha(ri) * k2 / ri + c.a(ri) * ri) * dr;
        if (i > first) lo[row] = -fm;
        if (i < last) up[row] = -fp;
        rhs[row] = ri * src(ri) * dr;
        if (bc.dirichlet && i == N - 1) rhs[row] += fp * bc.value;
    }
    // Thomas algorithm; the matrix is symmetric and diagonally dominant.
    for (int i = 1; i < n; ++i) {
        const double m = lo[i] / di[i - 1];
        di[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / di[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];

    std::vector<double> u(N + 1, 0.0);
    for (int i = first; i <= last; ++i) u[i] = x[i - first];
    if (bc.dirichlet) u[N] = bc.value;
    return u;
}

// Fourth-order first derivative on a uniform grid; ghosts below r = 0 use u(-r) = (-1)^k u(r).
double fd1(const std::vector<double>& u, int i, int k, double dr) {
    const int N = static_cast<int>(u.size()) - 1;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    auto at = [&](int j) { return j >= 0 ? u[j] : sgn * u[-j]; };
    if (i <= N - 2) return (at(i - 2) - 8.0 * at(i - 1) + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * dr);
    if (i == N - 1) return (-u[N - 4] + 6.0 * u[N - 3] - 18.0 * u[N - 2] + 10.0 * u[N - 1] + 3.0 * u[N]) / (12.0 * dr);
    return (3.0 * u[N - 4] - 16.0 * u[N - 3] + 36.0 * u[N - 2] - 48.0 * u[N - 1] + 25.0 * u[N]) / (12.0 * dr);
}

double fd2(const std::vector<double>& u, int i, double dr) {
    return (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * dr * dr);
}

struct PartResult {
    RadialProfile profile;
    double gap{0};
    double ode_residual{0};
    double boundary_value{0};  // U(R)
    double boundary_slope{0};  // U'(R) from differences
};

PartResult solve_part(int k, int N, double R, const Coeffs& c, const std::function<double(double)>& src,
                      const RadialBC& bc) {
    const std::vector<double> coarse = fv_solve(k, N, R, c, src, bc);
    const std::vector<double> fine = fv_solve(k, 2 * N, R, c, src, bc);
    PartResult out;
    std::vector<double> U(N + 1);
    for (int i = 0; i <= N; ++i) {
        U[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
        out.gap = std::max(out.gap, std::abs(fine[2 * i] - coarse[i]));
    }
    const double dr = R / N;
    std::vector<double> r(N + 1), dU(N + 1);
    for (int i = 0; i <= N; ++i) {
        r[i] = i * dr;
        dU[i] = fd1(U, i, k, dr);
    }
    out.boundary_value = U[N];
    out.boundary_slope = dU[N];
    if (!bc.dirichlet) dU[N] = (bc.sigma - bc.tau * U[N]) / c.alpha(R);

    const double k2 = static_cast<double>(k) * k;
    for (int i = std::max(2, N / 8); i <= N - 2; ++i) {
        const double ri = r[i];
        const double al = c.alpha(ri);
        const double dal = (c.alpha(ri + 1e-5) - c.alpha(ri - 1e-5)) / 2e-5;
        const double res = -al * fd2(U, i, dr) - (dal + al / ri) * fd1(U, i, k, dr) +
                           (al * k2 / (ri * ri) + c.a(ri)) * U[i] - src(ri);
        out.ode_residual = std::max(out.ode_residual, std::abs(res));
    }
    out.profile = RadialProfile(std::move(r), std::move(U), std::move(dU));
    return out;
}

struct ModeOutcome {
    ModeSolution sol;
    double ode_residual{0};
    double boundary_residual{0};
};

bool is_bulk_variant(SharpVariant v) { return v != SharpVariant::SSI; }

// Mode decomposition of (f, g) about the disc centre; modes above `max_mode` are dropped and listed.
std::map<int, ModeData> decompose(const SharpData& data, bool use_f, int max_mode, std::vector<int>& dropped) {
    std::map<int, ModeData> modes;
    std::set<int> dropped_set;
    if (use_f) {
        DD_REQUIRE(data.f.is_modal(), "bulk data must be modal about the disc centre");
        if (!data.f.is_constant()) {
            const Vec2 d = data.f.modal_center() - data.center;
            DD_REQUIRE(norm(d) <= 1e-14, "modal bulk data is centred away from the disc");
        }
        for (const ModalTerm& t : data.f.modal_terms()) {
            DD_REQUIRE(t.mode >= 0 && t.power >= 0, "modal terms need nonnegative mode and power");
            if (t.cos_amp == 0.0 && t.sin_amp == 0.0) continue;
            if (t.mode > max_mode) {
                dropped_set.insert(t.mode);
                continue;
            }
            ModeData& m = modes[t.mode];
            if (t.cos_amp != 0.0) m.f_cos.emplace_back(t.power, t.cos_amp);
            if (t.sin_amp != 0.0 && t.mode > 0) m.f_sin.emplace_back(t.power, t.sin_amp);
        }
    }
    DD_REQUIRE(data.g.is_fourier(), "curve data must be a Fourier series in the polar angle");
    for (const FourierTerm& t : data.g.fourier_terms()) {
        DD_REQUIRE(t.mode >= 0, "Fourier modes must be nonnegative");
        if (t.cos_amp == 0.0 && t.sin_amp == 0.0) continue;
        if (t.mode > max_mode) {
            dropped_set.insert(t.mode);
            continue;
        }
        ModeData& m = modes[t.mode];
        m.g_cos += t.cos_amp;
        if (t.mode > 0) m.g_sin += t.sin_amp;
    }
    dropped.assign(dropped_set.begin(), dropped_set.end());
    return modes;
}

ModeOutcome solve_mode(SharpVariant variant, const SharpData& data, const Coeffs& c, int k, const ModeData& md,
                       int N) {
    const double R = data.R;
    const double k2 = static_cast<double>(k) * k;
    const double Ds = data.B * k2 / (R * R) + data.b;  // surface symbol
    ModeOutcome out;
    out.sol.k = k;

    if (variant == SharpVariant::SSI) {
        out.sol.v_cos = md.g_cos / Ds;
        out.sol.v_sin = md.g_sin / Ds;
        return out;
    }

    const bool dirichlet = variant == SharpVariant::DSI || variant == SharpVariant::DSIH;
    for (int part = 0; part < 2; ++part) {
        if (part == 1 && k == 0) break;
        const auto& fterms = part == 0 ? md.f_cos : md.f_sin;
        const double g = part == 0 ? md.g_cos : md.g_sin;
        RadialBC bc;
        double D = 0.0;
        switch (variant) {
            case SharpVariant::RSI:
                bc.sigma = data.beta * g;
                bc.tau = data.beta;
                break;
            case SharpVariant::NSI:
            case SharpVariant::NSIH:
                bc.sigma = g;
                bc.tau = 0.0;
                break;
            case SharpVariant::CSI:
                D = Ds + data.K;
                bc.sigma = data.K * data.beta * g / D;
                bc.tau = data.K * (1.0 - data.K / D);
                break;
            default:
                bc.dirichlet = true;
                bc.value = g;
                break;
        }
        (void)dirichlet;
        auto src = [&fterms](double r) { return eval_poly(fterms, r); };
        PartResult pr = solve_part(k, N, R, c, src, bc);
        out.sol.richardson_gap = std::max(out.sol.richardson_gap, pr.gap);
        out.ode_residual = std::max(out.ode_residual, pr.ode_residual);

        const double flux = c.alpha(R) * pr.boundary_slope;
        double bres = 0.0;
        double vk = 0.0;
        if (bc.dirichlet) {
            bres = std::abs(pr.boundary_value - bc.value);
        } else if (variant == SharpVariant::CSI) {
            vk = (data.beta * g + data.K * pr.boundary_value) / D;
            // Bulk flux balance and surface equation per mode.
            bres = std::max(std::abs(flux - data.K * (vk - pr.boundary_value)),
                            std::abs(Ds * vk + data.K * (vk - pr.boundary_value) - data.beta * g));
        } else {
            bres = std::abs(flux - (bc.sigma - bc.tau * pr.boundary_value));
        }
        out.boundary_residual = std::max(out.boundary_residual, bres);
        if (part == 0) {
            out.sol.cos_part = std::move(pr.profile);
            out.sol.v_cos = vk;
        } else {
            out.sol.sin_part = std::move(pr.profile);
            out.sol.v_sin = vk;
        }
    }
    return out;
}

Coeffs make_coeffs(const SharpData& data) {
    Coeffs c;
    if (data.alpha_r) {
        c.alpha = data.alpha_r;
    } else {
        const double al = data.alpha;
        c.alpha = [al](double) { return al; };
    }
    if (data.a_r) {
        c.a = data.a_r;
    } else {
        const double a = data.a;
        c.a = [a](double) { return a; };
    }
    return c;
}

// sum_k w_k int_0^R (dU'^2 + (k^2/r^2 + 1) dU^2) r dr for the difference of two solutions.
double radial_h1(const SharpSolution& s, const SharpSolution* other) {
    const GaussRule& g = gauss_legendre(4);
    double total = 0.0;
    for (std::size_t m = 0; m < s.modes.size(); ++m) {
        const ModeSolution& ms = s.modes[m];
        const ModeSolution* mo = nullptr;
        if (other) {
            for (const ModeSolution& cand : other->modes)
                if (cand.k == ms.k) mo = &cand;
        }
        const double k2 = static_cast<double>(ms.k) * ms.k;
        const double wk = ms.k == 0 ? 2.0 * kPi : kPi;
        for (int part = 0; part < 2; ++part) {
            const RadialProfile& p = part == 0 ? ms.cos_part : ms.sin_part;
            const RadialProfile* q = mo ? (part == 0 ? &mo->cos_part : &mo->sin_part) : nullptr;
            if (p.empty() && (!q || q->empty())) continue;
            const RadialProfile& grid = p.empty() ? *q : p;
            const auto& r = grid.nodes();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < r.size(); ++i) {
                const double half = 0.5 * (r[i + 1] - r[i]);
                const double mid = 0.5 * (r[i + 1] + r[i]);
                for (std::size_t j = 0; j < g.nodes.size(); ++j) {
                    const double rr = mid + half * g.nodes[j];
                    double u = p.empty() ? 0.0 : p.value(rr);
                    double du = p.empty() ? 0.0 : p.derivative(rr);
                    if (q && !q->empty()) {
                        u -= q->value(rr);
                        du -= q->derivative(rr);
                    }
                    acc += half * g.weights[j] * (du * du + (k2 / (rr * rr) + 1.0) * u * u) * rr;
                }
            }
            total += wk * acc;
        }
    }
    return std::sqrt(total);
}

}  // namespace

const char* sharp_variant_name(SharpVariant v) {
    switch (v) {
        case SharpVariant::CSI: return "CSI";
        case SharpVariant::SSI: return "SSI";
        case SharpVariant::RSI: return "RSI";
        case SharpVariant::DSI: return "DSI";
        case SharpVariant::NSI: return "NSI";
        case SharpVariant::DSIH: return "DSIH";
        case SharpVariant::NSIH: return "NSIH";
    }
    return "?";
}

RadialProfile::RadialProfile(std::vector<double> r, std::vector<double> u, std::vector<double> du)
    : r_(std::move(r)), u_(std::move(u)), du_(std::move(du)) {
    DD_REQUIRE(r_.size() >= 2 && u_.size() == r_.size() && du_.size() == r_.size(), "malformed radial table");
}

std::size_t RadialProfile::interval(double r) const {
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
    return std::min(i, r_.size() - 2);
}

double RadialProfile::value(double r) const {
    if (r_.empty()) return 0.0;
    const std::size_t i = interval(r);
    const double h = r_[i + 1] - r_[i];
    const double t = (r - r_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * u_[i] + (t3 - 2 * t2 + t) * h * du_[i] + (-2 * t3 + 3 * t2) * u_[i + 1] +
           (t3 - t2) * h * du_[i + 1];
}

double RadialProfile::derivative(double r) const {
    if (r_.empty()) return 0.0;
    const std::size_t i = interval(r);
    const double h = r_[i + 1] - r_[i];
    const double t = (r - r_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * u_[i] + (-6 * t2 + 6 * t) * u_[i + 1]) / h + (3 * t2 - 4 * t + 1) * du_[i] +
           (3 * t2 - 2 * t) * du_[i + 1];
}

double SharpSolution::u(Vec2 x) const {
    DD_REQUIRE(has_bulk, "surface-only problem has no bulk solution");
    const Vec2 d = x - data.center;
    const double r = norm(d);
    const double th = std::atan2(d.y, d.x);
    double s = 0.0;
    for (const ModeSolution& m : modes) {
        if (!m.cos_part.empty()) s += m.cos_part.value(r) * std::cos(m.k * th);
        if (!m.sin_part.empty()) s += m.sin_part.value(r) * std::sin(m.k * th);
    }
    if (shifted) s -= shift.value(x);
    return s;
}

Vec2 SharpSolution::grad_u(Vec2 x) const {
    DD_REQUIRE(has_bulk, "surface-only problem has no bulk solution");
    const Vec2 d = x - data.center;
    const double r = norm(d);
    Vec2 g{0.0, 0.0};
    if (r < 1e-12) {
        // Only mode 1 has a nonzero gradient at the centre.
        for (const ModeSolution& m : modes) {
            if (m.k != 1) continue;
            if (!m.cos_part.empty()) g.x += m.cos_part.derivative(0.0);
            if (!m.sin_part.empty()) g.y += m.sin_part.derivative(0.0);
        }
    } else {
        const double th = std::atan2(d.y, d.x);
        const Vec2 er{std::cos(th), std::sin(th)};
        const Vec2 et{-std::sin(th), std::cos(th)};
        double dr = 0.0, dt = 0.0;
        for (const ModeSolution& m : modes) {
            const double c = std::cos(m.k * th), s = std::sin(m.k * th);
            if (!m.cos_part.empty()) {
                dr += m.cos_part.derivative(r) * c;
                dt -= m.k * m.cos_part.value(r) / r * s;
            }
            if (!m.sin_part.empty()) {
                dr += m.sin_part.derivative(r) * s;
                dt += m.k * m.sin_part.value(r) / r * c;
            }
        }
        g = dr * er + dt * et;
    }
    if (shifted) g -= shift.grad(x);
    return g;
}

double SharpSolution::v(double theta) const {
    double s = 0.0;
    for (const ModeSolution& m : modes) s += m.v_cos * std::cos(m.k * theta) + m.v_sin * std::sin(m.k * theta);
    return s;
}

double SharpSolution::dv(double theta) const {
    double s = 0.0;
    for (const ModeSolution& m : modes) s += m.k * (m.v_sin * std::cos(m.k * theta) - m.v_cos * std::sin(m.k * theta));
    return s;
}

BulkData SharpSolution::bulk() const {
    DD_REQUIRE(has_bulk, "surface-only problem has no bulk solution");
    auto self = std::make_shared<SharpSolution>(*this);
    return BulkData::closure([self](Vec2 x) { return self->u(x); }, [self](Vec2 x) { return self->grad_u(x); }, {},
                             std::string("oracle-") + sharp_variant_name(variant));
}

SurfaceData SharpSolution::surface() const {
    std::vector<FourierTerm> terms;
    for (const ModeSolution& m : modes) terms.push_back({m.k, m.v_cos, m.v_sin});
    return SurfaceData::fourier(std::move(terms));
}

double SharpSolution::surface_h1_from_modes() const {
    const double R = data.R;
    double s = 0.0;
    for (const ModeSolution& m : modes) {
        const double k2 = static_cast<double>(m.k) * m.k;
        const double w = m.k == 0 ? 2.0 * kPi * R : kPi * R;
        s += w * (m.v_cos * m.v_cos + m.v_sin * m.v_sin) * (1.0 + k2 / (R * R));
    }
    return std::sqrt(s);
}

double SharpSolution::bulk_h1_unshifted() const { return radial_h1(*this, nullptr); }

double SharpSolution::max_ode_residual() const { return ode_residual_; }
double SharpSolution::max_boundary_residual() const { return boundary_residual_; }

void SharpSolution::write_csv(std::ostream& os) const {
    os << "r";
    std::vector<const RadialProfile*> cols;
    for (const ModeSolution& m : modes) {
        if (!m.cos_part.empty()) {
            os << ",u" << m.k << "c";
            cols.push_back(&m.cos_part);
        }
        if (!m.sin_part.empty()) {
            os << ",u" << m.k << "s";
            cols.push_back(&m.sin_part);
        }
    }
    os << "\n";
    if (cols.empty()) return;
    const auto& r = cols.front()->nodes();
    for (std::size_t i = 0; i < r.size(); ++i) {
        os << r[i];
        for (const RadialProfile* p : cols) os << "," << p->values()[i];
        os << "\n";
    }
}

SharpSolution solve_sharp_disc(SharpVariant variant, const SharpData& data, const OracleOptions& opts) {
    DD_REQUIRE(data.R > 0.0, "disc radius must be positive");
    DD_REQUIRE(opts.radial_cells >= 16, "at least 16 radial cells are required");
    DD_REQUIRE(opts.modes >= 0, "mode count must be nonnegative");
    const bool bulk = is_bulk_variant(variant);
    if (bulk) {
        DD_REQUIRE(data.alpha_r || data.alpha > 0.0, "bulk diffusion must be positive");
        DD_REQUIRE(data.a_r || data.a > 0.0 || variant == SharpVariant::DSI || variant == SharpVariant::DSIH ||
                       variant == SharpVariant::RSI || variant == SharpVariant::CSI,
                   "pure Neumann problems need a positive reaction coefficient");
    }
    if (variant == SharpVariant::RSI) DD_REQUIRE(data.beta > 0.0, "Robin coefficient must be positive");
    if (variant == SharpVariant::CSI) DD_REQUIRE(data.K > 0.0 && data.beta > 0.0, "K and beta must be positive");
    if (variant == SharpVariant::CSI || variant == SharpVariant::SSI)
        DD_REQUIRE(data.B > 0.0 && data.b > 0.0, "surface coefficients must be positive");

    SharpSolution sol;
    sol.variant = variant;
    sol.data = data;
    sol.has_bulk = bulk;
    sol.has_surface = variant == SharpVariant::CSI || variant == SharpVariant::SSI;

    const std::map<int, ModeData> modes = decompose(data, bulk, opts.modes, sol.truncated_modes);
    std::vector<int> ks;
    std::vector<const ModeData*> mds;
    for (const auto& [k, md] : modes) {
        ks.push_back(k);
        mds.push_back(&md);
    }
    const Coeffs coeffs = make_coeffs(data);
    if (bulk) {
        for (int i = 0; i <= 16; ++i) {
            const double r = data.R * i / 16.0;
            DD_REQUIRE(coeffs.alpha(r) > 0.0 && coeffs.a(r) >= 0.0, "radial coefficients must be positive");
        }
    }

    std::vector<ModeOutcome> results(ks.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ks.size()); ++i) {
        try {
            results[i] = solve_mode(variant, data, coeffs, ks[i], *mds[i], opts.radial_cells);
        } catch (...) {
#pragma omp critical(dd_oracle_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    for (ModeOutcome& r : results) {
        sol.ode_residual_ = std::max(sol.ode_residual_, r.ode_residual);
        sol.boundary_residual_ = std::max(sol.boundary_residual_, r.boundary_residual);
        sol.modes.push_back(std::move(r.sol));
    }

    if (variant == SharpVariant::DSIH || variant == SharpVariant::NSIH) {
        DD_REQUIRE(data.eta > 0.0 && data.eta < data.R, "lifting width must lie in (0, R)");
        const SignedGeometry disc = SignedGeometry::circle(data.center, data.R);
        sol.shifted = true;
        if (variant == SharpVariant::DSIH) {
            sol.shift = dirichlet_lifting(data.g, disc, data.eta);
        } else {
            DD_REQUIRE(!data.alpha_r, "the Neumann lifting needs constant diffusion");
            sol.shift = neumann_lifting(data.g, MatrixData::constant(data.alpha * Mat2::identity()), disc, data.eta);
        }
    }
    return sol;
}

ManufacturedBundle manufactured(SharpVariant variant, const BulkData& u, const SurfaceData& v, const SharpData& c) {
    DD_REQUIRE(!c.alpha_r && !c.a_r, "manufactured data needs constant coefficients");
    DD_REQUIRE(u.is_modal(), "manufactured bulk solution must be modal");
    DD_REQUIRE(v.is_fourier(), "manufactured surface solution must be a Fourier series");
    const double R = c.R;
    ManufacturedBundle out;
    out.u = u;
    out.v = v;

    std::vector<ModalTerm> uterms = u.modal_terms();
    if (!u.is_constant()) DD_REQUIRE(norm(u.modal_center() - c.center) <= 1e-14, "modal solution is off centre");

    // f = -alpha lap u + a u
    std::vector<ModalTerm> fterms;
    for (const ModalTerm& t : uterms) {
        if (c.a != 0.0) fterms.push_back({t.power, t.mode, c.a * t.cos_amp, c.a * t.sin_amp});
        const int q = t.power * t.power - t.mode * t.mode;
        if (q != 0) {
            DD_REQUIRE(t.power >= 2, "modal term r^p with p < 2 and p != k is singular at the centre");
            fterms.push_back({t.power - 2, t.mode, -c.alpha * q * t.cos_amp, -c.alpha * q * t.sin_amp});
        }
    }
    out.f = BulkData::modal(std::move(fterms), c.center);

    // Trace and radial derivative on r = R per mode and part.
    std::map<int, std::array<double, 4>> bnd;  // uR_c, uR_s, duR_c, duR_s
    for (const ModalTerm& t : uterms) {
        auto& e = bnd[t.mode];
        const double rp = std::pow(R, t.power);
        const double drp = t.power == 0 ? 0.0 : t.power * std::pow(R, t.power - 1);
        e[0] += t.cos_amp * rp;
        e[1] += t.sin_amp * rp;
        e[2] += t.cos_amp * drp;
        e[3] += t.sin_amp * drp;
    }
    std::map<int, std::array<double, 2>> vmodes;
    for (const FourierTerm& t : v.fourier_terms()) {
        auto& e = vmodes[t.mode];
        e[0] += t.cos_amp;
        e[1] += t.sin_amp;
    }

    std::vector<FourierTerm> gterms;
    std::vector<FourierTerm> vterms;
    auto symbol = [&](int k) { return c.B * double(k) * k / (R * R) + c.b; };
    switch (variant) {
        case SharpVariant::SSI:
            for (const auto& [k, e] : vmodes) gterms.push_back({k, symbol(k) * e[0], symbol(k) * e[1]});
            break;
        case SharpVariant::RSI:
            DD_REQUIRE(c.beta > 0.0, "Robin coefficient must be positive");
            for (const auto& [k, e] : bnd)
                gterms.push_back({k, e[0] + c.alpha * e[2] / c.beta, e[1] + c.alpha * e[3] / c.beta});
            break;
        case SharpVariant::DSI:
        case SharpVariant::DSIH:
            for (const auto& [k, e] : bnd) gterms.push_back({k, e[0], e[1]});
            break;
        case SharpVariant::NSI:
        case SharpVariant::NSIH:
            for (const auto& [k, e] : bnd) gterms.push_back({k, c.alpha * e[2], c.alpha * e[3]});
            break;
        case SharpVariant::CSI:
            DD_REQUIRE(c.K > 0.0 && c.beta > 0.0, "K and beta must be positive");
            for (const auto& [k, e] : bnd) {
                double vk[2], gk[2];
                for (int p = 0; p < 2; ++p) {
                    vk[p] = e[p] + c.alpha * e[2 + p] / c.K;
                    gk[p] = (symbol(k) * vk[p] + c.K * (vk[p] - e[p])) / c.beta;
                }
                vterms.push_back({k, vk[0], vk[1]});
                gterms.push_back({k, gk[0], gk[1]});
            }
            out.v = SurfaceData::fourier(std::move(vterms));
            break;
    }
    out.g = SurfaceData::fourier(std::move(gterms));
    return out;
}

std::vector<PenaltyRow> robin_penalty_study(const SharpData& data, const std::vector<double>& betas,
                                            const OracleOptions& opts) {
    const SharpSolution dir = solve_sharp_disc(SharpVariant::DSI, data, opts);
    std::vector<PenaltyRow> rows;
    for (double beta : betas) {
        SharpData d = data;
        d.beta = beta;
        const SharpSolution rob = solve_sharp_disc(SharpVariant::RSI, d, opts);
        rows.push_back({beta, radial_h1(rob, &dir)});
    }
    return rows;
}

}  // namespace dd
