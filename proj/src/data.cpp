#include "dd/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dd/error.hpp"

namespace dd {
namespace {

constexpr double kGradStep = 1e-6;
constexpr double kHessStep = 1e-5;

}  // namespace

BulkData BulkData::constant(double c) {
    BulkData d;
    d.kind_ = Kind::Constant;
    d.constant_ = c;
    d.label_ = "const";
    return d;
}

BulkData BulkData::modal(std::vector<ModalTerm> terms, Vec2 center) {
    for (const auto& t : terms) DD_REQUIRE(t.power >= 0 && t.mode >= 0, "modal terms need power >= 0 and mode >= 0");
    BulkData d = constant(0.0);
    d.kind_ = Kind::Modal;
    d.terms_ = std::move(terms);
    d.center_ = center;
    d.label_ = "modal";
    return d;
}

BulkData BulkData::closure(ValueFn value, GradFn grad, HessFn hessian, std::string label) {
    DD_REQUIRE(static_cast<bool>(value), "closure needs a value function");
    BulkData d = constant(0.0);
    d.kind_ = Kind::Closure;
    d.value_ = std::move(value);
    d.grad_ = std::move(grad);
    d.hess_ = std::move(hessian);
    d.label_ = std::move(label);
    return d;
}

double BulkData::value(Vec2 x) const {
    switch (kind_) {
        case Kind::Constant:
            return constant_;
        case Kind::Modal: {
            const Vec2 q = x - center_;
            const double r = norm(q);
            const double th = std::atan2(q.y, q.x);
            double s = 0.0;
            for (const auto& t : terms_) {
                const double rp = t.power == 0 ? 1.0 : std::pow(r, t.power);
                s += rp * (t.cos_amp * std::cos(t.mode * th) + t.sin_amp * std::sin(t.mode * th));
            }
            return s;
        }
        case Kind::Closure:
            return value_(x);
    }
    return 0.0;
}

Vec2 BulkData::grad(Vec2 x) const {
    switch (kind_) {
        case Kind::Constant:
            return {};
        case Kind::Modal: {
            const Vec2 q = x - center_;
            const double r = norm(q);
            Vec2 g;
            if (r == 0.0) {
                // Only r cos(theta), r sin(theta) have a nonzero gradient at the centre.
                for (const auto& t : terms_)
                    if (t.power == 1 && t.mode == 1) g += Vec2{t.cos_amp, t.sin_amp};
                return g;
            }
            const double th = std::atan2(q.y, q.x);
            const Vec2 er = q / r;
            const Vec2 et = perp(er);
            for (const auto& t : terms_) {
                if (t.power == 0) {
                    if (t.mode == 0) continue;
                }
                const double c = std::cos(t.mode * th);
                const double s = std::sin(t.mode * th);
                const double rpm1 = std::pow(r, t.power - 1);
                const double dr = t.power * rpm1 * (t.cos_amp * c + t.sin_amp * s);
                const double dt = rpm1 * t.mode * (-t.cos_amp * s + t.sin_amp * c);
                g += dr * er + dt * et;
            }
            return g;
        }
        case Kind::Closure:
            if (grad_) return grad_(x);
            {
                const double h = kGradStep * std::max(1.0, norm(x));
                return {(value_(x + Vec2{h, 0}) - value_(x - Vec2{h, 0})) / (2 * h),
                        (value_(x + Vec2{0, h}) - value_(x - Vec2{0, h})) / (2 * h)};
            }
    }
    return {};
}

Mat2 BulkData::hessian(Vec2 x) const {
    if (kind_ == Kind::Constant) return {};
    if (kind_ == Kind::Closure && hess_) return hess_(x);
    const double h = kHessStep * std::max(1.0, norm(x));
    const Vec2 gx = (grad(x + Vec2{h, 0}) - grad(x - Vec2{h, 0})) / (2 * h);
    const Vec2 gy = (grad(x + Vec2{0, h}) - grad(x - Vec2{0, h})) / (2 * h);
    const double off = 0.5 * (gx.y + gy.x);
    return {gx.x, off, off, gy.y};
}

double BulkData::laplacian(Vec2 x) const {
    if (kind_ == Kind::Modal) {
        const Vec2 q = x - center_;
        const double r = norm(q);
        const double th = std::atan2(q.y, q.x);
        double s = 0.0;
        for (const auto& t : terms_) {
            const int p = t.power;
            const int k = t.mode;
            const double coef = static_cast<double>(p * p - k * k);
            if (coef == 0.0) continue;
            s += coef * std::pow(r, p - 2) * (t.cos_amp * std::cos(k * th) + t.sin_amp * std::sin(k * th));
        }
        return s;
    }
    return hessian(x).trace();
}

std::vector<ModalTerm> BulkData::modal_terms() const {
    if (kind_ == Kind::Constant) return {{0, 0, constant_, 0.0}};
    DD_REQUIRE(kind_ == Kind::Modal, "data is not modal");
    return terms_;
}

bool BulkData::radial() const {
    if (kind_ == Kind::Constant) return true;
    if (kind_ != Kind::Modal) return false;
    for (const auto& t : terms_)
        if (t.mode != 0 && (t.cos_amp != 0.0 || t.sin_amp != 0.0)) return false;
    return true;
}

SurfaceData SurfaceData::constant(double c) {
    SurfaceData d;
    d.kind_ = Kind::Constant;
    d.constant_ = c;
    d.label_ = "const";
    return d;
}

SurfaceData SurfaceData::fourier(std::vector<FourierTerm> terms) {
    for (const auto& t : terms) DD_REQUIRE(t.mode >= 0, "Fourier modes must be non-negative");
    SurfaceData d = constant(0.0);
    d.kind_ = Kind::Fourier;
    d.terms_ = std::move(terms);
    d.label_ = "fourier";
    return d;
}

SurfaceData SurfaceData::closure(Fn value, Fn derivative, Fn second, std::string label) {
    DD_REQUIRE(static_cast<bool>(value), "closure needs a value function");
    SurfaceData d = constant(0.0);
    d.kind_ = Kind::Closure;
    d.f_ = std::move(value);
    d.d1_ = std::move(derivative);
    d.d2_ = std::move(second);
    d.label_ = std::move(label);
    return d;
}

double SurfaceData::value(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return constant_;
        case Kind::Fourier: {
            double s = 0.0;
            for (const auto& m : terms_) s += m.cos_amp * std::cos(m.mode * t) + m.sin_amp * std::sin(m.mode * t);
            return s;
        }
        case Kind::Closure:
            return f_(t);
    }
    return 0.0;
}

double SurfaceData::derivative(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return 0.0;
        case Kind::Fourier: {
            double s = 0.0;
            for (const auto& m : terms_) s += m.mode * (-m.cos_amp * std::sin(m.mode * t) + m.sin_amp * std::cos(m.mode * t));
            return s;
        }
        case Kind::Closure:
            if (d1_) return d1_(t);
            return (f_(t + kGradStep) - f_(t - kGradStep)) / (2 * kGradStep);
    }
    return 0.0;
}

double SurfaceData::second_derivative(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return 0.0;
        case Kind::Fourier: {
            double s = 0.0;
            for (const auto& m : terms_)
                s -= m.mode * m.mode * (m.cos_amp * std::cos(m.mode * t) + m.sin_amp * std::sin(m.mode * t));
            return s;
        }
        case Kind::Closure:
            if (d2_) return d2_(t);
            return (derivative(t + kHessStep) - derivative(t - kHessStep)) / (2 * kHessStep);
    }
    return 0.0;
}

std::vector<FourierTerm> SurfaceData::fourier_terms() const {
    if (kind_ == Kind::Constant) return {{0, constant_, 0.0}};
    DD_REQUIRE(kind_ == Kind::Fourier, "data is not a Fourier series");
    return terms_;
}

double SurfaceData::mean(const SignedGeometry& geom) const {
    if (kind_ == Kind::Constant) return constant_;
    const SurfaceRule rule = surface_rule(geom, 512);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        num += rule.nodes[i].weight * value(rule.parameters[i]);
        den += rule.nodes[i].weight;
    }
    return num / den;
}

MatrixData MatrixData::constant(Mat2 m) {
    MatrixData d;
    d.isotropic_ = m.xy == 0.0 && m.yx == 0.0 && m.xx == m.yy;
    d.m_ = m;
    d.alpha_ = BulkData::constant(m.xx);
    return d;
}

MatrixData MatrixData::isotropic(BulkData alpha) {
    MatrixData d;
    d.isotropic_ = true;
    if (alpha.is_constant()) d.m_ = Mat2::identity(alpha.constant_value());
    d.alpha_ = std::move(alpha);
    return d;
}

Mat2 MatrixData::value(Vec2 x) const {
    if (isotropic_ && !alpha_.is_constant()) return Mat2::identity(alpha_.value(x));
    return m_;
}

bool MatrixData::is_constant() const { return !isotropic_ || alpha_.is_constant(); }

double min_eigenvalue(const Mat2& m) {
    const double a = m.xx;
    const double d = m.yy;
    const double b = 0.5 * (m.xy + m.yx);
    const double mid = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    return mid - rad;
}

}  // namespace dd
