#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dd/geometry.hpp"
#include "dd/vec2.hpp"

namespace dd {

/// One term c r^p cos(k theta) + s r^p sin(k theta) in polar coordinates about a centre.
struct ModalTerm {
    int power{0};
    int mode{0};
    double cos_amp{0};
    double sin_amp{0};
};

/**
 * Scalar data on the box: constant, modal (polynomial radial times Fourier),
 * or an arbitrary closure. Gradients and Hessians fall back to central
 * differences when no closed form is supplied.
 */
class BulkData {
  public:
    using ValueFn = std::function<double(Vec2)>;
    using GradFn = std::function<Vec2(Vec2)>;
    using HessFn = std::function<Mat2(Vec2)>;

    /// The zero constant.
    BulkData() = default;
    static BulkData constant(double c);
    static BulkData modal(std::vector<ModalTerm> terms, Vec2 center = {});
    static BulkData closure(ValueFn value, GradFn grad = {}, HessFn hessian = {}, std::string label = "closure");

    double value(Vec2 x) const;
    Vec2 grad(Vec2 x) const;
    Mat2 hessian(Vec2 x) const;
    double laplacian(Vec2 x) const;

    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return constant_; }
    bool is_modal() const { return kind_ == Kind::Modal || kind_ == Kind::Constant; }
    /// Modal terms; a constant reports a single (0, 0) term.
    std::vector<ModalTerm> modal_terms() const;
    Vec2 modal_center() const { return center_; }
    /// True when the field depends on |x - center| only.
    bool radial() const;
    bool has_exact_grad() const { return kind_ != Kind::Closure || static_cast<bool>(grad_); }
    const std::string& label() const { return label_; }

  private:
    enum class Kind { Constant, Modal, Closure };
    Kind kind_{Kind::Constant};
    double constant_{0};
    std::vector<ModalTerm> terms_;
    Vec2 center_;
    ValueFn value_;
    GradFn grad_;
    HessFn hess_;
    std::string label_{"const"};
};

/// One term c cos(k t) + s sin(k t) in the curve parameter t.
struct FourierTerm {
    int mode{0};
    double cos_amp{0};
    double sin_amp{0};
};

/// Data on the curve as a function of its parameter t in [0, 2 pi).
class SurfaceData {
  public:
    using Fn = std::function<double(double)>;

    /// The zero constant.
    SurfaceData() = default;
    static SurfaceData constant(double c);
    static SurfaceData fourier(std::vector<FourierTerm> terms);
    /// Without `derivative` the data has no tangential-gradient closure.
    static SurfaceData closure(Fn value, Fn derivative = {}, Fn second = {}, std::string label = "closure");

    double value(double t) const;
    /// d/dt; central differences for closures that supply none.
    double derivative(double t) const;
    double second_derivative(double t) const;
    bool has_derivative() const { return kind_ != Kind::Closure || static_cast<bool>(d1_); }

    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return constant_; }
    bool is_fourier() const { return kind_ != Kind::Closure; }
    std::vector<FourierTerm> fourier_terms() const;
    const std::string& label() const { return label_; }

    /// Arclength mean over the curve; exact for constants.
    double mean(const SignedGeometry& geom) const;

  private:
    enum class Kind { Constant, Fourier, Closure };
    Kind kind_{Kind::Constant};
    double constant_{0};
    std::vector<FourierTerm> terms_;
    Fn f_;
    Fn d1_;
    Fn d2_;
    std::string label_{"const"};
};

/// 2x2 coefficient field: a constant matrix or a scalar field times the identity.
class MatrixData {
  public:
    /// The identity.
    MatrixData() = default;
    static MatrixData identity() { return constant(Mat2::identity()); }
    static MatrixData constant(Mat2 m);
    static MatrixData isotropic(BulkData alpha);

    Mat2 value(Vec2 x) const;
    bool is_constant() const;
    bool is_isotropic() const { return isotropic_; }
    /// Scalar multiplier of the identity; valid only when is_isotropic().
    const BulkData& scalar() const { return alpha_; }
    Mat2 constant_value() const { return m_; }
    bool symmetric() const { return isotropic_ || m_.xy == m_.yx; }

  private:
    bool isotropic_{true};
    Mat2 m_{Mat2::identity()};
    BulkData alpha_{BulkData::constant(1.0)};
};

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Mat2& m);

}  // namespace dd
