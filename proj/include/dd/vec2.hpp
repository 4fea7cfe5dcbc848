#pragma once

#include <cmath>

namespace dd {

/// Point or vector in the plane.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise rotation by a quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// 2x2 matrix, row-major.
struct Mat2 {
    double xx{0.0};
    double xy{0.0};
    double yx{0.0};
    double yy{0.0};

    static constexpr Mat2 identity(double s = 1.0) { return {s, 0.0, 0.0, s}; }
    static constexpr Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

    constexpr Mat2& operator+=(const Mat2& o) { xx += o.xx; xy += o.xy; yx += o.yx; yy += o.yy; return *this; }
    constexpr double trace() const { return xx + yy; }
    constexpr Mat2 transposed() const { return {xx, yx, xy, yy}; }
};

constexpr Mat2 operator+(Mat2 a, const Mat2& b) { a += b; return a; }
constexpr Mat2 operator-(const Mat2& a, const Mat2& b) { return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy}; }
constexpr Mat2 operator*(double s, const Mat2& a) { return {s * a.xx, s * a.xy, s * a.yx, s * a.yy}; }
constexpr Vec2 operator*(const Mat2& m, Vec2 v) { return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y}; }
/// Frobenius product A : B.
constexpr double contract(const Mat2& a, const Mat2& b) { return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy; }

}  // namespace dd
