#pragma once

#include <cmath>

namespace comblab {

/// A point (or vector) of the R^3 chart.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr bool operator==(const Point3&, const Point3&) = default;

    constexpr Point3& operator+=(const Point3& o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Point3& operator-=(const Point3& o)
    {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Point3& operator*=(double s)
    {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }
};

constexpr Point3 operator+(Point3 a, const Point3& b) { return a += b; }
constexpr Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
constexpr Point3 operator*(Point3 a, double s) { return a *= s; }
constexpr Point3 operator*(double s, Point3 a) { return a *= s; }

constexpr double dot(const Point3& a, const Point3& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Point3& p) { return std::hypot(p.x, p.y, p.z); }

inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline bool is_finite(const Point3& p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Multiplies every coordinate by 2^e. Exact in binary floating point
/// barring overflow or underflow.
inline Point3 scale_pow2(const Point3& p, int e)
{
    return {std::ldexp(p.x, e), std::ldexp(p.y, e), std::ldexp(p.z, e)};
}

} // namespace comblab
