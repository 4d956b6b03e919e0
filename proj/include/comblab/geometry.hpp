#pragma once

// Geometry of the comb construction: the dyadic scalings, the ball family
// B_n = T2^n(B), the comb continuum E with its scaled copies E_k, and the
// set W = (union of all E_k) + (x-axis).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "point3.hpp"

namespace comblab {

/// Radius of the base ball and the tolerances used by membership tests.
class CombParams {
public:
    explicit CombParams(double r = 0.4, double match_tol = 1e-12, double geom_tol = 1e-9)
        : r_(r), match_tol_(match_tol), geom_tol_(geom_tol)
    {
        if (!(r > 0.0 && r < 0.5)) {
            throw std::invalid_argument("CombParams: r must lie in (0, 1/2), got " + std::to_string(r));
        }
        if (!(match_tol > 0.0 && match_tol < r / 100.0)) {
            throw std::invalid_argument("CombParams: match_tol must lie in (0, r/100)");
        }
        if (!(geom_tol > 0.0 && geom_tol < r / 100.0)) {
            throw std::invalid_argument("CombParams: geom_tol must lie in (0, r/100)");
        }
    }

    double r() const { return r_; }
    double match_tol() const { return match_tol_; }
    double geom_tol() const { return geom_tol_; }

    /// Abscissa of the limit tooth, which is also the left end of the spine.
    double spine_left() const { return 1.5 - r_ / 2.0; }
    double spine_right() const { return tooth_abscissa(1.0); }
    /// Teeth of E span y in [0, tooth_height()].
    double tooth_height() const { return r_ / 2.0; }
    /// Abscissa of tooth k >= 1 of E. Every caller goes through here so that
    /// equal k always yields a bit-identical abscissa.
    double tooth_abscissa(double k) const { return spine_left() + r_ / k; }

private:
    double r_;
    double match_tol_;
    double geom_tol_;
};

/// Level n of E_k = T2^k(E).
struct CombLevel {
    int k = 0;
};

struct BallSpec {
    int level = 0;
    Point3 center;
    double radius = 0.0;
};

struct Segment3 {
    Point3 a;
    Point3 b;

    Segment3(const Point3& a_, const Point3& b_) : a(a_), b(b_)
    {
        if (a == b) {
            throw std::invalid_argument("Segment3: degenerate segment");
        }
    }
};

constexpr Point3 t2(const Point3& p) { return {p.x / 2.0, p.y / 2.0, p.z / 2.0}; }
constexpr Point3 t2_inv(const Point3& p) { return {2.0 * p.x, 2.0 * p.y, 2.0 * p.z}; }
constexpr Point3 t1(const Point3& p) { return {p.x / 2.0, 2.0 * p.y, 2.0 * p.z}; }
constexpr Point3 t1_inv(const Point3& p) { return {2.0 * p.x, p.y / 2.0, p.z / 2.0}; }

/// T2^n applied to p (n may be negative).
inline Point3 t2_pow(const Point3& p, int n) { return scale_pow2(p, -n); }

inline BallSpec ball(int n, const CombParams& params)
{
    return {n, {std::ldexp(1.5, -n), 0.0, 0.0}, std::ldexp(params.r(), -n)};
}

/// Closed-ball test for B_n. Squared distances keep the test exactly
/// covariant under the dyadic rescaling p -> T2^k p.
inline bool in_ball(const Point3& p, int n, const CombParams& params)
{
    const BallSpec b = ball(n, params);
    const double dx = p.x - b.center.x;
    return dx * dx + p.y * p.y + p.z * p.z <= b.radius * b.radius;
}

/// The unique n with p in B_n, if any. The balls are pairwise disjoint
/// because r < 1/2.
inline std::optional<int> ball_index(const Point3& p, const CombParams& params)
{
    if (!(p.x > 0.0)) {
        return std::nullopt;
    }
    const double guess = std::round(std::log2(1.5 / p.x));
    if (!std::isfinite(guess) || std::abs(guess) > 1070.0) {
        return std::nullopt;
    }
    const int n = static_cast<int>(guess);
    for (int cand : {n, n - 1, n + 1}) {
        if (in_ball(p, cand, params)) {
            return cand;
        }
    }
    return std::nullopt;
}

/// Spine, limit tooth, then teeth 1..K of E (level 0). A finite truncation
/// of the infinite comb; the analytic queries below never use it.
inline std::vector<Segment3> comb_segments(const CombParams& params, int K)
{
    if (K < 1) {
        throw std::invalid_argument("comb_segments: K must be >= 1");
    }
    const double h = params.tooth_height();
    std::vector<Segment3> segs;
    segs.reserve(static_cast<std::size_t>(K) + 2);
    segs.emplace_back(Point3{params.spine_left(), 0.0, 0.0}, Point3{params.spine_right(), 0.0, 0.0});
    segs.emplace_back(Point3{params.spine_left(), 0.0, 0.0}, Point3{params.spine_left(), h, 0.0});
    for (int k = 1; k <= K; ++k) {
        const double a = params.tooth_abscissa(k);
        segs.emplace_back(Point3{a, 0.0, 0.0}, Point3{a, h, 0.0});
    }
    return segs;
}

namespace detail {

// Squared distance from q to the level-0 comb E.
inline double comb_dist2_level0(const Point3& q, const CombParams& params)
{
    const double x0 = params.spine_left();
    const double x1 = params.spine_right();
    const double h = params.tooth_height();
    const double z2 = q.z * q.z;

    const double dxs = std::max({x0 - q.x, 0.0, q.x - x1});
    double best = dxs * dxs + q.y * q.y + z2;

    // All teeth share the y-range [0, h], so only the abscissa decides which
    // tooth is nearest.
    const double dy = q.y < 0.0 ? -q.y : (q.y > h ? q.y - h : 0.0);
    const double vert = dy * dy + z2;
    auto tooth = [&](double a) {
        const double dx = q.x - a;
        best = std::min(best, dx * dx + vert);
    };

    tooth(x0);
    const double u = q.x - x0;
    if (u > 0.0) {
        // u lies between r/(m+1) and r/m for m = floor(r/u); rounding can
        // shift m by one, hence the three candidates.
        const double m = std::floor(params.r() / u);
        if (m < 1e15) {
            for (double k : {m - 1.0, m, m + 1.0}) {
                if (k >= 1.0) {
                    tooth(params.tooth_abscissa(k));
                }
            }
        }
    }
    return best;
}

} // namespace detail

/// Exact distance from p to the infinite comb E_k.
inline double dist_to_comb(const Point3& p, CombLevel level, const CombParams& params)
{
    const Point3 q = scale_pow2(p, level.k);
    return std::ldexp(std::sqrt(detail::comb_dist2_level0(q, params)), -level.k);
}

/// Membership in W up to geom_tol (scaled by 2^-k at level k).
inline bool in_w_tilde(const Point3& p, const CombParams& params)
{
    const double tol = params.geom_tol();
    if (std::abs(p.y) <= tol && std::abs(p.z) <= tol) {
        return true;
    }
    const auto n = ball_index(p, params);
    if (!n) {
        return false;
    }
    return dist_to_comb(p, CombLevel{*n}, params) <= std::ldexp(tol, -*n);
}

/// Exact distance from p to W. Levels are scanned outward from B_0 until
/// the ball bound proves no further level can be closer.
inline double dist_to_w_tilde(const Point3& p, const CombParams& params)
{
    double best = std::hypot(p.y, p.z);
    const double pn = norm(p);
    const double r = params.r();
    auto visit = [&](int k) {
        const BallSpec b = ball(k, params);
        if (distance(p, b.center) - b.radius < best) {
            best = std::min(best, dist_to_comb(p, CombLevel{k}, params));
        }
    };
    for (int k = 0; k < 1100; ++k) {
        // B_k lies inside the origin ball of radius (3/2 + r) 2^-k.
        if (pn - std::ldexp(1.5 + r, -k) >= best) {
            break;
        }
        visit(k);
    }
    for (int k = -1; k > -1000; --k) {
        if (std::ldexp(1.5 - r, -k) - pn >= best) {
            break;
        }
        visit(k);
    }
    return best;
}

/// Sup of s >= 0 with (a0, s, 0) in W: the height of the tooth of E_k whose
/// abscissa matches a0 to relative match_tol, or 0 when no tooth does.
inline double y_ceiling(double a0, const CombParams& params)
{
    if (!(a0 > 0.0)) {
        return 0.0;
    }
    const double guess = std::round(std::log2(1.5 / a0));
    if (!std::isfinite(guess) || std::abs(guess) > 1070.0) {
        return 0.0;
    }
    const double tol = params.match_tol();
    auto matches = [tol](double u, double a) { return std::abs(u - a) <= tol * std::abs(a); };

    const double x0 = params.spine_left();
    const int n = static_cast<int>(guess);
    for (int k : {n, n - 1, n + 1}) {
        const double u = std::ldexp(a0, k);
        if (matches(u, x0)) {
            return std::ldexp(params.tooth_height(), -k);
        }
        if (u > x0) {
            const double j = std::round(params.r() / (u - x0));
            if (j > 1e15) {
                continue;
            }
            for (double cand : {j, j - 1.0, j + 1.0}) {
                if (cand >= 1.0 && matches(u, params.tooth_abscissa(cand))) {
                    return std::ldexp(params.tooth_height(), -k);
                }
            }
        }
    }
    return 0.0;
}

} // namespace comblab
