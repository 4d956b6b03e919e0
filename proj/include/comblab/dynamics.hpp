#pragma once

// The map f = T1 o phi1, orbits, the auxiliary line map g and the
// numerical probes built on them.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "flow.hpp"

namespace comblab {

struct Classification {
    enum class Verdict { converges_to_origin, escapes, undecided };
    Verdict verdict = Verdict::undecided;
    /// First step at which the escape predicate fired; -1 unless escapes.
    int escape_step = -1;

    static Classification converges() { return {Verdict::converges_to_origin, -1}; }
    static Classification escaped(int step) { return {Verdict::escapes, step}; }
    static Classification undecided() { return {}; }

    friend bool operator==(const Classification&, const Classification&) = default;
};

inline const char* to_string(Classification::Verdict v)
{
    switch (v) {
    case Classification::Verdict::converges_to_origin:
        return "converges";
    case Classification::Verdict::escapes:
        return "escapes";
    case Classification::Verdict::undecided:
        return "undecided";
    }
    return "?";
}

struct ProbeParams {
    int max_iters = 200;
    double escape_radius = 10.0;
    double converge_radius = 1e-6;
    /// Separation threshold c of the expansivity probe.
    double separation_constant = 0.1;

    void validate() const
    {
        if (max_iters < 1 || !(escape_radius > 2.0) ||
            !(converge_radius > 0.0 && converge_radius < 1.0) || !(separation_constant > 0.0)) {
            throw std::invalid_argument("ProbeParams: need N >= 1, R > 2, 0 < delta < 1, c > 0");
        }
    }
};

struct OrbitRecord {
    Point3 start;
    std::vector<Point3> points;
    Classification classification;
};

inline Point3 f_map(const Point3& p, const Model& model) { return t1(phi1(p, model)); }
inline Point3 f_inv(const Point3& p, const Model& model) { return phi1_inv(t1_inv(p), model); }

namespace detail {

inline Classification judge(const std::vector<Point3>& points, const ProbeParams& probe)
{
    const std::size_t steps = points.size() - 1;
    if (!(norm(points.back()) < probe.converge_radius)) {
        return Classification::undecided();
    }
    const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(probe.max_iters) / 4);
    if (steps < tail) {
        return Classification::undecided();
    }
    for (std::size_t i = points.size() - tail; i < points.size(); ++i) {
        if (norm(points[i]) > norm(points[i - 1])) {
            return Classification::undecided();
        }
    }
    return Classification::converges();
}

} // namespace detail

/// Up to |n| steps of f (f^-1 when n < 0). Stops at the first step whose
/// norm exceeds max(R, |p|); convergence is judged at the end of the run.
inline OrbitRecord iterate(const Point3& p, int n, const ProbeParams& probe, const Model& model)
{
    if (std::abs(n) > probe.max_iters) {
        throw std::invalid_argument("iterate: |n| exceeds max_iters");
    }
    const double threshold = std::max(probe.escape_radius, norm(p));
    OrbitRecord rec{p, {p}, Classification::undecided()};
    rec.points.reserve(static_cast<std::size_t>(std::abs(n)) + 1);
    Point3 cur = p;
    for (int k = 1; k <= std::abs(n); ++k) {
        cur = n > 0 ? f_map(cur, model) : f_inv(cur, model);
        rec.points.push_back(cur);
        if (norm(cur) > threshold) {
            rec.classification = Classification::escaped(k);
            return rec;
        }
    }
    rec.classification = detail::judge(rec.points, probe);
    return rec;
}

inline Classification classify_stable(const Point3& p, const ProbeParams& probe, const Model& model)
{
    return iterate(p, probe.max_iters, probe, model).classification;
}

/// y-coordinate of T2^-1 f(a0, y, 0); f maps the line {(a0, s, 0)} onto its
/// T2-image, so x and z must come back unchanged.
inline double g_map(double a0, double y, const Model& model)
{
    if (!(y >= 0.0)) {
        throw std::invalid_argument("g_map: y must be >= 0");
    }
    const Point3 img = t2_inv(f_map({a0, y, 0.0}, model));
    if (std::abs(img.x - a0) > 1e-12 * std::max(1.0, std::abs(a0)) || img.z != 0.0) {
        throw AssertionFailure("g_map: image left the line x = " + std::to_string(a0));
    }
    return img.y;
}

inline double check_commutation(const Point3& p, const Model& model)
{
    return distance(f_map(t2(p), model), t2(f_map(p, model)));
}

/// (g^n(b0), y-coordinate of T2^-n(f^n(a0, b0, 0))). With T2 = halving, the
/// orbit point sits in B_n and its rescaled height is 2^n b_n.
inline std::pair<double, double> g_orbit_identity(double a0, double b0, int n, const Model& model)
{
    if (n < 1 || !(b0 > 0.0)) {
        throw std::invalid_argument("g_orbit_identity: need n >= 1 and b0 > 0");
    }
    double g = b0;
    Point3 orbit{a0, b0, 0.0};
    for (int i = 0; i < n; ++i) {
        g = g_map(a0, g, model);
        orbit = f_map(orbit, model);
    }
    return {g, std::ldexp(orbit.y, n)};
}

/// Smallest |n| <= N with |f^n(p) - f^n(q)| > c, scanning 0, +1, -1, +2, ...
inline std::optional<int> separation_time(const Point3& p, const Point3& q, const ProbeParams& probe,
                                          const Model& model)
{
    const double c = probe.separation_constant;
    if (distance(p, q) > c) {
        return 0;
    }
    Point3 fp = p, fq = q, bp = p, bq = q;
    for (int m = 1; m <= probe.max_iters; ++m) {
        fp = f_map(fp, model);
        fq = f_map(fq, model);
        if (distance(fp, fq) > c) {
            return m;
        }
        bp = f_inv(bp, model);
        bq = f_inv(bq, model);
        if (distance(bp, bq) > c) {
            return -m;
        }
    }
    return std::nullopt;
}

} // namespace comblab
