#pragma once

// Connected components of a truncated comb inside a closed ball, used as a
// witness that the comb is not locally connected at its limit tooth.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace comblab {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), sets_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t i)
    {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    void unite(std::size_t i, std::size_t j)
    {
        i = find(i);
        j = find(j);
        if (i != j) {
            parent_[i] = j;
            --sets_;
        }
    }

    std::size_t num_sets() const { return sets_; }

private:
    std::vector<std::size_t> parent_;
    std::size_t sets_;
};

/// Parameter interval [t0, t1] of s.a + t (s.b - s.a) inside the closed ball,
/// or empty.
inline std::optional<std::pair<double, double>> clip_to_ball(const Segment3& s, const Point3& center,
                                                             double radius)
{
    const Point3 d = s.b - s.a;
    const Point3 m = s.a - center;
    const double a = dot(d, d);
    const double b = dot(d, m);
    const double c = dot(m, m) - radius * radius;
    const double disc = b * b - a * c;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    const double t0 = std::max(0.0, (-b - root) / a);
    const double t1 = std::min(1.0, (-b + root) / a);
    if (t0 > t1) {
        return std::nullopt;
    }
    return std::pair{t0, t1};
}

/// Squared distance between segments [p1,q1] and [p2,q2]; either may be a
/// single point.
inline double segment_distance2(const Point3& p1, const Point3& q1, const Point3& p2, const Point3& q2)
{
    const Point3 d1 = q1 - p1;
    const Point3 d2 = q2 - p2;
    const Point3 r = p1 - p2;
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0;
    double t = 0.0;
    if (a == 0.0 && e == 0.0) {
        return dot(r, r);
    }
    if (a == 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e == 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    const Point3 gap = (p1 + d1 * s) - (p2 + d2 * t);
    return dot(gap, gap);
}

/// Number of connected components of comb_segments(params, K) intersected
/// with the closed ball of radius delta around center. Each segment gives at
/// most one arc; arcs that touch are merged.
inline int component_count(const Point3& center, double delta, int K, const CombParams& params)
{
    if (!(delta > 0.0)) {
        throw std::invalid_argument("component_count: delta must be > 0");
    }
    const std::vector<Segment3> segs = comb_segments(params, K);

    struct Arc {
        Point3 from;
        Point3 to;
    };
    std::vector<Arc> arcs;
    for (const Segment3& s : segs) {
        if (const auto clip = clip_to_ball(s, center, delta)) {
            const Point3 d = s.b - s.a;
            arcs.push_back({s.a + d * clip->first, s.a + d * clip->second});
        }
    }

    const double eps = 1e-12 * (1.0 + norm(center) + delta);
    UnionFind uf(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        for (std::size_t j = i + 1; j < arcs.size(); ++j) {
            if (segment_distance2(arcs[i].from, arcs[i].to, arcs[j].from, arcs[j].to) <= eps * eps) {
                uf.unite(i, j);
            }
        }
    }
    return static_cast<int>(uf.num_sets());
}

} // namespace comblab
