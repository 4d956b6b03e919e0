#pragma once

// Deterministic sample families on and off W.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "../geometry.hpp"
#include "sampling.hpp"

namespace comblab::experiments {

struct WSample {
    Point3 p;
    std::string kind;  // tooth | limit | spine | axis
    int level = 0;     // comb level; 0 for axis samples
    long tooth = 0;    // tooth index, 0 unless kind == tooth
};

/// A point of W. Comb samples are drawn on levels -2..6; axis samples on
/// x in [-8, 8].
inline WSample sample_on_w(const SampleStream& rng, std::uint64_t index, const CombParams& params)
{
    const double h = params.tooth_height();
    const int level = static_cast<int>(rng.integer(index, 0, -2, 6));
    const double y = rng.uniform(index, 1) * h;
    WSample s;
    switch (index % 4) {
    case 0: {
        // log-uniform tooth index so the accumulation region is well covered
        const double j = std::floor(std::exp(rng.uniform(index, 2) * std::log(1e6)));
        s.tooth = static_cast<long>(std::max(1.0, j));
        s.kind = "tooth";
        s.level = level;
        s.p = scale_pow2({params.tooth_abscissa(static_cast<double>(s.tooth)), y, 0.0}, -level);
        break;
    }
    case 1:
        s.kind = "limit";
        s.level = level;
        s.p = scale_pow2({params.spine_left(), y, 0.0}, -level);
        break;
    case 2:
        s.kind = "spine";
        s.level = level;
        s.p = scale_pow2({params.spine_left() + rng.uniform(index, 2) * params.r(), 0.0, 0.0}, -level);
        break;
    default:
        s.kind = "axis";
        s.p = {rng.uniform(index, 2, -8.0, 8.0), 0.0, 0.0};
        break;
    }
    return s;
}

inline Point3 sample_in_ball(const SampleStream& rng, std::uint64_t index, std::uint64_t slot,
                             const BallSpec& b)
{
    // rejection from the bounding cube
    for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t s = slot + 3 * attempt;
        const Point3 u{rng.uniform(index, s, -1.0, 1.0), rng.uniform(index, s + 1, -1.0, 1.0),
                       rng.uniform(index, s + 2, -1.0, 1.0)};
        if (dot(u, u) <= 1.0) {
            return b.center + u * b.radius;
        }
    }
}

inline Point3 sample_unit_vector(const SampleStream& rng, std::uint64_t index, std::uint64_t slot)
{
    const double z = rng.uniform(index, slot, -1.0, 1.0);
    const double phi = rng.uniform(index, slot + 1, 0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

struct OffSample {
    Point3 p;
    std::string kind;  // anchor | cube | ball | displaced | plane
    double margin = 0.0;
    double dist = 0.0;
};

inline bool in_cube(const Point3& p, double half = 2.0)
{
    return std::abs(p.x) <= half && std::abs(p.y) <= half && std::abs(p.z) <= half;
}

namespace detail {

template <class Draw>
OffSample reject_until_far(const SampleStream& rng, std::uint64_t index, double margin,
                           const CombParams& params, Draw&& draw)
{
    constexpr std::uint64_t attempts = 200;
    for (std::uint64_t a = 0; a < 4 * attempts; ++a) {
        const std::uint64_t slot = 100 + 16 * a;
        Point3 p;
        std::string kind;
        if (a >= attempts) {
            kind = "cube";
            p = {rng.uniform(index, slot, -2.0, 2.0), rng.uniform(index, slot + 1, -2.0, 2.0),
                 rng.uniform(index, slot + 2, -2.0, 2.0)};
        } else {
            draw(a, slot, p, kind);
        }
        if (!in_cube(p)) {
            continue;
        }
        const double d = dist_to_w_tilde(p, params);
        if (d >= margin) {
            return {p, kind, margin, d};
        }
    }
    // Unreachable for margins well below the cube size.
    return {{0.0, 0.0, 2.0}, "cube", margin, 2.0};
}

} // namespace detail

/// A point of the cube [-2,2]^3 at distance >= margin from W. Index 0 is
/// the fixed anchor (0, 0, 1); the rest cycle through uniform cube points,
/// points in the balls B_0..B_3 and points pushed off W in a random direction.
inline OffSample sample_off_w(const SampleStream& rng, std::uint64_t index, double margin,
                              const CombParams& params)
{
    if (index == 0) {
        const Point3 p{0.0, 0.0, 1.0};
        return {p, "anchor", margin, dist_to_w_tilde(p, params)};
    }
    const std::uint64_t method = index % 3;
    return detail::reject_until_far(rng, index, margin, params,
                                    [&](std::uint64_t a, std::uint64_t slot, Point3& p, std::string& kind) {
        if (method == 0) {
            kind = "cube";
            p = {rng.uniform(index, slot, -2.0, 2.0), rng.uniform(index, slot + 1, -2.0, 2.0),
                 rng.uniform(index, slot + 2, -2.0, 2.0)};
        } else if (method == 1) {
            kind = "ball";
            p = sample_in_ball(rng, index, slot + 1, ball(static_cast<int>(rng.integer(index, slot, 0, 3)), params));
        } else {
            kind = "displaced";
            const WSample base = sample_on_w(rng, index * 1000 + a, params);
            const double len = margin * (1.0 + rng.uniform(index, slot));
            p = base.p + sample_unit_vector(rng, index, slot + 1) * len;
        }
    });
}

/// A point of the invariant plane z = 0 inside B_0..B_3 at distance >= margin
/// from W. Escape from this plane is much slower than from generic points,
/// since only the y-coordinate can grow.
inline OffSample sample_off_w_planar(const SampleStream& rng, std::uint64_t index, double margin,
                                     const CombParams& params)
{
    return detail::reject_until_far(rng, index, margin, params,
                                    [&](std::uint64_t, std::uint64_t slot, Point3& p, std::string& kind) {
        kind = "plane";
        const BallSpec b = ball(static_cast<int>(rng.integer(index, slot, 0, 3)), params);
        const double rad = b.radius * std::sqrt(rng.uniform(index, slot + 1));
        const double th = rng.uniform(index, slot + 2, 0.0, 2.0 * std::numbers::pi);
        p = {b.center.x + rad * std::cos(th), rad * std::sin(th), 0.0};
    });
}

} // namespace comblab::experiments
