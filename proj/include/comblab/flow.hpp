#pragma once

// The bump function rho, the vertical vector field X and its flow.
//
// X only has a y-component and commutes with T2, so the flow of a point in
// B_n is computed on the level-0 copy of its vertical line and scaled back.
// x and z are never touched.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "geometry.hpp"
#include "integrator.hpp"

namespace comblab {

/// Profile psi : [0,1] -> [0,1], strictly decreasing, psi(0) = 1, psi(1) = 0.
struct BumpProfile {
    enum class Kind { smoothstep_complement };
    Kind kind = Kind::smoothstep_complement;

    double operator()(double s) const
    {
        switch (kind) {
        case Kind::smoothstep_complement:
            break;
        }
        return 1.0 - s * s * (3.0 - 2.0 * s);
    }
};

/// Everything the flow and the map f depend on.
struct Model {
    CombParams comb = CombParams();
    FlowConfig flow;
    BumpProfile profile;
    /// Use y * 4^-t for forward flow from points within geom_tol of the comb,
    /// where rho is 1 along the whole forward trajectory.
    bool comb_fast_path = true;
};

inline constexpr double ln4 = 2.0 * std::numbers::ln2;
inline constexpr double max_flow_time = 1e6;

/// rho on the base ball B: 1 exactly on E, 0 exactly on the sphere.
inline double rho(const Point3& p, const CombParams& params, const BumpProfile& profile)
{
    if (!in_ball(p, 0, params)) {
        throw std::invalid_argument("rho: point outside the base ball");
    }
    const double d_comb = dist_to_comb(p, CombLevel{0}, params);
    if (d_comb == 0.0) {
        return 1.0;
    }
    const double d_sphere = std::max(0.0, params.r() - distance(p, ball(0, params).center));
    if (d_sphere == 0.0) {
        return 0.0;
    }
    return profile(d_comb / (d_comb + d_sphere));
}

namespace detail {

// y-velocity on the level-0 vertical line through q.
inline double field_y_level0(const Point3& q, const CombParams& params, const BumpProfile& profile)
{
    if (!in_ball(q, 0, params)) {
        return 0.0;
    }
    return -rho(q, params, profile) * q.y * ln4;
}

inline double flow_y_level0(const Point3& q, double t, const Model& model)
{
    if (model.comb_fast_path && t > 0.0 &&
        dist_to_comb(q, CombLevel{0}, model.comb) <= model.comb.geom_tol()) {
        // Forward in time |y| only shrinks, so the trajectory stays near E.
        return q.y * std::exp2(-2.0 * t);
    }
    auto rhs = [&](double y) {
        return field_y_level0({q.x, y, q.z}, model.comb, model.profile);
    };
    return integrate_scalar(rhs, q.y, t, model.flow);
}

} // namespace detail

inline Point3 vector_field(const Point3& p, const CombParams& params, const BumpProfile& profile)
{
    const auto n = ball_index(p, params);
    if (!n) {
        return {};
    }
    const Point3 q = scale_pow2(p, *n);
    return {0.0, -rho(q, params, profile) * p.y * ln4, 0.0};
}

/// phi_t(p). Points outside every B_n are zeros of X, and the interior of
/// each ball is invariant, so trajectories never change level.
inline Point3 flow(const Point3& p, double t, const Model& model)
{
    if (!(std::abs(t) <= max_flow_time)) {
        throw std::invalid_argument("flow: |t| must not exceed 1e6");
    }
    if (t == 0.0 || p.y == 0.0) {
        return p;
    }
    const auto n = ball_index(p, model.comb);
    if (!n) {
        return p;
    }
    const Point3 q = scale_pow2(p, *n);
    const double y = detail::flow_y_level0(q, t, model);
    return {p.x, std::ldexp(y, -*n), p.z};
}

inline Point3 phi1(const Point3& p, const Model& model) { return flow(p, 1.0, model); }
inline Point3 phi1_inv(const Point3& p, const Model& model) { return flow(p, -1.0, model); }

/// Central difference of phi1 in the y-direction. The divisor is the
/// representable spacing of the two probes, so the identity map gives
/// exactly (0, 1, 0).
inline Point3 fd_partial_y_phi1(const Point3& p, double h, const Model& model)
{
    if (!(h >= 1e-9 && h <= 1e-3)) {
        throw std::invalid_argument("fd_partial_y_phi1: h must lie in [1e-9, 1e-3]");
    }
    const Point3 up{p.x, p.y + h, p.z};
    const Point3 down{p.x, p.y - h, p.z};
    const double spacing = up.y - down.y;
    const Point3 diff = phi1(up, model) - phi1(down, model);
    return {diff.x / spacing, diff.y / spacing, diff.z / spacing};
}

} // namespace comblab
