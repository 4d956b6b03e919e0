#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "comblab/dynamics.hpp"

using namespace comblab;

namespace {

const Model model{};
const CombParams& cp = model.comb;
const double r = cp.r();
const ProbeParams probe{};

using V = Classification::Verdict;

} // namespace

TEST(FMap, AxisIsHalved)
{
    for (double x : {-3.0, 0.1, 7.0, -0.1, 1.5}) {
        EXPECT_EQ(f_map({x, 0, 0}, model), (Point3{x / 2, 0, 0}));
    }
}

TEST(FMap, OutsideBallsActsAsT1)
{
    EXPECT_EQ(f_map({5, 1, 1}, model), (Point3{2.5, 2, 2}));
}

TEST(FMap, MapsCombLevelOntoNext)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> tooth(0, 5000);
    for (int k = -2; k <= 6; ++k) {
        for (int i = 0; i < 100; ++i) {
            const int j = tooth(gen);
            const double a = j == 0 ? cp.spine_left() : cp.tooth_abscissa(j);
            const Point3 q = scale_pow2({a, u(gen) * cp.tooth_height(), 0}, -k);
            ASSERT_EQ(dist_to_comb(q, CombLevel{k}, cp), 0.0);
            const Point3 img = f_map(q, model);
            EXPECT_LE(dist_to_comb(img, CombLevel{k + 1}, cp), 1e-9 * std::ldexp(1.0, -k));
        }
    }
}

TEST(FMap, InverseConsistency)
{
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const Point3 p{u(gen), u(gen) * 0.3, u(gen) * 0.3};
        EXPECT_LE(distance(f_inv(f_map(p, model), model), p), 1e-8);
    }
}

TEST(Iterate, HalvingOnAxis)
{
    const OrbitRecord rec = iterate({4, 0, 0}, 3, probe, model);
    ASSERT_EQ(rec.points.size(), 4u);
    EXPECT_EQ(rec.points[0], (Point3{4, 0, 0}));
    EXPECT_EQ(rec.points[1], (Point3{2, 0, 0}));
    EXPECT_EQ(rec.points[2], (Point3{1, 0, 0}));
    EXPECT_EQ(rec.points[3], (Point3{0.5, 0, 0}));
    EXPECT_EQ(rec.start, (Point3{4, 0, 0}));
}

TEST(Iterate, VerticalDirectionEscapes)
{
    const OrbitRecord rec = iterate({0, 0, 1}, 50, probe, model);
    // first k with 2^k > 10
    EXPECT_EQ(rec.classification, Classification::escaped(4));
    EXPECT_EQ(rec.points.size(), 5u);
    EXPECT_EQ(rec.points.back(), (Point3{0, 0, 16}));
}

TEST(Iterate, OriginIsFixed)
{
    const OrbitRecord rec = iterate({0, 0, 0}, 20, probe, model);
    ASSERT_EQ(rec.points.size(), 21u);
    for (const auto& q : rec.points) {
        EXPECT_EQ(q, (Point3{0, 0, 0}));
    }
}

TEST(Iterate, BackwardAndRangeCheck)
{
    const OrbitRecord rec = iterate({1, 0, 0}, -3, probe, model);
    EXPECT_EQ(rec.points.back(), (Point3{8, 0, 0}));
    EXPECT_THROW(iterate({1, 0, 0}, probe.max_iters + 1, probe, model), std::invalid_argument);
}

TEST(Classify, Examples)
{
    const Point3 tooth = scale_pow2({cp.tooth_abscissa(3), 0.1, 0}, -2);
    EXPECT_EQ(classify_stable(tooth, probe, model).verdict, V::converges_to_origin);

    const double a0 = cp.spine_left();
    const double y0 = y_ceiling(a0, cp);
    EXPECT_EQ(classify_stable({a0, y0 + 0.01, 0}, probe, model).verdict, V::escapes);
    EXPECT_EQ(classify_stable({1.5, 0, 0.2}, probe, model).verdict, V::escapes);
    EXPECT_EQ(classify_stable({0, 0, 0}, probe, model).verdict, V::converges_to_origin);
    EXPECT_EQ(classify_stable({20, 0, 0}, probe, model).verdict, V::converges_to_origin);
    EXPECT_EQ(classify_stable({1.5, -0.05, 0}, probe, model).verdict, V::escapes);
}

TEST(Classify, ShortHorizonIsUndecided)
{
    ProbeParams shortp = probe;
    shortp.max_iters = 5;
    EXPECT_EQ(classify_stable({1.5, 0, 0}, shortp, model).verdict, V::undecided);
}

TEST(GMap, IdentityOnTooth)
{
    Model slow = model;
    slow.comb_fast_path = false;
    for (double a0 : {cp.spine_left(), cp.tooth_abscissa(1), cp.tooth_abscissa(6)}) {
        for (double y : {0.01, 0.1, r / 2}) {
            EXPECT_NEAR(g_map(a0, y, model), y, 1e-9);
            EXPECT_NEAR(g_map(a0, y, slow), y, 1e-9);
        }
    }
}

TEST(GMap, StrictlyIncreasingAboveCeiling)
{
    for (double a0 : {cp.spine_left(), cp.tooth_abscissa(2), 1.5 + r / 4, cp.spine_left() + r / 2.5}) {
        const double y0 = y_ceiling(a0, cp);
        const double top = std::sqrt(r * r - (a0 - 1.5) * (a0 - 1.5));
        for (int i = 1; i <= 40; ++i) {
            const double y = y0 + (top - y0) * i / 40.0;
            EXPECT_GT(g_map(a0, y, model), y) << "a0=" << a0 << " y=" << y;
        }
    }
}

TEST(GMap, QuadruplesAboveBall)
{
    EXPECT_EQ(g_map(cp.spine_left(), 0.5, model), 2.0);
    EXPECT_THROW(g_map(1.5, -0.1, model), std::invalid_argument);
}

TEST(GMap, IteratesLeaveTheBallWithoutStalling)
{
    const double a0 = cp.spine_left();
    const double top = std::sqrt(r * r - (a0 - 1.5) * (a0 - 1.5));
    double y = y_ceiling(a0, cp) + 0.01;
    int steps = 0;
    double prev_gain = 0.0;
    while (y <= top && steps < 1000) {
        const double next = g_map(a0, y, model);
        const double gain = next - y;
        ASSERT_GT(gain, 0.0);
        // the gain grows as the iterate moves away from the tooth top
        EXPECT_GE(gain, prev_gain * 0.999);
        prev_gain = gain;
        y = next;
        ++steps;
    }
    EXPECT_GT(y, top);
    EXPECT_LT(steps, 1000);
}

TEST(Commutation, Examples)
{
    EXPECT_EQ(check_commutation({0, 0, 0}, model), 0.0);
    EXPECT_LE(check_commutation({0.37, 0, 0}, model), 1e-15);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const Point3 p = Point3{1.5, 0, 0} + Point3{u(gen), u(gen), u(gen)} * (r * 0.6);
        EXPECT_LE(check_commutation(p, model), 1e-9);
    }
}

TEST(GOrbitIdentity, Examples)
{
    const auto [g, b] = g_orbit_identity(cp.spine_left(), r / 4, 5, model);
    EXPECT_NEAR(g, r / 4, 1e-9);
    EXPECT_NEAR(b, r / 4, 1e-9);

    const auto [g3, b3] = g_orbit_identity(1.5 + r / 4, 0.01, 3, model);
    EXPECT_NEAR(g3, b3, 1e-8 * 64);
    EXPECT_GT(g3, 0.01);

    const auto [g1, b1] = g_orbit_identity(1.62, 0.2, 1, model);
    EXPECT_NEAR(g1, b1, 1e-8 * 4);
    EXPECT_THROW(g_orbit_identity(1.5, 0.1, 0, model), std::invalid_argument);
    EXPECT_THROW(g_orbit_identity(1.5, 0.0, 2, model), std::invalid_argument);
}

TEST(SeparationTime, IdenticalPointsNeverSeparate)
{
    EXPECT_FALSE(separation_time({1.5, 0.1, 0}, {1.5, 0.1, 0}, probe, model).has_value());
}

TEST(SeparationTime, VerticalOffsetDoublesForward)
{
    ProbeParams p = probe;
    p.separation_constant = 0.1;
    // first n with 2^n * 0.001 > 0.1
    EXPECT_EQ(separation_time({0.3, 0, 0}, {0.3, 0, 0.001}, p, model), 7);
}

TEST(SeparationTime, ToothPointsSeparateBackward)
{
    ProbeParams p = probe;
    p.separation_constant = 0.1;
    const double a = cp.tooth_abscissa(1);
    const auto n = separation_time({a, 0.05, 0}, {a, 0.1, 0}, p, model);
    ASSERT_TRUE(n.has_value());
    EXPECT_LT(*n, 0);
}

TEST(SeparationTime, FarApartIsZero)
{
    EXPECT_EQ(separation_time({0, 0, 0}, {1, 0, 0}, probe, model), 0);
}

TEST(ProbeParams, Validation)
{
    EXPECT_NO_THROW(probe.validate());
    ProbeParams p = probe;
    p.escape_radius = 2.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = probe;
    p.converge_radius = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}
