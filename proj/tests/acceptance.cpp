// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Defaults throughout: r = 0.4, seed = 0.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "comblab/components.hpp"
#include "comblab/dynamics.hpp"
#include "comblab/experiments/samplers.hpp"
#include "comblab/experiments/sampling.hpp"

using namespace comblab;
using namespace comblab::experiments;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t seed = 0;

const Model model{};
const CombParams& cp = model.comb;
const ProbeParams probe{};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double ball_top(double a0)
{
    const double dx = a0 - 1.5;
    return std::sqrt(std::max(0.0, cp.r() * cp.r() - dx * dx));
}

Outcome a1_comb_levels()
{
    const SampleStream rng(seed, "acceptance/A1");
    Model slow = model;
    slow.comb_fast_path = false;
    double worst = 0.0, worst_slow = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const int k = -2 + static_cast<int>(i % 9);
        const double y = rng.uniform(i, 0) * cp.tooth_height();
        double a = 0.0;
        switch (i % 3) {
        case 0:
            a = cp.tooth_abscissa(std::max(1.0, std::floor(std::exp(rng.uniform(i, 1) * std::log(1e6)))));
            break;
        case 1:
            a = cp.spine_left();
            break;
        default:
            a = cp.tooth_abscissa(static_cast<double>(rng.integer(i, 1, 1, 20)));
            break;
        }
        const Point3 q = scale_pow2({a, y, 0.0}, -k);
        const double bound = std::ldexp(1e-9, -k);
        worst = std::max(worst, dist_to_comb(f_map(q, model), CombLevel{k + 1}, cp) / bound);
        worst_slow = std::max(worst_slow, dist_to_comb(f_map(q, slow), CombLevel{k + 1}, cp) / bound);
    }
    return {worst <= 1.0 && worst_slow <= 1.0, "max d/(1e-9*2^-k) = " + fmt("%.3g", worst) +
                                                   " (integrator only: " + fmt("%.3g", worst_slow) +
                                                   ") over 1000 samples"};
}

Outcome a2_axis()
{
    double worst = 0.0;
    for (double x : {-3.0, -0.1, 0.1, 7.0}) {
        worst = std::max(worst, distance(f_map({x, 0, 0}, model), {x / 2, 0, 0}));
    }
    return {worst <= 1e-15, "max defect = " + fmt("%.3g", worst)};
}

Outcome a3_g_gap()
{
    const double a0 = cp.spine_left();
    const double y0 = y_ceiling(a0, cp);
    const double top = ball_top(a0);
    Model slow = model;
    slow.comb_fast_path = false;
    double on_defect = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double y = y0 * i / 400.0;
        on_defect = std::max(on_defect, std::abs(g_map(a0, y, model) - y));
        on_defect = std::max(on_defect, std::abs(g_map(a0, y, slow) - y));
    }
    double min_gap = INFINITY;
    const double lo = y0 + 0.01;
    for (int i = 0; i <= 400; ++i) {
        const double y = lo + (top - lo) * i / 400.0;
        min_gap = std::min(min_gap, g_map(a0, y, model) - y);
    }
    return {on_defect <= 1e-9 && min_gap > 0.0,
            "max |g(y)-y| on (0,y0] = " + fmt("%.3g", on_defect) + ", min g(y)-y beyond = " + fmt("%.3g", min_gap)};
}

Outcome a4_alpha_bound()
{
    const SampleStream rng(seed, "acceptance/A4");
    const BallSpec b = ball(0, cp);
    int count = 0;
    double min_lower = INFINITY, min_upper = INFINITY;
    for (std::uint64_t i = 0; count < 1000; ++i) {
        Point3 p = sample_in_ball(rng, i, 0, b);
        p.y = std::abs(p.y);
        if (!(p.y > 0.0) || in_w_tilde(p, cp)) {
            continue;
        }
        ++count;
        const double y1 = phi1(p, model).y;
        // interior points off E have 0 < rho < 1, so both bounds are strict
        min_lower = std::min(min_lower, (y1 - p.y / 4) / p.y);
        min_upper = std::min(min_upper, (p.y - y1) / p.y);
    }
    return {min_lower > 0.0 && min_upper > 0.0,
            "min (y1 - y/4)/y = " + fmt("%.3g", min_lower) + ", min (y - y1)/y = " + fmt("%.3g", min_upper)};
}

Outcome a5_commutation()
{
    const SampleStream rng(seed, "acceptance/A5");
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        Point3 p;
        if (i % 2 == 0) {
            p = sample_in_ball(rng, i, 0, ball(static_cast<int>(rng.integer(i, 20, -2, 6)), cp));
        } else {
            p = {rng.uniform(i, 0, -2.0, 2.0), rng.uniform(i, 1, -2.0, 2.0), rng.uniform(i, 2, -2.0, 2.0)};
        }
        worst = std::max(worst, check_commutation(p, model));
    }
    return {worst <= 1e-8, "max defect = " + fmt("%.3g", worst) + " over 10000 points"};
}

Outcome a6_derivative()
{
    double tooth_dev = 0.0;
    for (int k = 1; k <= 6; ++k) {
        for (double a : {cp.spine_left(), cp.tooth_abscissa(1), cp.tooth_abscissa(2), cp.tooth_abscissa(3),
                         cp.tooth_abscissa(10)}) {
            const Point3 d = fd_partial_y_phi1({std::ldexp(a, -k), 0, 0}, 1e-6, model);
            tooth_dev = std::max(tooth_dev, std::abs(d.y - 0.25));
        }
    }
    const double origin_dev = std::abs(fd_partial_y_phi1({0, 0, 0}, 1e-6, model).y - 1.0);
    return {tooth_dev <= 1e-3 && origin_dev <= 1e-3,
            "max |d-0.25| at tooth bases = " + fmt("%.3g", tooth_dev) + ", |d-1| at origin = " + fmt("%.3g", origin_dev)};
}

Outcome a7_classifier()
{
    const SampleStream on_rng(seed, "acceptance/A7/on");
    const SampleStream off_rng(seed, "acceptance/A7/off");
    using V = Classification::Verdict;
    long on_ok = 0, off_ok = 0, undecided = 0, off_far = 0, on_total = 0;
    long off_total = 0;
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const Point3 p = sample_on_w(on_rng, i, cp).p;
        if (!in_w_tilde(p, cp)) {
            continue;
        }
        ++on_total;
        const V v = classify_stable(p, probe, model).verdict;
        on_ok += v == V::converges_to_origin ? 1 : 0;
        undecided += v == V::undecided ? 1 : 0;
    }
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const OffSample s = sample_off_w(off_rng, i, 0.01, cp);
        ++off_total;
        off_far += s.dist >= 0.01 ? 1 : 0;
        const V v = classify_stable(s.p, probe, model).verdict;
        off_ok += v == V::escapes ? 1 : 0;
        undecided += v == V::undecided ? 1 : 0;
    }
    const double rate = static_cast<double>(undecided) / static_cast<double>(on_total + off_total);
    const bool pass = on_total == 5000 && off_far == off_total && on_ok == on_total && off_ok == off_total &&
                      rate < 0.01;
    return {pass, std::to_string(on_ok) + "/" + std::to_string(on_total) + " on converge, " +
                      std::to_string(off_ok) + "/" + std::to_string(off_total) + " off escape, undecided rate " +
                      fmt("%.3g", rate)};
}

Outcome a8_structure()
{
    const SampleStream rng(seed, "acceptance/A8");
    bool z_exact = true;
    bool cube_ok = true;
    double outside_defect = 0.0;
    long outside = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const Point3 p{rng.uniform(i, 0, -2.0, 2.0), rng.uniform(i, 1, -2.0, 2.0), rng.uniform(i, 2, -2.0, 2.0)};
        const Point3 q = phi1(p, model);
        z_exact = z_exact && q.z == p.z;
        cube_ok = cube_ok && in_cube(q);
        if (!ball_index(p, cp)) {
            ++outside;
            outside_defect = std::max(outside_defect, distance(q, p));
        }
    }
    // points in the balls as well, where the flow actually moves
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const Point3 p = sample_in_ball(rng, i, 10, ball(static_cast<int>(rng.integer(i, 9, -1, 6)), cp));
        const Point3 q = phi1(p, model);
        z_exact = z_exact && q.z == p.z;
        cube_ok = cube_ok && (!in_cube(p) || in_cube(q));
    }
    const bool pass = z_exact && cube_ok && outside > 0 && outside_defect <= model.flow.abs_tol;
    return {pass, std::string("z exact: ") + (z_exact ? "yes" : "no") + ", cube invariant: " +
                      (cube_ok ? "yes" : "no") + ", max defect outside balls = " + fmt("%.3g", outside_defect) +
                      " over " + std::to_string(outside) + " points"};
}

Outcome a9_components()
{
    const Point3 acc{cp.spine_left(), cp.r() / 4, 0};
    std::string counts;
    bool increasing = true;
    int prev = -1;
    for (int K : {8, 16, 32, 64}) {
        const int n = component_count(acc, cp.r() / 8, K, cp);
        increasing = increasing && n > prev;
        prev = n;
        counts += (counts.empty() ? "" : ",") + std::to_string(n);
    }
    bool generic_one = true;
    const Point3 generic{cp.tooth_abscissa(1), cp.r() / 4, 0};
    for (int K : {1, 2, 8, 16, 32, 64, 128, 1000}) {
        generic_one = generic_one && component_count(generic, cp.r() / 100, K, cp) == 1;
    }
    return {increasing && generic_one,
            "counts over K=8,16,32,64: " + counts + "; generic point one component: " + (generic_one ? "yes" : "no")};
}

Outcome a10_g_orbit()
{
    const SampleStream rng(seed, "acceptance/A10");
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        double a0 = 0.0;
        if (i % 2 == 0) {
            a0 = i % 4 == 0 ? cp.spine_left() : cp.tooth_abscissa(static_cast<double>(rng.integer(i, 0, 1, 50)));
        } else {
            a0 = 1.5 + rng.uniform(i, 0, -0.95, 0.95) * cp.r();
        }
        const double b0 = rng.uniform(i, 1, 0.01, 1.0) * ball_top(a0);
        for (int n = 1; n <= 6; ++n) {
            const auto [g, b] = g_orbit_identity(a0, b0, n, model);
            worst = std::max(worst, std::abs(g - b) / (1e-8 * std::ldexp(1.0, 2 * n)));
        }
    }
    return {worst <= 1.0, "max |g^n - rescaled b_n|/(1e-8*4^n) = " + fmt("%.3g", worst) + " over 100 lines"};
}

std::map<std::string, std::string> snapshot(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files[e.path().filename().string()] = ss.str();
    }
    return files;
}

Outcome a11_determinism()
{
    const fs::path dir = fs::temp_directory_path() / "comblab_acceptance_all";
    const std::string cmd = std::string(COMBLAB_CLI_PATH) + " all --out " + dir.string() + " > /dev/null 2>&1";
    std::map<std::string, std::string> runs[2];
    for (auto& run : runs) {
        fs::remove_all(dir);
        const int status = std::system(cmd.c_str());
        if (status == -1 || !fs::exists(dir / "summary.json")) {
            return {false, "CLI run produced no summary"};
        }
        run = snapshot(dir);
    }
    fs::remove_all(dir);
    std::size_t bytes = 0;
    for (const auto& [name, body] : runs[0]) {
        bytes += body.size();
    }
    const bool same = runs[0] == runs[1];
    return {same && runs[0].size() >= 2,
            std::to_string(runs[0].size()) + " files, " + std::to_string(bytes) + " bytes, identical: " +
                (same ? "yes" : "no")};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"A1", a1_comb_levels}, {"A2", a2_axis},          {"A3", a3_g_gap},        {"A4", a4_alpha_bound},
        {"A5", a5_commutation}, {"A6", a6_derivative},    {"A7", a7_classifier},   {"A8", a8_structure},
        {"A9", a9_components},  {"A10", a10_g_orbit},     {"A11", a11_determinism}};
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
