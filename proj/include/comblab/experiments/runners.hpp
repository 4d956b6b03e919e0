#pragma once

// One runner per experiment. Each writes <out_dir>/<name>.csv and returns a
// report whose pass flag is a function of the metrics alone.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "../components.hpp"
#include "../dynamics.hpp"
#include "config.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "samplers.hpp"

namespace comblab::experiments {

namespace detail {

inline ExperimentReport start_report(const std::string& name, const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentReport rep;
    rep.name = name;
    rep.config_echo = cfg;
    return rep;
}

inline int verdict_code(const std::optional<Classification>& c)
{
    if (!c) {
        return -1;
    }
    return static_cast<int>(c->verdict);
}

inline const char* verdict_name(const std::optional<Classification>& c)
{
    return c ? to_string(c->verdict) : "integration_failure";
}

struct GLine {
    std::string name;
    double a0;
};

inline std::vector<GLine> g_lines(const CombParams& params)
{
    const double x0 = params.spine_left();
    return {{"limit", x0},
            {"tooth1", params.tooth_abscissa(1)},
            {"tooth2", params.tooth_abscissa(2)},
            {"tooth5", params.tooth_abscissa(5)},
            {"off_mid", 1.5 + params.r() / 4.0},
            {"off_gap", x0 + params.r() / 2.5}};
}

inline double ball_top(double a0, const CombParams& params)
{
    const double dx = a0 - 1.5;
    return std::sqrt(std::max(0.0, params.r() * params.r() - dx * dx));
}

struct GRow {
    std::string line;
    double a0, y, y0, g, g_integrator;
    bool ok;
};

// Sweep of g(y) - y over (0, ball top] on one vertical line through B_0.
inline std::vector<GRow> g_sweep(const GLine& line, int points, const Model& model)
{
    Model integrated = model;
    integrated.comb_fast_path = false;
    const double y0 = y_ceiling(line.a0, model.comb);
    const double top = ball_top(line.a0, model.comb);
    std::vector<GRow> rows(static_cast<std::size_t>(points));
    parallel_for(rows.size(), [&](std::size_t i) {
        const double y = top * static_cast<double>(i + 1) / points;
        GRow row{line.name, line.a0, y, y0, 0.0, 0.0, true};
        try {
            row.g = g_map(line.a0, y, model);
            row.g_integrator = g_map(line.a0, y, integrated);
        } catch (const IntegrationFailure&) {
            row.ok = false;
        }
        rows[i] = row;
    });
    return rows;
}

} // namespace detail

inline ExperimentReport run_verify_stable_set(const ExperimentConfig& cfg)
{
    ExperimentReport rep = detail::start_report("verify-stable-set", cfg);
    const Model model = cfg.model();
    const ProbeParams probe = cfg.probe();
    const SampleStream on_rng(cfg.seed, "verify-stable-set/on");
    const SampleStream off_rng(cfg.seed, "verify-stable-set/off");
    const SampleStream planar_rng(cfg.seed, "verify-stable-set/planar");

    // The first `samples` rows form the judged population. Planar rows are a
    // diagnostic appended after them: near E they can need more than
    // `iters` steps to leave the ball family.
    const auto n = static_cast<std::size_t>(cfg.samples);
    const std::size_t n_on = n / 2;
    const std::size_t n_planar = n / 20;
    const std::size_t n_rows = n + n_planar;

    struct Row {
        std::string family, kind;
        int level = 0;
        double margin = 0.0;
        Point3 p;
        double dist = 0.0;
        bool analytic = false;
        std::optional<Classification> verdict;
    };
    std::vector<Row> rows(n_rows);
    parallel_for(n_rows, [&](std::size_t i) {
        Row row;
        if (i >= n) {
            const OffSample s = sample_off_w_planar(planar_rng, i - n, 0.01, model.comb);
            row = {"planar", s.kind, 0, 0.01, s.p, s.dist, false, std::nullopt};
        } else if (i < n_on) {
            const WSample s = sample_on_w(on_rng, i, model.comb);
            row = {"on", s.kind, s.level, 0.0, s.p, 0.0, false, std::nullopt};
        } else {
            const std::uint64_t j = i - n_on;
            const double margin = (j / 3) % 2 == 0 ? 0.01 : 0.1;
            const OffSample s = sample_off_w(off_rng, j, margin, model.comb);
            row = {"off", s.kind, 0, margin, s.p, s.dist, false, std::nullopt};
        }
        row.analytic = in_w_tilde(row.p, model.comb);
        if (row.family == "on") {
            row.dist = dist_to_w_tilde(row.p, model.comb);
        }
        try {
            row.verdict = classify_stable(row.p, probe, model);
        } catch (const IntegrationFailure&) {
        }
        rows[i] = std::move(row);
    });

    CsvTable csv({"index", "family", "kind", "level", "margin", "x", "y", "z", "dist_to_w", "analytic_in_w",
                  "verdict", "escape_step"});
    long on_total = 0, on_conv = 0, off_total = 0, off_esc = 0, undecided = 0, failures = 0, analytic_agree = 0;
    long planar_esc = 0, planar_undecided = 0, planar_conv = 0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        const Row& r = rows[i];
        csv.add(static_cast<long long>(i)).add(r.family).add(r.kind).add(r.level).add(r.margin);
        csv.add(r.p.x).add(r.p.y).add(r.p.z).add(r.dist).add(r.analytic ? 1 : 0);
        csv.add(detail::verdict_name(r.verdict)).add(r.verdict ? r.verdict->escape_step : -1);
        csv.end_row();

        const bool conv = r.verdict && r.verdict->verdict == Classification::Verdict::converges_to_origin;
        const bool esc = r.verdict && r.verdict->verdict == Classification::Verdict::escapes;
        const bool und = r.verdict && r.verdict->verdict == Classification::Verdict::undecided;
        failures += r.verdict ? 0 : 1;
        if (r.family == "planar") {
            planar_esc += esc ? 1 : 0;
            planar_undecided += und ? 1 : 0;
            planar_conv += conv || r.analytic ? 1 : 0;
            continue;
        }
        undecided += und ? 1 : 0;
        if (r.family == "on") {
            ++on_total;
            on_conv += conv ? 1 : 0;
            analytic_agree += r.analytic ? 1 : 0;
        } else {
            ++off_total;
            off_esc += esc ? 1 : 0;
            analytic_agree += r.analytic ? 0 : 1;
        }
    }
    write_csv(cfg, rep.name + ".csv", csv);

    auto frac = [](long num, long den) { return den == 0 ? 1.0 : static_cast<double>(num) / den; };
    rep.rows_written = csv.rows();
    rep.metrics = {{"on_total", static_cast<double>(on_total)},
                   {"on_converged", static_cast<double>(on_conv)},
                   {"on_agreement", frac(on_conv, on_total)},
                   {"off_total", static_cast<double>(off_total)},
                   {"off_escaped", static_cast<double>(off_esc)},
                   {"off_agreement", frac(off_esc, off_total)},
                   {"analytic_agreement", frac(analytic_agree, on_total + off_total)},
                   {"undecided_rate", frac(undecided, static_cast<long>(n))},
                   {"integration_failures", static_cast<double>(failures)},
                   {"planar_total", static_cast<double>(n_planar)},
                   {"planar_escaped", static_cast<double>(planar_esc)},
                   {"planar_undecided", static_cast<double>(planar_undecided)},
                   {"planar_misclassified", static_cast<double>(planar_conv)}};
    // Planar rows are reported only. An orbit that stays in the shrinking
    // balls for all `iters` steps also meets the convergence test.
    rep.pass = rep.metrics["on_agreement"] == 1.0 && rep.metrics["off_agreement"] == 1.0 &&
               rep.metrics["analytic_agreement"] == 1.0 && rep.metrics["undecided_rate"] < 0.01 &&
               failures == 0;
    return rep;
}

inline ExperimentReport run_check_g(const ExperimentConfig& cfg)
{
    ExperimentReport rep = detail::start_report("check-g", cfg);
    const Model model = cfg.model();
    const int points = std::clamp(cfg.samples / 25, 20, 400);

    CsvTable csv({"line", "a0", "y", "y0", "g", "g_minus_y", "g_integrator", "region"});
    double on_defect = 0.0, on_defect_integrator = 0.0;
    double min_gap_beyond = std::numeric_limits<double>::max();
    double min_gap_margin = std::numeric_limits<double>::max();
    long failures = 0;
    for (const auto& line : detail::g_lines(model.comb)) {
        for (const auto& row : detail::g_sweep(line, points, model)) {
            const double diff = row.g - row.y;
            const char* region = row.y <= row.y0 ? "on" : (row.y < row.y0 + 0.01 ? "gap" : "beyond");
            csv.add(row.line).add(row.a0).add(row.y).add(row.y0).add(row.g).add(diff).add(row.g_integrator);
            csv.add(row.ok ? region : "integration_failure");
            csv.end_row();
            if (!row.ok) {
                ++failures;
                continue;
            }
            if (row.y <= row.y0) {
                on_defect = std::max(on_defect, std::abs(diff));
                on_defect_integrator = std::max(on_defect_integrator, std::abs(row.g_integrator - row.y));
            } else {
                min_gap_beyond = std::min(min_gap_beyond, diff);
                if (row.y >= row.y0 + 0.01) {
                    min_gap_margin = std::min(min_gap_margin, diff);
                }
            }
        }
    }
    write_csv(cfg, rep.name + ".csv", csv);
    rep.rows_written = csv.rows();
    rep.metrics = {{"on_defect", on_defect},
                   {"on_defect_integrator", on_defect_integrator},
                   {"min_gap_beyond", min_gap_beyond},
                   {"min_gap_margin", min_gap_margin},
                   {"integration_failures", static_cast<double>(failures)}};
    rep.pass = on_defect <= 1e-9 && on_defect_integrator <= 1e-9 && min_gap_beyond > 0.0 &&
               min_gap_margin > 0.0 && failures == 0;
    return rep;
}

inline ExperimentReport run_check_commute(const ExperimentConfig& cfg)
{
    ExperimentReport rep = detail::start_report("check-commute", cfg);
    const Model model = cfg.model();
    const SampleStream rng(cfg.seed, rep.name);
    const auto n = static_cast<std::size_t>(cfg.samples);

    struct Row {
        Point3 p;
        double defect = -1.0;
    };
    std::vector<Row> rows(n);
    parallel_for(n, [&](std::size_t i) {
        Row row;
        if (i % 2 == 0) {
            row.p = {rng.uniform(i, 0, -2.0, 2.0), rng.uniform(i, 1, -2.0, 2.0), rng.uniform(i, 2, -2.0, 2.0)};
        } else {
            row.p = sample_in_ball(rng, i, 10, ball(static_cast<int>(rng.integer(i, 3, 0, 3)), model.comb));
        }
        try {
            row.defect = check_commutation(row.p, model);
        } catch (const IntegrationFailure&) {
        }
        rows[i] = row;
    });

    CsvTable csv({"index", "x", "y", "z", "defect"});
    double max_defect = 0.0;
    long failures = 0;
    for (std::size_t i = 0; i < n; ++i) {
        csv.add(static_cast<long long>(i)).add(rows[i].p.x).add(rows[i].p.y).add(rows[i].p.z).add(rows[i].defect);
        csv.end_row();
        if (rows[i].defect < 0.0) {
            ++failures;
        } else {
            max_defect = std::max(max_defect, rows[i].defect);
        }
    }
    write_csv(cfg, rep.name + ".csv", csv);
    rep.rows_written = csv.rows();
    rep.metrics = {{"max_defect", max_defect}, {"integration_failures", static_cast<double>(failures)}};
    rep.pass = max_defect <= 1e-8 && failures == 0;
    return rep;
}

/// Finite-difference step used by the derivative experiment.
inline constexpr double derivative_fd_step = 1e-6;

inline ExperimentReport run_check_derivative(const ExperimentConfig& cfg)
{
    ExperimentReport rep = detail::start_report("check-derivative", cfg);
    const Model model = cfg.model();
    const CombParams& cp = model.comb;

    struct Base {
        int level;
        std::string tooth;
        Point3 p;
    };
    std::vector<Base> bases;
    for (int k = 1; k <= 6; ++k) {
        bases.push_back({k, "limit", scale_pow2({cp.spine_left(), 0.0, 0.0}, -k)});
        for (int j : {1, 2, 3, 10}) {
            bases.push_back({k, "tooth" + std::to_string(j), scale_pow2({cp.tooth_abscissa(j), 0.0, 0.0}, -k)});
        }
    }
    bases.push_back({0, "origin", {}});

    CsvTable csv({"level", "tooth", "x", "fd_x", "fd_y", "fd_z"});
    double tooth_worst = 0.25, origin_fd = 0.0, transverse = 0.0;
    long failures = 0;
    for (const Base& b : bases) {
        Point3 fd{std::nan(""), std::nan(""), std::nan("")};
        try {
            fd = fd_partial_y_phi1(b.p, derivative_fd_step, model);
        } catch (const IntegrationFailure&) {
            ++failures;
        }
        csv.add(b.level).add(b.tooth).add(b.p.x).add(fd.x).add(fd.y).add(fd.z);
        csv.end_row();
        if (!std::isfinite(fd.y)) {
            continue;
        }
        transverse = std::max({transverse, std::abs(fd.x), std::abs(fd.z)});
        if (b.tooth == "origin") {
            origin_fd = fd.y;
        } else if (std::abs(fd.y - 0.25) > std::abs(tooth_worst - 0.25)) {
            tooth_worst = fd.y;
        }
    }
    write_csv(cfg, rep.name + ".csv", csv);
    rep.rows_written = csv.rows();
    rep.metrics = {{"tooth_fd", tooth_worst},
                   {"origin_fd", origin_fd},
                   {"transverse_max", transverse},
                   {"integration_failures", static_cast<double>(failures)}};
    rep.pass = std::abs(tooth_worst - 0.25) <= 1e-3 && std::abs(origin_fd - 1.0) <= 1e-3 && transverse <= 1e-3 &&
               failures == 0;
    return rep;
}

inline const std::vector<int>& component_levels()
{
    static const std::vector<int> ks{8, 16, 32, 64, 128};
    return ks;
}

inline ExperimentReport run_components(const ExperimentConfig& cfg)
{
    ExperimentReport rep = detail::start_report("components", cfg);
    const CombParams cp = cfg.model().comb;
    const Point3 accumulation{cp.spine_left(), cp.r() / 4.0, 0.0};
    const Point3 generic{cp.tooth_abscissa(1), cp.r() / 4.0, 0.0};

    CsvTable csv({"K", "accumulation_count", "generic_count"});
    std::vector<int> acc;
    bool generic_one = true;
    for (int K : component_levels()) {
        const int a = component_count(accumulation, cp.r() / 8.0, K, cp);
        const int g = component_count(generic, cp.r() / 100.0, K, cp);
        csv.add(K).add(a).add(g);
        csv.end_row();
        acc.push_back(a);
        generic_one = generic_one && g == 1;
    }
    bool strict = true;  // over K = 8..64
    bool nondecreasing = true;
    for (std::size_t i = 1; i < acc.size(); ++i) {
        if (i < 4) {
            strict = strict && acc[i] > acc[i - 1];
        }
        nondecreasing = nondecreasing && acc[i] >= acc[i - 1];
    }
    write_csv(cfg, rep.name + ".csv", csv);
    rep.rows_written = csv.rows();
    rep.metrics = {{"count_k8", acc[0]},
                   {"count_k64", acc[3]},
                   {"count_k128", acc[4]},
                   {"strictly_increasing", strict ? 1.0 : 0.0},
                   {"nondecreasing", nondecreasing ? 1.0 : 0.0},
                   {"generic_all_one", generic_one ? 1.0 : 0.0}};
    rep.pass = strict && nondecreasing && generic_one;
    return rep;
}

inline ExperimentReport run_orbit(const ExperimentConfig& cfg, const Point3& p, int n)
{
    ExperimentReport rep = detail::start_report("orbit", cfg);
    const Model model = cfg.model();
    const ProbeParams probe = cfg.probe();
    if (std::abs(n) > probe.max_iters) {
        throw ConfigError("orbit: |n| must not exceed iters");
    }
    if (!is_finite(p)) {
        throw ConfigError("orbit: start point must be finite");
    }
    CsvTable csv({"step", "x", "y", "z", "norm"});
    double failed = 0.0;
    OrbitRecord rec{p, {p}, Classification::undecided()};
    try {
        rec = iterate(p, n, probe, model);
    } catch (const IntegrationFailure&) {
        failed = 1.0;
    }
    const int dir = n < 0 ? -1 : 1;
    for (std::size_t k = 0; k < rec.points.size(); ++k) {
        const Point3& q = rec.points[k];
        csv.add(dir * static_cast<int>(k)).add(q.x).add(q.y).add(q.z).add(norm(q));
        csv.end_row();
    }
    write_csv(cfg, rep.name + ".csv", csv);
    rep.rows_written = csv.rows();
    rep.metrics = {{"steps", static_cast<double>(rec.points.size() - 1)},
                   {"final_norm", norm(rec.points.back())},
                   {"verdict", static_cast<double>(detail::verdict_code(rec.classification))},
                   {"escape_step", static_cast<double>(rec.classification.escape_step)},
                   {"integration_failures", failed}};
    rep.pass = failed == 0.0;
    return rep;
}

inline ExperimentReport run_render(const ExperimentConfig& cfg)
{
    ExperimentReport rep = detail::start_report("render", cfg);
    const Model model = cfg.model();
    const ProbeParams probe = cfg.probe();
    const CombParams& cp = model.comb;

    CsvTable comb({"level", "segment", "tooth", "x0", "y0", "z0", "x1", "y1", "z1"});
    for (int k = -2; k <= 6; ++k) {
        const auto segs = comb_segments(cp, 64);
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const Point3 a = scale_pow2(segs[i].a, -k);
            const Point3 b = scale_pow2(segs[i].b, -k);
            const char* kind = i == 0 ? "spine" : (i == 1 ? "limit" : "tooth");
            comb.add(k).add(kind).add(i < 2 ? 0 : static_cast<int>(i - 1));
            comb.add(a.x).add(a.y).add(a.z).add(b.x).add(b.y).add(b.z);
            comb.end_row();
        }
    }

    // odd side so the grid contains the x-axis exactly
    int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.samples))));
    side = std::clamp(side | 1, 11, 101);
    struct Cell {
        Point3 p;
        bool analytic = false;
        double dist = 0.0;
        std::optional<Classification> verdict;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(side) * side);
    parallel_for(cells.size(), [&](std::size_t idx) {
        const auto i = static_cast<int>(idx) / side;
        const auto j = static_cast<int>(idx) % side;
        Cell c;
        c.p = {-2.0 + 4.0 * i / (side - 1), -2.0 + 4.0 * j / (side - 1), 0.0};
        c.analytic = in_w_tilde(c.p, cp);
        c.dist = dist_to_w_tilde(c.p, cp);
        try {
            c.verdict = classify_stable(c.p, probe, model);
        } catch (const IntegrationFailure&) {
        }
        cells[idx] = c;
    });
    CsvTable slice({"i", "j", "x", "y", "analytic_in_w", "dist_to_w", "verdict", "escape_step"});
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const Cell& c = cells[idx];
        slice.add(static_cast<int>(idx) / side).add(static_cast<int>(idx) % side).add(c.p.x).add(c.p.y);
        slice.add(c.analytic ? 1 : 0).add(c.dist).add(detail::verdict_name(c.verdict));
        slice.add(c.verdict ? c.verdict->escape_step : -1);
        slice.end_row();
    }

    CsvTable gcurve({"a0", "y", "y0", "g", "g_minus_y"});
    long failures = 0;
    const auto line = detail::g_lines(cp).front();
    for (const auto& row : detail::g_sweep(line, 200, model)) {
        gcurve.add(row.a0).add(row.y).add(row.y0).add(row.g).add(row.g - row.y);
        gcurve.end_row();
        failures += row.ok ? 0 : 1;
    }

    write_csv(cfg, "render-comb.csv", comb);
    write_csv(cfg, "render-stable-slice.csv", slice);
    write_csv(cfg, "render-g-curve.csv", gcurve);
    CsvTable manifest({"kind", "file", "rows"});
    manifest.add("comb").add("render-comb.csv").add(static_cast<long long>(comb.rows())).end_row();
    manifest.add("stable-slice").add("render-stable-slice.csv").add(static_cast<long long>(slice.rows())).end_row();
    manifest.add("g-curve").add("render-g-curve.csv").add(static_cast<long long>(gcurve.rows())).end_row();
    write_csv(cfg, rep.name + ".csv", manifest);

    rep.rows_written = comb.rows() + slice.rows() + gcurve.rows() + manifest.rows();
    rep.metrics = {{"comb_rows", static_cast<double>(comb.rows())},
                   {"slice_rows", static_cast<double>(slice.rows())},
                   {"g_curve_rows", static_cast<double>(gcurve.rows())},
                   {"integration_failures", static_cast<double>(failures)}};
    rep.pass = failures == 0;
    return rep;
}

/// Every experiment except orbit, in a fixed order; writes summary.json.
inline std::vector<ExperimentReport> run_all(const ExperimentConfig& cfg)
{
    std::vector<ExperimentReport> reports;
    reports.push_back(run_verify_stable_set(cfg));
    reports.push_back(run_check_g(cfg));
    reports.push_back(run_check_commute(cfg));
    reports.push_back(run_check_derivative(cfg));
    reports.push_back(run_components(cfg));
    reports.push_back(run_render(cfg));
    write_summary(cfg.out_dir, reports);
    return reports;
}

} // namespace comblab::experiments
