#include "vortexpacket/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vortexpacket/io.hpp"
#include "vortexpacket/threads.hpp"
#include "vortexpacket/version.hpp"

namespace vortex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path);
}

int choose_stride(double t_final, double step, int target_rows = 2000) {
    const long steps = static_cast<long>(std::ceil(t_final / step));
    return std::max(1, static_cast<int>(steps / target_rows));
}

}  // namespace

std::vector<double> radial_profile(const GridField& grid) {
    const int n = grid.grid_n;
    const double dr = grid.dx();
    const int nbins = n / 2;
    std::vector<double> sum(nbins, 0.0);
    std::vector<int> count(nbins, 0);
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix);
            const int bin = static_cast<int>(std::floor(std::hypot(x, y) / dr));
            if (bin >= nbins) continue;
            sum[bin] += std::norm(grid.at(iy, ix));
            ++count[bin];
        }
    }
    std::vector<double> profile(nbins, 0.0);
    for (int i = 0; i < nbins; ++i)
        if (count[i] > 0) profile[i] = sum[i] / count[i];
    return profile;
}

int count_rings(const std::vector<double>& profile) {
    if (profile.empty()) return 0;
    const double floor = 1e-9 * *std::max_element(profile.begin(), profile.end());
    int rings = 0;
    for (size_t i = 0; i < profile.size(); ++i) {
        const double prev = i > 0 ? profile[i - 1] : -1.0;  // center bin may be the first peak
        const double next = i + 1 < profile.size() ? profile[i + 1] : -1.0;
        if (profile[i] > floor && profile[i] > prev && profile[i] > next) ++rings;
    }
    return rings;
}

double peak_radius(const std::vector<double>& profile, double dr) {
    const size_t k =
        std::max_element(profile.begin(), profile.end()) - profile.begin();
    double r = (static_cast<double>(k) + 0.5) * dr;  // bin centers
    // parabola through the log profile: near-exact for Gaussian-shaped peaks
    if (k > 0 && k + 1 < profile.size() && profile[k - 1] > 0.0 && profile[k + 1] > 0.0) {
        const double y0 = std::log(profile[k - 1]);
        const double y1 = std::log(profile[k]);
        const double y2 = std::log(profile[k + 1]);
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom != 0.0) r += dr * 0.5 * (y0 - y2) / denom;
    }
    return r;
}

ScenarioResult run_fig1(const RunConfig& cfg, const std::string& out_dir) {
    const auto& sc = cfg.scenario;
    ScenarioResult out;

    int max_abs_l = 1;
    for (int l : sc.l_values) max_abs_l = std::max(max_abs_l, std::abs(l));
    const double pc = norm(cfg.p0);
    const double w0 = cfg.waist > 0.0 ? cfg.waist : 10.0 * cfg.units.hbar / pc;
    const double extent = w0 * (6.0 + std::sqrt(2.0 * max_abs_l) + 2.0 * sc.m_radial);

    struct PerL {
        int l = 0;
        int rings = 0;
        double peak_r = 0.0;
        double oam = 0.0;
        std::vector<double> profile;
        double dr = 0.0;
    };
    std::vector<PerL> results(sc.l_values.size());

    parallel_for(static_cast<int>(sc.l_values.size()), [&](int i) {
        const int l = sc.l_values[i];
        ModeSpec spec = ModeSpec::make(l, sc.m_radial, 0, pc, cfg.units);
        spec.waist = w0;
        const SampleResult sr = sample_mode(spec, sc.grid_n, extent, 0.0, cfg.units);
        const CurrentField cur = probability_current(spec, sr.grid, cfg.units);

        PerL& r = results[i];
        r.l = l;
        r.profile = radial_profile(sr.grid);
        r.dr = sr.grid.dx();
        r.rings = count_rings(r.profile);
        r.peak_r = peak_radius(r.profile, r.dr);
        r.oam = oam_expectation(sr.grid);

        const std::string tag = "l" + std::to_string(l);
        write_grid_csv(sr.grid, cur, join_path(out_dir, "grid_" + tag + ".csv"));
        write_grid_binary(sr.grid, join_path(out_dir, "grid_" + tag + ".bin"));

        // current quiver on a coarse sub-lattice, drawn as bare segments
        std::vector<std::array<double, 4>> segs;
        const int every = std::max(1, sc.grid_n / 24);
        double jmax = 0.0;
        for (const auto& v : cur.exact) jmax = std::max(jmax, std::hypot(v.x, v.y));
        const double scale = jmax > 0.0 ? 0.9 * every * sr.grid.dx() / jmax : 0.0;
        for (int iy = every / 2; iy < sc.grid_n; iy += every) {
            for (int ix = every / 2; ix < sc.grid_n; ix += every) {
                const size_t k = static_cast<size_t>(iy) * sc.grid_n + ix;
                const double x = sr.grid.coord(ix), y = sr.grid.coord(iy);
                segs.push_back({x, y, x + scale * cur.exact[k].x, y + scale * cur.exact[k].y});
            }
        }
        SvgPlot quiver("transverse probability current, l=" + std::to_string(l), "x", "y");
        quiver.add_segments(segs, "#1f77b4");
        quiver.save(join_path(out_dir, "quiver_" + tag + ".svg"));
    });

    std::string rings_csv = "l,m_radial,rings,peak_radius,peak_radius_gaussian_law,oam\n";
    SvgPlot profiles("radial density profiles", "r", "rho");
    for (const auto& r : results) {
        // the m=0 single-ring law r = w0 sqrt(|l|/2); blank for m > 0
        const std::string law =
            sc.m_radial == 0 && r.l != 0 ? fmt(w0 * std::sqrt(0.5 * std::abs(r.l))) : "";
        rings_csv += std::to_string(r.l) + "," + std::to_string(sc.m_radial) + "," +
                     std::to_string(r.rings) + "," + fmt(r.peak_r) + "," + law + "," + fmt(r.oam) +
                     "\n";
        std::vector<double> rs(r.profile.size());
        for (size_t i = 0; i < rs.size(); ++i) rs[i] = (static_cast<double>(i) + 0.5) * r.dr;
        profiles.add_polyline(rs, r.profile, "l=" + std::to_string(r.l));

        std::string prof_csv = "r,rho\n";
        for (size_t i = 0; i < rs.size(); ++i)
            prof_csv += fmt(rs[i]) + "," + fmt(r.profile[i]) + "\n";
        write_text(join_path(out_dir, "profile_l" + std::to_string(r.l) + ".csv"), prof_csv);
    }
    write_text(join_path(out_dir, "rings.csv"), rings_csv);
    profiles.save(join_path(out_dir, "profiles.svg"));

    for (const auto& r : results) {
        const std::string tag = "l" + std::to_string(r.l);
        out.files.insert(out.files.end(), {"grid_" + tag + ".csv", "grid_" + tag + ".bin",
                                           "profile_" + tag + ".csv", "quiver_" + tag + ".svg"});
    }
    out.files.insert(out.files.end(), {"rings.csv", "profiles.svg"});

    std::ostringstream summary;
    summary << "fig1_density: " << results.size() << " modes, m=" << sc.m_radial << "\n";
    for (const auto& r : results)
        summary << "  l=" << r.l << "  rings=" << r.rings << "  peak_r=" << r.peak_r
                << "  <Lz>/hbar=" << r.oam << "\n";
    out.summary = summary.str();
    return out;
}

ScenarioResult run_fig2(const RunConfig& cfg, const std::string& out_dir) {
    const auto& sc = cfg.scenario;
    ScenarioResult out;

    const FieldConfig field = FieldConfig::uniform_e({0.0, sc.e0, 0.0}).with_g_factor(cfg.g_factor);
    const double a = cfg.units.charge * sc.e0;  // signed force along y
    const double p0 = sc.p0;

    struct Fan {
        int l = 0;
        Trajectory traj;
        double shift = 0.0;
    };
    std::vector<Fan> fans(sc.l_values.size());

    parallel_for(static_cast<int>(sc.l_values.size()), [&](int i) {
        const int l = sc.l_values[i];
        PacketState s0;
        s0.r = {};
        s0.p = {0.0, 0.0, p0};
        s0.l_vec = {0.0, 0.0, static_cast<double>(l)};
        IntegratorConfig icfg;
        icfg.method = StepperKind::rk4;
        icfg.t_final = sc.t_final;
        icfg.oam_model = OamModel::slaved;
        const double step = p0 / (std::fabs(cfg.units.charge) * sc.e0) / 200.0;
        icfg.step = step;
        icfg.output_stride = choose_stride(sc.t_final, step);
        const ZeemanParams zp = ZeemanParams::make(l, cfg.g_factor, cfg.units);
        fans[i].l = l;
        fans[i].traj = integrate(s0, field, zp, icfg, cfg.units);
        if (fans[i].traj.status != RunStatus::ok)
            throw Error(ErrorCode::invalid_argument,
                        "fig2 trajectory aborted: " + fans[i].traj.message);
        fans[i].shift = fans[i].traj.points.back().r.x;
        write_trajectory_csv(fans[i].traj.points,
                             join_path(out_dir, "trace_l" + std::to_string(l) + ".csv"));
    });

    const double t = sc.t_final;
    const double finite_t_factor = a * t / std::sqrt(p0 * p0 + a * a * t * t);  // -> sign(a)
    std::string shifts_csv =
        "l,shift_measured,shift_finite_t,shift_asymptotic,measured_over_asymptotic\n";
    SvgPlot fan_plot("OAM Hall fan in a uniform electric field", "z", "x");
    for (const auto& f : fans) {
        const double asym = cfg.units.hbar * f.l / p0 * (a >= 0.0 ? 1.0 : -1.0);
        const double finite = cfg.units.hbar * f.l / p0 * finite_t_factor;
        shifts_csv += std::to_string(f.l) + "," + fmt(f.shift) + "," + fmt(finite) + "," +
                      fmt(asym) + "," + (asym != 0.0 ? fmt(f.shift / asym) : std::string("")) +
                      "\n";
        std::vector<double> zs, xs;
        for (const auto& pt : f.traj.points) {
            zs.push_back(pt.r.z);
            xs.push_back(pt.r.x);
        }
        fan_plot.add_polyline(zs, xs, "l=" + std::to_string(f.l));
        out.files.push_back("trace_l" + std::to_string(f.l) + ".csv");
    }
    write_text(join_path(out_dir, "shifts.csv"), shifts_csv);
    fan_plot.save(join_path(out_dir, "fan.svg"));
    out.files.insert(out.files.end(), {"shifts.csv", "fan.svg"});

    std::ostringstream summary;
    summary << "fig2_hall_fan: E0=" << sc.e0 << " p0=" << p0 << " t_final=" << t << "\n";
    for (const auto& f : fans)
        summary << "  l=" << f.l << "  shift=" << f.shift << "  (hbar l/p0 = "
                << cfg.units.hbar * f.l / p0 << ")\n";
    out.summary = summary.str();
    return out;
}

ScenarioResult run_magnetic_drift(const RunConfig& cfg, const std::string& out_dir) {
    const auto& sc = cfg.scenario;
    ScenarioResult out;

    const FieldConfig field = FieldConfig::uniform_b({0.0, 0.0, sc.b0});
    const double p0 = sc.p0;
    const double period = kTwoPi * cfg.units.mass / (std::fabs(cfg.units.charge) * sc.b0);
    const double t_final = sc.periods * period;

    struct Row {
        double g = 0.0;
        double measured = 0.0;
        double expected = 0.0;
    };
    std::vector<Row> rows(sc.g_values.size());

    parallel_for(static_cast<int>(sc.g_values.size()), [&](int i) {
        const double g = sc.g_values[i];
        PacketState s0;
        s0.p = {p0, 0.0, 0.0};  // perpendicular to B
        IntegratorConfig icfg;
        icfg.method = StepperKind::rk4;
        icfg.step = period / 2000.0;
        icfg.t_final = t_final;
        icfg.oam_model = OamModel::slaved;
        icfg.output_stride = choose_stride(t_final, icfg.step);
        const ZeemanParams zp = ZeemanParams::make(sc.l, g, cfg.units);
        const Trajectory traj = integrate(s0, field.with_g_factor(g), zp, icfg, cfg.units);
        if (traj.status != RunStatus::ok)
            throw Error(ErrorCode::invalid_argument, "drift trajectory aborted: " + traj.message);
        rows[i].g = g;
        rows[i].measured = traj.points.back().r.z / t_final;
        rows[i].expected = cfg.units.charge * cfg.units.hbar * sc.l * (1.0 - g / 2.0) * sc.b0 /
                           (cfg.units.mass * p0);
        write_trajectory_csv(traj.points, join_path(out_dir, "trace_" + std::to_string(i) + ".csv"));
    });

    std::string csv = "g,one_minus_g_over_2,drift_measured,drift_expected,rel_err\n";
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        const double rel =
            r.expected != 0.0 ? std::fabs(r.measured / r.expected - 1.0)
                              : std::fabs(r.measured);
        csv += fmt(r.g) + "," + fmt(1.0 - r.g / 2.0) + "," + fmt(r.measured) + "," +
               fmt(r.expected) + "," + fmt(rel) + "\n";
        xs.push_back(1.0 - r.g / 2.0);
        ys.push_back(r.measured);
    }
    write_text(join_path(out_dir, "drift.csv"), csv);
    SvgPlot plot("OAM magnetic drift vs (1 - g/2), l=" + std::to_string(sc.l), "1 - g/2",
                 "drift velocity along B");
    plot.add_polyline(xs, ys, "measured");
    plot.save(join_path(out_dir, "drift.svg"));
    for (size_t i = 0; i < rows.size(); ++i) out.files.push_back("trace_" + std::to_string(i) + ".csv");
    out.files.insert(out.files.end(), {"drift.csv", "drift.svg"});

    std::ostringstream summary;
    summary << "magnetic_drift: l=" << sc.l << " B0=" << sc.b0 << " p0=" << p0 << "\n";
    for (const auto& r : rows)
        summary << "  g=" << r.g << "  measured=" << r.measured << "  expected=" << r.expected
                << "\n";
    out.summary = summary.str();
    return out;
}

ScenarioResult run_helicity_watch(const RunConfig& cfg, const std::string& out_dir) {
    const auto& sc = cfg.scenario;
    ScenarioResult out;

    const FieldConfig base = FieldConfig::uniform_b({0.0, 0.0, sc.b0});
    const double tilt = sc.tilt_deg * std::numbers::pi / 180.0;
    const double period = kTwoPi * cfg.units.mass / (std::fabs(cfg.units.charge) * sc.b0);

    struct Row {
        double g = 0.0;
        double max_dev = 0.0;
        bool warned = false;
        double warn_time = 0.0;
        std::vector<std::pair<double, double>> series;  // (t, helicity)
    };
    std::vector<Row> rows(sc.g_values.size());

    parallel_for(static_cast<int>(sc.g_values.size()), [&](int i) {
        const double g = sc.g_values[i];
        PacketState s0;
        s0.p = {std::sin(tilt), 0.0, std::cos(tilt)};  // |p| = 1, tilted against B
        s0.l_vec = static_cast<double>(sc.l) * normalized(s0.p);
        IntegratorConfig icfg;
        icfg.method = StepperKind::rk4;
        icfg.step = period / 2000.0;
        icfg.t_final = sc.periods * period;
        icfg.oam_model = OamModel::precessing;
        icfg.output_stride = choose_stride(icfg.t_final, icfg.step);
        const ZeemanParams zp = ZeemanParams::make(sc.l, g, cfg.units);
        const Trajectory traj = integrate(s0, base.with_g_factor(g), zp, icfg, cfg.units);
        if (traj.status != RunStatus::ok)
            throw Error(ErrorCode::invalid_argument, "helicity trajectory aborted: " + traj.message);
        Row& r = rows[i];
        r.g = g;
        r.warned = traj.validity_warning;
        r.warn_time = traj.validity_warning_time;
        for (const auto& pt : traj.points) {
            r.max_dev = std::max(r.max_dev, std::fabs(pt.helicity - sc.l));
            r.series.emplace_back(pt.t, pt.helicity);
        }
        write_trajectory_csv(traj.points,
                             join_path(out_dir, "helicity_" + std::to_string(i) + ".csv"));
    });

    std::string csv = "g,max_helicity_deviation,validity_warning,warning_time\n";
    SvgPlot plot("helicity l.p/p over time (precessing OAM)", "t", "helicity");
    for (const auto& r : rows) {
        csv += fmt(r.g) + "," + fmt(r.max_dev) + "," + (r.warned ? "1" : "0") + "," +
               (r.warned ? fmt(r.warn_time) : std::string("")) + "\n";
        std::vector<double> ts, hs;
        for (const auto& [t, hel] : r.series) {
            ts.push_back(t);
            hs.push_back(hel);
        }
        plot.add_polyline(ts, hs, "g=" + fmt(r.g).substr(0, 4));
    }
    write_text(join_path(out_dir, "summary.csv"), csv);
    plot.save(join_path(out_dir, "helicity.svg"));
    for (size_t i = 0; i < rows.size(); ++i)
        out.files.push_back("helicity_" + std::to_string(i) + ".csv");
    out.files.insert(out.files.end(), {"summary.csv", "helicity.svg"});

    std::ostringstream summary;
    summary << "helicity_watch: l=" << sc.l << " B0=" << sc.b0 << " tilt=" << sc.tilt_deg
            << " deg\n";
    for (const auto& r : rows)
        summary << "  g=" << r.g << "  max|h-l|=" << r.max_dev
                << (r.warned ? "  validity warning at t=" + fmt(r.warn_time) : "") << "\n";
    out.summary = summary.str();
    return out;
}

ScenarioResult run_berry_loop(const RunConfig& cfg, const std::string& out_dir) {
    const auto& sc = cfg.scenario;
    ScenarioResult out;

    MomentumPath path;
    path.closed = true;
    path.points.reserve(sc.n_points + 1);
    for (int i = 0; i <= sc.n_points; ++i) {
        const double phi = kTwoPi * i / sc.n_points;
        path.points.push_back(sc.radius * Vec3{std::sin(sc.theta) * std::cos(phi),
                                               std::sin(sc.theta) * std::sin(phi),
                                               std::cos(sc.theta)});
    }
    path.points.back() = path.points.front();

    const LoopPhase lp = berry_phase_loop(path, sc.l);
    MomentumPath reversed = path;
    std::reverse(reversed.points.begin(), reversed.points.end());
    const LoopPhase lp_rev = berry_phase_loop(reversed, sc.l);

    const double cap = kTwoPi * (1.0 - std::cos(sc.theta));
    std::string csv =
        "theta,n_points,l,phase,phase_line,solid_angle,method_delta,cap_solid_angle,"
        "expected_phase,reversed_phase\n";
    csv += fmt(sc.theta) + "," + std::to_string(sc.n_points) + "," + std::to_string(sc.l) + "," +
           fmt(lp.phase) + "," + fmt(lp.phase_line) + "," + fmt(lp.solid_angle) + "," +
           fmt(lp.method_delta) + "," + fmt(cap) + "," + fmt(-sc.l * cap) + "," +
           fmt(lp_rev.phase) + "\n";
    write_text(join_path(out_dir, "phase.csv"), csv);
    out.files.push_back("phase.csv");

    std::ostringstream summary;
    summary << "berry_loop: theta=" << sc.theta << " l=" << sc.l << "\n"
            << "  phase (solid angle) = " << lp.phase << "\n"
            << "  phase (line integral) = " << lp.phase_line << "\n"
            << "  expected -l*2pi(1-cos theta) = " << -sc.l * cap << "\n";
    out.summary = summary.str();
    return out;
}

ScenarioResult run_scenario(const RunConfig& cfg, const std::string& out_dir) {
    const auto& kind = cfg.scenario.kind;
    if (kind.empty())
        throw Error(ErrorCode::validation_error, "scenario.kind is required");
    std::filesystem::create_directories(out_dir);

    ScenarioResult result;
    std::string gauge = "zero";
    if (kind == "fig1_density") {
        result = run_fig1(cfg, out_dir);
    } else if (kind == "fig2_hall_fan") {
        result = run_fig2(cfg, out_dir);
        gauge = "electrostatic";
    } else if (kind == "magnetic_drift") {
        result = run_magnetic_drift(cfg, out_dir);
        gauge = "symmetric";
    } else if (kind == "helicity_watch") {
        result = run_helicity_watch(cfg, out_dir);
        gauge = "symmetric";
    } else if (kind == "berry_loop") {
        result = run_berry_loop(cfg, out_dir);
    } else {
        throw Error(ErrorCode::validation_error, "unknown scenario kind at scenario.kind");
    }

    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
    std::vector<std::pair<std::string, std::string>> manifest = {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"kind", kind},
        {"config_hash", hash},
        {"gauge_em", gauge},
        {"gauge_berry", "south-string"},
    };
    std::string files;
    for (size_t i = 0; i < result.files.size(); ++i)
        files += (i ? " " : "") + result.files[i];
    manifest.emplace_back("files", files);
    write_manifest(join_path(out_dir, "manifest"), manifest);
    result.files.push_back("manifest");
    return result;
}

}  // namespace vortex
