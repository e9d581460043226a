#include "vortexpacket/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vortexpacket/config.hpp"
#include "vortexpacket/io.hpp"
#include "vortexpacket/paraxial_oracle.hpp"
#include "vortexpacket/scenarios.hpp"
#include "vortexpacket/symplectic.hpp"
#include "vortexpacket/version.hpp"

namespace vortex {

namespace {

Vec3 parse_vec3_arg(const std::string& text, const std::string& flag) {
    Vec3 v;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
        throw Error(ErrorCode::usage_error, flag + " expects x,y,z");
    return v;
}

MomentumPath read_path_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot open path file: " + path);
    MomentumPath mp;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Vec3 p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.x, &p.y, &p.z) != 3) {
            if (mp.points.empty()) continue;  // tolerate one header line
            throw Error(ErrorCode::io_error, "bad path row: " + line);
        }
        mp.points.push_back(p);
    }
    if (mp.points.size() < 2)
        throw Error(ErrorCode::io_error, "path file needs at least two points: " + path);
    mp.closed = norm(mp.points.front() - mp.points.back()) < 1e-12;
    return mp;
}

int cmd_modes(const RunConfig& cfg, int grid_n, double extent, double tau,
              const std::string& out_prefix) {
    const ModeSpec spec = make_mode_spec(cfg);
    const int n = grid_n > 0 ? grid_n : 256;
    const double ext = extent > 0.0 ? extent : 8.0 * spec.width_at(tau, cfg.units);
    const SampleResult sr = sample_mode(spec, n, ext, tau, cfg.units);
    const CurrentField cur = probability_current(spec, sr.grid, cfg.units);
    write_grid_csv(sr.grid, cur, out_prefix + ".csv");
    write_grid_binary(sr.grid, out_prefix + ".bin");
    const auto profile = radial_profile(sr.grid);
    std::cout << "mode l=" << spec.l << " m=" << spec.m_radial << " w0=" << spec.waist
              << " tau=" << tau << "\n"
              << "  grid " << n << "^2, extent " << ext << ", norm " << sr.grid.norm() << "\n"
              << "  <Lz>/hbar = " << oam_expectation(sr.grid) << "\n"
              << "  rings = " << count_rings(profile)
              << ", peak radius = " << peak_radius(profile, sr.grid.dx()) << "\n"
              << "  wrote " << out_prefix << ".csv, " << out_prefix << ".bin\n";
    if (sr.warning == Warning::extent_too_small)
        std::cout << "  warning: extent_too_small (norm deficit > 1e-2)\n";
    return 0;
}

int cmd_propagate(const RunConfig& cfg, const std::string& in, const std::string& out,
                  double dtau, int steps) {
    GridField grid = read_grid_binary(in);
    std::cout << "read " << in << ": grid " << grid.grid_n << "^2, extent " << grid.extent
              << ", tau " << grid.tau << ", norm " << grid.norm() << "\n";
    const PropagateResult pr = propagate(grid, dtau, steps, cfg.units);
    write_grid_binary(pr.grid, out);
    std::cout << "propagated " << steps << " x " << dtau << " -> tau " << pr.grid.tau
              << ", norm " << pr.grid.norm() << "\n"
              << "wrote " << out << "\n";
    if (pr.warning == Warning::boundary_leakage)
        std::cout << "warning: boundary_leakage (outer annulus holds > 1e-3 of the norm)\n";
    return 0;
}

int cmd_berry(const std::string& path_file, int l) {
    const MomentumPath mp = read_path_csv(path_file);
    const LoopPhase lp = berry_phase_loop(mp, l);
    std::cout << "points: " << mp.points.size() << (mp.closed ? " (closed)" : " (open)") << "\n"
              << "gauge: " << lp.gauge_label << "\n"
              << "phase (authoritative): " << lp.phase << "\n"
              << "phase (line integral): " << lp.phase_line << "\n"
              << "solid angle: " << lp.solid_angle << "\n"
              << "method delta (mod 2pi): " << lp.method_delta << "\n";
    if (lp.warning != Warning::none)
        std::cout << "warning: " << warning_name(lp.warning) << "\n";
    return 0;
}

int cmd_trace(const RunConfig& cfg, const std::string& out) {
    const FieldConfig field = make_field(cfg);
    const ZeemanParams zp = make_zeeman(cfg);
    const IntegratorConfig icfg = make_integrator(cfg);
    const PacketState s0 = make_initial_state(cfg);
    const Trajectory traj = integrate(s0, field, zp, icfg, cfg.units);
    write_trajectory_csv(traj.points, out);
    std::cout << "wrote " << out << " (" << traj.points.size() << " rows)\n";
    if (!traj.points.empty()) {
        const auto& last = traj.points.back();
        std::cout << "final t=" << last.t << " r=" << last.r << " p=" << last.p
                  << " helicity=" << last.helicity << " energy=" << last.energy << "\n";
    }
    std::cout << "berry gauge: " << traj.gauge_label << "\n";
    if (traj.validity_warning)
        std::cout << "warning: model_validity fired at t=" << traj.validity_warning_time
                  << " (precessing OAM left the slaved direction; g != 2 in B)\n";
    if (traj.status != RunStatus::ok) {
        std::cerr << "error: " << traj.message << " (partial trajectory written)\n";
        return 1;
    }
    return 0;
}

int cmd_symplectic(const RunConfig& cfg, const Vec3& r, const Vec3& p, int l) {
    const FieldConfig field = make_field(cfg);
    const SymplecticFrame frame = build_frame(r, p, l, field, cfg.units);
    static const char* names[6] = {"r_x", "r_y", "r_z", "p_x", "p_y", "p_z"};
    std::printf("%8s", "");
    for (const char* n : names) std::printf(", %14s", n);
    std::printf("\n");
    for (int i = 0; i < 6; ++i) {
        std::printf("%8s", names[i]);
        for (int j = 0; j < 6; ++j) std::printf(", %14.6g", bracket(frame, i, j));
        std::printf("\n");
    }
    std::printf("D = %.17g\n", frame.dos);
    std::printf("sqrt(det g) = %.17g\n", frame.sqrt_det);
    std::printf("condition = %.3g\n", frame.condition);
    if (frame.warning != Warning::none)
        std::printf("warning: %s\n", warning_name(frame.warning));
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{std::string(kToolName) + ": semiclassical dynamics of electron vortex packets"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out = "";
    std::string in_file, path_file;
    int grid_n = 0, steps = 1, l_arg = 0;
    bool l_set = false;
    double extent = 0.0, tau = 0.0, dtau = 0.0;
    std::string r_arg, p_arg;

    auto* modes = app.add_subcommand("modes", "sample an LG mode and its probability current");
    modes->add_option("--config", config_path, "config file");
    modes->add_option("--grid-n", grid_n, "samples per axis (power of two)");
    modes->add_option("--extent", extent, "grid half-width");
    modes->add_option("--tau", tau, "comoving time");
    modes->add_option("--l", l_arg, "override packet.l")->each([&](const std::string&) { l_set = true; });
    modes->add_option("--out", out, "output prefix (default 'mode')");

    auto* prop = app.add_subcommand("propagate", "spectral free-space propagation of a grid file");
    prop->add_option("--config", config_path, "config file (units)");
    prop->add_option("--in", in_file, "input VPGRID01 file")->required();
    prop->add_option("--out", out, "output VPGRID01 file")->required();
    prop->add_option("--dtau", dtau, "time step")->required();
    prop->add_option("--steps", steps, "number of steps");

    auto* berry = app.add_subcommand("berry", "Berry phase of a momentum path (CSV of p points)");
    berry->add_option("--path", path_file, "CSV file with px,py,pz rows")->required();
    berry->add_option("--l", l_arg, "vortex strength l")->required();

    auto* trace = app.add_subcommand("trace", "integrate the equations of motion");
    trace->add_option("--config", config_path, "config file")->required();
    trace->add_option("--out", out, "trajectory CSV (default 'trajectory.csv')");

    auto* symp = app.add_subcommand("symplectic", "bracket table and D at a phase-space point");
    symp->add_option("--config", config_path, "config file (field, packet)");
    symp->add_option("--r", r_arg, "position x,y,z (default packet.r0)");
    symp->add_option("--p", p_arg, "momentum x,y,z (default packet.p0)");
    symp->add_option("--l", l_arg, "override packet.l")->each([&](const std::string&) { l_set = true; });

    auto* scen = app.add_subcommand("scenario", "run a canned experiment");
    std::string kind;
    scen->add_option("kind", kind,
                     "fig1_density | fig2_hall_fan | magnetic_drift | helicity_watch | berry_loop")
        ->required();
    scen->add_option("--config", config_path, "config file");
    scen->add_option("--out", out, "output directory (default 'out')");

    auto* self = app.add_subcommand("selftest", "run the invariant battery");
    (void)self;

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (l_set) cfg.l = l_arg;

        if (modes->parsed()) return cmd_modes(cfg, grid_n, extent, tau, out.empty() ? "mode" : out);
        if (prop->parsed()) return cmd_propagate(cfg, in_file, out, dtau, steps);
        if (berry->parsed()) return cmd_berry(path_file, l_arg);
        if (trace->parsed()) return cmd_trace(cfg, out.empty() ? "trajectory.csv" : out);
        if (symp->parsed()) {
            const Vec3 r = r_arg.empty() ? cfg.r0 : parse_vec3_arg(r_arg, "--r");
            const Vec3 p = p_arg.empty() ? cfg.p0 : parse_vec3_arg(p_arg, "--p");
            return cmd_symplectic(cfg, r, p, l_set ? l_arg : cfg.l);
        }
        if (scen->parsed()) {
            if (!cfg.scenario.kind.empty() && cfg.scenario.kind != kind)
                throw Error(ErrorCode::usage_error, "scenario kind mismatch: config declares '" +
                                                        cfg.scenario.kind + "', command line says '" +
                                                        kind + "'");
            cfg.scenario.kind = kind;
            const ScenarioResult res = run_scenario(cfg, out.empty() ? "out" : out);
            std::cout << res.summary;
            std::cout << "wrote " << res.files.size() << " files\n";
            return 0;
        }
        if (self->parsed()) {
            const int failures = run_selftest(std::cout);
            return failures == 0 ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::usage_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace vortex
