#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "vortexpacket/cli.hpp"
#include "vortexpacket/config.hpp"
#include "vortexpacket/paraxial_oracle.hpp"
#include "vortexpacket/symplectic.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

struct Battery {
    std::ostream& out;
    int failures = 0;

    void check(const std::string& name, bool ok) {
        out << (ok ? "  ok   " : "  FAIL ") << name << "\n";
        if (!ok) ++failures;
    }
};

// uniform E and B together, symmetric + electrostatic gauge
FieldConfig combined_uniform(const Vec3& e0, const Vec3& b0, double g) {
    return FieldConfig::user_supplied(
               [e0](const Vec3&) { return e0; }, [b0](const Vec3&) { return b0; },
               [e0](const Vec3& r) { return -dot(e0, r); },
               [b0](const Vec3& r) { return 0.5 * cross(b0, r); }, "symmetric+electrostatic")
        .with_g_factor(g);
}

}  // namespace

int run_selftest(std::ostream& out) {
    Battery b{out};
    const UnitSystem units;
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto rand_vec = [&] { return Vec3{uni(rng), uni(rng), uni(rng)}; };

    out << "vortexpacket selftest\n";

    {  // field presets reproduce their potentials
        const FieldConfig fe = FieldConfig::uniform_e({0.0, 1.0, 0.0});
        const FieldConfig fb = FieldConfig::uniform_b({0.0, 0.0, 2.0});
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Vec3 r = 3.0 * rand_vec();
            const double h = 1e-5;
            Vec3 grad;
            for (int j = 0; j < 3; ++j) {
                Vec3 rp = r, rm = r;
                rp[j] += h;
                rm[j] -= h;
                grad[j] = (fe.scalar_potential(rp) - fe.scalar_potential(rm)) / (2.0 * h);
            }
            worst = std::max(worst, norm(-grad - fe.electric(r)));
            Vec3 curl;
            for (int j = 0; j < 3; ++j) {
                const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
                Vec3 rp = r, rm = r;
                rp[j1] += h;
                rm[j1] -= h;
                const double d1 = (fb.vector_potential(rp)[j2] - fb.vector_potential(rm)[j2]) / (2.0 * h);
                rp = r, rm = r;
                rp[j2] += h;
                rm[j2] -= h;
                const double d2 = (fb.vector_potential(rp)[j1] - fb.vector_potential(rm)[j1]) / (2.0 * h);
                curl[j] = d1 - d2;
            }
            worst = std::max(worst, norm(curl - fb.magnetic(r)));
        }
        b.check("field presets: E = -grad Phi, B = curl A (rel 1e-6)", worst < 1e-6);
    }

    {  // LG mode structure
        const ModeSpec spec = ModeSpec::make(2, 1, 0, 1.0, units);
        const SampleResult sr = sample_mode(spec, 128, 7.0 * spec.waist, 0.0, units);
        const double nrm = sr.grid.norm();
        b.check("LG mode: unit norm on grid (1e-4)", std::fabs(nrm - 1.0) < 1e-4);
        b.check("LG mode: vortex core zero", std::abs(eval_lg(spec, 0.0, 0.3, 0.0, units)) == 0.0);
        double winding = 0.0;
        double prev = std::arg(eval_lg(spec, spec.waist, 0.0, 0.0, units));
        for (int i = 1; i <= 720; ++i) {
            const double phi = 2.0 * kPi * i / 720;
            const double cur = std::arg(eval_lg(spec, spec.waist, phi, 0.0, units));
            winding += std::remainder(cur - prev, 2.0 * kPi);
            prev = cur;
        }
        b.check("LG mode: phase winding 2 pi l", std::fabs(winding - 2.0 * kPi * spec.l) < 1e-9);
        b.check("LG mode: <Lz>/hbar = l (1e-6)", std::fabs(oam_expectation(sr.grid) - 2.0) < 1e-6);
    }

    {  // orthonormality sample
        const UnitSystem u;
        const ModeSpec a = ModeSpec::make(1, 0, 0, 1.0, u);
        ModeSpec c = ModeSpec::make(2, 0, 0, 1.0, u);
        const double ext = 7.0 * a.waist;
        const GridField ga = sample_mode(a, 128, ext, 0.0, u).grid;
        const GridField gc = sample_mode(c, 128, ext, 0.0, u).grid;
        b.check("modes: <u_10|u_20> = 0 (1e-6)", std::abs(mode_overlap(ga, gc)) < 1e-6);
        b.check("modes: <u_10|u_10> = 1 (1e-4)", std::abs(mode_overlap(ga, ga) - 1.0) < 1e-4);
    }

    {  // spectral oracle against the analytic evolution
        const ModeSpec spec = ModeSpec::make(2, 0, 0, 1.0, units);
        const double tau_r = spec.rayleigh_time(units);
        const double tau = 0.7 * tau_r;
        const double ext = 8.0 * spec.width_at(tau, units);
        const GridField g0 = sample_mode(spec, 128, ext, 0.0, units).grid;
        const PropagateResult pr = propagate(g0, tau / 64, 64, units);
        const GridField ga = sample_mode(spec, 128, ext, tau, units).grid;
        b.check("oracle: norm preserved (1e-12)", std::fabs(pr.grid.norm() - g0.norm()) < 1e-12);
        b.check("oracle: overlap with analytic mode > 1 - 1e-5",
                std::abs(mode_overlap(pr.grid, ga)) > 1.0 - 1e-5);
    }

    {  // monopole flux by quadrature, uniform in cos(theta) so cells carry exact area
        const int nu = 128, nph = 128;
        double flux = 0.0;
        for (int i = 0; i < nu; ++i) {
            const double cu = 1.0 - 2.0 * (i + 0.5) / nu;
            const double sth = std::sqrt(std::max(0.0, 1.0 - cu * cu));
            for (int j = 0; j < nph; ++j) {
                const double ph = 2.0 * kPi * (j + 0.5) / nph;
                const Vec3 n{sth * std::cos(ph), sth * std::sin(ph), cu};
                const double r = 2.0;
                flux += dot(berry_curvature(r * n), n) * r * r * (2.0 / nu) * (2.0 * kPi / nph);
            }
        }
        b.check("monopole: flux through sphere = -4pi (1e-6)",
                std::fabs(flux + 4.0 * kPi) < 1e-6);
    }

    {  // loop phase, both routes
        MomentumPath path;
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            const double phi = 2.0 * kPi * i / n;
            path.points.push_back(
                {std::sin(kPi / 3) * std::cos(phi), std::sin(kPi / 3) * std::sin(phi),
                 std::cos(kPi / 3)});
        }
        path.points.back() = path.points.front();
        const LoopPhase lp = berry_phase_loop(path, 2);
        b.check("berry loop: line and solid-angle routes agree mod 2pi (1e-8)",
                lp.method_delta < 1e-8);
        b.check("berry loop: phase near -l 2pi (1 - cos th)",
                std::fabs(lp.phase + 2.0 * 2.0 * kPi * (1.0 - std::cos(kPi / 3))) < 1e-3);
    }

    {  // equations of motion residual
        const ZeemanParams zp = ZeemanParams::make(2, 1.0, units);
        const FieldConfig cfg = combined_uniform({0.01, 0.02, -0.03}, {0.0, 0.03, 0.07}, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 25; ++i) {
            PacketState s;
            s.r = 2.0 * rand_vec();
            s.p = rand_vec() + Vec3{0.0, 0.0, 2.0};
            const Derivatives d = rhs_solve(s, cfg, zp, units);
            const ZeemanGradients zg = zeeman_gradients(zp, s.r, s.p, cfg);
            const Vec3 curv = berry_curvature(s.p);
            const FieldSample fs = eval_fields(cfg, s.r);
            const Vec3 res1 = d.p_dot - (units.charge * fs.electric - zg.d_dr +
                                         units.charge * cross(d.r_dot, fs.magnetic));
            const Vec3 res2 = d.r_dot - (s.p / units.mass + zg.d_dp -
                                         units.hbar * zp.l * cross(d.p_dot, curv));
            worst = std::max({worst, norm(res1), norm(res2)});
        }
        b.check("rhs_solve: residual of both coupled equations < 1e-12", worst < 1e-12);
    }

    {  // bracket table against the closed forms
        double worst = 0.0, worst_d = 0.0, worst_flow = 0.0;
        const FieldConfig cfg = combined_uniform({0.0, 0.0, 0.01}, {0.2, -0.1, 0.4}, 1.0);
        for (int i = 0; i < 50; ++i) {
            const int l = 1 + (i % 3);
            Vec3 r, p;
            for (;;) {  // admissible: D away from the degenerate surface
                r = 2.0 * rand_vec();
                p = rand_vec() + Vec3{0.0, 0.0, 1.5};
                const double d = 1.0 - units.charge * units.hbar * l *
                                           dot(cfg.magnetic(r), berry_curvature(p));
                if (d > 0.3 && d < 1.7) break;
            }
            const SymplecticFrame f = build_frame(r, p, l, cfg, units);
            const Vec3 bf = cfg.magnetic(r);
            const Vec3 curv = berry_curvature(p);
            const double d = f.dos;
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) {
                    const int k = 3 - a - c;
                    double pp_expect = 0.0, rr_expect = 0.0;
                    if (a != c) {
                        const double sign = ((c - a + 3) % 3 == 1) ? 1.0 : -1.0;
                        pp_expect = sign * units.charge * bf[k] / d;
                        rr_expect = sign * units.hbar * l * curv[k] / d;
                    }
                    worst = std::max(worst, std::fabs(bracket(f, 3 + a, 3 + c) - pp_expect));
                    worst = std::max(worst, std::fabs(bracket(f, a, c) - rr_expect));
                    const double rp_expect =
                        ((a == c ? 1.0 : 0.0) -
                         units.charge * units.hbar * l * bf[a] * curv[c]) /
                        d;
                    worst = std::max(worst, std::fabs(bracket(f, a, 3 + c) - rp_expect));
                }
            worst_d = std::max(worst_d, std::fabs(std::fabs(d) - f.sqrt_det));

            // two independent routes to the same flow
            const ZeemanParams zp{l, 1.0, units.mu_bohr()};
            PacketState s;
            s.r = r;
            s.p = p;
            const Derivatives drv = rhs_solve(s, cfg, zp, units);
            const ZeemanGradients zg = zeeman_gradients(zp, r, p, cfg);
            const Vec6 grad_h = {-units.charge * cfg.electric(r).x + zg.d_dr.x,
                                 -units.charge * cfg.electric(r).y + zg.d_dr.y,
                                 -units.charge * cfg.electric(r).z + zg.d_dr.z,
                                 p.x / units.mass + zg.d_dp.x,
                                 p.y / units.mass + zg.d_dp.y,
                                 p.z / units.mass + zg.d_dp.z};
            const Vec6 flow = hamiltonian_flow(f, grad_h);
            worst_flow = std::max({worst_flow, std::fabs(flow[0] - drv.r_dot.x),
                                   std::fabs(flow[1] - drv.r_dot.y),
                                   std::fabs(flow[2] - drv.r_dot.z),
                                   std::fabs(flow[3] - drv.p_dot.x),
                                   std::fabs(flow[4] - drv.p_dot.y),
                                   std::fabs(flow[5] - drv.p_dot.z)});
        }
        b.check("brackets: numeric inverse matches closed forms (1e-12)", worst < 1e-12);
        b.check("brackets: |D - sqrt(det g)| < 1e-10", worst_d < 1e-10);
        b.check("flow: hamiltonian_flow matches rhs_solve (1e-10)", worst_flow < 1e-10);
    }

    {  // transverse shift, shortened run
        const double e0 = 0.05, p0 = 1.0;
        const double t_star = 100.0 * p0 / (std::fabs(units.charge) * e0);
        const FieldConfig field = FieldConfig::uniform_e({0.0, e0, 0.0});
        IntegratorConfig icfg;
        icfg.step = p0 / (std::fabs(units.charge) * e0) / 200.0;
        icfg.t_final = t_star;
        icfg.output_stride = 1 << 20;  // final point only
        PacketState s0;
        s0.p = {0.0, 0.0, p0};
        const ZeemanParams zp = ZeemanParams::make(1, 1.0, units);
        const Trajectory traj = integrate(s0, field, zp, icfg, units);
        const double shift = traj.points.back().r.x;
        const double expected = units.hbar * 1.0 / p0 * (units.charge * e0 >= 0 ? 1.0 : -1.0);
        b.check("dynamics: transverse shift -> hbar l / p0 (0.2%)",
                std::fabs(shift - expected) < 2e-3 * std::fabs(expected));
    }

    {  // magnetic drift, shortened run
        const double b0 = 0.05, p0 = 1.0, g = 0.0;
        const int l = 1;
        const double period = 2.0 * kPi * units.mass / (std::fabs(units.charge) * b0);
        const FieldConfig field = FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(g);
        IntegratorConfig icfg;
        icfg.step = period / 2000.0;
        icfg.t_final = 5.0 * period;
        icfg.output_stride = 1 << 20;
        PacketState s0;
        s0.p = {p0, 0.0, 0.0};
        const ZeemanParams zp = ZeemanParams::make(l, g, units);
        const Trajectory traj = integrate(s0, field, zp, icfg, units);
        const double drift = traj.points.back().r.z / icfg.t_final;
        const double expected =
            units.charge * units.hbar * l * (1.0 - g / 2.0) * b0 / (units.mass * p0);
        b.check("dynamics: magnetic drift matches e hbar l (1-g/2) B/(m p) (1e-4)",
                std::fabs(drift / expected - 1.0) < 1e-4);
    }

    {  // helicity conservation and the breakdown warning
        const double b0 = 0.1;
        const double period = 2.0 * kPi * units.mass / (std::fabs(units.charge) * b0);
        const double tilt = kPi / 3.0;
        PacketState s0;
        s0.p = {std::sin(tilt), 0.0, std::cos(tilt)};
        s0.l_vec = normalized(s0.p);
        IntegratorConfig icfg;
        icfg.step = period / 2000.0;
        icfg.t_final = 3.0 * period;
        icfg.oam_model = OamModel::precessing;
        const FieldConfig f2 = FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(2.0);
        const Trajectory t2 =
            integrate(s0, f2, ZeemanParams::make(1, 2.0, units), icfg, units);
        double worst = 0.0;
        for (const auto& pt : t2.points) worst = std::max(worst, std::fabs(pt.helicity - 1.0));
        b.check("helicity: conserved at g=2 in B (1e-9)", worst < 1e-9 && !t2.validity_warning);
        const FieldConfig f1 = FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(1.0);
        const Trajectory t1 =
            integrate(s0, f1, ZeemanParams::make(1, 1.0, units), icfg, units);
        b.check("helicity: validity warning fires at g=1 in B within one period",
                t1.validity_warning && t1.validity_warning_time < period);
    }

    {  // config round-trip
        const std::string text =
            "field.type = \"uniform_e\"\nfield.vector = [0, 0.02, 0]\npacket.l = 2\n"
            "integrator.t_final = 10\n";
        const RunConfig c1 = parse_config(text);
        const RunConfig c2 = parse_config(serialize_config(c1));
        b.check("config: serialize/parse round trip", c1 == c2);
        bool threw = false;
        try {
            parse_config("packet.l = 1.5\n");
        } catch (const Error&) {
            threw = true;
        }
        b.check("config: fractional packet.l rejected", threw);
    }

    out << (b.failures == 0 ? "all checks passed\n"
                            : std::to_string(b.failures) + " check(s) FAILED\n");
    return b.failures;
}

}  // namespace vortex
