#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vortexpacket/dynamics.hpp"

using namespace vortex;

namespace {
constexpr double kPi = std::numbers::pi;
const UnitSystem kUnits;

FieldConfig combined_uniform(const Vec3& e0, const Vec3& b0, double g) {
    return FieldConfig::user_supplied(
               [e0](const Vec3&) { return e0; }, [b0](const Vec3&) { return b0; },
               [e0](const Vec3& r) { return -dot(e0, r); },
               [b0](const Vec3& r) { return 0.5 * cross(b0, r); }, "symmetric+electrostatic")
        .with_g_factor(g);
}
}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("rhs_solve reduces to the Lorentz force at l = 0") {
    const ZeemanParams zp = ZeemanParams::make(0, 1.0, kUnits);
    const FieldConfig cfg = combined_uniform({0.02, 0.0, 0.01}, {0.0, 0.1, 0.3}, 1.0);
    PacketState s;
    s.r = {0.4, -0.2, 1.0};
    s.p = {0.3, 0.8, 1.2};
    const Derivatives d = rhs_solve(s, cfg, zp, kUnits);
    const Vec3 v_expect = s.p / kUnits.mass;
    const Vec3 f_expect = kUnits.charge * cfg.electric(s.r) +
                          kUnits.charge * cross(v_expect, cfg.magnetic(s.r));
    CHECK(norm(d.r_dot - v_expect) < 1e-15);
    CHECK(norm(d.p_dot - f_expect) < 1e-15);
    CHECK(d.dos == 1.0);
}

TEST_CASE("rhs_solve in a pure electric field matches the closed form") {
    // B = 0: rdot = p/m + e hbar l E x p / p^3
    const int l = 3;
    const ZeemanParams zp = ZeemanParams::make(l, 1.0, kUnits);
    const FieldConfig cfg = FieldConfig::uniform_e({0.0, 0.05, 0.0});
    PacketState s;
    s.p = {0.1, -0.4, 1.1};
    const Derivatives d = rhs_solve(s, cfg, zp, kUnits);
    const double p = norm(s.p);
    const Vec3 expect = s.p / kUnits.mass + kUnits.charge * kUnits.hbar * l *
                                                cross(cfg.electric({}), s.p) / (p * p * p);
    CHECK(norm(d.r_dot - expect) < 1e-15);
    CHECK(norm(d.p_dot - kUnits.charge * cfg.electric({})) < 1e-15);
}

TEST_CASE("rhs_solve satisfies both implicit equations to machine precision") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const FieldConfig cfg = combined_uniform({0.03, -0.01, 0.02}, {0.05, 0.2, -0.1}, 1.0);
    for (int i = 0; i < 100; ++i) {
        const int l = -4 + (i % 9);
        const ZeemanParams zp = ZeemanParams::make(l, 1.0, kUnits);
        PacketState s;
        s.r = {2.0 * u(rng), 2.0 * u(rng), 2.0 * u(rng)};
        s.p = {u(rng), u(rng), 1.5 + 0.5 * u(rng)};
        const Derivatives d = rhs_solve(s, cfg, zp, kUnits);
        const ZeemanGradients zg = zeeman_gradients(zp, s.r, s.p, cfg);
        const FieldSample fs = eval_fields(cfg, s.r);
        const Vec3 curv = berry_curvature(s.p);
        const Vec3 res1 = d.p_dot - (kUnits.charge * fs.electric - zg.d_dr +
                                     kUnits.charge * cross(d.r_dot, fs.magnetic));
        const Vec3 res2 = d.r_dot - (s.p / kUnits.mass + zg.d_dp -
                                     kUnits.hbar * l * cross(d.p_dot, curv));
        CHECK(norm(res1) < 1e-12);
        CHECK(norm(res2) < 1e-12);
        // anomalous velocity is orthogonal to pdot
        CHECK(std::fabs(dot(d.r_dot - s.p / kUnits.mass - zg.d_dp, d.p_dot)) < 1e-12);
    }
}

TEST_CASE("first-order coupling reproduces the reduced drift form") {
    // uniform B with p perpendicular: both couplings give
    // rdot = p/m + e hbar l (1 - g/2) B / (m p)
    const double b0 = 0.2, g = 0.5;
    const int l = 2;
    const ZeemanParams zp = ZeemanParams::make(l, g, kUnits);
    const FieldConfig cfg = FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(g);
    PacketState s;
    s.p = {1.3, 0.0, 0.0};
    const Vec3 expect = s.p / kUnits.mass +
                        (kUnits.charge * kUnits.hbar * l * (1.0 - g / 2.0) * b0 /
                         (kUnits.mass * norm(s.p))) *
                            Vec3{0.0, 0.0, 1.0};
    const Derivatives d_first = rhs_solve(s, cfg, zp, kUnits, CouplingMode::first_order);
    const Derivatives d_exact = rhs_solve(s, cfg, zp, kUnits, CouplingMode::exact);
    CHECK(norm(d_first.r_dot - expect) < 1e-14);
    // for p perpendicular to B the exact solve coincides with the reduced form
    CHECK(norm(d_exact.r_dot - d_first.r_dot) < 1e-14);

    // tilted momentum: the two couplings differ at second order in hbar l B/p^2
    s.p = {1.0, 0.0, 0.7};
    const Derivatives t_first = rhs_solve(s, cfg, zp, kUnits, CouplingMode::first_order);
    const Derivatives t_exact = rhs_solve(s, cfg, zp, kUnits, CouplingMode::exact);
    const double small = kUnits.hbar * l * b0 / norm2(s.p);
    CHECK(norm(t_exact.r_dot - t_first.r_dot) < 10.0 * small * small * norm(t_exact.r_dot));
    CHECK(norm(t_exact.r_dot - t_first.r_dot) > 0.0);
}

TEST_CASE("degenerate density of states is refused") {
    // e = -1, l = 1, B = e_z, p = e_z: D = 1 + B.curv = 1 - 1 = 0
    const ZeemanParams zp = ZeemanParams::make(1, 0.0, kUnits);
    const FieldConfig cfg = FieldConfig::uniform_b({0.0, 0.0, 1.0});
    PacketState s;
    s.p = {0.0, 0.0, 1.0};
    CHECK_THROWS_AS(rhs_solve(s, cfg, zp, kUnits), Error);
}

TEST_CASE("precession") {
    SUBCASE("free space does not precess") {
        PacketState s;
        s.p = {0.0, 0.0, 1.0};
        s.l_vec = {1.0, 0.0, 0.0};
        CHECK(norm(precess_oam(s, FieldConfig::free_space(), kUnits)) == 0.0);
    }
    SUBCASE("rate about B matches |e| B / m") {
        const double b0 = 0.2;
        PacketState s;
        s.p = {0.0, 0.0, 1.0};
        s.l_vec = {1.0, 0.0, 0.0};  // perpendicular to B
        const Vec3 ldot = precess_oam(s, FieldConfig::uniform_b({0.0, 0.0, b0}), kUnits);
        // ldot = omega x l with omega = -(e/m) B = +|e| B/m e_z
        const Vec3 expect = cross(Vec3{0.0, 0.0, std::fabs(kUnits.charge) * b0 / kUnits.mass},
                                  s.l_vec);
        CHECK(norm(ldot - expect) < 1e-15);
    }
    SUBCASE("norm of l_vec is conserved over ten periods") {
        const double b0 = 0.15;
        const double period = 2.0 * kPi * kUnits.mass / (std::fabs(kUnits.charge) * b0);
        PacketState s0;
        s0.p = {1.0, 0.0, 0.0};
        s0.l_vec = {0.3, -0.4, 1.2};
        IntegratorConfig icfg;
        icfg.oam_model = OamModel::precessing;
        icfg.step = period / 2000.0;
        icfg.t_final = 10.0 * period;
        icfg.output_stride = 100;
        const ZeemanParams zp = ZeemanParams::make(1, 2.0, kUnits);
        const Trajectory traj =
            integrate(s0, FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(2.0), zp, icfg,
                      kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        const double n0 = norm(s0.l_vec);
        for (const auto& pt : traj.points) CHECK(std::fabs(norm(pt.l_vec) - n0) < 1e-10);
    }
}

TEST_CASE("phase rates") {
    SUBCASE("free particle accumulates (p z - E t)/hbar") {
        const ZeemanParams zp = ZeemanParams::make(1, 1.0, kUnits);
        PacketState s0;
        s0.p = {0.0, 0.0, 2.0};
        IntegratorConfig icfg;
        icfg.step = 0.01;
        icfg.t_final = 5.0;
        icfg.output_stride = 1 << 20;
        const Trajectory traj = integrate(s0, FieldConfig::free_space(), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        const auto& last = traj.points.back();
        const double energy = 2.0 * 2.0 / (2.0 * kUnits.mass);
        const double expect = (2.0 * last.r.z - energy * last.t) / kUnits.hbar;
        CHECK(last.theta_dyn == doctest::Approx(expect).epsilon(1e-10));
        CHECK(last.theta_dirac == 0.0);  // A = 0 everywhere
    }
    SUBCASE("full cyclotron turn accumulates the loop Berry phase") {
        const double b0 = 0.25;
        const int l = 2;
        const double period = 2.0 * kPi * kUnits.mass / (std::fabs(kUnits.charge) * b0);
        PacketState s0;
        s0.p = {1.0, 0.0, 0.0};  // equatorial momentum loop
        IntegratorConfig icfg;
        icfg.step = period / 4000.0;
        icfg.t_final = period;
        icfg.output_stride = 50;
        const ZeemanParams zp = ZeemanParams::make(l, 1.0, kUnits);
        const Trajectory traj =
            integrate(s0, FieldConfig::uniform_b({0.0, 0.0, b0}), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        const double dtheta = traj.points.back().theta_berry - traj.points.front().theta_berry;

        MomentumPath loop;
        for (const auto& pt : traj.points) loop.points.push_back(pt.p);
        loop.points.push_back(traj.points.front().p);
        const LoopPhase lp = berry_phase_loop(loop, l);
        CHECK(std::fabs(std::remainder(dtheta - lp.phase, 2.0 * kPi)) < 1e-6);
        // equatorial cap: Omega = 2 pi, so the change is -l * 2 pi
        CHECK(dtheta == doctest::Approx(-l * 2.0 * kPi).epsilon(1e-6));
    }
}

TEST_CASE("transverse OAM Hall shift in a uniform electric field") {
    const double e0 = 0.05, p0 = 1.0;
    const double a = kUnits.charge * e0;
    const double t_star = 100.0 * p0 / (std::fabs(kUnits.charge) * e0);
    const FieldConfig field = FieldConfig::uniform_e({0.0, e0, 0.0});
    IntegratorConfig icfg;
    icfg.step = (p0 / (std::fabs(kUnits.charge) * e0)) / 200.0;
    icfg.t_final = t_star;
    icfg.output_stride = 100;

    for (int l = -3; l <= 3; ++l) {
        const ZeemanParams zp = ZeemanParams::make(l, 1.0, kUnits);
        PacketState s0;
        s0.p = {0.0, 0.0, p0};
        const Trajectory traj = integrate(s0, field, zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        const double shift = traj.points.back().r.x;
        const double expect = kUnits.hbar * l / p0 * (a > 0.0 ? 1.0 : -1.0);
        if (l == 0) {
            CHECK(std::fabs(shift) < 1e-12);
        } else {
            CHECK(shift == doctest::Approx(expect).epsilon(1e-3));
            // the displacement approaches its asymptote monotonically
            const double dir = expect > 0.0 ? 1.0 : -1.0;
            for (size_t i = 1; i < traj.points.size(); ++i)
                CHECK(dir * (traj.points[i].r.x - traj.points[i - 1].r.x) > -1e-12);
        }
    }
}

TEST_CASE("l = 0 trajectory is the classical parabola") {
    const double e0 = 0.02, p0 = 1.0;
    const ZeemanParams zp = ZeemanParams::make(0, 1.0, kUnits);
    IntegratorConfig icfg;
    icfg.step = 0.05;
    icfg.t_final = 100.0;
    icfg.output_stride = 100;
    PacketState s0;
    s0.p = {0.0, 0.0, p0};
    const Trajectory traj =
        integrate(s0, FieldConfig::uniform_e({0.0, e0, 0.0}), zp, icfg, kUnits);
    REQUIRE(traj.status == RunStatus::ok);
    for (const auto& pt : traj.points) {
        const Vec3 expect = oracle::uniform_e_position(pt.t, p0, kUnits.charge * e0, 0,
                                                       kUnits.hbar, kUnits.mass);
        CHECK(norm(pt.r - expect) < 1e-9);
    }
}

TEST_CASE("magnetic drift law in slaved mode") {
    const double b0 = 0.05, p0 = 1.0, g = 1.0;
    const int l = 1;
    const double period = 2.0 * kPi * kUnits.mass / (std::fabs(kUnits.charge) * b0);
    IntegratorConfig icfg;
    icfg.step = period / 2000.0;
    icfg.t_final = 20.0 * period;
    icfg.output_stride = 1 << 20;
    PacketState s0;
    s0.p = {p0, 0.0, 0.0};
    const ZeemanParams zp = ZeemanParams::make(l, g, kUnits);
    const Trajectory traj =
        integrate(s0, FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(g), zp, icfg, kUnits);
    REQUIRE(traj.status == RunStatus::ok);
    const double drift = traj.points.back().r.z / traj.points.back().t;
    const double expect =
        kUnits.charge * kUnits.hbar * l * (1.0 - g / 2.0) * b0 / (kUnits.mass * p0);
    CHECK(drift == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("helicity") {
    SUBCASE("slaved mode pins helicity to l") {
        const ZeemanParams zp = ZeemanParams::make(3, 1.0, kUnits);
        IntegratorConfig icfg;
        icfg.step = 0.05;
        icfg.t_final = 20.0;
        icfg.output_stride = 10;
        PacketState s0;
        s0.p = {0.3, 0.1, 1.0};
        const Trajectory traj =
            integrate(s0, FieldConfig::uniform_e({0.0, 0.02, 0.0}), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        for (const auto& pt : traj.points) CHECK(pt.helicity == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("precessing mode conserves helicity at g = 2 in B") {
        const double b0 = 0.1, tilt = kPi / 3.0;
        const double period = 2.0 * kPi * kUnits.mass / (std::fabs(kUnits.charge) * b0);
        PacketState s0;
        s0.p = {std::sin(tilt), 0.0, std::cos(tilt)};
        s0.l_vec = normalized(s0.p);
        IntegratorConfig icfg;
        icfg.oam_model = OamModel::precessing;
        icfg.step = period / 2000.0;
        icfg.t_final = 10.0 * period;
        icfg.output_stride = 200;
        const ZeemanParams zp = ZeemanParams::make(1, 2.0, kUnits);
        const Trajectory traj = integrate(
            s0, FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(2.0), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        for (const auto& pt : traj.points) CHECK(std::fabs(pt.helicity - 1.0) < 1e-9);
        CHECK(!traj.validity_warning);
    }
    SUBCASE("breakdown regime g != 2 in B fires the validity warning") {
        const double b0 = 0.1, tilt = kPi / 3.0;
        const double period = 2.0 * kPi * kUnits.mass / (std::fabs(kUnits.charge) * b0);
        PacketState s0;
        s0.p = {std::sin(tilt), 0.0, std::cos(tilt)};
        s0.l_vec = normalized(s0.p);
        IntegratorConfig icfg;
        icfg.oam_model = OamModel::precessing;
        icfg.step = period / 2000.0;
        icfg.t_final = 2.0 * period;
        icfg.output_stride = 20;
        const ZeemanParams zp = ZeemanParams::make(1, 1.0, kUnits);
        const Trajectory traj = integrate(
            s0, FieldConfig::uniform_b({0.0, 0.0, b0}).with_g_factor(1.0), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        CHECK(traj.validity_warning);
        CHECK(traj.validity_warning_time < period);
        double worst = 0.0;
        for (const auto& pt : traj.points)
            worst = std::max(worst, std::fabs(pt.helicity - 1.0));
        CHECK(worst > 1e-3);  // deviation grows, per the breakdown analysis
    }
    SUBCASE("helicity is conserved for any g when B = 0") {
        PacketState s0;
        s0.p = {0.0, 0.0, 1.0};
        s0.l_vec = {0.0, 0.0, 2.0};
        IntegratorConfig icfg;
        icfg.oam_model = OamModel::precessing;
        icfg.step = 0.02;
        icfg.t_final = 500.0;
        icfg.output_stride = 1000;
        const ZeemanParams zp = ZeemanParams::make(2, 0.7, kUnits);
        const Trajectory traj = integrate(
            s0, FieldConfig::uniform_e({0.0, 0.01, 0.0}).with_g_factor(0.7), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        for (const auto& pt : traj.points) CHECK(std::fabs(pt.helicity - 2.0) < 1e-9);
    }
}

TEST_CASE("energy is conserved in static fields") {
    IntegratorConfig icfg;
    icfg.method = StepperKind::rkf45;
    icfg.rtol = 1e-10;
    icfg.atol = 1e-12;
    icfg.t_final = 200.0;
    icfg.output_stride = 50;

    SUBCASE("uniform E") {
        const ZeemanParams zp = ZeemanParams::make(2, 1.0, kUnits);
        PacketState s0;
        s0.p = {0.0, 0.0, 1.0};
        const Trajectory traj =
            integrate(s0, FieldConfig::uniform_e({0.0, 0.02, 0.0}), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        const double h0 = traj.points.front().energy;
        for (const auto& pt : traj.points)
            CHECK(std::fabs(pt.energy - h0) / std::fabs(h0) < 1e-8);
    }
    SUBCASE("uniform B, tilted momentum") {
        const ZeemanParams zp = ZeemanParams::make(1, 1.0, kUnits);
        PacketState s0;
        s0.p = {0.6, 0.0, 0.8};
        const Trajectory traj = integrate(
            s0, FieldConfig::uniform_b({0.0, 0.0, 0.2}).with_g_factor(1.0), zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        const double h0 = traj.points.front().energy;
        for (const auto& pt : traj.points)
            CHECK(std::fabs(pt.energy - h0) / std::fabs(h0) < 1e-8);
    }
}

TEST_CASE("l = 0 integration equals an independent Lorentz tracer") {
    const double b0 = 0.3;
    const Vec3 e_field{0.01, 0.0, 0.02};
    const FieldConfig cfg = combined_uniform(e_field, {0.0, 0.0, b0}, 1.0);
    const ZeemanParams zp = ZeemanParams::make(0, 1.0, kUnits);
    IntegratorConfig icfg;
    icfg.step = 0.02;
    icfg.t_final = 40.0;
    icfg.output_stride = 1;
    PacketState s0;
    s0.r = {0.1, 0.0, 0.0};
    s0.p = {1.0, 0.2, 0.1};
    const Trajectory traj = integrate(s0, cfg, zp, icfg, kUnits);
    REQUIRE(traj.status == RunStatus::ok);

    const auto ref = oracle::lorentz_rk4(s0.r, s0.p, e_field, {0.0, 0.0, b0}, kUnits.charge,
                                         kUnits.mass, icfg.step, 2000);
    REQUIRE(traj.points.size() == ref.size());
    double worst = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        worst = std::max(worst, norm(traj.points[i].r - ref[i].r));
        worst = std::max(worst, norm(traj.points[i].p - ref[i].p));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
    const double e0 = 0.05, p0 = 1.0;
    const int l = 1;
    const double a = kUnits.charge * e0;
    const double t_end = 40.0;
    const FieldConfig field = FieldConfig::uniform_e({0.0, e0, 0.0});
    const ZeemanParams zp = ZeemanParams::make(l, 1.0, kUnits);
    const Vec3 exact = oracle::uniform_e_position(t_end, p0, a, l, kUnits.hbar, kUnits.mass);

    // the error lives in the anomalous-velocity component; the parabola parts
    // are integrated exactly by RK4 and only carry roundoff
    std::vector<double> errors;
    for (double h : {1.6, 0.8, 0.4, 0.2}) {
        IntegratorConfig icfg;
        icfg.step = h;
        icfg.t_final = t_end;
        icfg.output_stride = 1 << 20;
        PacketState s0;
        s0.p = {0.0, 0.0, p0};
        const Trajectory traj = integrate(s0, field, zp, icfg, kUnits);
        REQUIRE(traj.status == RunStatus::ok);
        errors.push_back(std::fabs(traj.points.back().r.x - exact.x));
    }
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        const double order = std::log2(errors[i] / errors[i + 1]);
        CHECK(order >= 3.8);
    }
}

TEST_CASE("aborts carry the partial trajectory") {
    // heading straight into the momentum floor: p(t) = p0 + e E t crosses zero
    const ZeemanParams zp = ZeemanParams::make(1, 1.0, kUnits);
    const FieldConfig field = FieldConfig::uniform_e({0.0, 0.5, 0.0});
    PacketState s0;
    s0.p = {0.0, 0.5, 0.0};  // anti-parallel deceleration for e = -1
    IntegratorConfig icfg;
    icfg.step = 0.001;
    icfg.t_final = 10.0;
    icfg.output_stride = 10;
    const Trajectory traj = integrate(s0, field, zp, icfg, kUnits);
    CHECK(traj.status == RunStatus::singularity_abort);
    CHECK(!traj.points.empty());
    CHECK(!traj.message.empty());
}

}  // TEST_SUITE
