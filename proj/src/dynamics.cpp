#include "vortexpacket/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace vortex {

namespace {

constexpr double kDegeneracyFloor = 1e-6;
// relative transverse momentum below which the fixed gauge is considered unsafe
constexpr double kStringMargin = 1e-4;

using State = std::array<double, 12>;  // r(3), p(3), theta_dyn/dirac/berry, l_vec(3)

State pack(const PacketState& s) {
    return {s.r.x, s.r.y, s.r.z, s.p.x, s.p.y, s.p.z,
            s.theta_dyn, s.theta_dirac, s.theta_berry, s.l_vec.x, s.l_vec.y, s.l_vec.z};
}

PacketState unpack(const State& y, double t) {
    PacketState s;
    s.r = {y[0], y[1], y[2]};
    s.p = {y[3], y[4], y[5]};
    s.theta_dyn = y[6];
    s.theta_dirac = y[7];
    s.theta_berry = y[8];
    s.l_vec = {y[9], y[10], y[11]};
    s.t = t;
    return s;
}

void require_momentum(const Vec3& p) {
    if (norm(p) <= kMomentumFloor)
        throw Error(ErrorCode::monopole_singularity, "dynamics: |p| at or below the momentum floor");
}

}  // namespace

void IntegratorConfig::validate() const {
    if (method == StepperKind::rkf45 && (rtol < 1e-12 || rtol > 1e-3))
        throw Error(ErrorCode::invalid_argument, "integrator.rtol must lie in [1e-12, 1e-3]");
    if (atol <= 0.0) throw Error(ErrorCode::invalid_argument, "integrator.atol must be > 0");
    if (step < 0.0) throw Error(ErrorCode::invalid_argument, "integrator.step must be >= 0");
    if (!(t_final > 0.0)) throw Error(ErrorCode::invalid_argument, "integrator.t_final must be > 0");
    if (output_stride < 1)
        throw Error(ErrorCode::invalid_argument, "integrator.output_stride must be >= 1");
}

Derivatives rhs_solve(const PacketState& state, const FieldConfig& cfg, const ZeemanParams& zp,
                      const UnitSystem& units, CouplingMode mode) {
    require_momentum(state.p);
    const double e = units.charge;
    const double hbar = units.hbar;
    const double m = units.mass;
    const int l = zp.l;

    const FieldSample fs = eval_fields(cfg, state.r);
    const Vec3 curv = berry_curvature(state.p);

    Vec3 d_delta_dr{}, d_delta_dp{};
    if (l != 0 && zp.g_factor != 0.0) {
        const ZeemanGradients zg = zeeman_gradients(zp, state.r, state.p, cfg);
        d_delta_dr = zg.d_dr;
        d_delta_dp = zg.d_dp;
    }

    const Vec3 f0 = e * fs.electric - d_delta_dr;
    const Vec3 v0 = state.p / m + d_delta_dp;

    Derivatives out;
    out.dos = 1.0 - e * hbar * l * dot(fs.magnetic, curv);

    Vec3 v;
    if (mode == CouplingMode::exact) {
        if (std::fabs(out.dos) <= kDegeneracyFloor)
            throw Error(ErrorCode::degenerate_structure,
                        "rhs_solve: density-of-states factor D within 1e-6 of zero");
        // (I + hbar l e (B curv^T - (B.curv) I)) v = rhs; the Sherman-Morrison
        // inverse collapses to (rhs - e hbar l B (curv.rhs)) / D.
        const Vec3 rhs = v0 - hbar * l * cross(f0, curv);
        v = (rhs - (e * hbar * l * dot(curv, rhs)) * fs.magnetic) / out.dos;
    } else {
        // reduced form: anomalous term evaluated with the Lorentz force
        const Vec3 p_dot0 = f0 + e * cross(state.p / m, fs.magnetic);
        v = v0 - hbar * l * cross(p_dot0, curv);
    }
    out.r_dot = v;
    out.p_dot = f0 + e * cross(v, fs.magnetic);
    return out;
}

Vec3 precess_oam(const PacketState& state, const FieldConfig& cfg, const UnitSystem& units) {
    require_momentum(state.p);
    const FieldSample fs = eval_fields(cfg, state.r);
    const double p2 = norm2(state.p);
    const Vec3 omega =
        (units.charge / units.mass) * fs.magnetic + (units.charge / p2) * cross(fs.electric, state.p);
    return -cross(omega, state.l_vec);
}

double hamiltonian(const PacketState& state, const FieldConfig& cfg, const ZeemanParams& zp,
                   const UnitSystem& units) {
    require_momentum(state.p);
    const double kinetic = norm2(state.p) / (2.0 * units.mass);
    const double potential = units.charge * cfg.scalar_potential(state.r);
    const Vec3 l_slaved = static_cast<double>(zp.l) * normalized(state.p);
    const double delta = zeeman_energy(zp, l_slaved, cfg.magnetic(state.r));
    return kinetic + potential + delta;
}

PhaseRates phase_rates(const PacketState& state, const Vec3& r_dot, const Vec3& p_dot,
                       const FieldConfig& cfg, const ZeemanParams& zp, const UnitSystem& units) {
    require_momentum(state.p);
    PhaseRates out;
    const double h = hamiltonian(state, cfg, zp, units);
    out.dyn = (dot(state.p, r_dot) - h) / units.hbar;
    out.dirac = units.charge * dot(cfg.vector_potential(state.r), r_dot) / units.hbar;

    const double pn = norm(state.p);
    const double rho = std::hypot(state.p.x, state.p.y);
    if (rho < kStringMargin * pn && state.p.z < 0.0) {
        out.gauge_ok = false;  // too close to the Dirac string for the fixed gauge
        out.berry = 0.0;
    } else {
        out.berry = zp.l * dot(berry_connection(state.p), p_dot);
    }
    return out;
}

double helicity(const PacketState& state) {
    require_momentum(state.p);
    return dot(state.l_vec, state.p) / norm(state.p);
}

namespace {

struct RhsContext {
    const FieldConfig& cfg;
    const ZeemanParams& zp;
    const UnitSystem& units;
    const IntegratorConfig& icfg;
    bool gauge_failed = false;
};

State eval_rhs(RhsContext& ctx, const State& y, double t) {
    PacketState s = unpack(y, t);
    const Derivatives d = rhs_solve(s, ctx.cfg, ctx.zp, ctx.units, ctx.icfg.coupling);
    const PhaseRates ph = phase_rates(s, d.r_dot, d.p_dot, ctx.cfg, ctx.zp, ctx.units);
    if (!ph.gauge_ok) ctx.gauge_failed = true;

    Vec3 l_dot{};
    if (ctx.icfg.oam_model == OamModel::precessing) l_dot = precess_oam(s, ctx.cfg, ctx.units);

    return {d.r_dot.x, d.r_dot.y, d.r_dot.z, d.p_dot.x, d.p_dot.y, d.p_dot.z,
            ph.dyn, ph.dirac, ph.berry, l_dot.x, l_dot.y, l_dot.z};
}

State axpy(const State& y, double h, const State& k) {
    State out;
    for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
    return out;
}

// classic RK4 stage combination
State rk4_step(RhsContext& ctx, const State& y, double t, double h) {
    const State k1 = eval_rhs(ctx, y, t);
    const State k2 = eval_rhs(ctx, axpy(y, 0.5 * h, k1), t + 0.5 * h);
    const State k3 = eval_rhs(ctx, axpy(y, 0.5 * h, k2), t + 0.5 * h);
    const State k4 = eval_rhs(ctx, axpy(y, h, k3), t + h);
    State out;
    for (size_t i = 0; i < y.size(); ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Fehlberg 4(5) pair; returns the 5th-order solution and the scaled error norm.
double rkf45_step(RhsContext& ctx, const State& y, double t, double h, State& out) {
    static constexpr double a2 = 0.25;
    static constexpr double b31 = 3.0 / 32.0, b32 = 9.0 / 32.0;
    static constexpr double b41 = 1932.0 / 2197.0, b42 = -7200.0 / 2197.0, b43 = 7296.0 / 2197.0;
    static constexpr double b51 = 439.0 / 216.0, b52 = -8.0, b53 = 3680.0 / 513.0,
                            b54 = -845.0 / 4104.0;
    static constexpr double b61 = -8.0 / 27.0, b62 = 2.0, b63 = -3544.0 / 2565.0,
                            b64 = 1859.0 / 4104.0, b65 = -11.0 / 40.0;
    static constexpr double c51 = 16.0 / 135.0, c53 = 6656.0 / 12825.0, c54 = 28561.0 / 56430.0,
                            c55 = -9.0 / 50.0, c56 = 2.0 / 55.0;
    static constexpr double c41 = 25.0 / 216.0, c43 = 1408.0 / 2565.0, c44 = 2197.0 / 4104.0,
                            c45 = -1.0 / 5.0;

    const State k1 = eval_rhs(ctx, y, t);
    const State k2 = eval_rhs(ctx, axpy(y, a2 * h, k1), t + 0.25 * h);
    State tmp;
    for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    const State k3 = eval_rhs(ctx, tmp, t + 3.0 / 8.0 * h);
    for (size_t i = 0; i < y.size(); ++i)
        tmp[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    const State k4 = eval_rhs(ctx, tmp, t + 12.0 / 13.0 * h);
    for (size_t i = 0; i < y.size(); ++i)
        tmp[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    const State k5 = eval_rhs(ctx, tmp, t + h);
    for (size_t i = 0; i < y.size(); ++i)
        tmp[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
    const State k6 = eval_rhs(ctx, tmp, t + 0.5 * h);

    double err2 = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double y5 = y[i] + h * (c51 * k1[i] + c53 * k3[i] + c54 * k4[i] + c55 * k5[i] +
                                      c56 * k6[i]);
        const double y4 =
            y[i] + h * (c41 * k1[i] + c43 * k3[i] + c44 * k4[i] + c45 * k5[i]);
        out[i] = y5;
        const double scale =
            ctx.icfg.atol + ctx.icfg.rtol * std::max(std::fabs(y[i]), std::fabs(y5));
        const double e = (y5 - y4) / scale;
        err2 += e * e;
    }
    return std::sqrt(err2 / y.size());
}

double auto_step(const PacketState& s0, const FieldConfig& cfg, const UnitSystem& units,
                 double t_final) {
    const FieldSample fs = eval_fields(cfg, s0.r);
    const double abs_e = std::fabs(units.charge);
    double dt = t_final / 1000.0;
    if (norm(fs.magnetic) > 0.0)
        dt = std::min(dt, 2.0 * std::numbers::pi * units.mass / (abs_e * norm(fs.magnetic)) / 200.0);
    if (norm(fs.electric) > 0.0)
        dt = std::min(dt, norm(s0.p) / (abs_e * norm(fs.electric)) / 200.0);
    return dt;
}

}  // namespace

Trajectory integrate(const PacketState& state0, const FieldConfig& cfg, const ZeemanParams& zp,
                     const IntegratorConfig& icfg, const UnitSystem& units) {
    icfg.validate();
    units.validate();
    require_momentum(state0.p);

    Trajectory traj;
    RhsContext ctx{cfg, zp, units, icfg};

    State y = pack(state0);
    if (icfg.oam_model == OamModel::slaved) {
        const Vec3 lv = static_cast<double>(zp.l) * normalized(state0.p);
        y[9] = lv.x;
        y[10] = lv.y;
        y[11] = lv.z;
    }

    double t = 0.0;
    double omega_acc = 0.0;  // incremental solid angle swept by phat (north-pole fan)
    Vec3 phat_prev = normalized(state0.p);
    const Vec3 fan_ref{0.0, 0.0, 1.0};

    const bool adaptive = icfg.method == StepperKind::rkf45;
    double h = icfg.step > 0.0 ? icfg.step : auto_step(state0, cfg, units, icfg.t_final);
    h = std::min(h, icfg.t_final);

    std::vector<double> omega_history;  // lets the whole column switch method at the end

    auto record = [&](const State& ys, double ts) {
        PacketState s = unpack(ys, ts);
        if (icfg.oam_model == OamModel::slaved) s.l_vec = static_cast<double>(zp.l) * normalized(s.p);
        TrajectoryPoint pt;
        pt.t = ts;
        pt.r = s.r;
        pt.p = s.p;
        pt.l_vec = s.l_vec;
        pt.helicity = helicity(s);
        pt.theta_dyn = s.theta_dyn;
        pt.theta_dirac = s.theta_dirac;
        pt.theta_berry = s.theta_berry;
        pt.energy = hamiltonian(s, cfg, zp, units);
        const Derivatives d = rhs_solve(s, cfg, zp, units, icfg.coupling);
        pt.dos = d.dos;
        omega_history.push_back(omega_acc);
        traj.points.push_back(pt);

        // breakdown monitor: precessing OAM no longer follows phat
        if (icfg.oam_model == OamModel::precessing && !traj.validity_warning &&
            cfg.g_factor() != 2.0 && norm(cfg.magnetic(s.r)) > 0.0 && norm(s.l_vec) > 0.0) {
            const Vec3 lhat = normalized(s.l_vec);
            const Vec3 phat = normalized(s.p);
            const double angle = std::atan2(norm(cross(lhat, phat)), dot(lhat, phat));
            if (angle > icfg.alignment_warn) {
                traj.validity_warning = true;
                traj.validity_warning_time = ts;
            }
        }
    };

    constexpr long kMaxSteps = 200'000'000;
    long accepted = 0;
    try {
        record(y, 0.0);
        while (t < icfg.t_final) {
            if (++accepted > kMaxSteps) {
                traj.status = RunStatus::step_overflow;
                traj.message = "integrate: step budget exhausted";
                break;
            }
            const double h_eff = std::min(h, icfg.t_final - t);
            State y_next;
            if (adaptive) {
                const double err = rkf45_step(ctx, y, t, h_eff, y_next);
                if (err > 1.0 && h_eff > 1e-14 * icfg.t_final) {
                    h = h_eff * std::max(0.2, 0.9 * std::pow(err, -0.25));
                    --accepted;
                    continue;  // rejected step
                }
                h = h_eff * std::clamp(err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0, 0.2, 5.0);
            } else {
                y_next = rk4_step(ctx, y, t, h_eff);
            }
            t += h_eff;
            y = y_next;

            if (icfg.oam_model == OamModel::slaved) {
                const Vec3 p{y[3], y[4], y[5]};
                const Vec3 lv = static_cast<double>(zp.l) * normalized(p);
                y[9] = lv.x;
                y[10] = lv.y;
                y[11] = lv.z;
            }

            const Vec3 phat = normalized(Vec3{y[3], y[4], y[5]});
            omega_acc += triangle_solid_angle(fan_ref, phat_prev, phat);
            phat_prev = phat;

            if (accepted % icfg.output_stride == 0 || t >= icfg.t_final) record(y, t);
        }
    } catch (const Error& err) {
        traj.status = err.code() == ErrorCode::degenerate_structure ? RunStatus::degeneracy_abort
                                                                    : RunStatus::singularity_abort;
        traj.message = err.what();
    }
    traj.berry_incremental = ctx.gauge_failed;
    if (ctx.gauge_failed) {
        // fixed gauge became unusable somewhere: report the incremental
        // accumulation for every point so the column stays one convention
        traj.gauge_label = "incremental-solid-angle";
        for (size_t i = 0; i < traj.points.size(); ++i)
            traj.points[i].theta_berry = -zp.l * omega_history[i];
    }
    return traj;
}

}  // namespace vortex
