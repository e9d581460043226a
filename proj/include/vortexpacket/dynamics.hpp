#pragma once

#include <limits>
#include <string>
#include <vector>

#include "vortexpacket/berry_geometry.hpp"
#include "vortexpacket/units_fields.hpp"
#include "vortexpacket/vec.hpp"

namespace vortex {

// Wave-packet center in phase space plus the intrinsic OAM vector and the
// three accumulated phase components.
struct PacketState {
    Vec3 r{};
    Vec3 p{0.0, 0.0, 1.0};
    Vec3 l_vec{};  // units of hbar
    double theta_dyn = 0.0;
    double theta_dirac = 0.0;
    double theta_berry = 0.0;
    double t = 0.0;
};

enum class OamModel { slaved, precessing };
enum class StepperKind { rk4, rkf45 };

// `exact` solves the implicit velocity/force coupling as a linear system;
// `first_order` substitutes the Lorentz force into the anomalous term, which
// reproduces the reduced equations used for the closed-form drift laws.
enum class CouplingMode { exact, first_order };

struct IntegratorConfig {
    StepperKind method = StepperKind::rk4;
    double step = 0.0;  // 0: pick 1/200 of the shortest field timescale
    double rtol = 1e-10;
    double atol = 1e-12;
    OamModel oam_model = OamModel::slaved;
    CouplingMode coupling = CouplingMode::exact;
    double t_final = 1.0;
    int output_stride = 1;
    double alignment_warn = 1e-3;  // rad between l_vec and p before the validity warning

    void validate() const;
};

struct Derivatives {
    Vec3 r_dot;
    Vec3 p_dot;
    double dos = 1.0;  // D = 1 - e hbar l B.curv at the evaluation point
};

// Coupled equations of motion. With F0 = eE - dDelta/dr and V0 = p/m + dDelta/dp,
// solves v + hbar l e (v x B) x curv = V0 - hbar l F0 x curv for v = rdot,
// then pdot = F0 + e v x B. The 3x3 system is inverted in closed form; its
// determinant is D^2, so |D| <= 1e-6 raises a degeneracy error.
Derivatives rhs_solve(const PacketState& state, const FieldConfig& cfg, const ZeemanParams& zp,
                      const UnitSystem& units, CouplingMode mode = CouplingMode::exact);

// BMT-like precession rate of the intrinsic OAM:
// ldot = -((e/m)B + e E x p / p^2) x l_vec.
Vec3 precess_oam(const PacketState& state, const FieldConfig& cfg, const UnitSystem& units);

struct PhaseRates {
    double dyn = 0.0;    // (p.rdot - H)/hbar
    double dirac = 0.0;  // e A.rdot / hbar
    double berry = 0.0;  // l A_berry(p).pdot, fixed south-string gauge
    bool gauge_ok = true;  // false within the string margin; rate reported as 0 there
};

PhaseRates phase_rates(const PacketState& state, const Vec3& r_dot, const Vec3& p_dot,
                       const FieldConfig& cfg, const ZeemanParams& zp, const UnitSystem& units);

// H = p^2/2m + e Phi + Delta with the slaved moment l_vec = l phat.
double hamiltonian(const PacketState& state, const FieldConfig& cfg, const ZeemanParams& zp,
                   const UnitSystem& units);

// Projection l_vec . p/|p|.
double helicity(const PacketState& state);

struct TrajectoryPoint {
    double t = 0.0;
    Vec3 r, p, l_vec;
    double helicity = 0.0;
    double theta_dyn = 0.0;
    double theta_dirac = 0.0;
    double theta_berry = 0.0;
    double energy = 0.0;
    double dos = 1.0;
};

enum class RunStatus { ok, singularity_abort, degeneracy_abort, step_overflow };

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    RunStatus status = RunStatus::ok;
    std::string message;
    // true once the angle between l_vec and phat exceeds the threshold while
    // precessing with g != 2 in a magnetic field (the paper's breakdown regime)
    bool validity_warning = false;
    double validity_warning_time = std::numeric_limits<double>::quiet_NaN();
    // true when Berry accumulation switched to the incremental solid-angle method
    bool berry_incremental = false;
    std::string gauge_label = "south-string";
};

// Integrate (r, p, phases[, l_vec]) to t_final. Slaved mode pins l_vec = l phat
// after every step; precessing mode evolves it by the BMT-like equation.
// Singularity/degeneracy aborts carry the partial trajectory.
Trajectory integrate(const PacketState& state0, const FieldConfig& cfg, const ZeemanParams& zp,
                     const IntegratorConfig& icfg, const UnitSystem& units);

}  // namespace vortex
