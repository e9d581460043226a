#pragma once

#include <string>
#include <vector>

#include "vortexpacket/errors.hpp"
#include "vortexpacket/units_fields.hpp"
#include "vortexpacket/vec.hpp"

namespace vortex {

// Below this momentum the monopole curvature diverges and the semiclassical
// picture is void; operations fail loudly instead of regularizing.
inline constexpr double kMomentumFloor = 1e-9;

// Ordered loop (or open path) in momentum space.
struct MomentumPath {
    std::vector<Vec3> points;
    bool closed = true;

    void validate() const;
};

// Parameters of the intrinsic magnetic moment mu = g mu_B l.
struct ZeemanParams {
    int l = 1;
    double g_factor = 1.0;
    double mu_b = -0.5;  // e hbar / 2m, signed

    static ZeemanParams make(int l, double g_factor, const UnitSystem& units) {
        return {l, g_factor, units.mu_bohr()};
    }
};

// Monopole curvature -p/|p|^3. The per-mode curvature is l times this.
Vec3 berry_curvature(const Vec3& p);

// Fixed-gauge connection with the Dirac string along -e_z:
// A(p) = -(1 - cos th)/(p sin th) e_phi. Errors within kMomentumFloor of the string.
Vec3 berry_connection(const Vec3& p);

// Signed solid angle of the geodesic triangle (a, b, c) on the unit sphere
// (Van Oosterom-Strackee), in (-2pi, 2pi).
double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

// Oriented solid angle of the closed polygon of directions p/|p| (geodesic
// edges). Fan decomposition from the vertex centroid, with a north-pole
// fallback for great-circle loops.
double solid_angle_polygon(const std::vector<Vec3>& points);

// Line integral of the fixed-gauge connection along straight p-space segments
// (adaptive quadrature). Throws on string crossing.
double connection_line_integral(const MomentumPath& path);

struct LoopPhase {
    double phase = 0.0;          // authoritative value: -l * solid_angle for closed loops
    double phase_line = 0.0;     // line-integral route (NaN when skipped near the string)
    double solid_angle = 0.0;    // Omega of the projected loop (NaN for open paths)
    double method_delta = 0.0;   // |phase_line - phase| mod 2pi
    Warning warning = Warning::none;
    std::string gauge_label = "south-string";
};

// Berry phase l * integral(A . dp) of a momentum loop, computed by the gauge
// line integral and by the gauge-invariant solid angle; the latter is
// authoritative for closed paths. Open paths return the (gauge-stamped) line
// integral with a warning.
LoopPhase berry_phase_loop(const MomentumPath& path, int l);

// Zeeman energy Delta = -g mu_B l_vec . B.
double zeeman_energy(const ZeemanParams& zp, const Vec3& l_vec, const Vec3& b);

struct ZeemanGradients {
    Vec3 d_dr;  // -g mu_B l  phat . (dB/dr)
    Vec3 d_dp;  // -(g mu_B l / p) (B - (phat.B) phat)
};

// Gradients of Delta in the slaved model l_vec = l p/|p|.
ZeemanGradients zeeman_gradients(const ZeemanParams& zp, const Vec3& r, const Vec3& p,
                                 const FieldConfig& cfg);

}  // namespace vortex
