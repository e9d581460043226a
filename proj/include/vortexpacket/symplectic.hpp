#pragma once

#include <array>

#include "vortexpacket/berry_geometry.hpp"
#include "vortexpacket/units_fields.hpp"
#include "vortexpacket/vec.hpp"

namespace vortex {

using Mat6 = std::array<double, 36>;  // row-major 6x6
using Vec6 = std::array<double, 6>;

// Deformed symplectic two-form at one phase-space point X = (r, p):
// omega holds g^{ij}, brackets its inverse g_{ij} = {X_i, X_j},
// dos the phase-space volume factor D = 1 - e hbar l B.curv.
struct SymplecticFrame {
    Mat6 omega{};
    Mat6 brackets{};
    double dos = 1.0;
    double sqrt_det = 1.0;      // sqrt(det g^{ij}), equals |D| up to roundoff
    double dos_det_gap = 0.0;   // |D| - sqrt_det diagnostic
    double condition = 1.0;     // inf-norm condition estimate of g^{ij}
    Warning warning = Warning::none;
};

// Assemble the two-form blockwise (rr: e eps_ijk B_k, pp: hbar l eps_ijk curv_k,
// rp: -I, pr: +I) and invert it. |D| <= 1e-6 raises a degeneracy error;
// D <= 0 is admissible but flagged.
SymplecticFrame build_frame(const Vec3& r, const Vec3& p, int l, const FieldConfig& cfg,
                            const UnitSystem& units);

// Solve g^{ij} Xdot_j = grad_H_i for the phase-space velocity.
Vec6 hamiltonian_flow(const SymplecticFrame& frame, const Vec6& grad_h);

// Bracket-table entry {X_i, X_j}; indices 0..2 are r, 3..5 are p.
double bracket(const SymplecticFrame& frame, int i, int j);

}  // namespace vortex
