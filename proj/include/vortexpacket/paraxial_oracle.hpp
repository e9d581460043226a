#pragma once

#include <array>
#include <complex>
#include <vector>

#include "vortexpacket/lg_modes.hpp"
#include "vortexpacket/units_fields.hpp"

namespace vortex {

// Precomputed unitary kinetic phases exp(-i hbar k_perp^2 dtau / 2m) for one step.
struct SpectralPlan {
    int grid_n = 0;
    double extent = 0.0;
    double delta_tau = 0.0;
    std::vector<std::complex<double>> kinetic_phase;  // grid_n^2 factors, |.| = 1

    static SpectralPlan make(int grid_n, double extent, double delta_tau,
                             const UnitSystem& units);
};

struct PropagateResult {
    GridField grid;
    Warning warning = Warning::none;  // boundary_leakage when mass piles up at the edge
};

// Free-space evolution of the transverse field: `steps` applications of the
// kinetic phase in the Fourier domain. Exact for the parabolic equation up to
// grid truncation; norm preserved to machine precision.
PropagateResult propagate(const GridField& grid, double delta_tau, int steps,
                          const UnitSystem& units);

struct GridMoments {
    std::array<double, 2> centroid{};  // first moments of rho
    double oam = 0.0;                  // <L_z>/hbar
};

GridMoments measure_centroid_and_oam(const GridField& grid);

// Fraction of the squared norm in the outer annulus r > frac * extent.
double boundary_mass_fraction(const GridField& grid, double frac = 0.9);

}  // namespace vortex
