#include "vortexpacket/paraxial_oracle.hpp"

#include <cmath>

#include "vortexpacket/fft.hpp"

namespace vortex {

SpectralPlan SpectralPlan::make(int grid_n, double extent, double delta_tau,
                                const UnitSystem& units) {
    if (!is_power_of_two(grid_n))
        throw Error(ErrorCode::invalid_argument, "SpectralPlan: grid_n must be a power of two");
    if (!(extent > 0.0)) throw Error(ErrorCode::invalid_argument, "SpectralPlan: extent must be > 0");
    SpectralPlan plan;
    plan.grid_n = grid_n;
    plan.extent = extent;
    plan.delta_tau = delta_tau;
    plan.kinetic_phase.resize(static_cast<size_t>(grid_n) * grid_n);
    const double dx = 2.0 * extent / grid_n;
    const double coef = units.hbar * delta_tau / (2.0 * units.mass);
    for (int iy = 0; iy < grid_n; ++iy) {
        const double ky = fft_wavenumber(iy, grid_n, dx);
        for (int ix = 0; ix < grid_n; ++ix) {
            const double kx = fft_wavenumber(ix, grid_n, dx);
            plan.kinetic_phase[static_cast<size_t>(iy) * grid_n + ix] =
                std::polar(1.0, -coef * (kx * kx + ky * ky));
        }
    }
    return plan;
}

PropagateResult propagate(const GridField& grid, double delta_tau, int steps,
                          const UnitSystem& units) {
    if (steps < 0) throw Error(ErrorCode::invalid_argument, "propagate: steps must be >= 0");
    PropagateResult out;
    out.grid = grid;
    if (steps == 0 || delta_tau == 0.0) {
        out.grid.tau += steps * delta_tau;
        return out;
    }
    const SpectralPlan plan = SpectralPlan::make(grid.grid_n, grid.extent, delta_tau, units);
    auto& values = out.grid.values;
    for (int s = 0; s < steps; ++s) {
        fft2(values, grid.grid_n, false);
        for (size_t k = 0; k < values.size(); ++k) values[k] *= plan.kinetic_phase[k];
        fft2(values, grid.grid_n, true);
    }
    out.grid.tau += steps * delta_tau;
    if (boundary_mass_fraction(out.grid) > 1e-3) out.warning = Warning::boundary_leakage;
    return out;
}

GridMoments measure_centroid_and_oam(const GridField& grid) {
    GridMoments m;
    m.oam = oam_expectation(grid);  // also enforces the normalization precondition
    double cx = 0.0, cy = 0.0, tot = 0.0;
    const int n = grid.grid_n;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double rho = std::norm(grid.at(iy, ix));
            cx += rho * grid.coord(ix);
            cy += rho * y;
            tot += rho;
        }
    }
    m.centroid = {cx / tot, cy / tot};
    return m;
}

double boundary_mass_fraction(const GridField& grid, double frac) {
    double outer = 0.0, tot = 0.0;
    const int n = grid.grid_n;
    const double r2_cut = frac * frac * grid.extent * grid.extent;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix);
            const double rho = std::norm(grid.at(iy, ix));
            tot += rho;
            if (x * x + y * y > r2_cut) outer += rho;
        }
    }
    return tot > 0.0 ? outer / tot : 0.0;
}

}  // namespace vortex
