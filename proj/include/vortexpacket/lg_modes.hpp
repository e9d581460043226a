#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "vortexpacket/errors.hpp"
#include "vortexpacket/units_fields.hpp"
#include "vortexpacket/vec.hpp"

namespace vortex {

// One LG x HG wave-packet mode: vortex strength l, radial and longitudinal
// indices, transverse waist w0, longitudinal length L_zeta, central momentum.
struct ModeSpec {
    int l = 1;
    int m_radial = 0;
    int n_long = 0;
    double waist = 10.0;
    double long_length = 100.0;
    double p_central = 1.0;

    void validate() const;

    // Paraxial defaults: w0 = 10 hbar/p_c keeps the momentum spread narrow,
    // L_zeta = 10 w0.
    static ModeSpec make(int l, int m_radial, int n_long, double p_central,
                         const UnitSystem& units);

    // tau_R = m w0^2 / (2 hbar), the Rayleigh time of free spreading.
    double rayleigh_time(const UnitSystem& units) const;
    // w(tau) = w0 sqrt(1 + (tau/tau_R)^2)
    double width_at(double tau, const UnitSystem& units) const;
};

// Complex scalar field on an N x N uniform transverse grid; extent is the
// physical half-width per axis, so x_i = (i - N/2) * (2*extent/N).
struct GridField {
    std::vector<std::complex<double>> values;  // row-major, values[iy*grid_n + ix]
    double extent = 0.0;
    int grid_n = 0;
    double tau = 0.0;

    double dx() const { return 2.0 * extent / grid_n; }
    double cell_area() const { return dx() * dx(); }
    double coord(int i) const { return (i - grid_n / 2) * dx(); }

    std::complex<double>& at(int iy, int ix) { return values[static_cast<size_t>(iy) * grid_n + ix]; }
    const std::complex<double>& at(int iy, int ix) const {
        return values[static_cast<size_t>(iy) * grid_n + ix];
    }

    // discrete L2 norm sqrt(sum |u|^2 dA)
    double norm() const;
    void scale(double s);
};

// Transverse LG amplitude at polar point (r, phi) and comoving time tau.
// Normalized so the transverse plane integral of |u|^2 is 1 at every tau.
std::complex<double> eval_lg(const ModeSpec& spec, double r, double phi, double tau,
                             const UnitSystem& units);

// Longitudinal Hermite-Gaussian factor, unit L2 norm on the line, frozen in tau.
double eval_hg(const ModeSpec& spec, double zeta);

struct SampleResult {
    GridField grid;
    Warning warning = Warning::none;
};

// Rasterize the transverse LG factor. grid_n must be a power of two >= 32;
// a norm deficit beyond 1e-2 flags the extent as too small.
SampleResult sample_mode(const ModeSpec& spec, int grid_n, double extent, double tau,
                         const UnitSystem& units);

// Rasterize an arbitrary transverse field (superpositions, displaced modes).
GridField sample_custom(int grid_n, double extent, double tau,
                        const std::function<std::complex<double>(double, double)>& f);

struct CurrentField {
    std::vector<double> density;  // rho = |u|^2
    std::vector<Vec3> exact;      // j = (rho p_c e_z + hbar Im(u* grad u)) / m
    std::vector<Vec3> approx;     // j ~ rho (p_c e_z + hbar l e_phi / r) / m
};

// Probability current of a sampled mode; gradients are spectral.
CurrentField probability_current(const ModeSpec& spec, const GridField& grid,
                                 const UnitSystem& units);

// <L_z>/hbar by quadrature of u* (-i)(x d_y - y d_x) u with spectral derivatives.
// Requires a normalized grid (norm within 1e-2 of 1).
double oam_expectation(const GridField& grid);

// Discrete <a|b>; grids must share size and extent.
std::complex<double> mode_overlap(const GridField& a, const GridField& b);

// rms radius sqrt(<r^2>) of |u|^2 (diagnostic for the spreading law).
double rms_radius(const GridField& grid);

// Spectral partial derivatives of the grid values.
std::vector<std::complex<double>> spectral_derivative(const GridField& grid, int axis);

}  // namespace vortex
