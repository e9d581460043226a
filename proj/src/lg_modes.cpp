#include "vortexpacket/lg_modes.hpp"

#include <cmath>
#include <numbers>

#include "vortexpacket/fft.hpp"

namespace vortex {

namespace {
constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;
}  // namespace

void ModeSpec::validate() const {
    if (m_radial < 0) throw Error(ErrorCode::invalid_argument, "m_radial must be >= 0");
    if (n_long < 0) throw Error(ErrorCode::invalid_argument, "n_long must be >= 0");
    if (!(waist > 0.0)) throw Error(ErrorCode::invalid_argument, "waist must be > 0");
    if (!(long_length > 0.0)) throw Error(ErrorCode::invalid_argument, "long_length must be > 0");
    if (!(p_central > 0.0)) throw Error(ErrorCode::invalid_argument, "p_central must be > 0");
}

ModeSpec ModeSpec::make(int l, int m_radial, int n_long, double p_central,
                        const UnitSystem& units) {
    ModeSpec spec;
    spec.l = l;
    spec.m_radial = m_radial;
    spec.n_long = n_long;
    spec.p_central = p_central;
    spec.waist = 10.0 * units.hbar / p_central;
    spec.long_length = 10.0 * spec.waist;
    spec.validate();
    return spec;
}

double ModeSpec::rayleigh_time(const UnitSystem& units) const {
    return units.mass * waist * waist / (2.0 * units.hbar);
}

double ModeSpec::width_at(double tau, const UnitSystem& units) const {
    const double t = tau / rayleigh_time(units);
    return waist * std::sqrt(1.0 + t * t);
}

double GridField::norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * cell_area());
}

void GridField::scale(double s) {
    for (auto& v : values) v *= s;
}

std::complex<double> eval_lg(const ModeSpec& spec, double r, double phi, double tau,
                             const UnitSystem& units) {
    if (r < 0.0) throw Error(ErrorCode::invalid_argument, "eval_lg: r must be >= 0");
    spec.validate();

    const int la = std::abs(spec.l);
    const int mr = spec.m_radial;
    const double tau_r = spec.rayleigh_time(units);
    const double w = spec.width_at(tau, units);

    // sqrt(2 m! / (pi (m+|l|)!)) as a running product to avoid factorial overflow
    double fact_ratio = 1.0;
    for (int k = 1; k <= la; ++k) fact_ratio /= static_cast<double>(mr + k);
    const double amp0 = std::sqrt(2.0 * fact_ratio / kPi) / w;

    const double s = 2.0 * r * r / (w * w);
    const double radial =
        std::pow(r * std::sqrt(2.0) / w, la) * std::assoc_laguerre(mr, la, s) * std::exp(-s / 2.0);

    // curvature 1/R = tau/(tau^2 + tau_R^2); regular at tau = 0
    const double inv_radius = tau / (tau * tau + tau_r * tau_r);
    const double gouy = (2.0 * mr + la + 1.0) * std::atan2(tau, tau_r);
    const double phase =
        spec.l * phi + units.mass * r * r * inv_radius / (2.0 * units.hbar) - gouy;

    return amp0 * radial * std::polar(1.0, phase);
}

double eval_hg(const ModeSpec& spec, double zeta) {
    spec.validate();
    const int n = spec.n_long;
    const double lz = spec.long_length;
    const double xi = zeta / lz;
    // 2^n n! normalization of the physicists' Hermite polynomials
    double log_norm = -0.5 * (n * std::numbers::ln2 + std::lgamma(n + 1.0));
    const double amp = std::exp(log_norm) / std::pow(kPi * lz * lz, 0.25);
    return amp * std::hermite(n, xi) * std::exp(-xi * xi / 2.0);
}

SampleResult sample_mode(const ModeSpec& spec, int grid_n, double extent, double tau,
                         const UnitSystem& units) {
    if (!is_power_of_two(grid_n) || grid_n < 32)
        throw Error(ErrorCode::invalid_argument, "sample_mode: grid_n must be a power of two >= 32");
    if (!(extent > 0.0)) throw Error(ErrorCode::invalid_argument, "sample_mode: extent must be > 0");
    spec.validate();

    SampleResult out;
    GridField& g = out.grid;
    g.grid_n = grid_n;
    g.extent = extent;
    g.tau = tau;
    g.values.resize(static_cast<size_t>(grid_n) * grid_n);
    for (int iy = 0; iy < grid_n; ++iy) {
        const double y = g.coord(iy);
        for (int ix = 0; ix < grid_n; ++ix) {
            const double x = g.coord(ix);
            const double r = std::hypot(x, y);
            const double phi = std::atan2(y, x);
            g.at(iy, ix) = eval_lg(spec, r, phi, tau, units);
        }
    }
    const double nrm = g.norm();
    if (std::fabs(nrm - 1.0) > 1e-2) out.warning = Warning::extent_too_small;
    return out;
}

GridField sample_custom(int grid_n, double extent, double tau,
                        const std::function<std::complex<double>(double, double)>& f) {
    if (!is_power_of_two(grid_n) || grid_n < 32)
        throw Error(ErrorCode::invalid_argument, "sample_custom: grid_n must be a power of two >= 32");
    GridField g;
    g.grid_n = grid_n;
    g.extent = extent;
    g.tau = tau;
    g.values.resize(static_cast<size_t>(grid_n) * grid_n);
    for (int iy = 0; iy < grid_n; ++iy)
        for (int ix = 0; ix < grid_n; ++ix) g.at(iy, ix) = f(g.coord(ix), g.coord(iy));
    return g;
}

std::vector<std::complex<double>> spectral_derivative(const GridField& grid, int axis) {
    if (axis != 0 && axis != 1)
        throw Error(ErrorCode::invalid_argument, "spectral_derivative: axis must be 0 (x) or 1 (y)");
    const int n = grid.grid_n;
    std::vector<cplx> work = grid.values;
    fft2(work, n, false);
    const double dx = grid.dx();
    for (int iy = 0; iy < n; ++iy) {
        const double ky = fft_wavenumber(iy, n, dx);
        for (int ix = 0; ix < n; ++ix) {
            const double kx = fft_wavenumber(ix, n, dx);
            const double k = (axis == 0) ? kx : ky;
            work[static_cast<size_t>(iy) * n + ix] *= cplx(0.0, k);
        }
    }
    fft2(work, n, true);
    return work;
}

CurrentField probability_current(const ModeSpec& spec, const GridField& grid,
                                 const UnitSystem& units) {
    const int n = grid.grid_n;
    const auto du_dx = spectral_derivative(grid, 0);
    const auto du_dy = spectral_derivative(grid, 1);

    CurrentField out;
    out.density.resize(grid.values.size());
    out.exact.resize(grid.values.size());
    out.approx.resize(grid.values.size());

    const double hbar = units.hbar;
    const double inv_m = 1.0 / units.mass;
    const double pc = spec.p_central;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix);
            const size_t k = static_cast<size_t>(iy) * n + ix;
            const cplx u = grid.values[k];
            const double rho = std::norm(u);
            out.density[k] = rho;
            out.exact[k] = inv_m * Vec3{hbar * std::imag(std::conj(u) * du_dx[k]),
                                        hbar * std::imag(std::conj(u) * du_dy[k]), rho * pc};
            const double r2 = x * x + y * y;
            // e_phi / r = (-y, x)/r^2; the axis sample is reported as 0
            Vec3 approx{0.0, 0.0, rho * pc * inv_m};
            if (r2 > 0.0) {
                const double f = inv_m * rho * hbar * spec.l / r2;
                approx.x = -f * y;
                approx.y = f * x;
            }
            out.approx[k] = approx;
        }
    }
    return out;
}

double oam_expectation(const GridField& grid) {
    const double nrm = grid.norm();
    if (std::fabs(nrm - 1.0) > 1e-2)
        throw Error(ErrorCode::unnormalized_grid,
                    "oam_expectation: grid norm deviates from 1 by more than 1e-2");
    const int n = grid.grid_n;
    const auto du_dx = spectral_derivative(grid, 0);
    const auto du_dy = spectral_derivative(grid, 1);
    double acc = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix);
            const size_t k = static_cast<size_t>(iy) * n + ix;
            // Re[u* (-i)(x d_y - y d_x) u] = Im[u* (x d_y - y d_x) u]
            acc += std::imag(std::conj(grid.values[k]) * (x * du_dy[k] - y * du_dx[k]));
        }
    }
    return acc * grid.cell_area();
}

std::complex<double> mode_overlap(const GridField& a, const GridField& b) {
    if (a.grid_n != b.grid_n || a.extent != b.extent)
        throw Error(ErrorCode::grid_mismatch, "mode_overlap: grids differ in size or extent");
    cplx acc = 0.0;
    for (size_t k = 0; k < a.values.size(); ++k) acc += std::conj(a.values[k]) * b.values[k];
    return acc * a.cell_area();
}

double rms_radius(const GridField& grid) {
    double num = 0.0, den = 0.0;
    const int n = grid.grid_n;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix);
            const double rho = std::norm(grid.at(iy, ix));
            num += rho * (x * x + y * y);
            den += rho;
        }
    }
    return std::sqrt(num / den);
}

}  // namespace vortex
