#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vortexpacket/dynamics.hpp"
#include "vortexpacket/lg_modes.hpp"

namespace vortex {

// Trajectory CSV: header plus 16 columns
// (t, r_x, r_y, r_z, p_x, p_y, p_z, l_x, l_y, l_z, helicity,
//  theta_dyn, theta_dirac, theta_berry, energy, D), %.17g floats.
void write_trajectory_csv(const std::vector<TrajectoryPoint>& points, const std::string& path);
std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path);

// Grid dump CSV: x, y, Re u, Im u, rho, j_x, j_y, j_z.
void write_grid_csv(const GridField& grid, const CurrentField& current, const std::string& path);

// Raw little-endian float64 grid with a 32-byte header
// (magic "VPGRID01", u32 grid_n, u32 reserved, f64 extent, f64 tau),
// then grid_n^2 interleaved (re, im) pairs, row-major.
void write_grid_binary(const GridField& grid, const std::string& path);
GridField read_grid_binary(const std::string& path);

// FNV-1a, used for the config hash in scenario manifests.
std::uint64_t fnv1a64(std::string_view text);

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

// Minimal deterministic SVG writer: polylines over linear axes with ticks.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                      const std::string& label);
    // short bare segments (quiver arrows etc.)
    void add_segments(const std::vector<std::array<double, 4>>& segs, const std::string& color);
    void save(const std::string& path) const;

private:
    struct Line {
        std::vector<double> xs, ys;
        std::string label;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Line> lines_;
    std::vector<std::pair<std::vector<std::array<double, 4>>, std::string>> segments_;
};

}  // namespace vortex
