#pragma once

#include <string>
#include <vector>

#include "vortexpacket/config.hpp"
#include "vortexpacket/lg_modes.hpp"

namespace vortex {

struct ScenarioResult {
    std::vector<std::string> files;  // written files, relative to out_dir
    std::string summary;             // printable digest
};

// Azimuthal average of |u|^2 into radial bins of width grid.dx().
std::vector<double> radial_profile(const GridField& grid);

// Strict local maxima of the radial profile above a small floor; for LG modes
// this counts the concentric bright rings (the l=0 center blob counts as one).
int count_rings(const std::vector<double>& profile);

// Radius of the brightest ring, parabolic refinement around the peak bin.
double peak_radius(const std::vector<double>& profile, double dr);

// Density/current maps per l (transverse mode structure).
ScenarioResult run_fig1(const RunConfig& cfg, const std::string& out_dir);

// Trajectory fan in a uniform electric field and the per-l transverse shifts.
ScenarioResult run_fig2(const RunConfig& cfg, const std::string& out_dir);

// Mean drift velocity along B versus the g-factor, against the closed form
// e hbar l (1 - g/2) B / (m p).
ScenarioResult run_magnetic_drift(const RunConfig& cfg, const std::string& out_dir);

// Helicity conservation watch for the precessing OAM model.
ScenarioResult run_helicity_watch(const RunConfig& cfg, const std::string& out_dir);

// Berry phase of a momentum circle at fixed colatitude, both methods.
ScenarioResult run_berry_loop(const RunConfig& cfg, const std::string& out_dir);

// Dispatch on cfg.scenario.kind, create out_dir, write the manifest.
ScenarioResult run_scenario(const RunConfig& cfg, const std::string& out_dir);

}  // namespace vortex
