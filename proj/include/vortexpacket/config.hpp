#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vortexpacket/dynamics.hpp"
#include "vortexpacket/lg_modes.hpp"
#include "vortexpacket/units_fields.hpp"

namespace vortex {

// Scenario block; which keys are legal depends on `kind` (strict parsing).
struct ScenarioConfig {
    std::string kind;  // fig1_density | fig2_hall_fan | magnetic_drift | helicity_watch | berry_loop
    std::vector<int> l_values{0, 1, 2, 3};
    int m_radial = 0;
    int grid_n = 256;
    double e0 = 0.02;
    double p0 = 1.0;
    double t_final = 400.0;
    std::vector<double> g_values{0.0, 1.0, 2.0};
    int l = 1;
    double b0 = 0.05;
    double periods = 20.0;
    double tilt_deg = 60.0;
    double theta = 1.0471975511965976;  // berry_loop colatitude, default pi/3
    int n_points = 20000;
    double radius = 1.0;

    bool operator==(const ScenarioConfig&) const = default;
};

// Fully validated run configuration parsed from the flat `section.key = value`
// text format. Unknown keys are hard errors; missing keys take the defaults
// documented in the README.
struct RunConfig {
    UnitSystem units;

    std::string field_type = "free";  // free | uniform_e | uniform_b
    Vec3 field_vector{};
    double g_factor = 1.0;

    int l = 1;
    int m_radial = 0;
    int n_long = 0;
    double waist = 0.0;        // 0: default 10 hbar / |p0|
    double long_length = 0.0;  // 0: default 10 * waist
    Vec3 p0{0.0, 0.0, 1.0};
    Vec3 r0{};
    std::string oam_model = "slaved";  // slaved | precessing

    std::string method = "rk4";  // rk4 | rkf45
    double step = 0.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double t_final = 1.0;
    int output_stride = 1;

    ScenarioConfig scenario;
    std::uint64_t seed = 12345;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
std::string serialize_config(const RunConfig& cfg);

// Materialize domain objects from a validated config.
FieldConfig make_field(const RunConfig& cfg);
ModeSpec make_mode_spec(const RunConfig& cfg);
PacketState make_initial_state(const RunConfig& cfg);
ZeemanParams make_zeeman(const RunConfig& cfg);
IntegratorConfig make_integrator(const RunConfig& cfg);

}  // namespace vortex
