#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

enum class ErrorCode {
    invalid_argument,       // bad user input (non-finite, out of range)
    monopole_singularity,   // |p| below the momentum floor, Berry curvature diverges
    gauge_singularity,      // momentum on/near the Dirac string of the fixed gauge
    degenerate_structure,   // |D| too small, symplectic matrix (numerically) singular
    grid_mismatch,          // operation on incompatible grids
    unnormalized_grid,      // grid norm too far from 1 for a quadrature that assumes it
    parse_error,            // config text could not be parsed
    validation_error,       // config parsed but a value is out of contract
    io_error,               // file could not be read/written
    usage_error,            // bad command line
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Non-fatal conditions reported alongside results.
enum class Warning {
    none = 0,
    extent_too_small,       // sampled grid misses > 1e-2 of the mode norm
    boundary_leakage,       // > 1e-3 of the norm in the outer 10% annulus after propagation
    open_path_gauge,        // Berry phase of an open path: value is gauge-dependent
    string_proximity,       // Berry accumulation switched to the incremental solid-angle method
    model_validity,         // precessing OAM with g != 2 in B != 0: slaved-mode assumption broken
    negative_dos,           // density-of-states factor D <= 0 (strong-field regime)
    ill_conditioned,        // symplectic matrix condition number above 1e8
};

const char* warning_name(Warning w);

}  // namespace vortex
