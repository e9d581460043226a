#pragma once

#include <functional>
#include <string>

#include "vortexpacket/errors.hpp"
#include "vortexpacket/vec.hpp"

namespace vortex {

// Unit scales. Defaults are the dimensionless system hbar = m = |e| = 1 with the
// electron charge convention e = -|e|; c is fixed to 1. Arbitrary positive scales
// are accepted so dimensional-analysis checks can rescale consistently.
struct UnitSystem {
    double hbar = 1.0;
    double mass = 1.0;
    double charge = -1.0;  // signed, negative for electrons
    static constexpr double speed_of_light = 1.0;

    // Bohr magneton with the signed charge: mu_B = e*hbar/(2m).
    double mu_bohr() const { return charge * hbar / (2.0 * mass); }

    void validate() const;

    bool operator==(const UnitSystem&) const = default;
};

enum class FieldKind { free_space, uniform_e, uniform_b, user_supplied };

// Static electromagnetic environment: field maps, potentials with an explicit
// gauge label, and the g-factor of the intrinsic magnetic moment.
// Immutable after construction; safe to share across threads.
class FieldConfig {
public:
    using VectorMap = std::function<Vec3(const Vec3&)>;
    using ScalarMap = std::function<double(const Vec3&)>;

    static FieldConfig free_space();
    // E = const; Phi = -E.r, A = 0.
    static FieldConfig uniform_e(const Vec3& e_vec);
    // B = const; A = (B x r)/2 (symmetric gauge), Phi = 0.
    static FieldConfig uniform_b(const Vec3& b_vec);
    // Arbitrary smooth static maps; Jacobian of B falls back to central differences.
    static FieldConfig user_supplied(VectorMap electric, VectorMap magnetic,
                                     ScalarMap scalar_potential, VectorMap vector_potential,
                                     std::string gauge_label);

    Vec3 electric(const Vec3& r) const { return electric_(r); }
    Vec3 magnetic(const Vec3& r) const { return magnetic_(r); }
    double scalar_potential(const Vec3& r) const { return phi_(r); }
    Vec3 vector_potential(const Vec3& r) const { return a_(r); }

    FieldKind kind() const { return kind_; }
    const std::string& gauge_label() const { return gauge_label_; }
    double g_factor() const { return g_factor_; }
    // g = 1 for classical orbital motion; 2 mimics spin.
    FieldConfig with_g_factor(double g) const;

    // Uniform field value for the presets (zero vector otherwise).
    Vec3 uniform_value() const { return uniform_value_; }

private:
    FieldConfig() = default;

    FieldKind kind_ = FieldKind::free_space;
    VectorMap electric_;
    VectorMap magnetic_;
    ScalarMap phi_;
    VectorMap a_;
    std::string gauge_label_ = "zero";
    double g_factor_ = 1.0;
    Vec3 uniform_value_{};
};

struct FieldSample {
    Vec3 electric;
    Vec3 magnetic;
    Mat3 jacobian_b;  // (i,j) = dB_i/dr_j
};

// Field values and the spatial Jacobian of B at r. Analytic for the presets,
// central finite differences for user-supplied maps.
FieldSample eval_fields(const FieldConfig& cfg, const Vec3& r);

}  // namespace vortex
