#include "vortexpacket/units_fields.hpp"

#include <cmath>
#include <utility>

namespace vortex {

const char* warning_name(Warning w) {
    switch (w) {
        case Warning::none: return "none";
        case Warning::extent_too_small: return "extent_too_small";
        case Warning::boundary_leakage: return "boundary_leakage";
        case Warning::open_path_gauge: return "open_path_gauge";
        case Warning::string_proximity: return "string_proximity";
        case Warning::model_validity: return "model_validity";
        case Warning::negative_dos: return "negative_dos";
        case Warning::ill_conditioned: return "ill_conditioned";
    }
    return "unknown";
}

void UnitSystem::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw Error(ErrorCode::invalid_argument, "unit.hbar must be positive and finite");
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw Error(ErrorCode::invalid_argument, "unit.mass must be positive and finite");
    if (charge == 0.0 || !std::isfinite(charge))
        throw Error(ErrorCode::invalid_argument, "unit.charge must be nonzero and finite");
}

FieldConfig FieldConfig::free_space() {
    FieldConfig cfg;
    cfg.kind_ = FieldKind::free_space;
    cfg.electric_ = [](const Vec3&) { return Vec3{}; };
    cfg.magnetic_ = [](const Vec3&) { return Vec3{}; };
    cfg.phi_ = [](const Vec3&) { return 0.0; };
    cfg.a_ = [](const Vec3&) { return Vec3{}; };
    cfg.gauge_label_ = "zero";
    return cfg;
}

FieldConfig FieldConfig::uniform_e(const Vec3& e_vec) {
    if (!finite(e_vec)) throw Error(ErrorCode::invalid_argument, "uniform_e: non-finite E vector");
    if (e_vec == Vec3{}) return free_space();
    FieldConfig cfg;
    cfg.kind_ = FieldKind::uniform_e;
    cfg.uniform_value_ = e_vec;
    cfg.electric_ = [e_vec](const Vec3&) { return e_vec; };
    cfg.magnetic_ = [](const Vec3&) { return Vec3{}; };
    cfg.phi_ = [e_vec](const Vec3& r) { return -dot(e_vec, r); };
    cfg.a_ = [](const Vec3&) { return Vec3{}; };
    cfg.gauge_label_ = "electrostatic";
    return cfg;
}

FieldConfig FieldConfig::uniform_b(const Vec3& b_vec) {
    if (!finite(b_vec)) throw Error(ErrorCode::invalid_argument, "uniform_b: non-finite B vector");
    if (b_vec == Vec3{}) return free_space();
    FieldConfig cfg;
    cfg.kind_ = FieldKind::uniform_b;
    cfg.uniform_value_ = b_vec;
    cfg.electric_ = [](const Vec3&) { return Vec3{}; };
    cfg.magnetic_ = [b_vec](const Vec3&) { return b_vec; };
    cfg.phi_ = [](const Vec3&) { return 0.0; };
    cfg.a_ = [b_vec](const Vec3& r) { return 0.5 * cross(b_vec, r); };
    cfg.gauge_label_ = "symmetric";
    return cfg;
}

FieldConfig FieldConfig::user_supplied(VectorMap electric, VectorMap magnetic,
                                       ScalarMap scalar_potential, VectorMap vector_potential,
                                       std::string gauge_label) {
    FieldConfig cfg;
    cfg.kind_ = FieldKind::user_supplied;
    cfg.electric_ = std::move(electric);
    cfg.magnetic_ = std::move(magnetic);
    cfg.phi_ = std::move(scalar_potential);
    cfg.a_ = std::move(vector_potential);
    cfg.gauge_label_ = std::move(gauge_label);
    return cfg;
}

FieldConfig FieldConfig::with_g_factor(double g) const {
    if (!std::isfinite(g)) throw Error(ErrorCode::invalid_argument, "g_factor must be finite");
    FieldConfig cfg = *this;
    cfg.g_factor_ = g;
    return cfg;
}

FieldSample eval_fields(const FieldConfig& cfg, const Vec3& r) {
    if (!finite(r)) throw Error(ErrorCode::invalid_argument, "eval_fields: non-finite position");
    FieldSample out;
    out.electric = cfg.electric(r);
    out.magnetic = cfg.magnetic(r);
    if (cfg.kind() == FieldKind::user_supplied) {
        // central differences, step scaled to the coordinate magnitude
        const double h = 1e-5 * std::max({1.0, std::fabs(r.x), std::fabs(r.y), std::fabs(r.z)});
        for (int j = 0; j < 3; ++j) {
            Vec3 rp = r, rm = r;
            rp[j] += h;
            rm[j] -= h;
            const Vec3 bp = cfg.magnetic(rp);
            const Vec3 bm = cfg.magnetic(rm);
            for (int i = 0; i < 3; ++i) out.jacobian_b(i, j) = (bp[i] - bm[i]) / (2.0 * h);
        }
    }
    // presets are uniform: Jacobian stays zero
    return out;
}

}  // namespace vortex
