#include "vortexpacket/berry_geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace vortex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_off_origin(const Vec3& p, const char* who) {
    if (!finite(p)) throw Error(ErrorCode::invalid_argument, std::string(who) + ": non-finite momentum");
    if (norm(p) <= kMomentumFloor)
        throw Error(ErrorCode::monopole_singularity,
                    std::string(who) + ": |p| at or below the momentum floor");
}

// Adaptive Simpson on [a, b]; integrand is smooth away from the string.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate_segment(const F& f, double tol) {
    const double fa = f(0.0), fm = f(0.5), fb = f(1.0);
    const double whole = (fa + 4.0 * fm + fb) / 6.0;
    return adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole, tol, 40);
}

}  // namespace

void MomentumPath::validate() const {
    if (points.size() < 2)
        throw Error(ErrorCode::invalid_argument, "MomentumPath: need at least two points");
    for (const auto& p : points) require_off_origin(p, "MomentumPath");
    if (closed && !(points.front() == points.back()))
        throw Error(ErrorCode::invalid_argument,
                    "MomentumPath: closed path must end at its first point");
}

Vec3 berry_curvature(const Vec3& p) {
    require_off_origin(p, "berry_curvature");
    const double pn = norm(p);
    return -1.0 / (pn * pn * pn) * p;
}

Vec3 berry_connection(const Vec3& p) {
    require_off_origin(p, "berry_connection");
    const double pn = norm(p);
    const double rho2 = p.x * p.x + p.y * p.y;  // (p sin th)^2
    if (std::sqrt(rho2) <= kMomentumFloor) {
        if (p.z > 0.0) return {};  // gauge is regular at the north pole, limit is 0
        throw Error(ErrorCode::gauge_singularity,
                    "berry_connection: momentum on the Dirac string (-z axis); "
                    "use the loop-based phase");
    }
    // A = -(1 - pz/p) (-py, px, 0) / rho^2
    const double c = -(1.0 - p.z / pn) / rho2;
    return {-c * p.y, c * p.x, 0.0};
}

double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = dot(a, cross(b, c));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

double solid_angle_polygon(const std::vector<Vec3>& points) {
    std::vector<Vec3> hat;
    hat.reserve(points.size());
    for (const auto& p : points) {
        require_off_origin(p, "solid_angle_polygon");
        hat.push_back(normalized(p));
    }
    if (hat.size() > 1 && norm(hat.front() - hat.back()) < 1e-14) hat.pop_back();
    if (hat.size() < 3) return 0.0;

    Vec3 apex{};
    for (const auto& v : hat) apex += v;
    if (norm(apex) > 1e-8 * hat.size())
        apex = normalized(apex);
    else
        apex = {0.0, 0.0, 1.0};  // great-circle loops: fan from the north pole

    double omega = 0.0;
    for (size_t k = 0; k < hat.size(); ++k)
        omega += triangle_solid_angle(apex, hat[k], hat[(k + 1) % hat.size()]);
    return omega;
}

double connection_line_integral(const MomentumPath& path) {
    double total = 0.0;
    for (size_t k = 0; k + 1 < path.points.size(); ++k) {
        const Vec3 a = path.points[k];
        const Vec3 d = path.points[k + 1] - a;
        if (norm(d) == 0.0) continue;
        auto f = [&](double s) { return dot(berry_connection(a + s * d), d); };
        total += integrate_segment(f, 1e-12);
    }
    return total;
}

LoopPhase berry_phase_loop(const MomentumPath& path, int l) {
    path.validate();
    LoopPhase out;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    if (!path.closed) {
        // Gauge-dependent on open paths; returned with the gauge label.
        out.phase_line = l * connection_line_integral(path);
        out.phase = out.phase_line;
        out.solid_angle = nan;
        out.method_delta = nan;
        out.warning = Warning::open_path_gauge;
        return out;
    }

    out.solid_angle = solid_angle_polygon(path.points);
    out.phase = -l * out.solid_angle;
    try {
        out.phase_line = l * connection_line_integral(path);
        out.method_delta = std::fabs(std::remainder(out.phase_line - out.phase, kTwoPi));
    } catch (const Error&) {
        // String crossing: only the solid-angle route is defined.
        out.phase_line = nan;
        out.method_delta = nan;
        out.warning = Warning::string_proximity;
    }
    return out;
}

double zeeman_energy(const ZeemanParams& zp, const Vec3& l_vec, const Vec3& b) {
    return -zp.g_factor * zp.mu_b * dot(l_vec, b);
}

ZeemanGradients zeeman_gradients(const ZeemanParams& zp, const Vec3& r, const Vec3& p,
                                 const FieldConfig& cfg) {
    require_off_origin(p, "zeeman_gradients");
    const FieldSample fs = eval_fields(cfg, r);
    const double pn = norm(p);
    const Vec3 phat = p / pn;
    const double coef = -zp.g_factor * zp.mu_b * zp.l;
    ZeemanGradients out;
    out.d_dr = coef * (phat * fs.jacobian_b);
    out.d_dp = (coef / pn) * (fs.magnetic - dot(phat, fs.magnetic) * phat);
    return out;
}

}  // namespace vortex
