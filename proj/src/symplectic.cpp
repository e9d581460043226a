#include "vortexpacket/symplectic.hpp"

#include <cmath>

namespace vortex {

namespace {

constexpr double kDegeneracyFloor = 1e-6;

// Gauss-Jordan with partial pivoting; returns the determinant.
double invert6(const Mat6& in, Mat6& out) {
    double a[6][12];
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            a[i][j] = in[6 * i + j];
            a[i][6 + j] = (i == j) ? 1.0 : 0.0;
        }
    }
    double det = 1.0;
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int row = col + 1; row < 6; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[piv][col])) piv = row;
        if (a[piv][col] == 0.0)
            throw Error(ErrorCode::degenerate_structure, "symplectic matrix is singular");
        if (piv != col) {
            for (int j = 0; j < 12; ++j) std::swap(a[piv][j], a[col][j]);
            det = -det;
        }
        det *= a[col][col];
        const double inv_p = 1.0 / a[col][col];
        for (int j = 0; j < 12; ++j) a[col][j] *= inv_p;
        for (int row = 0; row < 6; ++row) {
            if (row == col) continue;
            const double f = a[row][col];
            if (f == 0.0) continue;
            for (int j = 0; j < 12; ++j) a[row][j] -= f * a[col][j];
        }
    }
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) out[6 * i + j] = a[i][6 + j];
    return det;
}

double inf_norm(const Mat6& m) {
    double best = 0.0;
    for (int i = 0; i < 6; ++i) {
        double row = 0.0;
        for (int j = 0; j < 6; ++j) row += std::fabs(m[6 * i + j]);
        best = std::max(best, row);
    }
    return best;
}

}  // namespace

SymplecticFrame build_frame(const Vec3& r, const Vec3& p, int l, const FieldConfig& cfg,
                            const UnitSystem& units) {
    const Vec3 b = cfg.magnetic(r);
    const Vec3 curv = berry_curvature(p);  // enforces the momentum floor
    const double e = units.charge;
    const double hbar = units.hbar;

    SymplecticFrame f;
    auto set = [&f](int i, int j, double v) { f.omega[6 * i + j] = v; };

    // rp / pr blocks: canonical pairing, sign fixed so {r_i, p_j} = +delta_ij
    for (int i = 0; i < 3; ++i) {
        set(i, 3 + i, -1.0);
        set(3 + i, i, 1.0);
    }
    // rr block: e eps_ijk B_k; pp block: hbar l eps_ijk curv_k
    const Vec3 pp = hbar * l * curv;
    set(0, 1, e * b.z);
    set(0, 2, -e * b.y);
    set(1, 0, -e * b.z);
    set(1, 2, e * b.x);
    set(2, 0, e * b.y);
    set(2, 1, -e * b.x);
    set(3, 4, pp.z);
    set(3, 5, -pp.y);
    set(4, 3, -pp.z);
    set(4, 5, pp.x);
    set(5, 3, pp.y);
    set(5, 4, -pp.x);

    f.dos = 1.0 - e * hbar * l * dot(b, curv);
    if (std::fabs(f.dos) <= kDegeneracyFloor)
        throw Error(ErrorCode::degenerate_structure,
                    "build_frame: density-of-states factor D within 1e-6 of zero");

    const double det = invert6(f.omega, f.brackets);
    // the exact inverse is antisymmetric; discard the roundoff-symmetric part
    for (int i = 0; i < 6; ++i) {
        f.brackets[7 * i] = 0.0;
        for (int j = i + 1; j < 6; ++j) {
            const double v = 0.5 * (f.brackets[6 * i + j] - f.brackets[6 * j + i]);
            f.brackets[6 * i + j] = v;
            f.brackets[6 * j + i] = -v;
        }
    }
    f.sqrt_det = det > 0.0 ? std::sqrt(det) : 0.0;
    f.dos_det_gap = std::fabs(f.dos) - f.sqrt_det;
    f.condition = inf_norm(f.omega) * inf_norm(f.brackets);

    if (f.dos <= 0.0)
        f.warning = Warning::negative_dos;
    else if (f.condition > 1e8)
        f.warning = Warning::ill_conditioned;
    return f;
}

Vec6 hamiltonian_flow(const SymplecticFrame& frame, const Vec6& grad_h) {
    // Xdot = g^{-1} grad_H, and the inverse is already the bracket table
    Vec6 out{};
    for (int i = 0; i < 6; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 6; ++j) acc += frame.brackets[6 * i + j] * grad_h[j];
        out[i] = acc;
    }
    return out;
}

double bracket(const SymplecticFrame& frame, int i, int j) {
    if (i < 0 || i >= 6 || j < 0 || j >= 6)
        throw Error(ErrorCode::invalid_argument, "bracket: index out of range");
    return frame.brackets[6 * i + j];
}

}  // namespace vortex
