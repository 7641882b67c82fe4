#pragma once

#include "msdyn/core.hpp"
#include "msdyn/fe_model.hpp"
#include "msdyn/halfspace.hpp"

namespace msdyn {

/// Coupling operator W_b: distributes BE point forces to the boundary DOFs
/// via the bilinear face shape functions of the parent FE interface mesh.
/// Columns follow the compliance component order (normal, x, y per point);
/// rows are boundary DOFs (x, y, z per node pair).
inline SpMat build_coupling(const InterfacePairGrid& iface, const BEGrid& grid,
                            const std::vector<int>& candidates) {
    if (iface.pair_count() == 0)
        throw InvalidArgument("coupling: model has no interface pair grid");
    const Index nb = 3 * static_cast<Index>(iface.pair_count());
    const Index m = static_cast<Index>(candidates.size());
    std::vector<Triplet> tt;
    tt.reserve(candidates.size() * 12);
    const double span_x = iface.hx * iface.nx, span_y = iface.hy * iface.ny;
    for (Index j = 0; j < m; ++j) {
        const double x = grid.x_of(candidates[j]) - iface.x0;
        const double y = grid.y_of(candidates[j]) - iface.y0;
        if (x < -1e-12 * span_x || x > span_x * (1 + 1e-12) || y < -1e-12 * span_y ||
            y > span_y * (1 + 1e-12))
            throw InvalidArgument("coupling: BE point outside the FE interface");
        int fx = std::min(static_cast<int>(x / iface.hx), iface.nx - 1);
        int fy = std::min(static_cast<int>(y / iface.hy), iface.ny - 1);
        fx = std::max(fx, 0);
        fy = std::max(fy, 0);
        const double xi = x / iface.hx - fx, eta = y / iface.hy - fy;
        const double wgt[4] = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
        const int pxy[4][2] = {{fx, fy}, {fx + 1, fy}, {fx + 1, fy + 1}, {fx, fy + 1}};
        for (int a = 0; a < 4; ++a) {
            const Index p = iface.pair_index(pxy[a][0], pxy[a][1]);
            // lambda components (n=z, t1=x, t2=y) -> pair DOFs (x, y, z)
            tt.emplace_back(3 * p + 2, 3 * j + 0, wgt[a]);
            tt.emplace_back(3 * p + 0, 3 * j + 1, wgt[a]);
            tt.emplace_back(3 * p + 1, 3 * j + 2, wgt[a]);
        }
    }
    SpMat w(nb, 3 * m);
    w.setFromTriplets(tt.begin(), tt.end());
    return w;
}

/// Boundary stiffness of a kinematically tied point set: W_s Css^{-1} W_s^T.
/// Used for linearized (stuck-contact) modal analysis.
inline Mat tied_contact_stiffness(const SpMat& w, const ComplianceMatrix& compliance,
                                  const std::vector<int>& stuck_sel) {
    if (stuck_sel.empty()) return Mat();
    const Mat css = compliance.sub_matrix(stuck_sel, false);
    Mat ws(w.rows(), 3 * stuck_sel.size());
    for (std::size_t k = 0; k < stuck_sel.size(); ++k)
        for (int cc = 0; cc < 3; ++cc)
            ws.col(3 * k + cc) = w.col(3 * stuck_sel[k] + cc);
    Eigen::LLT<Mat> llt(css);
    if (llt.info() != Eigen::Success)
        throw SolverError("tied contact stiffness: compliance block not SPD", 0.0, 0);
    Mat kc = ws * llt.solve(ws.transpose());
    return 0.5 * (kc + kc.transpose()).eval();
}

}  // namespace msdyn
