#pragma once

#include "msdyn/core.hpp"

#include <array>
#include <algorithm>
#include <optional>

namespace msdyn {

struct Material {
    double youngs_modulus = 0.0;  // [Pa]
    double poisson_ratio = 0.0;
    double density = 0.0;  // [kg/m^3]

    void validate() const {
        if (!(youngs_modulus > 0.0)) throw InvalidArgument("material: E must be positive");
        if (!(density > 0.0)) throw InvalidArgument("material: density must be positive");
        if (!(poisson_ratio > 0.0 && poisson_ratio < 0.5))
            throw InvalidArgument("material: nu must lie in (0, 0.5)");
    }
};

/// Two stacked rectangular blocks with a matching-node contact interface.
/// The bottom block is grounded at its base; the preload is applied as a
/// uniform normal traction on the top face of the top block.
struct MiniJointSpec {
    double length_x = 0.02, length_y = 0.02;   // footprint shared by both blocks [m]
    double height_bottom = 0.03, height_top = 0.03;
    int nx = 3, ny = 3, nz_bottom = 3, nz_top = 3;
    Material material{194e9, 0.2854, 7861.0};
    // Contact patch (BE extent), a sub-rectangle of the footprint.
    double patch_x0 = 0.0, patch_x1 = -1.0;  // -1 => full footprint
    double patch_y0 = 0.0, patch_y1 = -1.0;
    double preload = 1000.0;  // total interface normal force [N]
    bool ground_base = true;

    double patch_xmax() const { return patch_x1 < 0.0 ? length_x : patch_x1; }
    double patch_ymax() const { return patch_y1 < 0.0 ? length_y : patch_y1; }

    void validate() const {
        if (!(length_x > 0.0 && length_y > 0.0 && height_bottom > 0.0 && height_top > 0.0))
            throw InvalidArgument("mini joint: block dimensions must be positive");
        if (nx < 1 || ny < 1 || nz_bottom < 1 || nz_top < 1)
            throw InvalidArgument("mini joint: element counts must be >= 1 on every axis");
        material.validate();
        if (!(patch_x0 >= 0.0 && patch_xmax() <= length_x && patch_x0 < patch_xmax()))
            throw InvalidArgument("mini joint: contact patch exceeds footprint in x");
        if (!(patch_y0 >= 0.0 && patch_ymax() <= length_y && patch_y0 < patch_ymax()))
            throw InvalidArgument("mini joint: contact patch exceeds footprint in y");
        if (!(preload >= 0.0)) throw InvalidArgument("mini joint: preload must be >= 0");
    }
};

/// Lattice of matching interface node pairs (relative-displacement DOFs).
struct InterfacePairGrid {
    int nx = 0, ny = 0;          // node pairs per direction: (nx+1)*(ny+1) pairs
    double x0 = 0.0, y0 = 0.0;   // position of pair (0,0)
    double hx = 0.0, hy = 0.0;   // pair lattice spacing
    std::vector<int> top_node, bottom_node;  // (nx+1)*(ny+1), mesh node ids

    int pair_count() const { return (nx + 1) * (ny + 1); }
    int pair_index(int ix, int iy) const { return ix + (nx + 1) * iy; }
};

/// Assembled linear FE model in coordinates [boundary relative DOFs; internal].
struct FullStructuralModel {
    SpMat mass, stiffness, damping;
    Index n_boundary = 0;
    std::vector<Index> boundary_dofs;  // indices into the model coordinates

    // Geometry (present for mesh-built models, absent for imported matrices).
    Mat node_coords;              // n_nodes x 3
    Eigen::MatrixXi node_dof;     // n_nodes x 3, free raw-DOF index or -1 (grounded)
    SpMat raw_from_q;             // d_raw = raw_from_q * q
    InterfacePairGrid interface_grid;
    double model_diagonal = 0.0;

    Index size() const { return stiffness.rows(); }
    Index n_internal() const { return size() - n_boundary; }
    bool has_geometry() const { return node_coords.rows() > 0; }
};

namespace detail {

// 8-node hexahedron, nodes in the usual (-1,-1,-1)...(-1,+1,+1) order.
inline void hex8_shape(const Vec3& xi, std::array<double, 8>& n,
                       std::array<Vec3, 8>& dn) {
    static const double sgn[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                     {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
    for (int a = 0; a < 8; ++a) {
        const double gx = sgn[a][0], gy = sgn[a][1], gz = sgn[a][2];
        n[a] = 0.125 * (1 + gx * xi[0]) * (1 + gy * xi[1]) * (1 + gz * xi[2]);
        dn[a] = 0.125 * Vec3(gx * (1 + gy * xi[1]) * (1 + gz * xi[2]),
                             gy * (1 + gx * xi[0]) * (1 + gz * xi[2]),
                             gz * (1 + gx * xi[0]) * (1 + gy * xi[1]));
    }
}

/// Element stiffness and consistent mass for a hex8 with given corner coords.
inline void hex8_matrices(const std::array<Vec3, 8>& coords, const Material& mat,
                          Eigen::Matrix<double, 24, 24>& ke,
                          Eigen::Matrix<double, 24, 24>& me) {
    const double e = mat.youngs_modulus, nu = mat.poisson_ratio;
    const double lam = e * nu / ((1 + nu) * (1 - 2 * nu));
    const double mu = e / (2 * (1 + nu));
    Eigen::Matrix<double, 6, 6> dmat = Eigen::Matrix<double, 6, 6>::Zero();
    dmat(0, 0) = dmat(1, 1) = dmat(2, 2) = lam + 2 * mu;
    dmat(0, 1) = dmat(0, 2) = dmat(1, 0) = dmat(1, 2) = dmat(2, 0) = dmat(2, 1) = lam;
    dmat(3, 3) = dmat(4, 4) = dmat(5, 5) = mu;

    ke.setZero();
    me.setZero();
    const double gp = 1.0 / std::sqrt(3.0);
    std::array<double, 8> n;
    std::array<Vec3, 8> dn;
    for (int ig = 0; ig < 8; ++ig) {
        const Vec3 xi((ig & 1) ? gp : -gp, (ig & 2) ? gp : -gp, (ig & 4) ? gp : -gp);
        hex8_shape(xi, n, dn);
        Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
        for (int a = 0; a < 8; ++a) jac += coords[a] * dn[a].transpose();
        const double detj = jac.determinant();
        if (!(detj > 0.0)) throw InvalidArgument("hex8: degenerate (non-positive volume) element");
        const Eigen::Matrix3d jinv = jac.inverse();

        Eigen::Matrix<double, 6, 24> bmat = Eigen::Matrix<double, 6, 24>::Zero();
        for (int a = 0; a < 8; ++a) {
            const Vec3 g = jinv.transpose() * dn[a];
            bmat(0, 3 * a + 0) = g[0];
            bmat(1, 3 * a + 1) = g[1];
            bmat(2, 3 * a + 2) = g[2];
            bmat(3, 3 * a + 0) = g[1];
            bmat(3, 3 * a + 1) = g[0];
            bmat(4, 3 * a + 1) = g[2];
            bmat(4, 3 * a + 2) = g[1];
            bmat(5, 3 * a + 0) = g[2];
            bmat(5, 3 * a + 2) = g[0];
        }
        ke += bmat.transpose() * dmat * bmat * detj;
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                const double m = mat.density * n[a] * n[b] * detj;
                me(3 * a, 3 * b) += m;
                me(3 * a + 1, 3 * b + 1) += m;
                me(3 * a + 2, 3 * b + 2) += m;
            }
    }
}

struct BlockMesh {
    int nx, ny, nz;
    double lx, ly, lz;
    int node_count() const { return (nx + 1) * (ny + 1) * (nz + 1); }
    int node_id(int ix, int iy, int iz) const { return ix + (nx + 1) * (iy + (ny + 1) * iz); }
    Vec3 node_pos(int id) const {
        const int ix = id % (nx + 1);
        const int iy = (id / (nx + 1)) % (ny + 1);
        const int iz = id / ((nx + 1) * (ny + 1));
        return {lx * ix / nx, ly * iy / ny, lz * iz / nz};
    }
};

inline void scatter_block(const BlockMesh& mesh, double z_offset, int node_offset,
                          const Material& mat, std::vector<Triplet>& kt,
                          std::vector<Triplet>& mt) {
    // Regular lattice: one element matrix serves all elements of the block.
    std::array<Vec3, 8> coords;
    static const int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const Vec3 hs(mesh.lx / mesh.nx, mesh.ly / mesh.ny, mesh.lz / mesh.nz);
    for (int a = 0; a < 8; ++a)
        coords[a] = Vec3(corner[a][0] * hs[0], corner[a][1] * hs[1], corner[a][2] * hs[2]);
    Eigen::Matrix<double, 24, 24> ke, me;
    hex8_matrices(coords, mat, ke, me);

    for (int ez = 0; ez < mesh.nz; ++ez)
        for (int ey = 0; ey < mesh.ny; ++ey)
            for (int ex = 0; ex < mesh.nx; ++ex) {
                std::array<int, 8> nodes;
                for (int a = 0; a < 8; ++a)
                    nodes[a] = node_offset + mesh.node_id(ex + corner[a][0], ey + corner[a][1],
                                                          ez + corner[a][2]);
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b)
                        for (int ca = 0; ca < 3; ++ca)
                            for (int cb = 0; cb < 3; ++cb) {
                                const double kv = ke(3 * a + ca, 3 * b + cb);
                                const double mv = me(3 * a + ca, 3 * b + cb);
                                if (kv != 0.0)
                                    kt.emplace_back(3 * nodes[a] + ca, 3 * nodes[b] + cb, kv);
                                if (mv != 0.0)
                                    mt.emplace_back(3 * nodes[a] + ca, 3 * nodes[b] + cb, mv);
                            }
            }
    (void)z_offset;
}

}  // namespace detail

/// Raw stiffness and consistent mass of one free rectangular hex8 block.
inline void hex_block_matrices(double lx, double ly, double lz, int nx, int ny, int nz,
                               const Material& mat, SpMat& k_out, SpMat& m_out) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw InvalidArgument("hex block: element counts must be >= 1 on every axis");
    if (!(lx > 0 && ly > 0 && lz > 0))
        throw InvalidArgument("hex block: dimensions must be positive");
    mat.validate();
    detail::BlockMesh mesh{nx, ny, nz, lx, ly, lz};
    std::vector<Triplet> kt, mt;
    detail::scatter_block(mesh, 0.0, 0, mat, kt, mt);
    const int n = 3 * mesh.node_count();
    k_out.resize(n, n);
    m_out.resize(n, n);
    k_out.setFromTriplets(kt.begin(), kt.end());
    m_out.setFromTriplets(mt.begin(), mt.end());
}

/// Assembles the two-block mini joint. Matching interface nodes are paired by
/// their lattice position; the model coordinates are [3 relative translations
/// per pair; all remaining free DOFs].
inline FullStructuralModel assemble_mini_joint(const MiniJointSpec& spec) {
    spec.validate();
    const detail::BlockMesh bot{spec.nx, spec.ny, spec.nz_bottom,
                                spec.length_x, spec.length_y, spec.height_bottom};
    const detail::BlockMesh top{spec.nx, spec.ny, spec.nz_top,
                                spec.length_x, spec.length_y, spec.height_top};
    const int n_bot = bot.node_count();
    const int n_top = top.node_count();
    const int n_nodes = n_bot + n_top;

    FullStructuralModel model;
    model.node_coords.resize(n_nodes, 3);
    for (int i = 0; i < n_bot; ++i) model.node_coords.row(i) = bot.node_pos(i);
    for (int i = 0; i < n_top; ++i) {
        Vec3 p = top.node_pos(i);
        p[2] += spec.height_bottom;
        model.node_coords.row(n_bot + i) = p;
    }
    model.model_diagonal =
        Vec3(spec.length_x, spec.length_y, spec.height_bottom + spec.height_top).norm();

    // Interface pairing: bottom block top face vs. top block bottom face.
    // Conforming lattices make the coordinate match exact; verify anyway.
    InterfacePairGrid& iface = model.interface_grid;
    iface.nx = spec.nx;
    iface.ny = spec.ny;
    iface.x0 = 0.0;
    iface.y0 = 0.0;
    iface.hx = spec.length_x / spec.nx;
    iface.hy = spec.length_y / spec.ny;
    iface.top_node.resize(iface.pair_count());
    iface.bottom_node.resize(iface.pair_count());
    const double tol = 1e-9 * model.model_diagonal;
    for (int iy = 0; iy <= spec.ny; ++iy)
        for (int ix = 0; ix <= spec.nx; ++ix) {
            const int p = iface.pair_index(ix, iy);
            iface.bottom_node[p] = bot.node_id(ix, iy, spec.nz_bottom);
            iface.top_node[p] = n_bot + top.node_id(ix, iy, 0);
            if ((model.node_coords.row(iface.bottom_node[p]) -
                 model.node_coords.row(iface.top_node[p]))
                    .norm() > tol)
                throw InvalidArgument("mini joint: interface nodes fail to match");
        }

    // Grounding: base of the bottom block.
    model.node_dof.setConstant(n_nodes, 3, -1);
    int n_raw = 0;
    for (int i = 0; i < n_nodes; ++i) {
        const bool grounded = spec.ground_base && i < n_bot &&
                              std::abs(model.node_coords(i, 2)) < tol;
        if (grounded) continue;
        for (int c = 0; c < 3; ++c) model.node_dof(i, c) = n_raw++;
    }

    std::vector<Triplet> kt, mt;
    detail::scatter_block(bot, 0.0, 0, spec.material, kt, mt);
    detail::scatter_block(top, spec.height_bottom, n_bot, spec.material, kt, mt);

    // Reduce triplets to free raw DOFs.
    auto raw_of = [&](int full) -> int {
        return model.node_dof(full / 3, full % 3);
    };
    std::vector<Triplet> ktf, mtf;
    ktf.reserve(kt.size());
    mtf.reserve(mt.size());
    for (const auto& t : kt) {
        const int r = raw_of(static_cast<int>(t.row())), c = raw_of(static_cast<int>(t.col()));
        if (r >= 0 && c >= 0) ktf.emplace_back(r, c, t.value());
    }
    for (const auto& t : mt) {
        const int r = raw_of(static_cast<int>(t.row())), c = raw_of(static_cast<int>(t.col()));
        if (r >= 0 && c >= 0) mtf.emplace_back(r, c, t.value());
    }
    SpMat k_raw(n_raw, n_raw), m_raw(n_raw, n_raw);
    k_raw.setFromTriplets(ktf.begin(), ktf.end());
    m_raw.setFromTriplets(mtf.begin(), mtf.end());

    // Transform to [relative boundary DOFs; internal]: for an interface pair
    // (a top, b bottom), d_a = delta + d_b and d_b stays internal.
    const int n_pairs = iface.pair_count();
    const Index nb = 3 * n_pairs;
    const Index nq = n_raw;  // same count: top-node DOFs are replaced by deltas
    std::vector<Index> q_of_raw(n_raw, -1);
    std::vector<int> delta_of_raw(n_raw, -1);  // top-node raw dof -> boundary index
    std::vector<int> partner_raw(n_raw, -1);   // top-node raw dof -> bottom raw dof
    for (int p = 0; p < n_pairs; ++p)
        for (int c = 0; c < 3; ++c) {
            const int rt = model.node_dof(iface.top_node[p], c);
            const int rb = model.node_dof(iface.bottom_node[p], c);
            if (rt < 0 || rb < 0) throw InvalidArgument("mini joint: grounded interface node");
            delta_of_raw[rt] = 3 * p + c;
            partner_raw[rt] = rb;
        }
    Index next_internal = nb;
    for (int r = 0; r < n_raw; ++r)
        if (delta_of_raw[r] < 0) q_of_raw[r] = next_internal++;

    std::vector<Triplet> tt;
    tt.reserve(n_raw + nb);
    for (int r = 0; r < n_raw; ++r) {
        if (delta_of_raw[r] >= 0) {
            tt.emplace_back(r, delta_of_raw[r], 1.0);
            tt.emplace_back(r, q_of_raw[partner_raw[r]], 1.0);
        } else {
            tt.emplace_back(r, q_of_raw[r], 1.0);
        }
    }
    model.raw_from_q.resize(n_raw, nq);
    model.raw_from_q.setFromTriplets(tt.begin(), tt.end());

    model.stiffness = model.raw_from_q.transpose() * (k_raw * model.raw_from_q).eval();
    model.mass = model.raw_from_q.transpose() * (m_raw * model.raw_from_q).eval();
    model.stiffness = 0.5 * (SpMat(model.stiffness.transpose()) + model.stiffness);
    model.mass = 0.5 * (SpMat(model.mass.transpose()) + model.mass);
    model.damping.resize(nq, nq);
    model.n_boundary = nb;
    model.boundary_dofs.resize(nb);
    for (Index i = 0; i < nb; ++i) model.boundary_dofs[i] = i;
    return model;
}

/// Consistent nodal force vector (model coordinates) for a uniform traction
/// on the top face of the top block, scaled to the given total force along z.
inline Vec top_face_load(const FullStructuralModel& model, const MiniJointSpec& spec,
                         double total_force_z) {
    const double pressure = total_force_z / (spec.length_x * spec.length_y);
    const int n_nodes = static_cast<int>(model.node_coords.rows());
    const detail::BlockMesh top{spec.nx, spec.ny, spec.nz_top,
                                spec.length_x, spec.length_y, spec.height_top};
    const int n_bot = n_nodes - top.node_count();
    const double z_top = spec.height_bottom + spec.height_top;
    const double tol = 1e-9 * model.model_diagonal;

    Vec f_raw = Vec::Zero(model.raw_from_q.rows());
    const double face_area = (spec.length_x / spec.nx) * (spec.length_y / spec.ny);
    for (int ey = 0; ey < spec.ny; ++ey)
        for (int ex = 0; ex < spec.nx; ++ex) {
            const int corners[4][2] = {{ex, ey}, {ex + 1, ey}, {ex + 1, ey + 1}, {ex, ey + 1}};
            for (const auto& c : corners) {
                const int node = n_bot + top.node_id(c[0], c[1], spec.nz_top);
                if (std::abs(model.node_coords(node, 2) - z_top) > tol)
                    throw InvalidArgument("top face load: node off the top plane");
                const int dof = model.node_dof(node, 2);
                if (dof >= 0) f_raw[dof] += pressure * face_area / 4.0;
            }
        }
    return model.raw_from_q.transpose() * f_raw;
}

/// Linear functional extracting one displacement component at the mesh node
/// closest to `position`; returns (q-space row vector, node id).
inline std::pair<Vec, int> sensor_functional(const FullStructuralModel& model,
                                             const Vec3& position, int comp) {
    if (!model.has_geometry())
        throw InvalidArgument("sensor: model carries no mesh geometry");
    if (comp < 0 || comp > 2) throw InvalidArgument("sensor: component must be 0, 1, or 2");
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int i = 0; i < model.node_coords.rows(); ++i) {
        const double d = (model.node_coords.row(i).transpose() - position).norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    const int raw = model.node_dof(best, comp);
    if (raw < 0) throw InvalidArgument("sensor: requested DOF is grounded");
    return {Vec(model.raw_from_q.row(raw).transpose()), best};
}

}  // namespace msdyn
