#pragma once

#include "msdyn/core.hpp"
#include "msdyn/fe_model.hpp"

#include <numeric>

namespace msdyn {

/// Reduced model of the massless-boundary component mode synthesis:
/// quasi-static boundary equation  k_bb d_b + k_bi d_i = W_b lambda + f_b,
/// dynamic internal equation       d_i'' + d_ii d_i' + k_ii d_i + k_ib d_b = f_i.
/// The boundary carries no mass; the retained internal coordinates are
/// mass-normalized fixed-interface modes, so m_ii is the identity.
struct ReducedStructuralModel {
    Mat m_ii, d_ii, k_ii;
    Mat k_bb, k_bi, k_ib;
    SpMat w_b;  // maps BE point forces (3 per point) to boundary DOFs
    double omega_max = 0.0;  // highest retained fixed-interface frequency [rad/s]
    int mode_count = 0;
    double alpha_damping = 0.0;  // d_ii = alpha * m_ii

    // Recovery of the full model's internal coordinates:
    //   d_internal = recovery * d_b + phi * d_i,
    // which also reduces full loads: f_b_red = f_b + recovery^T f_int,
    // f_i_red = phi^T f_int.
    Mat phi, recovery;
    std::vector<Index> boundary_index, internal_index;  // full-model coordinates

    Index n_boundary() const { return k_bb.rows(); }
    Index n_internal() const { return k_ii.rows(); }

    /// Splits a full-model force vector into reduced (f_b, f_i).
    void reduce_load(const Vec& f_full, Vec& f_b, Vec& f_i) const {
        Vec fb(boundary_index.size()), fi(internal_index.size());
        for (std::size_t j = 0; j < boundary_index.size(); ++j) fb[j] = f_full[boundary_index[j]];
        for (std::size_t j = 0; j < internal_index.size(); ++j) fi[j] = f_full[internal_index[j]];
        f_b = fb + recovery.transpose() * fi;
        f_i = phi.transpose() * fi;
    }

    /// Evaluates a full-model linear functional (row vector) on reduced coords:
    /// returns (row_b, row_i) with value = row_b . d_b + row_i . d_i.
    void reduce_functional(const Vec& row_full, Vec& row_b, Vec& row_i) const {
        reduce_load(row_full, row_b, row_i);
    }
};

namespace detail {

inline Mat dense_block(const SpMat& a, const std::vector<Index>& rows,
                       const std::vector<Index>& cols) {
    std::vector<Index> col_of(a.cols(), -1);
    for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = static_cast<Index>(j);
    std::vector<Index> row_of(a.rows(), -1);
    for (std::size_t j = 0; j < rows.size(); ++j) row_of[rows[j]] = static_cast<Index>(j);
    Mat out = Mat::Zero(rows.size(), cols.size());
    for (Index k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it) {
            const Index r = row_of[it.row()], c = col_of[it.col()];
            if (r >= 0 && c >= 0) out(r, c) = it.value();
        }
    return out;
}

}  // namespace detail

/// Massless-boundary Craig-Bampton reduction. All boundary DOFs are retained
/// as static (constraint) coordinates with exact static compliance; n_modes
/// mass-normalized fixed-interface normal modes carry the internal dynamics;
/// the mass partitions associated with the boundary are dropped.
inline ReducedStructuralModel massless_craig_bampton(const FullStructuralModel& full,
                                                     int n_modes,
                                                     bool allow_pure_static = false) {
    const Index n = full.size();
    std::vector<char> is_boundary(n, 0);
    for (Index b : full.boundary_dofs) {
        if (b < 0 || b >= n) throw InvalidArgument("reduction: boundary DOF out of range");
        if (is_boundary[b]) throw InvalidArgument("reduction: duplicate boundary DOF");
        is_boundary[b] = 1;
    }
    ReducedStructuralModel red;
    red.boundary_index = full.boundary_dofs;
    for (Index i = 0; i < n; ++i)
        if (!is_boundary[i]) red.internal_index.push_back(i);
    const Index nb = static_cast<Index>(red.boundary_index.size());
    const Index ni = static_cast<Index>(red.internal_index.size());
    if (n_modes < 0 || (n_modes == 0 && !allow_pure_static))
        throw InvalidArgument("reduction: n_modes must be >= 1");
    if (n_modes >= ni)
        throw InvalidArgument("reduction: n_modes must be less than the internal DOF count");

    const Mat k_ii = detail::dense_block(full.stiffness, red.internal_index, red.internal_index);
    const Mat k_ib = detail::dense_block(full.stiffness, red.internal_index, red.boundary_index);
    const Mat k_bb_full = detail::dense_block(full.stiffness, red.boundary_index, red.boundary_index);
    const Mat m_ii_full = detail::dense_block(full.mass, red.internal_index, red.internal_index);

    Eigen::LDLT<Mat> kii_fact(k_ii);
    {
        const Vec probe = Vec::Ones(ni);
        const Vec x = kii_fact.solve(probe);
        if (kii_fact.info() != Eigen::Success || !x.allFinite() ||
            (k_ii * x - probe).norm() > 1e-6 * probe.norm())
            throw SolverError("reduction: singular constrained stiffness (insufficient grounding)",
                              0.0, 0);
    }

    const Mat psi = -kii_fact.solve(k_ib);  // constraint modes
    Mat schur = k_bb_full + k_ib.transpose() * psi;
    schur = 0.5 * (schur + schur.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(k_ii, m_ii_full);
    if (eig.info() != Eigen::Success)
        throw SolverError("reduction: fixed-interface eigensolve failed", 0.0, 0);

    red.mode_count = n_modes;
    const Vec omega2 = eig.eigenvalues().head(n_modes).cwiseMax(0.0);
    red.phi = eig.eigenvectors().leftCols(n_modes);
    red.omega_max = n_modes > 0 ? std::sqrt(omega2[n_modes - 1]) : 0.0;

    red.m_ii = Mat::Identity(n_modes, n_modes);
    red.d_ii = Mat::Zero(n_modes, n_modes);
    red.k_ii = omega2.asDiagonal();
    red.k_bi = (red.phi.transpose() * k_ib).transpose();  // K_bi * phi
    red.k_ib = red.k_bi.transpose();

    // Residual-flexibility corrected boundary stiffness: static condensation
    // of the reduced model reproduces the exact Schur complement.
    Mat correction = Mat::Zero(nb, nb);
    Mat lam_inv_bt = Mat::Zero(n_modes, nb);
    for (int j = 0; j < n_modes; ++j) {
        if (omega2[j] <= 0.0)
            throw SolverError("reduction: zero fixed-interface frequency retained", 0.0, 0);
        lam_inv_bt.row(j) = red.k_ib.row(j) / omega2[j];
    }
    correction = red.k_bi * lam_inv_bt;
    red.k_bb = schur + 0.5 * (correction + correction.transpose());
    red.recovery = psi + red.phi * lam_inv_bt;
    return red;
}

/// Sets d_ii = alpha m_ii with alpha = 2 zeta omega_target.
inline ReducedStructuralModel mass_proportional_damping(ReducedStructuralModel model,
                                                        double omega_target, double zeta) {
    if (zeta < 0.0) throw InvalidArgument("damping: zeta must be >= 0");
    if (!(omega_target > 0.0)) throw InvalidArgument("damping: target frequency must be positive");
    model.alpha_damping = 2.0 * zeta * omega_target;
    model.d_ii = model.alpha_damping * model.m_ii;
    return model;
}

/// Modes of the reduced model with a set of contact points kinematically tied
/// through the BE coupling (empty set: free interface).
struct LinearizedModes {
    Vec frequency_hz;
    Mat eta_shapes;  // mass-normalized internal components, one column per mode
    Mat db_shapes;   // corresponding quasi-static boundary components
};

/// k_tied = W_s Css^{-1} W_s^T restricted to the stuck points; callers supply
/// this product because the compliance layout lives in the BE module.
inline LinearizedModes linearized_modes_with_contact_stiffness(
    const ReducedStructuralModel& model, const Mat& contact_stiffness_bb) {
    const Index nb = model.n_boundary();
    Mat k_eff_bb = model.k_bb;
    if (contact_stiffness_bb.size() > 0) {
        if (contact_stiffness_bb.rows() != nb || contact_stiffness_bb.cols() != nb)
            throw InvalidArgument("linearized modes: contact stiffness size mismatch");
        k_eff_bb += contact_stiffness_bb;
    }
    Eigen::LDLT<Mat> fact(k_eff_bb);
    const Mat neg_db = fact.solve(model.k_bi);  // d_b = -neg_db * eta
    Mat k_eff = Mat(model.k_ii) - model.k_ib * neg_db;
    k_eff = 0.5 * (k_eff + k_eff.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Mat> eig(k_eff);
    if (eig.info() != Eigen::Success)
        throw SolverError("linearized modes: eigensolve failed", 0.0, 0);
    LinearizedModes out;
    out.frequency_hz = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt() / (2.0 * kPi);
    out.eta_shapes = eig.eigenvectors();
    out.db_shapes = -neg_db * out.eta_shapes;
    return out;
}

}  // namespace msdyn
