#pragma once

#include "msdyn/core.hpp"
#include "msdyn/coupling.hpp"
#include "msdyn/halfspace.hpp"
#include "msdyn/reduction.hpp"

namespace msdyn {

enum class ContactStatus : unsigned char { open = 0, stick = 1, slip = 2 };

/// Per-candidate-point contact variables; 3 components per point in the order
/// (normal, tangential x, tangential y). `g` is the current gap in the normal
/// slot and the accumulated relative slide in the tangential slots.
struct ContactState {
    Vec lambda;    // forces [N]
    Vec g;         // relative displacements [m]
    Vec gamma_dt;  // last increment of g
    std::vector<ContactStatus> status;

    Index point_count() const { return static_cast<Index>(status.size()); }
    double lambda_n(Index j) const { return lambda[3 * j]; }
    double lambda_t_norm(Index j) const {
        return std::hypot(lambda[3 * j + 1], lambda[3 * j + 2]);
    }
    double total_normal_force() const {
        double s = 0.0;
        for (Index j = 0; j < point_count(); ++j) s += lambda[3 * j];
        return s;
    }
};

/// Projects a per-point (normal, t1, t2) triple onto R0+ x D(mu * n+):
/// normal clamped first, then the tangential pair radially onto the disk.
inline Vec3 project_admissible(const Vec3& x, double mu) {
    Vec3 out;
    out[0] = std::max(x[0], 0.0);
    const double radius = mu * out[0];
    const double tn = std::hypot(x[1], x[2]);
    if (tn <= radius || tn == 0.0) {
        out[1] = x[1];
        out[2] = x[2];
    } else {
        const double s = radius / tn;
        out[1] = x[1] * s;
        out[2] = x[2] * s;
    }
    return out;
}

struct ALConfig {
    double rel_tol = 1e-12;
    long max_iter = 20000;     // projected-Jacobi sweep cap
    double relaxation = 1.0;   // r in eps_j = r / G_jj
    int max_outer = 50;        // active-set changes per step
    double force_scale = 0.0;  // reference force for the relative tolerance
};

struct SolveStats {
    long sweeps = 0;
    long outer_iterations = 0;
    long factorizations = 0;
    double final_residual = 0.0;

    void accumulate(const SolveStats& s) {
        sweeps += s.sweeps;
        outer_iterations += s.outer_iterations;
        factorizations += s.factorizations;
        final_residual = std::max(final_residual, s.final_residual);
    }
};

/// Immutable per-analysis contact data: candidate points, initial gaps,
/// compliance blocks, FE coupling, and the cached K_bb factorization.
struct ContactContext {
    std::vector<int> candidates;  // grid indices (inside apparent area, not
                                  // geometrically excluded)
    Vec h;                        // initial gap per candidate
    ComplianceMatrix compliance;  // blocks over candidates
    SpMat w;                      // nb x 3m (size 0 => rigid frame / pure BE)
    Mat z;                        // K_bb^{-1} W
    Eigen::LLT<Mat> kbb_llt;
    bool has_structure = false;
    double mu = 0.0;
    double delta_a = 0.0;

    Index count() const { return static_cast<Index>(candidates.size()); }
    bool normal_only() const { return mu == 0.0 || !compliance.has_tangential; }

    // single-slot cache for the stuck-block factorization
    mutable std::uint64_t cached_key = 0;
    mutable Eigen::LLT<Mat> cached_llt;
};

inline ContactContext make_contact_context(std::vector<int> candidates, Vec h,
                                           ComplianceMatrix compliance, double mu,
                                           const SpMat& w = SpMat(),
                                           const Mat& k_bb = Mat()) {
    ContactContext ctx;
    ctx.candidates = std::move(candidates);
    ctx.h = std::move(h);
    ctx.compliance = std::move(compliance);
    ctx.mu = mu;
    ctx.delta_a = ctx.compliance.delta_a;
    if (mu < 0.0) throw InvalidArgument("contact: mu must be >= 0");
    if (ctx.h.size() != ctx.count())
        throw InvalidArgument("contact: gap vector does not match candidate count");
    if (ctx.compliance.count() != ctx.count())
        throw InvalidArgument("contact: compliance blocks do not match candidate count");
    if (w.size() > 0) {
        if (w.cols() != 3 * ctx.count() || k_bb.rows() != w.rows())
            throw InvalidArgument("contact: coupling/stiffness dimensions inconsistent");
        ctx.w = w;
        ctx.kbb_llt.compute(k_bb);
        if (ctx.kbb_llt.info() != Eigen::Success)
            throw SolverError("contact: boundary stiffness k_bb is not SPD", 0.0, 0);
        ctx.z = ctx.kbb_llt.solve(Mat(w));
        ctx.has_structure = true;
    }
    return ctx;
}

inline ContactState make_contact_state(const ContactContext& ctx) {
    ContactState s;
    s.lambda = Vec::Zero(3 * ctx.count());
    s.g = Vec::Zero(3 * ctx.count());
    for (Index j = 0; j < ctx.count(); ++j) s.g[3 * j] = ctx.h[j];
    s.gamma_dt = Vec::Zero(3 * ctx.count());
    s.status.assign(ctx.count(), ContactStatus::open);
    return s;
}

/// Right-hand side of the per-step contact system over all candidates:
/// c = h + W^T K_bb^{-1} (f_ex_b - k_bi d_i) - g_prev.
inline Vec step_rhs(const ContactContext& ctx, const ReducedStructuralModel& model,
                    const Vec& f_ex_b, const Vec& d_i_next, const Vec& g_prev) {
    if (!ctx.has_structure) throw InvalidArgument("step_rhs: context has no structure");
    const Vec u_b = ctx.kbb_llt.solve(f_ex_b - model.k_bi * d_i_next);
    Vec c = ctx.w.transpose() * u_b - g_prev;
    for (Index j = 0; j < ctx.count(); ++j) c[3 * j] += ctx.h[j];
    return c;
}

/// RHS for a rigid far-field motion (pure-BE problems): rel is the uniform
/// relative displacement (normal separation, x-slide, y-slide).
inline Vec rigid_rhs(const ContactContext& ctx, const Vec3& rel, const Vec& g_prev) {
    Vec c = -g_prev;
    for (Index j = 0; j < ctx.count(); ++j) {
        c[3 * j + 0] += ctx.h[j] + rel[0];
        c[3 * j + 1] += rel[1];
        c[3 * j + 2] += rel[2];
    }
    return c;
}

/// Candidate closed set from a gap/force prediction; geometrically open
/// points never enter.
inline std::vector<Index> estimate_active_set(const Vec& g_n_pred, const Vec& lambda_pred,
                                              const std::vector<char>& excluded) {
    std::vector<Index> closed;
    const Index m = g_n_pred.size();
    for (Index j = 0; j < m; ++j) {
        if (!excluded.empty() && excluded[j]) continue;
        if (g_n_pred[j] <= 0.0 || lambda_pred[3 * j] > 0.0) closed.push_back(j);
    }
    return closed;
}

struct DelassusOperator {
    Mat g_mat;
    Vec c_vec;
    std::vector<Index> active;  // candidate indices
    bool normal_only = false;
    double mu = 0.0;
    const ContactContext* ctx = nullptr;  // enables set growth and caching
    Vec c_full;                           // rhs over all candidates (with ctx)
};

/// G = C + W^T K_bb^{-1} W restricted to the active points.
inline Mat delassus_matrix(const ContactContext& ctx, const std::vector<Index>& active,
                           bool normal_only) {
    std::vector<int> sel(active.begin(), active.end());
    Mat g = ctx.compliance.sub_matrix(sel, normal_only);
    if (ctx.has_structure) {
        const Index na = static_cast<Index>(active.size());
        const int comps = normal_only ? 1 : 3;
        Mat wa(ctx.w.rows(), comps * na);
        Mat za(ctx.w.rows(), comps * na);
        for (Index k = 0; k < na; ++k)
            for (int c = 0; c < comps; ++c) {
                // normal-only keeps the normal column (component 0)
                wa.col(comps * k + c) = ctx.w.col(3 * active[k] + c);
                za.col(comps * k + c) = ctx.z.col(3 * active[k] + c);
            }
        g.noalias() += wa.transpose() * za;
        g = 0.5 * (g + g.transpose()).eval();
    }
    return g;
}

inline DelassusOperator assemble_delassus(const ContactContext& ctx,
                                          const std::vector<Index>& active, const Vec& c_full) {
    DelassusOperator op;
    op.ctx = &ctx;
    op.active = active;
    op.normal_only = ctx.normal_only();
    op.mu = ctx.mu;
    op.g_mat = delassus_matrix(ctx, active, op.normal_only);
    op.c_full = c_full;
    const int comps = op.normal_only ? 1 : 3;
    op.c_vec.resize(comps * active.size());
    for (std::size_t k = 0; k < active.size(); ++k)
        for (int c = 0; c < comps; ++c) op.c_vec[comps * k + c] = c_full[3 * active[k] + c];
    return op;
}

namespace detail {

inline std::uint64_t index_set_key(const std::vector<Index>& v) {
    std::uint64_t h = fnv1a64(v.data(), v.size() * sizeof(Index));
    return h ^ (0x9e3779b97f4a7c15ull + v.size());
}

/// Evaluates dg = G lambda + c over all candidates (not just the active set).
inline Vec full_increment(const ContactContext& ctx, const std::vector<Index>& active,
                          const Vec& lambda_active_full, const Vec& c_full) {
    const Index m = ctx.count();
    Vec dg = c_full;
    const bool tang = !ctx.normal_only();
    // compliance part, blockwise
    Vec ln(active.size()), lx(active.size()), ly(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        ln[k] = lambda_active_full[3 * active[k] + 0];
        lx[k] = lambda_active_full[3 * active[k] + 1];
        ly[k] = lambda_active_full[3 * active[k] + 2];
    }
    const auto& cm = ctx.compliance;
    for (Index i = 0; i < m; ++i) {
        double an = 0.0, ax = 0.0, ay = 0.0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const int jj = static_cast<int>(active[k]);
            an += cm.czz(i, jj) * ln[k];
            if (tang) {
                ax += cm.cxx(i, jj) * lx[k] + cm.cxy(i, jj) * ly[k];
                ay += cm.cxy(i, jj) * lx[k] + cm.cyy(i, jj) * ly[k];
                if (cm.coupled()) {
                    ax += cm.cxz(i, jj) * ln[k];
                    ay += cm.cyz(i, jj) * ln[k];
                    an += cm.cxz(jj, i) * lx[k] + cm.cyz(jj, i) * ly[k];
                }
            }
        }
        dg[3 * i + 0] += an;
        dg[3 * i + 1] += ax;
        dg[3 * i + 2] += ay;
    }
    if (ctx.has_structure) {
        const Vec v = ctx.z * lambda_active_full;  // = K_bb^{-1} W lambda
        dg += ctx.w.transpose() * v;
    }
    return dg;
}

}  // namespace detail

/// Augmented-Lagrangian contact solve: outer active-set loop, exact
/// elimination of presumed-sticking contacts, projected Jacobi on the rest
/// with eps_j = r / G_jj and automatic relaxation adjustment.
inline ContactState solve_quasistatic(const DelassusOperator& op_in, const ALConfig& cfg,
                                      const ContactState& warm, SolveStats* stats_out = nullptr) {
    SolveStats stats;
    const ContactContext* ctx = op_in.ctx;
    const bool normal_only = op_in.normal_only;
    const int comps = normal_only ? 1 : 3;
    const double mu = op_in.mu;

    const Index m = ctx ? ctx->count()
                        : (op_in.active.empty()
                               ? 0
                               : 1 + *std::max_element(op_in.active.begin(), op_in.active.end()));
    ContactState out = warm;
    if (out.lambda.size() != 3 * m) {
        out.lambda = Vec::Zero(3 * m);
        out.g = Vec::Zero(3 * m);
        out.gamma_dt = Vec::Zero(3 * m);
        out.status.assign(m, ContactStatus::open);
    }

    std::vector<Index> closed = op_in.active;
    if (closed.empty()) {
        out.lambda.setZero();
        if (ctx) {
            const Vec dg = detail::full_increment(*ctx, closed, out.lambda, op_in.c_full);
            out.gamma_dt = dg;
            out.g = warm.g + dg;
        }
        std::fill(out.status.begin(), out.status.end(), ContactStatus::open);
        if (stats_out) stats_out->accumulate(stats);
        return out;
    }

    // stick presumption from the warm state
    std::vector<char> presume_stick(m, 0);
    for (Index j : closed)
        presume_stick[j] = (warm.status.size() == static_cast<std::size_t>(m) &&
                            warm.status[j] != ContactStatus::slip)
                               ? 1
                               : 0;
    std::vector<int> demotions(m, 0);

    Mat g_cc = op_in.g_mat;
    Vec c_c = op_in.c_vec;
    bool need_assembly = false;
    double relaxation = cfg.relaxation;
    std::vector<std::uint64_t> seen_sets;

    const double gap_scale = std::max(op_in.c_full.size() ? op_in.c_full.cwiseAbs().maxCoeff()
                                                          : op_in.c_vec.cwiseAbs().maxCoeff(),
                                      1e-300);

    for (int outer = 0;; ++outer) {
        if (outer >= cfg.max_outer)
            throw SolverError("contact: active-set loop exceeded max changes",
                              stats.final_residual, stats.sweeps);
        stats.outer_iterations++;

        if (need_assembly) {
            if (!ctx)
                throw SolverError("contact: active set change requires a contact context",
                                  0.0, stats.sweeps);
            g_cc = delassus_matrix(*ctx, closed, normal_only);
            c_c.resize(comps * closed.size());
            for (std::size_t k = 0; k < closed.size(); ++k)
                for (int c = 0; c < comps; ++c)
                    c_c[comps * k + c] = op_in.c_full[3 * closed[k] + c];
            need_assembly = false;
        }

        const Index nc = static_cast<Index>(closed.size());
        // Partition: eliminated stick block S, iterated block R.
        std::vector<Index> s_pts, r_pts;
        for (Index k = 0; k < nc; ++k)
            (presume_stick[closed[k]] ? s_pts : r_pts).push_back(k);

        std::vector<Index> s_idx, r_idx;  // packed component indices
        for (Index k : s_pts)
            for (int c = 0; c < comps; ++c) s_idx.push_back(comps * k + c);
        for (Index k : r_pts)
            for (int c = 0; c < comps; ++c) r_idx.push_back(comps * k + c);

        Mat g_ss(s_idx.size(), s_idx.size()), g_sr(s_idx.size(), r_idx.size());
        Mat g_rr(r_idx.size(), r_idx.size()), g_rs(r_idx.size(), s_idx.size());
        for (std::size_t a = 0; a < s_idx.size(); ++a) {
            for (std::size_t b = 0; b < s_idx.size(); ++b) g_ss(a, b) = g_cc(s_idx[a], s_idx[b]);
            for (std::size_t b = 0; b < r_idx.size(); ++b) g_sr(a, b) = g_cc(s_idx[a], r_idx[b]);
        }
        for (std::size_t a = 0; a < r_idx.size(); ++a) {
            for (std::size_t b = 0; b < r_idx.size(); ++b) g_rr(a, b) = g_cc(r_idx[a], r_idx[b]);
            for (std::size_t b = 0; b < s_idx.size(); ++b) g_rs(a, b) = g_cc(r_idx[a], s_idx[b]);
        }
        Vec c_s(s_idx.size()), c_r(r_idx.size());
        for (std::size_t a = 0; a < s_idx.size(); ++a) c_s[a] = c_c[s_idx[a]];
        for (std::size_t a = 0; a < r_idx.size(); ++a) c_r[a] = c_c[r_idx[a]];

        const Eigen::LLT<Mat>* s_fact = nullptr;
        Eigen::LLT<Mat> local_fact;
        if (!s_pts.empty()) {
            std::vector<Index> key_set;
            key_set.reserve(s_pts.size() + 1);
            for (Index k : s_pts) key_set.push_back(closed[k]);
            key_set.push_back(normal_only ? -1 : -2);
            const std::uint64_t key = detail::index_set_key(key_set);
            if (ctx && ctx->cached_key == key && ctx->cached_llt.rows() > 0) {
                s_fact = &ctx->cached_llt;
            } else {
                local_fact.compute(g_ss);
                stats.factorizations++;
                if (local_fact.info() != Eigen::Success)
                    throw SolverError("contact: stuck-block Delassus not SPD", 0.0, stats.sweeps);
                if (ctx) {
                    ctx->cached_llt = local_fact;
                    ctx->cached_key = key;
                    s_fact = &ctx->cached_llt;
                } else {
                    s_fact = &local_fact;
                }
            }
        }

        // warm start packed iterate
        Vec lam_s = Vec::Zero(s_idx.size()), lam_r = Vec::Zero(r_idx.size());
        for (std::size_t a = 0; a < s_idx.size(); ++a) {
            const Index k = s_idx[a] / comps, c = s_idx[a] % comps;
            lam_s[a] = out.lambda[3 * closed[k] + c];
        }
        for (std::size_t a = 0; a < r_idx.size(); ++a) {
            const Index k = r_idx[a] / comps, c = r_idx[a] % comps;
            lam_r[a] = out.lambda[3 * closed[k] + c];
        }

        Vec eps(r_idx.size());
        auto rebuild_eps = [&]() {
            for (std::size_t a = 0; a < r_idx.size(); ++a)
                eps[a] = relaxation / std::max(g_rr(a, a), 1e-300);
        };
        rebuild_eps();

        double force_scale = std::max(cfg.force_scale, 1e-300);
        auto update_scale = [&]() {
            double ls = 0.0;
            if (lam_s.size()) ls = std::max(ls, lam_s.cwiseAbs().maxCoeff());
            if (lam_r.size()) ls = std::max(ls, lam_r.cwiseAbs().maxCoeff());
            force_scale = std::max(ls, std::max(cfg.force_scale, 1e-300));
        };

        if (r_pts.empty()) {
            if (s_fact) lam_s = s_fact->solve(-c_s);
            stats.sweeps++;
            stats.final_residual = 0.0;
        } else {
            double best_delta = std::numeric_limits<double>::max();
            long best_sweep = 0;
            Vec best_r = lam_r;
            long sweep = 0;
            for (;; ++sweep) {
                if (sweep >= cfg.max_iter) {
                    update_scale();
                    throw SolverError("contact: projected Jacobi failed to converge",
                                      best_delta / force_scale, stats.sweeps);
                }
                stats.sweeps++;
                if (s_fact) lam_s = s_fact->solve(-(c_s + g_sr * lam_r));
                Vec resid = c_r;
                resid.noalias() += g_rr * lam_r;
                if (s_fact) resid.noalias() += g_rs * lam_s;

                double delta = 0.0;
                Vec lam_new(lam_r.size());
                if (normal_only) {
                    for (Index a = 0; a < lam_r.size(); ++a) {
                        lam_new[a] = std::max(lam_r[a] - eps[a] * resid[a], 0.0);
                        delta = std::max(delta, std::abs(lam_new[a] - lam_r[a]));
                    }
                } else {
                    for (std::size_t p = 0; p < r_pts.size(); ++p) {
                        Vec3 trial(lam_r[3 * p] - eps[3 * p] * resid[3 * p],
                                   lam_r[3 * p + 1] - eps[3 * p + 1] * resid[3 * p + 1],
                                   lam_r[3 * p + 2] - eps[3 * p + 2] * resid[3 * p + 2]);
                        const Vec3 proj = project_admissible(trial, mu);
                        for (int c = 0; c < 3; ++c) {
                            lam_new[3 * p + c] = proj[c];
                            delta = std::max(delta, std::abs(proj[c] - lam_r[3 * p + c]));
                        }
                    }
                }
                lam_r = lam_new;
                update_scale();
                stats.final_residual = delta / force_scale;
                if (delta <= cfg.rel_tol * force_scale) break;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_sweep = sweep;
                    best_r = lam_r;
                }
                const bool diverging = delta > 1e3 * best_delta;
                const bool stalled = sweep - best_sweep > 500;
                if (diverging || stalled) {
                    relaxation *= 0.5;
                    if (relaxation < 1e-8 * cfg.relaxation)
                        throw SolverError("contact: relaxation underflow", delta / force_scale,
                                          stats.sweeps);
                    lam_r = best_r;
                    rebuild_eps();
                    best_sweep = sweep;
                }
            }
            if (s_fact) lam_s = s_fact->solve(-(c_s + g_sr * lam_r));
        }

        // scatter the packed solution
        Vec lambda_full = Vec::Zero(3 * m);
        for (std::size_t a = 0; a < s_idx.size(); ++a) {
            const Index k = s_idx[a] / comps, c = s_idx[a] % comps;
            lambda_full[3 * closed[k] + c] = lam_s[a];
        }
        for (std::size_t a = 0; a < r_idx.size(); ++a) {
            const Index k = r_idx[a] / comps, c = r_idx[a] % comps;
            lambda_full[3 * closed[k] + c] = lam_r[a];
        }

        // classification
        update_scale();
        const double cls_tol = 1e-9;
        bool changed = false;
        std::vector<char> in_closed(m, 0);
        for (Index j : closed) in_closed[j] = 1;
        std::vector<Index> new_closed;
        new_closed.reserve(closed.size() + 8);
        for (Index j : closed) {
            const double ln = lambda_full[3 * j];
            if (presume_stick[j]) {
                if (ln <= 0.0) {
                    // eliminated point wants to release: iterate it instead
                    presume_stick[j] = 0;
                    demotions[j] += 10;
                    new_closed.push_back(j);
                    changed = true;
                    continue;
                }
            } else if (ln <= 0.0) {
                lambda_full.segment<3>(3 * j).setZero();
                changed = true;  // drop from the closed set
                continue;
            }
            new_closed.push_back(j);
            if (normal_only) continue;
            const double lt = std::hypot(lambda_full[3 * j + 1], lambda_full[3 * j + 2]);
            const double cone = mu * ln;
            if (presume_stick[j] && lt > cone * (1.0 + cls_tol)) {
                presume_stick[j] = 0;
                demotions[j]++;
                changed = true;
            } else if (!presume_stick[j] && lt < cone * (1.0 - 1e-6) && demotions[j] < 2) {
                presume_stick[j] = 1;
                changed = true;
            }
        }

        // growth: penetration of currently open candidates
        Vec dg_full;
        if (ctx) {
            dg_full = detail::full_increment(*ctx, new_closed, lambda_full, op_in.c_full);
            for (Index j = 0; j < m; ++j) {
                if (in_closed[j]) continue;
                const double g_new = warm.g[3 * j] + dg_full[3 * j];
                if (g_new < -1e-12 * gap_scale) {
                    new_closed.push_back(j);
                    presume_stick[j] = 0;
                    changed = true;
                }
            }
            std::sort(new_closed.begin(), new_closed.end());
        }

        const bool membership_changed = new_closed != closed;
        if (membership_changed) {
            const std::uint64_t key = detail::index_set_key(new_closed);
            if (std::find(seen_sets.begin(), seen_sets.end(), key) != seen_sets.end()) {
                // oscillating set: take the union and let the projection open points
                std::vector<Index> u = closed;
                u.insert(u.end(), new_closed.begin(), new_closed.end());
                std::sort(u.begin(), u.end());
                u.erase(std::unique(u.begin(), u.end()), u.end());
                new_closed = u;
                for (Index j : new_closed) presume_stick[j] = 0;
                seen_sets.clear();
            }
            seen_sets.push_back(key);
            closed = new_closed;
            need_assembly = true;
        }
        if (!changed && !membership_changed) {
            // converged and self-consistent
            out.lambda = lambda_full;
            if (ctx) {
                if (dg_full.size() == 0)
                    dg_full = detail::full_increment(*ctx, closed, lambda_full, op_in.c_full);
                out.gamma_dt = dg_full;
                out.g = warm.g + dg_full;
            } else {
                // standalone operator: increments on the active set only
                Vec lam_packed(comps * closed.size());
                for (std::size_t k = 0; k < closed.size(); ++k)
                    for (int c = 0; c < comps; ++c)
                        lam_packed[comps * k + c] = lambda_full[3 * closed[k] + c];
                const Vec dg = op_in.g_mat * lam_packed + op_in.c_vec;
                out.gamma_dt.setZero();
                for (std::size_t k = 0; k < closed.size(); ++k)
                    for (int c = 0; c < comps; ++c)
                        out.gamma_dt[3 * closed[k] + c] = dg[comps * k + c];
                out.g = warm.g + out.gamma_dt;
            }
            for (Index j = 0; j < m; ++j) {
                const double ln = lambda_full[3 * j];
                if (ln <= 0.0) {
                    out.status[j] = ContactStatus::open;
                } else if (normal_only) {
                    out.status[j] = ContactStatus::slip;
                } else {
                    const double lt = std::hypot(lambda_full[3 * j + 1], lambda_full[3 * j + 2]);
                    out.status[j] = (lt >= mu * ln * (1.0 - 1e-6)) ? ContactStatus::slip
                                                                   : ContactStatus::stick;
                }
            }
            break;
        }
        out.lambda = lambda_full;  // carry as warm start for the next outer pass
    }

    if (stats_out) stats_out->accumulate(stats);
    return out;
}

/// One quasi-static contact solve from a state and a candidate rhs.
inline ContactState contact_step(const ContactContext& ctx, const Vec& c_full,
                                 const ALConfig& cfg, const ContactState& warm,
                                 SolveStats* stats = nullptr) {
    Vec g_n_pred(ctx.count());
    for (Index j = 0; j < ctx.count(); ++j) g_n_pred[j] = warm.g[3 * j] + c_full[3 * j];
    const std::vector<Index> active = estimate_active_set(g_n_pred, warm.lambda, {});
    const DelassusOperator op = assemble_delassus(ctx, active, c_full);
    return solve_quasistatic(op, cfg, warm, stats);
}

/// ||friction stress|| / (mu * pressure) per closed point; NaN for open ones.
inline Vec slip_ratio(const ContactState& state, double mu) {
    const Index m = state.point_count();
    Vec r = Vec::Constant(m, std::numeric_limits<double>::quiet_NaN());
    for (Index j = 0; j < m; ++j) {
        if (state.status[j] == ContactStatus::open) continue;
        const double ln = state.lambda[3 * j];
        if (mu <= 0.0 || ln <= 0.0) {
            r[j] = 0.0;
            continue;
        }
        r[j] = std::hypot(state.lambda[3 * j + 1], state.lambda[3 * j + 2]) / (mu * ln);
    }
    return r;
}

/// Complementarity residuals of a converged state: max |lambda_n * dg_n| and
/// max ||dg_t|| over sticking points.
inline std::pair<double, double> complementarity_residual(const ContactState& state) {
    double cn = 0.0, ct = 0.0;
    for (Index j = 0; j < state.point_count(); ++j) {
        cn = std::max(cn, std::abs(state.lambda[3 * j] * state.gamma_dt[3 * j]));
        if (state.status[j] == ContactStatus::stick)
            ct = std::max(ct, std::hypot(state.gamma_dt[3 * j + 1], state.gamma_dt[3 * j + 2]));
    }
    return {cn, ct};
}

}  // namespace msdyn
