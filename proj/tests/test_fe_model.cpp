#include <catch2/catch_amalgamated.hpp>

#include "msdyn/fe_model.hpp"
#include "msdyn/reduction.hpp"

#include <Eigen/Eigenvalues>

using namespace msdyn;

namespace {

MiniJointSpec small_spec() {
    MiniJointSpec s;
    s.length_x = 0.02;
    s.length_y = 0.02;
    s.height_bottom = 0.03;
    s.height_top = 0.03;
    s.nx = 2;
    s.ny = 2;
    s.nz_bottom = 2;
    s.nz_top = 2;
    s.preload = 500.0;
    return s;
}

}  // namespace

TEST_CASE("single-element cube has six rigid-body modes") {
    SpMat k, m;
    Material mat{1.0, 0.3, 1.0};
    hex_block_matrices(1.0, 1.0, 1.0, 1, 1, 1, mat, k, m);
    REQUIRE(k.rows() == 24);

    Eigen::SelfAdjointEigenSolver<Mat> eig{Mat(k)};
    const Vec ev = eig.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    int null_dim = 0;
    for (Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) < 1e-10 * scale) ++null_dim;
    CHECK(null_dim == 6);
}

TEST_CASE("free-free bar axial frequency approaches the rod solution") {
    // Oracle: refined-mesh run establishes the coarse-mesh error bound.
    const Material mat{200e9, 0.29, 7800.0};
    const double len = 1.0, side = 0.05;
    auto lowest_axial_hz = [&](int n_ax) {
        SpMat k, m;
        hex_block_matrices(len, side, side, n_ax, 1, 1, mat, k, m);
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig{Mat(k), Mat(m)};
        // first six eigenvalues are rigid-body modes
        return std::sqrt(std::max(eig.eigenvalues()[6], 0.0)) / (2.0 * kPi);
    };
    const double analytic = std::sqrt(mat.youngs_modulus / mat.density) / (2.0 * len);
    const double coarse = lowest_axial_hz(2);
    const double refined = lowest_axial_hz(8);
    const double refined_err = std::abs(refined - analytic) / analytic;
    const double coarse_err = std::abs(coarse - analytic) / analytic;
    // the coarse-mesh frequency must sit within the bound set by the refined run
    CHECK(coarse_err < 50.0 * std::max(refined_err, 1e-4));
    CHECK(coarse_err < 0.05);
}

TEST_CASE("degenerate mini joint specs are rejected") {
    MiniJointSpec s = small_spec();
    s.nx = 0;
    CHECK_THROWS_AS(assemble_mini_joint(s), InvalidArgument);
    s = small_spec();
    s.height_top = 0.0;
    CHECK_THROWS_AS(assemble_mini_joint(s), InvalidArgument);
    s = small_spec();
    s.material.poisson_ratio = 0.5;
    CHECK_THROWS_AS(assemble_mini_joint(s), InvalidArgument);
}

TEST_CASE("mini joint assembly: symmetry, boundary layout, grounding") {
    const MiniJointSpec s = small_spec();
    const FullStructuralModel model = assemble_mini_joint(s);

    const Index n_pairs = model.interface_grid.pair_count();
    REQUIRE(n_pairs == 9);
    REQUIRE(model.n_boundary == 3 * n_pairs);
    REQUIRE(model.boundary_dofs.size() == static_cast<std::size_t>(model.n_boundary));

    const Mat k(model.stiffness);
    const Mat m(model.mass);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * k.cwiseAbs().maxCoeff());
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * m.cwiseAbs().maxCoeff());

    // grounded model: stiffness positive definite
    Eigen::LLT<Mat> llt(k + 1e-12 * k.norm() * Mat::Identity(k.rows(), k.cols()));
    CHECK(llt.info() == Eigen::Success);

    // relative-DOF transform keeps the total mass of the free nodes
    SpMat kb, mb;
    hex_block_matrices(s.length_x, s.length_y, s.height_bottom, s.nx, s.ny, s.nz_bottom,
                       s.material, kb, mb);
    const double block_mass =
        s.material.density * s.length_x * s.length_y * (s.height_bottom + s.height_top);
    // z-translation pattern of the whole free structure: delta_z = 0, all
    // internal z = 1, top interface z carried by the bottom partner
    Vec t = Vec::Zero(model.size());
    for (int node = 0; node < model.node_coords.rows(); ++node) {
        const int raw = model.node_dof(node, 2);
        if (raw < 0) continue;
        // internal coordinate of this raw DOF, if any
        for (SpMat::InnerIterator it(model.raw_from_q, raw); it; ++it)
            if (it.col() >= model.n_boundary) t[it.col()] = 1.0;
    }
    const double m_eff = t.dot(m * t);
    const double grounded_layer_mass = block_mass;  // upper bound sanity only
    CHECK(m_eff > 0.5 * block_mass);
    CHECK(m_eff < grounded_layer_mass * 1.01);
}

TEST_CASE("top face load integrates to the requested total") {
    const MiniJointSpec s = small_spec();
    const FullStructuralModel model = assemble_mini_joint(s);
    const Vec f = top_face_load(model, s, -s.preload);

    // uniform z translation in model coordinates: deltas 0, internal z at 1
    Vec q_pattern = Vec::Zero(model.size());
    for (int node = 0; node < model.node_coords.rows(); ++node) {
        const int raw = model.node_dof(node, 2);
        if (raw < 0) continue;
        for (SpMat::InnerIterator it(model.raw_from_q, raw); it; ++it)
            if (it.col() >= model.n_boundary) q_pattern[it.col()] = 1.0;
    }
    CHECK_THAT(f.dot(q_pattern), Catch::Matchers::WithinRel(-s.preload, 1e-12));
}

TEST_CASE("sensor functional picks the nearest node component") {
    const MiniJointSpec s = small_spec();
    const FullStructuralModel model = assemble_mini_joint(s);
    const auto [row, node] = sensor_functional(model, Vec3(0.01, 0.01, 0.06), 0);
    CHECK(model.node_coords(node, 2) == Catch::Approx(0.06));
    CHECK(row.size() == model.size());
    CHECK(row.cwiseAbs().sum() > 0.0);
}
