#pragma once

#include "msdyn/core.hpp"

#include <random>

namespace msdyn {

/// Regular lattice of BE integration points (patch centers), uniform area.
struct BEGrid {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    double x0 = 0.0, y0 = 0.0;  // center of point (0,0)
    double delta_a = 0.0;       // dx*dy
    std::vector<char> active_mask;  // inside the apparent contact area

    int count() const { return nx * ny; }
    int index(int ix, int iy) const { return ix + nx * iy; }
    double x_of(int i) const { return x0 + dx * (i % nx); }
    double y_of(int i) const { return y0 + dy * (i / nx); }

    std::vector<int> active_points() const {
        std::vector<int> pts;
        for (int i = 0; i < count(); ++i)
            if (active_mask[i]) pts.push_back(i);
        return pts;
    }
};

enum class GridMask { none, ellipse };

inline BEGrid build_grid(double extent_x, double extent_y, int nx, int ny,
                         GridMask mask = GridMask::none,
                         double origin_x = 0.0, double origin_y = 0.0) {
    if (!(extent_x > 0.0 && extent_y > 0.0))
        throw InvalidArgument("BE grid: extent must be positive");
    if (nx < 1 || ny < 1) throw InvalidArgument("BE grid: point counts must be >= 1");
    BEGrid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = extent_x / nx;
    g.dy = extent_y / ny;
    g.x0 = origin_x + 0.5 * g.dx;
    g.y0 = origin_y + 0.5 * g.dy;
    g.delta_a = g.dx * g.dy;
    g.active_mask.assign(g.count(), 1);
    if (mask == GridMask::ellipse) {
        const double cx = origin_x + 0.5 * extent_x, cy = origin_y + 0.5 * extent_y;
        const double ax = 0.5 * extent_x, ay = 0.5 * extent_y;
        for (int i = 0; i < g.count(); ++i) {
            const double ex = (g.x_of(i) - cx) / ax, ey = (g.y_of(i) - cy) / ay;
            g.active_mask[i] = (ex * ex + ey * ey <= 1.0) ? 1 : 0;
        }
    }
    return g;
}

/// Height of the composite surface (initial gap field); min(h) = 0 by
/// construction, i.e. the reference configuration has the bodies barely
/// touching.
struct Topography {
    Vec h;

    void normalize() {
        if (h.size() == 0) return;
        h.array() -= h.minCoeff();
    }
};

inline Topography topography_from_values(const BEGrid& grid, Vec values) {
    if (values.size() != grid.count())
        throw InvalidArgument("topography: grid dimension mismatch");
    if (!values.allFinite()) throw InvalidArgument("topography: non-finite height values");
    Topography t;
    t.h = std::move(values);
    t.normalize();
    return t;
}

inline Topography topography_flat(const BEGrid& grid) {
    return topography_from_values(grid, Vec::Zero(grid.count()));
}

/// Small-slope spherical cap: h = r^2 / (2R) about the grid center.
inline Topography topography_sphere(const BEGrid& grid, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("topography: sphere radius must be positive");
    const double cx = grid.x0 + 0.5 * grid.dx * (grid.nx - 1);
    const double cy = grid.y0 + 0.5 * grid.dy * (grid.ny - 1);
    Vec h(grid.count());
    for (int i = 0; i < grid.count(); ++i) {
        const double rx = grid.x_of(i) - cx, ry = grid.y_of(i) - cy;
        h[i] = (rx * rx + ry * ry) / (2.0 * radius);
    }
    return topography_from_values(grid, std::move(h));
}

/// Gaussian-hill form: contact concentrates at the center, the gap grows
/// toward the edges; peak-to-peak scaled exactly to `peak_to_peak`.
inline Topography topography_hill(const BEGrid& grid, double peak_to_peak,
                                  double width_fraction = 0.35) {
    if (!(peak_to_peak >= 0.0)) throw InvalidArgument("topography: peak-to-peak must be >= 0");
    const double cx = grid.x0 + 0.5 * grid.dx * (grid.nx - 1);
    const double cy = grid.y0 + 0.5 * grid.dy * (grid.ny - 1);
    const double sigma = width_fraction * std::max(grid.nx * grid.dx, grid.ny * grid.dy);
    Vec h(grid.count());
    for (int i = 0; i < grid.count(); ++i) {
        const double rx = grid.x_of(i) - cx, ry = grid.y_of(i) - cy;
        h[i] = 1.0 - std::exp(-(rx * rx + ry * ry) / (2.0 * sigma * sigma));
    }
    const double span = h.maxCoeff() - h.minCoeff();
    if (span > 0.0 && peak_to_peak > 0.0) h *= peak_to_peak / span;
    else h.setZero();
    return topography_from_values(grid, std::move(h));
}

/// Superposed random sinusoids (seedable), scaled to `peak_to_peak`.
inline Topography topography_sinusoids(const BEGrid& grid, double peak_to_peak, int n_waves,
                                       double min_wavelength, std::uint64_t seed) {
    if (n_waves < 1) throw InvalidArgument("topography: n_waves must be >= 1");
    const double lx = grid.nx * grid.dx, ly = grid.ny * grid.dy;
    if (!(min_wavelength > 0.0 && min_wavelength <= std::max(lx, ly)))
        throw InvalidArgument("topography: min wavelength must be in (0, extent]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vec h = Vec::Zero(grid.count());
    for (int w = 0; w < n_waves; ++w) {
        const double lambda = min_wavelength +
                              uni(rng) * (std::max(lx, ly) - min_wavelength);
        const double theta = 2.0 * kPi * uni(rng);
        const double phase = 2.0 * kPi * uni(rng);
        const double amp = 0.5 + 0.5 * uni(rng);
        const double kx = 2.0 * kPi * std::cos(theta) / lambda;
        const double ky = 2.0 * kPi * std::sin(theta) / lambda;
        for (int i = 0; i < grid.count(); ++i)
            h[i] += amp * std::cos(kx * grid.x_of(i) + ky * grid.y_of(i) + phase);
    }
    const double span = h.maxCoeff() - h.minCoeff();
    if (span > 0.0 && peak_to_peak > 0.0) h *= peak_to_peak / span;
    else h.setZero();
    return topography_from_values(grid, std::move(h));
}

/// Points whose initial gap exceeds the maximum attainable closure are open
/// for the whole load case and excluded from the contact equation system.
inline std::vector<char> geometric_open_mask(const Topography& topo, double gap_bound) {
    if (gap_bound < 0.0) throw InvalidArgument("open mask: gap bound must be >= 0");
    std::vector<char> open(topo.h.size(), 0);
    for (Index i = 0; i < topo.h.size(); ++i) open[i] = topo.h[i] > gap_bound ? 1 : 0;
    return open;
}

// ---------------------------------------------------------------------------
// Closed-form influence coefficients: uniform traction over a rectangular
// patch of an elastic half space, evaluated patch-center to patch-center
// (Love-type normal, Cerruti-type tangential solutions).
// ---------------------------------------------------------------------------

struct HalfspaceMaterial {
    double youngs_modulus = 0.0;
    double poisson_ratio = 0.0;
    bool rigid = false;

    void validate() const {
        if (rigid) return;
        if (!(youngs_modulus > 0.0)) throw InvalidArgument("halfspace: E must be positive");
        if (poisson_ratio >= 0.5)
            throw InvalidArgument("halfspace: nu = 0.5 (incompressible) is unsupported");
        if (poisson_ratio <= -1.0) throw InvalidArgument("halfspace: nu must exceed -1");
    }
    double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
    double plane_modulus() const {
        return youngs_modulus / (1.0 - poisson_ratio * poisson_ratio);
    }
};

namespace detail {

// Double antiderivatives of the point-load surface kernels; pure-x and pure-y
// terms are omitted (they cancel in the corner difference).
inline double anti_inv_r(double x, double y) {  // 1/r
    const double r = std::hypot(x, y);
    double out = 0.0;
    if (x != 0.0 && y + r > 0.0) out += x * std::log(y + r);
    if (y != 0.0 && x + r > 0.0) out += y * std::log(x + r);
    return out;
}
inline double anti_x2_r3(double x, double y) {  // x^2/r^3
    const double r = std::hypot(x, y);
    return (y != 0.0 && x + r > 0.0) ? y * std::log(x + r) : 0.0;
}
inline double anti_y2_r3(double x, double y) {  // y^2/r^3
    const double r = std::hypot(x, y);
    return (x != 0.0 && y + r > 0.0) ? x * std::log(y + r) : 0.0;
}
inline double anti_xy_r3(double x, double y) {  // x*y/r^3
    return -std::hypot(x, y);
}
inline double anti_x_r2(double x, double y) {  // x/r^2
    const double r = std::hypot(x, y);
    double out = 0.0;
    if (r > 0.0 && y != 0.0) out += y * std::log(r);
    if (x != 0.0) out += x * std::atan(y / x);
    return out;
}

template <typename F>
inline double patch_integral(F f, double x, double y, double a, double b) {
    return f(x + a, y + b) - f(x - a, y + b) - f(x + a, y - b) + f(x - a, y - b);
}

}  // namespace detail

/// Dense influence blocks over a list of grid points ("candidates"). Maps
/// point forces to relative surface displacements of the contacting pair;
/// component order per point is (normal, tangential x, tangential y).
struct ComplianceMatrix {
    std::vector<int> points;  // grid indices covered by the blocks
    double delta_a = 0.0;
    Mat czz;                  // normal-normal
    Mat cxx, cyy, cxy;        // tangential-tangential
    Mat cxz, cyz;             // normal-tangential coupling (empty when decoupled)
    bool has_tangential = false;

    Index count() const { return static_cast<Index>(points.size()); }
    bool coupled() const { return cxz.size() > 0; }

    /// Assembles the dense sub-matrix over a selection (indices into
    /// `points`); 3 components per point, or 1 (normal) if `normal_only`.
    Mat sub_matrix(const std::vector<int>& sel, bool normal_only) const {
        const Index m = static_cast<Index>(sel.size());
        if (normal_only) {
            Mat out(m, m);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < m; ++j) out(i, j) = czz(sel[i], sel[j]);
            return out;
        }
        if (!has_tangential)
            throw InvalidArgument("compliance: tangential blocks were not built");
        Mat out(3 * m, 3 * m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) {
                const int a = sel[i], b = sel[j];
                out(3 * i + 0, 3 * j + 0) = czz(a, b);
                out(3 * i + 1, 3 * j + 1) = cxx(a, b);
                out(3 * i + 2, 3 * j + 2) = cyy(a, b);
                out(3 * i + 1, 3 * j + 2) = cxy(a, b);
                out(3 * i + 2, 3 * j + 1) = cxy(a, b);
                if (coupled()) {
                    out(3 * i + 1, 3 * j + 0) = cxz(a, b);
                    out(3 * i + 0, 3 * j + 1) = cxz(b, a);
                    out(3 * i + 2, 3 * j + 0) = cyz(a, b);
                    out(3 * i + 0, 3 * j + 2) = cyz(b, a);
                } else {
                    out(3 * i + 1, 3 * j + 0) = 0.0;
                    out(3 * i + 0, 3 * j + 1) = 0.0;
                    out(3 * i + 2, 3 * j + 0) = 0.0;
                    out(3 * i + 0, 3 * j + 2) = 0.0;
                }
            }
        return out;
    }
};

struct ComplianceOptions {
    bool tangential = true;
    bool force_decouple = false;
};

inline ComplianceMatrix influence_coefficients(const BEGrid& grid,
                                               const std::vector<int>& candidates,
                                               const HalfspaceMaterial& mat1,
                                               const HalfspaceMaterial& mat2,
                                               const ComplianceOptions& opts = {}) {
    mat1.validate();
    mat2.validate();
    if (mat1.rigid && mat2.rigid)
        throw InvalidArgument("compliance: both bodies rigid");
    ComplianceMatrix c;
    c.points = candidates;
    c.delta_a = grid.delta_a;
    c.has_tangential = opts.tangential;
    const Index n = c.count();
    const double a = 0.5 * grid.dx, b = 0.5 * grid.dy;

    double k_norm = 0.0, k_tan1 = 0.0, k_tan2 = 0.0, k_cpl = 0.0;
    for (const HalfspaceMaterial* m : {&mat1, &mat2}) {
        if (m->rigid) continue;
        const double g = m->shear_modulus(), nu = m->poisson_ratio;
        k_norm += 1.0 / (kPi * m->plane_modulus());
        k_tan1 += 2.0 * (1.0 - nu) / (4.0 * kPi * g);
        k_tan2 += 2.0 * nu / (4.0 * kPi * g);
        const double theta = (1.0 - 2.0 * nu) / (4.0 * kPi * g);
        k_cpl += (m == &mat1) ? -theta : theta;
    }
    const bool coupled = !opts.force_decouple && std::abs(k_cpl) > 0.0 && opts.tangential;

    c.czz.resize(n, n);
    if (opts.tangential) {
        c.cxx.resize(n, n);
        c.cyy.resize(n, n);
        c.cxy.resize(n, n);
        if (coupled) {
            c.cxz.resize(n, n);
            c.cyz.resize(n, n);
        }
    }

#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const double xi = grid.x_of(c.points[i]), yi = grid.y_of(c.points[i]);
        for (Index j = 0; j < n; ++j) {
            const double u = xi - grid.x_of(c.points[j]);
            const double v = yi - grid.y_of(c.points[j]);
            const double i1 = detail::patch_integral(detail::anti_inv_r, u, v, a, b);
            c.czz(i, j) = k_norm * i1 / grid.delta_a;
            if (opts.tangential) {
                const double ixx = detail::patch_integral(detail::anti_x2_r3, u, v, a, b);
                const double iyy = detail::patch_integral(detail::anti_y2_r3, u, v, a, b);
                const double ixy = detail::patch_integral(detail::anti_xy_r3, u, v, a, b);
                c.cxx(i, j) = (k_tan1 * i1 + k_tan2 * ixx) / grid.delta_a;
                c.cyy(i, j) = (k_tan1 * i1 + k_tan2 * iyy) / grid.delta_a;
                c.cxy(i, j) = k_tan2 * ixy / grid.delta_a;
                if (coupled) {
                    const double ixz = detail::patch_integral(detail::anti_x_r2, u, v, a, b);
                    const double iyz = detail::patch_integral(
                        [](double xx, double yy) { return detail::anti_x_r2(yy, xx); }, u, v, a, b);
                    c.cxz(i, j) = k_cpl * ixz / grid.delta_a;
                    c.cyz(i, j) = k_cpl * iyz / grid.delta_a;
                }
            }
        }
    }
    return c;
}

inline ComplianceMatrix influence_coefficients(const BEGrid& grid,
                                               const HalfspaceMaterial& mat1,
                                               const HalfspaceMaterial& mat2,
                                               const ComplianceOptions& opts = {}) {
    return influence_coefficients(grid, grid.active_points(), mat1, mat2, opts);
}

}  // namespace msdyn
