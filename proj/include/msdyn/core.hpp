#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace msdyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vec3 = Eigen::Vector3d;
using Index = Eigen::Index;

constexpr double kPi = 3.14159265358979323846;

/// Thrown on invalid user input (geometry, config, file contents).
class InvalidArgument : public std::runtime_error {
public:
    explicit InvalidArgument(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when an iterative solver fails to converge.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double residual, long iterations)
        : std::runtime_error(msg), residual(residual), iterations(iterations) {}
    double residual = 0.0;
    long iterations = 0;
};

/// Thrown on I/O failures (unreadable/unwritable paths, malformed files).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Truncated Fourier series helpers.
//
// A real series of order H over one period is stored as 2H+1 coefficients per
// channel: [mean, c1, s1, ..., cH, sH] with x(t) = mean + sum_h c_h cos(h w t)
// + s_h sin(h w t).
// ---------------------------------------------------------------------------

inline Index fourier_block_size(int h_order) { return 2 * h_order + 1; }

/// Sample values of a coefficient block at n equally spaced phase points.
inline Vec fourier_synthesize(const Eigen::Ref<const Vec>& coeffs, int h_order, int n_samples) {
    Vec out = Vec::Constant(n_samples, coeffs[0]);
    for (int k = 0; k < n_samples; ++k) {
        const double theta = 2.0 * kPi * k / n_samples;
        for (int h = 1; h <= h_order; ++h)
            out[k] += coeffs[2 * h - 1] * std::cos(h * theta) + coeffs[2 * h] * std::sin(h * theta);
    }
    return out;
}

/// Discrete Fourier analysis of one period of samples, truncated to h_order.
inline Vec fourier_analyze(const Eigen::Ref<const Vec>& samples, int h_order) {
    const int n = static_cast<int>(samples.size());
    Vec coeffs = Vec::Zero(2 * h_order + 1);
    coeffs[0] = samples.mean();
    for (int h = 1; h <= h_order; ++h) {
        double c = 0.0, s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double theta = 2.0 * kPi * h * k / n;
            c += samples[k] * std::cos(theta);
            s += samples[k] * std::sin(theta);
        }
        coeffs[2 * h - 1] = 2.0 * c / n;
        coeffs[2 * h] = 2.0 * s / n;
    }
    return coeffs;
}

/// FNV-1a 64-bit hash, used for output-inventory checksums.
inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace msdyn
