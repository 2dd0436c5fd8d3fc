#pragma once

#include <array>
#include <cmath>

#include "mflab/core/grid.hpp"

namespace mflab {

/// Normalized periodic Gaussian packet exp(-r²/(4 w²) + i k·x), with r the
/// minimal-image distance to `center` and k applied along every axis.
inline WaveFunction gaussian_packet(const LatticeGrid& grid, const std::array<double, 3>& center, double width,
                                    double momentum = 0.0) {
    if (!(width > 0.0)) throw ConfigError("gaussian packet width must be positive");
    ComplexVector amp(static_cast<Eigen::Index>(grid.num_sites()));
    for (std::size_t x = 0; x < grid.num_sites(); ++x) {
        double phase = 0.0;
        for (int a = 0; a < grid.dimension(); ++a) phase += momentum * grid.position(x, a);
        const double envelope = std::exp(-grid.periodic_distance_squared(x, center) / (4.0 * width * width));
        amp[static_cast<Eigen::Index>(x)] = std::polar(envelope, phase);
    }
    return WaveFunction(grid, amp).normalized();
}

inline WaveFunction uniform_state(const LatticeGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.num_sites());
    return WaveFunction(grid, ComplexVector::Constant(n, Complex(1.0, 0.0))).normalized();
}

/// exp(2πi m x_0 / L), normalized; m may be negative.
inline WaveFunction plane_wave(const LatticeGrid& grid, int mode) {
    ComplexVector amp(static_cast<Eigen::Index>(grid.num_sites()));
    const double k = 2.0 * kPi * mode / grid.box_length();
    for (std::size_t x = 0; x < grid.num_sites(); ++x)
        amp[static_cast<Eigen::Index>(x)] = std::polar(1.0, k * grid.position(x, 0));
    return WaveFunction(grid, amp).normalized();
}

}  // namespace mflab
