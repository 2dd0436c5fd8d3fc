#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Sparse>
#include <unsupported/Eigen/FFT>

#include "mflab/core/grid.hpp"

namespace mflab {

/// Periodic (2d+1)-point Laplacian:
/// (Δψ)(x) = Σ_a (ψ(x + h e_a) + ψ(x - h e_a) - 2ψ(x)) / h².
inline ComplexVector laplacian_apply(const LatticeGrid& grid, const ComplexVector& psi) {
    if (static_cast<std::size_t>(psi.size()) != grid.num_sites())
        throw DimensionError("discrete_laplacian_apply: vector size does not match the grid");
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    ComplexVector out = ComplexVector::Zero(psi.size());
    for (std::size_t x = 0; x < grid.num_sites(); ++x) {
        Complex acc = 0.0;
        for (int a = 0; a < grid.dimension(); ++a) {
            acc += psi[grid.shifted(x, a, +1)] + psi[grid.shifted(x, a, -1)] - 2.0 * psi[x];
        }
        out[x] = acc * inv_h2;
    }
    return out;
}

inline WaveFunction discrete_laplacian_apply(const LatticeGrid& grid, const WaveFunction& psi) {
    require_same_grid(grid, psi.grid(), "discrete_laplacian_apply");
    return WaveFunction(grid, laplacian_apply(grid, psi.amplitudes()));
}

/// One-particle kinetic matrix T = -Δ in the orthonormal site basis.
/// For M = 2 the forward and backward neighbours coincide and their
/// hoppings add up.
inline Eigen::SparseMatrix<double> kinetic_matrix(const LatticeGrid& grid) {
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(grid.num_sites() * (2 * grid.dimension() + 1));
    for (std::size_t x = 0; x < grid.num_sites(); ++x) {
        const auto row = static_cast<Eigen::Index>(x);
        entries.emplace_back(row, row, 2.0 * grid.dimension() * inv_h2);
        for (int a = 0; a < grid.dimension(); ++a) {
            entries.emplace_back(row, static_cast<Eigen::Index>(grid.shifted(x, a, +1)), -inv_h2);
            entries.emplace_back(row, static_cast<Eigen::Index>(grid.shifted(x, a, -1)), -inv_h2);
        }
    }
    const auto n = static_cast<Eigen::Index>(grid.num_sites());
    Eigen::SparseMatrix<double> t(n, n);
    t.setFromTriplets(entries.begin(), entries.end());
    return t;
}

/// Eigenvalues of -Δ on the plane waves, indexed like the FFT output:
/// λ_k = Σ_a (2 - 2cos(2π k_a / M)) / h².
inline RealVector kinetic_dispersion(const LatticeGrid& grid) {
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    const int m = grid.sites_per_axis();
    RealVector lambda(static_cast<Eigen::Index>(grid.num_sites()));
    for (std::size_t k = 0; k < grid.num_sites(); ++k) {
        auto c = grid.coords(k);
        double acc = 0.0;
        for (int a = 0; a < grid.dimension(); ++a) acc += 2.0 - 2.0 * std::cos(2.0 * kPi * c[a] / m);
        lambda[static_cast<Eigen::Index>(k)] = acc * inv_h2;
    }
    return lambda;
}

namespace detail {

/// Separable d-dimensional DFT, one axis at a time. The inverse carries the
/// 1/M^d normalization.
inline ComplexVector fft_nd(const LatticeGrid& grid, const ComplexVector& in, bool inverse) {
    Eigen::FFT<double> fft;
    const int m = grid.sites_per_axis();
    const std::size_t n = grid.num_sites();
    ComplexVector data = in;
    std::vector<Complex> line(static_cast<std::size_t>(m));
    std::vector<Complex> transformed(static_cast<std::size_t>(m));
    std::size_t stride = 1;
    for (int axis = 0; axis < grid.dimension(); ++axis) {
        const std::size_t block = stride * static_cast<std::size_t>(m);
        for (std::size_t outer = 0; outer < n; outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                const std::size_t base = outer + inner;
                for (int j = 0; j < m; ++j) line[j] = data[static_cast<Eigen::Index>(base + j * stride)];
                if (inverse)
                    fft.inv(transformed, line);
                else
                    fft.fwd(transformed, line);
                for (int j = 0; j < m; ++j) data[static_cast<Eigen::Index>(base + j * stride)] = transformed[j];
            }
        }
        stride = block;
    }
    return data;
}

}  // namespace detail

inline ComplexVector forward_fft(const LatticeGrid& grid, const ComplexVector& in) {
    return detail::fft_nd(grid, in, false);
}

inline ComplexVector inverse_fft(const LatticeGrid& grid, const ComplexVector& in) {
    return detail::fft_nd(grid, in, true);
}

/// Periodic convolution (v ⋆ ρ)(x) = h^d Σ_y v(x - y) ρ(y), evaluated in
/// Fourier space.
inline RealVector convolve(const LatticeGrid& grid, const RealVector& v, const RealVector& rho) {
    const auto n = static_cast<Eigen::Index>(grid.num_sites());
    if (v.size() != n || rho.size() != n)
        throw DimensionError("convolve: field sizes do not match the grid site count");
    ComplexVector vk = forward_fft(grid, v.cast<Complex>());
    ComplexVector rk = forward_fft(grid, rho.cast<Complex>());
    ComplexVector product = vk.cwiseProduct(rk);
    return grid.cell_volume() * inverse_fft(grid, product).real();
}

}  // namespace mflab
