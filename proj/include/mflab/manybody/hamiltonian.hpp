#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "mflab/core/lattice_ops.hpp"
#include "mflab/manybody/fock_basis.hpp"
#include "mflab/random_field.hpp"

namespace mflab {

/// Real symmetric N-body Hamiltonian on a Fock sector, stored with both
/// triangles so that (i, j, w) present implies (j, i, w).
struct SparseHamiltonian {
    std::shared_ptr<const FockBasis> basis;
    LatticeGrid grid;
    Eigen::SparseMatrix<double> matrix;
    /// Diagonal interaction energies, kept separately for diagnostics.
    RealVector interaction_diagonal;

    std::size_t dimension() const { return basis->size(); }

    std::vector<Eigen::Triplet<double>> entries() const {
        std::vector<Eigen::Triplet<double>> out;
        out.reserve(static_cast<std::size_t>(matrix.nonZeros()));
        for (Eigen::Index col = 0; col < matrix.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, col); it; ++it)
                out.emplace_back(it.row(), it.col(), it.value());
        return out;
    }
};

/// H = Σ_{x,y} T_{xy} a†_x a_y + (1/2N) Σ_{x,y} v(x−y) a†_x a†_y a_y a_x.
///
/// The interaction is diagonal: (1/2N)[Σ_{x≠y} v(x−y) n_x n_y + Σ_x v(0) n_x(n_x − 1)].
/// The same-site term is the exact lattice image of the pair sum over i < j
/// and must stay.
inline SparseHamiltonian assemble_hamiltonian(const LatticeGrid& grid, const RandomField& v, int particles,
                                              std::shared_ptr<const FockBasis> basis) {
    require_same_grid(grid, v.grid, "assemble_hamiltonian");
    if (!basis || basis->particles() != particles || basis->sites() != grid.num_sites())
        throw DimensionError("assemble_hamiltonian: basis does not match (N, grid)");

    const Eigen::SparseMatrix<double> t = kinetic_matrix(grid);
    const std::size_t sites = grid.num_sites();
    const std::size_t dim = basis->size();
    const double coupling = 1.0 / (2.0 * particles);

    // v(x − y) for every ordered pair.
    std::vector<double> pair_potential(sites * sites);
    for (std::size_t x = 0; x < sites; ++x)
        for (std::size_t y = 0; y < sites; ++y) pair_potential[x * sites + y] = v[grid.difference(x, y)];

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(dim * (1 + 2 * grid.dimension() * std::min<std::size_t>(sites, particles)));
    RealVector interaction(static_cast<Eigen::Index>(dim));
    std::vector<std::uint16_t> target(sites);
    std::vector<std::size_t> occupied;
    occupied.reserve(sites);

    for (std::size_t j = 0; j < dim; ++j) {
        const auto n = basis->state(j);
        occupied.clear();
        for (std::size_t x = 0; x < sites; ++x)
            if (n[x] > 0) occupied.push_back(x);

        double diag = 0.0;
        for (std::size_t x : occupied) diag += t.coeff(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) * n[x];

        double pair_sum = 0.0;
        for (std::size_t x : occupied) {
            pair_sum += pair_potential[x * sites + x] * n[x] * (n[x] - 1.0);
            for (std::size_t y : occupied)
                if (y != x) pair_sum += pair_potential[x * sites + y] * n[x] * n[y];
        }
        const double w = coupling * pair_sum;
        interaction[static_cast<Eigen::Index>(j)] = w;
        entries.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j), diag + w);

        // Hops a†_x a_y for y occupied, x ≠ y a neighbour of y.
        std::copy(n.begin(), n.end(), target.begin());
        for (std::size_t y : occupied) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(t, static_cast<Eigen::Index>(y)); it; ++it) {
                const auto x = static_cast<std::size_t>(it.row());
                if (x == y) continue;
                const double amp = it.value() * std::sqrt(static_cast<double>(n[y]) * (n[x] + 1.0));
                --target[y];
                ++target[x];
                const std::size_t i = basis->rank(target);
                ++target[y];
                --target[x];
                entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), amp);
            }
        }
    }

    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::SparseMatrix<double> h(d, d);
    h.setFromTriplets(entries.begin(), entries.end());
    h.makeCompressed();
    return SparseHamiltonian{std::move(basis), grid, std::move(h), std::move(interaction)};
}

inline SparseHamiltonian assemble_hamiltonian(const LatticeGrid& grid, const RandomField& v, int particles,
                                              const FockBasis& basis) {
    return assemble_hamiltonian(grid, v, particles, std::make_shared<const FockBasis>(basis));
}

}  // namespace mflab
