#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "mflab/core/observable.hpp"
#include "mflab/manybody/state.hpp"

namespace mflab {

/// p-particle reduced density matrix as a kernel g(X; Y) in the same
/// h-weighted convention as PObservable: h^{dp} Σ_X g(X; X) = 1.
struct ReducedDensityMatrix {
    LatticeGrid grid;
    int p = 1;
    ComplexMatrix kernel;

    /// γ in the orthonormal site basis (h^{dp} g).
    ComplexMatrix matrix() const { return std::pow(grid.cell_volume(), p) * kernel; }
    Complex trace() const { return std::pow(grid.cell_volume(), p) * kernel.trace(); }
};

/// g(X; Y) = h^{-dp} (N−p)!/N! ⟨Ψ, a†_{y_1}…a†_{y_p} a_{x_p}…a_{x_1} Ψ⟩.
///
/// Built as G = Φ^T conj(Φ) where column X of Φ holds a_{x_p}…a_{x_1}Ψ in
/// the (N−p)-particle basis.
inline ReducedDensityMatrix reduced_density_matrix(const ManyBodyState& psi, const LatticeGrid& grid, int p) {
    const FockBasis& basis = *psi.basis;
    const int particles = basis.particles();
    if (p < 1) throw DomainError("reduced_density_matrix: p must be positive");
    if (p > particles)
        throw DomainError("reduced_density_matrix: p = " + std::to_string(p) + " exceeds N = " + std::to_string(particles));
    if (basis.sites() != grid.num_sites()) throw DimensionError("reduced_density_matrix: basis does not match grid");

    const std::size_t sites = grid.num_sites();
    const FockBasis reduced(particles - p, sites, std::numeric_limits<std::size_t>::max());
    const TupleIndex tuples(sites, p);

    std::vector<Eigen::Triplet<Complex>> entries;
    std::vector<std::uint16_t> occ(sites);
    std::vector<std::size_t> tuple(static_cast<std::size_t>(p));

    // Depth-first over annihilation sequences a_{x_1}, then a_{x_2}, ...
    std::function<void(int, Complex)> descend = [&](int level, Complex amp) {
        if (level == p) {
            entries.emplace_back(static_cast<Eigen::Index>(reduced.rank(occ)),
                                 static_cast<Eigen::Index>(tuples.pack(tuple)), amp);
            return;
        }
        for (std::size_t x = 0; x < sites; ++x) {
            if (occ[x] == 0) continue;
            const double factor = std::sqrt(static_cast<double>(occ[x]));
            --occ[x];
            tuple[static_cast<std::size_t>(level)] = x;
            descend(level + 1, amp * factor);
            ++occ[x];
        }
    };

    for (std::size_t j = 0; j < basis.size(); ++j) {
        const Complex c = psi.coefficients[static_cast<Eigen::Index>(j)];
        if (c == Complex(0.0, 0.0)) continue;
        const auto n = basis.state(j);
        std::copy(n.begin(), n.end(), occ.begin());
        descend(0, c);
    }

    Eigen::SparseMatrix<Complex> phi(static_cast<Eigen::Index>(reduced.size()), static_cast<Eigen::Index>(tuples.size()));
    phi.setFromTriplets(entries.begin(), entries.end());

    // G(X; Y) = Σ_r conj(Φ(r, Y)) Φ(r, X)
    const Eigen::SparseMatrix<Complex> gram = Eigen::SparseMatrix<Complex>(phi.transpose()) * phi.conjugate();
    double falling = 1.0;
    for (int k = 0; k < p; ++k) falling *= static_cast<double>(particles - k);
    const double scale = 1.0 / (falling * std::pow(grid.cell_volume(), p));
    return ReducedDensityMatrix{grid, p, ComplexMatrix(gram) * scale};
}

/// X_N = lift(N, p) Tr(a γ^{(p)}), with |X_N| checked against `norm_bound`.
inline double manybody_expectation(const ManyBodyState& psi, const PObservable& a, double norm_bound) {
    const int particles = psi.basis->particles();
    if (a.p() > particles)
        throw DomainError("manybody_expectation: observable acts on " + std::to_string(a.p()) + " particles but N = " +
                          std::to_string(particles));
    const ReducedDensityMatrix rdm = reduced_density_matrix(psi, a.grid(), a.p());
    const Complex trace = (a.matrix().cwiseProduct(rdm.matrix().transpose())).sum();
    const Complex value = lift_factor(particles, a.p()) * trace;
    if (std::abs(value.imag()) >= 1e-10)
        throw ConsistencyError("manybody_expectation: imaginary residue " + std::to_string(value.imag()) +
                               " indicates a non-self-adjoint observable");
    if (std::abs(value.real()) > norm_bound + 1e-12)
        throw ConsistencyError("manybody_expectation: |X_N| = " + std::to_string(std::abs(value.real())) +
                               " exceeds the operator norm " + std::to_string(norm_bound));
    return value.real();
}

inline double manybody_expectation(const ManyBodyState& psi, const PObservable& a) {
    return manybody_expectation(psi, a, operator_norm(a));
}

}  // namespace mflab
