#pragma once

#include <cmath>
#include <memory>

#include "mflab/core/grid.hpp"
#include "mflab/manybody/fock_basis.hpp"
#include "mflab/manybody/hamiltonian.hpp"

namespace mflab {

/// Coefficients of an N-boson state in a Fock occupation basis.
struct ManyBodyState {
    std::shared_ptr<const FockBasis> basis;
    ComplexVector coefficients;

    double norm() const { return coefficients.norm(); }
};

/// Fock-space image of the product state φ^{⊗N}:
/// c(n) = sqrt(N! / Π n_x!) Π_x (h^{d/2} φ(x))^{n_x}.
inline ManyBodyState product_state_lift(const WaveFunction& phi, int particles, std::shared_ptr<const FockBasis> basis) {
    require_normalized(phi, "product_state_lift");
    if (!basis || basis->particles() != particles || basis->sites() != phi.grid().num_sites())
        throw DimensionError("product_state_lift: basis does not match (N, grid)");
    const double root_cell = std::sqrt(phi.grid().cell_volume());
    const double log_n_factorial = std::lgamma(particles + 1.0);
    ComplexVector c(static_cast<Eigen::Index>(basis->size()));
    for (std::size_t j = 0; j < basis->size(); ++j) {
        const auto n = basis->state(j);
        double log_multinomial = log_n_factorial;
        Complex amplitude = 1.0;
        for (std::size_t x = 0; x < n.size(); ++x) {
            if (n[x] == 0) continue;
            log_multinomial -= std::lgamma(n[x] + 1.0);
            amplitude *= std::pow(root_cell * phi[x], static_cast<int>(n[x]));
        }
        c[static_cast<Eigen::Index>(j)] = std::exp(0.5 * log_multinomial) * amplitude;
    }
    return ManyBodyState{std::move(basis), std::move(c)};
}

inline ManyBodyState product_state_lift(const WaveFunction& phi, int particles, const FockBasis& basis) {
    return product_state_lift(phi, particles, std::make_shared<const FockBasis>(basis));
}

/// ⟨Ψ, H Ψ⟩
inline double energy(const ManyBodyState& psi, const SparseHamiltonian& h) {
    const ComplexVector hpsi = h.matrix * psi.coefficients;
    return psi.coefficients.dot(hpsi).real();
}

}  // namespace mflab
