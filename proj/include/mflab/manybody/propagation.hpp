#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mflab/manybody/hamiltonian.hpp"
#include "mflab/manybody/state.hpp"

namespace mflab {

struct KrylovOptions {
    int krylov_dimension = 30;
    /// Bound on the a posteriori Lanczos error estimate per substep.
    double tolerance = 1e-12;
    /// Below this basis dimension the propagator is applied by dense diagonalization.
    std::size_t dense_threshold = 500;
    /// Substeps shorter than this fraction of t count as a stall.
    double min_substep_fraction = 1e-10;
};

namespace detail {

inline ComplexVector dense_propagate(const SparseHamiltonian& h, const ComplexVector& psi, double t) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(h.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) throw NumericalError("evolve_manybody: dense eigensolver failed");
    const Eigen::MatrixXd& vecs = solver.eigenvectors();
    ComplexVector coeffs = vecs.transpose() * psi;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::polar(1.0, -t * solver.eigenvalues()[k]);
    return vecs * coeffs;
}

/// e^{-iHt}ψ by restarted Lanczos with substep control. Each restart builds
/// a fully reorthogonalized Krylov basis from the current vector, then picks
/// the longest substep (t_remaining, halved as needed) whose error estimate
/// β‖ψ‖ |[e^{-iτT}]_{m,1}| is within tolerance.
inline ComplexVector krylov_propagate(const SparseHamiltonian& h, const ComplexVector& psi0, double t,
                                      const KrylovOptions& options) {
    const Eigen::Index n = psi0.size();
    const int max_m = static_cast<int>(std::min<Eigen::Index>(options.krylov_dimension, n));
    ComplexVector psi = psi0;
    double remaining = t;
    int substeps = 0;

    while (remaining > 0.0) {
        const double scale = psi.norm();
        if (scale == 0.0) return psi;

        ComplexMatrix basis(n, max_m);
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.col(0) = psi / scale;
        double next_beta = 0.0;
        bool invariant = false;
        double spectral_scale = 0.0;
        int m = 0;
        for (int j = 0; j < max_m; ++j) {
            ComplexVector w = h.matrix * basis.col(j);
            const double a = basis.col(j).dot(w).real();
            alpha.push_back(a);
            // Full reorthogonalization, twice for stability.
            for (int pass = 0; pass < 2; ++pass)
                for (int k = 0; k <= j; ++k) w -= basis.col(k) * basis.col(k).dot(w);
            const double b = w.norm();
            spectral_scale = std::max(spectral_scale, std::abs(a) + b);
            m = j + 1;
            if (b <= 1e-14 * std::max(1.0, spectral_scale)) {
                invariant = true;
                break;
            }
            if (j + 1 < max_m) {
                beta.push_back(b);
                basis.col(j + 1) = w / b;
            } else {
                next_beta = b;
            }
        }
        if (m == n) invariant = true;

        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (tri.info() != Eigen::Success) throw NumericalError("evolve_manybody: tridiagonal eigensolver failed");
        const Eigen::MatrixXd& q = tri.eigenvectors();
        const Eigen::VectorXd first_row = q.row(0).transpose();

        auto small_exp = [&](double tau) {
            ComplexVector coeffs(m);
            for (int k = 0; k < m; ++k) coeffs[k] = first_row[k] * std::polar(1.0, -tau * tri.eigenvalues()[k]);
            return ComplexVector(q * coeffs);
        };

        double tau = remaining;
        ComplexVector y = small_exp(tau);
        if (!invariant) {
            while (next_beta * scale * std::abs(y[m - 1]) > options.tolerance) {
                tau *= 0.5;
                if (tau < options.min_substep_fraction * t) {
                    std::ostringstream msg;
                    msg << "evolve_manybody: Krylov substep stalled (dimension " << n << ", krylov "
                        << m << ", tau " << tau << ", remaining " << remaining << ", beta " << next_beta
                        << ", substeps " << substeps << ")";
                    throw NumericalError(msg.str());
                }
                y = small_exp(tau);
            }
        }
        psi = scale * (basis.leftCols(m) * y);
        remaining = (tau == remaining) ? 0.0 : remaining - tau;
        ++substeps;
    }
    return psi;
}

}  // namespace detail

/// Ψ_t = e^{-iHt} Ψ_0.
inline ManyBodyState evolve_manybody(const ManyBodyState& psi0, const SparseHamiltonian& h, double t,
                                     const KrylovOptions& options = {}) {
    if (!psi0.basis || psi0.basis->size() != h.dimension())
        throw DimensionError("evolve_manybody: state and Hamiltonian live on different bases");
    if (!(t >= 0.0)) throw DomainError("evolve_manybody: t must be nonnegative");
    if (std::abs(psi0.norm() - 1.0) > kNormTolerance)
        throw PreconditionError("evolve_manybody: initial state must be normalized");
    if (t == 0.0) return psi0;
    ComplexVector out = h.dimension() < options.dense_threshold
                            ? detail::dense_propagate(h, psi0.coefficients, t)
                            : detail::krylov_propagate(h, psi0.coefficients, t, options);
    return ManyBodyState{psi0.basis, std::move(out)};
}

}  // namespace mflab
