#pragma once

#include <cmath>
#include <string>

#include "mflab/core/grid.hpp"
#include "mflab/core/lattice_ops.hpp"
#include "mflab/core/observable.hpp"
#include "mflab/random_field.hpp"

namespace mflab {

/// Time grid for a Hartree run. The step count is round(t_final / dt) and
/// the step actually taken is t_final / steps, so steps * dt == t_final.
class HartreeRunParams {
public:
    HartreeRunParams(double t_final, double dt, LatticeGrid grid) : t_final_(t_final), grid_(std::move(grid)) {
        if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be a nonnegative number");
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (t_final > 0.0 && dt > t_final) throw ConfigError("dt must not exceed t_final");
        steps_ = t_final > 0.0 ? std::max<long>(1, std::lround(t_final / dt)) : 0;
        dt_ = steps_ > 0 ? t_final / static_cast<double>(steps_) : dt;
    }

    double t_final() const { return t_final_; }
    double dt() const { return dt_; }
    long steps() const { return steps_; }
    const LatticeGrid& grid() const { return grid_; }

private:
    double t_final_;
    double dt_;
    long steps_;
    LatticeGrid grid_;
};

/// Substep switches; both on for the physical equation.
struct HartreeSplitting {
    bool kinetic = true;
    bool interaction = true;
};

/// Strang-split integrator for i∂ψ = -Δψ + (v ⋆ |ψ|²)ψ:
/// half interaction phase, exact lattice kinetic step in Fourier space,
/// half interaction phase with the updated density.
class HartreePropagator {
public:
    HartreePropagator(const RandomField& field, double dt, HartreeSplitting splitting = {})
        : grid_(field.grid), field_(field.values), dt_(dt), splitting_(splitting) {
        const RealVector lambda = kinetic_dispersion(grid_);
        kinetic_phase_.resize(lambda.size());
        for (Eigen::Index k = 0; k < lambda.size(); ++k) kinetic_phase_[k] = std::polar(1.0, -dt * lambda[k]);
    }

    const LatticeGrid& grid() const { return grid_; }

    /// Mean-field potential v ⋆ |ψ|².
    RealVector potential(const ComplexVector& psi) const { return convolve(grid_, field_, psi.cwiseAbs2()); }

    void step(ComplexVector& psi) const {
        if (splitting_.interaction) apply_interaction_phase(psi, 0.5 * dt_);
        if (splitting_.kinetic) {
            ComplexVector spectrum = forward_fft(grid_, psi);
            spectrum.array() *= kinetic_phase_.array();
            psi = inverse_fft(grid_, spectrum);
        }
        if (splitting_.interaction) apply_interaction_phase(psi, 0.5 * dt_);
    }

private:
    void apply_interaction_phase(ComplexVector& psi, double tau) const {
        const RealVector u = potential(psi);
        for (Eigen::Index x = 0; x < psi.size(); ++x) psi[x] *= std::polar(1.0, -tau * u[x]);
    }

    LatticeGrid grid_;
    RealVector field_;
    double dt_;
    HartreeSplitting splitting_;
    ComplexVector kinetic_phase_;
};

inline WaveFunction hartree_step(const WaveFunction& psi, const RandomField& v, double dt,
                                 HartreeSplitting splitting = {}) {
    require_same_grid(psi.grid(), v.grid, "hartree_step");
    require_normalized(psi, "hartree_step");
    if (!(dt > 0.0)) throw ConfigError("hartree_step: dt must be positive");
    HartreePropagator prop(v, dt, splitting);
    ComplexVector amp = psi.amplitudes();
    prop.step(amp);
    return WaveFunction(psi.grid(), std::move(amp));
}

inline WaveFunction evolve_hartree(const WaveFunction& phi, const RandomField& v, const HartreeRunParams& params,
                                   HartreeSplitting splitting = {}) {
    require_same_grid(phi.grid(), v.grid, "evolve_hartree");
    require_same_grid(phi.grid(), params.grid(), "evolve_hartree");
    require_normalized(phi, "evolve_hartree");
    if (params.steps() == 0) return phi;
    HartreePropagator prop(v, params.dt(), splitting);
    ComplexVector amp = phi.amplitudes();
    for (long s = 0; s < params.steps(); ++s) prop.step(amp);
    return WaveFunction(phi.grid(), std::move(amp));
}

/// E[ψ] = h^d Σ conj(ψ)(-Δψ) + ½ h^d Σ (v ⋆ |ψ|²)|ψ|².
inline double hartree_energy(const WaveFunction& psi, const RandomField& v) {
    require_same_grid(psi.grid(), v.grid, "hartree_energy");
    const auto& grid = psi.grid();
    const ComplexVector lap = laplacian_apply(grid, psi.amplitudes());
    const double kinetic = -grid.cell_volume() * psi.amplitudes().dot(lap).real();
    const RealVector rho = psi.density();
    const double interaction = 0.5 * grid.cell_volume() * convolve(grid, v.values, rho).dot(rho);
    return kinetic + interaction;
}

inline constexpr double kImaginaryResidueTolerance = 1e-10;

/// ψ^{⊗p} as a vector over p-tuples of sites.
inline ComplexVector tensor_power(const WaveFunction& psi, int p) {
    TupleIndex tuples(psi.grid().num_sites(), p);
    ComplexVector out(static_cast<Eigen::Index>(tuples.size()));
    for (std::size_t x = 0; x < tuples.size(); ++x) {
        Complex value = 1.0;
        for (std::size_t s : tuples.unpack(x)) value *= psi[s];
        out[static_cast<Eigen::Index>(x)] = value;
    }
    return out;
}

/// ⟨ψ^{⊗p}, a ψ^{⊗p}⟩ = h^{2dp} Σ_{X,Y} conj(ψ^{⊗p}(X)) α(X;Y) ψ^{⊗p}(Y).
inline double hartree_expectation(const WaveFunction& psi, const PObservable& a) {
    require_same_grid(psi.grid(), a.grid(), "hartree_expectation");
    const ComplexVector product = tensor_power(psi, a.p());
    const Complex value = std::pow(psi.grid().cell_volume(), 2 * a.p()) * product.dot(a.kernel() * product);
    if (std::abs(value.imag()) >= kImaginaryResidueTolerance)
        throw ConsistencyError("hartree_expectation: imaginary residue " + std::to_string(value.imag()) +
                               " indicates a non-self-adjoint observable");
    return value.real();
}

}  // namespace mflab
