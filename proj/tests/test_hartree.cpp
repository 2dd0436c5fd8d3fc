#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace mflab;

namespace {

LatticeGrid grid8() { return build_grid(1, 8, 8.0); }

RandomField generic_field(const LatticeGrid& g, std::uint64_t seed = 3) {
    FieldSpec spec;
    spec.base = BaseProfile::gaussian_bump(1.0, 1.5);
    spec.mode_stddevs = {0.5, 0.3, 0.1};
    return sample_field(spec, seed, g);
}

WaveFunction random_state(const LatticeGrid& g, std::mt19937_64& rng) {
    return WaveFunction(g, oracle::random_complex(g.num_sites(), rng)).normalized();
}

}  // namespace

TEST(HartreeRunParams, StepCountAndAdjustedStep) {
    HartreeRunParams p(0.5, 1.0 / 512, grid8());
    EXPECT_EQ(p.steps(), 256);
    EXPECT_DOUBLE_EQ(p.dt() * p.steps(), 0.5);
    HartreeRunParams q(1.0, 0.3, grid8());
    EXPECT_EQ(q.steps(), 3);
    EXPECT_DOUBLE_EQ(q.dt() * q.steps(), 1.0);
    EXPECT_EQ(HartreeRunParams(0.0, 0.1, grid8()).steps(), 0);
    EXPECT_THROW(HartreeRunParams(0.1, 0.2, grid8()), ConfigError);
    EXPECT_THROW(HartreeRunParams(0.1, 0.0, grid8()), ConfigError);
}

TEST(HartreeStep, FreePlaneWavePicksUpDispersionPhase) {
    auto g = build_grid(1, 8, 4.0);
    const auto v = constant_field(g, 0.0);
    const double dt = 0.01;
    for (int mode : {0, 1, 3}) {
        auto psi = plane_wave(g, mode);
        const double h = g.spacing();
        const double lambda = (2.0 - 2.0 * std::cos(2.0 * kPi * mode * h / g.box_length())) / (h * h);
        auto out = hartree_step(psi, v, dt);
        const ComplexVector expected = std::polar(1.0, -dt * lambda) * psi.amplitudes();
        EXPECT_LT((out.amplitudes() - expected).norm(), 1e-13) << "mode " << mode;
    }
}

TEST(HartreeStep, PotentialOnlyIsPointwisePhase) {
    auto g = grid8();
    std::mt19937_64 rng(1);
    auto psi = random_state(g, rng);
    auto v = generic_field(g);
    const double dt = 0.05;
    auto out = hartree_step(psi, v, dt, {.kinetic = false, .interaction = true});
    const RealVector u = oracle::direct_convolution(g, v.values, psi.density());
    for (std::size_t x = 0; x < g.num_sites(); ++x)
        EXPECT_LT(std::abs(out[x] - psi[x] * std::polar(1.0, -dt * u[x])), 1e-13);
}

TEST(HartreeStep, PreservesNorm) {
    std::mt19937_64 rng(2);
    for (int d = 1; d <= 2; ++d) {
        auto g = build_grid(d, 7, 5.0);
        for (int trial = 0; trial < 10; ++trial) {
            auto psi = random_state(g, rng);
            auto out = hartree_step(psi, generic_field(g, trial), 0.1);
            EXPECT_NEAR(out.norm(), psi.norm(), 1e-12);
        }
    }
}

TEST(HartreeStep, RejectsUnnormalizedOrMismatchedInput) {
    auto g = grid8();
    auto psi = uniform_state(g);
    WaveFunction doubled(g, 2.0 * psi.amplitudes());
    EXPECT_THROW(hartree_step(doubled, generic_field(g), 0.1), PreconditionError);
    EXPECT_THROW(hartree_step(psi, generic_field(build_grid(1, 10, 8.0)), 0.1), DimensionError);
}

TEST(EvolveHartree, ZeroTimeIsIdentity) {
    auto g = grid8();
    auto phi = gaussian_packet(g, {4.0, 0, 0}, 1.0);
    auto out = evolve_hartree(phi, generic_field(g), HartreeRunParams(0.0, 0.1, g));
    EXPECT_EQ(out.amplitudes(), phi.amplitudes());
}

TEST(EvolveHartree, ConstantInteractionIsGlobalPhase) {
    auto g = grid8();
    auto phi = gaussian_packet(g, {4.0, 0, 0}, 1.0, 0.4);
    HartreeRunParams params(0.5, 1.0 / 512, g);
    auto with_c = evolve_hartree(phi, constant_field(g, 0.7), params);
    auto free = evolve_hartree(phi, constant_field(g, 0.0), params);
    EXPECT_NEAR(std::abs(inner_product(free, with_c)), 1.0, 1e-12);
}

TEST(EvolveHartree, NormConservedOverThousandSteps) {
    auto g = grid8();
    auto phi = gaussian_packet(g, {4.0, 0, 0}, 1.0, 0.5);
    HartreeRunParams params(2.0, 2.0 / 1000, g);
    ASSERT_EQ(params.steps(), 1000);
    auto out = evolve_hartree(phi, generic_field(g), params);
    EXPECT_LT(std::abs(out.norm() - 1.0), 1e-10);
}

TEST(EvolveHartree, SecondOrderSelfConvergence) {
    auto g = grid8();
    auto phi = gaussian_packet(g, {4.0, 0, 0}, 1.0, 0.5);
    const auto v = generic_field(g, 11);
    const double t = 0.5;
    const double dt = t / 16;
    auto run = [&](double step) { return evolve_hartree(phi, v, HartreeRunParams(t, step, g)).amplitudes(); };
    const ComplexVector reference = run(dt / 16);
    const double coarse = (run(dt) - reference).norm();
    const double fine = (run(dt / 2) - reference).norm();
    const double ratio = coarse / fine;
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(EvolveHartree, TimeReversalByConjugation) {
    auto g = grid8();
    auto phi = gaussian_packet(g, {3.0, 0, 0}, 1.2, 0.8);
    const auto v = generic_field(g, 5);
    HartreeRunParams params(0.5, 1.0 / 512, g);
    auto forward = evolve_hartree(phi, v, params);
    auto back = evolve_hartree(forward.conjugate(), v, params).conjugate();
    EXPECT_LT((back.amplitudes() - phi.amplitudes()).norm() * std::sqrt(g.cell_volume()), 1e-8);
}

TEST(EvolveHartree, EnergyDriftIsSmall) {
    auto g = grid8();
    auto phi = gaussian_packet(g, {4.0, 0, 0}, 1.0);
    const auto v = generic_field(g, 9);
    auto out = evolve_hartree(phi, v, HartreeRunParams(0.5, 0.5 / 512, g));
    const double e0 = hartree_energy(phi, v);
    const double e1 = hartree_energy(out, v);
    EXPECT_LT(std::abs(e1 - e0), 1e-6 * std::abs(e0));
}

TEST(HartreeExpectation, ProjectorOnOwnAndOrthogonalState) {
    auto g = grid8();
    auto phi = plane_wave(g, 1);
    auto a = condensate_projector(phi);
    EXPECT_NEAR(hartree_expectation(phi, a), 1.0, 1e-14);
    EXPECT_NEAR(hartree_expectation(plane_wave(g, 2), a), 0.0, 1e-14);
}

TEST(HartreeExpectation, ProductKernelFactorizes) {
    auto g = build_grid(1, 4, 2.0);
    std::mt19937_64 rng(3);
    PObservable b(g, 1, oracle::random_hermitian(4, rng));
    auto bb = tensor_product(b, b);
    auto psi = random_state(g, rng);
    // Direct summation of ⟨ψ, b ψ⟩.
    Complex single = 0.0;
    const double h = g.cell_volume();
    for (std::size_t x = 0; x < 4; ++x)
        for (std::size_t y = 0; y < 4; ++y) single += std::conj(psi[x]) * b.kernel()(x, y) * psi[y];
    single *= h * h;
    EXPECT_NEAR(single.imag(), 0.0, 1e-12);
    EXPECT_NEAR(hartree_expectation(psi, bb), single.real() * single.real(), 1e-12);
}

TEST(HartreeExpectation, NonSelfAdjointKernelIsRejected) {
    auto g = build_grid(1, 4, 4.0);
    ComplexMatrix k = ComplexMatrix::Zero(4, 4);
    k(0, 1) = Complex(0.0, 1.0);
    PObservable a(g, 1, k);
    ComplexVector amp = ComplexVector::Zero(4);
    amp[0] = amp[1] = 1.0 / std::sqrt(2.0);
    EXPECT_THROW(hartree_expectation(WaveFunction(g, amp), a), ConsistencyError);
}

TEST(HartreeExpectation, BoundedByOperatorNorm) {
    auto g = build_grid(1, 4, 3.0);
    std::mt19937_64 rng(4);
    for (int p = 1; p <= 2; ++p) {
        PObservable a(g, p, oracle::random_hermitian(oracle::ipow(4, p), rng));
        const double norm = operator_norm(a);
        for (int trial = 0; trial < 20; ++trial)
            EXPECT_LE(std::abs(hartree_expectation(random_state(g, rng), a)), norm + 1e-12);
    }
}
