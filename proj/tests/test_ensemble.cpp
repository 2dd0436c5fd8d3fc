#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mflab;

namespace {

ExperimentPlan small_plan(int samples = 6) {
    auto g = build_grid(1, 6, 6.0);
    FieldSpec spec;
    spec.base = BaseProfile::gaussian_bump(1.0, 1.5);
    spec.mode_stddevs = {0.5, 0.3};
    auto phi = gaussian_packet(g, {3, 0, 0}, 1.0);
    return ExperimentPlan{.grid = g,
                          .field_spec = spec,
                          .initial_state = phi,
                          .observable = condensate_projector(phi),
                          .t_final = 0.5,
                          .dt = 0.5 / 256,
                          .particle_counts = {1, 2, 3},
                          .samples = samples,
                          .base_seed = 11,
                          .dimension_cap = kDefaultDimensionCap,
                          .krylov = {}};
}

SampleResult make_result(std::size_t index, double x, std::map<int, double> xn) {
    SampleResult r;
    r.sample_index = index;
    r.x_hartree = x;
    r.x_manybody = xn;
    for (auto [n, v] : xn) r.y[n] = std::abs(x - v);
    return r;
}

}  // namespace

TEST(ExperimentPlan, ValidationErrors) {
    auto plan = small_plan();
    EXPECT_NO_THROW(plan.validate());

    auto descending = small_plan();
    descending.particle_counts = {2, 1};
    try {
        descending.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_STREQ(e.what(), "particle_counts must be strictly ascending");
    }

    auto no_samples = small_plan();
    no_samples.samples = 0;
    EXPECT_THROW(no_samples.validate(), ConfigError);

    auto too_big = small_plan();
    too_big.particle_counts = {1, 40};
    too_big.dimension_cap = 1000;
    EXPECT_THROW(too_big.validate(), ResourceError);

    auto p2 = small_plan();
    p2.observable = tensor_product(p2.observable, p2.observable);
    EXPECT_THROW(p2.validate(), ConfigError);
}

TEST(RunSample, NoRandomnessMakesSamplesIdentical) {
    auto plan = small_plan(3);
    plan.field_spec.mode_stddevs = {0.0, 0.0};
    const PreparedExperiment prepared(plan);
    const auto a = prepared.run_sample(0);
    const auto b = prepared.run_sample(2);
    EXPECT_NE(a.seed, b.seed);
    EXPECT_EQ(a.x_hartree, b.x_hartree);
    EXPECT_EQ(a.x_manybody, b.x_manybody);
    EXPECT_EQ(a.y, b.y);
}

TEST(RunSample, ConstantFieldGivesVanishingDeviation) {
    auto plan = small_plan(2);
    plan.field_spec.base = BaseProfile::zero();
    plan.field_spec.gaussian_mean = 0.7;
    plan.field_spec.mode_stddevs.clear();
    const auto r = run_sample(plan, 1);
    for (auto [n, y] : r.y) EXPECT_LT(y, 1e-8) << "N = " << n;
}

TEST(RunSample, SingleParticleFreeEvolution) {
    auto plan = small_plan(1);
    plan.field_spec.mode_stddevs.clear();
    plan.particle_counts = {1};
    plan.observable = site_multiplier(plan.grid, RealVector::LinSpaced(6, 0.0, 1.0));
    const auto r = run_sample(plan, 0);
    // One particle feels no interaction, so X_1 is the free expectation.
    const ComplexMatrix k = oracle::dense_kinetic(plan.grid).cast<Complex>();
    const ComplexMatrix u = (Complex(0.0, -plan.t_final) * k).exp();
    const WaveFunction free(plan.grid, u * plan.initial_state.amplitudes());
    EXPECT_NEAR(r.x_manybody.at(1), hartree_expectation(free, plan.observable), 1e-10);
}

TEST(RunSample, IndexOutOfRange) {
    auto plan = small_plan(2);
    EXPECT_THROW(run_sample(plan, 2), DomainError);
}

TEST(RunSample, PathwiseBounds) {
    auto plan = small_plan(8);
    const PreparedExperiment prepared(plan);
    const double norm = prepared.observable_norm();
    for (const auto& r : prepared.run_all(2)) {
        EXPECT_LE(std::abs(r.x_hartree), norm + 1e-12);
        for (auto [n, x] : r.x_manybody) {
            EXPECT_LE(std::abs(x), norm + 1e-12);
            EXPECT_LE(r.y.at(n), 2 * norm + 1e-12);
        }
    }
}

TEST(RunSample, FailureNamesSampleAndParticleCount) {
    auto plan = small_plan(4);
    plan.krylov = KrylovOptions{.krylov_dimension = 2, .tolerance = 1e-300, .dense_threshold = 0, .min_substep_fraction = 1e-3};
    plan.particle_counts = {2, 3};
    try {
        run_ensemble(plan, 3);
        FAIL() << "expected SampleError";
    } catch (const SampleError& e) {
        EXPECT_EQ(e.sample_index(), 0u);
        EXPECT_EQ(e.particles(), 2);
        EXPECT_NE(std::string(e.what()).find("sample 0"), std::string::npos) << e.what();
    }
}

TEST(RunEnsemble, IndependentOfThreadCount) {
    auto plan = small_plan(7);
    const auto serial = run_ensemble(plan, 1);
    for (unsigned threads : {2u, 3u, 8u}) {
        const auto parallel = run_ensemble(plan, threads);
        ASSERT_EQ(parallel.size(), serial.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            EXPECT_EQ(parallel[i].sample_index, i);
            EXPECT_EQ(parallel[i].seed, serial[i].seed);
            EXPECT_EQ(parallel[i].x_hartree, serial[i].x_hartree);
            EXPECT_EQ(parallel[i].x_manybody, serial[i].x_manybody);
        }
    }
}

TEST(RunEnsemble, SharesOneFieldAcrossParticleCounts) {
    auto plan = small_plan(2);
    const auto r = run_sample(plan, 1);
    auto v = sample_field(plan.field_spec, r.seed, plan.grid);
    auto basis = std::make_shared<const FockBasis>(build_fock_basis(3, plan.grid));
    auto psi = evolve_manybody(product_state_lift(plan.initial_state, 3, basis),
                               assemble_hamiltonian(plan.grid, v, 3, basis), plan.t_final);
    EXPECT_NEAR(r.x_manybody.at(3), manybody_expectation(psi, plan.observable), 1e-12);
    auto hartree = evolve_hartree(plan.initial_state, v, HartreeRunParams(plan.t_final, plan.dt, plan.grid));
    EXPECT_NEAR(r.x_hartree, hartree_expectation(hartree, plan.observable), 1e-14);
}

TEST(Estimate, MeanAndConfidenceInterval) {
    const auto rows = estimate({make_result(0, 0.0, {{2, 0.1}}), make_result(1, 0.0, {{2, 0.3}})});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n, 2);
    EXPECT_EQ(rows[0].samples, 2u);
    EXPECT_NEAR(rows[0].mean_y, 0.2, 1e-15);
    EXPECT_NEAR(rows[0].mean_x_manybody, 0.2, 1e-15);
    EXPECT_NEAR(rows[0].mean_x_hartree, 0.0, 1e-15);
    EXPECT_NEAR(rows[0].ci95_y, 0.196, 1e-12);
}

TEST(Estimate, SingleSampleHasZeroWidth) {
    const auto rows = estimate({make_result(0, 0.5, {{1, 0.25}, {2, 0.4}})});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].ci95_y, 0.0);
    EXPECT_NEAR(rows[1].mean_y, 0.1, 1e-15);
}

TEST(Estimate, RejectsEmptyAndInconsistentInput) {
    EXPECT_THROW(estimate({}), DomainError);
    EXPECT_THROW(estimate({make_result(0, 0.0, {{2, 0.1}}), make_result(1, 0.0, {{3, 0.1}})}), DomainError);
    auto broken = make_result(0, 0.0, {{2, 0.5}});
    broken.y[2] = 0.1;
    EXPECT_THROW(estimate({broken}), ConsistencyError);
}

TEST(Estimate, TriangleInequalityOnRealRuns) {
    const auto results = run_ensemble(small_plan(10), 4);
    for (const auto& row : estimate(results)) {
        EXPECT_LE(std::abs(row.mean_x_hartree - row.mean_x_manybody), row.mean_y + 1e-12);
        EXPECT_GE(row.ci95_y, 0.0);
    }
}

TEST(TailDiagnostic, Examples) {
    const std::vector<SampleResult> results{make_result(0, 0.9, {{2, -0.5}}), make_result(1, 0.2, {{2, 0.7}})};
    const auto above = tail_diagnostic(results, 1.1);
    EXPECT_EQ(above.hartree, 0.0);
    EXPECT_EQ(above.manybody.at(2), 0.0);
    const auto tiny = tail_diagnostic(results, 1e-9);
    EXPECT_NEAR(tiny.hartree, 0.55, 1e-15);
    EXPECT_NEAR(tiny.manybody.at(2), 0.6, 1e-15);
    const auto mid = tail_diagnostic(results, 0.6);
    EXPECT_NEAR(mid.hartree, 0.45, 1e-15);
    EXPECT_NEAR(mid.manybody.at(2), 0.35, 1e-15);
    EXPECT_THROW(tail_diagnostic(results, 0.0), DomainError);
}

TEST(TailDiagnostic, MonotoneInBetaAndZeroAboveNorm) {
    auto plan = small_plan(6);
    const PreparedExperiment prepared(plan);
    const auto results = prepared.run_all(3);
    double previous = std::numeric_limits<double>::infinity();
    for (double beta : {1e-6, 0.1, 0.3, 0.5, 0.8, 1.0}) {
        const auto tail = tail_diagnostic(results, beta);
        EXPECT_LE(tail.manybody.at(3), previous);
        previous = tail.manybody.at(3);
    }
    const auto beyond = tail_diagnostic(results, 1.1 * prepared.observable_norm());
    EXPECT_EQ(beyond.hartree, 0.0);
    for (auto [n, value] : beyond.manybody) EXPECT_EQ(value, 0.0);
}

TEST(LogLogSlope, RecoversPowerLaw) {
    std::vector<SummaryRow> rows;
    for (int n : {2, 4, 8}) rows.push_back(SummaryRow{.n = n, .mean_y = 3.0 / n});
    EXPECT_NEAR(loglog_slope(rows), -1.0, 1e-12);
    EXPECT_TRUE(std::isnan(loglog_slope({rows[0]})));
}
