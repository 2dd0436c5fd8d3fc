#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mflab/core/observable.hpp"
#include "mflab/hartree.hpp"
#include "mflab/manybody/density_matrix.hpp"
#include "mflab/manybody/propagation.hpp"
#include "mflab/random_field.hpp"

namespace mflab {

/// Everything needed to compare E(X_N) with E(X) over an N sweep.
struct ExperimentPlan {
    LatticeGrid grid;
    FieldSpec field_spec;
    WaveFunction initial_state;
    PObservable observable;
    double t_final = 0.5;
    double dt = 0.5 / 512;
    std::vector<int> particle_counts;
    int samples = 64;
    std::uint64_t base_seed = 0;
    std::size_t dimension_cap = kDefaultDimensionCap;
    KrylovOptions krylov;

    void validate() const {
        require_same_grid(grid, initial_state.grid(), "ExperimentPlan initial state");
        require_same_grid(grid, observable.grid(), "ExperimentPlan observable");
        field_spec.validate(grid);
        require_normalized(initial_state, "ExperimentPlan initial state");
        HartreeRunParams(t_final, dt, grid);
        if (samples < 1) throw ConfigError("samples must be positive");
        if (particle_counts.empty()) throw ConfigError("particle_counts must not be empty");
        for (std::size_t i = 0; i < particle_counts.size(); ++i) {
            if (particle_counts[i] < 1) throw ConfigError("particle_counts entries must be positive");
            if (i > 0 && particle_counts[i] <= particle_counts[i - 1])
                throw ConfigError("particle_counts must be strictly ascending");
        }
        if (particle_counts.front() < observable.p())
            throw ConfigError("particle_counts must all be at least observable.p = " + std::to_string(observable.p()));
        const int largest = particle_counts.back();
        if (fock_dimension(largest, grid.num_sites()) > static_cast<double>(dimension_cap))
            throw ResourceError("particle_counts maximum N = " + std::to_string(largest) + " on M = " +
                                std::to_string(grid.sites_per_axis()) + " exceeds the dimension cap " +
                                std::to_string(dimension_cap));
    }
};

struct SampleResult {
    std::size_t sample_index = 0;
    std::uint64_t seed = 0;
    double x_hartree = 0.0;
    std::map<int, double> x_manybody;
    std::map<int, double> y;
};

struct SummaryRow {
    int n = 0;
    double mean_x_manybody = 0.0;
    double mean_x_hartree = 0.0;
    double mean_y = 0.0;
    double ci95_y = 0.0;
    std::size_t samples = 0;
};

/// A module error raised while processing one sample.
class SampleError : public Error {
public:
    SampleError(std::size_t sample_index, int particles, const std::string& what)
        : Error("sample " + std::to_string(sample_index) +
                (particles > 0 ? ", N = " + std::to_string(particles) : std::string(", hartree")) + ": " + what),
          sample_index_(sample_index),
          particles_(particles) {}

    std::size_t sample_index() const { return sample_index_; }
    /// 0 when the failure happened in the Hartree run.
    int particles() const { return particles_; }

private:
    std::size_t sample_index_;
    int particles_;
};

/// ω-independent pieces of a plan, computed once and shared read-only by
/// every sample: Fock bases, lifted initial states, the observable norm.
class PreparedExperiment {
public:
    explicit PreparedExperiment(ExperimentPlan plan) : plan_(std::move(plan)) {
        plan_.validate();
        norm_bound_ = operator_norm(plan_.observable);
        for (int n : plan_.particle_counts) {
            auto basis = std::make_shared<const FockBasis>(build_fock_basis(n, plan_.grid, plan_.dimension_cap));
            initial_states_.emplace(n, product_state_lift(plan_.initial_state, n, basis));
        }
    }

    const ExperimentPlan& plan() const { return plan_; }
    double observable_norm() const { return norm_bound_; }

    /// One ω: a single field realization shared by the Hartree run and every N.
    SampleResult run_sample(std::size_t sample_index) const {
        if (sample_index >= static_cast<std::size_t>(plan_.samples))
            throw DomainError("run_sample: sample_index " + std::to_string(sample_index) + " outside 0.." +
                              std::to_string(plan_.samples - 1));
        SampleResult result;
        result.sample_index = sample_index;
        result.seed = derive_sample_seed(plan_.base_seed, sample_index);

        RandomField field;
        try {
            field = sample_field(plan_.field_spec, result.seed, plan_.grid);
            const HartreeRunParams params(plan_.t_final, plan_.dt, plan_.grid);
            const WaveFunction psi_t = evolve_hartree(plan_.initial_state, field, params);
            result.x_hartree = hartree_expectation(psi_t, plan_.observable);
            if (std::abs(result.x_hartree) > norm_bound_ + 1e-12)
                throw ConsistencyError("|X| = " + std::to_string(std::abs(result.x_hartree)) +
                                       " exceeds the operator norm " + std::to_string(norm_bound_));
        } catch (const Error& e) {
            throw SampleError(sample_index, 0, e.what());
        }

        for (int n : plan_.particle_counts) {
            try {
                const ManyBodyState& psi0 = initial_states_.at(n);
                const SparseHamiltonian h = assemble_hamiltonian(plan_.grid, field, n, psi0.basis);
                const ManyBodyState psi_t = evolve_manybody(psi0, h, plan_.t_final, plan_.krylov);
                const double x_n = manybody_expectation(psi_t, plan_.observable, norm_bound_);
                result.x_manybody[n] = x_n;
                result.y[n] = std::abs(result.x_hartree - x_n);
            } catch (const Error& e) {
                throw SampleError(sample_index, n, e.what());
            }
        }
        return result;
    }

    /// All samples on up to `threads` workers (0 = hardware concurrency).
    /// Results are ordered by sample_index whatever the completion order.
    std::vector<SampleResult> run_all(unsigned threads = 0) const {
        const auto total = static_cast<std::size_t>(plan_.samples);
        if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

        std::vector<std::optional<SampleResult>> slots(total);
        std::vector<std::exception_ptr> failures(total);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
                try {
                    slots[i] = run_sample(i);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
        }
        for (auto& failure : failures)
            if (failure) std::rethrow_exception(failure);
        std::vector<SampleResult> results;
        results.reserve(total);
        for (auto& slot : slots) results.push_back(std::move(*slot));
        return results;
    }

private:
    ExperimentPlan plan_;
    double norm_bound_ = 0.0;
    std::map<int, ManyBodyState> initial_states_;
};

inline SampleResult run_sample(const ExperimentPlan& plan, std::size_t sample_index) {
    return PreparedExperiment(plan).run_sample(sample_index);
}

inline std::vector<SampleResult> run_ensemble(const ExperimentPlan& plan, unsigned threads = 0) {
    return PreparedExperiment(plan).run_all(threads);
}

/// Per-N sample means and 95% half-widths 1.96 sd / √S (sd with n − 1).
inline std::vector<SummaryRow> estimate(std::vector<SampleResult> results) {
    if (results.empty()) throw DomainError("estimate: no sample results");
    std::sort(results.begin(), results.end(),
              [](const SampleResult& a, const SampleResult& b) { return a.sample_index < b.sample_index; });
    const auto& reference = results.front().x_manybody;
    for (const auto& r : results) {
        if (r.x_manybody.size() != reference.size() || r.y.size() != reference.size())
            throw DomainError("estimate: results do not share the same particle counts");
        for (const auto& [n, unused] : reference)
            if (!r.x_manybody.count(n) || !r.y.count(n))
                throw DomainError("estimate: results do not share the same particle counts");
    }

    const double count = static_cast<double>(results.size());
    double mean_x = 0.0;
    for (const auto& r : results) mean_x += r.x_hartree;
    mean_x /= count;

    std::vector<SummaryRow> rows;
    for (const auto& [n, unused] : reference) {
        SummaryRow row;
        row.n = n;
        row.samples = results.size();
        row.mean_x_hartree = mean_x;
        for (const auto& r : results) {
            row.mean_x_manybody += r.x_manybody.at(n);
            row.mean_y += r.y.at(n);
        }
        row.mean_x_manybody /= count;
        row.mean_y /= count;
        double ss = 0.0;
        for (const auto& r : results) {
            const double dev = r.y.at(n) - row.mean_y;
            ss += dev * dev;
        }
        const double sd = results.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
        row.ci95_y = 1.96 * sd / std::sqrt(count);
        if (std::abs(row.mean_x_hartree - row.mean_x_manybody) > row.mean_y + 1e-12)
            throw ConsistencyError("estimate: triangle inequality violated at N = " + std::to_string(n));
        rows.push_back(row);
    }
    return rows;
}

struct TailDiagnostic {
    double beta = 0.0;
    /// Sample mean of |X_N| 1{|X_N| >= β} per N.
    std::map<int, double> manybody;
    /// Same for the Hartree value X.
    double hartree = 0.0;
};

inline TailDiagnostic tail_diagnostic(const std::vector<SampleResult>& results, double beta) {
    if (!(beta > 0.0)) throw DomainError("tail_diagnostic: beta must be positive");
    TailDiagnostic out;
    out.beta = beta;
    if (results.empty()) return out;
    std::vector<const SampleResult*> ordered;
    for (const auto& r : results) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const SampleResult* a, const SampleResult* b) { return a->sample_index < b->sample_index; });
    auto truncated = [beta](double x) { return std::abs(x) >= beta ? std::abs(x) : 0.0; };
    const double count = static_cast<double>(ordered.size());
    for (const auto* r : ordered) {
        out.hartree += truncated(r->x_hartree);
        for (const auto& [n, x] : r->x_manybody) out.manybody[n] += truncated(x);
    }
    out.hartree /= count;
    for (auto& [n, total] : out.manybody) total /= count;
    return out;
}

/// Least-squares slope of log(mean_y) against log(N); NaN when undefined.
inline double loglog_slope(const std::vector<SummaryRow>& rows) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.mean_y > 0.0) pts.emplace_back(std::log(static_cast<double>(r.n)), std::log(r.mean_y));
    if (pts.size() < 2) return std::nan("");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::nan("");
}

}  // namespace mflab
