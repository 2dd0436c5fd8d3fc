#pragma once

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "mflab/cli/config.hpp"
#include "mflab/cli/results_io.hpp"
#include "mflab/ensemble.hpp"

namespace mflab::cli {

struct ExperimentOutcome {
    std::vector<SampleResult> results;
    std::vector<SummaryRow> summary;
    TailDiagnostic tail;
    double observable_norm = 0.0;
    double slope = 0.0;
};

inline std::string render_report(const ExperimentConfig& cfg, const ExperimentOutcome& outcome) {
    const auto& plan = cfg.plan;
    const HartreeRunParams params(plan.t_final, plan.dt, plan.grid);
    std::ostringstream os;
    os << "mean-field convergence report\n\n";
    os << "grid: d = " << plan.grid.dimension() << ", M = " << plan.grid.sites_per_axis()
       << ", L = " << format_shortest(plan.grid.box_length()) << ", h = " << format_shortest(plan.grid.spacing())
       << '\n';
    os << "time: t = " << format_shortest(plan.t_final) << ", hartree steps = " << params.steps()
       << ", dt = " << format_shortest(params.dt()) << '\n';
    os << "field: " << plan.field_spec.base.to_string() << " + gaussian(mean "
       << format_shortest(plan.field_spec.gaussian_mean) << ", sigmas [" << detail::join(plan.field_spec.mode_stddevs)
       << "]), even = " << (plan.field_spec.enforce_even ? "true" : "false") << '\n';
    os << "samples: " << plan.samples << ", base seed " << plan.base_seed << '\n';
    os << "observable: p = " << plan.observable.p() << ", operator norm = " << io::format_double(outcome.observable_norm)
       << "\n\n";

    os << "convergence table\n";
    os << std::left << std::setw(6) << "N" << std::setw(26) << "mean_x_manybody" << std::setw(26) << "mean_x_hartree"
       << std::setw(26) << "mean_y" << "ci95_y\n";
    for (const auto& row : outcome.summary) {
        os << std::left << std::setw(6) << row.n << std::setw(26) << io::format_double(row.mean_x_manybody)
           << std::setw(26) << io::format_double(row.mean_x_hartree) << std::setw(26) << io::format_double(row.mean_y)
           << io::format_double(row.ci95_y) << '\n';
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < outcome.summary.size(); ++i)
        decreasing = decreasing && outcome.summary[i].mean_y < outcome.summary[i - 1].mean_y;
    os << "\nmean_y strictly decreasing in N: " << (decreasing ? "yes" : "no") << '\n';
    os << "log-log slope of mean_y vs N (informational): "
       << (std::isnan(outcome.slope) ? std::string("n/a") : io::format_double(outcome.slope)) << "\n\n";

    os << "tail diagnostic E(|X| 1{|X| >= beta}), beta = " << format_shortest(outcome.tail.beta) << '\n';
    for (const auto& [n, value] : outcome.tail.manybody) os << "  N = " << n << ": " << io::format_double(value) << '\n';
    os << "  hartree: " << io::format_double(outcome.tail.hartree) << "\n\n";

    os << "checks\n";
    os << "  pathwise bound |X_N|, |X| <= ||a||: ok\n";
    os << "  triangle inequality |E(X) - E(X_N)| <= E(Y_N): ok\n";
    return os.str();
}

/// Runs the ensemble and fills in summary statistics and diagnostics.
inline ExperimentOutcome compute_experiment(const ExperimentConfig& cfg) {
    const PreparedExperiment prepared(cfg.plan);
    ExperimentOutcome outcome;
    outcome.observable_norm = prepared.observable_norm();
    outcome.results = prepared.run_all(cfg.threads);
    outcome.summary = estimate(outcome.results);
    outcome.tail = tail_diagnostic(outcome.results, cfg.beta.value_or(0.5 * outcome.observable_norm));
    outcome.slope = loglog_slope(outcome.summary);
    return outcome;
}

/// End-to-end run writing samples.csv, summary.csv, config.resolved and
/// report.txt into `out_dir`. Returns the process exit status.
inline int run_experiment(ExperimentConfig cfg, const std::filesystem::path& out_dir, std::ostream& out = std::cout,
                          std::ostream& log = std::cerr) {
    namespace fs = std::filesystem;
    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec || !fs::is_directory(out_dir)) {
            log << "error: cannot create output directory '" << out_dir.string() << "'\n";
            return 2;
        }
        const ExperimentOutcome outcome = compute_experiment(cfg);
        if (!cfg.beta) override_setting(cfg, "beta", format_shortest(outcome.tail.beta));

        const std::string samples = io::samples_csv(outcome.results);
        const std::string summary = io::summary_csv(outcome.summary);
        const std::string report = render_report(cfg, outcome);
        io::write_file_atomically(out_dir / "samples.csv", samples);
        io::write_file_atomically(out_dir / "summary.csv", summary);
        io::write_file_atomically(out_dir / "config.resolved", cfg.resolved_text());
        io::write_file_atomically(out_dir / "report.txt", report);
        out << report;
        return 0;
    } catch (const SampleError& e) {
        log << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace mflab::cli
