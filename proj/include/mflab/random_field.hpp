#pragma once

#include <cmath>
#include <cstdint>
#include <regex>
#include <string>
#include <vector>

#include "mflab/core/format.hpp"
#include "mflab/core/grid.hpp"
#include "mflab/core/hash.hpp"

namespace mflab {

/// Deterministic part v₁ of the interaction.
struct BaseProfile {
    enum class Kind { Zero, GaussianBump, Cosine };
    Kind kind = Kind::Zero;
    double amplitude = 0.0;
    double width = 1.0;  // GaussianBump only
    int mode = 1;        // Cosine only

    static BaseProfile zero() { return {}; }
    static BaseProfile gaussian_bump(double amplitude, double width) {
        return {Kind::GaussianBump, amplitude, width, 1};
    }
    static BaseProfile cosine(double amplitude, int mode) { return {Kind::Cosine, amplitude, 1.0, mode}; }

    /// Preset syntax: "zero", "gaussian_bump(A, w)", "cosine(A, k)".
    static BaseProfile parse(const std::string& text) {
        static const std::regex zero_re(R"(\s*zero\s*)");
        static const std::regex call_re(R"(\s*(gaussian_bump|cosine)\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*)");
        std::smatch m;
        if (std::regex_match(text, zero_re)) return zero();
        if (!std::regex_match(text, m, call_re))
            throw ConfigError("unknown field base '" + text +
                              "' (expected zero, gaussian_bump(amplitude, width) or cosine(amplitude, mode))");
        const double amplitude = parse_number(m[2].str(), text);
        if (m[1] == "gaussian_bump") {
            const double width = parse_number(m[3].str(), text);
            if (!(width > 0.0)) throw ConfigError("gaussian_bump width must be positive in '" + text + "'");
            return gaussian_bump(amplitude, width);
        }
        const double mode = parse_number(m[3].str(), text);
        if (mode != std::floor(mode) || mode < 0) throw ConfigError("cosine mode must be a nonnegative integer in '" + text + "'");
        return cosine(amplitude, static_cast<int>(mode));
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::Zero: return "zero";
            case Kind::GaussianBump:
                return "gaussian_bump(" + format_shortest(amplitude) + ", " + format_shortest(width) + ")";
            case Kind::Cosine: return "cosine(" + format_shortest(amplitude) + ", " + std::to_string(mode) + ")";
        }
        return "zero";
    }

    /// v₁ at a lattice site.
    double evaluate(const LatticeGrid& grid, std::size_t site) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::GaussianBump: {
                const double r2 = grid.periodic_distance_squared(site, {0.0, 0.0, 0.0});
                return amplitude * std::exp(-r2 / (2.0 * width * width));
            }
            case Kind::Cosine: {
                double value = amplitude;
                for (int a = 0; a < grid.dimension(); ++a)
                    value *= std::cos(2.0 * kPi * mode * grid.position(site, a) / grid.box_length());
                return value;
            }
        }
        return 0.0;
    }

private:
    static double parse_number(const std::string& token, const std::string& text) {
        try {
            std::size_t used = 0;
            double value = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            return value;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + token + "' in field base '" + text + "'");
        }
    }
};

/// Law of v(x, ω) = v₁(x) + v₂(x, ω), with v₂ a finite Gaussian Fourier sum.
/// mode_stddevs[i] is the standard deviation of mode k = i + 1.
struct FieldSpec {
    BaseProfile base;
    double gaussian_mean = 0.0;
    std::vector<double> mode_stddevs;
    bool enforce_even = true;

    int max_mode() const { return static_cast<int>(mode_stddevs.size()); }
    bool is_deterministic() const {
        for (double s : mode_stddevs)
            if (s != 0.0) return false;
        return true;
    }

    void validate(const LatticeGrid& grid) const {
        for (double s : mode_stddevs)
            if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("field.sigmas entries must be finite and nonnegative");
        if (2 * max_mode() >= grid.sites_per_axis())
            throw ConfigError("field.sigmas has " + std::to_string(max_mode()) + " modes but K < M/2 requires at most " +
                              std::to_string((grid.sites_per_axis() - 1) / 2) + " for sites = " +
                              std::to_string(grid.sites_per_axis()));
        if (!std::isfinite(gaussian_mean)) throw ConfigError("field.gaussian_mean must be finite");
    }
};

/// One realization v(·, ω) on the lattice.
struct RandomField {
    LatticeGrid grid;
    RealVector values;
    std::uint64_t seed = 0;
    FieldSpec spec;

    double operator[](std::size_t site) const { return values[static_cast<Eigen::Index>(site)]; }
};

/// Standard normal draw number `counter` of the stream keyed by `seed`
/// (Box-Muller on two counter-hashed uniforms).
inline double standard_normal(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = to_open_unit(counter_hash(seed, 2 * counter));
    const double u2 = to_open_unit(counter_hash(seed, 2 * counter + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

/// Seed of ensemble member `index`; independent of evaluation order.
inline std::uint64_t derive_sample_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed ^ splitmix64(index + 0x5EEDULL));
}

inline RandomField sample_field(const FieldSpec& spec, std::uint64_t seed, const LatticeGrid& grid) {
    spec.validate(grid);
    const auto n = static_cast<Eigen::Index>(grid.num_sites());
    const int d = grid.dimension();
    const int modes = spec.max_mode();

    // Coefficients (A, B) for each mode and axis, drawn in a fixed order.
    std::vector<double> cos_coeff(static_cast<std::size_t>(modes * d));
    std::vector<double> sin_coeff(cos_coeff.size());
    for (int k = 1; k <= modes; ++k) {
        for (int a = 0; a < d; ++a) {
            const auto slot = static_cast<std::size_t>((k - 1) * d + a);
            cos_coeff[slot] = standard_normal(seed, 2 * slot);
            sin_coeff[slot] = standard_normal(seed, 2 * slot + 1);
        }
    }

    RealVector raw(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        const auto site = static_cast<std::size_t>(x);
        double v2 = spec.gaussian_mean;
        for (int k = 1; k <= modes; ++k) {
            const double sigma = spec.mode_stddevs[static_cast<std::size_t>(k - 1)];
            if (sigma == 0.0) continue;
            for (int a = 0; a < d; ++a) {
                const auto slot = static_cast<std::size_t>((k - 1) * d + a);
                const double phase = 2.0 * kPi * k * grid.position(site, a) / grid.box_length();
                v2 += sigma * (cos_coeff[slot] * std::cos(phase) + sin_coeff[slot] * std::sin(phase));
            }
        }
        raw[x] = spec.base.evaluate(grid, site) + v2;
    }

    RandomField field{grid, raw, seed, spec};
    if (spec.enforce_even) {
        for (Eigen::Index x = 0; x < n; ++x)
            field.values[x] = 0.5 * (raw[x] + raw[static_cast<Eigen::Index>(grid.reflected(static_cast<std::size_t>(x)))]);
    }
    return field;
}

/// Deterministic field with the same value at every site.
inline RandomField constant_field(const LatticeGrid& grid, double value) {
    FieldSpec spec;
    spec.gaussian_mean = value;
    return sample_field(spec, 0, grid);
}

/// sup_x |v(x)|
inline double field_bound(const RandomField& field) {
    return field.values.size() == 0 ? 0.0 : field.values.cwiseAbs().maxCoeff();
}

}  // namespace mflab
