#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mflab/core/grid.hpp"

namespace mflab {

inline constexpr std::size_t kDefaultDimensionCap = 200000;

/// binomial(N + S - 1, N), the number of ways to put N bosons on S sites.
/// Returned as a double so oversized requests can be detected without overflow.
inline double fock_dimension(int particles, std::size_t sites) {
    double d = 1.0;
    for (int k = 1; k <= particles; ++k) d = d * static_cast<double>(sites - 1 + k) / k;
    return std::round(d);
}

/// Occupation-number basis of the N-boson sector on S modes.
///
/// States are ordered lexicographically from the most occupied first site
/// down, e.g. (2,0), (1,1), (0,2). Ranking uses the combinatorial number
/// system, so index lookup needs no hash table.
class FockBasis {
public:
    FockBasis(int particles, std::size_t sites, std::size_t dimension_cap = kDefaultDimensionCap)
        : particles_(particles), sites_(sites) {
        if (particles < 0) throw DomainError("FockBasis: particle count must be nonnegative");
        if (sites < 1) throw DomainError("FockBasis: need at least one site");
        const double dim = fock_dimension(particles, sites);
        if (dim > static_cast<double>(dimension_cap))
            throw ResourceError("Fock basis for N = " + std::to_string(particles) + " on " + std::to_string(sites) +
                                " sites has dimension " + std::to_string(static_cast<long double>(dim)) +
                                ", above the cap of " + std::to_string(dimension_cap));
        dimension_ = static_cast<std::size_t>(dim);
        build_composition_table();
        enumerate();
    }

    int particles() const { return particles_; }
    std::size_t sites() const { return sites_; }
    std::size_t size() const { return dimension_; }

    std::span<const std::uint16_t> state(std::size_t index) const {
        return {occupations_.data() + index * sites_, sites_};
    }

    /// Position of an occupation vector, or nullopt if it is not in this sector.
    std::optional<std::size_t> find(std::span<const std::uint16_t> occupation) const {
        if (occupation.size() != sites_) return std::nullopt;
        long total = 0;
        for (auto n : occupation) total += n;
        if (total != particles_) return std::nullopt;
        return rank(occupation);
    }

    std::size_t index(std::span<const std::uint16_t> occupation) const {
        auto found = find(occupation);
        if (!found) throw DomainError("occupation vector is not part of this Fock basis");
        return *found;
    }

    /// Rank of a valid occupation vector (sum N, length S); no validation.
    std::size_t rank(std::span<const std::uint16_t> occupation) const {
        std::size_t idx = 0;
        int remaining = particles_;
        for (std::size_t i = 0; i + 1 < sites_; ++i) {
            const std::size_t parts_after = sites_ - i - 1;
            for (int m = occupation[i] + 1; m <= remaining; ++m) idx += compositions(remaining - m, parts_after);
            remaining -= occupation[i];
        }
        return idx;
    }

private:
    /// Number of ways to write r as an ordered sum of `parts` nonnegative integers.
    std::size_t compositions(int r, std::size_t parts) const {
        return composition_table_[static_cast<std::size_t>(r) * (sites_ + 1) + parts];
    }

    void build_composition_table() {
        composition_table_.assign(static_cast<std::size_t>(particles_ + 1) * (sites_ + 1), 0);
        auto at = [&](int r, std::size_t parts) -> std::size_t& {
            return composition_table_[static_cast<std::size_t>(r) * (sites_ + 1) + parts];
        };
        for (std::size_t parts = 1; parts <= sites_; ++parts) {
            for (int r = 0; r <= particles_; ++r) {
                if (parts == 1) {
                    at(r, parts) = 1;
                } else {
                    // compositions(r, parts) = Σ_{m<=r} compositions(r - m, parts - 1)
                    std::size_t total = 0;
                    for (int m = 0; m <= r; ++m) total += at(r - m, parts - 1);
                    at(r, parts) = total;
                }
            }
        }
        at(0, 0) = 1;
    }

    void enumerate() {
        occupations_.assign(dimension_ * sites_, 0);
        std::vector<std::uint16_t> current(sites_, 0);
        current[0] = static_cast<std::uint16_t>(particles_);
        for (std::size_t k = 0; k < dimension_; ++k) {
            std::copy(current.begin(), current.end(), occupations_.begin() + static_cast<std::ptrdiff_t>(k * sites_));
            // Successor in descending lexicographic order.
            std::size_t i = sites_ - 1;
            while (i > 0 && current[i - 1] == 0) --i;
            if (i == 0) break;
            --i;
            int tail = 0;
            for (std::size_t j = i + 1; j < sites_; ++j) {
                tail += current[j];
                current[j] = 0;
            }
            --current[i];
            current[i + 1] = static_cast<std::uint16_t>(tail + 1);
        }
    }

    int particles_;
    std::size_t sites_;
    std::size_t dimension_ = 0;
    std::vector<std::uint16_t> occupations_;
    std::vector<std::size_t> composition_table_;
};

inline FockBasis build_fock_basis(int particles, const LatticeGrid& grid,
                                  std::size_t dimension_cap = kDefaultDimensionCap) {
    if (particles < 1) throw DomainError("build_fock_basis: N must be positive");
    if (particles > 65535) throw ResourceError("build_fock_basis: N above 65535 is not representable");
    try {
        return FockBasis(particles, grid.num_sites(), dimension_cap);
    } catch (const ResourceError& e) {
        throw ResourceError(std::string(e.what()) + " (N = " + std::to_string(particles) +
                            ", M = " + std::to_string(grid.sites_per_axis()) + ")");
    }
}

}  // namespace mflab
