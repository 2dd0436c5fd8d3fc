#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "mflab/errors.hpp"

namespace mflab {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Periodic cubic lattice with M sites per axis on a box of side L.
///
/// Sites are stored with axis 0 varying fastest: the linear index of
/// (j_0, ..., j_{d-1}) is j_0 + M j_1 + M^2 j_2. The spacing is derived from
/// (M, L) on every access so it can never drift out of sync.
class LatticeGrid {
public:
    LatticeGrid() = default;

    LatticeGrid(int dimension, int sites_per_axis, double box_length)
        : dimension_(dimension), sites_per_axis_(sites_per_axis), box_length_(box_length) {
        if (dimension < 1 || dimension > 3)
            throw ConfigError("dimension must be 1, 2 or 3 (got " + std::to_string(dimension) + ")");
        if (sites_per_axis < 2)
            throw ConfigError("sites must be at least 2 (got " + std::to_string(sites_per_axis) + ")");
        if (!(box_length > 0.0) || !std::isfinite(box_length))
            throw ConfigError("box_length must be a positive finite number");
        num_sites_ = 1;
        for (int a = 0; a < dimension; ++a) num_sites_ *= static_cast<std::size_t>(sites_per_axis);
    }

    int dimension() const { return dimension_; }
    int sites_per_axis() const { return sites_per_axis_; }
    double box_length() const { return box_length_; }
    double spacing() const { return box_length_ / sites_per_axis_; }
    std::size_t num_sites() const { return num_sites_; }

    /// h^d, the volume element of the discrete L^2 inner product.
    double cell_volume() const { return std::pow(spacing(), dimension_); }

    std::array<int, 3> coords(std::size_t site) const {
        std::array<int, 3> c{0, 0, 0};
        for (int a = 0; a < dimension_; ++a) {
            c[a] = static_cast<int>(site % sites_per_axis_);
            site /= sites_per_axis_;
        }
        return c;
    }

    std::size_t site(const std::array<int, 3>& c) const {
        std::size_t s = 0;
        for (int a = dimension_ - 1; a >= 0; --a) {
            int j = ((c[a] % sites_per_axis_) + sites_per_axis_) % sites_per_axis_;
            s = s * sites_per_axis_ + static_cast<std::size_t>(j);
        }
        return s;
    }

    /// Site reached by moving `step` sites along `axis`, with periodic wrap.
    std::size_t shifted(std::size_t site_index, int axis, int step) const {
        auto c = coords(site_index);
        c[axis] += step;
        return site(c);
    }

    /// Index of -x (mod L) on every axis.
    std::size_t reflected(std::size_t site_index) const {
        auto c = coords(site_index);
        for (int a = 0; a < dimension_; ++a) c[a] = -c[a];
        return site(c);
    }

    /// Index of x - y with periodic wrap.
    std::size_t difference(std::size_t x, std::size_t y) const {
        auto cx = coords(x);
        auto cy = coords(y);
        for (int a = 0; a < dimension_; ++a) cx[a] -= cy[a];
        return site(cx);
    }

    /// Coordinate j*h along one axis.
    double position(std::size_t site_index, int axis) const { return coords(site_index)[axis] * spacing(); }

    /// Squared minimal-image distance from `site_index` to the point `center`.
    double periodic_distance_squared(std::size_t site_index, const std::array<double, 3>& center) const {
        double r2 = 0.0;
        for (int a = 0; a < dimension_; ++a) {
            double dx = position(site_index, a) - center[a];
            dx -= box_length_ * std::round(dx / box_length_);
            r2 += dx * dx;
        }
        return r2;
    }

    friend bool operator==(const LatticeGrid& a, const LatticeGrid& b) {
        return a.dimension_ == b.dimension_ && a.sites_per_axis_ == b.sites_per_axis_ &&
               a.box_length_ == b.box_length_;
    }

private:
    int dimension_ = 1;
    int sites_per_axis_ = 2;
    double box_length_ = 1.0;
    std::size_t num_sites_ = 2;
};

inline LatticeGrid build_grid(int dimension, int sites_per_axis, double box_length) {
    return LatticeGrid(dimension, sites_per_axis, box_length);
}

inline void require_same_grid(const LatticeGrid& a, const LatticeGrid& b, const char* what) {
    if (!(a == b)) throw DimensionError(std::string(what) + ": operands live on different grids");
}

/// Single-particle state on a lattice.
class WaveFunction {
public:
    WaveFunction() = default;

    WaveFunction(LatticeGrid grid, ComplexVector amplitudes)
        : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amplitudes_.size()) != grid_.num_sites())
            throw DimensionError("wave function size does not match the grid site count");
    }

    static WaveFunction zero(const LatticeGrid& grid) {
        return WaveFunction(grid, ComplexVector::Zero(static_cast<Eigen::Index>(grid.num_sites())));
    }

    const LatticeGrid& grid() const { return grid_; }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    ComplexVector& amplitudes() { return amplitudes_; }
    Complex operator[](std::size_t site) const { return amplitudes_[static_cast<Eigen::Index>(site)]; }
    std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }

    /// h^d * sum |psi|^2
    double norm_squared() const { return grid_.cell_volume() * amplitudes_.squaredNorm(); }
    double norm() const { return std::sqrt(norm_squared()); }

    WaveFunction normalized() const {
        double n = norm();
        if (!(n > 0.0)) throw PreconditionError("cannot normalize a zero wave function");
        return WaveFunction(grid_, amplitudes_ / n);
    }

    WaveFunction conjugate() const { return WaveFunction(grid_, amplitudes_.conjugate()); }

    /// |psi(x)|^2 at every site.
    RealVector density() const { return amplitudes_.cwiseAbs2(); }

private:
    LatticeGrid grid_;
    ComplexVector amplitudes_;
};

/// h-weighted inner product <a, b>, antilinear in the first slot.
inline Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
    require_same_grid(a.grid(), b.grid(), "inner_product");
    return a.grid().cell_volume() * a.amplitudes().dot(b.amplitudes());
}

inline constexpr double kNormTolerance = 1e-12;

inline void require_normalized(const WaveFunction& psi, const char* what) {
    if (std::abs(psi.norm() - 1.0) > kNormTolerance)
        throw PreconditionError(std::string(what) + ": wave function must have unit norm (got " +
                                std::to_string(psi.norm()) + ")");
}

}  // namespace mflab
