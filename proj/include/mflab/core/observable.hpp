#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "mflab/core/grid.hpp"
#include "mflab/core/hash.hpp"

namespace mflab {

/// Indexing of p-tuples of lattice sites: X = (x_1, ..., x_p) maps to
/// x_1 + S x_2 + ... + S^{p-1} x_p with S the site count.
class TupleIndex {
public:
    TupleIndex(std::size_t num_sites, int p) : num_sites_(num_sites), p_(p) {
        size_ = 1;
        for (int i = 0; i < p; ++i) size_ *= num_sites;
    }

    std::size_t size() const { return size_; }
    int arity() const { return p_; }

    std::vector<std::size_t> unpack(std::size_t index) const {
        std::vector<std::size_t> sites(static_cast<std::size_t>(p_));
        for (int i = 0; i < p_; ++i) {
            sites[i] = index % num_sites_;
            index /= num_sites_;
        }
        return sites;
    }

    std::size_t pack(const std::vector<std::size_t>& sites) const {
        std::size_t index = 0;
        for (int i = p_ - 1; i >= 0; --i) index = index * num_sites_ + sites[i];
        return index;
    }

    /// For every permutation π of the p slots, the map X -> πX.
    std::vector<std::vector<std::size_t>> permutation_maps() const {
        std::vector<int> perm(static_cast<std::size_t>(p_));
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::vector<std::size_t>> maps;
        do {
            std::vector<std::size_t> map(size_);
            for (std::size_t x = 0; x < size_; ++x) {
                auto sites = unpack(x);
                std::vector<std::size_t> permuted(sites.size());
                for (int i = 0; i < p_; ++i) permuted[i] = sites[perm[i]];
                map[x] = pack(permuted);
            }
            maps.push_back(std::move(map));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return maps;
    }

private:
    std::size_t num_sites_;
    int p_;
    std::size_t size_;
};

/// Averages a kernel over simultaneous permutations of the p coordinate
/// blocks of both arguments.
inline ComplexMatrix symmetrize_kernel(const ComplexMatrix& kernel, const TupleIndex& tuples) {
    const auto maps = tuples.permutation_maps();
    const auto n = static_cast<Eigen::Index>(tuples.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (const auto& map : maps) {
        for (Eigen::Index y = 0; y < n; ++y)
            for (Eigen::Index x = 0; x < n; ++x)
                out(x, y) += kernel(static_cast<Eigen::Index>(map[x]), static_cast<Eigen::Index>(map[y]));
    }
    return out / static_cast<double>(maps.size());
}

/// Projects a p-particle vector onto the permutation-symmetric subspace.
inline ComplexVector symmetrize_vector(const ComplexVector& v, const TupleIndex& tuples) {
    const auto maps = tuples.permutation_maps();
    ComplexVector out = ComplexVector::Zero(v.size());
    for (const auto& map : maps)
        for (Eigen::Index x = 0; x < v.size(); ++x) out[x] += v[static_cast<Eigen::Index>(map[x])];
    return out / static_cast<double>(maps.size());
}

/// A bounded p-particle observable given by its kernel α(X; Y) on
/// lattice^p x lattice^p. The operator acts as (a f)(X) = h^{dp} Σ_Y α(X;Y) f(Y).
/// The kernel is symmetrized on construction.
class PObservable {
public:
    PObservable(LatticeGrid grid, int p, const ComplexMatrix& kernel) : grid_(std::move(grid)), p_(p) {
        if (p < 1) throw DomainError("observable particle count p must be positive");
        TupleIndex tuples(grid_.num_sites(), p);
        const auto n = static_cast<Eigen::Index>(tuples.size());
        if (kernel.rows() != n || kernel.cols() != n)
            throw DimensionError("observable kernel must be (M^d)^p x (M^d)^p = " + std::to_string(n) + " square");
        kernel_ = symmetrize_kernel(kernel, tuples);
    }

    const LatticeGrid& grid() const { return grid_; }
    int p() const { return p_; }
    const ComplexMatrix& kernel() const { return kernel_; }
    TupleIndex tuples() const { return TupleIndex(grid_.num_sites(), p_); }

    /// h^{dp} α: the operator in the orthonormal site basis.
    ComplexMatrix matrix() const { return std::pow(grid_.cell_volume(), p_) * kernel_; }

    bool is_self_adjoint(double tol = 1e-12) const {
        return (kernel_ - kernel_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, kernel_.cwiseAbs().maxCoeff());
    }

private:
    LatticeGrid grid_;
    int p_;
    ComplexMatrix kernel_;
};

/// Kernel of the projector onto φ^{⊗p}: Π_i φ(x_i) conj(φ(y_i)).
inline PObservable condensate_projector(const WaveFunction& phi, int p = 1) {
    require_normalized(phi, "condensate_projector");
    TupleIndex tuples(phi.grid().num_sites(), p);
    ComplexVector product(static_cast<Eigen::Index>(tuples.size()));
    for (std::size_t x = 0; x < tuples.size(); ++x) {
        Complex value = 1.0;
        for (std::size_t s : tuples.unpack(x)) value *= phi[s];
        product[static_cast<Eigen::Index>(x)] = value;
    }
    return PObservable(phi.grid(), p, product * product.adjoint());
}

/// Multiplication by Π_i f(x_i); kernel h^{-dp} Π f(x_i) δ_{XY}.
inline PObservable site_multiplier(const LatticeGrid& grid, const RealVector& f, int p = 1) {
    if (static_cast<std::size_t>(f.size()) != grid.num_sites())
        throw DimensionError("site_multiplier: profile size does not match the grid");
    TupleIndex tuples(grid.num_sites(), p);
    const double scale = std::pow(grid.cell_volume(), -p);
    ComplexMatrix kernel = ComplexMatrix::Zero(static_cast<Eigen::Index>(tuples.size()),
                                               static_cast<Eigen::Index>(tuples.size()));
    for (std::size_t x = 0; x < tuples.size(); ++x) {
        double value = scale;
        for (std::size_t s : tuples.unpack(x)) value *= f[static_cast<Eigen::Index>(s)];
        kernel(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = value;
    }
    return PObservable(grid, p, kernel);
}

inline PObservable identity_observable(const LatticeGrid& grid, int p = 1) {
    return site_multiplier(grid, RealVector::Ones(static_cast<Eigen::Index>(grid.num_sites())), p);
}

/// Tensor product a ⊗ b of two observables on the same grid.
inline PObservable tensor_product(const PObservable& a, const PObservable& b) {
    require_same_grid(a.grid(), b.grid(), "tensor_product");
    // Tuple (X_a, X_b) packs as X_a + S^{p_a} X_b, which is exactly the Kronecker layout.
    const auto& ka = a.kernel();
    const auto& kb = b.kernel();
    ComplexMatrix kernel(ka.rows() * kb.rows(), ka.cols() * kb.cols());
    for (Eigen::Index i = 0; i < kb.rows(); ++i)
        for (Eigen::Index j = 0; j < kb.cols(); ++j)
            kernel.block(i * ka.rows(), j * ka.cols(), ka.rows(), ka.cols()) = kb(i, j) * ka;
    return PObservable(a.grid(), a.p() + b.p(), kernel);
}

struct PowerIterationOptions {
    double relative_tolerance = 1e-8;
    int max_iterations = 200000;
};

/// Operator norm of a on the symmetric p-particle space, by power iteration
/// on A†A with the iterate re-projected onto the symmetric subspace each step.
inline double operator_norm(const PObservable& a, const PowerIterationOptions& options = {}) {
    const ComplexMatrix mat = a.matrix();
    const TupleIndex tuples = a.tuples();
    const bool needs_projection = a.p() > 1;
    const auto n = mat.rows();

    ComplexVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto bits = static_cast<std::uint64_t>(i);
        x[i] = Complex(to_open_unit(counter_hash(0x6E6F726DULL, 2 * bits)) - 0.5,
                       to_open_unit(counter_hash(0x6E6F726DULL, 2 * bits + 1)) - 0.5);
    }
    if (needs_projection) x = symmetrize_vector(x, tuples);
    if (x.norm() == 0.0) return 0.0;
    x.normalize();

    for (int it = 0; it < options.max_iterations; ++it) {
        ComplexVector y = mat.adjoint() * (mat * x);
        if (needs_projection) y = symmetrize_vector(y, tuples);
        const double mu = x.dot(y).real();
        if (mu <= 0.0) return 0.0;
        const double residual = (y - mu * x).norm();
        if (residual <= options.relative_tolerance * mu) return std::sqrt(mu);
        x = y / y.norm();
    }
    throw NumericalError("operator_norm: power iteration did not converge within " +
                         std::to_string(options.max_iterations) + " iterations");
}

/// N! / (N^p (N-p)!) = Π_{k<p} (N-k)/N.
inline double lift_factor(int n, int p) {
    if (p < 1 || n < 1) throw DomainError("lift_factor requires positive N and p");
    if (p > n) throw DomainError("lift_factor requires p <= N (p = " + std::to_string(p) +
                                 ", N = " + std::to_string(n) + ")");
    double f = 1.0;
    for (int k = 0; k < p; ++k) f *= static_cast<double>(n - k) / n;
    return f;
}

}  // namespace mflab
