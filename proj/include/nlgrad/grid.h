// Regular cell-centered grids on open boxes in R^N (N = 1 or 2), the scalar /
// vector / pair fields living on them, midpoint quadrature, and the local
// forward-difference gradient together with its exact negative adjoint.
//
// Sampling is at cell centers, so fields and weights are never evaluated on
// the box boundary (weights are allowed to blow up there).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlgrad {

// User-facing validation problem (CLI maps this to exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative method failed to reach its certificate (CLI maps this to exit 3).
// The best iterate is still reported by the throwing call where applicable.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

class DomainGrid {
public:
    // Box (origin_i, origin_i + dims_i * spacing_i) per axis; points at cell
    // centers origin_i + (k + 1/2) spacing_i.
    DomainGrid(std::vector<std::size_t> dims, std::vector<double> spacing,
               std::vector<double> origin = {});

    static DomainGrid interval(std::size_t n, double length = 1.0, double origin = 0.0);
    static DomainGrid box2d(std::size_t nx, std::size_t ny, double lx = 1.0, double ly = 1.0);

    int dim() const { return static_cast<int>(dims_.size()); }
    std::size_t points() const { return npoints_; }
    std::size_t extent(int axis) const { return dims_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double origin(int axis) const { return origin_[axis]; }
    double length(int axis) const { return static_cast<double>(dims_[axis]) * spacing_[axis]; }

    // Cell measure and total measure |Omega| = n * mu.
    double cell_measure() const { return mu_; }
    double measure() const { return static_cast<double>(npoints_) * mu_; }

    // Flat index <-> multi-index (row-major, axis 0 slowest).
    std::size_t flat(std::size_t i0, std::size_t i1 = 0) const {
        return dim() == 1 ? i0 : i0 * dims_[1] + i1;
    }
    std::array<std::size_t, 2> unflat(std::size_t i) const {
        if (dim() == 1) return {i, 0};
        return {i / dims_[1], i % dims_[1]};
    }

    // Coordinate of point i along axis (cell center).
    double coord(std::size_t i, int axis) const {
        const auto mi = unflat(i);
        return origin_[axis] + (static_cast<double>(mi[axis]) + 0.5) * spacing_[axis];
    }
    std::array<double, 2> point(std::size_t i) const {
        std::array<double, 2> x{coord(i, 0), 0.0};
        if (dim() == 2) x[1] = coord(i, 1);
        return x;
    }

    // Euclidean distance from the cell center to the box boundary.
    double boundary_distance(std::size_t i) const;

    bool same_layout(const DomainGrid& other) const {
        return dims_ == other.dims_ && spacing_ == other.spacing_ && origin_ == other.origin_;
    }

private:
    std::vector<std::size_t> dims_;
    std::vector<double> spacing_;
    std::vector<double> origin_;
    std::size_t npoints_ = 0;
    double mu_ = 0.0;
};

class ScalarField {
public:
    explicit ScalarField(const DomainGrid& grid, double fill = 0.0)
        : grid_(&grid), values_(grid.points(), fill) {}
    ScalarField(const DomainGrid& grid, std::vector<double> values);

    const DomainGrid& grid() const { return *grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }
    const std::vector<double>& values() const { return values_; }

    void check_finite(const char* what = "scalar field") const;

private:
    const DomainGrid* grid_;
    std::vector<double> values_;
};

// Vector field with planar component storage: component c occupies
// [c*n, (c+1)*n) so pair kernels see contiguous streams.
class VectorField {
public:
    explicit VectorField(const DomainGrid& grid, double fill = 0.0)
        : grid_(&grid), values_(grid.points() * grid.dim(), fill) {}

    const DomainGrid& grid() const { return *grid_; }
    int components() const { return grid_->dim(); }
    std::size_t size() const { return grid_->points(); }
    double comp(std::size_t i, int c) const { return values_[c * grid_->points() + i]; }
    double& comp(std::size_t i, int c) { return values_[c * grid_->points() + i]; }
    const double* comp_data(int c) const { return values_.data() + c * grid_->points(); }
    double* comp_data(int c) { return values_.data() + c * grid_->points(); }

    double norm_at(std::size_t i) const;   // Euclidean norm of the vector at point i

    void check_finite(const char* what = "vector field") const;

private:
    const DomainGrid* grid_;
    std::vector<double> values_;
};

// Which ordered pairs (x, y) interact. Full mode activates every ordered pair
// (diagonal included); radius mode keeps |x - y| <= r. Both are symmetric.
struct PairMask {
    enum class Mode { full, radius };
    Mode mode = Mode::full;
    double radius = 0.0;

    static PairMask full() { return PairMask{}; }
    static PairMask truncated(double r) {
        if (!(r > 0.0)) throw config_error("pair mask radius must be positive");
        return PairMask{Mode::radius, r};
    }

    bool active(const DomainGrid& g, std::size_t x, std::size_t y) const;
};

// Enumerate the active columns y of row x as contiguous [begin, end) blocks,
// so inner loops stay dense. Full mode is one block; the radius band is one
// block per y-row of the grid.
template <class Fn>
inline void mask_row_blocks(const DomainGrid& g, const PairMask& m, std::size_t x, Fn&& fn) {
    const std::size_t n = g.points();
    if (m.mode == PairMask::Mode::full) {
        fn(std::size_t{0}, n);
        return;
    }
    const double r = m.radius;
    if (g.dim() == 1) {
        const double h = g.spacing(0);
        const auto xi = static_cast<double>(g.unflat(x)[0]);
        // |xi - yi| * h <= r
        const double k = r / h;
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(xi - k)));
        const auto hi = static_cast<std::size_t>(std::min(static_cast<double>(n - 1), std::floor(xi + k)));
        if (lo <= hi) fn(lo, hi + 1);
        return;
    }
    const double h0 = g.spacing(0), h1 = g.spacing(1);
    const auto mi = g.unflat(x);
    const std::size_t n0 = g.extent(0), n1 = g.extent(1);
    for (std::size_t j0 = 0; j0 < n0; ++j0) {
        const double d0 = (static_cast<double>(j0) - static_cast<double>(mi[0])) * h0;
        if (std::abs(d0) > r) continue;
        const double rem = std::sqrt(std::max(0.0, r * r - d0 * d0));
        const double k = rem / h1;
        const auto c = static_cast<double>(mi[1]);
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(c - k)));
        const auto hi = static_cast<std::size_t>(std::min(static_cast<double>(n1 - 1), std::floor(c + k)));
        if (lo <= hi) fn(j0 * n1 + lo, j0 * n1 + hi + 1);
    }
}

// Values on ordered pairs (x, y), scalar or one value per grid axis.
// Storage is dense n*n per component (component-planar, row-major in x);
// entries of inactive pairs are kept at exactly zero.
class PairField {
public:
    PairField(const DomainGrid& grid, int components, PairMask mask = PairMask::full());

    const DomainGrid& grid() const { return *grid_; }
    const PairMask& mask() const { return mask_; }
    int components() const { return ncomp_; }
    std::size_t rows() const { return n_; }

    double comp(std::size_t x, std::size_t y, int c) const { return values_[idx(x, y, c)]; }
    double& comp(std::size_t x, std::size_t y, int c) { return values_[idx(x, y, c)]; }
    const double* row(std::size_t x, int c) const { return values_.data() + (c * n_ + x) * n_; }
    double* row(std::size_t x, int c) { return values_.data() + (c * n_ + x) * n_; }

    double norm_at(std::size_t x, std::size_t y) const;

    void check_finite(const char* what = "pair field") const;

private:
    std::size_t idx(std::size_t x, std::size_t y, int c) const { return (c * n_ + x) * n_ + y; }
    const DomainGrid* grid_;
    PairMask mask_;
    int ncomp_;
    std::size_t n_;
    std::vector<double> values_;
};

// Forward differences per axis; the last point of each grid line replicates
// the previous difference, so constants map to zero and affine samples map to
// their exact slope.
VectorField local_gradient(const ScalarField& u);

// Exact negative adjoint of local_gradient under the mu-weighted inner
// products: <local_gradient(u), v>_mu = -<u, local_divergence(v)>_mu for all u.
ScalarField local_divergence(const VectorField& v);

// Midpoint quadrature: sum * mu (single) and sum * mu^2 over active pairs
// (double). Reduction order is row-major and deterministic.
double integrate(const ScalarField& u);
double integrate_pairs(const PairField& w);

// mu-weighted inner products used throughout.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double inner_pairs(const PairField& a, const PairField& b);

}  // namespace nlgrad
