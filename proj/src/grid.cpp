#include "nlgrad/grid.h"

#include <cmath>
#include <limits>

namespace nlgrad {

DomainGrid::DomainGrid(std::vector<std::size_t> dims, std::vector<double> spacing,
                       std::vector<double> origin)
    : dims_(std::move(dims)), spacing_(std::move(spacing)), origin_(std::move(origin)) {
    if (dims_.empty() || dims_.size() > 2)
        throw config_error("grid.dims: need 1 or 2 axes, got " + std::to_string(dims_.size()));
    if (spacing_.size() != dims_.size())
        throw config_error("grid.spacing: axis count mismatch");
    if (origin_.empty()) origin_.assign(dims_.size(), 0.0);
    if (origin_.size() != dims_.size())
        throw config_error("grid.origin: axis count mismatch");
    npoints_ = 1;
    mu_ = 1.0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        if (dims_[a] == 0) throw config_error("grid.dims: entries must be positive");
        if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
            throw config_error("grid.spacing: entries must be positive finite");
        npoints_ *= dims_[a];
        mu_ *= spacing_[a];
    }
}

DomainGrid DomainGrid::interval(std::size_t n, double length, double origin) {
    if (n == 0) throw config_error("grid: point count must be positive");
    return DomainGrid({n}, {length / static_cast<double>(n)}, {origin});
}

DomainGrid DomainGrid::box2d(std::size_t nx, std::size_t ny, double lx, double ly) {
    if (nx == 0 || ny == 0) throw config_error("grid: point counts must be positive");
    return DomainGrid({nx, ny},
                      {lx / static_cast<double>(nx), ly / static_cast<double>(ny)});
}

double DomainGrid::boundary_distance(std::size_t i) const {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim(); ++a) {
        const double c = coord(i, a);
        d = std::min(d, c - origin_[a]);
        d = std::min(d, origin_[a] + length(a) - c);
    }
    return d;
}

ScalarField::ScalarField(const DomainGrid& grid, std::vector<double> values)
    : grid_(&grid), values_(std::move(values)) {
    if (values_.size() != grid.points())
        throw config_error("scalar field: value count " + std::to_string(values_.size()) +
                           " does not match grid point count " + std::to_string(grid.points()));
}

void ScalarField::check_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw config_error(std::string(what) + ": non-finite value");
}

double VectorField::norm_at(std::size_t i) const {
    if (components() == 1) return std::abs(comp(i, 0));
    const double a = comp(i, 0), b = comp(i, 1);
    return std::sqrt(a * a + b * b);
}

void VectorField::check_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw config_error(std::string(what) + ": non-finite value");
}

bool PairMask::active(const DomainGrid& g, std::size_t x, std::size_t y) const {
    if (mode == Mode::full) return true;
    double d2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        const double d = g.coord(x, a) - g.coord(y, a);
        d2 += d * d;
    }
    return d2 <= radius * radius * (1.0 + 1e-14);
}

PairField::PairField(const DomainGrid& grid, int components, PairMask mask)
    : grid_(&grid), mask_(mask), ncomp_(components), n_(grid.points()),
      values_(static_cast<std::size_t>(components) * grid.points() * grid.points(), 0.0) {
    if (components < 1 || components > 2)
        throw config_error("pair field: component count must be 1 or 2");
}

double PairField::norm_at(std::size_t x, std::size_t y) const {
    if (ncomp_ == 1) return std::abs(comp(x, y, 0));
    const double a = comp(x, y, 0), b = comp(x, y, 1);
    return std::sqrt(a * a + b * b);
}

void PairField::check_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw config_error(std::string(what) + ": non-finite value");
}

// One forward-difference pass along a single grid line: src/dst are strided
// views, n points, spacing h. Last entry replicates the previous difference.
namespace {
void forward_diff_line(const double* src, std::size_t n, std::ptrdiff_t stride, double h,
                       double* dst, std::ptrdiff_t dstride) {
    if (n == 1) {
        dst[0] = 0.0;
        return;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        dst[static_cast<std::ptrdiff_t>(i) * dstride] =
            (src[(static_cast<std::ptrdiff_t>(i) + 1) * stride] -
             src[static_cast<std::ptrdiff_t>(i) * stride]) / h;
    dst[static_cast<std::ptrdiff_t>(n - 1) * dstride] =
        dst[static_cast<std::ptrdiff_t>(n - 2) * dstride];
}

// Scatter transpose of the same difference matrix: out -= A^T v done as
// out[j] += sum_i A[i][j] * v[i], then negated by the caller convention
// (out accumulates -A^T v directly).
void forward_diff_adjoint_line(const double* v, std::size_t n, std::ptrdiff_t stride, double h,
                               double* out, std::ptrdiff_t ostride) {
    if (n == 1) return;  // difference matrix is zero for a single point
    auto at = [&](std::size_t i) -> double { return v[static_cast<std::ptrdiff_t>(i) * stride]; };
    auto acc = [&](std::size_t j, double val) {
        out[static_cast<std::ptrdiff_t>(j) * ostride] += val;
    };
    // Rows i = 0..n-2 of A contribute -1/h at column i and +1/h at column i+1;
    // the replicated row n-1 repeats columns (n-2, n-1). div = -A^T v.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        acc(i, at(i) / h);
        acc(i + 1, -at(i) / h);
    }
    acc(n - 2, at(n - 1) / h);
    acc(n - 1, -at(n - 1) / h);
}
}  // namespace

VectorField local_gradient(const ScalarField& u) {
    const DomainGrid& g = u.grid();
    VectorField out(g);
    if (g.dim() == 1) {
        forward_diff_line(u.data(), g.points(), 1, g.spacing(0), out.comp_data(0), 1);
        return out;
    }
    const std::size_t n0 = g.extent(0), n1 = g.extent(1);
    // axis 0: stride n1 between neighbors, one line per fixed i1
    for (std::size_t i1 = 0; i1 < n1; ++i1)
        forward_diff_line(u.data() + i1, n0, static_cast<std::ptrdiff_t>(n1), g.spacing(0),
                          out.comp_data(0) + i1, static_cast<std::ptrdiff_t>(n1));
    // axis 1: contiguous lines
    for (std::size_t i0 = 0; i0 < n0; ++i0)
        forward_diff_line(u.data() + i0 * n1, n1, 1, g.spacing(1),
                          out.comp_data(1) + i0 * n1, 1);
    return out;
}

ScalarField local_divergence(const VectorField& v) {
    const DomainGrid& g = v.grid();
    ScalarField out(g, 0.0);
    if (g.dim() == 1) {
        forward_diff_adjoint_line(v.comp_data(0), g.points(), 1, g.spacing(0), out.data(), 1);
        return out;
    }
    const std::size_t n0 = g.extent(0), n1 = g.extent(1);
    for (std::size_t i1 = 0; i1 < n1; ++i1)
        forward_diff_adjoint_line(v.comp_data(0) + i1, n0, static_cast<std::ptrdiff_t>(n1),
                                  g.spacing(0), out.data() + i1, static_cast<std::ptrdiff_t>(n1));
    for (std::size_t i0 = 0; i0 < n0; ++i0)
        forward_diff_adjoint_line(v.comp_data(1) + i0 * n1, n1, 1, g.spacing(1),
                                  out.data() + i0 * n1, 1);
    return out;
}

double integrate(const ScalarField& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i];
    return s * u.grid().cell_measure();
}

double integrate_pairs(const PairField& w) {
    const DomainGrid& g = w.grid();
    const double mu = g.cell_measure();
    double s = 0.0;
    for (std::size_t x = 0; x < w.rows(); ++x) {
        const double* row = w.row(x, 0);
        double rs = 0.0;
        mask_row_blocks(g, w.mask(), x, [&](std::size_t b, std::size_t e) {
            for (std::size_t y = b; y < e; ++y) rs += row[y];
        });
        s += rs;
    }
    return s * mu * mu;
}

double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid().cell_measure();
}

double inner(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        const double* pa = a.comp_data(c);
        const double* pb = b.comp_data(c);
        for (std::size_t i = 0; i < a.size(); ++i) s += pa[i] * pb[i];
    }
    return s * a.grid().cell_measure();
}

double inner_pairs(const PairField& a, const PairField& b) {
    const DomainGrid& g = a.grid();
    const double mu = g.cell_measure();
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        for (std::size_t x = 0; x < a.rows(); ++x) {
            const double* ra = a.row(x, c);
            const double* rb = b.row(x, c);
            double rs = 0.0;
            mask_row_blocks(g, a.mask(), x, [&](std::size_t bgn, std::size_t end) {
                for (std::size_t y = bgn; y < end; ++y) rs += ra[y] * rb[y];
            });
            s += rs;
        }
    }
    return s * mu * mu;
}

}  // namespace nlgrad
