// Grid geometry, local difference operators, and their exact adjointness.
// The adjoint check is done twice: once through random inner products and
// once against dense matrices assembled column by column from basis vectors,
// so the operator code is compared with an independent construction.
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "nlgrad/grid.h"
#include "nlgrad/rng.h"

using namespace nlgrad;

namespace {

// exact-step affine samples: step * i with the low mantissa bits cleared so
// every product is exact and forward differences are bitwise constant
ScalarField exact_affine(const DomainGrid& g, double slope, std::uint64_t axis = 0) {
    double step = slope * g.spacing(static_cast<int>(axis));
    std::uint64_t b;
    std::memcpy(&b, &step, sizeof b);
    b &= ~((std::uint64_t{1} << 11) - 1);
    std::memcpy(&step, &b, sizeof b);
    ScalarField u(g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto mi = g.unflat(i);
        u[i] = step * static_cast<double>(axis == 0 ? mi[0] : mi[1]);
    }
    return u;
}

}  // namespace

TEST_CASE("grid geometry and quadrature") {
    DomainGrid g = DomainGrid::interval(4, 1.0, 0.0);
    CHECK(g.dim() == 1);
    CHECK(g.points() == 4);
    CHECK(g.spacing(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.coord(0, 0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.coord(3, 0) == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(g.measure() == doctest::Approx(1.0).epsilon(1e-15));

    DomainGrid b = DomainGrid::box2d(2, 3, 1.0, 1.5);
    CHECK(b.points() == 6);
    CHECK(b.cell_measure() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(b.flat(1, 2) == 5);
    const auto mi = b.unflat(5);
    CHECK(mi[0] == 1);
    CHECK(mi[1] == 2);

    ScalarField one(g, 1.0);
    CHECK(integrate(one) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid rejects degenerate layouts") {
    CHECK_THROWS_AS(DomainGrid::interval(0), config_error);
    CHECK_THROWS_AS(DomainGrid::interval(8, -1.0), config_error);
    CHECK_THROWS_AS(DomainGrid::box2d(4, 0), config_error);
    // a single cell is legal: the replicated difference makes its gradient zero
    DomainGrid unit = DomainGrid::interval(1);
    ScalarField lone(unit, 7.0);
    VectorField G = local_gradient(lone);
    CHECK(G.comp(0, 0) == 0.0);
}

TEST_CASE("local gradient kills constants and is exact on affine fields") {
    for (const DomainGrid& g : {DomainGrid::interval(9, 2.0, -0.5), DomainGrid::box2d(5, 4)}) {
        ScalarField c(g, 3.25);
        VectorField gc = local_gradient(c);
        for (std::size_t i = 0; i < gc.size(); ++i)
            for (int k = 0; k < g.dim(); ++k) CHECK(gc.comp(i, k) == 0.0);

        ScalarField u = exact_affine(g, 0.7);
        VectorField gu = local_gradient(u);
        const double expect = gu.comp(0, 0);
        CHECK(expect != 0.0);
        for (std::size_t i = 0; i < gu.size(); ++i) CHECK(gu.comp(i, 0) == expect);
    }
}

TEST_CASE("last forward difference is replicated along each line") {
    DomainGrid g = DomainGrid::interval(6);
    Rng rng(123);
    ScalarField u = rng.field(g);
    VectorField gu = local_gradient(u);
    CHECK(gu.comp(5, 0) == gu.comp(4, 0));

    DomainGrid b = DomainGrid::box2d(3, 4);
    ScalarField v = rng.field(b);
    VectorField gv = local_gradient(v);
    // axis 0: last row copies the previous row's difference
    for (std::size_t j = 0; j < 4; ++j) CHECK(gv.comp(b.flat(2, j), 0) == gv.comp(b.flat(1, j), 0));
    // axis 1: last column copies
    for (std::size_t i = 0; i < 3; ++i) CHECK(gv.comp(b.flat(i, 3), 1) == gv.comp(b.flat(i, 2), 1));
}

TEST_CASE("divergence is the exact negative adjoint of the gradient") {
    Rng rng(777);
    for (const DomainGrid& g : {DomainGrid::interval(17, 1.3, 0.2), DomainGrid::box2d(6, 5)}) {
        for (int t = 0; t < 50; ++t) {
            ScalarField u = rng.field(g);
            VectorField v(g);
            for (std::size_t i = 0; i < v.size(); ++i)
                for (int k = 0; k < g.dim(); ++k) v.comp(i, k) = rng.uniform(-1.0, 1.0);
            const double lhs = inner(local_gradient(u), v);
            const double rhs = -inner(u, local_divergence(v));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
        }
    }
}

TEST_CASE("dense matrices of gradient and divergence are negative transposes") {
    // Independent of the inner-product check above: assemble both operators
    // column by column and compare entries under the quadrature weights.
    DomainGrid g = DomainGrid::box2d(3, 4);
    const std::size_t n = g.points();
    const int d = g.dim();
    const double mu = g.cell_measure();

    std::vector<double> G(n * d * n, 0.0);  // (i,k) x j
    for (std::size_t j = 0; j < n; ++j) {
        ScalarField e(g);
        e[j] = 1.0;
        VectorField ge = local_gradient(e);
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k) G[(i * d + k) * n + j] = ge.comp(i, k);
    }
    std::vector<double> D(n * n * d, 0.0);  // i x (j,k)
    for (std::size_t j = 0; j < n; ++j)
        for (int k = 0; k < d; ++k) {
            VectorField e(g);
            e.comp(j, k) = 1.0;
            ScalarField de = local_divergence(e);
            for (std::size_t i = 0; i < n; ++i) D[i * (n * d) + j * d + k] = de[i];
        }
    // <G u, v> mu = -<u, D v> mu componentwise: mu G[(ik),j] = -mu D[j,(ik)]
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                const double a = mu * G[(i * d + k) * n + j];
                const double b = -mu * D[j * (n * d) + i * d + k];
                CHECK(a == doctest::Approx(b).epsilon(1e-14));
            }
}

TEST_CASE("pair mask blocks cover exactly the active pairs") {
    DomainGrid g = DomainGrid::interval(16);
    PairMask full = PairMask::full();
    std::size_t count = 0;
    mask_row_blocks(g, full, 3, [&](std::size_t b, std::size_t e) { count += e - b; });
    CHECK(count == 16);

    PairMask trunc = PairMask::truncated(0.25);
    for (std::size_t x = 0; x < g.points(); ++x) {
        std::vector<bool> active(g.points(), false);
        mask_row_blocks(g, trunc, x, [&](std::size_t b, std::size_t e) {
            for (std::size_t y = b; y < e; ++y) active[y] = true;
        });
        for (std::size_t y = 0; y < g.points(); ++y) {
            const double dist = std::abs(g.coord(x, 0) - g.coord(y, 0));
            if (dist <= 0.25 - 1e-12) CHECK(active[y]);
            if (dist > 0.25 + 1e-12) CHECK(!active[y]);
        }
    }
}

TEST_CASE("pair field layout stores components contiguously per row") {
    DomainGrid g = DomainGrid::box2d(3, 3);
    PairField pf(g, 2);
    pf.comp(4, 7, 1) = 2.5;
    CHECK(pf.row(4, 1)[7] == 2.5);
    CHECK(pf.comp(4, 7, 0) == 0.0);
}
