// Best-affine reduction, the two-sided sandwich around the unit-weight pair
// seminorm, window-function gradient reconstruction, and the equivalence
// constants. Oracles: hand-computed medians, weighted means, and a ternary
// search on the 1D objective.
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nlgrad/affine.h"
#include "nlgrad/grid.h"
#include "nlgrad/nonlocal.h"
#include "nlgrad/rng.h"
#include "nlgrad/weight.h"

using namespace nlgrad;

namespace {

// objective the reduction minimizes, evaluated directly
double affine_objective(const ScalarField& u, double a, double p) {
    VectorField G = local_gradient(u);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += std::pow(std::abs(G.comp(i, 0) - a), p);
    return s * u.grid().cell_measure();
}

// ternary search on a convex 1D objective
double ternary_min(const ScalarField& u, double p, double lo, double hi) {
    for (int k = 0; k < 300; ++k) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (affine_objective(u, m1, p) < affine_objective(u, m2, p)) hi = m2;
        else lo = m1;
    }
    return 0.5 * (lo + hi);
}

ScalarField bump_field(const DomainGrid& g) {
    ScalarField u(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double x = g.coord(i, 0);
        const double r = std::abs(x - 0.5);
        u[i] = r < 0.25 ? std::cos(M_PI * r / 0.25 / 2.0) * std::cos(M_PI * r / 0.25 / 2.0) : 0.0;
    }
    return u;
}

}  // namespace

TEST_CASE("p = 2 reduction equals the mu-weighted mean, closed form") {
    Rng rng(71);
    DomainGrid g = DomainGrid::box2d(5, 4);
    ScalarField u = rng.field(g);
    AffineReduction red = affine_reduced_seminorm(u, 2.0);
    CHECK(red.iterations == 0);
    CHECK(red.converged);

    VectorField G = local_gradient(u);
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < g.points(); ++i) mean += G.comp(i, c);
        mean /= static_cast<double>(g.points());
        CHECK(red.best_slope[c] == doctest::Approx(mean).epsilon(1e-12));
    }
    double res = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i)
        for (int c = 0; c < 2; ++c) {
            const double d = G.comp(i, c) - red.best_slope[c];
            res += d * d;
        }
    res *= g.cell_measure();
    CHECK(red.residual == doctest::Approx(res).epsilon(1e-12));
}

TEST_CASE("p = 1 reduction finds the weighted median") {
    // gradient values {0, 0, 10, 0, 0}: majority pins the median at 0
    DomainGrid g = DomainGrid::interval(5);
    const double h = g.spacing(0);
    ScalarField u(g, std::vector<double>{0.0, 0.0, 0.0, 10.0 * h, 10.0 * h});
    AffineReduction red = affine_reduced_seminorm(u, 1.0);
    CHECK(red.converged);
    CHECK(std::abs(red.best_slope[0]) < 1e-6);
    CHECK(red.residual == doctest::Approx(10.0 * g.cell_measure()).epsilon(1e-6));
}

TEST_CASE("p = 1 start on a data point is handled") {
    // affine input: every gradient sample equals the slope, so the initial
    // mean sits exactly on the single data point
    DomainGrid g = DomainGrid::interval(8);
    ScalarField u(g);
    for (std::size_t i = 0; i < g.points(); ++i) u[i] = 0.7 * g.coord(i, 0) + 0.2;
    AffineReduction red = affine_reduced_seminorm(u, 1.0);
    CHECK(red.best_slope[0] == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(red.residual < 1e-8);
}

TEST_CASE("intermediate exponents match a ternary-search oracle") {
    Rng rng(72);
    DomainGrid g = DomainGrid::interval(24);
    ScalarField u = rng.field(g);
    VectorField G = local_gradient(u);
    double lo = G.comp(0, 0), hi = lo;
    for (std::size_t i = 0; i < g.points(); ++i) {
        lo = std::min(lo, G.comp(i, 0));
        hi = std::max(hi, G.comp(i, 0));
    }
    for (double p : {1.3, 1.7, 2.6, 4.0}) {
        AffineReduction red = affine_reduced_seminorm(u, p);
        const double a_star = ternary_min(u, p, lo, hi);
        CHECK(red.converged);
        CHECK(red.best_slope[0] == doctest::Approx(a_star).epsilon(1e-5));
        CHECK(red.residual == doctest::Approx(affine_objective(u, a_star, p)).epsilon(1e-9));
        // reported residual is never above the oracle objective by more than slack
        CHECK(red.residual <= affine_objective(u, a_star, p) + 1e-12);
    }
    CHECK_THROWS_AS(affine_reduced_seminorm(u, 0.5), config_error);
}

TEST_CASE("sandwich chain holds on random fields") {
    Rng rng(73);
    for (double p : {1.0, 2.0}) {
        for (int t = 0; t < 25; ++t) {
            DomainGrid g = (t % 2) ? DomainGrid::box2d(4, 4) : DomainGrid::interval(16);
            ScalarField u = rng.fork(t).field(g);
            SandwichReport rep = sandwich_check(u, p);
            CHECK(rep.ok);
            CHECK(rep.lower <= rep.middle * (1.0 + 1e-9) + 1e-12);
            CHECK(rep.middle <= rep.upper * (1.0 + 1e-9) + 1e-12);
            // middle really is the unit-weight pair seminorm power
            const double mid = seminorm_pow(u, WeightSpec::constant(1.0), p);
            CHECK(rep.middle == doctest::Approx(mid).epsilon(1e-12));
            CHECK(rep.upper == doctest::Approx(std::pow(2.0, p) * rep.lower).epsilon(1e-12));
            if (p == 1.0) CHECK(rep.nltv_value == doctest::Approx(mid).epsilon(1e-10));
        }
    }
}

TEST_CASE("sandwich is tight for affine inputs") {
    DomainGrid g = DomainGrid::interval(32);
    ScalarField u(g);
    for (std::size_t i = 0; i < g.points(); ++i) u[i] = 1.5 * g.coord(i, 0) - 0.3;
    SandwichReport rep = sandwich_check(u, 2.0);
    CHECK(rep.lower <= 1e-18);
    CHECK(rep.middle <= 1e-18);
    CHECK(rep.ok);
}

TEST_CASE("window reconstruction recovers affine slopes") {
    DomainGrid g = DomainGrid::interval(400);
    ScalarField u(g), theta = bump_field(g);
    for (std::size_t i = 0; i < g.points(); ++i) u[i] = 0.3 * g.coord(i, 0) + 1.0;
    VectorField R = theta_reconstruction(u, theta);
    for (std::size_t i = 0; i < g.points(); ++i)
        CHECK(R.comp(i, 0) == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("window reconstruction tracks smooth gradients, window-independent") {
    DomainGrid g = DomainGrid::interval(800);
    ScalarField u(g), theta = bump_field(g);
    ScalarField theta2(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double x = g.coord(i, 0);
        u[i] = std::sin(2.0 * M_PI * x);
        theta2[i] = x * (1.0 - x);  // a different admissible window
    }
    VectorField G = local_gradient(u);
    VectorField R1 = theta_reconstruction(u, theta);
    VectorField R2 = theta_reconstruction(u, theta2);
    double worst1 = 0.0, worst12 = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        worst1 = std::max(worst1, std::abs(R1.comp(i, 0) - G.comp(i, 0)));
        worst12 = std::max(worst12, std::abs(R1.comp(i, 0) - R2.comp(i, 0)));
    }
    CHECK(worst1 < 0.1);   // O(h) agreement with the sampled gradient
    CHECK(worst12 < 0.1);  // two windows reconstruct the same field

    ScalarField zero_mean(g);
    for (std::size_t i = 0; i < g.points(); ++i)
        zero_mean[i] = std::sin(2.0 * M_PI * g.coord(i, 0));
    CHECK_THROWS_AS(theta_reconstruction(u, zero_mean), config_error);
}

TEST_CASE("equivalence constants: closed form for constant windows") {
    DomainGrid g = DomainGrid::interval(64);
    ScalarField theta(g, 0.8);
    for (double p : {1.0, 2.0, 3.0}) {
        EquivalenceConstants eq = equivalence_constants(theta, p);
        // flat window: gradient term drops, everything cancels to the lower bound
        CHECK(eq.grad_theta_sup == 0.0);
        CHECK(eq.theta_sup == doctest::Approx(0.8).epsilon(1e-15));
        CHECK(eq.theta_integral == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(eq.lower_bound == doctest::Approx(std::pow(2.0, p - 1.0)).epsilon(1e-12));
        CHECK(eq.C_p_theta == doctest::Approx(eq.lower_bound).epsilon(1e-10));
    }
}

TEST_CASE("equivalence constants: scale invariance and domination") {
    DomainGrid g = DomainGrid::interval(128);
    ScalarField theta = bump_field(g), theta_scaled(g);
    for (std::size_t i = 0; i < g.points(); ++i) theta_scaled[i] = 2.0 * theta[i];
    for (double p : {1.0, 1.7, 2.0}) {
        EquivalenceConstants a = equivalence_constants(theta, p);
        EquivalenceConstants b = equivalence_constants(theta_scaled, p);
        CHECK(a.C_p_theta == doctest::Approx(b.C_p_theta).epsilon(1e-12));
        CHECK(a.bound_ok);
        CHECK(a.C_p_theta >= a.lower_bound * (1.0 - 1e-12));
    }
    Rng rng(74);
    for (int t = 0; t < 20; ++t) {
        ScalarField w = rng.fork(t).field(g, 0.1, 2.0);  // positive window
        EquivalenceConstants eq = equivalence_constants(w, 1.0 + rng.uniform(0.0, 2.0));
        CHECK(eq.bound_ok);
    }
}
