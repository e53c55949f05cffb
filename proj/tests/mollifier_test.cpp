// Bump profile and witness experiments: normalization identities against an
// independent fixed-step Simpson oracle, sampled-field invariants, the
// concentration limit, and the eps^p scaling law with its constant.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nlgrad/grid.h"
#include "nlgrad/mollifier.h"
#include "nlgrad/nonlocal.h"

using namespace nlgrad;

namespace {

// independent quadrature: plain composite Simpson with a fixed panel count,
// no shared code with the adaptive routine in the module
template <class F>
double simpson_fixed(F f, double a, double b, int panels) {
    const double h = (b - a) / (2.0 * panels);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double raw_bump(double t) { return t < 1.0 ? std::exp(1.0 / (t * t - 1.0)) : 0.0; }

}  // namespace

TEST_CASE("profile normalization against an independent Simpson oracle") {
    const MollifierProfile& pr = MollifierProfile::standard(1);
    const double I = simpson_fixed(raw_bump, 0.0, 1.0, 20000);
    CHECK(pr.normalization() == doctest::Approx(1.0 / (2.0 * I)).epsilon(1e-8));
    CHECK(pr.J0() == doctest::Approx(pr.normalization() * std::exp(-1.0)).epsilon(1e-14));
    // unit mass in 1D means F(1) = 1/2 exactly
    CHECK(pr.F1() == doctest::Approx(0.5).epsilon(1e-9));

    const MollifierProfile& pr2 = MollifierProfile::standard(2);
    const double I2 = simpson_fixed([](double r) { return r * raw_bump(r); }, 0.0, 1.0, 20000);
    CHECK(pr2.normalization() == doctest::Approx(1.0 / (2.0 * M_PI * I2)).epsilon(1e-8));

    CHECK_THROWS_AS(MollifierProfile::standard(3), config_error);
}

TEST_CASE("antiderivative table is monotone and clamps outside [0, 1]") {
    const MollifierProfile& pr = MollifierProfile::standard(1);
    CHECK(pr.F(0.0) == 0.0);
    CHECK(pr.F(-0.5) == 0.0);
    CHECK(pr.F(1.0) == pr.F1());
    CHECK(pr.F(3.7) == pr.F1());
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double z = k / 100.0;
        const double v = pr.F(z);
        CHECK(v >= prev);
        prev = v;
    }
    // spot value against the oracle
    const double half = simpson_fixed(raw_bump, 0.0, 0.5, 20000) * pr.normalization();
    CHECK(pr.F(0.5) == doctest::Approx(half).epsilon(1e-8));
}

TEST_CASE("p-mass and the scaling-law constant against the oracle") {
    const MollifierProfile& pr = MollifierProfile::standard(1);
    const double A = pr.normalization();
    const double m2 = 2.0 * simpson_fixed([&](double t) { double v = A * raw_bump(t); return v * v; },
                                          0.0, 1.0, 20000);
    CHECK(pr.mollifier_p_mass(2.0) == doctest::Approx(m2).epsilon(1e-8));
    CHECK(pr.mollifier_p_mass(1.0) == doctest::Approx(1.0).epsilon(1e-9));

    const double num = 2.0 * simpson_fixed(
        [&](double t) { return std::abs(pr.F(1.0) - pr.F(t)); }, 0.0, 1.0, 20000);
    CHECK(pr.lp_law_constant(1.0) == doctest::Approx(num).epsilon(1e-6));
    CHECK_THROWS_AS(pr.mollifier_p_mass(0.5), config_error);
}

TEST_CASE("normalization constant C_p_eps") {
    const MollifierProfile& pr = MollifierProfile::standard(1);
    CHECK(normalization_constant(1.0, 0.125, pr) == doctest::Approx(1.0).epsilon(1e-12));
    // N=1, p=2: eps^(1/2) / sqrt(int J^2)
    const double expect = std::sqrt(0.125) / std::sqrt(pr.mollifier_p_mass(2.0));
    CHECK(normalization_constant(2.0, 0.125, pr) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("witness fields: support, bound, and gradient normalization") {
    DomainGrid g = DomainGrid::interval(1024);
    const MollifierProfile& pr = MollifierProfile::standard(1);
    const double eps = 1.0 / 16.0;
    WitnessFunction h = build_witness(WitnessKind::h_eps, {0.5}, eps, 1.0, g, pr);
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double x = g.coord(i, 0);
        if (std::abs(x - 0.5) >= eps) CHECK(h.field[i] == 0.0);
        CHECK(std::abs(h.field[i]) <= pr.F1() + 1e-15);
    }

    // normalized kind: gradient magnitude to the p integrates to ~1
    for (double p : {1.0, 2.0}) {
        WitnessFunction hp = build_witness(WitnessKind::h_p_eps_x0, {0.5 + g.spacing(0) / 2.0},
                                           eps, p, g, pr);
        VectorField G = local_gradient(hp.field);
        double mass = 0.0;
        for (std::size_t i = 0; i < g.points(); ++i)
            mass += std::pow(std::abs(G.comp(i, 0)), p);
        mass *= g.cell_measure();
        CHECK(mass == doctest::Approx(1.0).epsilon(0.02));
    }

    // flattened kind: unit gradient sup-norm
    WitnessFunction rho = build_witness(WitnessKind::rho_eps_x0, {0.5 + g.spacing(0) / 2.0},
                                        eps, 1.0, g, pr);
    VectorField Gr = local_gradient(rho.field);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) sup = std::max(sup, std::abs(Gr.comp(i, 0)));
    CHECK(sup == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("witness construction guards") {
    DomainGrid g = DomainGrid::interval(64);
    const MollifierProfile& pr = MollifierProfile::standard(1);
    // ball pokes out of the domain
    CHECK_THROWS_AS(build_witness(WitnessKind::h_eps, {0.05}, 0.125, 1.0, g, pr), config_error);
    // eps below the 3h resolution guard
    CHECK_THROWS_AS(build_witness(WitnessKind::h_eps, {0.5}, 0.02, 1.0, g, pr), config_error);
    // dimension mismatch
    CHECK_THROWS_AS(build_witness(WitnessKind::h_eps, {0.5, 0.5}, 0.125, 1.0, g, pr),
                    config_error);
}

TEST_CASE("concentration: seminorm power approaches 2 f_p(x0)") {
    DomainGrid base = DomainGrid::interval(32);
    for (double p : {1.0, 2.0}) {
        WitnessLimitResult res = witness_limit_experiment(
            WeightSpec::constant(1.0), {0.5}, p, WitnessSchedule::standard(), base);
        CHECK(res.rows.size() == 4);
        CHECK(res.gap_monotone_last3);
        CHECK(res.final_rel_gap < 0.05);
        CHECK(res.rows.back().target == doctest::Approx(2.0).epsilon(1e-12));
    }
    // schedule with eps not decreasing is rejected
    WitnessSchedule bad;
    bad.eps = {0.1, 0.1};
    bad.grid_n = {64, 64};
    CHECK_THROWS_AS(
        witness_limit_experiment(WeightSpec::constant(1.0), {0.5}, 1.0, bad, base),
        config_error);
}

TEST_CASE("lp scaling: slope p and doubling factor 2^p") {
    DomainGrid base = DomainGrid::interval(32);
    for (double p : {1.0, 2.0}) {
        LpScalingResult res = lp_scaling_check({0.5}, p, WitnessSchedule::standard(), base);
        CHECK(std::abs(res.slope - p) <= 0.05);
        // halving eps divides the norm power by 2^p within 2% on the finest pair
        const double ratio = res.rows[res.rows.size() - 2].lp_norm_pow /
                             res.rows[res.rows.size() - 1].lp_norm_pow;
        CHECK(ratio == doctest::Approx(std::pow(2.0, p)).epsilon(0.02));
    }
    // p = 1 intercept matches the quadrature constant within 5% on a fine schedule
    WitnessSchedule fine;
    fine.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32};
    fine.grid_n = {256, 1024, 4096};
    LpScalingResult res = lp_scaling_check({0.5}, 1.0, fine, base);
    CHECK(res.intercept == doctest::Approx(res.law_constant).epsilon(0.05));
}

TEST_CASE("log-log fit recovers exact power laws") {
    std::vector<double> x{0.1, 0.2, 0.4, 0.8}, y;
    for (double v : x) y.push_back(3.7 * std::pow(v, 2.5));
    const auto [slope, intercept] = fit_loglog(x, y);
    CHECK(slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(intercept == doctest::Approx(3.7).epsilon(1e-12));
}
